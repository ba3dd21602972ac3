//! Shared low-level numerics: special functions, solvers, quadrature,
//! deterministic random streams, and small least-squares fits.

pub mod bessel;
pub mod fitting;
pub mod quadrature;
pub mod rng;
pub mod roots;
pub mod stats;
