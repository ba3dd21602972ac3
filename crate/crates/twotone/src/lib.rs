//! Simulation and estimation toolkit for resolving the frequency separation
//! of two nearly identical incoherent tones with a single spin quantum
//! sensor.
//!
//! The toolkit covers the full pipeline at desk scale:
//!
//! * [`signal`] — physical parameters and the pulse-train (dynamical
//!   decoupling) frame transformation mapping lab tones to effective
//!   detuned tones.
//! * [`prob`] — closed-form phase-averaged transition probabilities,
//!   contrast, and the small-separation expansion P ≈ a + b·δ_r².
//! * [`oracle`] — independent brute-force checks: Monte Carlo phase
//!   averaging of the exact accumulated phase and direct toggling-frame
//!   integration of the lab Hamiltonian under the pulse sequence.
//! * [`readout`] — repetitive ancilla-assisted readout chain: SNR formulas,
//!   photon-shot-noise/projection-noise budget, jump-trace simulation, and
//!   double-Gaussian histogram fitting.
//! * [`estimate`] — Fisher information and Cramér–Rao bounds, the
//!   separation estimator (approximate and exact Bessel inversion), error
//!   propagation, and the resolution-limit fixed point.
//! * [`pulse`] — mapping-pulse fidelity under Gaussian detuning and
//!   amplitude noise, by tensor Gauss–Hermite quadrature and Monte Carlo.
//! * [`scenario`] — JSON-manifest scenario runner emitting deterministic
//!   CSV artifacts with content hashes.
//!
//! Units: all internal math is rad/s and seconds; external interfaces use
//! Hz and seconds. See [`units::AngularFrequency`].
//!
//! The `examples/` directory holds one runnable example per capability; the
//! thin `twotone` binary drives [`scenario`] manifests from the command
//! line.

pub mod error;
pub mod estimate;
pub mod numerics;
pub mod oracle;
pub mod prob;
pub mod pulse;
pub mod readout;
pub mod scenario;
pub mod signal;
pub mod units;

pub use error::{Error, Result};
pub use units::AngularFrequency;
