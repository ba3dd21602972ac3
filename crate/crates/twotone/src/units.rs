//! Angular-frequency newtype and unit conventions.
//!
//! All internal math runs in rad/s and seconds. External interfaces (JSON
//! configs, CSV columns, CLI flags) speak Hz and seconds, and are converted
//! exactly once on ingestion/emission. Keeping a single internal convention
//! is what prevents stray factors of 2π.

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// An angular frequency in rad/s.
///
/// Constructors taking Hz multiply by 2π on ingestion; `hz()` divides on the
/// way out. The representation is always rad/s — never Hz.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AngularFrequency(f64);

impl AngularFrequency {
    pub const ZERO: AngularFrequency = AngularFrequency(0.0);

    /// From rad/s.
    pub fn from_rad_per_sec(value: f64) -> Self {
        debug_assert!(value.is_finite(), "angular frequency must be finite");
        AngularFrequency(value)
    }

    /// From ordinary frequency in Hz (multiplies by 2π).
    pub fn from_hz(hz: f64) -> Self {
        AngularFrequency(hz * TAU)
    }

    /// From kHz.
    pub fn from_khz(khz: f64) -> Self {
        Self::from_hz(khz * 1e3)
    }

    /// From MHz.
    pub fn from_mhz(mhz: f64) -> Self {
        Self::from_hz(mhz * 1e6)
    }

    /// Value in rad/s.
    pub fn rad_per_sec(self) -> f64 {
        self.0
    }

    /// Value in Hz.
    pub fn hz(self) -> f64 {
        self.0 / TAU
    }

    pub fn abs(self) -> Self {
        AngularFrequency(self.0.abs())
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }
}

impl Add for AngularFrequency {
    type Output = AngularFrequency;
    fn add(self, rhs: Self) -> Self {
        AngularFrequency(self.0 + rhs.0)
    }
}

impl Sub for AngularFrequency {
    type Output = AngularFrequency;
    fn sub(self, rhs: Self) -> Self {
        AngularFrequency(self.0 - rhs.0)
    }
}

impl Neg for AngularFrequency {
    type Output = AngularFrequency;
    fn neg(self) -> Self {
        AngularFrequency(-self.0)
    }
}

impl Mul<f64> for AngularFrequency {
    type Output = AngularFrequency;
    fn mul(self, rhs: f64) -> Self {
        AngularFrequency(self.0 * rhs)
    }
}

impl Div<f64> for AngularFrequency {
    type Output = AngularFrequency;
    fn div(self, rhs: f64) -> Self {
        AngularFrequency(self.0 / rhs)
    }
}
