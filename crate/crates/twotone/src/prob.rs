//! Closed-form transition probabilities, contrast, and the small-δ_r
//! expansion of the phase-averaged signal.
//!
//! Averaging the Ramsey phase over uniform tone phases turns the transition
//! probability into a product of zeroth-order Bessel functions,
//!
//! ```text
//! P(t) = 1/2 · [1 − J₀(4Ω̃₁ sin(δ₁t/2)/δ₁) · J₀(4Ω̃₂ sin(δ₂t/2)/δ₂)]
//! ```
//!
//! optionally damped by e^{−Γt} inside the bracket. For small δ_r the
//! probability expands as P ≈ a_t + b_t·δ_r² with coefficients that vanish
//! (a_t) or stay finite (b_t) at the superresolution times δ_s·t = 2nπ —
//! the mechanism that keeps the Fisher information alive as δ_r → 0.

use crate::error::{Error, Result};
use crate::numerics::bessel::{bessel_j0, bessel_j1, bessel_j1_over_x};
use crate::signal::EffectiveSignal;
use crate::units::AngularFrequency;
use serde::{Deserialize, Serialize};

/// sin(δt/2)/δ with the δ → 0 limit t/2.
pub(crate) fn half_period_kernel(delta: f64, t: f64) -> f64 {
    if delta == 0.0 {
        return t / 2.0;
    }
    let s = delta * t;
    if s.abs() < 1e-8 {
        // t/2 · (1 − s²/24): next term is ~1e-33 at the branch point.
        t / 2.0 * (1.0 - s * s / 24.0)
    } else {
        (0.5 * delta * t).sin() / delta
    }
}

/// Signed Bessel argument 4Ω̃ sin(δt/2)/δ for one tone.
pub(crate) fn bessel_argument(amp_eff: f64, delta: f64, t: f64) -> f64 {
    4.0 * amp_eff * half_period_kernel(delta, t)
}

/// Phase-averaged transition probability, Bessel product form. Value in
/// [0, 1/2]; each tone uses its own effective amplitude.
pub fn transition_probability(eff: &EffectiveSignal, t: f64) -> f64 {
    debug_assert!(t >= 0.0);
    let x1 = bessel_argument(eff.amp_eff_1.rad_per_sec(), eff.delta_1.rad_per_sec(), t);
    let x2 = bessel_argument(eff.amp_eff_2.rad_per_sec(), eff.delta_2.rad_per_sec(), t);
    0.5 * (1.0 - bessel_j0(x1) * bessel_j0(x2))
}

/// Transition probability with sensor decoherence at rate Γ: the Bessel
/// product is damped by e^{−Γt}, so P → 1/2 as t → ∞.
pub fn transition_probability_decohered(eff: &EffectiveSignal, t: f64, gamma: f64) -> f64 {
    debug_assert!(gamma >= 0.0);
    let x1 = bessel_argument(eff.amp_eff_1.rad_per_sec(), eff.delta_1.rad_per_sec(), t);
    let x2 = bessel_argument(eff.amp_eff_2.rad_per_sec(), eff.delta_2.rad_per_sec(), t);
    0.5 * (1.0 - (-gamma * t).exp() * bessel_j0(x1) * bessel_j0(x2))
}

/// A (time, probability, contrast) sample with C = 1 − 2P exactly.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ContrastPoint {
    pub time: f64,
    pub probability: f64,
    pub contrast: f64,
}

/// Wrap a probability into a contrast point: C = (1 − P) − P = 1 − 2P.
pub fn contrast(time: f64, probability: f64) -> ContrastPoint {
    debug_assert!((0.0..=1.0).contains(&probability));
    ContrastPoint {
        time,
        probability,
        contrast: 1.0 - 2.0 * probability,
    }
}

/// Second-order expansion P ≈ a_t + b_t·δ_r², with δ_r in rad/s.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProbExpansion {
    /// Probability offset at δ_r = 0; zero at superresolution times.
    pub a: f64,
    /// Curvature coefficient, (rad/s)^−2.
    pub b: f64,
}

/// Expansion coefficients for equal effective amplitudes.
///
/// `a = 1/2·[1 − J₀²(u)]` with u = 4Ω̃ sin(δ_s t/2)/δ_s. The textbook form
/// of `b` involves cot and csc³ factors that blow up exactly at the
/// superresolution points δ_s·t = 2nπ where the protocol operates; here it
/// is evaluated through the algebraically identical smooth form
///
/// ```text
/// b = (8Ω̃²/δ_s⁴) · [ (J₀²(u)+J₁²(u))·(x·cos x − sin x)²
///                     − J₀(u)·(J₁(u)/u)·(x² − sin²x) ],   x = δ_s t/2,
/// ```
///
/// whose only delicate piece is J₁(u)/u, finite by series. At δ_s·t = 2nπ
/// this reduces to b = 4Ω̃²n²π²/δ_s⁴ = Ω̃²t⁴/(2nπ)².
pub fn expansion_coefficients(
    amp_eff: AngularFrequency,
    delta_s: AngularFrequency,
    t: f64,
) -> Result<ProbExpansion> {
    let omega = amp_eff.rad_per_sec();
    let ds = delta_s.rad_per_sec();
    if ds == 0.0 {
        return Err(Error::domain(
            "expansion coefficients are singular at delta_s = 0",
        ));
    }
    if omega == 0.0 {
        return Ok(ProbExpansion { a: 0.0, b: 0.0 });
    }
    let x = 0.5 * ds * t;
    let u = 4.0 * omega * x.sin() / ds;
    let j0 = bessel_j0(u);
    let j1 = bessel_j1(u);
    let a = 0.5 * (1.0 - j0 * j0);
    let envelope = x * x.cos() - x.sin();
    let lattice = x * x - x.sin() * x.sin();
    let b = 8.0 * omega * omega / ds.powi(4)
        * ((j0 * j0 + j1 * j1) * envelope * envelope - j0 * bessel_j1_over_x(u) * lattice);
    Ok(ProbExpansion { a, b })
}

/// Expansion from an effective signal; rejects unequal amplitudes, for which
/// the second-order form is not derived.
pub fn expansion_for(eff: &EffectiveSignal, t: f64) -> Result<ProbExpansion> {
    if !eff.equal_amplitudes() {
        return Err(Error::domain(
            "expansion coefficients require equal effective amplitudes",
        ));
    }
    expansion_coefficients(eff.amp_eff_1, eff.delta_s(), t)
}

/// Resonant-pulse calibration curve: the phase-averaged probability when the
/// pulse train sits exactly on the tone (δ = 0).
///
/// One tone:  P = 1/2·[1 − J₀(2Ω̃t)].
/// Two tones: P = 1/2·[1 − J₀²(2Ω̃t)].
pub fn calibration_probability(amp_eff: AngularFrequency, t: f64, tones: u8) -> Result<f64> {
    let j = bessel_j0(2.0 * amp_eff.rad_per_sec() * t);
    match tones {
        1 => Ok(0.5 * (1.0 - j)),
        2 => Ok(0.5 * (1.0 - j * j)),
        n => Err(Error::Domain(format!("calibration supports 1 or 2 tones, got {n}"))),
    }
}

/// Least-squares recovery of Ω̃ from (t, P) calibration data.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationFit {
    pub amp_eff: AngularFrequency,
    /// 1σ uncertainty on the fitted amplitude, rad/s.
    pub sigma: f64,
    pub rss: f64,
}

/// Fit the single- or two-tone calibration curve to measured probabilities.
pub fn fit_calibration(
    data: &[(f64, f64)],
    tones: u8,
    initial_amp: AngularFrequency,
) -> Result<CalibrationFit> {
    if !(tones == 1 || tones == 2) {
        return Err(Error::domain("calibration supports 1 or 2 tones"));
    }
    let ts: Vec<f64> = data.iter().map(|p| p.0).collect();
    let ps: Vec<f64> = data.iter().map(|p| p.1).collect();
    let fit = crate::numerics::fitting::levenberg_marquardt(
        move |t, p| {
            let j = bessel_j0(2.0 * p[0] * t);
            if tones == 1 {
                0.5 * (1.0 - j)
            } else {
                0.5 * (1.0 - j * j)
            }
        },
        &ts,
        &ps,
        &[initial_amp.rad_per_sec()],
        300,
    )?;
    Ok(CalibrationFit {
        amp_eff: AngularFrequency::from_rad_per_sec(fit.params[0]),
        sigma: fit.sigma[0],
        rss: fit.rss,
    })
}
