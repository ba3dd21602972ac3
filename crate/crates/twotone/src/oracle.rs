//! Independent brute-force oracles for the closed-form model.
//!
//! Two routes that never touch the Bessel-product code path:
//!
//! * Monte Carlo phase averaging — draw the tone phases, evaluate the exact
//!   accumulated phase in closed form, average sin²(φ). Converges to the
//!   Bessel product by construction of the integral it estimates.
//! * Toggling-frame integration — integrate the *lab-frame* signal times the
//!   ±1 pulse modulation function with composite Simpson, exact breakpoints
//!   at the pulse times. Validates the effective-frame amplitude scaling and
//!   detuning shift from first principles.
//!
//! All sampling is counter-based (see [`crate::numerics::rng`]): identical
//! `(seed, stream_id, n_samples)` gives bit-identical estimates regardless
//! of work partitioning, and accumulation is a fixed pairwise tree.

use crate::error::{Error, Result};
use crate::numerics::quadrature::simpson;
use crate::numerics::rng::counter_uniform;
use crate::numerics::stats::pairwise_sum;
use crate::signal::{DdSequence, EffectiveSignal, PhaseModel, TwoToneSignal};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// What the per-sample estimator records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum McMode {
    /// sin²(φ) per phase draw — the infinite-shot limit of the measurement.
    #[default]
    PhaseAverage,
    /// One Bernoulli projection per phase draw — finite-shot quantum
    /// projection noise included.
    ProjectiveShot,
}

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McConfig {
    pub n_samples: u64,
    pub seed: u64,
    /// Sub-stream selector for parallel or repeated runs.
    pub stream_id: u64,
    #[serde(default)]
    pub mode: McMode,
}

impl McConfig {
    pub fn new(n_samples: u64, seed: u64, stream_id: u64) -> Self {
        McConfig {
            n_samples,
            seed,
            stream_id,
            mode: McMode::PhaseAverage,
        }
    }

    pub fn with_mode(mut self, mode: McMode) -> Self {
        self.mode = mode;
        self
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_samples: u64,
}

/// Phase contribution of one effective tone, numerically stable at δ → 0:
///
/// Ω̃·[cos φ − cos(δt + φ)]/δ = Ω̃·t·[ (2 sin²(s/2)/s)·cos φ + (sin s/s)·sin φ ],
/// s = δt, with the s → 0 limit Ω̃·t·sin φ.
fn tone_phase(amp_eff: f64, delta: f64, t: f64, phi: f64) -> f64 {
    let s = delta * t;
    let (cos_part, sin_part) = if s.abs() < 1e-8 {
        ((s / 2.0) * (1.0 - s * s / 12.0), 1.0 - s * s / 6.0)
    } else {
        let half = (0.5 * s).sin();
        (2.0 * half * half / s, s.sin() / s)
    };
    amp_eff * t * (cos_part * phi.cos() + sin_part * phi.sin())
}

/// Exact accumulated sensor phase for fixed tone phases,
/// φ = Σ_i Ω̃_i [cos φ_i − cos(δ_i t + φ_i)]/δ_i.
pub fn accumulated_phase(eff: &EffectiveSignal, t: f64, phi_1: f64, phi_2: f64) -> f64 {
    tone_phase(
        eff.amp_eff_1.rad_per_sec(),
        eff.delta_1.rad_per_sec(),
        t,
        phi_1,
    ) + tone_phase(
        eff.amp_eff_2.rad_per_sec(),
        eff.delta_2.rad_per_sec(),
        t,
        phi_2,
    )
}

/// Monte Carlo transition probability over the tone-phase distribution.
///
/// For [`PhaseModel::Fixed`] there is no randomness: the mean is
/// sin²(accumulated phase) and the standard error is zero (in
/// `PhaseAverage` mode).
pub fn mc_transition_probability(
    eff: &EffectiveSignal,
    phase_model: &PhaseModel,
    t: f64,
    mc: &McConfig,
) -> McEstimate {
    assert!(mc.n_samples >= 1);
    if let (PhaseModel::Fixed { phi_1, phi_2 }, McMode::PhaseAverage) = (phase_model, mc.mode) {
        let p = accumulated_phase(eff, t, *phi_1, *phi_2).sin().powi(2);
        return McEstimate {
            mean: p,
            std_error: 0.0,
            n_samples: mc.n_samples,
        };
    }
    let n = mc.n_samples;
    let mut values = Vec::with_capacity(n as usize);
    for i in 0..n {
        // Three counters reserved per sample so the projective draw never
        // shifts the phase stream.
        let (phi_1, phi_2) = match phase_model {
            PhaseModel::IndependentUniform => (
                TAU * counter_uniform(mc.seed, mc.stream_id, 3 * i),
                TAU * counter_uniform(mc.seed, mc.stream_id, 3 * i + 1),
            ),
            PhaseModel::Fixed { phi_1, phi_2 } => (*phi_1, *phi_2),
        };
        let p = accumulated_phase(eff, t, phi_1, phi_2).sin().powi(2);
        values.push(match mc.mode {
            McMode::PhaseAverage => p,
            McMode::ProjectiveShot => {
                let u = counter_uniform(mc.seed, mc.stream_id, 3 * i + 2);
                if u < p {
                    1.0
                } else {
                    0.0
                }
            }
        });
    }
    let mean = pairwise_sum(&values) / n as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let std_error = if n > 1 {
        (pairwise_sum(&sq) / (n as f64 - 1.0) / n as f64).sqrt()
    } else {
        0.0
    };
    McEstimate {
        mean,
        std_error,
        n_samples: n,
    }
}

/// Lab-frame accumulated phase under the pulse train, by direct quadrature.
///
/// The modulation m(s) starts at +1 and flips at each pulse time k·τ
/// (k = 1..N−1; the final pulse coincides with readout and does not
/// modulate), so the intervals are [0, τ], [τ, 2τ], …, [(N−1)τ, Nτ] with
/// m = (−1)^k on the k-th. Each interval is integrated with composite
/// Simpson using `steps_per_interval` panels and exact breakpoints at the
/// pulse times; global convergence is 4th order in the step size.
///
/// Returns the cumulative phase sampled at every interval boundary,
/// `(time, phase)`, ending at t = N·τ.
pub fn toggling_phase_series(
    signal: &TwoToneSignal,
    dd: &DdSequence,
    phi_1: f64,
    phi_2: f64,
    steps_per_interval: u32,
) -> Result<Vec<(f64, f64)>> {
    if steps_per_interval < 50 {
        return Err(Error::domain(
            "steps_per_interval must be >= 50 for the stated 4th-order accuracy",
        ));
    }
    if steps_per_interval % 2 != 0 {
        return Err(Error::domain(
            "steps_per_interval must be even so Simpson panels align with pulse boundaries",
        ));
    }
    let tau = dd.pulse_spacing;
    let n_pulses = dd.pulse_count as usize;
    let (a1, w1) = (
        signal.amplitude_1.rad_per_sec(),
        signal.omega_1.rad_per_sec(),
    );
    let (a2, w2) = (
        signal.amplitude_2.rad_per_sec(),
        signal.omega_2.rad_per_sec(),
    );
    let field = |s: f64| a1 * (w1 * s + phi_1).sin() + a2 * (w2 * s + phi_2).sin();

    // Interval boundaries at the pulse times: 0, τ, 2τ, ..., Nτ.
    let boundaries: Vec<f64> = (0..=n_pulses).map(|k| k as f64 * tau).collect();

    let mut out = Vec::with_capacity(boundaries.len());
    let mut phase = 0.0;
    out.push((0.0, 0.0));
    for (j, pair) in boundaries.windows(2).enumerate() {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        phase += sign * simpson(field, pair[0], pair[1], steps_per_interval as usize);
        out.push((pair[1], phase));
    }
    Ok(out)
}

/// Final lab-frame phase at t = pulse_count·τ. See [`toggling_phase_series`].
pub fn toggling_integration(
    signal: &TwoToneSignal,
    dd: &DdSequence,
    phi_1: f64,
    phi_2: f64,
    steps_per_interval: u32,
) -> Result<f64> {
    Ok(toggling_phase_series(signal, dd, phi_1, phi_2, steps_per_interval)?
        .last()
        .map(|&(_, p)| p)
        .unwrap_or(0.0))
}

/// The closed-form prediction for the toggling integrator, phases mapped to
/// the pulse-frame convention.
///
/// With the modulation at +1 from the start of the sequence to the first
/// pulse at τ, the lab phase tracks φ_eff(π/2 − φ_i), where φ_eff is the
/// effective-frame accumulated phase built from the exact amplitude
/// scaling. (The quarter-turn offset is where the square-wave modulation
/// sits relative to the tone's zero crossing at s = 0.)
pub fn toggling_closed_form(
    signal: &TwoToneSignal,
    dd: &DdSequence,
    phi_1: f64,
    phi_2: f64,
    t: f64,
) -> Result<f64> {
    let eff = crate::signal::effective_transform(signal, dd)?;
    Ok(accumulated_phase(
        &eff,
        t,
        std::f64::consts::FRAC_PI_2 - phi_1,
        std::f64::consts::FRAC_PI_2 - phi_2,
    ))
}
