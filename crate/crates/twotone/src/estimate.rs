//! Fisher information, Cramér–Rao bounds, the separation estimator, error
//! propagation, and the resolution-limit solver.
//!
//! The protocol's figure of merit is the Fisher information of the
//! transition probability with respect to the half separation δ_r,
//! I = (∂P/∂δ_r)²/σ², with the noise variance σ² set by the chosen model.
//! At the superresolution times both ∂P and the projection noise vanish
//! together, leaving the finite limit I → 4b (b the curvature coefficient
//! of P ≈ a + b·δ_r²); that limit is taken analytically, never as 0/0.

use crate::error::{Error, Result};
use crate::numerics::bessel::{bessel_j0, bessel_j1};
use crate::numerics::roots::{brent, first_bracket};
use crate::prob::{
    expansion_coefficients, transition_probability, transition_probability_decohered,
};
use crate::signal::EffectiveSignal;
use crate::units::AngularFrequency;
use serde::{Deserialize, Serialize};

/// Noise entering the Fisher-information denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NoiseModel {
    /// Quantum projection noise only: σ² = P(1−P).
    QpnOnly,
    /// A constant probability floor ε added to P: σ² = (P+ε)(1−(P+ε)),
    /// derivative unchanged.
    EpsilonFloor(f64),
    /// Sensor decoherence at rate Γ: P is the damped probability and
    /// σ² = P(1−P). Equivalent to an ε floor of (e^{2Γt}−1)/4 near the
    /// superresolution point.
    Decoherence(f64),
    /// Additive classical readout variance on top of projection noise:
    /// σ² = P(1−P) + σ²_readout.
    ReadoutVariance(f64),
}

/// Fisher information at a parameter point.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FisherResult {
    /// Per-measurement information, (rad/s)⁻².
    pub fi_per_shot: f64,
    /// n_exp · fi_per_shot.
    pub fi_total: f64,
    /// 1/sqrt(fi_total); infinite when the information vanishes.
    pub crb_std: f64,
    pub noise_model: NoiseModel,
    pub n_exp: u64,
}

fn probability_at(
    amp_eff: f64,
    delta_s: f64,
    delta_r: f64,
    t: f64,
    noise: &NoiseModel,
) -> f64 {
    let eff = EffectiveSignal::symmetric(
        AngularFrequency::from_rad_per_sec(amp_eff),
        AngularFrequency::from_rad_per_sec(delta_s),
        AngularFrequency::from_rad_per_sec(delta_r),
    );
    match noise {
        NoiseModel::Decoherence(gamma) => transition_probability_decohered(&eff, t, *gamma),
        _ => transition_probability(&eff, t),
    }
}

fn noise_variance(p: f64, noise: &NoiseModel) -> f64 {
    match noise {
        NoiseModel::QpnOnly | NoiseModel::Decoherence(_) => p * (1.0 - p),
        NoiseModel::EpsilonFloor(eps) => {
            let q = (p + eps).clamp(0.0, 1.0);
            q * (1.0 - q)
        }
        NoiseModel::ReadoutVariance(var) => p * (1.0 - p) + var,
    }
}

/// Fisher information about δ_r for equal effective amplitudes.
///
/// ∂P/∂δ_r comes from a Richardson-extrapolated central difference with
/// step h = max(1e-6·|δ_s|, 1e-3·|δ_r|). At δ_r = 0 on a superresolution
/// point under `QpnOnly` the 0/0 is replaced by its analytic limit 4b; a
/// vanishing-denominator point anywhere else is reported as indeterminate.
pub fn fisher_information(
    amp_eff: AngularFrequency,
    delta_s: AngularFrequency,
    delta_r: AngularFrequency,
    t: f64,
    noise: NoiseModel,
    n_exp: u64,
) -> Result<FisherResult> {
    if let NoiseModel::Decoherence(g) = noise {
        if g < 0.0 {
            return Err(Error::domain("decay rate must be >= 0"));
        }
    }
    let (omega, ds, dr) = (
        amp_eff.rad_per_sec(),
        delta_s.rad_per_sec(),
        delta_r.rad_per_sec(),
    );
    let p_of = |x: f64| probability_at(omega, ds, x, t, &noise);

    let h = (1e-6 * ds.abs()).max(1e-3 * dr.abs());
    let central = |h: f64| (p_of(dr + h) - p_of(dr - h)) / (2.0 * h);
    let deriv = (4.0 * central(h / 2.0) - central(h)) / 3.0;

    let p = p_of(dr);
    let var = noise_variance(p, &noise);
    let num = deriv * deriv;

    let fi_per_shot = if var > 0.0 {
        num / var
    } else {
        // σ² = 0. On the QPN branch at δ_r = 0 this is the superresolution
        // point, where the information has the finite limit 4b.
        let exp = expansion_coefficients(amp_eff, delta_s, t)?;
        let at_superresolution = exp.a.abs() < 1e-12;
        match noise {
            NoiseModel::QpnOnly if dr == 0.0 && at_superresolution => 4.0 * exp.b,
            _ => {
                return Err(Error::IndeterminateFisher(format!(
                    "sigma^2 = 0 at delta_r = {dr:e} rad/s off the analytic-limit branch"
                )))
            }
        }
    };
    let fi_total = fi_per_shot * n_exp as f64;
    Ok(FisherResult {
        fi_per_shot,
        fi_total,
        crb_std: crb_uncertainty(fi_per_shot, n_exp),
        noise_model: noise,
        n_exp,
    })
}

/// Fisher information from an effective signal (rejects unequal amplitudes,
/// for which the symmetric parameterization does not apply).
pub fn fisher_information_for(
    eff: &EffectiveSignal,
    t: f64,
    noise: NoiseModel,
    n_exp: u64,
) -> Result<FisherResult> {
    if !eff.equal_amplitudes() {
        return Err(Error::domain(
            "Fisher information requires equal effective amplitudes",
        ));
    }
    fisher_information(eff.amp_eff_1, eff.delta_s(), eff.delta_r(), t, noise, n_exp)
}

/// Cramér–Rao lower bound on the standard deviation of δ_r after `n_exp`
/// repetitions: 1/sqrt(n_exp·I). Infinite when the information vanishes.
pub fn crb_uncertainty(fi_per_shot: f64, n_exp: u64) -> f64 {
    let total = fi_per_shot * n_exp as f64;
    if total > 0.0 {
        1.0 / total.sqrt()
    } else {
        f64::INFINITY
    }
}

/// How to turn a measured contrast into a separation estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EstimationMethod {
    /// Superresolution small-δ_r formula δ_r ≈ (δ_s/Ω̃t)·sqrt((1−C)/2).
    Approx,
    /// Root-solve the Bessel-product contrast for δ_r on [0, δ_s/2].
    /// `reference` selects the monotonic branch to invert on (brackets
    /// expand outward from it) and, in error propagation, the point at
    /// which partial derivatives are taken; without it the first branch
    /// from δ_r = 0 is used.
    ExactInversion {
        reference: Option<AngularFrequency>,
    },
}

/// A separation estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DeltaREstimate {
    pub delta_r: AngularFrequency,
    /// Whether the Approx formula is inside its validity regime here
    /// (output <= δ_s/10 and contrast >= 0.5).
    pub approx_regime_ok: bool,
}

fn approx_estimate(contrast: f64, amp_eff: f64, delta_s: f64, t: f64) -> f64 {
    delta_s / (amp_eff * t) * ((1.0 - contrast) / 2.0).sqrt()
}

fn model_contrast(amp_eff: f64, delta_s: f64, delta_r: f64, t: f64) -> f64 {
    let eff = EffectiveSignal::symmetric(
        AngularFrequency::from_rad_per_sec(amp_eff),
        AngularFrequency::from_rad_per_sec(delta_s),
        AngularFrequency::from_rad_per_sec(delta_r),
    );
    1.0 - 2.0 * transition_probability(&eff, t)
}

/// Estimate δ_r from a measured contrast.
///
/// The exact route inverts C = J₀(x₁)J₀(x₂) by bracketed Brent iteration on
/// [0, δ_s/2]; the contrast there is not single-valued once the Bessel
/// arguments pass their first root, so a `reference` (e.g. the nominal
/// generator setting) picks the branch. Failure to bracket means the target
/// contrast never occurs on the searched branch.
pub fn estimate_delta_r(
    contrast: f64,
    amp_eff: AngularFrequency,
    delta_s: AngularFrequency,
    t: f64,
    method: EstimationMethod,
) -> Result<DeltaREstimate> {
    if !(-1.0 < contrast && contrast <= 1.0) {
        return Err(Error::domain("contrast must lie in (-1, 1]"));
    }
    let (omega, ds) = (amp_eff.rad_per_sec(), delta_s.rad_per_sec().abs());
    if omega <= 0.0 || ds <= 0.0 || t <= 0.0 {
        return Err(Error::domain("need positive amplitude, detuning, time"));
    }
    let approx = approx_estimate(contrast, omega, ds, t);
    let regime_ok = approx <= ds / 10.0 && contrast >= 0.5;
    let value = match method {
        EstimationMethod::Approx => approx,
        EstimationMethod::ExactInversion { reference } => {
            if contrast == 1.0 {
                0.0
            } else {
                invert_contrast(contrast, omega, ds, t, reference.map(|r| r.rad_per_sec()))?
            }
        }
    };
    Ok(DeltaREstimate {
        delta_r: AngularFrequency::from_rad_per_sec(value),
        approx_regime_ok: regime_ok,
    })
}

fn invert_contrast(
    target: f64,
    omega: f64,
    ds: f64,
    t: f64,
    reference: Option<f64>,
) -> Result<f64> {
    let hi = ds / 2.0;
    let f = |dr: f64| model_contrast(omega, ds, dr, t) - target;
    let cells = 4096usize;
    let step = hi / cells as f64;
    let bracket = match reference {
        None => first_bracket(f, 0.0, hi, cells),
        Some(r) => {
            // Expand outward from the reference point, nearest cell first.
            let r = r.abs().clamp(0.0, hi);
            let mut found = None;
            'out: for k in 0..cells {
                for (a, b) in [
                    (r + k as f64 * step, r + (k + 1) as f64 * step),
                    (r - (k + 1) as f64 * step, r - k as f64 * step),
                ] {
                    let (a, b) = (a.clamp(0.0, hi), b.clamp(0.0, hi));
                    if a >= b {
                        continue;
                    }
                    if f(a).signum() != f(b).signum() || f(a) == 0.0 {
                        found = Some((a, b));
                        break 'out;
                    }
                }
            }
            found
        }
    };
    let (a, b) = bracket.ok_or_else(|| {
        Error::NoRoot(format!(
            "contrast {target} not reached on the searched branch of [0, delta_s/2]"
        ))
    })?;
    brent(f, a, b, 1e-12 * ds, 300)
}

/// Inputs for uncertainty propagation through the estimator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct UncertaintyInputs {
    pub contrast: f64,
    pub d_contrast: f64,
    pub delta_s: AngularFrequency,
    pub d_delta_s: AngularFrequency,
    pub amp_eff: AngularFrequency,
    pub d_amp_eff: AngularFrequency,
    pub time: f64,
    pub method: EstimationMethod,
}

/// One estimator row: the estimate and its propagated uncertainty split
/// into contrast, detuning, and amplitude contributions plus the
/// quadrature-sum total.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub contrast: f64,
    pub d_contrast: f64,
    pub delta_r_hat: AngularFrequency,
    pub from_contrast: AngularFrequency,
    pub from_delta_s: AngularFrequency,
    pub from_amp: AngularFrequency,
    pub total: AngularFrequency,
    pub method: EstimationMethod,
    /// Set when (1−C) < ΔC: the contrast term sits on the diverging flank.
    pub contrast_term_divergent: bool,
}

/// Propagate (ΔC, Δδ_s, ΔΩ̃) through the chosen estimator to δ_r.
///
/// Approx uses the closed-form partials of the small-δ_r formula; the exact
/// route differentiates the Bessel-product contrast implicitly (analytic
/// Bessel derivatives) at the reference point when given, else at the
/// estimate itself. The total is the quadrature sum of the three terms.
pub fn propagate_uncertainty(inp: &UncertaintyInputs) -> Result<EstimateRecord> {
    if inp.d_contrast < 0.0
        || inp.d_delta_s.rad_per_sec() < 0.0
        || inp.d_amp_eff.rad_per_sec() < 0.0
    {
        return Err(Error::domain("uncertainties must be >= 0"));
    }
    let est = estimate_delta_r(inp.contrast, inp.amp_eff, inp.delta_s, inp.time, inp.method)?;
    let dr_hat = est.delta_r.rad_per_sec();
    let (omega, ds, t) = (
        inp.amp_eff.rad_per_sec(),
        inp.delta_s.rad_per_sec(),
        inp.time,
    );
    let one_minus_c = 1.0 - inp.contrast;
    let divergent = one_minus_c < inp.d_contrast;

    let (from_c, from_ds, from_omega) = match inp.method {
        EstimationMethod::Approx => {
            // δ = (δ_s/Ω̃t)·sqrt((1−C)/2):
            //   ∂δ/∂C  = −δ/(2(1−C)),  ∂δ/∂δ_s = δ/δ_s,  ∂δ/∂Ω̃ = −δ/Ω̃.
            let from_c = if one_minus_c > 0.0 {
                ds * inp.d_contrast / (2.0 * std::f64::consts::SQRT_2 * omega * t * one_minus_c.sqrt())
            } else {
                f64::MAX
            };
            (
                from_c,
                dr_hat / ds * inp.d_delta_s.rad_per_sec(),
                dr_hat / omega * inp.d_amp_eff.rad_per_sec(),
            )
        }
        EstimationMethod::ExactInversion { reference } => {
            let at = reference.map(|r| r.rad_per_sec()).unwrap_or(dr_hat);
            let g = contrast_gradient(omega, ds, at, t);
            if g.d_dr.abs() < 1e-300 {
                return Err(Error::domain(
                    "contrast derivative vanishes at the linearization point",
                ));
            }
            (
                (inp.d_contrast / g.d_dr).abs(),
                (g.d_ds / g.d_dr * inp.d_delta_s.rad_per_sec()).abs(),
                (g.d_omega / g.d_dr * inp.d_amp_eff.rad_per_sec()).abs(),
            )
        }
    };
    let total = (from_c * from_c + from_ds * from_ds + from_omega * from_omega).sqrt();
    Ok(EstimateRecord {
        contrast: inp.contrast,
        d_contrast: inp.d_contrast,
        delta_r_hat: est.delta_r,
        from_contrast: AngularFrequency::from_rad_per_sec(from_c),
        from_delta_s: AngularFrequency::from_rad_per_sec(from_ds),
        from_amp: AngularFrequency::from_rad_per_sec(from_omega),
        total: AngularFrequency::from_rad_per_sec(total),
        method: inp.method,
        contrast_term_divergent: divergent,
    })
}

struct ContrastGradient {
    d_dr: f64,
    d_ds: f64,
    d_omega: f64,
}

/// Analytic partial derivatives of C = J₀(x₁)J₀(x₂) with
/// x_i = 4Ω̃ sin(δ_i t/2)/δ_i, δ₁ = δ_s − δ_r, δ₂ = δ_s + δ_r.
fn contrast_gradient(omega: f64, ds: f64, dr: f64, t: f64) -> ContrastGradient {
    let g = |delta: f64| crate::prob::half_period_kernel(delta, t);
    // g'(δ) = [(t/2)cos(δt/2) − g(δ)]/δ, series −δt³/24 near zero.
    let g_prime = |delta: f64| {
        let s = delta * t;
        if s.abs() < 1e-6 {
            -delta * t * t * t / 24.0
        } else {
            ((t / 2.0) * (0.5 * s).cos() - g(delta)) / delta
        }
    };
    let d1 = ds - dr;
    let d2 = ds + dr;
    let x1 = 4.0 * omega * g(d1);
    let x2 = 4.0 * omega * g(d2);
    let (j0_1, j1_1) = (bessel_j0(x1), bessel_j1(x1));
    let (j0_2, j1_2) = (bessel_j0(x2), bessel_j1(x2));
    // dC/dx_i = −J₁(x_i)·J₀(x_other); J₁ odd, so signed x_i just work.
    let dc_dx1 = -j1_1 * j0_2;
    let dc_dx2 = -j0_1 * j1_2;
    let dx1 = 4.0 * omega * g_prime(d1);
    let dx2 = 4.0 * omega * g_prime(d2);
    ContrastGradient {
        // ∂δ₁/∂δ_r = −1, ∂δ₂/∂δ_r = +1; both ∂δ_i/∂δ_s = +1.
        d_dr: -dc_dx1 * dx1 + dc_dx2 * dx2,
        d_ds: dc_dx1 * dx1 + dc_dx2 * dx2,
        d_omega: (dc_dx1 * x1 + dc_dx2 * x2) / omega,
    }
}

/// Smallest resolvable separation: the fixed point δ* where the
/// decoherence-limited Cramér–Rao bound equals the separation itself,
/// Δδ_r(δ*) = δ*. Solved by sign-change search on a log grid over
/// [1e-3 rad/s, δ_s] plus Brent refinement in log space.
pub fn resolution_limit(
    amp_eff: AngularFrequency,
    delta_s: AngularFrequency,
    t: f64,
    gamma: f64,
    n_exp: u64,
) -> Result<AngularFrequency> {
    if gamma < 0.0 {
        return Err(Error::domain("decay rate must be >= 0"));
    }
    let lo = 1e-3_f64;
    let hi = delta_s.rad_per_sec().abs();
    let noise = NoiseModel::Decoherence(gamma);
    let gap = |log_dr: f64| -> f64 {
        let dr = log_dr.exp();
        let fi = fisher_information(
            amp_eff,
            delta_s,
            AngularFrequency::from_rad_per_sec(dr),
            t,
            noise,
            n_exp,
        )
        .map(|r| r.fi_per_shot)
        .unwrap_or(0.0);
        crb_uncertainty(fi, n_exp) - dr
    };
    let (a, b) = first_bracket(gap, lo.ln(), hi.ln(), 400).ok_or_else(|| {
        Error::NoResolution(format!(
            "no crossing of the resolution criterion in [{lo:e}, {hi:e}] rad/s"
        ))
    })?;
    let root = brent(gap, a, b, 1e-12, 300)?;
    Ok(AngularFrequency::from_rad_per_sec(root.exp()))
}

/// One row of the estimator summary table.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TableRow {
    pub actual_delta_r: AngularFrequency,
    pub record: EstimateRecord,
}

/// CSV emitter for estimator tables (one row per configured separation).
pub fn table_csv(rows: &[TableRow]) -> String {
    let mut out = String::from(
        "actual_dr_hz,mean_C,dC,est_dr_hz,dDr_dC_hz,dDr_dds_hz,dDr_dOmega_hz,dDr_total_hz\n",
    );
    for row in rows {
        let r = &row.record;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.actual_delta_r.hz(),
            r.contrast,
            r.d_contrast,
            r.delta_r_hat.hz(),
            r.from_contrast.hz(),
            r.from_delta_s.hz(),
            r.from_amp.hz(),
            r.total.hz(),
        ));
    }
    out
}
