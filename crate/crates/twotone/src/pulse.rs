//! Mapping-pulse fidelity under Gaussian detuning and amplitude noise.
//!
//! The state-transfer pulse that writes the sensor result onto the memory
//! spin is a two-level π rotation. With a static detuning δ and fractional
//! amplitude error a during the pulse, its fidelity has the closed form
//!
//! ```text
//! F(Ω, δ, a) = Ω²(1+a)²/Ω_eff² · sin²( (Ω_eff/Ω)·π/2 ),
//! Ω_eff = sqrt(Ω²(1+a)² + δ²),
//! ```
//!
//! and the noise-averaged fidelity is the double Gaussian integral of F over
//! δ ~ N(0, σ_δ²) and a ~ N(0, σ_a²), evaluated here by tensor-product
//! Gauss–Hermite quadrature with a Monte Carlo cross-check.

use crate::error::{Error, Result};
use crate::numerics::quadrature::gauss_hermite;
use crate::numerics::rng::Stream;
use crate::numerics::stats::mean_and_std_error;
use crate::oracle::McEstimate;
use crate::units::AngularFrequency;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

/// A nominal π pulse with Gaussian detuning and amplitude noise.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct RfPulseModel {
    /// Rabi frequency Ω, rad/s.
    pub rabi: AngularFrequency,
    /// Pulse duration, seconds; Ω·t_π = π to 1e-9 relative.
    pub duration: f64,
    /// Detuning noise std, rad/s.
    pub detuning_std: AngularFrequency,
    /// Fractional amplitude noise std.
    pub amplitude_std: f64,
}

impl RfPulseModel {
    pub fn new(
        rabi: AngularFrequency,
        duration: f64,
        detuning_std: AngularFrequency,
        amplitude_std: f64,
    ) -> Result<Self> {
        let area = rabi.rad_per_sec() * duration;
        if ((area - PI) / PI).abs() > 1e-9 {
            return Err(Error::Domain(format!(
                "pulse area {area:.12} is not a pi pulse (|area - pi|/pi > 1e-9)"
            )));
        }
        if detuning_std.rad_per_sec() < 0.0 || amplitude_std < 0.0 {
            return Err(Error::domain("noise widths must be >= 0"));
        }
        Ok(RfPulseModel {
            rabi,
            duration,
            detuning_std,
            amplitude_std,
        })
    }

    /// A π pulse of the given duration (Rabi frequency derived as π/t).
    pub fn pi_pulse(
        duration: f64,
        detuning_std: AngularFrequency,
        amplitude_std: f64,
    ) -> Result<Self> {
        Self::new(
            AngularFrequency::from_rad_per_sec(PI / duration),
            duration,
            detuning_std,
            amplitude_std,
        )
    }

    /// Operating point of the mapping pulse: t_π = 37 µs, σ_δ derived from a
    /// 1.4 ms dephasing time, σ_a = 0.005.
    pub fn reference() -> Self {
        Self::pi_pulse(37e-6, dephasing_detuning_std(1.4e-3), 0.005).unwrap()
    }
}

/// Detuning noise width implied by a Ramsey dephasing time:
/// σ_δ = sqrt(2)/T₂*, in rad/s (≈ (2π)·160.8 Hz for T₂* = 1.4 ms).
pub fn dephasing_detuning_std(t2_star: f64) -> AngularFrequency {
    AngularFrequency::from_rad_per_sec(SQRT_2 / t2_star)
}

/// Closed-form fidelity of the π pulse at a fixed detuning and amplitude
/// error. The a = −1 point (no drive) is the zero-fidelity limit.
pub fn pulse_fidelity(rabi: AngularFrequency, detuning: f64, amp_error: f64) -> f64 {
    let omega = rabi.rad_per_sec();
    debug_assert!(omega > 0.0);
    let drive = omega * (1.0 + amp_error);
    let omega_eff = (drive * drive + detuning * detuning).sqrt();
    if omega_eff == 0.0 {
        return 0.0;
    }
    let prefactor = (drive / omega_eff).powi(2);
    let s = ((omega_eff / omega) * FRAC_PI_2).sin();
    (prefactor * s * s).clamp(0.0, 1.0)
}

/// Noise-averaged fidelity report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FidelityReport {
    /// Fidelity at the nominal point (zero noise) — 1 for an exact π pulse.
    pub point_fidelity: f64,
    /// Gaussian-averaged fidelity.
    pub average_fidelity: f64,
    /// Fidelity at simultaneous 3σ detuning and amplitude errors.
    pub worst_case_3sigma: f64,
    /// |F(n) − F(2n)| from node doubling.
    pub quadrature_error_estimate: f64,
}

/// Gaussian-averaged fidelity by tensor-product Gauss–Hermite quadrature.
///
/// `nodes_per_axis` (>= 40) sets the base rule; the error estimate comes
/// from doubling it. Axes with zero σ collapse analytically. With
/// σ_a = 0.005 the a < −1 region sits beyond 190σ and carries no
/// representable probability mass.
pub fn average_fidelity(m: &RfPulseModel, nodes_per_axis: usize) -> Result<FidelityReport> {
    if nodes_per_axis < 40 {
        return Err(Error::domain("need at least 40 quadrature nodes per axis"));
    }
    let avg = |n: usize| gauss_average(m, n);
    let base = avg(nodes_per_axis);
    let doubled = avg(2 * nodes_per_axis);
    Ok(FidelityReport {
        point_fidelity: pulse_fidelity(m.rabi, 0.0, 0.0),
        average_fidelity: doubled,
        worst_case_3sigma: pulse_fidelity(
            m.rabi,
            3.0 * m.detuning_std.rad_per_sec(),
            3.0 * m.amplitude_std,
        ),
        quadrature_error_estimate: (doubled - base).abs(),
    })
}

fn gauss_average(m: &RfPulseModel, n: usize) -> f64 {
    let sd = m.detuning_std.rad_per_sec();
    let sa = m.amplitude_std;
    let sqrt_pi = PI.sqrt();
    match (sd > 0.0, sa > 0.0) {
        (false, false) => pulse_fidelity(m.rabi, 0.0, 0.0),
        (true, false) => {
            let (x, w) = gauss_hermite(n);
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| wi * pulse_fidelity(m.rabi, SQRT_2 * sd * xi, 0.0))
                .sum::<f64>()
                / sqrt_pi
        }
        (false, true) => {
            let (x, w) = gauss_hermite(n);
            x.iter()
                .zip(&w)
                .map(|(xi, wi)| wi * pulse_fidelity(m.rabi, 0.0, SQRT_2 * sa * xi))
                .sum::<f64>()
                / sqrt_pi
        }
        (true, true) => {
            let (x, w) = gauss_hermite(n);
            let mut sum = 0.0;
            for (xi, wi) in x.iter().zip(&w) {
                let delta = SQRT_2 * sd * xi;
                let mut inner = 0.0;
                for (xj, wj) in x.iter().zip(&w) {
                    inner += wj * pulse_fidelity(m.rabi, delta, SQRT_2 * sa * xj);
                }
                sum += wi * inner;
            }
            sum / (sqrt_pi * sqrt_pi)
        }
    }
}

/// Monte Carlo cross-check of [`average_fidelity`] with Gaussian draws.
pub fn mc_average_fidelity(m: &RfPulseModel, n_samples: u64, seed: u64) -> McEstimate {
    let mut stream = Stream::new(seed, 0);
    let values: Vec<f64> = (0..n_samples)
        .map(|_| {
            let delta = m.detuning_std.rad_per_sec() * stream.normal();
            let a = m.amplitude_std * stream.normal();
            pulse_fidelity(m.rabi, delta, a)
        })
        .collect();
    let (mean, std_error) = mean_and_std_error(&values);
    McEstimate {
        mean,
        std_error,
        n_samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_pulse_is_unit_fidelity() {
        let m = RfPulseModel::reference();
        assert!((pulse_fidelity(m.rabi, 0.0, 0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn model_enforces_pi_area() {
        let rabi = AngularFrequency::from_rad_per_sec(PI / 37e-6);
        assert!(RfPulseModel::new(rabi, 37e-6, AngularFrequency::ZERO, 0.0).is_ok());
        assert!(RfPulseModel::new(rabi, 37.1e-6, AngularFrequency::ZERO, 0.0).is_err());
    }

    #[test]
    fn detuning_std_from_dephasing_time() {
        // sqrt(2)/1.4 ms = 1010.2 rad/s ≈ (2π)·160.8 Hz.
        let sd = dephasing_detuning_std(1.4e-3);
        assert!((sd.rad_per_sec() - 1010.15).abs() < 0.5);
        assert!((sd.hz() - 160.77).abs() < 0.1);
    }

    #[test]
    fn fidelity_even_and_bounded_and_monotone() {
        let m = RfPulseModel::reference();
        let mut prev = 1.0;
        for i in 0..=100 {
            let delta = m.rabi.rad_per_sec() * i as f64 / 100.0;
            let f = pulse_fidelity(m.rabi, delta, 0.0);
            assert!(f <= 1.0 + 1e-15);
            assert!((f - pulse_fidelity(m.rabi, -delta, 0.0)).abs() < 1e-15);
            assert!(f <= prev + 1e-12, "not monotone at delta/omega = {}", i as f64 / 100.0);
            prev = f;
        }
    }

    #[test]
    fn no_drive_transfers_nothing() {
        let m = RfPulseModel::reference();
        assert_eq!(pulse_fidelity(m.rabi, 500.0, -1.0), 0.0);
        assert_eq!(pulse_fidelity(m.rabi, 0.0, -1.0), 0.0);
    }

    #[test]
    fn reference_point_fidelity_at_three_sigma() {
        // F(3σ_δ, 3σ_a) ≈ 0.9982 at the reference operating point.
        let m = RfPulseModel::reference();
        let f = pulse_fidelity(
            m.rabi,
            3.0 * m.detuning_std.rad_per_sec(),
            3.0 * m.amplitude_std,
        );
        assert!((f - 0.9982).abs() < 5e-4, "F(3σ) = {f}");
    }

    #[test]
    fn reference_average_fidelity() {
        let m = RfPulseModel::reference();
        let rep = average_fidelity(&m, 40).unwrap();
        assert!(
            (rep.average_fidelity - 0.9998).abs() < 1e-4,
            "F_ave = {}",
            rep.average_fidelity
        );
        assert!(rep.quadrature_error_estimate < 1e-8);
        assert_eq!(rep.point_fidelity, 1.0);
        assert!(rep.worst_case_3sigma <= rep.average_fidelity + rep.quadrature_error_estimate);
    }

    #[test]
    fn zero_noise_average_is_exactly_one() {
        let m = RfPulseModel::pi_pulse(37e-6, AngularFrequency::ZERO, 0.0).unwrap();
        let rep = average_fidelity(&m, 40).unwrap();
        assert_eq!(rep.average_fidelity, 1.0);
        let mc = mc_average_fidelity(&m, 1000, 1);
        assert_eq!(mc.mean, 1.0);
        assert_eq!(mc.std_error, 0.0);
    }

    #[test]
    fn quadrature_agrees_with_monte_carlo() {
        let m = RfPulseModel::reference();
        let rep = average_fidelity(&m, 40).unwrap();
        let mc = mc_average_fidelity(&m, 1_000_000, 2024);
        assert!(
            (mc.mean - rep.average_fidelity).abs() <= 3.0 * mc.std_error,
            "MC {} ± {} vs quadrature {}",
            mc.mean,
            mc.std_error,
            rep.average_fidelity
        );
    }

    #[test]
    fn mc_standard_error_shrinks_with_sqrt_n() {
        let m = RfPulseModel::reference();
        let a = mc_average_fidelity(&m, 200_000, 5);
        let b = mc_average_fidelity(&m, 400_000, 5);
        let ratio = a.std_error / b.std_error;
        assert!(
            (ratio - SQRT_2).abs() < 0.05 * SQRT_2,
            "SE ratio {ratio} vs sqrt(2)"
        );
    }
}
