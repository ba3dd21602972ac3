//! Physical parameters of the two-tone sensing problem and the
//! dynamical-decoupling frame transformation.
//!
//! A [`TwoToneSignal`] describes two incoherent tones coupling to the sensor
//! qubit. Under a π-pulse train with spacing τ (pulse frequency
//! ω_dd = π/τ), each lab-frame tone at ω maps to an effective tone at the
//! detuning δ = ω_dd − ω with its amplitude rescaled by
//! tan(π / (2(1 + δ/ω))) · (δ/ω), which tends to 2/π as δ/ω → 0. The exact
//! factor is always used; the 2/π shortcut exists only as a reported flag.

use crate::error::{Error, Result};
use crate::units::AngularFrequency;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

/// How the tone phases behave from one measurement to the next.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PhaseModel {
    /// Both phases drawn independently from U[0, 2π) on every shot
    /// (fully incoherent tones).
    IndependentUniform,
    /// Phases pinned to fixed values (radians); useful for oracles.
    Fixed { phi_1: f64, phi_2: f64 },
}

/// Two incoherent tones coupling to the sensor via σ_z.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TwoToneSignal {
    pub amplitude_1: AngularFrequency,
    pub amplitude_2: AngularFrequency,
    pub omega_1: AngularFrequency,
    pub omega_2: AngularFrequency,
    pub phase_model: PhaseModel,
}

impl TwoToneSignal {
    pub fn new(
        amplitude_1: AngularFrequency,
        amplitude_2: AngularFrequency,
        omega_1: AngularFrequency,
        omega_2: AngularFrequency,
        phase_model: PhaseModel,
    ) -> Result<Self> {
        if amplitude_1.rad_per_sec() < 0.0 || amplitude_2.rad_per_sec() < 0.0 {
            return Err(Error::domain("tone amplitudes must be >= 0"));
        }
        if omega_1.rad_per_sec() <= 0.0 || omega_2.rad_per_sec() <= 0.0 {
            return Err(Error::domain("tone frequencies must be > 0"));
        }
        for v in [amplitude_1, amplitude_2, omega_1, omega_2] {
            if !v.is_finite() {
                return Err(Error::domain("signal parameters must be finite"));
            }
        }
        Ok(TwoToneSignal {
            amplitude_1,
            amplitude_2,
            omega_1,
            omega_2,
            phase_model,
        })
    }

    /// Equal-amplitude convenience constructor.
    pub fn symmetric(
        amplitude: AngularFrequency,
        omega_1: AngularFrequency,
        omega_2: AngularFrequency,
        phase_model: PhaseModel,
    ) -> Result<Self> {
        Self::new(amplitude, amplitude, omega_1, omega_2, phase_model)
    }

    /// Mean tone frequency ω_s = (ω₁ + ω₂)/2.
    pub fn omega_s(&self) -> AngularFrequency {
        (self.omega_1 + self.omega_2) / 2.0
    }

    /// Half frequency separation δ_r = (ω₁ − ω₂)/2 (signed).
    pub fn delta_r(&self) -> AngularFrequency {
        (self.omega_1 - self.omega_2) / 2.0
    }
}

/// A periodic π-pulse train with uniform spacing.
///
/// Pulses are treated as instantaneous; the pulse frequency is ω_dd = π/τ
/// exactly and the total interrogation time is `pulse_count · τ`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DdSequence {
    /// Spacing τ between pulse centers, seconds.
    pub pulse_spacing: f64,
    pub pulse_count: u32,
}

impl DdSequence {
    pub fn new(pulse_spacing: f64, pulse_count: u32) -> Result<Self> {
        if !(pulse_spacing > 0.0) || !pulse_spacing.is_finite() {
            return Err(Error::domain("pulse spacing must be > 0"));
        }
        if pulse_count == 0 {
            return Err(Error::domain("pulse count must be >= 1"));
        }
        Ok(DdSequence {
            pulse_spacing,
            pulse_count,
        })
    }

    /// Build from the pulse angular frequency ω_dd (τ = π/ω_dd).
    pub fn from_omega_dd(omega_dd: AngularFrequency, pulse_count: u32) -> Result<Self> {
        if omega_dd.rad_per_sec() <= 0.0 {
            return Err(Error::domain("omega_dd must be > 0"));
        }
        Self::new(PI / omega_dd.rad_per_sec(), pulse_count)
    }

    /// ω_dd = π/τ.
    pub fn omega_dd(&self) -> AngularFrequency {
        AngularFrequency::from_rad_per_sec(PI / self.pulse_spacing)
    }

    /// Total interrogation time t = pulse_count · τ.
    pub fn total_time(&self) -> f64 {
        self.pulse_count as f64 * self.pulse_spacing
    }
}

/// The signal as seen in the pulse interaction frame: two effective tones at
/// detunings δ_i with rescaled amplitudes.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EffectiveSignal {
    pub amp_eff_1: AngularFrequency,
    pub amp_eff_2: AngularFrequency,
    pub delta_1: AngularFrequency,
    pub delta_2: AngularFrequency,
    /// Per tone: |δ/ω| < 1e-2 *and* the 2/π amplitude shortcut is within
    /// 0.1% of the exact factor. Reporting only; the exact factor is always
    /// what's applied.
    pub small_detuning: [bool; 2],
}

impl EffectiveSignal {
    /// Assemble directly from effective-frame quantities.
    pub fn from_parts(
        amp_eff_1: AngularFrequency,
        amp_eff_2: AngularFrequency,
        delta_1: AngularFrequency,
        delta_2: AngularFrequency,
    ) -> Self {
        EffectiveSignal {
            amp_eff_1,
            amp_eff_2,
            delta_1,
            delta_2,
            small_detuning: [false, false],
        }
    }

    /// Symmetric construction from (Ω̃, δ_s, δ_r): δ₁ = δ_s − δ_r,
    /// δ₂ = δ_s + δ_r, equal amplitudes.
    pub fn symmetric(
        amp_eff: AngularFrequency,
        delta_s: AngularFrequency,
        delta_r: AngularFrequency,
    ) -> Self {
        Self::from_parts(amp_eff, amp_eff, delta_s - delta_r, delta_s + delta_r)
    }

    /// Ramsey (no pulses): the effective tones are the lab tones themselves.
    pub fn ramsey(signal: &TwoToneSignal) -> Self {
        Self::from_parts(
            signal.amplitude_1,
            signal.amplitude_2,
            signal.omega_1,
            signal.omega_2,
        )
    }

    /// Mean detuning δ_s = (δ₁ + δ₂)/2 (signed).
    pub fn delta_s(&self) -> AngularFrequency {
        (self.delta_1 + self.delta_2) / 2.0
    }

    /// Half separation δ_r = (δ₂ − δ₁)/2 (signed).
    pub fn delta_r(&self) -> AngularFrequency {
        (self.delta_2 - self.delta_1) / 2.0
    }

    /// True when both effective amplitudes coincide to 1 ppm.
    pub fn equal_amplitudes(&self) -> bool {
        let a = self.amp_eff_1.rad_per_sec();
        let b = self.amp_eff_2.rad_per_sec();
        (a - b).abs() <= 1e-6 * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }
}

/// Exact pulse-train amplitude scaling tan(π/(2(1+x)))·x at x = δ/ω.
///
/// Removable limit 2/π at x = 0; handled by series below |x| = 1e-12 where
/// the floating-point tangent argument saturates.
pub fn dd_amplitude_factor(detuning_over_omega: f64) -> f64 {
    let x = detuning_over_omega;
    if x.abs() < 1e-12 {
        return (2.0 / PI) * (1.0 + x);
    }
    (FRAC_PI_2 / (1.0 + x)).tan() * x
}

/// Map both lab tones into the pulse frame: δ_i = ω_dd − ω_i and
/// Ω̃_i = tan(π/(2(1+δ_i/ω_i)))·(δ_i/ω_i)·Ω_i.
///
/// Rejects |δ_i| >= ω_i: δ = −ω means ω_dd = 0 (no pulses at all) and
/// δ = +ω puts the pulse spacing on resonance with twice the signal period,
/// where the frame derivation breaks down.
pub fn effective_transform(signal: &TwoToneSignal, dd: &DdSequence) -> Result<EffectiveSignal> {
    let omega_dd = dd.omega_dd().rad_per_sec();
    let mut amps = [0.0_f64; 2];
    let mut deltas = [0.0_f64; 2];
    let mut flags = [false; 2];
    for (i, (omega, amp)) in [
        (signal.omega_1, signal.amplitude_1),
        (signal.omega_2, signal.amplitude_2),
    ]
    .iter()
    .enumerate()
    {
        let w = omega.rad_per_sec();
        let delta = omega_dd - w;
        if delta.abs() >= w {
            return Err(Error::Domain(format!(
                "detuning |{:.6e}| rad/s >= tone frequency {:.6e} rad/s; \
                 pulse train is not near-resonant with tone {}",
                delta,
                w,
                i + 1
            )));
        }
        let x = delta / w;
        let factor = dd_amplitude_factor(x);
        let two_over_pi = 2.0 / PI;
        flags[i] = x.abs() < 1e-2 && ((factor - two_over_pi) / two_over_pi).abs() < 1e-3;
        amps[i] = factor * amp.rad_per_sec();
        deltas[i] = delta;
    }
    Ok(EffectiveSignal {
        amp_eff_1: AngularFrequency::from_rad_per_sec(amps[0]),
        amp_eff_2: AngularFrequency::from_rad_per_sec(amps[1]),
        delta_1: AngularFrequency::from_rad_per_sec(deltas[0]),
        delta_2: AngularFrequency::from_rad_per_sec(deltas[1]),
        small_detuning: flags,
    })
}

/// Interrogation times satisfying the superresolution condition,
/// t = 2nπ/|δ_s| for n = 1..=n_max. For a Ramsey sequence pass ω_s as the
/// mean detuning.
pub fn superresolution_times(delta_s: AngularFrequency, n_max: u32) -> Result<Vec<f64>> {
    let d = delta_s.rad_per_sec().abs();
    if d == 0.0 {
        return Err(Error::domain(
            "superresolution time diverges: mean detuning is zero",
        ));
    }
    if n_max == 0 {
        return Err(Error::domain("n_max must be >= 1"));
    }
    Ok((1..=n_max)
        .map(|n| 2.0 * PI * n as f64 / d)
        .collect())
}

/// Full protocol: signal, optional pulse train (absent = plain Ramsey),
/// interrogation time, decoherence rate, and repetition count.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub signal: TwoToneSignal,
    pub dd: Option<DdSequence>,
    /// Total interrogation time, seconds. Equals pulse_count·τ when a pulse
    /// train is present.
    pub total_time: f64,
    /// Decoherence rate Γ = 1/T₂, 1/s (0 = no decoherence).
    pub decay_rate: f64,
    /// Total independent repetitions n_exp entering the Cramér–Rao bound.
    pub n_exp: u64,
}

impl ProtocolConfig {
    pub fn new(
        signal: TwoToneSignal,
        dd: Option<DdSequence>,
        total_time: f64,
        decay_rate: f64,
        n_exp: u64,
    ) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::domain("total time must be > 0"));
        }
        if decay_rate < 0.0 || !decay_rate.is_finite() {
            return Err(Error::domain("decay rate must be >= 0"));
        }
        if n_exp == 0 {
            return Err(Error::domain("n_exp must be >= 1"));
        }
        if let Some(seq) = &dd {
            let t_seq = seq.total_time();
            if ((t_seq - total_time) / total_time).abs() > 1e-9 {
                return Err(Error::Domain(format!(
                    "total time {total_time:e} s does not equal pulse_count*tau = {t_seq:e} s"
                )));
            }
        }
        Ok(ProtocolConfig {
            signal,
            dd,
            total_time,
            decay_rate,
            n_exp,
        })
    }

    /// Effective-frame view: the DD transform when pulses are present, the
    /// lab tones themselves for plain Ramsey.
    pub fn effective_signal(&self) -> Result<EffectiveSignal> {
        match &self.dd {
            Some(seq) => effective_transform(&self.signal, seq),
            None => Ok(EffectiveSignal::ramsey(&self.signal)),
        }
    }
}

/// Documentation constants attached to reports. Never consumed by the
/// computation paths except as a Γ = 1/T₂ default.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ExperimentConstants {
    /// Zero-field splitting, rad/s.
    pub d_gs: AngularFrequency,
    /// Sensor-spin gyromagnetic ratio, rad/s per gauss.
    pub gamma_sensor: AngularFrequency,
    /// Parallel hyperfine coupling, rad/s.
    pub a_parallel: AngularFrequency,
    /// Memory-spin gyromagnetic ratio, rad/s per gauss.
    pub gamma_memory: AngularFrequency,
    /// Bias field, gauss.
    pub b_field_gauss: f64,
    /// Sensor coherence time under the pulse train, seconds.
    pub t2: f64,
    /// Memory-spin Ramsey dephasing time, seconds.
    pub t2_star_memory: f64,
    /// Memory-spin lifetime during readout, seconds.
    pub memory_lifetime: f64,
}

impl Default for ExperimentConstants {
    fn default() -> Self {
        ExperimentConstants {
            d_gs: AngularFrequency::from_mhz(2870.0),
            gamma_sensor: AngularFrequency::from_mhz(2.802),
            a_parallel: AngularFrequency::from_mhz(3.03),
            gamma_memory: AngularFrequency::from_khz(-0.432),
            b_field_gauss: 5980.0,
            t2: 1.3e-3,
            t2_star_memory: 1.4e-3,
            memory_lifetime: 60e-3,
        }
    }
}

impl ExperimentConstants {
    /// Default decoherence rate Γ = 1/T₂.
    pub fn default_decay_rate(&self) -> f64 {
        1.0 / self.t2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_signal() -> TwoToneSignal {
        TwoToneSignal::symmetric(
            AngularFrequency::from_khz(16.85),
            AngularFrequency::from_mhz(2.512),
            AngularFrequency::from_mhz(2.513),
            PhaseModel::IndependentUniform,
        )
        .unwrap()
    }

    #[test]
    fn omega_accessors_are_exact() {
        let s = reference_signal();
        let omega_s = s.omega_s();
        let delta_r = s.delta_r();
        assert_eq!((omega_s + delta_r).rad_per_sec(), s.omega_1.rad_per_sec());
        assert_eq!((omega_s - delta_r).rad_per_sec(), s.omega_2.rad_per_sec());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn amplitude_factor_limit_is_two_over_pi() {
        assert!((dd_amplitude_factor(0.0) - 2.0 / PI).abs() < 1e-15);
        // The conventionally quoted five-digit value of the limit.
        assert!((dd_amplitude_factor(0.0) - 0.63662).abs() < 5e-6);
    }

    #[test]
    fn amplitude_factor_linear_departure() {
        // factor/(2/π) − 1 ≈ x for small x; check the ~1% per 1e-2 law.
        let two_over_pi = 2.0 / PI;
        for &x in &[1e-4, 1e-3, 5e-3, 1e-2] {
            let rel = (dd_amplitude_factor(x) - two_over_pi) / two_over_pi;
            assert!(
                (rel - x).abs() < 0.1 * x,
                "departure not linear at x={x}: rel={rel}"
            );
            let rel_neg = (dd_amplitude_factor(-x) - two_over_pi) / two_over_pi;
            assert!((rel_neg + x).abs() < 0.1 * x);
        }
    }

    #[test]
    fn small_detuning_flag_requires_both_conditions() {
        // At |x| = 5e-3 the shortcut is ~0.5% off -> flag must be false.
        let sig = TwoToneSignal::symmetric(
            AngularFrequency::from_khz(10.0),
            AngularFrequency::from_mhz(1.0),
            AngularFrequency::from_mhz(1.005),
            PhaseModel::IndependentUniform,
        )
        .unwrap();
        let dd = DdSequence::from_omega_dd(AngularFrequency::from_mhz(1.0), 100).unwrap();
        let eff = effective_transform(&sig, &dd).unwrap();
        assert!(eff.small_detuning[0]); // on-resonance tone, x = 0
        assert!(!eff.small_detuning[1]); // x = -5e-3: shortcut off by ~0.5%

        // At |x| ~ 5e-4 both conditions hold.
        let sig2 = TwoToneSignal::symmetric(
            AngularFrequency::from_khz(10.0),
            AngularFrequency::from_hz(1_000_500.0),
            AngularFrequency::from_hz(999_500.0),
            PhaseModel::IndependentUniform,
        )
        .unwrap();
        let eff2 = effective_transform(&sig2, &dd).unwrap();
        assert!(eff2.small_detuning[0] && eff2.small_detuning[1]);
    }

    #[test]
    fn reference_calibration_amplitude() {
        // Ω = (2π)·16.85 kHz·(π/2) driven at ω = (2π)·2.5125 MHz with
        // ω_dd = (2π)·2.5 MHz should give Ω̃ ≈ (2π)·16.85 kHz within 0.5%.
        let target = AngularFrequency::from_khz(16.85);
        let sig = TwoToneSignal::symmetric(
            target * FRAC_PI_2,
            AngularFrequency::from_mhz(2.5125),
            AngularFrequency::from_mhz(2.5125),
            PhaseModel::IndependentUniform,
        )
        .unwrap();
        let dd = DdSequence::from_omega_dd(AngularFrequency::from_mhz(2.5), 8).unwrap();
        let eff = effective_transform(&sig, &dd).unwrap();
        let rel = (eff.amp_eff_1.rad_per_sec() - target.rad_per_sec()) / target.rad_per_sec();
        assert!(rel.abs() < 5e-3, "relative error {rel}");
    }

    #[test]
    fn transform_rejects_off_resonant_pulses() {
        let sig = reference_signal();
        // ω_dd = 2ω: δ = ω for tone 1 -> reject.
        let dd = DdSequence::from_omega_dd(AngularFrequency::from_mhz(5.024), 8).unwrap();
        assert!(effective_transform(&sig, &dd).is_err());
        // ω_dd far below: δ = -0.9996ω is fine, δ beyond -ω is impossible
        // since ω_dd > 0; a tiny ω_dd still violates near-resonance via
        // |δ| >= ω only at δ = -ω exactly, so check a value close to it.
        let dd_tiny = DdSequence::new(PI / 1.0, 1).unwrap(); // ω_dd = 1 rad/s
        assert!(effective_transform(&sig, &dd_tiny).is_ok());
    }

    #[test]
    fn detuning_antisymmetry() {
        let sig = reference_signal();
        let dd = DdSequence::from_omega_dd(AngularFrequency::from_mhz(2.5), 16).unwrap();
        let eff = effective_transform(&sig, &dd).unwrap();
        let w_dd = dd.omega_dd().rad_per_sec();
        for (delta, omega) in [(eff.delta_1, sig.omega_1), (eff.delta_2, sig.omega_2)] {
            assert_eq!(
                delta.rad_per_sec(),
                -(omega.rad_per_sec() - w_dd),
                "delta must be ω_dd − ω exactly"
            );
        }
        // δ_s/δ_r identities hold to machine precision by construction.
        let ds = eff.delta_s().rad_per_sec();
        let dr = eff.delta_r().rad_per_sec();
        assert_eq!(ds - dr, eff.delta_1.rad_per_sec());
        assert_eq!(ds + dr, eff.delta_2.rad_per_sec());
    }

    #[test]
    fn superresolution_times_match_quoted_values() {
        // δ_s = (2π)·50 kHz -> 20 µs, 40 µs.
        let ts = superresolution_times(AngularFrequency::from_khz(50.0), 2).unwrap();
        assert!((ts[0] - 20e-6).abs() < 1e-18);
        assert!((ts[1] - 40e-6).abs() < 1e-18);
        // δ_s = (2π)·12.5 kHz -> 80 µs.
        let ts = superresolution_times(AngularFrequency::from_khz(12.5), 1).unwrap();
        assert!((ts[0] - 80e-6).abs() < 1e-18);
        // δ_s = 2π rad/s -> 1 s.
        let ts = superresolution_times(AngularFrequency::from_hz(1.0), 1).unwrap();
        assert!((ts[0] - 1.0).abs() < 1e-12);
        assert!(superresolution_times(AngularFrequency::ZERO, 1).is_err());
    }

    #[test]
    fn protocol_checks_time_consistency() {
        let sig = reference_signal();
        let dd = DdSequence::new(200e-9, 400).unwrap(); // t = 80 µs
        assert!(ProtocolConfig::new(sig, Some(dd), 80e-6, 0.0, 1).is_ok());
        assert!(ProtocolConfig::new(sig, Some(dd), 81e-6, 0.0, 1).is_err());
        assert!(ProtocolConfig::new(sig, None, 0.0, 0.0, 1).is_err());
        assert!(ProtocolConfig::new(sig, None, 1e-6, -1.0, 1).is_err());
    }
}
