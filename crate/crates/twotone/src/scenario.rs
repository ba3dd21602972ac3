//! JSON scenario runner: loads experiment configs and run manifests, executes
//! named scenarios, and emits deterministic CSV/JSON artifacts with content
//! hashes.
//!
//! External formats (all frequencies in Hz, times in seconds):
//!
//! * Experiment config — top-level keys `schema_version` (must be 1),
//!   `signal`, `dd` (optional), `protocol`, `constants` (optional).
//! * Run manifest — `schema_version`, `global_seed`, `scenarios`: a list of
//!   tagged scenario objects (`"kind": "prob_vs_time"` etc.).
//!
//! Re-running a manifest with the same seed reproduces byte-identical CSV
//! outputs; the run summary lists every artifact with its SHA-256.

use crate::error::{Error, Result};
use crate::estimate::{
    estimate_delta_r, fisher_information, propagate_uncertainty,
    resolution_limit, table_csv, EstimationMethod, NoiseModel, TableRow, UncertaintyInputs,
};
use crate::oracle::{mc_transition_probability, McConfig};
use crate::prob::{
    calibration_probability, fit_calibration, transition_probability,
    transition_probability_decohered,
};
use crate::pulse::{average_fidelity, mc_average_fidelity, RfPulseModel};
use crate::readout::{
    digitize, dwell_times, fit_double_gaussian, fit_dwell_exponential, histogram_csv,
    noise_budget, simulate_ssr_trace, snr_ssr, snr_standard, trace_csv, Histogram, Lifetimes,
    SsrModel, StdReadoutModel,
};
use crate::signal::{
    superresolution_times, DdSequence, EffectiveSignal, ExperimentConstants, PhaseModel,
    ProtocolConfig, TwoToneSignal,
};
use crate::units::AngularFrequency;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// Experiment config (Hz/seconds on the wire)
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub signal: SignalConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dd: Option<DdConfig>,
    pub protocol: ProtocolSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsConfig>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SignalConfig {
    pub amplitude_1_hz: f64,
    pub amplitude_2_hz: f64,
    pub omega_1_hz: f64,
    pub omega_2_hz: f64,
    #[serde(default)]
    pub phase_model: PhaseModelConfig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, Default)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum PhaseModelConfig {
    #[default]
    IndependentUniform,
    Fixed {
        phi_1: f64,
        phi_2: f64,
    },
}

impl From<PhaseModelConfig> for PhaseModel {
    fn from(c: PhaseModelConfig) -> Self {
        match c {
            PhaseModelConfig::IndependentUniform => PhaseModel::IndependentUniform,
            PhaseModelConfig::Fixed { phi_1, phi_2 } => PhaseModel::Fixed { phi_1, phi_2 },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DdConfig {
    pub pulse_spacing_s: f64,
    pub pulse_count: u32,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProtocolSection {
    pub total_time_s: f64,
    #[serde(default)]
    pub decay_rate_per_s: f64,
    #[serde(default = "one")]
    pub n_exp: u64,
}

fn one() -> u64 {
    1
}

/// Documentation constants on the wire (Hz and seconds).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ConstantsConfig {
    pub d_gs_hz: f64,
    pub gamma_sensor_hz_per_gauss: f64,
    pub a_parallel_hz: f64,
    pub gamma_memory_hz_per_gauss: f64,
    pub b_field_gauss: f64,
    pub t2_s: f64,
    pub t2_star_memory_s: f64,
    pub memory_lifetime_s: f64,
}

impl ConstantsConfig {
    pub fn to_constants(self) -> ExperimentConstants {
        ExperimentConstants {
            d_gs: AngularFrequency::from_hz(self.d_gs_hz),
            gamma_sensor: AngularFrequency::from_hz(self.gamma_sensor_hz_per_gauss),
            a_parallel: AngularFrequency::from_hz(self.a_parallel_hz),
            gamma_memory: AngularFrequency::from_hz(self.gamma_memory_hz_per_gauss),
            b_field_gauss: self.b_field_gauss,
            t2: self.t2_s,
            t2_star_memory: self.t2_star_memory_s,
            memory_lifetime: self.memory_lifetime_s,
        }
    }
}

/// Validation diagnostics, ordered hard errors first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

/// Structural and physical validation of an experiment config.
///
/// Hard errors: wrong schema version, non-positive frequencies or times,
/// pulse-train/total-time mismatch, pulse spacing not near-resonant.
/// Warnings: interrogation time off the superresolution grid by more than
/// 1e-3 rad of δ_s·t. Info: pulse count not a multiple of 8 (the usual
/// phase-cycled trains come in blocks of eight).
pub fn validate(config: &ExperimentConfig) -> Vec<Diagnostic> {
    fn err(out: &mut Vec<Diagnostic>, m: String) {
        out.push(Diagnostic {
            severity: Severity::Error,
            message: m,
        })
    }
    let mut out = Vec::new();
    if config.schema_version != SCHEMA_VERSION {
        err(&mut out, format!(
            "schema_version {} unsupported (expected {SCHEMA_VERSION})",
            config.schema_version
        ));
    }
    let s = &config.signal;
    for (name, v) in [("omega_1_hz", s.omega_1_hz), ("omega_2_hz", s.omega_2_hz)] {
        if !(v > 0.0) {
            err(&mut out, format!("{name} must be > 0, got {v}"));
        }
    }
    for (name, v) in [
        ("amplitude_1_hz", s.amplitude_1_hz),
        ("amplitude_2_hz", s.amplitude_2_hz),
    ] {
        if v < 0.0 {
            err(&mut out, format!("{name} must be >= 0, got {v}"));
        }
    }
    if !(config.protocol.total_time_s > 0.0) {
        err(&mut out, format!(
            "total_time_s must be > 0, got {}",
            config.protocol.total_time_s
        ));
    }
    if config.protocol.decay_rate_per_s < 0.0 {
        err(&mut out, "decay_rate_per_s must be >= 0".into());
    }
    if let Some(dd) = &config.dd {
        if !(dd.pulse_spacing_s > 0.0) || dd.pulse_count == 0 {
            err(&mut out, "pulse train needs positive spacing and count".into());
        } else {
            let t_seq = dd.pulse_spacing_s * dd.pulse_count as f64;
            let t = config.protocol.total_time_s;
            if ((t_seq - t) / t).abs() > 1e-9 {
                err(&mut out, format!(
                    "total_time_s {t} != pulse_count*spacing {t_seq}"
                ));
            }
            if dd.pulse_count % 8 != 0 {
                out.push(Diagnostic {
                    severity: Severity::Info,
                    message: format!(
                        "pulse_count {} is not a multiple of 8; phase-cycled trains \
                         usually come in blocks of eight",
                        dd.pulse_count
                    ),
                });
            }
            let omega_dd = 0.5 / dd.pulse_spacing_s; // Hz
            for (i, w) in [s.omega_1_hz, s.omega_2_hz].iter().enumerate() {
                if (omega_dd - w).abs() >= *w {
                    err(&mut out, format!(
                        "pulse train (rate {omega_dd} Hz) is not near-resonant with tone {} \
                         at {w} Hz",
                        i + 1
                    ));
                }
            }
            if out.iter().all(|d| d.severity != Severity::Error) {
                // Superresolution grid check on δ_s·t.
                let ds = std::f64::consts::TAU * (omega_dd - 0.5 * (s.omega_1_hz + s.omega_2_hz));
                let x = (ds * t).abs();
                let n = (x / (2.0 * PI)).round().max(1.0);
                if (x - 2.0 * PI * n).abs() > 1e-3 {
                    out.push(Diagnostic {
                        severity: Severity::Warning,
                        message: format!(
                            "off superresolution: delta_s*t = {:.4}*pi (nearest 2n*pi at n = {})",
                            x / PI,
                            n
                        ),
                    });
                }
            }
        }
    }
    out
}

/// Build the validated in-memory protocol from a config.
pub fn to_protocol(config: &ExperimentConfig) -> Result<ProtocolConfig> {
    let errors: Vec<String> = validate(config)
        .into_iter()
        .filter(|d| d.severity == Severity::Error)
        .map(|d| d.message)
        .collect();
    if !errors.is_empty() {
        return Err(Error::Config(errors.join("; ")));
    }
    let s = &config.signal;
    let signal = TwoToneSignal::new(
        AngularFrequency::from_hz(s.amplitude_1_hz),
        AngularFrequency::from_hz(s.amplitude_2_hz),
        AngularFrequency::from_hz(s.omega_1_hz),
        AngularFrequency::from_hz(s.omega_2_hz),
        s.phase_model.into(),
    )?;
    let dd = config
        .dd
        .as_ref()
        .map(|d| DdSequence::new(d.pulse_spacing_s, d.pulse_count))
        .transpose()?;
    ProtocolConfig::new(
        signal,
        dd,
        config.protocol.total_time_s,
        config.protocol.decay_rate_per_s,
        config.protocol.n_exp,
    )
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    #[serde(default)]
    pub global_seed: u64,
    pub scenarios: Vec<Scenario>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    #[serde(flatten)]
    pub kind: ScenarioKind,
}

/// Uniform sweep specification.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub points: u32,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points.max(2);
        (0..n)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NoiseConfig {
    QpnOnly,
    EpsilonFloor { epsilon: f64 },
    Decoherence { gamma_per_s: f64 },
    ReadoutVariance { variance: f64 },
}

impl From<NoiseConfig> for NoiseModel {
    fn from(c: NoiseConfig) -> Self {
        match c {
            NoiseConfig::QpnOnly => NoiseModel::QpnOnly,
            NoiseConfig::EpsilonFloor { epsilon } => NoiseModel::EpsilonFloor(epsilon),
            NoiseConfig::Decoherence { gamma_per_s } => NoiseModel::Decoherence(gamma_per_s),
            NoiseConfig::ReadoutVariance { variance } => NoiseModel::ReadoutVariance(variance),
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SsrModelConfig {
    pub mu_bright: f64,
    pub mu_dark: f64,
    pub readouts: u32,
    pub f0: f64,
    pub f_pi: f64,
    pub fidelity: f64,
    pub repetitions: u32,
}

impl SsrModelConfig {
    fn to_model(self) -> Result<SsrModel> {
        SsrModel::new(
            self.mu_bright,
            self.mu_dark,
            self.readouts,
            self.f0,
            self.f_pi,
            self.fidelity,
            self.repetitions,
        )
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorRowInput {
    pub actual_dr_hz: f64,
    pub mean_c: f64,
    pub d_c: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_est_dr_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect_d_dr_hz: Option<[f64; 4]>, // dC, dds, dOmega, total
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScenarioKind {
    /// Transition probability / contrast vs interrogation time for a full
    /// experiment config (decohered when the protocol carries a decay rate).
    ProbVsTime {
        config: ExperimentConfig,
        times_s: Sweep,
    },
    /// Fisher information and Cramér–Rao std vs time in the effective frame.
    FiVsTime {
        amp_eff_hz: f64,
        delta_s_hz: f64,
        delta_r_hz: f64,
        times_s: Sweep,
        noise: NoiseConfig,
        n_exp: u64,
    },
    /// Contrast vs separation at a fixed time. With `include_expansion`
    /// the CSV carries the quadratic small-separation model a + b·δ_r²
    /// alongside the exact probability.
    ContrastVsDeltaR {
        amp_eff_hz: f64,
        delta_s_hz: f64,
        time_s: f64,
        delta_r_hz: Sweep,
        #[serde(default)]
        gamma_per_s: f64,
        #[serde(default)]
        include_expansion: bool,
    },
    /// Cramér–Rao standard deviation vs separation for a noise model.
    CrbVsDeltaR {
        amp_eff_hz: f64,
        delta_s_hz: f64,
        time_s: f64,
        delta_r_hz: Sweep,
        noise: NoiseConfig,
        n_exp: u64,
    },
    /// Expansion coefficients a_t, b_t vs interrogation time.
    ExpansionVsTime {
        amp_eff_hz: f64,
        delta_s_hz: f64,
        times_s: Sweep,
    },
    /// Estimator table: measured (C, ΔC) rows -> estimates + propagated
    /// uncertainty, with optional expected values asserted.
    EstimatorTable {
        amp_eff_hz: f64,
        delta_s_hz: f64,
        time_s: f64,
        d_delta_s_hz: f64,
        d_amp_eff_hz: f64,
        rows: Vec<EstimatorRowInput>,
        #[serde(default)]
        est_tol_rel: Option<f64>,
        #[serde(default)]
        unc_tol_rel: Option<f64>,
    },
    /// Simulated single-shot trace with histogram fit and dwell analysis.
    SsrTrace {
        model: SsrModelConfig,
        lifetime_s: f64,
        shot_time_s: f64,
        blocks: u32,
        #[serde(default)]
        expect_dwell_s: Option<f64>,
        #[serde(default)]
        dwell_tol_rel: Option<f64>,
        #[serde(default)]
        expect_fidelity: Option<f64>,
        #[serde(default)]
        fidelity_tol: Option<f64>,
        #[serde(default)]
        histogram_bins: Option<usize>,
    },
    /// Readout-chain scalar report: SNRs and the noise budget.
    ReadoutBudget {
        std_model: StdReadoutModel,
        ssr_model: SsrModelConfig,
        p0: f64,
        #[serde(default)]
        expect_snr_std: Option<f64>,
        #[serde(default)]
        expect_snr_ssr: Option<f64>,
        #[serde(default)]
        expect_sigmas: Option<[f64; 3]>,
        #[serde(default)]
        sigma_tol_rel: Option<f64>,
    },
    /// Resolution-limit fixed point.
    ResolutionLimit {
        amp_eff_hz: f64,
        delta_s_hz: f64,
        time_s: f64,
        gamma_per_s: f64,
        n_exp: u64,
        #[serde(default)]
        expect_hz: Option<f64>,
        #[serde(default)]
        tol_rel: Option<f64>,
    },
    /// Synthetic amplitude calibration: generate a noisy resonant-pulse
    /// curve and recover the amplitude by least squares.
    Calibration {
        amp_eff_hz: f64,
        tones: u8,
        times_s: Sweep,
        noise_std: f64,
    },
    /// Mapping-pulse fidelity by quadrature with MC cross-check.
    PulseFidelity {
        t_pi_s: f64,
        sigma_delta_hz: f64,
        sigma_amp: f64,
        #[serde(default)]
        mc_samples: Option<u64>,
        #[serde(default)]
        expect_average: Option<f64>,
        #[serde(default)]
        average_tol: Option<f64>,
    },
    /// Monte Carlo vs Bessel-product cross-check over random parameter
    /// draws.
    OracleCheck {
        draws: u32,
        mc_samples: u64,
        max_sigma: f64,
    },
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub seed_override: Option<u64>,
    pub mc_samples_override: Option<u64>,
    /// Treat warnings as fatal (exit-code 2 behavior in the binary).
    pub strict: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArtifactRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub artifacts: Vec<ArtifactRecord>,
    pub assertions: Vec<Assertion>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub seed: u64,
    pub reports: Vec<ScenarioReport>,
    pub all_passed: bool,
    pub had_warnings: bool,
}

/// Load a manifest from a JSON file.
pub fn load_manifest(path: &Path) -> Result<RunManifest> {
    let text = std::fs::read_to_string(path)?;
    let manifest: RunManifest = serde_json::from_str(&text)?;
    if manifest.schema_version != SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "manifest schema_version {} unsupported",
            manifest.schema_version
        )));
    }
    let mut names: Vec<&str> = manifest.scenarios.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    if names.len() != manifest.scenarios.len() {
        return Err(Error::Config("scenario names must be unique".into()));
    }
    Ok(manifest)
}

/// Stable per-scenario seed: global seed mixed with an FNV-1a hash of the
/// scenario name, so renaming or reordering other scenarios never shifts a
/// scenario's stream.
fn scenario_seed(global: u64, name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h ^ global
}

/// Execute every scenario, writing artifacts under `out_dir`. Scenario
/// failures are isolated into their reports; the summary (and its JSON file
/// `summary.json`) carries the overall verdict.
pub fn run(manifest: &RunManifest, out_dir: &Path, opts: &RunOptions) -> Result<RunSummary> {
    std::fs::create_dir_all(out_dir)?;
    let seed = opts.seed_override.unwrap_or(manifest.global_seed);
    let mut reports = Vec::new();
    for scenario in &manifest.scenarios {
        let mut report = ScenarioReport {
            name: scenario.name.clone(),
            artifacts: Vec::new(),
            assertions: Vec::new(),
            error: None,
            warnings: Vec::new(),
        };
        let sc_seed = scenario_seed(seed, &scenario.name);
        if let Err(e) = run_scenario(scenario, sc_seed, out_dir, opts, &mut report) {
            report.error = Some(e.to_string());
        }
        reports.push(report);
    }
    let all_passed = reports
        .iter()
        .all(|r| r.error.is_none() && r.assertions.iter().all(|a| a.passed));
    let had_warnings = reports.iter().any(|r| !r.warnings.is_empty());
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        seed,
        reports,
        all_passed,
        had_warnings,
    };
    let json = serde_json::to_string_pretty(&summary)?;
    std::fs::write(out_dir.join("summary.json"), json)?;
    Ok(summary)
}

fn write_artifact(
    out_dir: &Path,
    name: &str,
    content: &str,
    report: &mut ScenarioReport,
) -> Result<PathBuf> {
    let path = out_dir.join(name);
    std::fs::write(&path, content.as_bytes())?;
    let mut hasher = Sha256::new();
    hasher.update(content.as_bytes());
    report.artifacts.push(ArtifactRecord {
        path: name.to_string(),
        sha256: format!("{:x}", hasher.finalize()),
    });
    Ok(path)
}

fn check(
    report: &mut ScenarioReport,
    name: &str,
    passed: bool,
    detail: String,
) {
    report.assertions.push(Assertion {
        name: name.to_string(),
        passed,
        detail,
    });
}

fn check_rel(report: &mut ScenarioReport, name: &str, got: f64, expect: f64, tol_rel: f64) {
    let rel = if expect != 0.0 {
        ((got - expect) / expect).abs()
    } else {
        got.abs()
    };
    check(
        report,
        name,
        rel <= tol_rel,
        format!("got {got}, expected {expect} ± {:.2}%", tol_rel * 100.0),
    );
}

fn run_scenario(
    scenario: &Scenario,
    seed: u64,
    out_dir: &Path,
    opts: &RunOptions,
    report: &mut ScenarioReport,
) -> Result<()> {
    let base = &scenario.name;
    match &scenario.kind {
        ScenarioKind::ProbVsTime { config, times_s } => {
            for d in validate(config) {
                match d.severity {
                    Severity::Error => return Err(Error::Config(d.message)),
                    _ => report.warnings.push(d.message),
                }
            }
            let protocol = to_protocol(config)?;
            let eff = protocol.effective_signal()?;
            let gamma = protocol.decay_rate;
            let mut csv = String::from("time_s,probability,contrast\n");
            for t in times_s.values() {
                let p = if gamma > 0.0 {
                    transition_probability_decohered(&eff, t, gamma)
                } else {
                    transition_probability(&eff, t)
                };
                csv.push_str(&format!("{},{},{}\n", t, p, 1.0 - 2.0 * p));
            }
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
        }
        ScenarioKind::FiVsTime {
            amp_eff_hz,
            delta_s_hz,
            delta_r_hz,
            times_s,
            noise,
            n_exp,
        } => {
            let amp = AngularFrequency::from_hz(*amp_eff_hz);
            let ds = AngularFrequency::from_hz(*delta_s_hz);
            let dr = AngularFrequency::from_hz(*delta_r_hz);
            let mut csv = String::from("time_s,fi_per_shot,crb_std_hz\n");
            for t in times_s.values() {
                match fisher_information(amp, ds, dr, t, (*noise).into(), *n_exp) {
                    Ok(fr) => csv.push_str(&format!(
                        "{},{},{}\n",
                        t,
                        fr.fi_per_shot,
                        fr.crb_std / std::f64::consts::TAU
                    )),
                    Err(_) => csv.push_str(&format!("{},nan,nan\n", t)),
                }
            }
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
        }
        ScenarioKind::ContrastVsDeltaR {
            amp_eff_hz,
            delta_s_hz,
            time_s,
            delta_r_hz,
            gamma_per_s,
            include_expansion,
        } => {
            let amp = AngularFrequency::from_hz(*amp_eff_hz);
            let ds = AngularFrequency::from_hz(*delta_s_hz);
            let expansion = if *include_expansion {
                Some(crate::prob::expansion_coefficients(amp, ds, *time_s)?)
            } else {
                None
            };
            let mut csv = if expansion.is_some() {
                String::from("delta_r_hz,probability,contrast,probability_quadratic\n")
            } else {
                String::from("delta_r_hz,probability,contrast\n")
            };
            for dr_hz in delta_r_hz.values() {
                let eff = EffectiveSignal::symmetric(amp, ds, AngularFrequency::from_hz(dr_hz));
                let p = if *gamma_per_s > 0.0 {
                    transition_probability_decohered(&eff, *time_s, *gamma_per_s)
                } else {
                    transition_probability(&eff, *time_s)
                };
                match &expansion {
                    Some(e) => {
                        let dr = std::f64::consts::TAU * dr_hz;
                        csv.push_str(&format!(
                            "{},{},{},{}\n",
                            dr_hz,
                            p,
                            1.0 - 2.0 * p,
                            e.a + e.b * dr * dr
                        ));
                    }
                    None => csv.push_str(&format!("{},{},{}\n", dr_hz, p, 1.0 - 2.0 * p)),
                }
            }
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
        }
        ScenarioKind::CrbVsDeltaR {
            amp_eff_hz,
            delta_s_hz,
            time_s,
            delta_r_hz,
            noise,
            n_exp,
        } => {
            let amp = AngularFrequency::from_hz(*amp_eff_hz);
            let ds = AngularFrequency::from_hz(*delta_s_hz);
            let mut csv = String::from("delta_r_hz,fi_per_shot,crb_std_hz\n");
            for dr_hz in delta_r_hz.values() {
                match fisher_information(
                    amp,
                    ds,
                    AngularFrequency::from_hz(dr_hz),
                    *time_s,
                    (*noise).into(),
                    *n_exp,
                ) {
                    Ok(fr) => csv.push_str(&format!(
                        "{},{},{}\n",
                        dr_hz,
                        fr.fi_per_shot,
                        fr.crb_std / std::f64::consts::TAU
                    )),
                    Err(_) => csv.push_str(&format!("{},nan,nan\n", dr_hz)),
                }
            }
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
        }
        ScenarioKind::ExpansionVsTime {
            amp_eff_hz,
            delta_s_hz,
            times_s,
        } => {
            let amp = AngularFrequency::from_hz(*amp_eff_hz);
            let ds = AngularFrequency::from_hz(*delta_s_hz);
            let mut csv = String::from("time_s,a,b\n");
            for t in times_s.values() {
                let e = crate::prob::expansion_coefficients(amp, ds, t)?;
                csv.push_str(&format!("{},{},{}\n", t, e.a, e.b));
            }
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
        }
        ScenarioKind::EstimatorTable {
            amp_eff_hz,
            delta_s_hz,
            time_s,
            d_delta_s_hz,
            d_amp_eff_hz,
            rows,
            est_tol_rel,
            unc_tol_rel,
        } => {
            let amp = AngularFrequency::from_hz(*amp_eff_hz);
            let ds = AngularFrequency::from_hz(*delta_s_hz);
            let mut table = Vec::new();
            for row in rows {
                let reference = AngularFrequency::from_hz(row.actual_dr_hz);
                // Estimates always by exact Bessel inversion on the branch of
                // the nominal separation; uncertainties by the small-δ_r
                // closed form while it applies (C >= 1/2) and by implicit
                // differentiation at the nominal point beyond it.
                let unc_method = if row.mean_c >= 0.5 {
                    EstimationMethod::Approx
                } else {
                    EstimationMethod::ExactInversion {
                        reference: Some(reference),
                    }
                };
                let est = estimate_delta_r(
                    row.mean_c,
                    amp,
                    ds,
                    *time_s,
                    EstimationMethod::ExactInversion {
                        reference: Some(reference),
                    },
                )?;
                let mut record = propagate_uncertainty(&UncertaintyInputs {
                    contrast: row.mean_c,
                    d_contrast: row.d_c,
                    delta_s: ds,
                    d_delta_s: AngularFrequency::from_hz(*d_delta_s_hz),
                    amp_eff: amp,
                    d_amp_eff: AngularFrequency::from_hz(*d_amp_eff_hz),
                    time: *time_s,
                    method: unc_method,
                })?;
                record.delta_r_hat = est.delta_r;
                table.push(TableRow {
                    actual_delta_r: reference,
                    record,
                });
                if let Some(expect) = row.expect_est_dr_hz {
                    check_rel(
                        report,
                        &format!("est_dr at {} Hz", row.actual_dr_hz),
                        est.delta_r.hz(),
                        expect,
                        est_tol_rel.unwrap_or(0.02),
                    );
                }
                if let Some(expect) = row.expect_d_dr_hz {
                    let rec = &table.last().unwrap().record;
                    let got = [
                        rec.from_contrast.hz(),
                        rec.from_delta_s.hz(),
                        rec.from_amp.hz(),
                        rec.total.hz(),
                    ];
                    for (label, (g, e)) in ["dC", "dds", "dOmega", "total"]
                        .iter()
                        .zip(got.iter().zip(expect.iter()))
                    {
                        check_rel(
                            report,
                            &format!("dDr_{label} at {} Hz", row.actual_dr_hz),
                            *g,
                            *e,
                            unc_tol_rel.unwrap_or(0.10),
                        );
                    }
                }
            }
            write_artifact(out_dir, &format!("{base}.csv"), &table_csv(&table), report)?;
        }
        ScenarioKind::SsrTrace {
            model,
            lifetime_s,
            shot_time_s,
            blocks,
            expect_dwell_s,
            dwell_tol_rel,
            expect_fidelity,
            fidelity_tol,
            histogram_bins,
        } => {
            let m = model.to_model()?;
            let trace = simulate_ssr_trace(
                &m,
                &Lifetimes::symmetric(*lifetime_s),
                *shot_time_s,
                *blocks,
                seed,
            )?;
            let hist = Histogram::from_samples(&trace.i_norm, histogram_bins.unwrap_or(80))?;
            let fit = fit_double_gaussian(&hist)?;
            let digitized = digitize(&trace, fit.threshold);
            let dw = dwell_times(&digitized, *shot_time_s);
            write_artifact(
                out_dir,
                &format!("{base}_trace.csv"),
                &trace_csv(&trace, &digitized),
                report,
            )?;
            write_artifact(
                out_dir,
                &format!("{base}_histogram.csv"),
                &histogram_csv(&hist),
                report,
            )?;
            let up = fit_dwell_exponential(&dw.up)?;
            let down = fit_dwell_exponential(&dw.down)?;
            let mut pooled_durations = dw.up.clone();
            pooled_durations.extend_from_slice(&dw.down);
            let pooled = fit_dwell_exponential(&pooled_durations)?;
            let summary = serde_json::json!({
                "fit": fit,
                "dwell_up": up,
                "dwell_down": down,
                "dwell_pooled": pooled,
                "zero_count_redraws": trace.zero_count_redraws,
            });
            write_artifact(
                out_dir,
                &format!("{base}_fit.json"),
                &serde_json::to_string_pretty(&summary)?,
                report,
            )?;
            if let Some(expect) = expect_dwell_s {
                let tol = dwell_tol_rel.unwrap_or(0.15);
                check_rel(report, "dwell_mean_pooled", pooled.mean, *expect, tol);
            }
            if let Some(expect) = expect_fidelity {
                let tol = fidelity_tol.unwrap_or(1e-3);
                check(
                    report,
                    "fitted_fidelity",
                    (fit.fidelity - expect).abs() <= tol,
                    format!("got {}, expected {expect} ± {tol}", fit.fidelity),
                );
            }
        }
        ScenarioKind::ReadoutBudget {
            std_model,
            ssr_model,
            p0,
            expect_snr_std,
            expect_snr_ssr,
            expect_sigmas,
            sigma_tol_rel,
        } => {
            let ssr = ssr_model.to_model()?;
            let snr_a = snr_standard(std_model);
            let snr_b = snr_ssr(&ssr);
            let p_flip = crate::readout::flip_probability(&ssr, *p0);
            let nb = noise_budget(&ssr, *p0, p_flip);
            let mut csv = String::from(
                "snr_std,snr_ssr,sigma_psn,sigma_qpn,sigma_total,qpn_std_fraction\n",
            );
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                snr_a, snr_b, nb.sigma_psn, nb.sigma_qpn, nb.sigma_total, nb.qpn_std_fraction
            ));
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
            if let Some(e) = expect_snr_std {
                check(
                    report,
                    "snr_std",
                    (snr_a - e).abs() <= 1.0,
                    format!("got {snr_a}, expected {e} ± 1"),
                );
            }
            if let Some(e) = expect_snr_ssr {
                check(
                    report,
                    "snr_ssr",
                    (snr_b - e).abs() <= 1.0,
                    format!("got {snr_b}, expected {e} ± 1"),
                );
            }
            if let Some([e_psn, e_qpn, e_tot]) = expect_sigmas {
                let tol = sigma_tol_rel.unwrap_or(0.02);
                check_rel(report, "sigma_psn", nb.sigma_psn, *e_psn, tol);
                check_rel(report, "sigma_qpn", nb.sigma_qpn, *e_qpn, tol);
                check_rel(report, "sigma_total", nb.sigma_total, *e_tot, tol);
            }
        }
        ScenarioKind::ResolutionLimit {
            amp_eff_hz,
            delta_s_hz,
            time_s,
            gamma_per_s,
            n_exp,
            expect_hz,
            tol_rel,
        } => {
            let dr = resolution_limit(
                AngularFrequency::from_hz(*amp_eff_hz),
                AngularFrequency::from_hz(*delta_s_hz),
                *time_s,
                *gamma_per_s,
                *n_exp,
            )?;
            let mut csv = String::from("resolution_limit_hz\n");
            csv.push_str(&format!("{}\n", dr.hz()));
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
            if let Some(e) = expect_hz {
                check_rel(report, "resolution_limit_hz", dr.hz(), *e, tol_rel.unwrap_or(0.10));
            }
        }
        ScenarioKind::Calibration {
            amp_eff_hz,
            tones,
            times_s,
            noise_std,
        } => {
            let truth = AngularFrequency::from_hz(*amp_eff_hz);
            let mut stream = crate::numerics::rng::Stream::new(seed, 1);
            let mut csv = String::from("time_s,probability\n");
            let mut data = Vec::new();
            for t in times_s.values() {
                let p = calibration_probability(truth, t, *tones)?
                    + noise_std * stream.normal();
                let p = p.clamp(0.0, 1.0);
                data.push((t, p));
                csv.push_str(&format!("{},{}\n", t, p));
            }
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
            let guess = AngularFrequency::from_hz(*amp_eff_hz * 0.85);
            let fit = fit_calibration(&data, *tones, guess)?;
            let summary = serde_json::json!({
                "fitted_amp_hz": fit.amp_eff.hz(),
                "sigma_hz": fit.sigma / std::f64::consts::TAU,
                "rss": fit.rss,
            });
            write_artifact(
                out_dir,
                &format!("{base}_fit.json"),
                &serde_json::to_string_pretty(&summary)?,
                report,
            )?;
            let err = (fit.amp_eff.rad_per_sec() - truth.rad_per_sec()).abs();
            check(
                report,
                "calibration_recovers_amplitude",
                err <= 3.0 * fit.sigma.max(1e-12),
                format!(
                    "fit {} Hz vs truth {} Hz (3 sigma = {} Hz)",
                    fit.amp_eff.hz(),
                    truth.hz(),
                    3.0 * fit.sigma / std::f64::consts::TAU
                ),
            );
        }
        ScenarioKind::PulseFidelity {
            t_pi_s,
            sigma_delta_hz,
            sigma_amp,
            mc_samples,
            expect_average,
            average_tol,
        } => {
            let m = RfPulseModel::pi_pulse(
                *t_pi_s,
                AngularFrequency::from_hz(*sigma_delta_hz),
                *sigma_amp,
            )?;
            let rep = average_fidelity(&m, 40)?;
            let n = opts
                .mc_samples_override
                .or(*mc_samples)
                .unwrap_or(200_000);
            let mc = mc_average_fidelity(&m, n, seed);
            let summary = serde_json::json!({
                "report": rep,
                "mc_mean": mc.mean,
                "mc_std_error": mc.std_error,
            });
            write_artifact(
                out_dir,
                &format!("{base}.json"),
                &serde_json::to_string_pretty(&summary)?,
                report,
            )?;
            check(
                report,
                "quadrature_vs_mc",
                (mc.mean - rep.average_fidelity).abs() <= 3.0 * mc.std_error.max(1e-12),
                format!(
                    "quadrature {} vs MC {} ± {}",
                    rep.average_fidelity, mc.mean, mc.std_error
                ),
            );
            if let Some(e) = expect_average {
                let tol = average_tol.unwrap_or(1e-4);
                check(
                    report,
                    "average_fidelity",
                    (rep.average_fidelity - e).abs() <= tol,
                    format!("got {}, expected {e} ± {tol}", rep.average_fidelity),
                );
            }
        }
        ScenarioKind::OracleCheck {
            draws,
            mc_samples,
            max_sigma,
        } => {
            let n = opts.mc_samples_override.unwrap_or(*mc_samples);
            let mut csv =
                String::from("draw,amp_eff_hz,delta_s_hz,delta_r_hz,time_s,analytic,mc_mean,mc_std_error,z\n");
            let mut worst: f64 = 0.0;
            let mut param_stream = crate::numerics::rng::Stream::new(seed, 0xA11CE);
            for i in 0..*draws {
                let amp_hz = 50_000.0 * param_stream.uniform();
                let ds_hz = 5_000.0 + 95_000.0 * param_stream.uniform();
                let dr_hz = ds_hz / 5.0 * param_stream.uniform();
                let t = 10e-6 + 190e-6 * param_stream.uniform();
                let eff = EffectiveSignal::symmetric(
                    AngularFrequency::from_hz(amp_hz),
                    AngularFrequency::from_hz(ds_hz),
                    AngularFrequency::from_hz(dr_hz),
                );
                let analytic = transition_probability(&eff, t);
                let est = mc_transition_probability(
                    &eff,
                    &PhaseModel::IndependentUniform,
                    t,
                    &McConfig::new(n, seed, i as u64),
                );
                let z = if est.std_error > 0.0 {
                    (est.mean - analytic) / est.std_error
                } else {
                    0.0
                };
                worst = worst.max(z.abs());
                csv.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{}\n",
                    i, amp_hz, ds_hz, dr_hz, t, analytic, est.mean, est.std_error, z
                ));
            }
            write_artifact(out_dir, &format!("{base}.csv"), &csv, report)?;
            check(
                report,
                "mc_within_sigma",
                worst <= *max_sigma,
                format!("worst |z| = {worst:.3} over {draws} draws (limit {max_sigma})"),
            );
        }
    }
    Ok(())
}

/// A reference superresolution time helper for manifest authors: the first
/// n times 2π/|δ_s| (exposed mainly for the examples).
pub fn superresolution_grid(delta_s_hz: f64, n_max: u32) -> Result<Vec<f64>> {
    superresolution_times(AngularFrequency::from_hz(delta_s_hz), n_max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_config() -> ExperimentConfig {
        ExperimentConfig {
            schema_version: 1,
            signal: SignalConfig {
                amplitude_1_hz: 16_850.0,
                amplitude_2_hz: 16_850.0,
                omega_1_hz: 2_512_000.0,
                omega_2_hz: 2_513_000.0,
                phase_model: PhaseModelConfig::IndependentUniform,
            },
            dd: Some(DdConfig {
                pulse_spacing_s: 200e-9,
                pulse_count: 400,
            }),
            protocol: ProtocolSection {
                total_time_s: 80e-6,
                decay_rate_per_s: 0.0,
                n_exp: 132_000,
            },
            constants: None,
        }
    }

    #[test]
    fn valid_config_produces_no_diagnostics() {
        let diags = validate(&reference_config());
        assert!(
            diags.iter().all(|d| d.severity != Severity::Error),
            "{diags:?}"
        );
        // 400 pulses = 50 blocks of 8, on the superresolution grid: silence.
        assert!(diags.is_empty(), "{diags:?}");
    }

    #[test]
    fn off_superresolution_time_warns() {
        // t = 2.56π/δ_s: flagged but not fatal.
        let mut cfg = reference_config();
        cfg.dd = Some(DdConfig {
            pulse_spacing_s: 200e-9,
            pulse_count: 512,
        });
        cfg.protocol.total_time_s = 102.4e-6;
        let diags = validate(&cfg);
        assert!(diags.iter().all(|d| d.severity != Severity::Error));
        assert!(
            diags
                .iter()
                .any(|d| d.severity == Severity::Warning
                    && d.message.contains("off superresolution")),
            "{diags:?}"
        );
    }

    #[test]
    fn negative_frequency_is_fatal() {
        let mut cfg = reference_config();
        cfg.signal.omega_1_hz = -1.0;
        assert!(validate(&cfg).iter().any(|d| d.severity == Severity::Error));
        assert!(to_protocol(&cfg).is_err());
    }

    #[test]
    fn xy8_granularity_is_informational() {
        let mut cfg = reference_config();
        cfg.dd = Some(DdConfig {
            pulse_spacing_s: 200e-9,
            pulse_count: 401,
        });
        cfg.protocol.total_time_s = 401.0 * 200e-9;
        let diags = validate(&cfg);
        assert!(diags.iter().any(|d| d.severity == Severity::Info));
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg = reference_config();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.signal.omega_1_hz, cfg.signal.omega_1_hz);
        let protocol = to_protocol(&back).unwrap();
        let eff = protocol.effective_signal().unwrap();
        // δ_s = (2π)·12.5 kHz for the 200 ns spacing.
        assert!((eff.delta_s().hz().abs() - 12_500.0).abs() < 1e-6);
    }

    #[test]
    fn scenario_seed_is_name_stable() {
        assert_eq!(scenario_seed(1, "a"), scenario_seed(1, "a"));
        assert_ne!(scenario_seed(1, "a"), scenario_seed(1, "b"));
        assert_ne!(scenario_seed(1, "a"), scenario_seed(2, "a"));
    }
}
