//! Amplitude calibration on synthetic resonant-pulse data: generate the
//! single- and two-tone curves with noise and recover the amplitude by
//! least squares.
//!
//! ```text
//! cargo run --example calibration
//! ```

use twotone::numerics::rng::Stream;
use twotone::prob::{calibration_probability, fit_calibration};
use twotone::AngularFrequency;

fn main() -> twotone::Result<()> {
    let truth = AngularFrequency::from_khz(16.85);
    let mut noise = Stream::new(2024, 0);
    for tones in [1u8, 2] {
        let data: Vec<(f64, f64)> = (1..=64)
            .map(|k| {
                let t = 2.3e-6 * k as f64;
                let p = calibration_probability(truth, t, tones).unwrap()
                    + 0.004 * noise.normal();
                (t, p.clamp(0.0, 1.0))
            })
            .collect();
        let fit = fit_calibration(&data, tones, AngularFrequency::from_khz(14.0))?;
        println!(
            "{}-tone fit: {:.1} Hz +- {:.1} Hz (truth {:.1} Hz, off by {:+.2} sigma)",
            tones,
            fit.amp_eff.hz(),
            fit.sigma / std::f64::consts::TAU,
            truth.hz(),
            (fit.amp_eff.rad_per_sec() - truth.rad_per_sec()) / fit.sigma
        );
    }
    Ok(())
}
