//! Fisher information of the separation estimate: the peak structure at the
//! superresolution times and the projection-noise-limited bound.
//!
//! ```text
//! cargo run --example fisher_information
//! ```

use twotone::estimate::{crb_uncertainty, fisher_information, NoiseModel};
use twotone::AngularFrequency;

fn main() -> twotone::Result<()> {
    let amp = AngularFrequency::from_khz(16.85);
    let ds = AngularFrequency::from_khz(50.0);
    let dr = AngularFrequency::from_hz(50.0);

    println!("FI(t) around the superresolution times (delta_s = 50 kHz):");
    for k in 1..=45 {
        let t = 2e-6 * k as f64;
        let fi = fisher_information(amp, ds, dr, t, NoiseModel::QpnOnly, 1)
            .map(|r| r.fi_per_shot)
            .unwrap_or(0.0);
        let bar = "#".repeat((fi.sqrt() * 2e4) as usize);
        println!("  t = {:>5.1} us  {bar}", t * 1e6);
    }

    let ds = AngularFrequency::from_khz(12.5);
    let t = 80e-6;
    let fr = fisher_information(amp, ds, AngularFrequency::ZERO, t, NoiseModel::QpnOnly, 1)?;
    println!("\nat t = 80 us, delta_s = 12.5 kHz, dr -> 0 (limit branch):");
    println!("  FI per shot = {:.4e} (rad/s)^-2", fr.fi_per_shot);
    let n_exp = 132_000;
    println!(
        "  bound over {n_exp} repetitions = (2pi) * {:.2} Hz",
        crb_uncertainty(fr.fi_per_shot, n_exp) / std::f64::consts::TAU
    );

    let gamma = 1.0 / 1.3e-3;
    println!("\ndecoherence-limited bound vs separation (T2 = 1.3 ms):");
    for dr_hz in [5.0, 10.0, 23.3, 100.0, 500.0] {
        let fr = fisher_information(
            amp,
            ds,
            AngularFrequency::from_hz(dr_hz),
            t,
            NoiseModel::Decoherence(gamma),
            n_exp,
        )?;
        println!(
            "  dr = {:>6.1} Hz: bound = {:>8.2} Hz",
            dr_hz,
            fr.crb_std / std::f64::consts::TAU
        );
    }
    Ok(())
}
