//! The resolution-limit fixed point: the smallest separation for which the
//! decoherence-limited bound still satisfies the resolution criterion, and
//! how it scales with the repetition budget.
//!
//! ```text
//! cargo run --example resolution_limit
//! ```

use twotone::estimate::resolution_limit;
use twotone::numerics::stats::slope;
use twotone::AngularFrequency;

fn main() -> twotone::Result<()> {
    let amp = AngularFrequency::from_khz(16.85);
    let ds = AngularFrequency::from_khz(12.5);
    let t = 80e-6;
    let gamma = 1.0 / 1.3e-3;

    let dr = resolution_limit(amp, ds, t, gamma, 132_000)?;
    println!("resolution limit at the reference point: {:.2} Hz", dr.hz());
    let dr0 = resolution_limit(amp, ds, t, 0.0, 132_000)?;
    println!("without decoherence (projection-noise floor): {:.2} Hz", dr0.hz());

    println!("\nscaling with the repetition budget (decoherence-limited):");
    let mut log_n = Vec::new();
    let mut log_dr = Vec::new();
    for k in 0..=4 {
        let n = 132_000u64 * 10u64.pow(k);
        let dr = resolution_limit(amp, ds, t, gamma, n)?;
        println!("  n_exp = {n:>12}: {:.3} Hz", dr.hz());
        log_n.push((n as f64).ln());
        log_dr.push(dr.rad_per_sec().ln());
    }
    println!("  log-log slope = {:.3} (noise-floor regime tends to -1/4)", slope(&log_n, &log_dr));
    Ok(())
}
