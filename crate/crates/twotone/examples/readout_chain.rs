//! The ancilla-assisted readout chain end to end: SNR comparison, noise
//! budget, a simulated jump trace with its double-Gaussian histogram fit,
//! and dwell-time lifetimes.
//!
//! ```text
//! cargo run --example readout_chain
//! ```

use twotone::readout::{
    digitize, dwell_times, fit_double_gaussian, fit_dwell_exponential, noise_budget,
    simulate_ssr_trace, snr_ssr, snr_standard, Histogram, Lifetimes, SsrModel, StdReadoutModel,
};

fn main() -> twotone::Result<()> {
    let std_model = StdReadoutModel::new(1.03, 0.73, 0.25, 2e5)?;
    let ssr = SsrModel::reference();
    println!("SNR standard readout : {:.1}", snr_standard(&std_model));
    println!("SNR ancilla-assisted : {:.1}", snr_ssr(&ssr));

    let nb = noise_budget(&ssr, 0.0, 0.10);
    println!("\nnoise budget (p0 ~ 0):");
    println!("  sigma_psn  = {:.4}", nb.sigma_psn);
    println!("  sigma_qpn  = {:.4}", nb.sigma_qpn);
    println!("  sigma_total= {:.4}", nb.sigma_total);
    println!("  projection-noise share: {:.1}% of std, {:.1}% of variance",
        nb.qpn_std_fraction * 100.0, nb.qpn_variance_fraction * 100.0);

    // Simulated jump trace at the calibrated histogram operating point.
    let model = SsrModel::histogram_calibrated();
    let shot = 20.0 / 4400.0;
    let trace = simulate_ssr_trace(&model, &Lifetimes::symmetric(0.06), shot, 4400, 11)?;
    let hist = Histogram::from_samples(&trace.i_norm, 80)?;
    let fit = fit_double_gaussian(&hist)?;
    println!("\ndouble-Gaussian fit of the normalized-count histogram:");
    println!("  means     = ({:+.4}, {:+.4})", fit.means.0, fit.means.1);
    println!("  sigmas    = ({:.4}, {:.4})", fit.sigmas.0, fit.sigmas.1);
    println!("  threshold = {:+.4}", fit.threshold);
    println!("  fidelity  = {:.4}%", fit.fidelity * 100.0);

    let digitized = digitize(&trace, fit.threshold);
    let dw = dwell_times(&digitized, shot);
    let up = fit_dwell_exponential(&dw.up)?;
    let down = fit_dwell_exponential(&dw.down)?;
    println!("\ndwell-time lifetimes (true 60 ms):");
    println!("  up   : {:.1} ms over {} segments (KS p = {:.2})", up.mean * 1e3, up.n_segments, up.ks_p_value);
    println!("  down : {:.1} ms over {} segments (KS p = {:.2})", down.mean * 1e3, down.n_segments, down.ks_p_value);
    Ok(())
}
