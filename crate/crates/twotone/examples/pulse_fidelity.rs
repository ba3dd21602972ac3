//! Mapping-pulse fidelity under Gaussian detuning and amplitude noise:
//! closed form, Gauss-Hermite average, and the Monte Carlo cross-check.
//!
//! ```text
//! cargo run --example pulse_fidelity
//! ```

use twotone::pulse::{
    average_fidelity, dephasing_detuning_std, mc_average_fidelity, pulse_fidelity, RfPulseModel,
};

fn main() -> twotone::Result<()> {
    let m = RfPulseModel::reference();
    println!(
        "pi pulse: t = {:.0} us, Rabi = {:.2} kHz",
        m.duration * 1e6,
        m.rabi.hz() / 1e3
    );
    println!(
        "noise: sigma_delta = {:.1} Hz (from T2* = 1.4 ms), sigma_amp = {}",
        m.detuning_std.hz(),
        m.amplitude_std
    );
    assert_eq!(
        m.detuning_std.rad_per_sec(),
        dephasing_detuning_std(1.4e-3).rad_per_sec()
    );

    println!("\nfidelity at fixed error points:");
    for k in [0.0, 1.0, 2.0, 3.0] {
        let f = pulse_fidelity(
            m.rabi,
            k * m.detuning_std.rad_per_sec(),
            k * m.amplitude_std,
        );
        println!("  {k} sigma: F = {f:.6}");
    }

    let rep = average_fidelity(&m, 40)?;
    let mc = mc_average_fidelity(&m, 500_000, 3);
    println!("\nGaussian-averaged fidelity:");
    println!("  quadrature : {:.6} (node-doubling error {:.1e})",
        rep.average_fidelity, rep.quadrature_error_estimate);
    println!("  monte carlo: {:.6} +- {:.1e}", mc.mean, mc.std_error);
    println!("  average infidelity ~ {:.1e}", 1.0 - rep.average_fidelity);
    Ok(())
}
