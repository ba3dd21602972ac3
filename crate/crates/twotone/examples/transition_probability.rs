//! Phase-averaged transition probability and contrast: the time trace for a
//! few separations and the small-separation expansion at the
//! superresolution point.
//!
//! ```text
//! cargo run --example transition_probability
//! ```

use twotone::prob::{expansion_coefficients, transition_probability_decohered};
use twotone::signal::EffectiveSignal;
use twotone::AngularFrequency;

fn main() -> twotone::Result<()> {
    let amp = AngularFrequency::from_khz(16.85);
    let ds = AngularFrequency::from_khz(12.5);
    let gamma = 1.0 / 1.3e-3;

    println!("contrast vs time (decohered, T2 = 1.3 ms):");
    print!("{:>8}", "t_us");
    for dr in [0.0, 250.0, 500.0, 1000.0, 2500.0] {
        print!("{:>10}", format!("dr={dr}"));
    }
    println!();
    for k in 0..=8 {
        let t = 20e-6 * k as f64;
        print!("{:>8.1}", t * 1e6);
        for dr in [0.0, 250.0, 500.0, 1000.0, 2500.0] {
            let eff = EffectiveSignal::symmetric(amp, ds, AngularFrequency::from_hz(dr));
            let p = transition_probability_decohered(&eff, t, gamma);
            print!("{:>10.4}", 1.0 - 2.0 * p);
        }
        println!();
    }

    let t = 80e-6;
    let exp = expansion_coefficients(amp, ds, t)?;
    println!("\nexpansion at the superresolution time t = 80 us:");
    println!("  a = {:.3e} (zero on the grid), b = {:.6e} (rad/s)^-2", exp.a, exp.b);
    println!("  P ~ b*dr^2: at dr = (2pi)*250 Hz -> {:.5}", exp.b * (std::f64::consts::TAU * 250.0).powi(2));
    Ok(())
}
