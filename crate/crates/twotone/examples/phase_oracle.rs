//! The two independent oracles behind the closed-form model: Monte Carlo
//! phase averaging against the Bessel product, and lab-frame toggling
//! integration against the effective-frame closed form.
//!
//! ```text
//! cargo run --example phase_oracle
//! ```

use twotone::oracle::{
    mc_transition_probability, toggling_closed_form, toggling_integration, McConfig,
};
use twotone::prob::transition_probability;
use twotone::signal::{DdSequence, EffectiveSignal, PhaseModel, TwoToneSignal};
use twotone::AngularFrequency;

fn main() -> twotone::Result<()> {
    println!("Monte Carlo phase averaging vs Bessel product (n = 1e5):");
    for (i, (amp_khz, ds_khz, dr_hz, t_us)) in
        [(16.85, 12.5, 500.0, 80.0), (30.0, 40.0, 3000.0, 55.0), (5.0, 8.0, 700.0, 140.0)]
            .iter()
            .enumerate()
    {
        let eff = EffectiveSignal::symmetric(
            AngularFrequency::from_khz(*amp_khz),
            AngularFrequency::from_khz(*ds_khz),
            AngularFrequency::from_hz(*dr_hz),
        );
        let t = t_us * 1e-6;
        let analytic = transition_probability(&eff, t);
        let mc = mc_transition_probability(
            &eff,
            &PhaseModel::IndependentUniform,
            t,
            &McConfig::new(100_000, 7, i as u64),
        );
        println!(
            "  analytic {:.6}  mc {:.6} +- {:.6}  (z = {:+.2})",
            analytic,
            mc.mean,
            mc.std_error,
            (mc.mean - analytic) / mc.std_error
        );
    }

    println!("\ntoggling-frame integration vs effective-frame closed form");
    println!("(compared at the half-beat time, where the response peaks):");
    let omega = AngularFrequency::from_mhz(2.5);
    for x in [0.005, 0.01, 0.02] {
        let delta = AngularFrequency::from_rad_per_sec(omega.rad_per_sec() * x);
        let omega_dd = omega + delta;
        let n = (omega_dd.rad_per_sec() / delta.rad_per_sec()).round() as u32;
        let sig = TwoToneSignal::symmetric(
            AngularFrequency::from_khz(15.0),
            omega,
            omega,
            PhaseModel::IndependentUniform,
        )?;
        let dd = DdSequence::from_omega_dd(omega_dd, n)?;
        let phi = std::f64::consts::FRAC_PI_2;
        let lab = toggling_integration(&sig, &dd, phi, phi, 100)?;
        let closed = toggling_closed_form(&sig, &dd, phi, phi, dd.total_time())?;
        println!(
            "  delta/omega = {x:<6}: lab {lab:+.6e}, closed {closed:+.6e}, rel diff {:.2e}",
            ((lab - closed) / closed).abs()
        );
    }
    Ok(())
}
