//! Map two lab-frame tones into the pulse interaction frame and list the
//! superresolution times of the resulting mean detuning.
//!
//! ```text
//! cargo run --example effective_frame
//! ```

use twotone::signal::{
    dd_amplitude_factor, effective_transform, superresolution_times, DdSequence, PhaseModel,
    TwoToneSignal,
};
use twotone::AngularFrequency;

fn main() -> twotone::Result<()> {
    // Two tones around 2.5125 MHz, half separation 500 Hz.
    let signal = TwoToneSignal::symmetric(
        AngularFrequency::from_khz(16.85),
        AngularFrequency::from_hz(2_513_000.0),
        AngularFrequency::from_hz(2_512_000.0),
        PhaseModel::IndependentUniform,
    )?;
    // 200 ns pulse spacing -> pulse frequency 2.5 MHz, 400 pulses = 80 us.
    let dd = DdSequence::new(200e-9, 400)?;
    let eff = effective_transform(&signal, &dd)?;

    println!("pulse frequency      : {:.4} MHz", dd.omega_dd().hz() / 1e6);
    println!("total time           : {:.1} us", dd.total_time() * 1e6);
    println!(
        "effective detunings  : {:.3} kHz, {:.3} kHz",
        eff.delta_1.hz() / 1e3,
        eff.delta_2.hz() / 1e3
    );
    println!(
        "mean / half-sep      : {:.3} kHz / {:.1} Hz",
        eff.delta_s().hz() / 1e3,
        eff.delta_r().hz()
    );
    println!(
        "effective amplitudes : {:.4} kHz, {:.4} kHz (lab 16.85 kHz)",
        eff.amp_eff_1.hz() / 1e3,
        eff.amp_eff_2.hz() / 1e3
    );
    println!("small-detuning flags : {:?}", eff.small_detuning);

    println!("\nexact amplitude scaling vs detuning ratio:");
    for x in [0.0, 1e-3, 5e-3, 1e-2, 2e-2, 5e-2] {
        println!(
            "  delta/omega = {x:<7}: factor = {:.6}  (2/pi = {:.6})",
            dd_amplitude_factor(x),
            2.0 / std::f64::consts::PI
        );
    }

    let ts = superresolution_times(eff.delta_s(), 4)?;
    println!("\nsuperresolution times for |delta_s| = {:.1} kHz:", eff.delta_s().hz().abs() / 1e3);
    for (n, t) in ts.iter().enumerate() {
        println!("  n = {}: t = {:.1} us", n + 1, t * 1e6);
    }
    Ok(())
}
