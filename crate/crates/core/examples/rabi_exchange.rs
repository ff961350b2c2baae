//! Energy exchange between the two modes, with and without coupling.

use levsim::cli::preset;
use levsim::derive_parameters;
use levsim::dynamics::{integrate_amplitudes, ModeAmplitudeState, StepControl};

fn main() -> levsim::Result<()> {
    let base = preset("fig3")?;
    for delta in [0.0, base.delta] {
        let cfg = base.with_delta(delta);
        let params = derive_parameters(&cfg)?;
        let traj = integrate_amplitudes(
            &ModeAmplitudeState::initial(&cfg),
            &cfg,
            &params,
            StepControl::new(10.0, 1e-3).record_every(1000),
        )?;
        println!("delta = {delta:e}, beta = {:.4} s^-1", params.beta);
        for s in &traj {
            println!("  t={:5.1}  |ax|={:.4}  |ay|={:.4}", s.t, s.a_x.norm(), s.a_y.norm());
        }
    }
    Ok(())
}
