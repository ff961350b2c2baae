//! Mean phonon numbers under gain, cooling and heating, and the steady state.

use levsim::cli::preset;
use levsim::derive_parameters;
use levsim::dynamics::{integrate_coupled, steady_state_phonons, ModeAmplitudeState, PhononState, StepControl};
use levsim::Mode;

fn main() -> levsim::Result<()> {
    let cfg = preset("fig7")?;
    let params = derive_parameters(&cfg)?;
    let run = integrate_coupled(
        &ModeAmplitudeState::initial(&cfg),
        &PhononState::initial(&cfg),
        &cfg,
        &params,
        StepControl::new(1.0, 1e-5).record_every(10_000),
    )?;
    for p in &run.phonons {
        println!("t={:.2}  Nx={:.4e}  Ny={:.4e}", p.t, p.n_x, p.n_y);
    }
    println!("clamp events: {}", run.clamp_events);
    println!("uncoupled steady state Ny = {:.4e}", steady_state_phonons(&cfg, Mode::Y)?);
    Ok(())
}
