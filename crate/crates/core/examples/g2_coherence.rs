//! Second-order coherence of a thermal mode next to a coherently driven one.

use levsim::cli::preset;
use levsim::coherence::{estimate_g2, tau_grid};
use levsim::dynamics::StepControl;
use levsim::langevin::{ensemble_run, PhaseSpaceState, DEFAULT_WARMUP_FRAC};
use levsim::Mode;

fn main() -> levsim::Result<()> {
    let base = preset("fig8")?;
    for delta in [0.0, base.delta] {
        let cfg = base.with_delta(delta);
        let (ax, ay) = cfg.initial_amplitudes();
        let ens = ensemble_run(
            &cfg,
            &PhaseSpaceState::from_amplitudes(cfg.q0, ax, ay),
            64,
            StepControl::new(30.0, 1e-3).record_every(20),
            1,
        )?;
        println!("delta = {delta}");
        for p in estimate_g2(&ens, Mode::X, &tau_grid(4.0, 5), DEFAULT_WARMUP_FRAC)? {
            println!("  tau={:.1}  g2_x={:.3} ± {:.3}", p.tau, p.g2, p.stderr);
        }
    }
    Ok(())
}
