//! Force noise budget and sensitivity minima for weak and strong coupling.

use levsim::cli::preset;
use levsim::sensing::{default_minima_grid, find_sensitivity_minima, MeanPhonons, MinimaOptions};
use levsim::{derive_parameters, Mode};

fn main() -> levsim::Result<()> {
    let base = preset("fig9")?;
    let grid = default_minima_grid(&base, 10_000);
    for delta in [1e-5, 1e-3] {
        let cfg = base.with_delta(delta);
        let phonons = MeanPhonons::resolve(&cfg)?;
        let params = derive_parameters(&cfg)?;
        println!("delta = {delta:e}  (N = {:.1})", phonons.n_x);
        for mode in [Mode::X, Mode::Y] {
            let budget = levsim::sensing::noise_budget(&cfg, &params, mode, phonons.get(mode))?;
            println!("  {}: S_T={:.3e} S_H={:.3e} S_C={:.3e} N^2/Hz", mode.label(), budget.s_t, budget.s_h, budget.s_c);
            for m in find_sensitivity_minima(&cfg, mode, &grid, phonons, MinimaOptions::default())? {
                println!(
                    "     minimum at {:.1} kHz: {:.3e} N/sqrt(Hz)",
                    m.omega / std::f64::consts::TAU / 1e3,
                    m.sensitivity
                );
            }
        }
    }
    Ok(())
}
