//! Sweeps the coupling through the exceptional point of a balanced trap.

use levsim::cli::preset;
use levsim::spectrum::{linspace, locate_exceptional_point, sweep_coupling};

fn main() -> levsim::Result<()> {
    let cfg = preset("fig2")?;
    let gamma = cfg.gamma_gx;
    for row in sweep_coupling(&cfg, &linspace(0.0, 2.0 * gamma, 9))? {
        let e = row.eigen;
        println!(
            "beta={:.4}  lambda+={:+.4}{:+.4}i  lambda-={:+.4}{:+.4}i  {}",
            row.beta, e.lambda_plus.re, e.lambda_plus.im, e.lambda_minus.re, e.lambda_minus.im, e.phase
        );
    }
    let ep = locate_exceptional_point(&cfg, 0.5 * gamma, 1.5 * gamma, 1e-12)?;
    println!("exceptional point at beta = {ep:.10} (gamma = {gamma})");
    Ok(())
}
