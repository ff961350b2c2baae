//! Thermal Langevin ensemble: stationary momentum variance vs the OU value.

use levsim::dynamics::StepControl;
use levsim::langevin::{ensemble_run, ou_momentum_variance, PhaseSpaceState, DEFAULT_WARMUP_FRAC};
use levsim::SystemConfig;

fn main() -> levsim::Result<()> {
    // small angular-unit trap so the explicit scheme stays well resolved
    let cfg = SystemConfig::from_json_str(
        r#"{
            "frequency_unit_convention": "angular",
            "omega_x": 10.0, "omega_y": 17.32, "omega_r": 7.32,
            "gamma_gx": 1.0, "gamma_gy": 1.0, "gamma_ay": 0.0,
            "gamma_cx": 0.0, "gamma_cy": 0.0, "Gamma_cx": 0.0, "Gamma_cy": 0.0,
            "D_tx": 0.0, "D_ty": 0.0, "delta": 0.0,
            "temperature": 1e-13, "diameter": 1e-7, "density": 2200.0,
            "eta": 2e-9, "phi": 5e16, "Q0": 1.0, "N0": 0.0, "ax0_re": 0.0
        }"#,
    )?;
    let ens = ensemble_run(
        &cfg,
        &PhaseSpaceState::default(),
        200,
        StepControl::new(20.0, 1e-3).record_every(10),
        7,
    )?;
    let model = levsim::langevin::LangevinModel::from_config(&cfg)?;
    let var = ens.stationary_variance(1, DEFAULT_WARMUP_FRAC);
    println!("Var(P_x) = {var:.5e}");
    println!("OU value = {:.5e}", ou_momentum_variance(model.noise.sigma_t_x, cfg.gamma_gx));
    Ok(())
}
