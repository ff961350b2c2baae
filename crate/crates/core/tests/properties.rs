use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;

use levsim::coherence::g2_from_series;
use levsim::dynamics::{integrate_coupled, phonon_rhs, ModeAmplitudeState, PhononState, StepControl};
use levsim::langevin::{ensemble_run, simulate_seeded, PhaseSpaceState};
use levsim::sensing::{force_psd, noise_budget, position_psd, shot_floor, susceptibility, MeanPhonons, ShotNoiseForm};
use levsim::spectrum::{build_hamiltonian, classify_phase, discriminant, eigenvalues_closed_form, eigenvalues_numeric};
use levsim::{derive_parameters, DerivedParams, Mode, SystemConfig};

fn base() -> SystemConfig {
    levsim::cli::preset("fig2").unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn crel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(f64::MIN_POSITIVE)
}

prop_compose! {
    fn any_config()(
        wx in 1e3..1e6f64,
        split in 1.01..3.0f64,
        gx in 0.0..1.0f64,
        gy in 0.0..1.0f64,
        ga in 0.0..2.0f64,
        delta in 0.0..0.1f64,
        detuning in prop::option::of(-1.0..1.0f64),
    ) -> SystemConfig {
        SystemConfig {
            omega_x: wx,
            omega_y: wx * split,
            gamma_gx: gx,
            gamma_gy: gy,
            gamma_ay: ga,
            delta,
            detuning,
            ..base()
        }
    }
}

prop_compose! {
    /// Balanced gain/loss (Γ = 0) with the coupling sized near γ so both
    /// phases appear.
    fn balanced_config()(
        gx in 0.01..1.0f64,
        gy in 0.0..1.0f64,
        beta_over_gamma in 0.05..3.0f64,
    ) -> SystemConfig {
        let cfg = SystemConfig {
            gamma_gx: gx,
            gamma_gy: gy,
            gamma_ay: gx + gy,
            detuning: Some(0.0),
            ..base()
        };
        let omega_1 = derive_parameters(&cfg.with_delta(0.0)).unwrap().omega_1;
        cfg.with_delta(beta_over_gamma * gx / omega_1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn beta_product_is_omega3_squared(cfg in any_config()) {
        let p = derive_parameters(&cfg).unwrap();
        prop_assert!(rel(p.beta_x * p.beta_y, p.omega_3 * p.omega_3) < 1e-12 || p.omega_3 == 0.0);
        let split = cfg.omega_y.powi(2) - cfg.omega_x.powi(2);
        prop_assert!(rel(p.omega_1, split / (2.0 * p.omega_0)) < 1e-15);
        prop_assert!(rel(p.omega_3, cfg.delta * split / (2.0 * p.omega_0)) < 1e-14 || cfg.delta == 0.0);
    }

    #[test]
    fn derive_is_pure(cfg in any_config()) {
        let a: DerivedParams = derive_parameters(&cfg).unwrap();
        let b = derive_parameters(&cfg.clone()).unwrap();
        prop_assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }

    #[test]
    fn ordinary_units_round_trip(
        fx in 1.0..1e7f64,
        fy in 1.0..1e7f64,
        fr in 0.0..1e7f64,
        fd in -1e3..1e3f64,
    ) {
        let mut doc = base().to_document();
        doc["frequency_unit_convention"] = "ordinary".into();
        doc["omega_x"] = fx.into();
        doc["omega_y"] = fy.into();
        doc["omega_r"] = fr.into();
        doc["Delta_detuning"] = fd.into();
        doc["delta"] = 0.0.into();
        let cfg = SystemConfig::from_value(doc).unwrap();
        prop_assert!(rel(cfg.omega_x / TAU, fx) <= 1e-15);
        prop_assert!(rel(cfg.omega_y / TAU, fy) <= 1e-15);
        prop_assert!(rel(cfg.omega_r / TAU, fr) <= 1e-15);
        prop_assert!(rel(cfg.detuning.unwrap() / TAU, fd) <= 1e-15);
        // the angular snapshot reloads to the same config
        let reloaded = SystemConfig::from_value(cfg.to_document()).unwrap();
        prop_assert_eq!(reloaded.to_document(), cfg.to_document());
        prop_assert_eq!(derive_parameters(&reloaded).unwrap(), derive_parameters(&cfg).unwrap());
    }

    #[test]
    fn closed_form_matches_numeric(cfg in any_config()) {
        let p = derive_parameters(&cfg).unwrap();
        let (gx, gy) = DerivedParams::linear_damping(&cfg);
        let closed = eigenvalues_closed_form(&cfg, &p);
        let numeric = eigenvalues_numeric(&build_hamiltonian(&p, gx, gy));
        let scale = closed.lambda_plus.norm().max(closed.lambda_minus.norm());
        let direct = crel(closed.lambda_plus, numeric.lambda_plus, scale).max(crel(closed.lambda_minus, numeric.lambda_minus, scale));
        let swapped = crel(closed.lambda_plus, numeric.lambda_minus, scale).max(crel(closed.lambda_minus, numeric.lambda_plus, scale));
        prop_assert!(direct.min(swapped) < 1e-10, "closed {:?} numeric {:?}", closed, numeric);

        let trace = Complex64::new(0.0, -(gx + gy) / 2.0);
        let sum = closed.lambda_plus + closed.lambda_minus;
        prop_assert!(crel(sum, trace, scale.max(trace.norm())) < 1e-10);
    }

    #[test]
    fn balanced_spectrum_is_pt_symmetric(cfg in balanced_config()) {
        let p = derive_parameters(&cfg).unwrap();
        let e = eigenvalues_closed_form(&cfg, &p);
        let scale = e.lambda_plus.norm().max(e.lambda_minus.norm()).max(1e-300);
        // the spectrum as a set is closed under λ → −λ*
        for l in [e.lambda_plus, e.lambda_minus] {
            let image = -l.conj();
            let hit = crel(image, e.lambda_plus, scale).min(crel(image, e.lambda_minus, scale));
            prop_assert!(hit < 1e-10, "{:?}", e);
        }
        prop_assert_ne!(e.phase, levsim::spectrum::PtPhase::NonBalanced);
    }

    #[test]
    fn phase_is_scale_invariant(cfg in balanced_config(), c in 0.1..10.0f64) {
        let p = derive_parameters(&cfg).unwrap();
        let disc = discriminant(&cfg, &p);
        let size = p.gamma_bal.powi(2).max(4.0 * p.beta_x * p.beta_y).max(cfg.gamma_gx.powi(2));
        prop_assume!(disc.abs() > 1e-6 * size);
        prop_assume!(cfg.delta * c <= 0.1);
        let scaled = SystemConfig {
            gamma_gx: cfg.gamma_gx * c,
            gamma_gy: cfg.gamma_gy * c,
            gamma_ay: cfg.gamma_ay * c,
            delta: cfg.delta * c,
            detuning: cfg.detuning.map(|d| d * c),
            ..cfg.clone()
        };
        let q = derive_parameters(&scaled).unwrap();
        prop_assert_eq!(classify_phase(&cfg, &p), classify_phase(&scaled, &q));
    }

    #[test]
    fn interference_terms_cancel_for_equal_couplings(
        beta in -10.0..10.0f64,
        ax in (-5.0..5.0f64, -5.0..5.0f64),
        ay in (-5.0..5.0f64, -5.0..5.0f64),
    ) {
        let cfg = SystemConfig {
            gamma_gx: 0.0,
            gamma_gy: 0.0,
            gamma_ay: 0.0,
            ..base()
        };
        let mut p = derive_parameters(&cfg).unwrap();
        p.beta_x = beta;
        p.beta_y = beta;
        let amps = ModeAmplitudeState::new(0.0, Complex64::new(ax.0, ax.1), Complex64::new(ay.0, ay.1));
        let none = PhononState { t: 0.0, n_x: 0.0, n_y: 0.0 };
        let (dx, dy) = phonon_rhs(&none, &amps, &p, &cfg);
        prop_assert!((dx + dy).abs() <= 1e-12 * dx.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn phonon_numbers_stay_non_negative(
        gc in 0.0..0.5f64,
        dt_diff in 0.0..1.0f64,
        n0 in 0.0..2.0f64,
        delta in 0.0..0.01f64,
    ) {
        let cfg = SystemConfig {
            gamma_cx: gc,
            gamma_cy: gc,
            diffusion_tx: dt_diff,
            diffusion_ty: dt_diff,
            n0,
            delta,
            detuning: Some(0.0),
            ..base()
        };
        let p = derive_parameters(&cfg).unwrap();
        let traj = integrate_coupled(
            &ModeAmplitudeState::initial(&cfg),
            &PhononState::initial(&cfg),
            &cfg,
            &p,
            StepControl::new(5.0, 1e-3).record_every(10),
        ).unwrap();
        prop_assert!(traj.phonons.iter().all(|s| s.n_x >= 0.0 && s.n_y >= 0.0));
    }

    #[test]
    fn g2_at_zero_lag_is_at_least_one(
        series in prop::collection::vec(prop::collection::vec(0.0..10.0f64, 50), 2..6),
        c in 1e-6..1e6f64,
    ) {
        prop_assume!(series.iter().flatten().any(|v| *v > 0.0));
        let taus = [0.0, 0.1, 0.5];
        let g = g2_from_series(&series, 0.1, &taus, 0.2).unwrap();
        prop_assert!(g[0].g2 >= 1.0 - 1e-12);
        // any constant normalisation of the ladder operator cancels
        let scaled: Vec<Vec<f64>> = series.iter().map(|r| r.iter().map(|v| v * c).collect()).collect();
        let h = g2_from_series(&scaled, 0.1, &taus, 0.2).unwrap();
        for (a, b) in g.iter().zip(&h) {
            prop_assert!(rel(a.g2, b.g2) < 1e-12);
        }
    }

    #[test]
    fn psd_bounds_and_weak_coupling_limit(
        frac in 0.3..2.0f64,
        delta in 0.0..1e-3f64,
        mode in prop_oneof![Just(Mode::X), Just(Mode::Y)],
    ) {
        let cfg = levsim::cli::preset("fig9").unwrap().with_delta(delta);
        let p = derive_parameters(&cfg).unwrap();
        let n = MeanPhonons::resolve(&cfg).unwrap();
        let wj = match mode { Mode::X => cfg.omega_x, Mode::Y => cfg.omega_y };
        let omega = frac * wj;
        let budget = noise_budget(&cfg, &p, mode, n.get(mode)).unwrap();
        for form in [ShotNoiseForm::Referred, ShotNoiseForm::Literal] {
            let f = force_psd(omega, &cfg, &p, mode, n, form).unwrap();
            prop_assert!(f.s_s >= 0.0 && f.total >= budget.white_total());
        }
        prop_assert!(position_psd(omega, &cfg, &p, mode, n).unwrap() >= shot_floor(&cfg, &p, mode));

        let weak = cfg.with_delta(1e-12);
        let pw = derive_parameters(&weak).unwrap();
        let chi = susceptibility(omega, &weak, &pw, mode, n).unwrap().chi;
        let gamma = levsim::sensing::effective_damping(&weak, mode, n.get(mode)).unwrap();
        let lorentz = 1.0 / (pw.mass * Complex64::new(wj * wj - omega * omega, omega * gamma));
        prop_assert!(crel(chi, lorentz, lorentz.norm()) < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seeded_runs_are_reproducible(seed in any::<u64>()) {
        let cfg = levsim::cli::preset("fig8").unwrap();
        let (ax, ay) = cfg.initial_amplitudes();
        let init = PhaseSpaceState::from_amplitudes(cfg.q0, ax, ay);
        let ctrl = StepControl::new(0.5, 1e-3).record_every(25);
        prop_assert_eq!(
            simulate_seeded(&init, &cfg, ctrl, seed).unwrap(),
            simulate_seeded(&init, &cfg, ctrl, seed).unwrap()
        );
        let a = ensemble_run(&cfg, &init, 3, ctrl, seed).unwrap();
        let b = ensemble_run(&cfg, &init, 3, ctrl, seed).unwrap();
        prop_assert_eq!(a.mean, b.mean);
        prop_assert_eq!(a.variance.clone(), b.variance);
        prop_assert!(a.variance.iter().flatten().all(|v| *v >= 0.0));
        prop_assert_eq!(a.intensity_x, b.intensity_x);
    }
}
