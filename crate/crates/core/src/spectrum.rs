//! Non-Hermitian two-mode Hamiltonian, its eigenvalues and PT-phase
//! classification.
//!
//! The reported eigenvalues are those of
//!
//! ```text
//! H = [ (Δ − iΓ_x)/2      β_x        ]
//!     [ β_y             −(Δ + iΓ_y)/2 ]
//! ```
//!
//! For Δ = 0 in the linear regime they equal
//! `(−iΓ ± √(−Γ² + 4(β² + γ_gx(γ_gy − γ_ay))))/2`, i.e. half of the
//! commonly quoted closed form. Phase boundaries are unaffected by the
//! overall factor.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{derive_parameters, DerivedParams, SystemConfig};

const EP_REL_TOL: f64 = 1e-9;
const BALANCE_REL_TOL: f64 = 1e-9;
/// Floor of the EP tolerance scale.
const EP_SCALE_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexMatrix2 {
    pub h11: Complex64,
    pub h12: Complex64,
    pub h21: Complex64,
    pub h22: Complex64,
}

impl ComplexMatrix2 {
    pub fn trace(&self) -> Complex64 {
        self.h11 + self.h22
    }

    pub fn det(&self) -> Complex64 {
        self.h11 * self.h22 - self.h12 * self.h21
    }

    pub fn is_finite(&self) -> bool {
        [self.h11, self.h12, self.h21, self.h22]
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.h11 * v[0] + self.h12 * v[1],
            self.h21 * v[0] + self.h22 * v[1],
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PtPhase {
    PTSymmetric,
    ExceptionalPoint,
    PTBroken,
    NonBalanced,
}

impl PtPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            PtPhase::PTSymmetric => "PTSymmetric",
            PtPhase::ExceptionalPoint => "ExceptionalPoint",
            PtPhase::PTBroken => "PTBroken",
            PtPhase::NonBalanced => "NonBalanced",
        }
    }
}

impl std::fmt::Display for PtPhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenPair {
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub phase: PtPhase,
}

/// H for the given effective damping pair (Γ_x, Γ_y).
pub fn build_hamiltonian(params: &DerivedParams, gamma_x: f64, gamma_y: f64) -> ComplexMatrix2 {
    let d = params.detuning;
    ComplexMatrix2 {
        h11: Complex64::new(d, -gamma_x) / 2.0,
        h12: Complex64::new(params.beta_x, 0.0),
        h21: Complex64::new(params.beta_y, 0.0),
        h22: -Complex64::new(d, gamma_y) / 2.0,
    }
}

/// Orders a pair by descending real part, ties by descending imaginary part.
fn ordered(a: Complex64, b: Complex64) -> (Complex64, Complex64) {
    let scale = a.norm().max(b.norm());
    let tie = (a.re - b.re).abs() <= 1e-12 * scale;
    let a_first = if tie { a.im >= b.im } else { a.re > b.re };
    if a_first {
        (a, b)
    } else {
        (b, a)
    }
}

/// PT-phase label from the linear-regime discriminant
/// `−Γ² + 4(β² + γ_gx(γ_gy − γ_ay))` and the gain/loss balance.
pub fn classify_phase(config: &SystemConfig, params: &DerivedParams) -> PtPhase {
    let gamma = params.gamma_bal;
    let scale = config.gamma_gx + config.gamma_gy + config.gamma_ay;
    if gamma.abs() > BALANCE_REL_TOL * scale {
        return PtPhase::NonBalanced;
    }
    let beta_sq = params.beta_x * params.beta_y;
    let disc = discriminant(config, params);
    let tol = EP_REL_TOL * (gamma * gamma).max(4.0 * beta_sq).max(EP_SCALE_FLOOR);
    if disc.abs() < tol {
        PtPhase::ExceptionalPoint
    } else if disc > 0.0 {
        PtPhase::PTSymmetric
    } else {
        PtPhase::PTBroken
    }
}

/// `−Γ² + 4(β² + γ_gx(γ_gy − γ_ay))`.
pub fn discriminant(config: &SystemConfig, params: &DerivedParams) -> f64 {
    let gamma = params.gamma_bal;
    let beta_sq = params.beta_x * params.beta_y;
    -gamma * gamma + 4.0 * (beta_sq + config.gamma_gx * (config.gamma_gy - config.gamma_ay))
}

/// Closed-form eigenvalues of H in the linear regime (γ_c = 0).
pub fn eigenvalues_closed_form(config: &SystemConfig, params: &DerivedParams) -> EigenPair {
    let gamma = params.gamma_bal;
    let d = params.detuning;
    let gain_y = config.gamma_gy - config.gamma_ay;
    // Δ enters as Δ² + 2iΔ(γ_gy − γ_ay − γ_gx); it vanishes for Δ = 0.
    let radicand = Complex64::new(
        discriminant(config, params) + d * d,
        2.0 * d * (gain_y - config.gamma_gx),
    );
    let root = radicand.sqrt();
    let centre = Complex64::new(0.0, -gamma);
    let (lambda_plus, lambda_minus) = ordered((centre + root) / 2.0, (centre - root) / 2.0);
    EigenPair {
        lambda_plus,
        lambda_minus,
        phase: classify_phase(config, params),
    }
}

/// Eigenvalues of an arbitrary 2×2 complex matrix from its characteristic
/// polynomial, written as `tr/2 ± √(((h11 − h22)/2)² + h12 h21)` to avoid
/// cancellation between tr² and 4 det.
pub fn eigenvalues_numeric(h: &ComplexMatrix2) -> EigenPair {
    let half_tr = h.trace() / 2.0;
    let half_diff = (h.h11 - h.h22) / 2.0;
    let off = h.h12 * h.h21;
    let disc = half_diff * half_diff + off;
    let root = disc.sqrt();
    let (lambda_plus, lambda_minus) = ordered(half_tr + root, half_tr - root);

    let diag_scale = h.h11.norm() + h.h22.norm();
    let phase = if half_tr.im.abs() > BALANCE_REL_TOL * diag_scale
        || half_tr.re.abs() > BALANCE_REL_TOL * diag_scale
    {
        PtPhase::NonBalanced
    } else {
        let tol = EP_REL_TOL
            * (4.0 * half_diff.norm_sqr())
                .max(4.0 * off.norm())
                .max(EP_SCALE_FLOOR);
        let d4 = 4.0 * disc;
        if d4.norm() < tol {
            PtPhase::ExceptionalPoint
        } else if d4.re > 0.0 {
            PtPhase::PTSymmetric
        } else {
            PtPhase::PTBroken
        }
    };
    EigenPair {
        lambda_plus,
        lambda_minus,
        phase,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub beta: f64,
    pub eigen: EigenPair,
}

/// Config whose coupling angle produces `beta`, δ = β/ω_1.
pub fn config_for_beta(config: &SystemConfig, beta: f64) -> Result<(SystemConfig, DerivedParams)> {
    let base = derive_parameters(&config.with_delta(0.0))?;
    if base.omega_1 == 0.0 {
        return Err(Error::DegenerateTrap);
    }
    let cfg = config.with_delta(beta / base.omega_1.abs());
    let params = derive_parameters(&cfg)?;
    Ok((cfg, params))
}

/// Eigenvalues along a grid of coupling strengths. The grid is sorted into
/// ascending order before evaluation; duplicates are kept.
pub fn sweep_coupling(config: &SystemConfig, beta_grid: &[f64]) -> Result<Vec<SweepRow>> {
    if beta_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut grid = beta_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.into_iter()
        .map(|beta| {
            let (cfg, params) = config_for_beta(config, beta)?;
            Ok(SweepRow {
                beta,
                eigen: eigenvalues_closed_form(&cfg, &params),
            })
        })
        .collect()
}

/// Locates the exceptional point between `lo` and `hi` by bisection on the
/// sign of the discriminant, to relative tolerance `rel_tol` in β.
pub fn locate_exceptional_point(
    config: &SystemConfig,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let disc_at = |beta: f64| -> Result<f64> {
        let (cfg, params) = config_for_beta(config, beta)?;
        Ok(discriminant(&cfg, &params))
    };
    let (d_lo, d_hi) = (disc_at(lo)?, disc_at(hi)?);
    if d_lo.signum() == d_hi.signum() {
        return Err(Error::InsufficientData(format!(
            "no discriminant sign change in [{lo}, {hi}]"
        )));
    }
    let rising = d_hi > d_lo;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * mid.abs() {
            break;
        }
        if (disc_at(mid)? > 0.0) == rising {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `n` evenly spaced points on [lo, hi] (inclusive).
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tests::base_config;

    fn balanced(beta: f64) -> (SystemConfig, DerivedParams) {
        config_for_beta(&base_config(), beta).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn zero_matrix_when_everything_vanishes() {
        let mut cfg = base_config();
        cfg.gamma_gx = 0.0;
        cfg.gamma_gy = 0.0;
        cfg.gamma_ay = 0.0;
        cfg.delta = 0.0;
        let p = derive_parameters(&cfg).unwrap();
        let (gx, gy) = DerivedParams::linear_damping(&cfg);
        let h = build_hamiltonian(&p, gx, gy);
        assert_eq!(h.h11, Complex64::new(0.0, 0.0));
        assert_eq!(h.h12, Complex64::new(0.0, 0.0));
        assert_eq!(h.h21, Complex64::new(0.0, 0.0));
        assert_eq!(h.h22, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn balanced_gain_loss_diagonal_is_antisymmetric() {
        let cfg = base_config();
        let p = derive_parameters(&cfg).unwrap();
        let (gx, gy) = DerivedParams::linear_damping(&cfg);
        let h = build_hamiltonian(&p, gx, gy);
        assert!(close(h.h11, Complex64::new(0.0, -cfg.gamma_gx), 1e-15));
        assert!(close(h.h22, Complex64::new(0.0, cfg.gamma_gx), 1e-15));
        assert_eq!(h.h12.re, p.beta_x);
        assert_eq!(h.h21.re, p.beta_y);
    }

    #[test]
    fn unbroken_phase_has_real_spectrum() {
        let gamma = 0.06;
        let beta = 2.0 * gamma;
        let (cfg, p) = balanced(beta);
        let e = eigenvalues_closed_form(&cfg, &p);
        let expect = (beta * beta - gamma * gamma).sqrt();
        assert_eq!(e.phase, PtPhase::PTSymmetric);
        assert!(close(e.lambda_plus, Complex64::new(expect, 0.0), 1e-12));
        assert!(close(e.lambda_minus, Complex64::new(-expect, 0.0), 1e-12));
    }

    #[test]
    fn exceptional_point_at_beta_equals_gamma() {
        let (cfg, p) = balanced(0.06);
        let e = eigenvalues_closed_form(&cfg, &p);
        assert_eq!(e.phase, PtPhase::ExceptionalPoint);
        assert!(e.lambda_plus.norm() < 1e-6);
        assert!(e.lambda_minus.norm() < 1e-6);
        let (gx, gy) = DerivedParams::linear_damping(&cfg);
        let n = eigenvalues_numeric(&build_hamiltonian(&p, gx, gy));
        assert!(n.lambda_plus.norm() < 1e-6 && n.lambda_minus.norm() < 1e-6);
    }

    #[test]
    fn uncoupled_balanced_pair_is_imaginary() {
        let (cfg, p) = balanced(0.0);
        let e = eigenvalues_closed_form(&cfg, &p);
        assert_eq!(e.phase, PtPhase::PTBroken);
        assert!(close(e.lambda_plus, Complex64::new(0.0, 0.06), 1e-15));
        assert!(close(e.lambda_minus, Complex64::new(0.0, -0.06), 1e-15));
    }

    #[test]
    fn numeric_diagonal_and_defective() {
        let z = Complex64::new(0.0, 0.0);
        let a = Complex64::new(2.0, 1.0);
        let b = Complex64::new(-1.0, 3.0);
        let e = eigenvalues_numeric(&ComplexMatrix2 { h11: b, h12: z, h21: z, h22: a });
        assert!(close(e.lambda_plus, a, 1e-15) && close(e.lambda_minus, b, 1e-15));

        // Jordan block: eigenvalue 0.5 with multiplicity 2
        let c = Complex64::new(0.5, 0.0);
        let j = ComplexMatrix2 { h11: c, h12: Complex64::new(1.0, 0.0), h21: z, h22: c };
        let e = eigenvalues_numeric(&j);
        assert_eq!(e.lambda_plus, e.lambda_minus);
        assert_eq!(e.lambda_plus, c);
    }

    #[test]
    fn numeric_matches_closed_form_at_twice_gamma() {
        let (cfg, p) = balanced(0.12);
        let (gx, gy) = DerivedParams::linear_damping(&cfg);
        let c = eigenvalues_closed_form(&cfg, &p);
        let n = eigenvalues_numeric(&build_hamiltonian(&p, gx, gy));
        let scale = c.lambda_plus.norm();
        assert!(close(c.lambda_plus, n.lambda_plus, 1e-10 * scale));
        assert!(close(c.lambda_minus, n.lambda_minus, 1e-10 * scale));
        assert_eq!(c.phase, n.phase);
    }

    #[test]
    fn detuned_closed_form_matches_numeric() {
        let mut cfg = base_config();
        cfg.detuning = Some(0.3);
        cfg.gamma_ay = 0.05;
        let p = derive_parameters(&cfg).unwrap();
        let (gx, gy) = DerivedParams::linear_damping(&cfg);
        let c = eigenvalues_closed_form(&cfg, &p);
        let n = eigenvalues_numeric(&build_hamiltonian(&p, gx, gy));
        assert!(close(c.lambda_plus, n.lambda_plus, 1e-10 * c.lambda_plus.norm()));
        assert!(close(c.lambda_minus, n.lambda_minus, 1e-10 * c.lambda_plus.norm()));
        assert_eq!(c.phase, PtPhase::NonBalanced);
    }

    #[test]
    fn sweep_straddling_gamma_changes_phase() {
        let rows = sweep_coupling(&base_config(), &[0.0, 0.03, 0.06, 0.09, 0.12]).unwrap();
        let phases: Vec<_> = rows.iter().map(|r| r.eigen.phase).collect();
        assert_eq!(
            phases,
            vec![
                PtPhase::PTBroken,
                PtPhase::PTBroken,
                PtPhase::ExceptionalPoint,
                PtPhase::PTSymmetric,
                PtPhase::PTSymmetric
            ]
        );
    }

    #[test]
    fn sweep_single_zero_point() {
        let rows = sweep_coupling(&base_config(), &[0.0]).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].eigen.phase, PtPhase::PTBroken);
        assert!((rows[0].eigen.lambda_plus.im - 0.06).abs() < 1e-15);
        assert!((rows[0].eigen.lambda_minus.im + 0.06).abs() < 1e-15);
    }

    #[test]
    fn sweep_sorts_and_rejects_empty() {
        assert!(matches!(sweep_coupling(&base_config(), &[]), Err(Error::EmptyGrid)));
        let rows = sweep_coupling(&base_config(), &[0.1, 0.05, 0.0]).unwrap();
        let betas: Vec<_> = rows.iter().map(|r| r.beta).collect();
        assert_eq!(betas, vec![0.0, 0.05, 0.1]);
    }

    #[test]
    fn bisection_finds_ep() {
        let ep = locate_exceptional_point(&base_config(), 0.0, 0.12, 1e-12).unwrap();
        assert!((ep - 0.06).abs() < 1e-10);
    }
}
