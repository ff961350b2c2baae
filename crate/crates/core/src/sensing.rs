//! Frequency-domain force sensing: coupled-mode susceptibilities, noise
//! budgets, position/force PSDs and sensitivity minima.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{HBAR, K_B};
use crate::dynamics::steady_state_phonons;
use crate::error::{Error, Result};
use crate::model::{derive_parameters, DerivedParams, Mode, SystemConfig};

/// Mean phonon numbers feeding the damping and cooling-noise terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanPhonons {
    pub n_x: f64,
    pub n_y: f64,
}

impl MeanPhonons {
    pub fn new(n_x: f64, n_y: f64) -> Self {
        Self { n_x, n_y }
    }

    pub fn get(&self, mode: Mode) -> f64 {
        match mode {
            Mode::X => self.n_x,
            Mode::Y => self.n_y,
        }
    }

    /// Values fixed in the config, falling back to the uncoupled steady
    /// state of the phonon equation for whichever mode is unset.
    pub fn resolve(config: &SystemConfig) -> Result<Self> {
        let pick = |fixed: Option<f64>, mode| match fixed {
            Some(n) => Ok(n),
            None => steady_state_phonons(config, mode),
        };
        Ok(Self {
            n_x: pick(config.mean_phonons_x, Mode::X)?,
            n_y: pick(config.mean_phonons_y, Mode::Y)?,
        })
    }
}

/// Per-mode rates (γ_g, γ_c, Γ_c, D_t). With `modes_symmetric` both modes
/// share the x-mode values.
fn mode_rates(config: &SystemConfig, mode: Mode) -> (f64, f64, f64, f64) {
    match (mode, config.modes_symmetric) {
        (Mode::X, _) | (Mode::Y, true) => (
            config.gamma_gx,
            config.gamma_cx,
            config.backaction_cx,
            config.diffusion_tx,
        ),
        (Mode::Y, false) => (
            config.gamma_gy,
            config.gamma_cy,
            config.backaction_cy,
            config.diffusion_ty,
        ),
    }
}

fn mode_frequency(config: &SystemConfig, mode: Mode) -> f64 {
    match mode {
        Mode::X => config.omega_x,
        Mode::Y => config.omega_y,
    }
}

/// Γ_j = 2[γ_gj + 12γ_cj(2N_j + 1)].
pub fn effective_damping(config: &SystemConfig, mode: Mode, n: f64) -> Result<f64> {
    if !(n >= 0.0) {
        return Err(Error::out_of_range("mean_phonons", format!("must be >= 0, got {n}")));
    }
    let (gamma_g, gamma_c, _, _) = mode_rates(config, mode);
    Ok(2.0 * (gamma_g + 12.0 * gamma_c * (2.0 * n + 1.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Susceptibility {
    pub mode: Mode,
    pub omega: f64,
    pub chi: Complex64,
}

/// Coupled-mode mechanical susceptibility χ_j(ω) in m/N.
pub fn susceptibility(
    omega: f64,
    config: &SystemConfig,
    params: &DerivedParams,
    mode: Mode,
    phonons: MeanPhonons,
) -> Result<Susceptibility> {
    if !(omega >= 0.0) {
        return Err(Error::out_of_range("omega", format!("must be >= 0, got {omega}")));
    }
    let m = params.mass;
    let other = mode.other();
    let (wj, wv) = (mode_frequency(config, mode), mode_frequency(config, other));
    let gj = effective_damping(config, mode, phonons.get(mode))?;
    let gv = effective_damping(config, other, phonons.get(other))?;
    let eps = 1e-300 * m * wj * wj;

    let bare = m * Complex64::new(wj * wj - omega * omega, omega * gj);
    if bare.norm() < eps {
        return Err(Error::PoleHit { which: "bare", omega });
    }
    let mut numerator = Complex64::new(1.0, 0.0);
    let kd = params.kappa * config.delta;
    if kd != 0.0 {
        for (which, w) in [("A", omega - config.omega_r), ("B", omega + config.omega_r)] {
            let denom = 2.0 * m * Complex64::new(wv * wv - w * w, w * gv);
            if denom.norm() < eps {
                return Err(Error::PoleHit { which, omega });
            }
            numerator += kd / denom;
        }
    }
    Ok(Susceptibility {
        mode,
        omega,
        chi: numerator / bare,
    })
}

/// White force-noise budget of one mode, N²/Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseBudget {
    pub s_t: f64,
    pub s_h: f64,
    pub s_c: f64,
}

impl NoiseBudget {
    pub fn white_total(&self) -> f64 {
        self.s_t + self.s_h + self.s_c
    }
}

pub fn noise_budget(
    config: &SystemConfig,
    params: &DerivedParams,
    mode: Mode,
    n: f64,
) -> Result<NoiseBudget> {
    let (gamma_g, gamma_c, backaction, diffusion) = mode_rates(config, mode);
    let m = params.mass;
    let wj = mode_frequency(config, mode);
    let s_c = if gamma_c > 0.0 {
        36.0 * HBAR * m * wj * (backaction * backaction / gamma_c) * (2.0 * n + 1.0).powi(2)
    } else if backaction == 0.0 {
        0.0
    } else {
        return Err(Error::InvalidCooling { mode: mode.label() });
    };
    Ok(NoiseBudget {
        s_t: 2.0 * m * gamma_g * K_B * config.temperature,
        s_h: HBAR * m * wj * diffusion,
        s_c,
    })
}

/// Flat imprecision floor l_j²/(η²φ) of the position PSD.
pub fn shot_floor(config: &SystemConfig, params: &DerivedParams, mode: Mode) -> f64 {
    let l = match mode {
        Mode::X => params.l_x,
        Mode::Y => params.l_y,
    };
    l * l / (config.eta * config.eta * config.phi)
}

/// Position PSD |χ|²(S_T + S_H + S_C) + l²/(η²φ).
pub fn position_psd(
    omega: f64,
    config: &SystemConfig,
    params: &DerivedParams,
    mode: Mode,
    phonons: MeanPhonons,
) -> Result<f64> {
    let chi = susceptibility(omega, config, params, mode, phonons)?.chi;
    let budget = noise_budget(config, params, mode, phonons.get(mode))?;
    Ok(chi.norm_sqr() * budget.white_total() + shot_floor(config, params, mode))
}

/// How the shot-noise floor is referred to force.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum ShotNoiseForm {
    /// (l²/(η²φ))/|χ_j(ω)|².
    #[default]
    Referred,
    /// S_s0/|χ_j(ω/ω_j)|², evaluated literally.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ForcePsdPoint {
    pub omega: f64,
    pub s_t: f64,
    pub s_h: f64,
    pub s_c: f64,
    pub s_s: f64,
    pub total: f64,
}

impl ForcePsdPoint {
    pub fn sqrt_total(&self) -> f64 {
        self.total.sqrt()
    }
}

pub fn force_psd(
    omega: f64,
    config: &SystemConfig,
    params: &DerivedParams,
    mode: Mode,
    phonons: MeanPhonons,
    form: ShotNoiseForm,
) -> Result<ForcePsdPoint> {
    let budget = noise_budget(config, params, mode, phonons.get(mode))?;
    let s_s = match form {
        ShotNoiseForm::Referred => {
            let chi = susceptibility(omega, config, params, mode, phonons)?.chi;
            shot_floor(config, params, mode) / chi.norm_sqr()
        }
        ShotNoiseForm::Literal => {
            let wj = mode_frequency(config, mode);
            let chi = susceptibility(omega / wj, config, params, mode, phonons)?.chi;
            let s0 = match mode {
                Mode::X => params.s_s0_x,
                Mode::Y => params.s_s0_y,
            };
            s0 / chi.norm_sqr()
        }
    };
    Ok(ForcePsdPoint {
        omega,
        s_t: budget.s_t,
        s_h: budget.s_h,
        s_c: budget.s_c,
        s_s,
        total: budget.white_total() + s_s,
    })
}

/// Force PSD over a grid (evaluated in parallel, returned in grid order).
pub fn force_psd_grid(
    config: &SystemConfig,
    mode: Mode,
    grid: &[f64],
    phonons: MeanPhonons,
    form: ShotNoiseForm,
) -> Result<Vec<ForcePsdPoint>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let params = derive_parameters(config)?;
    grid.par_iter()
        .map(|&w| force_psd(w, config, &params, mode, phonons, form))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SensitivityMinimum {
    pub mode: Mode,
    pub omega: f64,
    /// √(force PSD) at the minimum, N/√Hz.
    pub sensitivity: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MinimaOptions {
    /// Relative ω tolerance of the golden-section refinement.
    pub rel_tol: f64,
    /// A dip is kept when `contrast × value` does not exceed the highest
    /// point within `window_frac·ω` on either side.
    pub contrast: f64,
    pub window_frac: f64,
    pub form: ShotNoiseForm,
}

impl Default for MinimaOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            contrast: 2.0,
            window_frac: 0.01,
            form: ShotNoiseForm::Referred,
        }
    }
}

/// Standard acceptance grid [0.5ω_x, 1.5(ω_y + ω_r)].
pub fn default_minima_grid(config: &SystemConfig, points: usize) -> Vec<f64> {
    crate::spectrum::linspace(
        0.5 * config.omega_x,
        1.5 * (config.omega_y + config.omega_r),
        points,
    )
}

/// Local minima of √(force PSD): grid scan, golden-section refinement,
/// merging of minima closer than one grid cell and a contrast filter that
/// discards shallow ripples.
pub fn find_sensitivity_minima(
    config: &SystemConfig,
    mode: Mode,
    grid: &[f64],
    phonons: MeanPhonons,
    opts: MinimaOptions,
) -> Result<Vec<SensitivityMinimum>> {
    if grid.len() < 3 {
        return Err(Error::EmptyGrid);
    }
    let params = derive_parameters(config)?;
    let eval = |w: f64| -> Result<f64> {
        Ok(force_psd(w, config, &params, mode, phonons, opts.form)?.total.sqrt())
    };
    let values: Vec<f64> = grid.par_iter().map(|&w| eval(w)).collect::<Result<_>>()?;
    let cell = (grid[grid.len() - 1] - grid[0]).abs() / (grid.len() - 1) as f64;

    let mut found: Vec<SensitivityMinimum> = Vec::new();
    for i in 1..grid.len() - 1 {
        // strict on the left so a flat run reports its lowest-ω point
        if !(values[i] < values[i - 1] && values[i] <= values[i + 1]) {
            continue;
        }
        let (omega, value) = golden_section(&eval, grid[i - 1], grid[i + 1], opts.rel_tol)?;
        let (omega, value) = if value <= values[i] { (omega, value) } else { (grid[i], values[i]) };
        let window = opts.window_frac * omega;
        let side_max = |lo: f64, hi: f64| {
            grid.iter()
                .zip(&values)
                .filter(|(w, _)| **w >= lo && **w <= hi)
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max)
        };
        let left = side_max(omega - window, omega);
        let right = side_max(omega, omega + window);
        if opts.contrast * value > left.min(right) {
            continue;
        }
        match found.last_mut() {
            Some(prev) if (omega - prev.omega).abs() <= cell => {
                if value < prev.sensitivity {
                    *prev = SensitivityMinimum { mode, omega, sensitivity: value };
                }
            }
            _ => found.push(SensitivityMinimum { mode, omega, sensitivity: value }),
        }
    }
    Ok(found)
}

fn golden_section<F>(f: &F, mut a: f64, mut b: f64, rel_tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a).abs() <= rel_tol * (a.abs() + b.abs()) / 2.0 {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}
