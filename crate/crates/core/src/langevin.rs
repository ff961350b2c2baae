//! Quadrature-level stochastic equations of motion, integrated with
//! Euler–Maruyama (Itô), plus seeded ensembles.
//!
//! Each mode draws three independent standard normals per step, in the
//! order thermal, heating (D_t), cooling backaction. Trajectory `k` of an
//! ensemble with master seed `s` uses `ChaCha8Rng::seed_from_u64(s)` on
//! stream `k`, so results do not depend on scheduling.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::constants::{HBAR, K_B};
use crate::dynamics::StepControl;
use crate::error::{Error, Result};
use crate::model::{derive_parameters, Mode, SystemConfig};

/// Default warm-up fraction discarded before stationary statistics.
pub const DEFAULT_WARMUP_FRAC: f64 = 0.2;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct PhaseSpaceState {
    pub t: f64,
    pub q_x: f64,
    pub p_x: f64,
    pub q_y: f64,
    pub p_y: f64,
}

impl PhaseSpaceState {
    /// Phase-space point matching rotating-frame amplitudes with
    /// `Q = q0·Re(a)`, `P = −q0·Im(a)` at t = 0.
    pub fn from_amplitudes(q0: f64, a_x: Complex64, a_y: Complex64) -> Self {
        Self {
            t: 0.0,
            q_x: q0 * a_x.re,
            p_x: -q0 * a_x.im,
            q_y: q0 * a_y.re,
            p_y: -q0 * a_y.im,
        }
    }

    pub fn is_finite(&self) -> bool {
        [self.q_x, self.p_x, self.q_y, self.p_y].iter().all(|v| v.is_finite())
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q_x, self.p_x, self.q_y, self.p_y]
    }

    /// Ladder amplitude a = (Q + iP)/2 of one mode.
    pub fn amplitude(&self, mode: Mode) -> Complex64 {
        match mode {
            Mode::X => Complex64::new(self.q_x, self.p_x) / 2.0,
            Mode::Y => Complex64::new(self.q_y, self.p_y) / 2.0,
        }
    }

    pub fn intensity(&self, mode: Mode) -> f64 {
        self.amplitude(mode).norm_sqr()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NoiseChannels {
    pub sigma_t_x: f64,
    pub sigma_t_y: f64,
    pub sigma_fa_x: f64,
    pub sigma_fa_y: f64,
    /// 12·√(Γ_c²/γ_c); multiplies Q² in the backaction channel.
    pub cooling_x: f64,
    pub cooling_y: f64,
}

impl NoiseChannels {
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let thermal = |gamma_g: f64, omega: f64| {
            (2.0 * K_B * config.temperature * gamma_g / (HBAR * omega)).sqrt()
        };
        let cooling = |gamma_c: f64, backaction: f64, mode: char| {
            if gamma_c > 0.0 {
                Ok(12.0 * (backaction * backaction / gamma_c).sqrt())
            } else if backaction == 0.0 {
                Ok(0.0)
            } else {
                Err(Error::InvalidCooling { mode })
            }
        };
        Ok(Self {
            sigma_t_x: thermal(config.gamma_gx, config.omega_x),
            sigma_t_y: thermal(config.gamma_gy, config.omega_y),
            sigma_fa_x: config.diffusion_tx.sqrt(),
            sigma_fa_y: config.diffusion_ty.sqrt(),
            cooling_x: cooling(config.gamma_cx, config.backaction_cx, 'x')?,
            cooling_y: cooling(config.gamma_cy, config.backaction_cy, 'y')?,
        })
    }

    pub fn silent() -> Self {
        Self {
            sigma_t_x: 0.0,
            sigma_t_y: 0.0,
            sigma_fa_x: 0.0,
            sigma_fa_y: 0.0,
            cooling_x: 0.0,
            cooling_y: 0.0,
        }
    }
}

/// Coefficients of the Langevin drift, precomputed from a config.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LangevinModel {
    pub omega_x: f64,
    pub omega_y: f64,
    pub omega_r: f64,
    /// Linear damping coefficients: γ_gx and γ_gy − γ_ay.
    pub damping_x: f64,
    pub damping_y: f64,
    pub gamma_cx: f64,
    pub gamma_cy: f64,
    /// κδ/(m√(ω_x ω_y)).
    pub coupling: f64,
    pub noise: NoiseChannels,
}

impl LangevinModel {
    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        let params = derive_parameters(config)?;
        Ok(Self {
            omega_x: config.omega_x,
            omega_y: config.omega_y,
            omega_r: config.omega_r,
            damping_x: config.gamma_gx,
            damping_y: config.gamma_gy - config.gamma_ay,
            gamma_cx: config.gamma_cx,
            gamma_cy: config.gamma_cy,
            coupling: params.langevin_coupling(config),
            noise: NoiseChannels::from_config(config)?,
        })
    }

    pub fn without_noise(mut self) -> Self {
        self.noise = NoiseChannels::silent();
        self
    }

    /// Largest step that still resolves the faster carrier (64 points per period).
    pub fn max_dt(&self) -> f64 {
        TAU / (64.0 * self.omega_x.max(self.omega_y))
    }

    /// Default step: 128 points per period of the faster carrier.
    pub fn default_dt(&self) -> f64 {
        TAU / (128.0 * self.omega_x.max(self.omega_y))
    }

    fn check_dt(&self, dt: f64) -> Result<()> {
        let limit = self.max_dt();
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::out_of_range(
                "dt",
                format!("must be in (0, {limit:e}] to resolve the carrier, got {dt:e}"),
            ));
        }
        Ok(())
    }
}

/// One Euler–Maruyama step. `draws` holds the standard normals
/// `[ξ_Tx, ξ_Fax, ξ_Fcx, ξ_Ty, ξ_Fay, ξ_Fcy]`.
pub fn langevin_step(
    state: &PhaseSpaceState,
    model: &LangevinModel,
    dt: f64,
    draws: &[f64; 6],
) -> Result<PhaseSpaceState> {
    let m = model;
    let (qx, px, qy, py) = (state.q_x, state.p_x, state.q_y, state.p_y);
    let drive = m.coupling * (m.omega_r * state.t).cos();
    let fx = -m.omega_x * qx - 2.0 * (m.damping_x + 24.0 * m.gamma_cx * qx * qx) * px - drive * qy;
    let fy = -m.omega_y * qy - 2.0 * (m.damping_y + 24.0 * m.gamma_cy * qy * qy) * py - drive * qx;
    let sq = dt.sqrt();
    let n = &m.noise;
    let kick_x = (n.sigma_t_x * draws[0] + n.sigma_fa_x * draws[1] + n.cooling_x * qx * qx * draws[2]) * sq;
    let kick_y = (n.sigma_t_y * draws[3] + n.sigma_fa_y * draws[4] + n.cooling_y * qy * qy * draws[5]) * sq;
    let next = PhaseSpaceState {
        t: state.t + dt,
        q_x: qx + m.omega_x * px * dt,
        p_x: px + fx * dt + kick_x,
        q_y: qy + m.omega_y * py * dt,
        p_y: py + fy * dt + kick_y,
    };
    if next.is_finite() {
        Ok(next)
    } else {
        Err(Error::NonFinite { step: 0, trajectory: None })
    }
}

/// RNG for trajectory `stream` of an ensemble seeded with `master`.
pub fn trajectory_rng(master: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(stream);
    rng
}

/// Integrates one trajectory, recording every `ctrl.record_every`-th state
/// (the initial state is always recorded).
pub fn simulate_trajectory(
    initial: &PhaseSpaceState,
    model: &LangevinModel,
    ctrl: StepControl,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<PhaseSpaceState>> {
    let (n, h) = ctrl.validate()?;
    model.check_dt(h)?;
    let silent = model.noise == NoiseChannels::silent();
    let mut out = Vec::with_capacity(n / ctrl.record_every + 1);
    let mut state = *initial;
    out.push(state);
    let mut draws = [0.0; 6];
    for k in 0..n {
        if !silent {
            for d in &mut draws {
                *d = StandardNormal.sample(rng);
            }
        }
        let t = initial.t + k as f64 * h;
        state.t = t;
        state = langevin_step(&state, model, h, &draws).map_err(|_| Error::NonFinite {
            step: k + 1,
            trajectory: None,
        })?;
        // keep the time grid exact rather than accumulating rounding
        state.t = initial.t + (k + 1) as f64 * h;
        if (k + 1) % ctrl.record_every == 0 {
            out.push(state);
        }
    }
    Ok(out)
}

/// Convenience wrapper: seeded single trajectory on stream 0.
pub fn simulate_seeded(
    initial: &PhaseSpaceState,
    config: &SystemConfig,
    ctrl: StepControl,
    seed: u64,
) -> Result<Vec<PhaseSpaceState>> {
    let model = LangevinModel::from_config(config)?;
    simulate_trajectory(initial, &model, ctrl, &mut trajectory_rng(seed, 0))
}

#[derive(Clone, Debug, Serialize)]
pub struct EnsembleResult {
    pub times: Vec<f64>,
    /// Ensemble means of (Q_x, P_x, Q_y, P_y) at each recorded time.
    pub mean: Vec<[f64; 4]>,
    /// Unbiased ensemble variances, same layout as `mean`.
    pub variance: Vec<[f64; 4]>,
    /// `intensity_x[k][i]` = |a_x|² of trajectory k at time i.
    pub intensity_x: Vec<Vec<f64>>,
    pub intensity_y: Vec<Vec<f64>>,
    pub n_traj: usize,
    pub seed: u64,
    pub dt: f64,
    pub record_interval: f64,
}

impl EnsembleResult {
    pub fn intensity(&self, mode: Mode) -> &[Vec<f64>] {
        match mode {
            Mode::X => &self.intensity_x,
            Mode::Y => &self.intensity_y,
        }
    }

    /// Mean over the stationary window (after `warmup_frac`) of the
    /// ensemble variance of one quadrature (0 = Q_x, 1 = P_x, 2 = Q_y, 3 = P_y).
    pub fn stationary_variance(&self, component: usize, warmup_frac: f64) -> f64 {
        let start = warmup_index(self.times.len(), warmup_frac);
        let window = &self.variance[start..];
        window.iter().map(|v| v[component]).sum::<f64>() / window.len().max(1) as f64
    }
}

pub(crate) fn warmup_index(len: usize, warmup_frac: f64) -> usize {
    ((len as f64 * warmup_frac.clamp(0.0, 1.0)).floor() as usize).min(len.saturating_sub(1))
}

/// Runs `n_traj` independent trajectories in parallel from `initial`.
pub fn ensemble_run(
    config: &SystemConfig,
    initial: &PhaseSpaceState,
    n_traj: usize,
    ctrl: StepControl,
    master_seed: u64,
) -> Result<EnsembleResult> {
    let model = LangevinModel::from_config(config)?;
    ensemble_run_model(&model, initial, n_traj, ctrl, master_seed)
}

pub fn ensemble_run_model(
    model: &LangevinModel,
    initial: &PhaseSpaceState,
    n_traj: usize,
    ctrl: StepControl,
    master_seed: u64,
) -> Result<EnsembleResult> {
    if n_traj < 2 {
        return Err(Error::out_of_range(
            "n_traj",
            format!("ensemble needs at least 2 trajectories, got {n_traj}"),
        ));
    }
    let (_, h) = ctrl.validate()?;
    model.check_dt(h)?;
    let runs: Vec<Vec<PhaseSpaceState>> = (0..n_traj)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(master_seed, k as u64);
            simulate_trajectory(initial, model, ctrl, &mut rng).map_err(|e| match e {
                Error::NonFinite { step, .. } => Error::NonFinite { step, trajectory: Some(k) },
                other => other,
            })
        })
        .collect::<Result<_>>()?;

    let len = runs[0].len();
    let mut sum = vec![[0.0; 4]; len];
    let mut sum_sq = vec![[0.0; 4]; len];
    // Sequential reduction in trajectory order keeps the result bit-exact.
    for run in &runs {
        for (i, s) in run.iter().enumerate() {
            for (c, v) in s.as_array().into_iter().enumerate() {
                sum[i][c] += v;
                sum_sq[i][c] += v * v;
            }
        }
    }
    let nf = n_traj as f64;
    let mean: Vec<[f64; 4]> = sum.iter().map(|s| s.map(|v| v / nf)).collect();
    let variance = sum_sq
        .iter()
        .zip(&mean)
        .map(|(sq, mu)| {
            let mut var = [0.0; 4];
            for c in 0..4 {
                var[c] = ((sq[c] - nf * mu[c] * mu[c]) / (nf - 1.0)).max(0.0);
            }
            var
        })
        .collect();
    let intensity = |mode| -> Vec<Vec<f64>> {
        runs.iter()
            .map(|run| run.iter().map(|s| s.intensity(mode)).collect())
            .collect()
    };
    Ok(EnsembleResult {
        times: runs[0].iter().map(|s| s.t).collect(),
        mean,
        variance,
        intensity_x: intensity(Mode::X),
        intensity_y: intensity(Mode::Y),
        n_traj,
        seed: master_seed,
        dt: h,
        record_interval: h * ctrl.record_every as f64,
    })
}

/// Stationary momentum variance σ_T²/(4γ) of a thermal-only linear mode.
pub fn ou_momentum_variance(sigma: f64, gamma: f64) -> f64 {
    sigma * sigma / (4.0 * gamma)
}
