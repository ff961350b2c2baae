//! Deterministic mean-field dynamics in the rotating frame: slowly varying
//! mode amplitudes, mean phonon numbers, and reconstruction of the
//! carrier-frame positions.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DerivedParams, Mode, PhononDamping, SystemConfig};
use crate::ode::{rk4_step, step_count};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Default carrier oversampling for position reconstruction.
pub const SAMPLES_PER_CARRIER_PERIOD: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeAmplitudeState {
    pub t: f64,
    pub a_x: Complex64,
    pub a_y: Complex64,
}

impl ModeAmplitudeState {
    pub fn new(t: f64, a_x: Complex64, a_y: Complex64) -> Self {
        Self { t, a_x, a_y }
    }

    /// x-seeded (or config-specified) initial state at t = 0.
    pub fn initial(config: &SystemConfig) -> Self {
        let (a_x, a_y) = config.initial_amplitudes();
        Self { t: 0.0, a_x, a_y }
    }

    fn is_finite(&self) -> bool {
        [self.a_x.re, self.a_x.im, self.a_y.re, self.a_y.im]
            .iter()
            .all(|v| v.is_finite())
    }

    fn to_array(self) -> [f64; 4] {
        [self.a_x.re, self.a_x.im, self.a_y.re, self.a_y.im]
    }

    fn from_array(t: f64, y: &[f64]) -> Self {
        Self {
            t,
            a_x: Complex64::new(y[0], y[1]),
            a_y: Complex64::new(y[2], y[3]),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhononState {
    pub t: f64,
    pub n_x: f64,
    pub n_y: f64,
}

impl PhononState {
    pub fn initial(config: &SystemConfig) -> Self {
        Self {
            t: 0.0,
            n_x: config.n0,
            n_y: config.n0,
        }
    }
}

/// Integration grid: `t_end` is tiled by equal steps close to `dt`; every
/// `record_every`-th state (plus the last one) is kept.
#[derive(Clone, Copy, Debug)]
pub struct StepControl {
    pub t_end: f64,
    pub dt: f64,
    pub record_every: usize,
}

impl StepControl {
    pub fn new(t_end: f64, dt: f64) -> Self {
        Self {
            t_end,
            dt,
            record_every: 1,
        }
    }

    pub fn record_every(mut self, stride: usize) -> Self {
        self.record_every = stride.max(1);
        self
    }

    pub(crate) fn validate(&self) -> Result<(usize, f64)> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::out_of_range("dt", format!("must be > 0, got {}", self.dt)));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::out_of_range(
                "t_end",
                format!("must be > 0, got {}", self.t_end),
            ));
        }
        let n = step_count(self.t_end, self.dt);
        Ok((n, self.t_end / n as f64))
    }
}

/// Amplitude-dependent effective damping (Γ_x, Γ_y).
pub fn amplitude_damping(config: &SystemConfig, a_x: Complex64, a_y: Complex64) -> (f64, f64) {
    (
        2.0 * (config.gamma_gx + 24.0 * config.gamma_cx * a_x.norm_sqr()),
        2.0 * (config.gamma_gy - config.gamma_ay + 24.0 * config.gamma_cy * a_y.norm_sqr()),
    )
}

/// Time derivative of the rotating-frame amplitudes.
pub fn amplitude_rhs(
    state: &ModeAmplitudeState,
    params: &DerivedParams,
    config: &SystemConfig,
) -> (Complex64, Complex64) {
    let (gx, gy) = amplitude_damping(config, state.a_x, state.a_y);
    let d = params.detuning;
    let dax = -0.5 * I * Complex64::new(d, -gx) * state.a_x - I * params.beta_x * state.a_y;
    let day = -I * params.beta_y * state.a_x + 0.5 * I * Complex64::new(d, gy) * state.a_y;
    (dax, day)
}

/// Time derivative of the mean phonon numbers, including the coherent
/// exchange terms `iβ_x[a_y* a_x − a_x* a_y]` and its y counterpart.
pub fn phonon_rhs(
    phonons: &PhononState,
    amplitudes: &ModeAmplitudeState,
    params: &DerivedParams,
    config: &SystemConfig,
) -> (f64, f64) {
    let (gx, gy) = match config.phonon_damping {
        PhononDamping::Amplitude => amplitude_damping(config, amplitudes.a_x, amplitudes.a_y),
        PhononDamping::Occupation => (
            2.0 * (config.gamma_gx + 24.0 * config.gamma_cx * phonons.n_x),
            2.0 * (config.gamma_gy - config.gamma_ay + 24.0 * config.gamma_cy * phonons.n_y),
        ),
    };
    let cross = amplitudes.a_y.conj() * amplitudes.a_x;
    // i·β(z − z*) = −2β Im z
    let exchange_x = -2.0 * params.beta_x * cross.im;
    let exchange_y = 2.0 * params.beta_y * cross.im;
    let dnx = -gx * phonons.n_x + (config.diffusion_tx - 6.0 * config.gamma_cx) + exchange_x;
    let dny = -gy * phonons.n_y
        + (config.gamma_ay + config.diffusion_ty - 6.0 * config.gamma_cy)
        + exchange_y;
    (dnx, dny)
}

/// Step size that keeps every rotating-frame rate below 1% per step.
pub fn recommended_dt(config: &SystemConfig, params: &DerivedParams) -> f64 {
    let (a_x, a_y) = config.initial_amplitudes();
    let (gx, gy) = amplitude_damping(config, a_x, a_y);
    let n_scale = match config.phonon_damping {
        PhononDamping::Occupation => config.n0,
        PhononDamping::Amplitude => 0.0,
    };
    let rate = [
        params.beta,
        gx.abs(),
        gy.abs(),
        params.detuning.abs(),
        2.0 * config.gamma_ay,
        48.0 * config.gamma_cx.max(config.gamma_cy) * n_scale,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    if rate > 0.0 {
        0.01 / rate
    } else {
        1e-3
    }
}

/// Fixed-step RK4 trajectory of the amplitude equations.
pub fn integrate_amplitudes(
    initial: &ModeAmplitudeState,
    config: &SystemConfig,
    params: &DerivedParams,
    ctrl: StepControl,
) -> Result<Vec<ModeAmplitudeState>> {
    let (n, h) = ctrl.validate()?;
    let mut rhs = |t: f64, y: &[f64; 4]| {
        let (dx, dy) = amplitude_rhs(&ModeAmplitudeState::from_array(t, y), params, config);
        [dx.re, dx.im, dy.re, dy.im]
    };
    let t0 = initial.t;
    let mut y = initial.to_array();
    let mut out = Vec::with_capacity(n / ctrl.record_every + 2);
    out.push(*initial);
    for k in 0..n {
        let t = t0 + k as f64 * h;
        y = rk4_step(&mut rhs, t, &y, h);
        let state = ModeAmplitudeState::from_array(t0 + (k + 1) as f64 * h, &y);
        if !state.is_finite() {
            return Err(Error::StepTooLarge { step: k + 1, t: state.t });
        }
        if (k + 1) % ctrl.record_every == 0 || k + 1 == n {
            out.push(state);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct CoupledTrajectory {
    pub amplitudes: Vec<ModeAmplitudeState>,
    pub phonons: Vec<PhononState>,
    /// Number of times a phonon component undershot zero and was clamped.
    pub clamp_events: usize,
}

/// Joint RK4 integration of amplitudes and phonon numbers (6 real
/// dimensions) on a shared grid.
pub fn integrate_coupled(
    initial_amplitudes: &ModeAmplitudeState,
    initial_phonons: &PhononState,
    config: &SystemConfig,
    params: &DerivedParams,
    ctrl: StepControl,
) -> Result<CoupledTrajectory> {
    let (n, h) = ctrl.validate()?;
    let mut rhs = |t: f64, y: &[f64; 6]| {
        let amps = ModeAmplitudeState::from_array(t, &y[..4]);
        let ph = PhononState { t, n_x: y[4], n_y: y[5] };
        let (dx, dy) = amplitude_rhs(&amps, params, config);
        let (dnx, dny) = phonon_rhs(&ph, &amps, params, config);
        [dx.re, dx.im, dy.re, dy.im, dnx, dny]
    };
    let t0 = initial_amplitudes.t;
    let a0 = initial_amplitudes.to_array();
    let mut y = [a0[0], a0[1], a0[2], a0[3], initial_phonons.n_x, initial_phonons.n_y];
    let mut traj = CoupledTrajectory {
        amplitudes: vec![*initial_amplitudes],
        phonons: vec![PhononState { t: t0, ..*initial_phonons }],
        clamp_events: 0,
    };
    for k in 0..n {
        let t = t0 + k as f64 * h;
        y = rk4_step(&mut rhs, t, &y, h);
        let t_next = t0 + (k + 1) as f64 * h;
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::StepTooLarge { step: k + 1, t: t_next });
        }
        for v in &mut y[4..] {
            if *v < 0.0 {
                *v = 0.0;
                traj.clamp_events += 1;
            }
        }
        if (k + 1) % ctrl.record_every == 0 || k + 1 == n {
            traj.amplitudes.push(ModeAmplitudeState::from_array(t_next, &y[..4]));
            traj.phonons.push(PhononState { t: t_next, n_x: y[4], n_y: y[5] });
        }
    }
    Ok(traj)
}

/// Uncoupled fixed point of the occupation-damped phonon equation for one
/// mode: the positive root of `48γ_c N² + 2(γ_g − γ_a)N − c = 0`, where
/// `c` is the constant diffusion/heating term.
pub fn steady_state_phonons(config: &SystemConfig, mode: Mode) -> Result<f64> {
    let (gamma_g, gamma_a, gamma_c, diffusion) = match mode {
        Mode::X => (config.gamma_gx, 0.0, config.gamma_cx, config.diffusion_tx),
        Mode::Y => (config.gamma_gy, config.gamma_ay, config.gamma_cy, config.diffusion_ty),
    };
    let source = gamma_a + diffusion - 6.0 * gamma_c;
    let (a, b) = (48.0 * gamma_c, 2.0 * (gamma_g - gamma_a));
    if a > 0.0 {
        // numerically stable positive root of a N² + b N − source = 0
        let disc = (b * b + 4.0 * a * source).max(0.0).sqrt();
        let root = if b >= 0.0 {
            2.0 * source / (b + disc)
        } else {
            (disc - b) / (2.0 * a)
        };
        return Ok(root.max(0.0));
    }
    if b > 0.0 {
        Ok((source / b).max(0.0))
    } else {
        Err(Error::NoSteadyState(format!(
            "mode {} has net linear gain and no nonlinear cooling",
            mode.label()
        )))
    }
}

/// Carrier frequency of each mode in the reconstruction, ω_0 ∓ ω_r/2.
pub fn carrier_frequency(params: &DerivedParams, config: &SystemConfig, mode: Mode) -> f64 {
    match mode {
        Mode::X => params.omega_0 - config.omega_r / 2.0,
        Mode::Y => params.omega_0 + config.omega_r / 2.0,
    }
}

fn amplitude_at(traj: &[ModeAmplitudeState], t: f64, mode: Mode) -> Complex64 {
    let pick = |s: &ModeAmplitudeState| match mode {
        Mode::X => s.a_x,
        Mode::Y => s.a_y,
    };
    let idx = traj.partition_point(|s| s.t <= t);
    if idx == 0 {
        return pick(&traj[0]);
    }
    if idx >= traj.len() {
        return pick(&traj[traj.len() - 1]);
    }
    let (s0, s1) = (&traj[idx - 1], &traj[idx]);
    let w = (t - s0.t) / (s1.t - s0.t);
    pick(s0) * (1.0 - w) + pick(s1) * w
}

/// Q_j(t) = Q_0 Re{a_j(t) exp(iω_c t)} at the requested times, with the
/// amplitude linearly interpolated between trajectory samples.
pub fn reconstruct_position_at(
    trajectory: &[ModeAmplitudeState],
    params: &DerivedParams,
    config: &SystemConfig,
    mode: Mode,
    times: &[f64],
) -> Vec<(f64, f64)> {
    if trajectory.is_empty() {
        return Vec::new();
    }
    let wc = carrier_frequency(params, config, mode);
    times
        .iter()
        .map(|&t| {
            let a = amplitude_at(trajectory, t, mode);
            (t, config.q0 * (a * Complex64::from_polar(1.0, wc * t)).re)
        })
        .collect()
}

/// Reconstructs Q_j over the span of `trajectory`, sampling
/// `samples_per_period` points per carrier period.
pub fn reconstruct_position(
    trajectory: &[ModeAmplitudeState],
    params: &DerivedParams,
    config: &SystemConfig,
    mode: Mode,
    samples_per_period: usize,
) -> Vec<(f64, f64)> {
    let (Some(first), Some(last)) = (trajectory.first(), trajectory.last()) else {
        return Vec::new();
    };
    let wc = carrier_frequency(params, config, mode).abs();
    let times: Vec<f64> = if wc > 0.0 {
        let ds = TAU / (wc * samples_per_period.max(2) as f64);
        let n = ((last.t - first.t) / ds).floor() as usize;
        (0..=n).map(|k| first.t + k as f64 * ds).collect()
    } else {
        trajectory.iter().map(|s| s.t).collect()
    };
    reconstruct_position_at(trajectory, params, config, mode, &times)
}
