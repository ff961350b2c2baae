//! Command-line front end: argument parsing, dispatch, CSV output and run
//! manifests. Every frequency flag is angular (rad/s); config files carry
//! their own unit convention.

mod output;
mod presets;
mod repro;

use std::ffi::OsString;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::coherence::{estimate_g2, tau_grid};
use crate::dynamics::{integrate_amplitudes, integrate_coupled, recommended_dt, ModeAmplitudeState, PhononState, StepControl};
use crate::error::{Error, Result};
use crate::langevin::{ensemble_run, LangevinModel, PhaseSpaceState, DEFAULT_WARMUP_FRAC};
use crate::model::{derive_parameters, load_config, Mode, SystemConfig};
use crate::sensing::{default_minima_grid, find_sensitivity_minima, force_psd_grid, MeanPhonons, MinimaOptions, ShotNoiseForm};
use crate::spectrum::{linspace, sweep_coupling};

pub use output::RunManifest;
pub use presets::{preset, PRESET_NAMES};
pub use repro::Figure;

#[derive(Debug, Parser)]
#[command(name = "levsim", version, about = "Coupled-mode levitated nanoparticle simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalue sweep over the coupling strength β.
    Eigen(EigenArgs),
    /// Rotating-frame amplitude dynamics (RK4).
    Simulate(TimeArgs),
    /// Amplitude and phonon-number dynamics (RK4).
    Phonon(PhononArgs),
    /// Stochastic Langevin ensemble statistics.
    Langevin(LangevinArgs),
    /// Second-order coherence g²(τ) from a Langevin ensemble.
    G2(G2Args),
    /// Force-noise PSD and its budget over a frequency grid.
    #[command(name = "force-psd")]
    ForcePsd(ForcePsdArgs),
    /// Local minima of the force sensitivity.
    Minima(MinimaArgs),
    /// Regenerate the data behind one figure from bundled presets.
    Repro(ReproArgs),
}

#[derive(Debug, Args)]
pub struct ConfigArg {
    /// JSON config file.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Debug, Args)]
pub struct EigenArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Smallest coupling β (rad/s).
    #[arg(long, default_value_t = 0.0)]
    pub beta_min: f64,
    /// Largest coupling β (rad/s).
    #[arg(long)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TimeArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// End time (s).
    #[arg(long)]
    pub t_end: f64,
    /// Step (s); defaults to a rate-resolving step.
    #[arg(long)]
    pub dt: Option<f64>,
    /// Keep every n-th step.
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PhononArgs {
    #[command(flatten)]
    pub time: TimeArgs,
    /// Fail if any phonon number had to be clamped at zero.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct EnsembleArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, default_value_t = 100)]
    pub n_traj: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub t_end: f64,
    /// Step (s); defaults to 2π/(128·max ω).
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub record_every: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct LangevinArgs {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
}

#[derive(Debug, Args)]
pub struct G2Args {
    #[command(flatten)]
    pub ensemble: EnsembleArgs,
    #[arg(long, default_value = "x")]
    pub mode: Mode,
    #[arg(long, default_value_t = DEFAULT_WARMUP_FRAC)]
    pub warmup_frac: f64,
    /// Largest delay (s).
    #[arg(long)]
    pub tau_max: f64,
    #[arg(long, default_value_t = 50)]
    pub tau_points: usize,
}

#[derive(Debug, Args)]
pub struct ForcePsdArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[arg(long, default_value = "x")]
    pub mode: Mode,
    /// Lower grid edge (rad/s).
    #[arg(long)]
    pub omega_min: f64,
    /// Upper grid edge (rad/s).
    #[arg(long)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    /// Use the literal S_s0/|χ(ω/ω_j)|² shot-noise form.
    #[arg(long)]
    pub literal_shot: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MinimaArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    /// Restrict to one mode; both by default.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Lower grid edge (rad/s); defaults to 0.5·ω_x.
    #[arg(long)]
    pub omega_min: Option<f64>,
    /// Upper grid edge (rad/s); defaults to 1.5·(ω_y + ω_r).
    #[arg(long)]
    pub omega_max: Option<f64>,
    #[arg(long, default_value_t = 10_000)]
    pub points: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReproArgs {
    /// One of fig2..fig9.
    pub figure: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
}

/// Parses `argv` (including the program name), runs the job and returns
/// the process exit code. Errors are reported as one JSON line on stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    0
                }
                ErrorKind::InvalidSubcommand => {
                    let name = argv.get(1).map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    report(&Error::UnknownSubcommand(name));
                    2
                }
                _ => {
                    let msg = err.to_string();
                    let first = msg.lines().next().unwrap_or("usage error");
                    eprintln!("{}", error_line("Usage", first));
                    2
                }
            };
        }
    };
    configure_threads();
    let args: Vec<String> = argv.iter().map(|s| s.to_string_lossy().into_owned()).collect();
    match dispatch(&cli.command, &args) {
        Ok(_) => 0,
        Err(err) => {
            report(&err);
            if err.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn error_line(kind: &str, message: &str) -> String {
    serde_json::json!({ "error": kind, "message": message }).to_string()
}

fn report(err: &Error) {
    eprintln!("{}", error_line(err.kind(), &err.to_string()));
}

/// Caps the global worker pool at `LEVSIM_THREADS` when set.
fn configure_threads() {
    if let Some(n) = std::env::var("LEVSIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // a pool may already exist when called twice in one process
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs a parsed command and returns its manifest.
pub fn dispatch(command: &Command, argv: &[String]) -> Result<RunManifest> {
    let start = Instant::now();
    let (name, config, seeds, outputs) = match command {
        Command::Eigen(a) => {
            let cfg = load_config(&a.config.config)?;
            if a.points == 0 {
                return Err(Error::EmptyGrid);
            }
            let rows = sweep_coupling(&cfg, &linspace(a.beta_min, a.beta_max, a.points))?;
            output::write_eigen_csv(&a.out, &rows)?;
            ("eigen", Some(cfg), vec![], vec![a.out.clone()])
        }
        Command::Simulate(a) => {
            let cfg = load_config(&a.config.config)?;
            run_simulate(&cfg, a, &a.out)?;
            ("simulate", Some(cfg), vec![], vec![a.out.clone()])
        }
        Command::Phonon(a) => {
            let cfg = load_config(&a.time.config.config)?;
            run_phonon(&cfg, &a.time, a.strict, &a.time.out)?;
            ("phonon", Some(cfg), vec![], vec![a.time.out.clone()])
        }
        Command::Langevin(a) => {
            let e = &a.ensemble;
            let cfg = load_config(&e.config.config)?;
            let ens = run_ensemble(&cfg, e)?;
            output::write_ensemble_csv(&e.out, &ens)?;
            ("langevin", Some(cfg), vec![e.seed], vec![e.out.clone()])
        }
        Command::G2(a) => {
            let e = &a.ensemble;
            let cfg = load_config(&e.config.config)?;
            let ens = run_ensemble(&cfg, e)?;
            let points = estimate_g2(&ens, a.mode, &tau_grid(a.tau_max, a.tau_points), a.warmup_frac)?;
            output::write_g2_csv(&e.out, &points)?;
            ("g2", Some(cfg), vec![e.seed], vec![e.out.clone()])
        }
        Command::ForcePsd(a) => {
            let cfg = load_config(&a.config.config)?;
            if a.points == 0 {
                return Err(Error::EmptyGrid);
            }
            let form = if a.literal_shot { ShotNoiseForm::Literal } else { ShotNoiseForm::Referred };
            let rows = force_psd_grid(
                &cfg,
                a.mode,
                &linspace(a.omega_min, a.omega_max, a.points),
                MeanPhonons::resolve(&cfg)?,
                form,
            )?;
            output::write_force_csv(&a.out, &rows)?;
            ("force-psd", Some(cfg), vec![], vec![a.out.clone()])
        }
        Command::Minima(a) => {
            let cfg = load_config(&a.config.config)?;
            let default = default_minima_grid(&cfg, a.points.max(3));
            let grid = linspace(
                a.omega_min.unwrap_or(default[0]),
                a.omega_max.unwrap_or(default[default.len() - 1]),
                a.points,
            );
            let phonons = MeanPhonons::resolve(&cfg)?;
            let modes = a.mode.map(|m| vec![m]).unwrap_or_else(|| vec![Mode::X, Mode::Y]);
            let mut found = Vec::new();
            for mode in modes {
                found.extend(find_sensitivity_minima(&cfg, mode, &grid, phonons, MinimaOptions::default())?);
            }
            output::write_minima_csv(&a.out, &found)?;
            ("minima", Some(cfg), vec![], vec![a.out.clone()])
        }
        Command::Repro(a) => {
            let figure: Figure = a.figure.parse()?;
            std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::io(&a.out_dir, e))?;
            let artifacts = repro::run(figure, &a.out_dir)?;
            ("repro", Some(artifacts.config), artifacts.seeds, artifacts.outputs)
        }
    };
    let manifest = RunManifest::new(name, argv, config.as_ref(), seeds, outputs, start.elapsed());
    let manifest_path = match command {
        Command::Repro(a) => a.out_dir.join(format!("{}.manifest.json", a.figure)),
        _ => manifest_path_for(&manifest.outputs[0]),
    };
    manifest.write(&manifest_path)?;
    Ok(manifest)
}

/// `out.csv` → `out.csv.manifest.json`.
pub fn manifest_path_for(output: &Path) -> PathBuf {
    let mut name = output.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    output.with_file_name(name)
}

pub(crate) fn run_simulate(cfg: &SystemConfig, a: &TimeArgs, out: &Path) -> Result<()> {
    let params = derive_parameters(cfg)?;
    let dt = a.dt.unwrap_or_else(|| recommended_dt(cfg, &params));
    let ctrl = StepControl::new(a.t_end, dt).record_every(a.record_every);
    let traj = integrate_amplitudes(&ModeAmplitudeState::initial(cfg), cfg, &params, ctrl)?;
    output::write_amplitude_csv(out, &traj, None)
}

pub(crate) fn run_phonon(cfg: &SystemConfig, a: &TimeArgs, strict: bool, out: &Path) -> Result<()> {
    let params = derive_parameters(cfg)?;
    let dt = a.dt.unwrap_or_else(|| recommended_dt(cfg, &params));
    let ctrl = StepControl::new(a.t_end, dt).record_every(a.record_every);
    let traj = integrate_coupled(
        &ModeAmplitudeState::initial(cfg),
        &PhononState::initial(cfg),
        cfg,
        &params,
        ctrl,
    )?;
    if strict && traj.clamp_events > 0 {
        return Err(Error::ClampEvents(traj.clamp_events));
    }
    output::write_amplitude_csv(out, &traj.amplitudes, Some(&traj.phonons))
}

fn run_ensemble(cfg: &SystemConfig, e: &EnsembleArgs) -> Result<crate::langevin::EnsembleResult> {
    let model = LangevinModel::from_config(cfg)?;
    let dt = e.dt.unwrap_or_else(|| model.default_dt());
    let (ax, ay) = cfg.initial_amplitudes();
    ensemble_run(
        cfg,
        &PhaseSpaceState::from_amplitudes(cfg.q0, ax, ay),
        e.n_traj,
        StepControl::new(e.t_end, dt).record_every(e.record_every),
        e.seed,
    )
}
