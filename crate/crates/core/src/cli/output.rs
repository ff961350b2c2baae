//! CSV writers and the JSON run manifest.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::coherence::G2Point;
use crate::dynamics::{ModeAmplitudeState, PhononState};
use crate::error::{Error, Result};
use crate::langevin::EnsembleResult;
use crate::model::SystemConfig;
use crate::sensing::{ForcePsdPoint, SensitivityMinimum};
use crate::spectrum::SweepRow;

/// Everything needed to re-run a job: the resolved config (angular
/// convention), argv, seeds and the files produced.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub argv: Vec<String>,
    pub config: Option<serde_json::Value>,
    pub seeds: Vec<u64>,
    pub version: String,
    pub outputs: Vec<PathBuf>,
    pub duration_s: f64,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        argv: &[String],
        config: Option<&SystemConfig>,
        seeds: Vec<u64>,
        outputs: Vec<PathBuf>,
        duration: Duration,
    ) -> Self {
        Self {
            subcommand: subcommand.to_string(),
            argv: argv.to_vec(),
            config: config.map(SystemConfig::to_document),
            seeds,
            version: env!("CARGO_PKG_VERSION").to_string(),
            outputs,
            duration_s: duration.as_secs_f64(),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn write_csv<R>(path: &Path, header: &[&str], rows: R) -> Result<()>
where
    R: IntoIterator<Item = Vec<String>>,
{
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(err) => Error::io(path, err),
        other => Error::Parse(format!("{other:?}")),
    };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

pub(crate) fn write_eigen_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_csv(
        path,
        &["beta", "re_plus", "im_plus", "re_minus", "im_minus", "phase"],
        rows.iter().map(|r| {
            vec![
                num(r.beta),
                num(r.eigen.lambda_plus.re),
                num(r.eigen.lambda_plus.im),
                num(r.eigen.lambda_minus.re),
                num(r.eigen.lambda_minus.im),
                r.eigen.phase.as_str().to_string(),
            ]
        }),
    )
}

pub(crate) fn write_amplitude_csv(
    path: &Path,
    amplitudes: &[ModeAmplitudeState],
    phonons: Option<&[PhononState]>,
) -> Result<()> {
    let mut header = vec!["t", "re_ax", "im_ax", "re_ay", "im_ay"];
    if phonons.is_some() {
        header.extend(["Nx", "Ny"]);
    }
    write_csv(
        path,
        &header,
        amplitudes.iter().enumerate().map(|(i, s)| {
            let mut row = vec![num(s.t), num(s.a_x.re), num(s.a_x.im), num(s.a_y.re), num(s.a_y.im)];
            if let Some(ph) = phonons {
                row.push(num(ph[i].n_x));
                row.push(num(ph[i].n_y));
            }
            row
        }),
    )
}

pub(crate) fn write_ensemble_csv(path: &Path, ens: &EnsembleResult) -> Result<()> {
    let n = ens.n_traj as f64;
    write_csv(
        path,
        &[
            "t", "mean_qx", "mean_px", "mean_qy", "mean_py", "var_qx", "var_px", "var_qy",
            "var_py", "mean_ix", "mean_iy",
        ],
        (0..ens.times.len()).map(|i| {
            let mut row = vec![num(ens.times[i])];
            row.extend(ens.mean[i].iter().map(|v| num(*v)));
            row.extend(ens.variance[i].iter().map(|v| num(*v)));
            row.push(num(ens.intensity_x.iter().map(|r| r[i]).sum::<f64>() / n));
            row.push(num(ens.intensity_y.iter().map(|r| r[i]).sum::<f64>() / n));
            row
        }),
    )
}

pub(crate) fn write_g2_csv(path: &Path, points: &[G2Point]) -> Result<()> {
    write_csv(
        path,
        &["tau", "g2", "stderr"],
        points.iter().map(|p| vec![num(p.tau), num(p.g2), num(p.stderr)]),
    )
}

pub(crate) fn write_force_csv(path: &Path, rows: &[ForcePsdPoint]) -> Result<()> {
    write_csv(
        path,
        &["omega", "S_T", "S_H", "S_C", "S_s", "total", "sqrt_total"],
        rows.iter().map(|r| {
            vec![
                num(r.omega),
                num(r.s_t),
                num(r.s_h),
                num(r.s_c),
                num(r.s_s),
                num(r.total),
                num(r.sqrt_total()),
            ]
        }),
    )
}

pub(crate) fn write_minima_csv(path: &Path, found: &[SensitivityMinimum]) -> Result<()> {
    write_csv(
        path,
        &["mode", "omega_min", "sensitivity"],
        found
            .iter()
            .map(|m| vec![m.mode.label().to_string(), num(m.omega), num(m.sensitivity)]),
    )
}
