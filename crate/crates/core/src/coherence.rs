//! Classical second-order coherence estimator.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::langevin::{warmup_index, EnsembleResult};
use crate::model::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct G2Point {
    pub tau: f64,
    pub g2: f64,
    pub stderr: f64,
}

/// Maximum number of trajectory batches used for the standard error.
const MAX_BATCHES: usize = 20;

/// g²(τ) = ⟨I(t)I(t+τ)⟩ / (⟨I(t)⟩⟨I(t+τ)⟩), averaged jointly over the
/// ensemble and the stationary window that follows the warm-up fraction.
/// Lags are rounded to the ensemble's record interval. The standard error
/// comes from batch means over groups of trajectories.
pub fn estimate_g2(
    ensemble: &EnsembleResult,
    mode: Mode,
    tau_grid: &[f64],
    warmup_frac: f64,
) -> Result<Vec<G2Point>> {
    g2_from_series(
        ensemble.intensity(mode),
        ensemble.record_interval,
        tau_grid,
        warmup_frac,
    )
}

/// Same estimator on raw per-trajectory intensity series sampled every
/// `interval` seconds.
pub fn g2_from_series(
    series: &[Vec<f64>],
    interval: f64,
    tau_grid: &[f64],
    warmup_frac: f64,
) -> Result<Vec<G2Point>> {
    if tau_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let Some(first) = series.first() else {
        return Err(Error::InsufficientData("no trajectories".into()));
    };
    let start = warmup_index(first.len(), warmup_frac);
    let window = first.len() - start;
    let tau_max = tau_grid.iter().cloned().fold(0.0, f64::max);
    let max_lag = (tau_max / interval).round() as usize;
    if tau_grid.iter().any(|t| *t < 0.0 || !t.is_finite()) {
        return Err(Error::out_of_range("tau", "lags must be finite and >= 0"));
    }
    if max_lag >= window {
        return Err(Error::InsufficientData(format!(
            "stationary window {:.6e} s is shorter than tau_max {:.6e} s",
            window as f64 * interval,
            tau_max
        )));
    }
    let n_batches = series.len().min(MAX_BATCHES);

    Ok(tau_grid
        .iter()
        .map(|&tau| {
            let lag = (tau / interval).round() as usize;
            let pairs = window - lag;
            // per-batch sums of I_t·I_{t+τ}, I_t, I_{t+τ}
            let mut batches = vec![[0.0f64; 3]; n_batches];
            for (k, run) in series.iter().enumerate() {
                let b = &mut batches[k * n_batches / series.len()];
                let seg = &run[start..];
                for i in 0..pairs {
                    b[0] += seg[i] * seg[i + lag];
                    b[1] += seg[i];
                    b[2] += seg[i + lag];
                }
            }
            let ratio = |s: &[f64; 3], count: f64| {
                let denom = (s[1] / count) * (s[2] / count);
                if denom > 0.0 {
                    (s[0] / count) / denom
                } else {
                    f64::NAN
                }
            };
            let mut total = [0.0; 3];
            for b in &batches {
                for c in 0..3 {
                    total[c] += b[c];
                }
            }
            let g2 = ratio(&total, (series.len() * pairs) as f64);
            let stderr = if n_batches > 1 {
                let values: Vec<f64> = batches
                    .iter()
                    .enumerate()
                    .map(|(j, b)| {
                        let members = (0..series.len())
                            .filter(|k| k * n_batches / series.len() == j)
                            .count();
                        ratio(b, (members * pairs) as f64)
                    })
                    .collect();
                let mean = values.iter().sum::<f64>() / n_batches as f64;
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
                    / (n_batches - 1) as f64;
                (var / n_batches as f64).sqrt()
            } else {
                f64::NAN
            };
            G2Point {
                tau: lag as f64 * interval,
                g2,
                stderr,
            }
        })
        .collect())
}

/// Evenly spaced lags 0, Δ, …, τ_max.
pub fn tau_grid(tau_max: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|k| tau_max * k as f64 / (n - 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::StepControl;
    use crate::langevin::{ensemble_run, tests::thermal_config, PhaseSpaceState};

    #[test]
    fn constant_intensity_gives_exactly_one() {
        let series = vec![vec![3.0; 50]; 4];
        let out = g2_from_series(&series, 0.1, &[0.0, 1.0, 2.0], 0.2).unwrap();
        for p in out {
            assert_eq!(p.g2, 1.0);
            assert!(p.stderr.abs() < 1e-15);
        }
    }

    #[test]
    fn too_long_lag_is_insufficient_data() {
        let series = vec![vec![1.0; 10]; 2];
        let err = g2_from_series(&series, 1.0, &[9.0], 0.2).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }

    #[test]
    fn amplitude_normalisation_cancels() {
        let series: Vec<Vec<f64>> = (0..6)
            .map(|k| (0..80).map(|i| 1.0 + ((i * (k + 3)) as f64 * 0.37).sin().powi(2)).collect())
            .collect();
        // scaling a by c scales I by c²
        let scaled: Vec<Vec<f64>> = series.iter().map(|r| r.iter().map(|v| 4.0 * v).collect()).collect();
        let tau = [0.0, 0.5, 1.0];
        let a = g2_from_series(&series, 0.1, &tau, 0.2).unwrap();
        let b = g2_from_series(&scaled, 0.1, &tau, 0.2).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p.g2 - q.g2).abs() < 1e-12 * p.g2);
        }
    }

    #[test]
    fn zero_lag_is_at_least_one() {
        let series: Vec<Vec<f64>> = (0..5)
            .map(|k| (0..40).map(|i| ((i + k) % 7) as f64).collect())
            .collect();
        let p = g2_from_series(&series, 1.0, &[0.0], 0.0).unwrap();
        assert!(p[0].g2 >= 1.0);
    }

    #[test]
    fn thermal_ensemble_bunches() {
        let cfg = thermal_config();
        let ens = ensemble_run(
            &cfg,
            &PhaseSpaceState::default(),
            200,
            StepControl::new(12.0, 2e-3).record_every(10),
            3,
        )
        .unwrap();
        let out = estimate_g2(&ens, Mode::X, &[0.0, 3.0], 0.2).unwrap();
        assert!((out[0].g2 - 2.0).abs() < 0.3, "g2(0) = {}", out[0].g2);
        assert!((out[1].g2 - 1.0).abs() < 0.2, "g2(3) = {}", out[1].g2);
    }
}
