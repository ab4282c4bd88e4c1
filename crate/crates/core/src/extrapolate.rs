//! Numerical estimation of `t -> 0` limits from samples on a geometric grid.
//!
//! Values are fitted with a least-squares polynomial in `t` and read off at
//! zero; the error estimate is the disagreement between the fits of degree
//! `d` and `d + 1`. Grid points whose solve was too ill conditioned are
//! discarded before fitting.

use crate::linalg::{least_squares, Matrix};
use crate::magnitude::{MagnitudeResult, WeightingStatus};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum ExtrapolationError {
    #[error("only {got} well-conditioned samples, need at least {needed}")]
    InsufficientWellConditionedSamples { needed: usize, got: usize },
}

/// Grid and fit parameters for limit extrapolation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExtrapolationConfig {
    /// Largest grid value.
    pub t0: f64,
    /// Geometric ratio between consecutive grid values.
    pub rho: f64,
    /// Number of grid values before flooring.
    pub steps: usize,
    /// Grid values below this floor are dropped; it keeps the solves away
    /// from the conditioning blow-up near the limit.
    pub t_min: f64,
    /// Degree of the main least-squares fit.
    pub fit_degree: usize,
    /// Samples whose condition estimate exceeds this are discarded.
    pub max_condition: f64,
}

impl Default for ExtrapolationConfig {
    fn default() -> Self {
        ExtrapolationConfig {
            t0: 0.2,
            rho: 0.7,
            steps: 20,
            t_min: 1e-3,
            fit_degree: 4,
            max_condition: 1e10,
        }
    }
}

impl ExtrapolationConfig {
    /// Strictly decreasing geometric grid `t0 * rho^j`, floored at `t_min`.
    pub fn grid(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.steps);
        let mut t = self.t0;
        for _ in 0..self.steps {
            if t < self.t_min {
                break;
            }
            out.push(t);
            t *= self.rho;
        }
        out
    }
}

/// Per-grid-point diagnostics retained by a limit estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridPointDiag {
    pub t: f64,
    pub condition_estimate: f64,
    pub status: WeightingStatus,
    pub used: bool,
}

/// An extrapolated `t -> 0` value with its error estimate and the grid
/// diagnostics behind it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub value: f64,
    pub error_estimate: f64,
    pub fit_degree: usize,
    pub t_grid_used: Vec<f64>,
    pub condition_flags: Vec<GridPointDiag>,
}

/// Least-squares polynomial fit of degree `degree`, evaluated at zero.
///
/// The abscissae are rescaled to (0, 1] before building the Vandermonde
/// system; the constant coefficient is unchanged by that.
pub fn polyfit_value_at_zero(ts: &[f64], ys: &[f64], degree: usize) -> f64 {
    assert_eq!(ts.len(), ys.len());
    assert!(ts.len() > degree);
    let t_scale = ts.iter().fold(0.0f64, |m, &t| m.max(t.abs())).max(f64::MIN_POSITIVE);
    let design = Matrix::from_fn(ts.len(), degree + 1, |i, j| (ts[i] / t_scale).powi(j as i32));
    let coeffs = least_squares(&design, ys);
    coeffs[0]
}

/// Drives a limit estimate: evaluates `eval` over the configured grid,
/// discards points that are missing or worse conditioned than
/// `cfg.max_condition`, fits degrees `d` and `d+1`, and reports their
/// disagreement at zero as the error estimate.
///
/// `eval` may return `None` for grid values where the quantity cannot be
/// formed at all; such points are flagged and skipped.
pub fn estimate_limit_with<F>(
    cfg: &ExtrapolationConfig,
    mut eval: F,
) -> Result<LimitEstimate, ExtrapolationError>
where
    F: FnMut(f64) -> Option<MagnitudeResult>,
{
    let mut diags = Vec::new();
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for t in cfg.grid() {
        match eval(t) {
            Some(r) => {
                let used = r.value.is_some() && r.condition_estimate <= cfg.max_condition;
                if used {
                    ts.push(t);
                    ys.push(r.value.expect("checked above"));
                }
                diags.push(GridPointDiag {
                    t,
                    condition_estimate: r.condition_estimate,
                    status: r.status,
                    used,
                });
            }
            None => diags.push(GridPointDiag {
                t,
                condition_estimate: f64::INFINITY,
                status: WeightingStatus::Undefined,
                used: false,
            }),
        }
    }
    fit_samples(cfg.fit_degree, ts, ys, diags)
}

/// Fits pre-collected `(t, y)` samples, for families that are evaluated
/// outside the magnitude machinery.
pub fn estimate_limit_from_samples(
    fit_degree: usize,
    ts: &[f64],
    ys: &[f64],
) -> Result<LimitEstimate, ExtrapolationError> {
    let diags = ts
        .iter()
        .map(|&t| GridPointDiag {
            t,
            condition_estimate: 1.0,
            status: WeightingStatus::Unique,
            used: true,
        })
        .collect();
    fit_samples(fit_degree, ts.to_vec(), ys.to_vec(), diags)
}

fn fit_samples(
    fit_degree: usize,
    ts: Vec<f64>,
    ys: Vec<f64>,
    diags: Vec<GridPointDiag>,
) -> Result<LimitEstimate, ExtrapolationError> {
    let needed = fit_degree + 2;
    if ts.len() < needed {
        return Err(ExtrapolationError::InsufficientWellConditionedSamples {
            needed,
            got: ts.len(),
        });
    }
    let value = polyfit_value_at_zero(&ts, &ys, fit_degree);
    let check = polyfit_value_at_zero(&ts, &ys, fit_degree + 1);
    Ok(LimitEstimate {
        value,
        error_estimate: (value - check).abs(),
        fit_degree,
        t_grid_used: ts,
        condition_flags: diags,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_is_decreasing_and_floored() {
        let cfg = ExtrapolationConfig::default();
        let grid = cfg.grid();
        assert!(grid.len() >= 10);
        assert!(grid.windows(2).all(|w| w[0] > w[1]));
        assert!(grid.iter().all(|&t| t >= cfg.t_min));
        assert_eq!(grid[0], 0.2);
    }

    #[test]
    fn polyfit_recovers_exact_polynomial_limit() {
        let cfg = ExtrapolationConfig::default();
        let grid = cfg.grid();
        // y = 7 - 3t + t^2 - 0.25 t^3
        let ys: Vec<f64> = grid
            .iter()
            .map(|&t| 7.0 - 3.0 * t + t * t - 0.25 * t * t * t)
            .collect();
        let est = estimate_limit_from_samples(4, &grid, &ys).unwrap();
        assert!((est.value - 7.0).abs() < 1e-10);
        assert!(est.error_estimate < 1e-9);
    }

    #[test]
    fn polyfit_handles_smooth_transcendental_limit() {
        let cfg = ExtrapolationConfig::default();
        let grid = cfg.grid();
        // y = 2 / (1 + e^{-t}) -> 1 as t -> 0
        let ys: Vec<f64> = grid.iter().map(|&t| 2.0 / (1.0 + (-t).exp())).collect();
        let est = estimate_limit_from_samples(4, &grid, &ys).unwrap();
        assert!((est.value - 1.0).abs() < 1e-7, "value {}", est.value);
        assert!((est.value - 1.0).abs() <= (10.0 * est.error_estimate).max(1e-8));
    }

    #[test]
    fn too_few_samples_is_an_error() {
        let err = estimate_limit_from_samples(4, &[0.1, 0.05], &[1.0, 1.0]).unwrap_err();
        assert!(matches!(
            err,
            ExtrapolationError::InsufficientWellConditionedSamples { needed: 6, got: 2 }
        ));
    }
}
