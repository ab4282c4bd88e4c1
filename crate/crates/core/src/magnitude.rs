//! Similarity matrices, weightings, and magnitude.
//!
//! The similarity matrix of a space has entries `exp(-d(x,y))`. A weighting
//! is a vector `w` with `Z w = 1`; when one exists, the magnitude is the sum
//! of its entries, and that sum does not depend on which weighting is used.
//! Degenerate matrices are handled by a rank-revealing solve and reported
//! through a status, never as a failure.

use crate::linalg::{
    lu_decompose, rank_revealing_particular_solution, residual_max_norm, Matrix, PIVOT_REL_TOL,
};
use crate::space::{FiniteMetricSpace, SpaceError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Residual tolerance per point: a candidate weighting is accepted when
/// `max |Z w - 1| <= TOL_RESIDUAL_PER_POINT * n`.
pub const TOL_RESIDUAL_PER_POINT: f64 = 1e-8;

/// Absolute tolerance on the join-formula denominator below which the
/// configuration is reported as a pole.
pub const TOL_POLE: f64 = 1e-12;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum MagnitudeError {
    #[error("join magnitude formula has a pole: denominator {denominator} vanishes")]
    PoleAtDenominatorZero { denominator: f64 },
}

/// Similarity matrix `Z` with entries `exp(-d(x,y))`, kept together with the
/// space it came from.
#[derive(Clone, Debug)]
pub struct SimilarityMatrix {
    entries: Matrix,
    source: FiniteMetricSpace,
}

impl SimilarityMatrix {
    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn source(&self) -> &FiniteMetricSpace {
        &self.source
    }
}

/// Builds the similarity matrix of `x`. The diagonal is exactly 1.
pub fn similarity_matrix(x: &FiniteMetricSpace) -> SimilarityMatrix {
    let n = x.n();
    let entries = Matrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { (-x.d(i, j)).exp() });
    SimilarityMatrix {
        entries,
        source: x.clone(),
    }
}

/// Solvability of the weighting equation `Z w = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingStatus {
    /// `Z` numerically nonsingular; the weighting is unique.
    Unique,
    /// `Z` numerically singular but `Z w = 1` consistent; any particular
    /// solution gives the same magnitude.
    NonUnique,
    /// `Z w = 1` has no solution; the magnitude is undefined.
    Undefined,
}

/// Result of a magnitude computation, including the weighting and solver
/// diagnostics.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MagnitudeResult {
    pub value: Option<f64>,
    pub weighting: Option<Vec<f64>>,
    pub status: WeightingStatus,
    /// Ratio of largest to smallest pivot of the LU factorization of `Z`.
    pub condition_estimate: f64,
    /// Max-norm of `Z w - 1` for the returned weighting; infinite when no
    /// weighting was accepted.
    pub residual: f64,
}

impl MagnitudeResult {
    pub fn is_defined(&self) -> bool {
        self.status != WeightingStatus::Undefined
    }
}

/// Magnitude of `x` by solving `Z w = 1`.
///
/// Numerically singular `Z` falls back to a rank-revealing solve with
/// complete pivoting; the candidate is accepted only if its residual passes
/// the per-point tolerance.
pub fn magnitude(x: &FiniteMetricSpace) -> MagnitudeResult {
    let z = similarity_matrix(x);
    magnitude_of_similarity(z.entries())
}

fn magnitude_of_similarity(z: &Matrix) -> MagnitudeResult {
    let n = z.n_rows();
    let ones = vec![1.0; n];
    let tol_residual = TOL_RESIDUAL_PER_POINT * n as f64;
    let lu = lu_decompose(z);
    let condition_estimate = lu.condition_estimate();

    if !lu.is_numerically_singular(PIVOT_REL_TOL) {
        let mut w = lu.solve(&ones).expect("no zero pivots on this path");
        let mut residual = residual_max_norm(z, &w, &ones);
        // one step of iterative refinement when conditioning has eaten into
        // the residual
        if residual > tol_residual {
            let r: Vec<f64> = z
                .mat_vec(&w)
                .iter()
                .zip(&ones)
                .map(|(zw, b)| b - zw)
                .collect();
            if let Some(correction) = lu.solve(&r) {
                for (wi, ci) in w.iter_mut().zip(&correction) {
                    *wi += ci;
                }
                residual = residual_max_norm(z, &w, &ones);
            }
        }
        return MagnitudeResult {
            value: Some(w.iter().sum()),
            weighting: Some(w),
            status: WeightingStatus::Unique,
            condition_estimate,
            residual,
        };
    }

    let w = rank_revealing_particular_solution(z, &ones, PIVOT_REL_TOL);
    let residual = residual_max_norm(z, &w, &ones);
    if residual <= tol_residual {
        MagnitudeResult {
            value: Some(w.iter().sum()),
            weighting: Some(w),
            status: WeightingStatus::NonUnique,
            condition_estimate,
            residual,
        }
    } else {
        MagnitudeResult {
            value: None,
            weighting: None,
            status: WeightingStatus::Undefined,
            condition_estimate,
            residual: f64::INFINITY,
        }
    }
}

/// Magnitude of `t x` for each `t` in the grid. Undefined entries are kept
/// and flagged through their status, not dropped.
pub fn magnitude_function(
    x: &FiniteMetricSpace,
    t_grid: &[f64],
) -> Result<Vec<(f64, MagnitudeResult)>, SpaceError> {
    t_grid
        .iter()
        .map(|&t| Ok((t, magnitude(&x.scale(t)?))))
        .collect()
}

/// Closed form for the magnitude of the scaled complete graph:
/// `|t K_n| = n / (1 + (n-1) e^{-t})`.
pub fn kn_magnitude_closed_form(n: usize, t: f64) -> f64 {
    debug_assert!(n >= 1 && t > 0.0);
    n as f64 / (1.0 + (n as f64 - 1.0) * (-t).exp())
}

/// Closed form for the magnitude of a distance-`ell` join, given the
/// magnitudes of the two factors:
/// `(|A| + |B| - 2 e^{-l} |A||B|) / (1 - e^{-2l} |A||B|)`.
///
/// Reports a pole when the denominator vanishes within [`TOL_POLE`].
pub fn join_magnitude_closed_form(
    mag_a: f64,
    mag_b: f64,
    ell: f64,
) -> Result<f64, MagnitudeError> {
    let denominator = 1.0 - (-2.0 * ell).exp() * mag_a * mag_b;
    if denominator.abs() <= TOL_POLE {
        return Err(MagnitudeError::PoleAtDenominatorZero { denominator });
    }
    Ok((mag_a + mag_b - 2.0 * (-ell).exp() * mag_a * mag_b) / denominator)
}

/// Closed form for the magnitude of a wedge: `|A| + |B| - 1`.
pub fn wedge_magnitude_closed_form(mag_a: f64, mag_b: f64) -> f64 {
    mag_a + mag_b - 1.0
}
