//! Finite metric spaces with validated distance matrices, and the basic
//! constructions they are assembled from: scaling, wedges, joins, and
//! complete graphs.

use crate::linalg::Matrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Absolute slack allowed in the triangle-inequality check. Constructed
/// spaces can land one rounding ulp outside the exact inequality.
pub const EPS_METRIC: f64 = 1e-12;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum SpaceError {
    #[error("distance matrix is not square: {n_rows} rows, but row {row} has {row_len} entries")]
    NotSquare {
        n_rows: usize,
        row: usize,
        row_len: usize,
    },
    #[error("{expected} labels expected for a {expected}-point space, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("entry ({i},{j}) is not a finite number")]
    NonFiniteEntry { i: usize, j: usize },
    #[error("asymmetric entries at ({i},{j})")]
    AsymmetricEntry { i: usize, j: usize },
    #[error("diagonal entry ({i},{i}) is not zero")]
    NonzeroDiagonal { i: usize },
    #[error("off-diagonal entry ({i},{j}) is not strictly positive")]
    NonpositiveOffDiagonal { i: usize, j: usize },
    #[error("triangle inequality violated at ({i},{j},{k}): d[{i}][{j}] + d[{j}][{k}] < d[{i}][{k}]")]
    TriangleViolation { i: usize, j: usize, k: usize },
    #[error("scale factor must be positive and finite")]
    NonpositiveScale,
    #[error("point index {index} out of range for a {len}-point space")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("join distance {ell} is below the half-diameter bound {required}")]
    JoinRadiusTooSmall { ell: f64, required: f64 },
    #[error("a metric space needs at least one point")]
    ZeroPoints,
}

/// A labeled finite metric space: point labels plus a validated, symmetric
/// distance matrix with zero diagonal, positive off-diagonal entries, and the
/// triangle inequality (up to [`EPS_METRIC`]).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    labels: Vec<String>,
    dist: Matrix,
}

impl FiniteMetricSpace {
    /// Validates a distance matrix and wraps it as a metric space. Labels
    /// default to `p0, p1, ...` when absent. Reports the first offending
    /// index tuple for each kind of violation.
    pub fn new(rows: &[Vec<f64>], labels: Option<Vec<String>>) -> Result<Self, SpaceError> {
        let n = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(SpaceError::NotSquare {
                    n_rows: n,
                    row: i,
                    row_len: row.len(),
                });
            }
        }
        let labels = match labels {
            Some(l) => {
                if l.len() != n {
                    return Err(SpaceError::LabelCountMismatch {
                        expected: n,
                        got: l.len(),
                    });
                }
                l
            }
            None => default_labels(n),
        };
        let dist = Matrix::from_rows(rows);
        validate_distances(&dist)?;
        Ok(FiniteMetricSpace { labels, dist })
    }

    /// Same validation as [`FiniteMetricSpace::new`], starting from a matrix.
    pub fn from_matrix(dist: Matrix, labels: Vec<String>) -> Result<Self, SpaceError> {
        if !dist.is_square() {
            return Err(SpaceError::NotSquare {
                n_rows: dist.n_rows(),
                row: 0,
                row_len: dist.n_cols(),
            });
        }
        if labels.len() != dist.n_rows() {
            return Err(SpaceError::LabelCountMismatch {
                expected: dist.n_rows(),
                got: labels.len(),
            });
        }
        validate_distances(&dist)?;
        Ok(FiniteMetricSpace { labels, dist })
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dist(&self) -> &Matrix {
        &self.dist
    }

    /// Distance between points `i` and `j`.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist.get(i, j)
    }

    /// Largest distance in the space; zero for a single point.
    pub fn diam(&self) -> f64 {
        self.dist.max_abs()
    }

    /// The space with every distance multiplied by `t > 0`.
    pub fn scale(&self, t: f64) -> Result<Self, SpaceError> {
        if t <= 0.0 || !t.is_finite() {
            return Err(SpaceError::NonpositiveScale);
        }
        Ok(FiniteMetricSpace {
            labels: self.labels.clone(),
            dist: self.dist.map(|v| v * t),
        })
    }

    /// Applies a relabeling permutation: point `i` of the result is point
    /// `perm[i]` of the original.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, SpaceError> {
        let n = self.n();
        assert_eq!(perm.len(), n);
        let labels = perm.iter().map(|&p| self.labels[p].clone()).collect();
        let dist = Matrix::from_fn(n, n, |i, j| self.d(perm[i], perm[j]));
        FiniteMetricSpace::from_matrix(dist, labels)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("p{i}")).collect()
}

fn validate_distances(dist: &Matrix) -> Result<(), SpaceError> {
    let n = dist.n_rows();
    for i in 0..n {
        for j in 0..n {
            if !dist.get(i, j).is_finite() {
                return Err(SpaceError::NonFiniteEntry { i, j });
            }
        }
    }
    for i in 0..n {
        if dist.get(i, i) != 0.0 {
            return Err(SpaceError::NonzeroDiagonal { i });
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if dist.get(i, j) != dist.get(j, i) {
                return Err(SpaceError::AsymmetricEntry { i, j });
            }
            if dist.get(i, j) <= 0.0 {
                return Err(SpaceError::NonpositiveOffDiagonal { i, j });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if dist.get(i, j) + dist.get(j, k) < dist.get(i, k) - EPS_METRIC {
                    return Err(SpaceError::TriangleViolation { i, j, k });
                }
            }
        }
    }
    Ok(())
}

/// The `n`-point space with all pairwise distances 1.
pub fn complete_graph(n: usize) -> Result<FiniteMetricSpace, SpaceError> {
    if n == 0 {
        return Err(SpaceError::ZeroPoints);
    }
    let dist = Matrix::from_fn(n, n, |i, j| if i == j { 0.0 } else { 1.0 });
    Ok(FiniteMetricSpace {
        labels: default_labels(n),
        dist,
    })
}

/// The one-point space.
pub fn one_point() -> FiniteMetricSpace {
    complete_graph(1).expect("one point is always valid")
}

/// Wedge of `a` and `b`, gluing point `ai` of `a` to point `bi` of `b`.
///
/// Distances within each factor are preserved; cross distances are routed
/// through the glue point. The glued point keeps `a`'s label, and the
/// remaining labels of `b` are suffixed with `'` so the output labeling is
/// deterministic.
pub fn wedge(
    a: &FiniteMetricSpace,
    ai: usize,
    b: &FiniteMetricSpace,
    bi: usize,
) -> Result<FiniteMetricSpace, SpaceError> {
    if ai >= a.n() {
        return Err(SpaceError::IndexOutOfRange {
            index: ai,
            len: a.n(),
        });
    }
    if bi >= b.n() {
        return Err(SpaceError::IndexOutOfRange {
            index: bi,
            len: b.n(),
        });
    }
    let na = a.n();
    let b_rest: Vec<usize> = (0..b.n()).filter(|&v| v != bi).collect();
    let n = na + b_rest.len();

    let mut labels = a.labels.clone();
    labels.extend(b_rest.iter().map(|&v| format!("{}'", b.labels[v])));

    let dist = Matrix::from_fn(n, n, |u, v| {
        let du = if u < na { None } else { Some(b_rest[u - na]) };
        let dv = if v < na { None } else { Some(b_rest[v - na]) };
        match (du, dv) {
            (None, None) => a.d(u, v),
            (Some(bu), Some(bv)) => b.d(bu, bv),
            (None, Some(bv)) => a.d(u, ai) + b.d(bi, bv),
            (Some(bu), None) => a.d(v, ai) + b.d(bi, bu),
        }
    });
    FiniteMetricSpace::from_matrix(dist, labels)
}

/// Distance-`ell` join of `a` and `b`: disjoint union with every cross
/// distance equal to `ell`. Requires `ell` at least half of each diameter.
pub fn join(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    ell: f64,
) -> Result<FiniteMetricSpace, SpaceError> {
    let required = (a.diam() / 2.0).max(b.diam() / 2.0);
    if ell <= 0.0 || !ell.is_finite() || ell < required {
        return Err(SpaceError::JoinRadiusTooSmall { ell, required });
    }
    let na = a.n();
    let n = na + b.n();
    let mut labels = a.labels.clone();
    labels.extend(b.labels.iter().map(|l| format!("{l}'")));
    let dist = Matrix::from_fn(n, n, |u, v| {
        if u < na && v < na {
            a.d(u, v)
        } else if u >= na && v >= na {
            b.d(u - na, v - na)
        } else {
            ell
        }
    });
    FiniteMetricSpace::from_matrix(dist, labels)
}

/// Random space with all distances drawn uniformly from `[1, 2)`, which
/// satisfies the triangle inequality with strict margin. Scale afterwards
/// for other ranges.
pub fn random_space<R: Rng + ?Sized>(rng: &mut R, n: usize) -> FiniteMetricSpace {
    assert!(n >= 1);
    let mut dist = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = rng.gen_range(1.0..2.0);
            dist.set(i, j, d);
            dist.set(j, i, d);
        }
    }
    FiniteMetricSpace::from_matrix(dist, default_labels(n))
        .expect("distances in [1,2) always form a metric")
}
