//! Continuity certificates for lines: evaluation of the genericity
//! polynomial, its non-vanishing witness, the block-determinant identity
//! used in its derivation, and a numeric probe of the leading coefficients
//! it predicts.
//!
//! For a line with target `x` (m points) and block sizes `r = (r_1,...,r_m)`
//! summing to `n`, the polynomial is a sum over all choices
//! `(b_1,...,b_m)`, `b_j` in `1..=r_j`, of `n x n` determinants. Column
//! `b` of column block `j` holds `exp(-d_x(i,j)) * (a[u][v] - d_x(i,j))`
//! down row block `i`, except the `b_j`-th column, which is the indicator
//! of row block `j`. Its value at the line's own block distances scales the
//! leading coefficients of both `det(Z_t)` and `sum(adj(Z_t))` in `(-t)^{n-m}`;
//! when it is nonzero (and `Z_x` is invertible), the magnitude limit along
//! the line equals the magnitude of the target.

use crate::extrapolate::{ExtrapolationConfig, ExtrapolationError};
use crate::linalg::{adjugate, lu_decompose, Matrix, PIVOT_REL_TOL};
use crate::lines::{line_space, BlockPartition, LineSpec};
use crate::magnitude::similarity_matrix;
use crate::space::FiniteMetricSpace;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for deciding that the polynomial vanished, measured
/// against the largest summand determinant.
pub const TOL_F_REL: f64 = 1e-9;

/// Cap on the number of determinant summands (the product of block sizes).
pub const SUMMAND_CAP: usize = 10_000;

/// Excess `n - m` from which double precision limits the probe's attainable
/// relative accuracy to about 1e-2.
pub const PROBE_PRECISION_EXCESS: usize = 4;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum GenericityError {
    #[error("block values are {got_rows}x{got_cols}, expected {expected}x{expected} for the partition")]
    BlockShapeMismatch {
        expected: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("partition has {got} blocks but the target space has {expected} points")]
    BlockCountMismatch { expected: usize, got: usize },
    #[error("{terms} determinant summands exceed the cap {cap}")]
    SummandCapExceeded { terms: usize, cap: usize },
    #[error(transparent)]
    Extrapolation(#[from] ExtrapolationError),
}

/// Verdict of a line certificate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The polynomial is nonzero beyond tolerance: the magnitude limit
    /// along the line equals the target's magnitude.
    Generic,
    /// The polynomial vanished within tolerance; the certificate is silent.
    Degenerate,
    /// The target's similarity matrix is numerically singular.
    TargetSingular,
}

/// Certificate for a line: the polynomial value at the line's distances and
/// the leading coefficients it predicts for `det(Z_t)` and `sum(adj(Z_t))`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GenericityCertificate {
    pub f_value: f64,
    pub n_minus_m: usize,
    /// Predicted coefficient of `(-t)^{n-m}` in `det(Z_t)`:
    /// `f_value * det(Z_x)`.
    pub det_leading_predicted: f64,
    /// Predicted coefficient of `(-t)^{n-m}` in `sum(adj(Z_t))`:
    /// `f_value * sum(adj(Z_x))`.
    pub adj_leading_predicted: f64,
    pub det_z_x: f64,
    pub sum_adj_z_x: f64,
    /// Largest summand determinant magnitude; the scale against which
    /// vanishing is judged.
    pub summand_scale: f64,
    pub verdict: Verdict,
}

/// Evaluates the genericity polynomial of `x` and `r` at the block values
/// `a` (an `n x n` matrix in block layout; it need not satisfy any metric
/// axioms).
pub fn f_polynomial_eval(
    x: &FiniteMetricSpace,
    r: &BlockPartition,
    a: &Matrix,
) -> Result<f64, GenericityError> {
    f_polynomial_eval_scaled(x, r, a).map(|(value, _)| value)
}

/// As [`f_polynomial_eval`], additionally returning the largest summand
/// magnitude for tolerance scaling.
pub fn f_polynomial_eval_scaled(
    x: &FiniteMetricSpace,
    r: &BlockPartition,
    a: &Matrix,
) -> Result<(f64, f64), GenericityError> {
    let m = x.n();
    let n = r.total();
    if r.len() != m {
        return Err(GenericityError::BlockCountMismatch {
            expected: m,
            got: r.len(),
        });
    }
    if a.n_rows() != n || a.n_cols() != n {
        return Err(GenericityError::BlockShapeMismatch {
            expected: n,
            got_rows: a.n_rows(),
            got_cols: a.n_cols(),
        });
    }
    let terms = r.size_product();
    if terms > SUMMAND_CAP {
        return Err(GenericityError::SummandCapExceeded {
            terms,
            cap: SUMMAND_CAP,
        });
    }

    // non-indicator columns are shared by every summand: entry (u, v) with
    // u in row block i and v in column block j is
    // exp(-d_x(i,j)) * (a[u][v] - d_x(i,j))
    let base = Matrix::from_fn(n, n, |u, v| {
        let i = r.block_of(u);
        let j = r.block_of(v);
        let d = x.d(i, j);
        (-d).exp() * (a.get(u, v) - d)
    });

    let mut sum = 0.0;
    let mut scale = 0.0f64;
    let mut choice = vec![0usize; m]; // b_j, zero-based within block j
    loop {
        let mut mat = base.clone();
        for (j, &b) in choice.iter().enumerate() {
            let col = r.range(j).start + b;
            for u in 0..n {
                let val = if r.block_of(u) == j { 1.0 } else { 0.0 };
                mat.set(u, col, val);
            }
        }
        let d = lu_decompose(&mat).det();
        sum += d;
        scale = scale.max(d.abs());

        // odometer over (b_1, ..., b_m)
        let mut j = 0;
        loop {
            if j == m {
                return Ok((sum, scale));
            }
            choice[j] += 1;
            if choice[j] < r.sizes()[j] {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
    }
}

/// The witness block values for `x` and `r`: within-block distances 1,
/// cross-block distances `d_x(i,j)`. The polynomial evaluates at this point
/// to `(-1)^{n-m} r_1 r_2 ... r_m`, which is never zero.
///
/// The returned flag reports whether the witness is also a genuine metric:
/// once some block has two points, the triangle inequality survives exactly
/// when every off-diagonal distance of `x` is at least 1/2. The polynomial
/// evaluation does not require that.
pub fn witness_space(x: &FiniteMetricSpace, r: &BlockPartition) -> (Matrix, bool) {
    let n = r.total();
    let a = Matrix::from_fn(n, n, |u, v| {
        let i = r.block_of(u);
        let j = r.block_of(v);
        if i != j {
            x.d(i, j)
        } else if u != v {
            1.0
        } else {
            0.0
        }
    });
    let rows: Vec<Vec<f64>> = (0..n).map(|u| a.row(u).to_vec()).collect();
    let metric_flag = FiniteMetricSpace::new(&rows, None).is_ok();
    (a, metric_flag)
}

/// Builds both sides of the block-determinant identity: `lhs` is the
/// determinant of the matrix whose first `m` columns replicate `a[i][j]`
/// down block `i` (followed by the filler columns), `rhs` is `det(a)` times
/// the determinant with the replicated columns replaced by block indicator
/// columns. The two agree identically; this is the property-test oracle.
pub fn block_det_identity_check(
    a: &Matrix,
    r: &BlockPartition,
    filler: &Matrix,
) -> (f64, f64) {
    let m = a.n_rows();
    assert!(a.is_square());
    assert_eq!(r.len(), m);
    let n = r.total();
    assert_eq!(filler.n_rows(), n);
    assert_eq!(filler.n_cols(), n - m);

    let replicated = Matrix::from_fn(n, n, |u, c| {
        if c < m {
            a.get(r.block_of(u), c)
        } else {
            filler.get(u, c - m)
        }
    });
    let indicator = Matrix::from_fn(n, n, |u, c| {
        if c < m {
            if r.block_of(u) == c {
                1.0
            } else {
                0.0
            }
        } else {
            filler.get(u, c - m)
        }
    });
    let lhs = lu_decompose(&replicated).det();
    let rhs = lu_decompose(a).det() * lu_decompose(&indicator).det();
    (lhs, rhs)
}

/// Certifies a line: evaluates the polynomial at the line's canonical block
/// distances, computes `det(Z_x)` and `sum(adj(Z_x))`, and predicts the
/// leading coefficients.
pub fn certify_line(line: &LineSpec) -> Result<GenericityCertificate, GenericityError> {
    let (canonical, _) = line.canonicalized();
    let x = canonical.x();
    let r = canonical.partition();
    let (f_value, summand_scale) =
        f_polynomial_eval_scaled(x, r, canonical.y().dist())?;

    let zx = similarity_matrix(x);
    let lu = lu_decompose(zx.entries());
    let det_z_x = lu.det();
    let sum_adj_z_x = adjugate(zx.entries()).sum();
    let n_minus_m = canonical.excess();

    let verdict = if lu.is_numerically_singular(PIVOT_REL_TOL) {
        Verdict::TargetSingular
    } else if f_value.abs() <= TOL_F_REL * summand_scale {
        Verdict::Degenerate
    } else {
        Verdict::Generic
    };

    Ok(GenericityCertificate {
        f_value,
        n_minus_m,
        det_leading_predicted: f_value * det_z_x,
        adj_leading_predicted: f_value * sum_adj_z_x,
        det_z_x,
        sum_adj_z_x,
        summand_scale,
        verdict,
    })
}

/// Numerically measured leading coefficients of `det(Z_t)` and
/// `sum(adj(Z_t))` along a line.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeResult {
    pub det_leading_measured: f64,
    pub adj_leading_measured: f64,
    /// True when `n - m` is large enough that double precision caps the
    /// attainable relative accuracy near 1e-2.
    pub precision_limited: bool,
    pub t_grid_used: Vec<f64>,
}

/// Measures the leading coefficients by evaluating `det(Z_t)` and
/// `sum(adj(Z_t))` on a shrinking grid, dividing by `t^{n-m}`, fitting a
/// low-degree polynomial in `t`, and rescaling the intercepts by
/// `(-1)^{n-m}`.
pub fn leading_coefficient_probe(
    line: &LineSpec,
    cfg: &ExtrapolationConfig,
) -> Result<ProbeResult, GenericityError> {
    let nm = line.excess() as i32;
    let mut ts = Vec::new();
    let mut det_scaled = Vec::new();
    let mut adj_scaled = Vec::new();
    for t in cfg.grid() {
        if t > 1.0 {
            continue;
        }
        let space = match line_space(line, t) {
            Ok(s) => s,
            Err(_) => continue,
        };
        let z = similarity_matrix(&space);
        let lu = lu_decompose(z.entries());
        if lu.condition_estimate() > cfg.max_condition {
            continue;
        }
        let weight = t.powi(nm);
        ts.push(t);
        det_scaled.push(lu.det() / weight);
        adj_scaled.push(adjugate(z.entries()).sum() / weight);
    }
    let needed = cfg.fit_degree + 2;
    if ts.len() < needed {
        return Err(ExtrapolationError::InsufficientWellConditionedSamples {
            needed,
            got: ts.len(),
        }
        .into());
    }
    let sign = if nm % 2 == 0 { 1.0 } else { -1.0 };
    let det_intercept =
        crate::extrapolate::polyfit_value_at_zero(&ts, &det_scaled, cfg.fit_degree);
    let adj_intercept =
        crate::extrapolate::polyfit_value_at_zero(&ts, &adj_scaled, cfg.fit_degree);
    Ok(ProbeResult {
        det_leading_measured: sign * det_intercept,
        adj_leading_measured: sign * adj_intercept,
        precision_limited: line.excess() >= PROBE_PRECISION_EXCESS,
        t_grid_used: ts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::det;
    use crate::space::{complete_graph, one_point, random_space};
    use rand::{rngs::StdRng, Rng, SeedableRng};

    #[test]
    fn all_singleton_fibers_give_constant_one() {
        // every summand matrix is the identity when each block contributes
        // only its indicator column
        let mut rng = StdRng::seed_from_u64(7);
        let x = random_space(&mut rng, 4);
        let r = BlockPartition::new(vec![1, 1, 1, 1]).unwrap();
        let mut a = Matrix::zeros(4, 4);
        for i in 0..4 {
            for j in 0..4 {
                a.set(i, j, rng.gen_range(-2.0..2.0));
            }
        }
        let f = f_polynomial_eval(&x, &r, &a).unwrap();
        assert!((f - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pulled_back_target_distances_give_zero() {
        // a[u][v] = d_x(i,j) makes every non-indicator column vanish
        let x = complete_graph(2).unwrap();
        let r = BlockPartition::new(vec![2, 1]).unwrap();
        let a = Matrix::from_fn(3, 3, |u, v| {
            let i = r.block_of(u);
            let j = r.block_of(v);
            x.d(i, j)
        });
        let (f, scale) = f_polynomial_eval_scaled(&x, &r, &a).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(scale, 0.0);
    }

    #[test]
    fn witness_value_for_k2_partition_2_1() {
        let x = complete_graph(2).unwrap();
        let r = BlockPartition::new(vec![2, 1]).unwrap();
        let (a, metric_flag) = witness_space(&x, &r);
        assert!(metric_flag); // all distances of K_2 are 1 >= 1/2
        let f = f_polynomial_eval(&x, &r, &a).unwrap();
        // (-1)^{3-2} * 2 * 1
        assert!((f + 2.0).abs() < 1e-12);
    }

    #[test]
    fn witness_value_for_one_point_target() {
        let x = one_point();
        for k in 1..=5usize {
            let r = BlockPartition::new(vec![k]).unwrap();
            let (a, _) = witness_space(&x, &r);
            let f = f_polynomial_eval(&x, &r, &a).unwrap();
            let expect = if (k - 1) % 2 == 0 { k as f64 } else { -(k as f64) };
            assert!(
                (f - expect).abs() < 1e-12,
                "k = {k}: {f} vs {expect}"
            );
        }
    }

    #[test]
    fn witness_metric_flag_tracks_half_minimum_distance() {
        // distances below 1/2 break the triangle inequality of the witness
        let x = complete_graph(2).unwrap().scale(0.4).unwrap();
        let r = BlockPartition::new(vec![2, 1]).unwrap();
        let (_, metric_flag) = witness_space(&x, &r);
        assert!(!metric_flag);
        let x = complete_graph(2).unwrap().scale(0.5).unwrap();
        let (_, metric_flag) = witness_space(&x, &r);
        assert!(metric_flag);
    }

    #[test]
    fn block_shape_mismatch_is_reported() {
        let x = complete_graph(2).unwrap();
        let r = BlockPartition::new(vec![2, 1]).unwrap();
        let a = Matrix::zeros(2, 2);
        assert!(matches!(
            f_polynomial_eval(&x, &r, &a),
            Err(GenericityError::BlockShapeMismatch { expected: 3, .. })
        ));
        let r_bad = BlockPartition::new(vec![1, 1, 1]).unwrap();
        let a3 = Matrix::zeros(3, 3);
        assert!(matches!(
            f_polynomial_eval(&x, &r_bad, &a3),
            Err(GenericityError::BlockCountMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn block_det_identity_on_diagonal_case() {
        let mut rng = StdRng::seed_from_u64(13);
        let r = BlockPartition::new(vec![2, 1, 1]).unwrap();
        let a = Matrix::identity(3);
        let filler = Matrix::from_fn(4, 1, |_, _| rng.gen_range(-1.0..1.0));
        let (lhs, rhs) = block_det_identity_check(&a, &r, &filler);
        assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn block_det_identity_on_random_and_singular_cases() {
        let mut rng = StdRng::seed_from_u64(19);
        let r = BlockPartition::new(vec![2, 1, 1]).unwrap();
        for _ in 0..20 {
            let a = Matrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
            let filler = Matrix::from_fn(4, 1, |_, _| rng.gen_range(-1.0..1.0));
            let (lhs, rhs) = block_det_identity_check(&a, &r, &filler);
            let tol = 1e-9 * rhs.abs().max(1e-3);
            assert!((lhs - rhs).abs() < tol, "lhs {lhs} rhs {rhs}");
        }
        // singular a: both sides vanish
        let mut a = Matrix::from_fn(3, 3, |_, _| rng.gen_range(-1.0..1.0));
        for j in 0..3 {
            a.set(2, j, a.get(0, j) + a.get(1, j));
        }
        let filler = Matrix::from_fn(4, 1, |_, _| rng.gen_range(-1.0..1.0));
        let (lhs, rhs) = block_det_identity_check(&a, &r, &filler);
        assert!(lhs.abs() < 1e-9 && rhs.abs() < 1e-9);
    }

    #[test]
    fn bijective_line_certificate_is_generic_with_f_one() {
        let mut rng = StdRng::seed_from_u64(37);
        let x = random_space(&mut rng, 4);
        let y = random_space(&mut rng, 4);
        let line = LineSpec::new(x, y, vec![2, 0, 3, 1]).unwrap();
        let cert = certify_line(&line).unwrap();
        assert_eq!(cert.n_minus_m, 0);
        assert!((cert.f_value - 1.0).abs() < 1e-12);
        assert_eq!(cert.verdict, Verdict::Generic);
        assert!((cert.det_leading_predicted - cert.det_z_x).abs() < 1e-12);
    }

    #[test]
    fn pulled_back_block_values_are_degenerate() {
        // block values equal to the pulled-back target distances zero every
        // non-indicator column, so the vanishing verdict must trigger
        let x = complete_graph(2).unwrap();
        let r = BlockPartition::new(vec![2, 1]).unwrap();
        let a = Matrix::from_fn(3, 3, |u, v| {
            let i = r.block_of(u);
            let j = r.block_of(v);
            x.d(i, j)
        });
        let (f, scale) = f_polynomial_eval_scaled(&x, &r, &a).unwrap();
        assert!(f.abs() <= TOL_F_REL * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn witness_line_certificate_over_k2() {
        // the witness for K_2 with blocks (2,1) is a genuine metric, so it
        // also defines a line; its certificate must be generic with value -2
        let x = complete_graph(2).unwrap();
        let r = BlockPartition::new(vec![2, 1]).unwrap();
        let (a, metric_flag) = witness_space(&x, &r);
        assert!(metric_flag);
        let rows: Vec<Vec<f64>> = (0..3).map(|u| a.row(u).to_vec()).collect();
        let y = FiniteMetricSpace::new(&rows, None).unwrap();
        let line = LineSpec::new(x, y, vec![0, 0, 1]).unwrap();
        let cert = certify_line(&line).unwrap();
        assert!((cert.f_value + 2.0).abs() < 1e-12);
        assert_eq!(cert.verdict, Verdict::Generic);
    }

    #[test]
    fn probe_matches_prediction_for_bijective_line() {
        let mut rng = StdRng::seed_from_u64(41);
        let x = random_space(&mut rng, 3);
        let y = random_space(&mut rng, 3);
        let line = LineSpec::new(x.clone(), y, vec![0, 1, 2]).unwrap();
        let cert = certify_line(&line).unwrap();
        let probe = leading_coefficient_probe(&line, &ExtrapolationConfig::default()).unwrap();
        let zx = similarity_matrix(&x);
        let dzx = det(zx.entries());
        assert!(
            (probe.det_leading_measured - dzx).abs() < 1e-6 * dzx.abs(),
            "measured {} vs det(Z_x) {}",
            probe.det_leading_measured,
            dzx
        );
        assert!(
            (probe.adj_leading_measured - cert.adj_leading_predicted).abs()
                < 1e-6 * cert.adj_leading_predicted.abs().max(1e-9)
        );
        assert!(!probe.precision_limited);
    }
}
