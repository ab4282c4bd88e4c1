//! Lines between finite metric spaces: the interpolated metrics
//! `d_{f,t} = t d_Y + (1-t) d_X(f x f)` along a surjection `f: Y -> X`,
//! numerical `t -> 0` limits of magnitude along a line, brute-force isometry
//! groups, line equivalence, and the canonical block ordering of a line's
//! distance matrix.

use crate::extrapolate::{estimate_limit_with, ExtrapolationConfig, ExtrapolationError, LimitEstimate};
use crate::linalg::Matrix;
use crate::magnitude::magnitude;
use crate::space::{FiniteMetricSpace, SpaceError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Point-count cap for isometry group enumeration.
pub const ISO_BRUTE_LIMIT: usize = 10;

/// Point-count cap for the composite search in line equivalence.
pub const EQUIV_BRUTE_LIMIT: usize = 12;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LineError {
    #[error("fiber has {got} entries but the domain space has {expected} points")]
    FiberLengthMismatch { expected: usize, got: usize },
    #[error("fiber entry {index} at position {position} exceeds the {points}-point target")]
    FiberIndexOutOfRange {
        position: usize,
        index: usize,
        points: usize,
    },
    #[error("fiber is not surjective: target point {missing} has empty preimage")]
    FiberNotSurjective { missing: usize },
    #[error("block sizes must all be at least 1")]
    EmptyBlock,
    #[error("line parameter t = {t} outside (0, 1]")]
    ScaleOutOfRange { t: f64 },
    #[error("{points} points exceed the brute-force limit {limit}")]
    TooLargeForBruteForce { points: usize, limit: usize },
    #[error("the two lines do not target isometric spaces")]
    TargetMismatch,
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Extrapolation(#[from] ExtrapolationError),
}

/// Fiber sizes `(r_1, ..., r_m)` of a surjection, with prefix sums for
/// block indexing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPartition {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
}

impl BlockPartition {
    pub fn new(sizes: Vec<usize>) -> Result<Self, LineError> {
        if sizes.contains(&0) {
            return Err(LineError::EmptyBlock);
        }
        let mut offsets = Vec::with_capacity(sizes.len() + 1);
        let mut acc = 0;
        offsets.push(0);
        for &r in &sizes {
            acc += r;
            offsets.push(acc);
        }
        Ok(BlockPartition { sizes, offsets })
    }

    /// Derives the partition from a fiber map into an `m`-point target,
    /// checking surjectivity.
    pub fn from_fiber(fiber: &[usize], m: usize) -> Result<Self, LineError> {
        let mut counts = vec![0usize; m];
        for (position, &index) in fiber.iter().enumerate() {
            if index >= m {
                return Err(LineError::FiberIndexOutOfRange {
                    position,
                    index,
                    points: m,
                });
            }
            counts[index] += 1;
        }
        if let Some(missing) = counts.iter().position(|&c| c == 0) {
            return Err(LineError::FiberNotSurjective { missing });
        }
        BlockPartition::new(counts)
    }

    /// Number of blocks, `m`.
    pub fn len(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Total number of points, `n`.
    pub fn total(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Index range of block `i` in the sorted layout.
    pub fn range(&self, i: usize) -> std::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    /// Block containing sorted row `row`.
    pub fn block_of(&self, row: usize) -> usize {
        debug_assert!(row < self.total());
        match self.offsets.binary_search(&row) {
            Ok(i) if i < self.sizes.len() => i,
            Ok(i) => i - 1,
            Err(i) => i - 1,
        }
    }

    /// Product of the block sizes (the number of terms in the genericity
    /// polynomial's determinant sum).
    pub fn size_product(&self) -> usize {
        self.sizes.iter().product()
    }
}

/// A line in Gromov-Hausdorff space: a target `x`, a domain `y`, and a
/// surjective fiber map sending each point of `y` to a point of `x`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LineSpec {
    x: FiniteMetricSpace,
    y: FiniteMetricSpace,
    fiber: Vec<usize>,
    partition: BlockPartition,
}

impl LineSpec {
    pub fn new(
        x: FiniteMetricSpace,
        y: FiniteMetricSpace,
        fiber: Vec<usize>,
    ) -> Result<Self, LineError> {
        if fiber.len() != y.n() {
            return Err(LineError::FiberLengthMismatch {
                expected: y.n(),
                got: fiber.len(),
            });
        }
        let partition = BlockPartition::from_fiber(&fiber, x.n())?;
        Ok(LineSpec {
            x,
            y,
            fiber,
            partition,
        })
    }

    pub fn x(&self) -> &FiniteMetricSpace {
        &self.x
    }

    pub fn y(&self) -> &FiniteMetricSpace {
        &self.y
    }

    pub fn fiber(&self) -> &[usize] {
        &self.fiber
    }

    pub fn partition(&self) -> &BlockPartition {
        &self.partition
    }

    /// `n - m`: how many points of `y` collapse in the limit.
    pub fn excess(&self) -> usize {
        self.y.n() - self.x.n()
    }

    /// A copy of the line with `y` relabeled into canonical block order
    /// (fiber `i` occupies block `i`), plus the permutation that was
    /// applied: entry `new` of the permutation holds the original index.
    pub fn canonicalized(&self) -> (LineSpec, Vec<usize>) {
        let form = canonical_block_matrix(self);
        let y = self
            .y
            .permuted(&form.permutation)
            .expect("permutation of a valid space stays valid");
        let fiber: Vec<usize> = form.permutation.iter().map(|&old| self.fiber[old]).collect();
        let line = LineSpec::new(self.x.clone(), y, fiber)
            .expect("canonical relabeling keeps the fiber surjective");
        (line, form.permutation)
    }
}

/// The space `(Y, d_{f,t})` on the line at parameter `t` in (0, 1].
///
/// At `t = 1` this is exactly `y`; as `t -> 0` the distances converge to the
/// pullback of `x`'s metric.
pub fn line_space(line: &LineSpec, t: f64) -> Result<FiniteMetricSpace, LineError> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(LineError::ScaleOutOfRange { t });
    }
    let n = line.y.n();
    let dist = Matrix::from_fn(n, n, |u, v| {
        t * line.y.d(u, v) + (1.0 - t) * line.x.d(line.fiber[u], line.fiber[v])
    });
    FiniteMetricSpace::from_matrix(dist, line.y.labels().to_vec()).map_err(LineError::from)
}

/// Extrapolates `|Y_{f,t}|` to `t = 0` over a geometric grid, discarding
/// grid points whose similarity matrix is too ill conditioned.
pub fn line_limit_magnitude(
    line: &LineSpec,
    cfg: &ExtrapolationConfig,
) -> Result<LimitEstimate, LineError> {
    let estimate = estimate_limit_with(cfg, |t| {
        if t > 1.0 {
            return None;
        }
        line_space(line, t).ok().map(|space| magnitude(&space))
    })?;
    Ok(estimate)
}

/// All isometries from `a` to `b`: bijections of point indices that carry
/// distances across exactly. Backtracking with distance pruning.
fn isometries_between(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    limit: usize,
) -> Result<Vec<Vec<usize>>, LineError> {
    if a.n() != b.n() {
        return Ok(Vec::new());
    }
    let n = a.n();
    if n > limit {
        return Err(LineError::TooLargeForBruteForce { points: n, limit });
    }
    let mut out = Vec::new();
    let mut assignment = Vec::with_capacity(n);
    let mut used = vec![false; n];
    search_isometries(a, b, &mut assignment, &mut used, &mut out);
    Ok(out)
}

fn search_isometries(
    a: &FiniteMetricSpace,
    b: &FiniteMetricSpace,
    assignment: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let i = assignment.len();
    if i == a.n() {
        out.push(assignment.clone());
        return;
    }
    for c in 0..b.n() {
        if used[c] {
            continue;
        }
        if assignment
            .iter()
            .enumerate()
            .all(|(j, &cj)| b.d(c, cj) == a.d(i, j))
        {
            used[c] = true;
            assignment.push(c);
            search_isometries(a, b, assignment, used, out);
            assignment.pop();
            used[c] = false;
        }
    }
}

/// The isometry group of `x` as permutations of its point indices, found by
/// exhaustive search with pruning. Distances must match exactly.
pub fn iso_group(x: &FiniteMetricSpace) -> Result<Vec<Vec<usize>>, LineError> {
    isometries_between(x, x, ISO_BRUTE_LIMIT)
}

/// Whether two lines represent the same point of the space of lines: there
/// must be an isometry `k` of the targets and an isometry `h` of the domains
/// with `k(f1(u)) = f2(h(u))` for every point `u`.
///
/// The search runs over target isometries composed with block-respecting
/// assignments of the domains.
pub fn lines_equivalent(l1: &LineSpec, l2: &LineSpec) -> Result<bool, LineError> {
    let target_isos = isometries_between(l1.x(), l2.x(), EQUIV_BRUTE_LIMIT)?;
    if target_isos.is_empty() {
        return Err(LineError::TargetMismatch);
    }
    let n = l1.y().n();
    if n != l2.y().n() {
        return Ok(false);
    }
    if n > EQUIV_BRUTE_LIMIT {
        return Err(LineError::TooLargeForBruteForce {
            points: n,
            limit: EQUIV_BRUTE_LIMIT,
        });
    }

    for k in &target_isos {
        // block sizes must agree once the target is relabeled by k
        let compatible = (0..l1.x().n())
            .all(|i| l1.partition().sizes()[i] == l2.partition().sizes()[k[i]]);
        if !compatible {
            continue;
        }
        let mut assignment = Vec::with_capacity(n);
        let mut used = vec![false; n];
        if search_domain_isometry(l1, l2, k, &mut assignment, &mut used) {
            return Ok(true);
        }
    }
    Ok(false)
}

fn search_domain_isometry(
    l1: &LineSpec,
    l2: &LineSpec,
    k: &[usize],
    assignment: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let u = assignment.len();
    if u == l1.y().n() {
        return true;
    }
    let target_fiber = k[l1.fiber()[u]];
    for c in 0..l2.y().n() {
        if used[c] || l2.fiber()[c] != target_fiber {
            continue;
        }
        if assignment
            .iter()
            .enumerate()
            .all(|(v, &cv)| l2.y().d(c, cv) == l1.y().d(u, v))
        {
            used[c] = true;
            assignment.push(c);
            if search_domain_isometry(l1, l2, k, assignment, used) {
                return true;
            }
            assignment.pop();
            used[c] = false;
        }
    }
    false
}

/// A line's distance matrix re-ordered so fiber `i` occupies block `i`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalForm {
    /// `y`'s distance matrix in block order.
    pub matrix: Matrix,
    pub partition: BlockPartition,
    /// `permutation[new] = old`: sorted index `new` holds original point
    /// `old`.
    pub permutation: Vec<usize>,
}

/// Sorts the points of `y` by fiber, breaking ties within a fiber by
/// lexicographic comparison of the original distance-matrix rows (and then
/// by original index), so the form is deterministic.
pub fn canonical_block_matrix(line: &LineSpec) -> CanonicalForm {
    let n = line.y().n();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&u, &v| {
        line.fiber()[u]
            .cmp(&line.fiber()[v])
            .then_with(|| {
                let ru = line.y().dist().row(u);
                let rv = line.y().dist().row(v);
                ru.partial_cmp(rv).expect("validated distances are not NaN")
            })
            .then(u.cmp(&v))
    });
    let matrix = Matrix::from_fn(n, n, |i, j| line.y().d(order[i], order[j]));
    let partition = line.partition().clone();
    CanonicalForm {
        matrix,
        partition,
        permutation: order,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{complete_graph, join, one_point, random_space, FiniteMetricSpace};
    use rand::{rngs::StdRng, seq::SliceRandom, SeedableRng};

    fn scaled_line(y: &FiniteMetricSpace) -> LineSpec {
        LineSpec::new(one_point(), y.clone(), vec![0; y.n()]).unwrap()
    }

    #[test]
    fn line_spec_validates_fiber() {
        let x = complete_graph(2).unwrap();
        let y = complete_graph(3).unwrap();
        assert!(LineSpec::new(x.clone(), y.clone(), vec![0, 1, 0]).is_ok());
        assert!(matches!(
            LineSpec::new(x.clone(), y.clone(), vec![0, 1]),
            Err(LineError::FiberLengthMismatch { .. })
        ));
        assert!(matches!(
            LineSpec::new(x.clone(), y.clone(), vec![0, 2, 0]),
            Err(LineError::FiberIndexOutOfRange { .. })
        ));
        assert!(matches!(
            LineSpec::new(x, y, vec![0, 0, 0]),
            Err(LineError::FiberNotSurjective { missing: 1 })
        ));
    }

    #[test]
    fn line_space_at_one_is_exactly_y() {
        let mut rng = StdRng::seed_from_u64(5);
        let y = random_space(&mut rng, 5);
        let x = random_space(&mut rng, 2);
        let line = LineSpec::new(x, y.clone(), vec![0, 0, 1, 1, 0]).unwrap();
        let at_one = line_space(&line, 1.0).unwrap();
        assert_eq!(at_one.dist(), y.dist());
    }

    #[test]
    fn line_to_point_is_scaling() {
        let y = complete_graph(2).unwrap();
        let line = scaled_line(&y);
        let half = line_space(&line, 0.5).unwrap();
        assert_eq!(half.d(0, 1), 0.5);
        for &t in &[1.0, 0.3, 0.01] {
            let s = line_space(&line, t).unwrap();
            assert_eq!(s.dist(), y.scale(t).unwrap().dist());
        }
    }

    #[test]
    fn line_space_rejects_out_of_range_t() {
        let line = scaled_line(&complete_graph(2).unwrap());
        assert!(matches!(
            line_space(&line, 0.0),
            Err(LineError::ScaleOutOfRange { .. })
        ));
        assert!(matches!(
            line_space(&line, 1.5),
            Err(LineError::ScaleOutOfRange { .. })
        ));
    }

    #[test]
    fn bijective_line_limit_recovers_target_magnitude() {
        let mut rng = StdRng::seed_from_u64(17);
        let x = random_space(&mut rng, 4);
        let y = random_space(&mut rng, 4);
        let mut fiber: Vec<usize> = (0..4).collect();
        fiber.shuffle(&mut rng);
        let line = LineSpec::new(x.clone(), y, fiber).unwrap();
        let est = line_limit_magnitude(&line, &ExtrapolationConfig::default()).unwrap();
        let expect = magnitude(&x).value.unwrap();
        assert!(
            (est.value - expect).abs() <= (10.0 * est.error_estimate).max(1e-6),
            "limit {} vs |X| {}",
            est.value,
            expect
        );
    }

    #[test]
    fn six_fifths_join_line_limit() {
        let k3 = complete_graph(3).unwrap();
        let y = join(&k3, &k3.scale(2.0).unwrap(), 1.0).unwrap();
        let line = scaled_line(&y);
        let est = line_limit_magnitude(&line, &ExtrapolationConfig::default()).unwrap();
        assert!(
            (est.value - 1.2).abs() < 1e-4,
            "limit {} should be 6/5, err est {}",
            est.value,
            est.error_estimate
        );
    }

    #[test]
    fn iso_group_of_complete_graph_is_full_symmetric_group() {
        for n in 1..=4usize {
            let g = iso_group(&complete_graph(n).unwrap()).unwrap();
            let factorial: usize = (1..=n).product();
            assert_eq!(g.len(), factorial);
            assert!(g.contains(&(0..n).collect::<Vec<_>>()));
        }
    }

    #[test]
    fn iso_group_of_rigid_space_is_trivial() {
        // distances 1, 2, 3: brute force over all 6 permutations of 3 points
        // leaves only the identity, checked here independently
        let x = FiniteMetricSpace::new(
            &[
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 3.0],
                vec![2.0, 3.0, 0.0],
            ],
            None,
        )
        .unwrap();
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut expected = Vec::new();
        for p in perms {
            let ok = (0..3).all(|i| (0..3).all(|j| x.d(p[i], p[j]) == x.d(i, j)));
            if ok {
                expected.push(p.to_vec());
            }
        }
        assert_eq!(expected, vec![vec![0, 1, 2]]);
        assert_eq!(iso_group(&x).unwrap(), expected);
    }

    #[test]
    fn iso_group_of_six_fifths_space_has_order_36() {
        // both K_3 factors permute freely; the factors cannot swap because
        // their internal distances differ (1 vs 2)
        let k3 = complete_graph(3).unwrap();
        let y = join(&k3, &k3.scale(2.0).unwrap(), 1.0).unwrap();
        let g = iso_group(&y).unwrap();
        assert_eq!(g.len(), 36);
        // closed under composition
        for a in &g {
            for b in &g {
                let composed: Vec<usize> = (0..6).map(|i| a[b[i]]).collect();
                assert!(g.contains(&composed));
            }
        }
    }

    #[test]
    fn iso_group_refuses_large_spaces() {
        let mut rng = StdRng::seed_from_u64(2);
        let x = random_space(&mut rng, 11);
        assert!(matches!(
            iso_group(&x),
            Err(LineError::TooLargeForBruteForce { points: 11, .. })
        ));
    }

    #[test]
    fn line_equivalence_reflexive_and_relabel_within_fiber() {
        let x = complete_graph(2).unwrap();
        let y = complete_graph(3).unwrap();
        let l1 = LineSpec::new(x.clone(), y.clone(), vec![0, 0, 1]).unwrap();
        assert!(lines_equivalent(&l1, &l1).unwrap());
        // relabeling the two points of fiber 0 leaves an all-distances-equal
        // Y unchanged, so the lines coincide
        let l2 = LineSpec::new(x.clone(), y, vec![0, 0, 1]).unwrap();
        assert!(lines_equivalent(&l1, &l2).unwrap());
        // the same relabeling on a rigid Y is witnessed by h = (0 1)
        let y_rigid = FiniteMetricSpace::new(
            &[
                vec![0.0, 1.0, 1.5],
                vec![1.0, 0.0, 1.2],
                vec![1.5, 1.2, 0.0],
            ],
            None,
        )
        .unwrap();
        let y_swapped = y_rigid.permuted(&[1, 0, 2]).unwrap();
        let l3 = LineSpec::new(x.clone(), y_rigid, vec![0, 0, 1]).unwrap();
        let l4 = LineSpec::new(x, y_swapped, vec![0, 0, 1]).unwrap();
        assert!(lines_equivalent(&l3, &l4).unwrap());
        assert!(lines_equivalent(&l4, &l3).unwrap());
    }

    #[test]
    fn metrically_distinguishable_fibers_are_inequivalent() {
        // Y: two clusters, internal distances 1 vs 2, cross 2. Fibers of
        // sizes (2,1) vs (1,2) cannot be exchanged: exhaustive search over
        // h and k finds no solution.
        let y = FiniteMetricSpace::new(
            &[
                vec![0.0, 1.0, 2.0],
                vec![1.0, 0.0, 2.0],
                vec![2.0, 2.0, 0.0],
            ],
            None,
        )
        .unwrap();
        let x = complete_graph(2).unwrap();
        let l1 = LineSpec::new(x.clone(), y.clone(), vec![0, 0, 1]).unwrap();
        let l2 = LineSpec::new(x, y, vec![0, 1, 1]).unwrap();
        assert!(!lines_equivalent(&l1, &l2).unwrap());
    }

    #[test]
    fn line_limit_needs_enough_samples() {
        let line = scaled_line(&complete_graph(3).unwrap());
        let cfg = ExtrapolationConfig {
            steps: 3,
            ..Default::default()
        };
        assert!(matches!(
            line_limit_magnitude(&line, &cfg),
            Err(LineError::Extrapolation(
                ExtrapolationError::InsufficientWellConditionedSamples { .. }
            ))
        ));
    }

    #[test]
    fn equivalence_refuses_large_domains() {
        let mut rng = StdRng::seed_from_u64(3);
        let y = random_space(&mut rng, 13);
        let line = scaled_line(&y);
        assert!(matches!(
            lines_equivalent(&line, &line),
            Err(LineError::TooLargeForBruteForce { points: 13, .. })
        ));
    }

    #[test]
    fn equivalence_mismatched_targets_error() {
        let l1 = scaled_line(&complete_graph(2).unwrap());
        let x2 = complete_graph(2).unwrap();
        let y2 = complete_graph(3).unwrap();
        let l2 = LineSpec::new(x2, y2, vec![0, 1, 1]).unwrap();
        assert!(matches!(
            lines_equivalent(&l1, &l2),
            Err(LineError::TargetMismatch)
        ));
    }

    #[test]
    fn canonical_form_sorts_interleaved_fibers() {
        let mut rng = StdRng::seed_from_u64(23);
        let x = random_space(&mut rng, 2);
        let y = random_space(&mut rng, 5);
        let line = LineSpec::new(x, y, vec![1, 0, 1, 0, 0]).unwrap();
        let form = canonical_block_matrix(&line);
        assert_eq!(form.partition.sizes(), &[3, 2]);
        // block 0 holds the three fiber-0 points
        let sorted_fibers: Vec<usize> = form
            .permutation
            .iter()
            .map(|&old| line.fiber()[old])
            .collect();
        assert_eq!(sorted_fibers, vec![0, 0, 0, 1, 1]);
        // matrix agrees with the permuted original
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(
                    form.matrix.get(i, j),
                    line.y().d(form.permutation[i], form.permutation[j])
                );
            }
        }
    }

    #[test]
    fn already_sorted_line_is_fixed_by_canonicalization() {
        // two fibers with distinct rows already in block order
        let y = FiniteMetricSpace::new(
            &[
                vec![0.0, 1.0, 1.5],
                vec![1.0, 0.0, 1.2],
                vec![1.5, 1.2, 0.0],
            ],
            None,
        )
        .unwrap();
        let x = complete_graph(2).unwrap();
        let line = LineSpec::new(x, y.clone(), vec![0, 0, 1]).unwrap();
        let form = canonical_block_matrix(&line);
        // rows within fiber 0 are already in lexicographic order
        assert_eq!(form.permutation, vec![0, 1, 2]);
        assert_eq!(&form.matrix, y.dist());
    }

    #[test]
    fn canonical_line_is_equivalent_to_original() {
        let mut rng = StdRng::seed_from_u64(29);
        let x = random_space(&mut rng, 2);
        let y = random_space(&mut rng, 4);
        let line = LineSpec::new(x, y, vec![1, 0, 1, 0]).unwrap();
        let (canonical, perm) = line.canonicalized();
        assert!(lines_equivalent(&line, &canonical).unwrap());
        // the sorting permutation is the witness: canonical point i is
        // original point perm[i]
        for (new, &old) in perm.iter().enumerate() {
            assert_eq!(canonical.fiber()[new], line.fiber()[old]);
        }
        // line spaces agree up to the permutation
        let t = 0.4;
        let orig = line_space(&line, t).unwrap();
        let canon = line_space(&canonical, t).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(canon.d(i, j), orig.d(perm[i], perm[j]));
            }
        }
    }

    #[test]
    fn equivalence_invariant_under_target_isometry() {
        let mut rng = StdRng::seed_from_u64(31);
        let x = complete_graph(3).unwrap(); // plenty of isometries
        let y = random_space(&mut rng, 5);
        let fiber = vec![0, 1, 2, 0, 1];
        let l1 = LineSpec::new(x.clone(), y.clone(), fiber.clone()).unwrap();
        let isos = iso_group(&x).unwrap();
        for k in isos.iter().take(6) {
            let new_fiber: Vec<usize> = fiber.iter().map(|&i| k[i]).collect();
            let l2 = LineSpec::new(x.clone(), y.clone(), new_fiber).unwrap();
            assert!(lines_equivalent(&l1, &l2).unwrap());
            assert!(lines_equivalent(&l2, &l1).unwrap());
        }
    }

    #[test]
    fn block_partition_indexing() {
        let p = BlockPartition::new(vec![2, 1, 3]).unwrap();
        assert_eq!(p.total(), 6);
        assert_eq!(p.len(), 3);
        assert_eq!(p.range(0), 0..2);
        assert_eq!(p.range(2), 3..6);
        assert_eq!(p.size_product(), 6);
        let blocks: Vec<usize> = (0..6).map(|r| p.block_of(r)).collect();
        assert_eq!(blocks, vec![0, 0, 1, 2, 2, 2]);
        assert!(BlockPartition::new(vec![1, 0]).is_err());
    }
}
