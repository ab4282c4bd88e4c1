//! Shared generators for the property suites.
#![allow(dead_code)] // each test binary uses its own subset

use magspace::linalg::Matrix;
use magspace::space::FiniteMetricSpace;
use proptest::prelude::*;
use rand::Rng;

/// Distances drawn uniformly from [1, 2) satisfy the triangle inequality
/// with strict margin, giving generic spaces with no accidental structure.
pub fn space_strategy(n_range: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = FiniteMetricSpace> {
    n_range
        .prop_flat_map(|n| {
            let pairs = n * (n - 1) / 2;
            (
                Just(n),
                proptest::collection::vec(1.0f64..2.0, pairs),
            )
        })
        .prop_map(|(n, upper)| space_from_upper(n, &upper))
}

pub fn space_from_upper(n: usize, upper: &[f64]) -> FiniteMetricSpace {
    let mut dist = Matrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            dist.set(i, j, upper[k]);
            dist.set(j, i, upper[k]);
            k += 1;
        }
    }
    FiniteMetricSpace::from_matrix(dist, (0..n).map(|i| format!("p{i}")).collect())
        .expect("distances in [1,2) form a metric")
}

/// Random surjective fiber map from an `n`-point domain onto an `m`-point
/// target.
pub fn random_fiber<R: Rng>(rng: &mut R, n: usize, m: usize) -> Vec<usize> {
    assert!(n >= m);
    let mut fiber: Vec<usize> = (0..m).collect();
    for _ in m..n {
        fiber.push(rng.gen_range(0..m));
    }
    for i in (1..fiber.len()).rev() {
        let j = rng.gen_range(0..=i);
        fiber.swap(i, j);
    }
    fiber
}
