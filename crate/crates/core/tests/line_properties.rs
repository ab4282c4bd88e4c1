//! Property suite for lines: metric validity along the whole parameter
//! range, endpoint behavior, limit recovery for bijective lines, and the
//! equivalence relation.

mod common;

use common::{random_fiber, space_strategy};
use magspace::extrapolate::ExtrapolationConfig;
use magspace::lines::{line_limit_magnitude, line_space, lines_equivalent, LineSpec};
use magspace::magnitude::magnitude;
use magspace::space::{random_space, FiniteMetricSpace};
use proptest::prelude::*;
use rand::{rngs::StdRng, Rng, SeedableRng};

fn revalidate(x: &FiniteMetricSpace) -> bool {
    let rows: Vec<Vec<f64>> = (0..x.n()).map(|i| x.dist().row(i).to_vec()).collect();
    FiniteMetricSpace::new(&rows, None).is_ok()
}

#[test]
fn line_spaces_are_valid_metrics_for_twenty_parameters() {
    let mut rng = StdRng::seed_from_u64(211);
    for _ in 0..30 {
        let m = rng.gen_range(1..=4);
        let n = rng.gen_range(m.max(2)..=8);
        let x = random_space(&mut rng, m);
        let y = random_space(&mut rng, n);
        let fiber = random_fiber(&mut rng, n, m);
        let line = LineSpec::new(x, y, fiber).unwrap();
        for k in 1..=20 {
            let t = k as f64 / 20.0;
            let space = line_space(&line, t).unwrap();
            assert!(revalidate(&space), "t = {t}");
        }
    }
}

#[test]
fn endpoint_is_exact_and_deviation_is_linear_in_t() {
    let mut rng = StdRng::seed_from_u64(223);
    for _ in 0..20 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(m.max(2)..=6);
        let x = random_space(&mut rng, m);
        let y = random_space(&mut rng, n);
        let fiber = random_fiber(&mut rng, n, m);
        let line = LineSpec::new(x.clone(), y.clone(), fiber.clone()).unwrap();

        // at t = 1 the line reproduces y with zero tolerance
        assert_eq!(line_space(&line, 1.0).unwrap().dist(), y.dist());

        // entrywise |d_{f,t} - d_X(f x f)| <= t * max |d_Y - d_X(f x f)|
        let mut max_gap = 0.0f64;
        for u in 0..n {
            for v in 0..n {
                max_gap = max_gap.max((y.d(u, v) - x.d(fiber[u], fiber[v])).abs());
            }
        }
        for &t in &[0.5, 0.1, 0.01, 1e-3] {
            let space = line_space(&line, t).unwrap();
            for u in 0..n {
                for v in 0..n {
                    let deviation = (space.d(u, v) - x.d(fiber[u], fiber[v])).abs();
                    assert!(
                        deviation <= t * max_gap + 1e-12,
                        "t={t}: deviation {deviation} vs bound {}",
                        t * max_gap
                    );
                }
            }
        }
    }
}

#[test]
fn bijective_lines_recover_target_magnitude() {
    let mut rng = StdRng::seed_from_u64(227);
    let cfg = ExtrapolationConfig::default();
    for _ in 0..50 {
        let m = rng.gen_range(2..=6);
        let x = random_space(&mut rng, m);
        let y = random_space(&mut rng, m);
        let fiber = random_fiber(&mut rng, m, m);
        let line = LineSpec::new(x.clone(), y, fiber).unwrap();
        let est = line_limit_magnitude(&line, &cfg).unwrap();
        assert!(est.error_estimate >= 0.0);
        assert!(est.t_grid_used.windows(2).all(|w| w[0] > w[1]));
        let expect = magnitude(&x).value.unwrap();
        let tol = (10.0 * est.error_estimate).max(1e-6);
        assert!(
            (est.value - expect).abs() <= tol,
            "limit {} vs |X| {} (tol {tol})",
            est.value,
            expect
        );
    }
}

#[test]
fn equivalence_is_reflexive_symmetric_and_isometry_invariant() {
    let mut rng = StdRng::seed_from_u64(229);
    for _ in 0..20 {
        let m = rng.gen_range(1..=3);
        let n = rng.gen_range(m.max(2)..=6);
        // complete graphs have rich isometry groups, exercising the k loop
        let x = if rng.gen_bool(0.5) {
            magspace::space::complete_graph(m).unwrap()
        } else {
            random_space(&mut rng, m)
        };
        let y = random_space(&mut rng, n);
        let fiber = random_fiber(&mut rng, n, m);
        let l1 = LineSpec::new(x.clone(), y.clone(), fiber.clone()).unwrap();
        assert!(lines_equivalent(&l1, &l1).unwrap());

        let isos = magspace::lines::iso_group(&x).unwrap();
        let k = &isos[rng.gen_range(0..isos.len())];
        let moved: Vec<usize> = fiber.iter().map(|&i| k[i]).collect();
        let l2 = LineSpec::new(x.clone(), y.clone(), moved).unwrap();
        assert!(lines_equivalent(&l1, &l2).unwrap());
        assert!(lines_equivalent(&l2, &l1).unwrap());
    }
}

proptest! {
    #[test]
    fn canonical_form_is_deterministic_block_sorted_and_equivalent(
        y in space_strategy(3..=6),
        seed in 0u64..500,
    ) {
        let mut rng = StdRng::seed_from_u64(seed);
        let m = rng.gen_range(1..=y.n().min(3));
        let x = random_space(&mut rng, m);
        let fiber = random_fiber(&mut rng, y.n(), m);
        let line = LineSpec::new(x, y, fiber).unwrap();

        // deterministic: the same line always canonicalizes identically
        let (c1, p1) = line.canonicalized();
        let (c2, p2) = line.canonicalized();
        prop_assert_eq!(c1.y().dist(), c2.y().dist());
        prop_assert_eq!(p1, p2);

        // fiber ends up in block order, the partition is preserved, and the
        // canonical line represents the same point of the space of lines
        let mut sorted = line.fiber().to_vec();
        sorted.sort_unstable();
        prop_assert_eq!(c1.fiber(), &sorted[..]);
        prop_assert_eq!(c1.partition(), line.partition());
        prop_assert!(lines_equivalent(&line, &c1).unwrap());
    }
}
