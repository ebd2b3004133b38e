mod common;

use curvature::chart::{Connection, PolyChart};
use curvature::poly::{PolyMatrix, Polynomial};
use curvature::spaces::{membership_residual, Space};
use curvature::ScalarProduct;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const FD_STEP: f64 = 1e-2;

fn bump_chart(eps: f64) -> PolyChart {
    let n = 3;
    let diag = &Polynomial::constant(n, 1.0) + &Polynomial::from_terms(n, [(vec![2, 0, 0], eps)]);
    let zero = Polynomial::zero(n);
    let metric: PolyMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { diag.clone() } else { zero.clone() }).collect())
        .collect();
    PolyChart::new(metric, vec![zero; 27], "everywhere for eps > 0").unwrap()
}

fn relative(a: &curvature::Curvature4Tensor, b: &curvature::Curvature4Tensor) -> f64 {
    (a - b).max_norm() / a.max_norm().max(1.0)
}

#[test]
fn christoffel_matches_finite_differences() {
    let chart = bump_chart(0.7);
    let x = [0.4, -0.2, 0.3];
    let exact = chart.christoffel(&x).unwrap();
    let fd = common::fd_connection(&chart, &x, 0.0, FD_STEP);
    let worst = exact
        .gamma_values()
        .iter()
        .zip(&fd)
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(worst < 1e-9, "Γ differs by {worst}");
    // ∂Γ against differences of the exact Γ
    for m in 0..3 {
        let d = common::derivative(&|y: &[f64]| chart.christoffel(y).unwrap().gamma_values().to_vec(), &x, m, FD_STEP);
        for (idx, v) in d.iter().enumerate() {
            assert!((exact.dgamma_values()[m * 27 + idx] - v).abs() < 1e-8);
        }
    }
}

#[test]
fn levi_civita_curvature_matches_oracle_on_bump_metric() {
    let chart = bump_chart(0.5);
    let x = [0.3, 0.1, -0.2];
    let exact = chart.curvature_at(&x, Connection::LeviCivita).unwrap();
    let fd = common::fd_curvature(&chart, &x, 0.0, FD_STEP);
    assert!(exact.max_norm() > 1e-2);
    assert!(relative(&exact, &fd) < 1e-7, "{}", relative(&exact, &fd));
}

#[test]
fn all_three_curvatures_match_oracle_on_random_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (seed, q) in [(1, 0), (2, 1), (3, 0), (4, 1)] {
        let chart = common::random_chart(3, q, seed);
        let x = common::random_point(3, &mut rng);
        for (which, s) in [(Connection::LeviCivita, 0.0), (Connection::Nabla, 1.0), (Connection::NablaStar, -1.0)] {
            let exact = chart.curvature_at(&x, which).unwrap();
            let fd = common::fd_curvature(&chart, &x, s, FD_STEP);
            assert!(relative(&exact, &fd) < 1e-7, "{which:?} seed {seed}: {}", relative(&exact, &fd));
        }
    }
}

#[test]
fn curvatures_are_generalized_and_levi_civita_is_algebraic() {
    let chart = common::random_chart(4, 1, 11);
    let x = [0.1, -0.2, 0.05, 0.2];
    let g = ScalarProduct::new(chart.metric_at(&x).unwrap()).unwrap();
    for which in [Connection::Nabla, Connection::NablaStar] {
        let r = chart.curvature_at(&x, which).unwrap();
        assert!(membership_residual(&r, &g, Space::R).unwrap() < 1e-12);
    }
    let lc = chart.curvature_at(&x, Connection::LeviCivita).unwrap();
    assert!(membership_residual(&lc, &g, Space::A).unwrap() < 1e-12);
}

#[test]
fn conjugate_connection_gives_conjugate_curvature() {
    let chart = common::random_chart(3, 1, 5);
    let x = [0.2, 0.1, -0.1];
    let r = chart.curvature_at(&x, Connection::Nabla).unwrap();
    let r_star = chart.curvature_at(&x, Connection::NablaStar).unwrap();
    assert!(relative(&r.conjugate(), &r_star) < 1e-12);
}

#[test]
fn triple_report_on_random_charts() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for seed in 20..26 {
        let chart = common::random_chart(3, (seed % 2) as usize, seed);
        let x = common::random_point(3, &mut rng);
        let rep = chart.conjugate_triple_report(&x).unwrap();
        for (name, v) in &rep.identity_residuals {
            assert!(*v <= 1e-9, "{name} = {v}");
        }
        assert_eq!(rep.point, x);
        assert_eq!((rep.c_op.len(), rep.tchebychev_form.len()), (27, 3));
        // J = |C|² / (n(n-1)) with the full g-contraction
        let g = ScalarProduct::new(chart.metric_at(&x).unwrap()).unwrap();
        let c = |i: usize, j: usize, k: usize| chart.cubic(i, j, k).eval(&x);
        let mut norm = 0.0;
        for [i, j, k, a, b, e] in (0..729).map(|t| [t / 243, t / 81 % 3, t / 27 % 3, t / 9 % 3, t / 3 % 3, t % 3]) {
            norm += c(i, j, k) * c(a, b, e) * g.inv(i, a) * g.inv(j, b) * g.inv(k, e);
        }
        assert!((rep.pick_invariant - norm / 6.0).abs() < 1e-12 * norm.abs().max(1.0));
    }
}
