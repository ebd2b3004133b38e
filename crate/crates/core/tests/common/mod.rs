//! Chart fixtures and a finite-difference curvature oracle shared by the
//! integration and acceptance targets.
#![allow(dead_code)]

use std::collections::BTreeMap;

use curvature::chart::PolyChart;
use curvature::poly::Polynomial;
use curvature::Curvature4Tensor;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random polynomial of total degree ≤ 2 with coefficients in `[-amp, amp)`.
pub fn random_quadratic(n: usize, rng: &mut ChaCha8Rng, amp: f64) -> Polynomial {
    let mut terms = vec![(vec![0; n], rng.random_range(-amp..amp))];
    for a in 0..n {
        let mut e = vec![0; n];
        e[a] = 1;
        terms.push((e, rng.random_range(-amp..amp)));
        for b in a..n {
            let mut e = vec![0; n];
            e[a] += 1;
            e[b] += 1;
            terms.push((e, rng.random_range(-amp..amp)));
        }
    }
    Polynomial::from_terms(n, terms)
}

/// Degree-2 chart: `diag(±1)` plus small quadratic metric terms (`q`
/// negative directions) and a quadratic cubic form.
pub fn random_chart(n: usize, q: usize, seed: u64) -> PolyChart {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut metric = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            let mut e = random_quadratic(n, &mut rng, 0.1);
            if i == j {
                let s = if i < n - q { 1.0 } else { -1.0 };
                e = &e + &Polynomial::constant(n, s);
            }
            metric.insert((i, j), e);
        }
    }
    let mut cubic = BTreeMap::new();
    for i in 0..n {
        for j in i..n {
            for k in j..n {
                cubic.insert((i, j, k), random_quadratic(n, &mut rng, 0.5));
            }
        }
    }
    PolyChart::from_sorted(n, &metric, &cubic, "|x| < 0.5").unwrap()
}

pub fn random_point(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-0.3..0.3)).collect()
}

fn shifted(x: &[f64], m: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[m] += h;
    y
}

/// Richardson-extrapolated central difference of a vector-valued function.
pub fn derivative(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], m: usize, h: f64) -> Vec<f64> {
    let central = |h: f64| -> Vec<f64> {
        let (a, b) = (f(&shifted(x, m, h)), f(&shifted(x, m, -h)));
        a.iter().zip(&b).map(|(p, q)| (p - q) / (2.0 * h)).collect()
    };
    let (coarse, fine) = (central(h), central(h / 2.0));
    coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect()
}

fn metric_values(chart: &PolyChart, x: &[f64]) -> Vec<f64> {
    chart.metric().iter().flatten().map(|p| p.eval(x)).collect()
}

fn inverse(n: usize, g: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(n, n, g).try_inverse().expect("metric invertible near the point")
}

/// `Γ^i_{jk} + s C^i_{jk}` at `[i][j][k]`, with metric derivatives by
/// finite differences and the inverse from an LU solve.
pub fn fd_connection(chart: &PolyChart, x: &[f64], s: f64, h: f64) -> Vec<f64> {
    let n = chart.dim();
    let gf = |y: &[f64]| metric_values(chart, y);
    let dg: Vec<Vec<f64>> = (0..n).map(|m| derivative(&gf, x, m, h)).collect();
    let inv = inverse(n, &gf(x));
    let mut out = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut v = 0.0;
                for l in 0..n {
                    let low = 0.5 * (dg[j][l * n + k] + dg[k][l * n + j] - dg[l][j * n + k]);
                    v += inv[(i, l)] * (low + s * chart.cubic(j, k, l).eval(x));
                }
                out[(i * n + j) * n + k] = v;
            }
        }
    }
    out
}

/// Lowered curvature of `Γ + s C` built entirely from finite differences.
pub fn fd_curvature(chart: &PolyChart, x: &[f64], s: f64, h: f64) -> Curvature4Tensor {
    let n = chart.dim();
    let conn = |y: &[f64]| fd_connection(chart, y, s, h / 4.0);
    let gt = conn(x);
    let dgt: Vec<Vec<f64>> = (0..n).map(|m| derivative(&conn, x, m, h)).collect();
    let at = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let g = metric_values(chart, x);
    Curvature4Tensor::from_fn(n, |k, l, j, m| {
        let mut v = 0.0;
        for i in 0..n {
            let mut r = dgt[k][at(i, l, j)] - dgt[l][at(i, k, j)];
            for p in 0..n {
                r += gt[at(i, k, p)] * gt[at(p, l, j)] - gt[at(i, l, p)] * gt[at(p, k, j)];
            }
            v += r * g[i * n + m];
        }
        v
    })
}
