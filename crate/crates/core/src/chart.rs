//! Conjugate triples `(∇, g, ∇*)` on polynomial coordinate charts, with
//! `∇ = ∇(g) + C` and `∇* = ∇(g) - C`.
//!
//! Polynomial entries are differentiated exactly and evaluated at the
//! requested point; no finite differences are involved.
//!
//! Index conventions (all arrays flat, row-major):
//! - `Γ^i_{jk}` and `C^i_{jk}` are stored at `[i][j][k]`.
//! - The coordinate curvature `R_{jkl}^i = ∂_k Γ̃^i_{lj} - ∂_l Γ̃^i_{kj}
//!   + Γ̃^i_{kh} Γ̃^h_{lj} - Γ̃^i_{lh} Γ̃^h_{kj}` is the operator
//!   `R(∂_k, ∂_l)∂_j`, lowered to `R(∂_k, ∂_l, ∂_j, ∂_m) = R_{jkl}^i g_{im}`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{BilinearForm, ScalarProduct};
use crate::poly::{PolyMatrix, Polynomial};
use crate::spaces::{self, generalized_residual, membership_residual, Space};
use crate::tensor::Curvature4Tensor;

/// Below this `|det g(x)|` the metric counts as degenerate at `x`.
pub const POINT_DEGENERACY: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connection {
    LeviCivita,
    Nabla,
    NablaStar,
}

impl Connection {
    fn sign(self) -> f64 {
        match self {
            Connection::LeviCivita => 0.0,
            Connection::Nabla => 1.0,
            Connection::NablaStar => -1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PolyChart {
    dim: usize,
    metric: PolyMatrix,
    /// Full `n³` array of `C♭_{ijk}`.
    cubic: Vec<Polynomial>,
    pub domain_note: String,
}

fn max_coefficient(p: &Polynomial) -> f64 {
    p.terms().values().fold(0.0, |m, c| m.max(c.abs()))
}

impl PolyChart {
    /// Validates that `metric` is symmetric and `cubic` (length `n³`) is
    /// totally symmetric, coefficientwise.
    pub fn new(metric: PolyMatrix, cubic: Vec<Polynomial>, domain_note: impl Into<String>) -> Result<Self> {
        let n = metric.len();
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        if metric.iter().any(|row| row.len() != n) {
            return Err(Error::Schema {
                path: "metric".into(),
                message: "metric must be square".into(),
            });
        }
        if cubic.len() != n * n * n {
            return Err(Error::LengthMismatch {
                expected: n * n * n,
                found: cubic.len(),
            });
        }
        for p in metric.iter().flatten().chain(cubic.iter()) {
            if p.num_vars() != n {
                return Err(Error::Schema {
                    path: "chart".into(),
                    message: format!("polynomial in {} variables, expected {n}", p.num_vars()),
                });
            }
        }
        let mut asym: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                asym = asym.max(max_coefficient(&(&metric[i][j] - &metric[j][i])));
            }
        }
        let c = |i: usize, j: usize, k: usize| &cubic[(i * n + j) * n + k];
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    asym = asym
                        .max(max_coefficient(&(c(i, j, k) - c(j, i, k))))
                        .max(max_coefficient(&(c(i, j, k) - c(i, k, j))));
                }
            }
        }
        if asym > 0.0 {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(Self {
            dim: n,
            metric,
            cubic,
            domain_note: domain_note.into(),
        })
    }

    /// Builds a chart from upper-triangular metric entries `(i ≤ j)` and
    /// sorted cubic entries `(i ≤ j ≤ k)`; missing entries are zero.
    pub fn from_sorted(
        dim: usize,
        metric: &BTreeMap<(usize, usize), Polynomial>,
        cubic: &BTreeMap<(usize, usize, usize), Polynomial>,
        domain_note: impl Into<String>,
    ) -> Result<Self> {
        let zero = Polynomial::zero(dim);
        let m = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| metric.get(&(i.min(j), i.max(j))).cloned().unwrap_or_else(|| zero.clone()))
                    .collect()
            })
            .collect();
        let mut c = Vec::with_capacity(dim.pow(3));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let mut key = [i, j, k];
                    key.sort_unstable();
                    c.push(cubic.get(&(key[0], key[1], key[2])).cloned().unwrap_or_else(|| zero.clone()));
                }
            }
        }
        Self::new(m, c, domain_note)
    }

    /// Constant metric and constant cubic form.
    pub fn constant(g: &BilinearForm, cubic: &[f64]) -> Result<Self> {
        let n = g.dim();
        let metric = (0..n)
            .map(|i| (0..n).map(|j| Polynomial::constant(n, g.get(i, j))).collect())
            .collect();
        let c = cubic.iter().map(|v| Polynomial::constant(n, *v)).collect();
        Self::new(metric, c, "constant coefficients")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &PolyMatrix {
        &self.metric
    }

    /// `C♭_{ijk}`.
    pub fn cubic(&self, i: usize, j: usize, k: usize) -> &Polynomial {
        &self.cubic[(i * self.dim + j) * self.dim + k]
    }

    pub fn metric_at(&self, x: &[f64]) -> Result<BilinearForm> {
        self.check_point(x)?;
        Ok(BilinearForm::from_fn(self.dim, |i, j| self.metric[i][j].eval(x)))
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: x.len(),
            });
        }
        Ok(())
    }
}

/// Values and first derivatives at a point, `[m][i][j][k]` for derivatives.
#[derive(Debug, Clone)]
pub struct Christoffel {
    n: usize,
    gamma: Vec<f64>,
    dgamma: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.n
    }

    /// `Γ^i_{jk}`.
    pub fn gamma(&self, i: usize, j: usize, k: usize) -> f64 {
        self.gamma[(i * self.n + j) * self.n + k]
    }

    /// `∂_m Γ^i_{jk}`.
    pub fn dgamma(&self, m: usize, i: usize, j: usize, k: usize) -> f64 {
        self.dgamma[((m * self.n + i) * self.n + j) * self.n + k]
    }

    pub fn gamma_values(&self) -> &[f64] {
        &self.gamma
    }

    pub fn dgamma_values(&self) -> &[f64] {
        &self.dgamma
    }
}

/// Everything evaluated at one point.
struct PointData {
    n: usize,
    g: ScalarProduct,
    /// Levi-Civita coefficients.
    lc: Christoffel,
    /// `C^i_{jk}` and `∂_m C^i_{jk}` in the same layout.
    c: Christoffel,
    /// `C♭_{ijk}` values.
    cflat: Vec<f64>,
}

/// Entry values of `∂_m p` for every polynomial in `ps`, laid out `[m][idx]`.
fn gradients(ps: &[&Polynomial], n: usize, x: &[f64]) -> Vec<Vec<f64>> {
    (0..n)
        .map(|m| ps.iter().map(|p| p.derivative(m).eval(x)).collect())
        .collect()
}

impl PolyChart {
    /// Evaluates `g`, `∂g`, `∂²g` and `C♭`, `∂C♭` at `x`; the inverse metric
    /// is differentiated as `∂(g⁻¹) = -g⁻¹ (∂g) g⁻¹`, the quotient rule for
    /// `adj(g)/det(g)` at the point.
    fn point_data(&self, x: &[f64]) -> Result<PointData> {
        let n = self.dim;
        let gx = self.metric_at(x)?;
        let det_val = gx.to_matrix().determinant();
        if det_val.is_nan() || det_val.abs() < POINT_DEGENERACY {
            return Err(Error::DegenerateAtPoint { det: det_val });
        }
        let g = ScalarProduct::new(gx).map_err(|e| match e {
            Error::DegenerateMetric { .. } => Error::DegenerateAtPoint { det: det_val },
            other => other,
        })?;
        let entries: Vec<&Polynomial> = self.metric.iter().flatten().collect();
        let first: Vec<Vec<Polynomial>> = (0..n)
            .map(|m| entries.iter().map(|p| p.derivative(m)).collect())
            .collect();
        // dg[m][a*n+b] = ∂_m g_ab, ddg[m][q][a*n+b] = ∂_q ∂_m g_ab
        let dg: Vec<Vec<f64>> = first.iter().map(|row| row.iter().map(|p| p.eval(x)).collect()).collect();
        let ddg: Vec<Vec<Vec<f64>>> = first
            .iter()
            .map(|row| gradients(&row.iter().collect::<Vec<_>>(), n, x))
            .collect();
        let cflat: Vec<f64> = self.cubic.iter().map(|p| p.eval(x)).collect();
        let dcflat = gradients(&self.cubic.iter().collect::<Vec<_>>(), n, x);

        let n3 = n * n * n;
        let inv = |a: usize, b: usize| g.inv(a, b);
        // ∂_m g^{ab}
        let dinv = |m: usize, a: usize, b: usize| -> f64 {
            let mut v = 0.0;
            for p in 0..n {
                for q in 0..n {
                    v -= inv(a, p) * dg[m][p * n + q] * inv(q, b);
                }
            }
            v
        };
        let dinv_all: Vec<f64> = (0..n)
            .flat_map(|m| (0..n).flat_map(move |a| (0..n).map(move |b| (m, a, b))))
            .map(|(m, a, b)| dinv(m, a, b))
            .collect();
        let di = |m: usize, a: usize, b: usize| dinv_all[(m * n + a) * n + b];

        // Γ♭_{ljk} = ½(∂_j g_lk + ∂_k g_lj - ∂_l g_jk) and its derivatives
        let low = |l: usize, j: usize, k: usize| 0.5 * (dg[j][l * n + k] + dg[k][l * n + j] - dg[l][j * n + k]);
        let dlow = |m: usize, l: usize, j: usize, k: usize| {
            0.5 * (ddg[j][m][l * n + k] + ddg[k][m][l * n + j] - ddg[l][m][j * n + k])
        };
        let cf = |l: usize, j: usize, k: usize| cflat[(l * n + j) * n + k];
        let dcf = |m: usize, l: usize, j: usize, k: usize| dcflat[m][(l * n + j) * n + k];

        let mut lc = Christoffel { n, gamma: vec![0.0; n3], dgamma: vec![0.0; n * n3] };
        let mut c = Christoffel { n, gamma: vec![0.0; n3], dgamma: vec![0.0; n * n3] };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let idx = (i * n + j) * n + k;
                    lc.gamma[idx] = (0..n).map(|l| inv(i, l) * low(l, j, k)).sum();
                    c.gamma[idx] = (0..n).map(|l| inv(i, l) * cf(l, j, k)).sum();
                    for m in 0..n {
                        lc.dgamma[m * n3 + idx] = (0..n)
                            .map(|l| di(m, i, l) * low(l, j, k) + inv(i, l) * dlow(m, l, j, k))
                            .sum();
                        c.dgamma[m * n3 + idx] = (0..n)
                            .map(|l| di(m, i, l) * cf(l, j, k) + inv(i, l) * dcf(m, l, j, k))
                            .sum();
                    }
                }
            }
        }
        Ok(PointData { n, g, lc, c, cflat })
    }

    /// Levi-Civita coefficients and their coordinate derivatives at `x`.
    pub fn christoffel(&self, x: &[f64]) -> Result<Christoffel> {
        Ok(self.point_data(x)?.lc)
    }

    /// Lowered curvature of the chosen connection at `x`.
    pub fn curvature_at(&self, x: &[f64], which: Connection) -> Result<Curvature4Tensor> {
        let pd = self.point_data(x)?;
        Ok(lower(&curvature13(&pd, which.sign()), &pd))
    }

    pub fn conjugate_triple_report(&self, x: &[f64]) -> Result<TripleReport> {
        let pd = self.point_data(x)?;
        Ok(triple_report(&pd, x))
    }
}

/// `R_{jkl}^i` at `[j][k][l][i]` for `Γ̃ = Γ + s·C`.
fn curvature13(pd: &PointData, s: f64) -> Vec<f64> {
    let n = pd.n;
    let gt = |i: usize, j: usize, k: usize| pd.lc.gamma(i, j, k) + s * pd.c.gamma(i, j, k);
    let dgt = |m: usize, i: usize, j: usize, k: usize| pd.lc.dgamma(m, i, j, k) + s * pd.c.dgamma(m, i, j, k);
    let mut out = vec![0.0; n.pow(4)];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    let mut v = dgt(k, i, l, j) - dgt(l, i, k, j);
                    for h in 0..n {
                        v += gt(i, k, h) * gt(h, l, j) - gt(i, l, h) * gt(h, k, j);
                    }
                    out[((j * n + k) * n + l) * n + i] = v;
                }
            }
        }
    }
    out
}

/// `T(∂_k, ∂_l, ∂_j, ∂_m) = R_{jkl}^i g_{im}`.
fn lower(r13: &[f64], pd: &PointData) -> Curvature4Tensor {
    let n = pd.n;
    Curvature4Tensor::from_fn(n, |k, l, j, m| {
        (0..n).map(|i| r13[((j * n + k) * n + l) * n + i] * pd.g.g(i, m)).sum()
    })
}

/// `∇(g)_k C^i_{jl}` at `[k][i][j][l]`.
fn covariant_c(pd: &PointData) -> Vec<f64> {
    let n = pd.n;
    let (g, c) = (&pd.lc, &pd.c);
    let mut out = vec![0.0; n.pow(4)];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let mut v = c.dgamma(k, i, j, l);
                    for h in 0..n {
                        v += g.gamma(i, k, h) * c.gamma(h, j, l)
                            - g.gamma(h, k, j) * c.gamma(i, h, l)
                            - g.gamma(h, k, l) * c.gamma(i, j, h);
                    }
                    out[((k * n + i) * n + j) * n + l] = v;
                }
            }
        }
    }
    out
}

/// Pointwise data of a conjugate triple and the residuals of its identities.
#[derive(Debug, Clone)]
pub struct TripleReport {
    pub point: Vec<f64>,
    pub metric: BilinearForm,
    pub r: Curvature4Tensor,
    pub r_star: Curvature4Tensor,
    pub r_g: Curvature4Tensor,
    /// `C^i_{jk}` at `[i][j][k]`.
    pub c_op: Vec<f64>,
    pub tchebychev_form: Vec<f64>,
    pub tchebychev_vector: Vec<f64>,
    /// `C̃^i_{jk}` at `[i][j][k]`.
    pub c_tilde: Vec<f64>,
    pub pick_invariant: f64,
    pub tau: f64,
    pub kappa: f64,
    pub identity_residuals: BTreeMap<String, f64>,
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// `|diff| / max(1, scale)`.
fn normalized(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

fn triple_report(pd: &PointData, x: &[f64]) -> TripleReport {
    let n = pd.n;
    let nf = n as f64;
    let n4 = n.pow(4);
    let r13 = curvature13(pd, 1.0);
    let rs13 = curvature13(pd, -1.0);
    let rg13 = curvature13(pd, 0.0);
    let nc = covariant_c(pd);
    let c = |i: usize, j: usize, k: usize| pd.c.gamma(i, j, k);
    let at = |j: usize, k: usize, l: usize, i: usize| ((j * n + k) * n + l) * n + i;

    // D = ∇_k C^i_{jl} - ∇_l C^i_{jk}, γ = C^h_{jl} C^i_{hk} - C^h_{jk} C^i_{hl}
    let mut d = vec![0.0; n4];
    let mut gam = vec![0.0; n4];
    for j in 0..n {
        for k in 0..n {
            for l in 0..n {
                for i in 0..n {
                    d[at(j, k, l, i)] = nc[((k * n + i) * n + j) * n + l] - nc[((l * n + i) * n + j) * n + k];
                    gam[at(j, k, l, i)] = (0..n).map(|h| c(h, j, l) * c(i, h, k) - c(h, j, k) * c(i, h, l)).sum();
                }
            }
        }
    }
    let scale = max_abs(r13.iter().chain(&rs13).chain(&rg13).chain(&d).chain(&gam).copied());
    let id = |f: &dyn Fn(usize) -> f64| normalized(max_abs((0..n4).map(f)), scale);
    let mut res = BTreeMap::new();
    res.insert("lemma_7_6_1".to_string(), id(&|q| r13[q] - rg13[q] - (d[q] + gam[q])));
    res.insert("lemma_7_6_2".to_string(), id(&|q| rs13[q] - rg13[q] - (-d[q] + gam[q])));
    res.insert("lemma_7_6_3".to_string(), id(&|q| r13[q] - rs13[q] - 2.0 * d[q]));
    let diff_norm = max_abs((0..n4).map(|q| r13[q] - rs13[q]));
    let d_norm = max_abs(d.iter().copied());
    res.insert("lemma_7_6_4".to_string(), normalized((diff_norm - 2.0 * d_norm).abs(), scale));
    res.insert(
        "lemma_7_6_5".to_string(),
        id(&|q| r13[q] + rs13[q] - 2.0 * rg13[q] - 2.0 * gam[q]),
    );

    let r = lower(&r13, pd);
    let r_star = lower(&rs13, pd);
    let r_g = lower(&rg13, pd);
    let g = &pd.g;

    // Tchebychev form and vector, C̃
    let t_form: Vec<f64> = (0..n).map(|v| (0..n).map(|k| c(k, k, v)).sum::<f64>() / nf).collect();
    let t_vec: Vec<f64> = (0..n).map(|i| (0..n).map(|j| g.inv(i, j) * t_form[j]).sum()).collect();
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut c_op = vec![0.0; n * n * n];
    let mut c_tilde = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let idx = (i * n + j) * n + k;
                c_op[idx] = c(i, j, k);
                c_tilde[idx] = c(i, j, k)
                    - nf / (nf + 2.0) * (t_form[j] * delta(k, i) + t_form[k] * delta(j, i) + g.g(j, k) * t_vec[i]);
            }
        }
    }
    let c_tilde_flat = |j: usize, k: usize, m: usize| -> f64 {
        (0..n).map(|i| c_tilde[(i * n + j) * n + k] * g.g(i, m)).sum()
    };
    let mut ct_trace: f64 = 0.0;
    for m in 0..n {
        let t1: f64 = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| g.inv(a, b) * c_tilde_flat(a, b, m)).sum();
        let t2: f64 = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| g.inv(a, b) * c_tilde_flat(a, m, b)).sum();
        let t3: f64 = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| g.inv(a, b) * c_tilde_flat(m, a, b)).sum();
        ct_trace = ct_trace.max(t1.abs()).max(t2.abs()).max(t3.abs());
    }
    res.insert(
        "c_tilde_trace_free".to_string(),
        normalized(ct_trace, max_abs(c_op.iter().copied())),
    );

    // ‖C‖² = C♭_{ijk} C♭^{ijk}, ‖T‖² = T_i T^i
    let cf = &pd.cflat;
    let mut c_norm = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let mut raised = 0.0;
                for a in 0..n {
                    for b in 0..n {
                        for e in 0..n {
                            raised += g.inv(i, a) * g.inv(j, b) * g.inv(k, e) * cf[(a * n + b) * n + e];
                        }
                    }
                }
                c_norm += cf[(i * n + j) * n + k] * raised;
            }
        }
    }
    let t_norm: f64 = (0..n).map(|i| t_form[i] * t_vec[i]).sum();
    let tau = spaces::scalar_curvature(&r, g);
    let kappa = spaces::scalar_curvature(&r_g, g) / (nf * (nf - 1.0));
    let lhs = tau - nf * (nf - 1.0) * kappa;
    let rhs = nf * nf * t_norm - c_norm;
    res.insert(
        "remark_7_7".to_string(),
        normalized((lhs - rhs).abs(), tau.abs().max(lhs.abs()).max(c_norm.abs()).max((nf * nf * t_norm).abs())),
    );

    let sum = &r + &r_star;
    res.insert(
        "obs_7_8".to_string(),
        membership_residual(&sum, g, Space::A).unwrap_or(f64::MAX),
    );
    let lr = spaces::ric(&r, g).antisymmetric_part();
    let lrs = spaces::ric(&r_star, g).antisymmetric_part();
    res.insert(
        "ric_sym_equiv".to_string(),
        normalized((&lr + &lrs).max_norm(), lr.max_norm().max(lrs.max_norm())),
    );
    res.insert(
        "conjugacy".to_string(),
        normalized((&r_star - &r.conjugate()).max_norm(), r.max_norm().max(r_star.max_norm())),
    );
    res.insert(
        "bianchi_both".to_string(),
        generalized_residual(&r).max(generalized_residual(&r_star)),
    );
    res.insert(
        "levi_civita_algebraic".to_string(),
        membership_residual(&r_g, g, Space::A).unwrap_or(f64::MAX),
    );

    TripleReport {
        point: x.to_vec(),
        metric: g.matrix().clone(),
        r,
        r_star,
        r_g,
        c_op,
        tchebychev_form: t_form,
        tchebychev_vector: t_vec,
        c_tilde,
        pick_invariant: c_norm / (nf * (nf - 1.0)),
        tau,
        kappa,
        identity_residuals: res,
    }
}
