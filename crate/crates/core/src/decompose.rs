//! The W- and A-decompositions of `r(V)`, the Singer–Thorpe split of
//! `a(V)`, and the derived objects built from the same trace data: the
//! projective part, the traceless core `R_o`, the forms `B*`/`B`, the
//! splitting maps `σ₁ + σ₂`, and the equiaffine Einstein test.
//!
//! All constants such as `-τ/(n(n-1))` are recomputed from the trace data
//! of each input; nothing is cached between calls.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{pairing_bound, pairing_unchecked, BilinearForm, ScalarProduct};
use crate::spaces::{self, last_pair_antisymmetry_residual, mu, psi, Space, MEMBERSHIP_TOLERANCE};
use crate::tensor::{dot, wedge, Curvature4Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Mode {
    #[serde(rename = "w")]
    W,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "st")]
    SingerThorpe,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::W => "w",
            Mode::A => "a",
            Mode::SingerThorpe => "st",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "w" | "W" => Ok(Mode::W),
            "a" | "A" => Ok(Mode::A),
            "st" | "ST" => Ok(Mode::SingerThorpe),
            other => Err(Error::UnknownSpace(other.to_string())),
        }
    }
}

/// Ricci, Ricci* and τ of one tensor, with the symmetric/antisymmetric parts
/// the projector formulas use.
#[derive(Debug, Clone)]
pub struct TraceData {
    pub n: usize,
    pub ric: BilinearForm,
    pub ric_star: BilinearForm,
    pub tau: f64,
}

impl TraceData {
    pub fn of(r: &Curvature4Tensor, g: &ScalarProduct) -> Self {
        let ric = spaces::ric(r, g);
        let ric_star = spaces::ric_star(r, g);
        let tau = spaces::scalar_curvature(r, g);
        Self {
            n: r.dim(),
            ric,
            ric_star,
            tau,
        }
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `x·Ric + y·Ric*`
    fn mix(&self, x: f64, y: f64) -> BilinearForm {
        &(x * &self.ric) + &(y * &self.ric_star)
    }
}

/// The eight W-components `π₁(R) … π₈(R)` from their closed forms.
pub fn w_components(r: &Curvature4Tensor, g: &ScalarProduct) -> [Curvature4Tensor; 8] {
    let t = TraceData::of(r, g);
    let n = t.nf();
    let gm = g.matrix();
    let gg = wedge(gm, gm, 0.0);
    let tau = t.tau;
    let lric = t.ric.antisymmetric_part();
    let lric_star = t.ric_star.antisymmetric_part();
    let sric = t.ric.symmetric_part();

    let pi1 = (-tau / (n * (n - 1.0))) * &gg;

    let pi2 = (1.0 / (n - 1.0)) * wedge(&(&((tau / n) * gm) - &sric), gm, 0.0);

    let pi3 = (-1.0 / (n + 1.0)) * (2.0 * dot(&lric, gm) + wedge(&lric, gm, 0.0));

    let pi4 = (-1.0 / (n * n - 4.0)) * (2.0 * dot(&lric_star, gm) + wedge(&lric_star, gm, n + 1.0))
        - (3.0 / ((n * n - 4.0) * (n + 1.0)))
            * (2.0 * dot(&lric, gm) + wedge(&lric, gm, n + 1.0));

    let s5 = t.mix(1.0, n - 1.0).symmetric_part();
    let pi5 = (1.0 / ((n - 1.0) * (n - 2.0)))
        * (tau * &gg - (1.0 / n) * wedge(&s5, gm, n - 1.0));

    let psi_r = psi(r);
    let mu_r = mu(r);

    let s6 = t.mix(1.0, 1.0).symmetric_part();
    let pi6 = &psi_r + &((1.0 / (2.0 * (n - 2.0))) * wedge(&s6, gm, 1.0))
        - (tau / ((n - 1.0) * (n - 2.0))) * &gg;

    let s7 = t.mix(1.0, -1.0).symmetric_part();
    let l7 = t.mix(3.0, -1.0).antisymmetric_part();
    let pi7 = &mu_r
        + &((1.0 / (2.0 * n)) * wedge(&s7, gm, -1.0))
        + (1.0 / (2.0 * (n + 2.0))) * dot(&l7, gm)
        + (1.0 / (4.0 * (n + 2.0))) * wedge(&l7, gm, -1.0);

    let l8 = t.mix(1.0, 1.0).antisymmetric_part();
    let pi8 = &(&(r - &psi_r) - &mu_r)
        + &((1.0 / (2.0 * (n - 2.0))) * dot(&l8, gm))
        + (1.0 / (4.0 * (n - 2.0))) * wedge(&l8, gm, 3.0);

    [pi1, pi2, pi3, pi4, pi5, pi6, pi7, pi8]
}

/// The eight A-components `α₁(R) … α₈(R)` from their closed forms.
pub fn a_components(r: &Curvature4Tensor, g: &ScalarProduct) -> [Curvature4Tensor; 8] {
    let t = TraceData::of(r, g);
    let n = t.nf();
    let gm = g.matrix();
    let gg = wedge(gm, gm, 0.0);
    let tau = t.tau;

    let a1 = (-tau / (n * (n - 1.0))) * &gg;

    let s2 = t.mix(1.0, 1.0).symmetric_part();
    let a2 = (-1.0 / (2.0 * (n - 2.0))) * wedge(&s2, gm, 1.0)
        + (2.0 * tau / (n * (n - 2.0))) * &gg;

    let s3 = t.mix(1.0, -1.0).symmetric_part();
    let a3 = (-1.0 / (2.0 * n)) * wedge(&s3, gm, -1.0);

    let l4 = t.mix(3.0, -1.0).antisymmetric_part();
    let a4 = (-1.0 / (4.0 * (n + 2.0))) * (2.0 * dot(&l4, gm) + wedge(&l4, gm, -1.0));

    let l5 = t.mix(1.0, 1.0).antisymmetric_part();
    let a5 = (-1.0 / (4.0 * (n - 2.0))) * (2.0 * dot(&l5, gm) + wedge(&l5, gm, 3.0));

    let psi_r = psi(r);
    let mu_r = mu(r);
    let a6 = &(&psi_r - &a1) - &a2;
    let a7 = &(&mu_r - &a3) - &a4;
    let a8 = &(&(r - &mu_r) - &psi_r) - &a5;

    [a1, a2, a3, a4, a5, a6, a7, a8]
}

/// Components of a decomposition together with its diagnostics.
#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub mode: Mode,
    pub components: Vec<Curvature4Tensor>,
    /// `max|Σ components - R| / max|R|`
    pub completeness_residual: f64,
    /// Pairwise `tensor_pairing` of the components.
    pub orthogonality_matrix: Vec<Vec<f64>>,
    /// Pairing of `|R|` with itself, the scale for orthogonality residuals.
    pub pairing_scale: f64,
}

impl DecompositionResult {
    fn assemble(mode: Mode, input: &Curvature4Tensor, components: Vec<Curvature4Tensor>, g: &ScalarProduct) -> Self {
        let sum: Option<Curvature4Tensor> = components.iter().sum();
        let sum = sum.unwrap_or_else(|| Curvature4Tensor::zeros(input.dim()));
        let scale = input.max_norm();
        let diff = (&sum - input).max_norm();
        let completeness_residual = if scale > 0.0 { diff / scale } else { diff };
        let k = components.len();
        let mut orthogonality_matrix = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in i..k {
                let v = pairing_unchecked(&components[i], &components[j], g.inverse());
                orthogonality_matrix[i][j] = v;
                orthogonality_matrix[j][i] = v;
            }
        }
        Self {
            mode,
            components,
            completeness_residual,
            orthogonality_matrix,
            pairing_scale: pairing_bound(input, input, g),
        }
    }

    /// Largest off-diagonal entry relative to `pairing_scale`. Components
    /// that vanish up to rounding (W₆ at n = 3) would make a diagonal-based
    /// scale meaningless.
    pub fn orthogonality_residual(&self) -> f64 {
        let m = &self.orthogonality_matrix;
        let mut worst: f64 = 0.0;
        for i in 0..m.len() {
            for j in 0..i {
                worst = worst.max(m[i][j].abs());
            }
        }
        if self.pairing_scale > 0.0 {
            worst / self.pairing_scale
        } else {
            worst
        }
    }
}

fn require_generalized(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<()> {
    let residual = spaces::membership_residual(r, g, Space::R)?;
    if residual > MEMBERSHIP_TOLERANCE {
        return Err(Error::NotGeneralizedCurvature { residual });
    }
    Ok(())
}

pub fn w_decompose(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<DecompositionResult> {
    require_generalized(r, g)?;
    Ok(DecompositionResult::assemble(Mode::W, r, w_components(r, g).to_vec(), g))
}

pub fn a_decompose(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<DecompositionResult> {
    require_generalized(r, g)?;
    Ok(DecompositionResult::assemble(Mode::A, r, a_components(r, g).to_vec(), g))
}

/// Constant-curvature, Ricci-traceless and Weyl parts `(u, z, w)` of an
/// algebraic curvature tensor, taken as `(α₁, α₂, α₆)`.
pub fn singer_thorpe(a: &Curvature4Tensor, g: &ScalarProduct) -> Result<DecompositionResult> {
    require_generalized(a, g)?;
    let scale = a.max_norm();
    let raw = last_pair_antisymmetry_residual(a);
    let residual = if scale > 0.0 { raw / scale } else { raw };
    if residual > MEMBERSHIP_TOLERANCE {
        return Err(Error::NotAlgebraic { residual });
    }
    let [a1, a2, _, _, _, a6, _, _] = a_components(a, g);
    Ok(DecompositionResult::assemble(Mode::SingerThorpe, a, vec![a1, a2, a6], g))
}

/// The coefficient `c` with `u = c{g(x,w)g(y,z) - g(x,z)g(y,w)} = -c (g∧g)`.
pub fn constant_curvature_coefficient(u: &Curvature4Tensor, g: &ScalarProduct) -> f64 {
    let n = u.dim() as f64;
    TraceData::of(u, g).tau / (n * (n - 1.0))
}

/// The traceless symmetric `Ξ` with `z = -Ξ ∧₁ g` for `z` in the
/// Ricci-traceless algebraic part, recovered as `Ric(z) / (n - 2)`.
pub fn ricci_traceless_generator(z: &Curvature4Tensor, g: &ScalarProduct) -> BilinearForm {
    let n = z.dim() as f64;
    (1.0 / (n - 2.0)) * spaces::ric(z, g)
}

/// `p(R) = R - π₁(R) - π₂(R) - π₃(R)`.
pub fn projective_part(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<Curvature4Tensor> {
    require_generalized(r, g)?;
    Ok(projective_part_unchecked(r, g))
}

pub(crate) fn projective_part_unchecked(r: &Curvature4Tensor, g: &ScalarProduct) -> Curvature4Tensor {
    let [p1, p2, p3, ..] = w_components(r, g);
    &(&(r - &p1) - &p2) - &p3
}

/// `R + Ric ∧ g / (n - 1)`, the projective part of an equiaffine tensor.
pub fn projective_part_equiaffine(r: &Curvature4Tensor, g: &ScalarProduct) -> Curvature4Tensor {
    let n = r.dim() as f64;
    r + &((1.0 / (n - 1.0)) * wedge(&spaces::ric(r, g), g.matrix(), 0.0))
}

/// The projection `R_o` of `R` to `t(V)`, from its five-term closed form.
pub fn traceless_core(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<Curvature4Tensor> {
    require_generalized(r, g)?;
    Ok(traceless_core_unchecked(r, g))
}

pub(crate) fn traceless_core_unchecked(r: &Curvature4Tensor, g: &ScalarProduct) -> Curvature4Tensor {
    let t = TraceData::of(r, g);
    let n = t.nf();
    let gm = g.matrix();
    let term1 = (2.0 / (n * n - 4.0)) * dot(&t.mix(n - 1.0, 1.0).antisymmetric_part(), gm);
    let h2 = &((n - 1.0) * t.ric.antisymmetric_part()) + &((n + 1.0) * t.ric.symmetric_part());
    let term2 = (1.0 / (n * n - 1.0)) * wedge(&h2, gm, 0.0);
    let term3 = (1.0 / ((n * n - 4.0) * (n + 1.0)))
        * wedge(&t.mix(3.0, n + 1.0).antisymmetric_part(), gm, n + 1.0);
    let term4 = (1.0 / (n * (n - 1.0) * (n - 2.0)))
        * wedge(&t.mix(1.0, n - 1.0).symmetric_part(), gm, n - 1.0);
    let term5 = (t.tau / ((n - 1.0) * (n - 2.0))) * wedge(gm, gm, 0.0);
    let mut out = r.clone();
    out += &term1;
    out += &term2;
    out += &term3;
    out += &term4;
    out -= &term5;
    out
}

/// `B* = S[Ric* + (n-1)Ric] - τg` and `B = S[(n-1)Ric* + Ric] - τg`.
pub fn b_forms(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<(BilinearForm, BilinearForm)> {
    require_generalized(r, g)?;
    let t = TraceData::of(r, g);
    let n = t.nf();
    let tau_g = t.tau * g.matrix();
    let b_star = &t.mix(n - 1.0, 1.0).symmetric_part() - &tau_g;
    let b = &t.mix(1.0, n - 1.0).symmetric_part() - &tau_g;
    Ok((b_star, b))
}

/// `σ₁(ω) + σ₂(Θ)` built as a (1,3) operator and lowered with `g`:
///
/// `σ₁(ω)(x,y)z = -{2ω(x,y)z + ω(x,z)y - ω(y,z)x}/(n+1)`,
/// `σ₂(Θ)(x,y)z = {Θ(x,z)y - Θ(y,z)x}/(1-n)`.
pub fn sigma_split(
    omega: &BilinearForm,
    theta: &BilinearForm,
    g: &ScalarProduct,
) -> Result<Curvature4Tensor> {
    g.check_dim(omega.dim())?;
    g.check_dim(theta.dim())?;
    let defect = omega.symmetry_defect();
    if defect > MEMBERSHIP_TOLERANCE * omega.max_norm().max(1.0) {
        return Err(Error::FormSymmetryViolation {
            which: "omega",
            residual: defect,
        });
    }
    let asym = theta.asymmetry();
    if asym > MEMBERSHIP_TOLERANCE * theta.max_norm().max(1.0) {
        return Err(Error::FormSymmetryViolation {
            which: "theta",
            residual: asym,
        });
    }
    let n = g.dim();
    let nf = n as f64;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    // operator components S_{xyz}^l
    let op = Curvature4Tensor::from_fn(n, |x, y, z, l| {
        let s1 = -(2.0 * omega.get(x, y) * delta(z, l) + omega.get(x, z) * delta(y, l)
            - omega.get(y, z) * delta(x, l))
            / (1.0 + nf);
        let s2 = (theta.get(x, z) * delta(y, l) - theta.get(y, z) * delta(x, l)) / (1.0 - nf);
        s1 + s2
    });
    Ok(Curvature4Tensor::from_fn(n, |x, y, z, w| {
        (0..n).map(|l| op.get(x, y, z, l) * g.g(l, w)).sum()
    }))
}

/// Tolerance for [`equiaffine_einstein_check`], relative to `max|R|`.
pub const EINSTEIN_TOLERANCE: f64 = 1e-10;

/// Equiaffine Einstein test `π₂(R) = 0 = π₃(R)`, cross-checked against the
/// direct condition `Ric = (τ/n) g`.
pub fn equiaffine_einstein_check(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<bool> {
    require_generalized(r, g)?;
    let scale = r.max_norm();
    let norm = |x: f64| if scale > 0.0 { x / scale } else { x };
    let [_, p2, p3, ..] = w_components(r, g);
    let projector = norm(p2.max_norm().max(p3.max_norm()));
    let t = TraceData::of(r, g);
    let n = t.nf();
    let direct = norm((&t.ric - &((t.tau / n) * g.matrix())).max_norm());
    let by_projector = projector <= EINSTEIN_TOLERANCE;
    let by_trace = direct <= EINSTEIN_TOLERANCE;
    if by_projector != by_trace {
        return Err(Error::VerdictMismatch { projector, direct });
    }
    Ok(by_projector)
}

/// The eight projectors of one decomposition materialized as
/// `n⁴ × n⁴` matrices acting on coefficient vectors.
#[derive(Debug, Clone)]
pub struct ProjectionFamily {
    pub mode: Mode,
    pub dim: usize,
    pub matrices: Vec<DMatrix<f64>>,
}

impl ProjectionFamily {
    /// Applies the closed forms to every basis tensor. `mode` must be W or A.
    pub fn materialize(mode: Mode, g: &ScalarProduct) -> Result<Self> {
        let n = g.dim();
        let size = n.pow(4);
        let mut matrices = vec![DMatrix::zeros(size, size); 8];
        for col in 0..size {
            let mut data = vec![0.0; size];
            data[col] = 1.0;
            let e = Curvature4Tensor::from_vec(n, data)?;
            let comps = match mode {
                Mode::W => w_components(&e, g),
                Mode::A => a_components(&e, g),
                Mode::SingerThorpe => return Err(Error::UnknownSpace("st".into())),
            };
            for (m, c) in matrices.iter_mut().zip(comps.iter()) {
                for (row, v) in c.data().iter().enumerate() {
                    m[(row, col)] = *v;
                }
            }
        }
        Ok(Self {
            mode,
            dim: n,
            matrices,
        })
    }

    /// Orthonormal (coefficient-space) basis of `r(V)` as matrix columns.
    pub fn generalized_basis(n: usize) -> DMatrix<f64> {
        let size = n.pow(4);
        let mut proj = DMatrix::zeros(size, size);
        for col in 0..size {
            let mut data = vec![0.0; size];
            data[col] = 1.0;
            let e = Curvature4Tensor::from_vec(n, data).expect("length n^4");
            let p = spaces::bianchi_project(&e);
            for (row, v) in p.data().iter().enumerate() {
                proj[(row, col)] = *v;
            }
        }
        let eig = proj.symmetric_eigen();
        let keep: Vec<usize> = (0..size).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
        DMatrix::from_fn(size, keep.len(), |r, c| eig.eigenvectors[(r, keep[c])])
    }

    /// Rank of projector `j` (0-based) restricted to `r(V)`.
    pub fn restricted_rank(&self, j: usize, basis: &DMatrix<f64>) -> usize {
        let image = &self.matrices[j] * basis;
        let sv = image.singular_values();
        let top = sv.iter().fold(0.0_f64, |m, x| m.max(*x)).max(1.0);
        sv.iter().filter(|s| **s > 1e-8 * top).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{bianchi_project, membership};

    fn noise(n: usize, phase: f64) -> Curvature4Tensor {
        Curvature4Tensor::from_fn(n, |i, j, k, l| {
            ((i * 131 + j * 71 + k * 29 + l * 13) as f64 * 0.618 + phase).sin()
        })
    }

    fn gg(g: &ScalarProduct) -> Curvature4Tensor {
        wedge(g.matrix(), g.matrix(), 0.0)
    }

    #[test]
    fn metric_wedge_lies_in_first_components() {
        for g in [ScalarProduct::euclidean(3).unwrap(), ScalarProduct::standard(3, 1).unwrap()] {
            let r = gg(&g);
            for res in [w_decompose(&r, &g).unwrap(), a_decompose(&r, &g).unwrap()] {
                assert!(res.components[0].relative_distance(&r) < 1e-14);
                for c in &res.components[1..] {
                    assert!(c.max_norm() < 1e-13);
                }
                assert!(res.completeness_residual < 1e-14);
            }
        }
    }

    #[test]
    fn zero_decomposes_to_zero() {
        let g = ScalarProduct::euclidean(3).unwrap();
        let z = Curvature4Tensor::zeros(3);
        let res = w_decompose(&z, &g).unwrap();
        assert!(res.components.iter().all(|c| c.max_norm() == 0.0));
        let st = singer_thorpe(&z, &g).unwrap();
        assert_eq!(st.components.len(), 3);
        assert!(st.components.iter().all(|c| c.max_norm() == 0.0));
    }

    #[test]
    fn decompositions_reject_non_generalized_input() {
        let g = ScalarProduct::euclidean(3).unwrap();
        let t = noise(3, 0.0);
        assert!(matches!(w_decompose(&t, &g), Err(Error::NotGeneralizedCurvature { .. })));
        assert!(matches!(a_decompose(&t, &g), Err(Error::NotGeneralizedCurvature { .. })));
        let r = bianchi_project(&t);
        assert!(matches!(singer_thorpe(&r, &g), Err(Error::NotAlgebraic { .. })));
    }

    #[test]
    fn completeness_on_generic_tensor() {
        let g = ScalarProduct::standard(3, 1).unwrap();
        let r = bianchi_project(&noise(4, 0.3));
        let w = w_decompose(&r, &g).unwrap();
        let a = a_decompose(&r, &g).unwrap();
        assert!(w.completeness_residual < 1e-9);
        assert!(a.completeness_residual < 1e-9);
    }

    #[test]
    fn ricci_traceless_algebraic_lives_in_a2() {
        let g = ScalarProduct::euclidean(4).unwrap();
        let xi = BilinearForm::from_fn(4, |i, j| match (i, j) {
            (0, 0) => 1.0,
            (1, 1) => -1.0,
            (0, 2) | (2, 0) => 0.5,
            _ => 0.0,
        });
        let r = -1.0 * wedge(&xi, g.matrix(), 1.0);
        assert!(membership(&r, &g, Space::A).unwrap().flag);
        let a = a_decompose(&r, &g).unwrap();
        assert!(a.components[1].relative_distance(&r) < 1e-14);
        for (j, c) in a.components.iter().enumerate() {
            if j != 1 {
                assert!(c.max_norm() < 1e-13, "alpha_{}", j + 1);
            }
        }
        let recovered = ricci_traceless_generator(&a.components[1], &g);
        assert!((&recovered - &xi).max_norm() < 1e-14);
        assert!(!equiaffine_einstein_check(&r, &g).unwrap());
    }

    #[test]
    fn singer_thorpe_of_constant_curvature() {
        let g = ScalarProduct::euclidean(4).unwrap();
        let a = 2.5 * gg(&g);
        let st = singer_thorpe(&a, &g).unwrap();
        assert!(st.components[0].relative_distance(&a) < 1e-14);
        assert!(st.components[1].max_norm() < 1e-13);
        assert!(st.components[2].max_norm() < 1e-13);
        // u = c{g(x,w)g(y,z) - g(x,z)g(y,w)} with c = -2.5
        assert!((constant_curvature_coefficient(&st.components[0], &g) + 2.5).abs() < 1e-14);
    }

    #[test]
    fn projective_and_traceless_of_metric_wedge() {
        let g = ScalarProduct::euclidean(3).unwrap();
        let r = gg(&g);
        assert!(projective_part(&r, &g).unwrap().max_norm() < 1e-14);
        assert!(projective_part_equiaffine(&r, &g).max_norm() < 1e-14);
        assert!(traceless_core(&r, &g).unwrap().max_norm() < 1e-14);
        let (bs, b) = b_forms(&r, &g).unwrap();
        assert!(bs.max_norm() < 1e-14 && b.max_norm() < 1e-14);
        assert!(equiaffine_einstein_check(&r, &g).unwrap());
        let z = Curvature4Tensor::zeros(3);
        assert!(equiaffine_einstein_check(&z, &g).unwrap());
        let (bs, b) = b_forms(&z, &g).unwrap();
        assert_eq!(bs.max_norm() + b.max_norm(), 0.0);
    }

    #[test]
    fn traceless_core_matches_component_sum() {
        let g = ScalarProduct::standard(4, 1).unwrap();
        let r = bianchi_project(&noise(5, 1.1));
        let ro = traceless_core(&r, &g).unwrap();
        let w = w_components(&r, &g);
        let mut expected = r.clone();
        for c in &w[..5] {
            expected -= c;
        }
        assert!(ro.relative_distance(&expected) < 1e-12);
        assert!(membership(&ro, &g, Space::T).unwrap().residual < 1e-12);
        assert!(w[5].relative_distance(&psi(&ro)) < 1e-12);
        assert!(w[6].relative_distance(&mu(&ro)) < 1e-12);
        let rest = &(&ro - &psi(&ro)) - &mu(&ro);
        assert!(w[7].relative_distance(&rest) < 1e-12);
    }

    #[test]
    fn sigma_split_recovers_ricci() {
        let g = ScalarProduct::standard(2, 1).unwrap();
        let theta = BilinearForm::from_fn(3, |i, j| ((i + j) as f64 * 0.7).cos());
        let omega = BilinearForm::from_fn(3, |i, j| (i as f64 - j as f64) * 0.3);
        let zero = BilinearForm::zeros(3);
        let s2 = sigma_split(&zero, &theta, &g).unwrap();
        assert!((&spaces::ric(&s2, &g) - &theta).max_norm() < 1e-10);
        let s1 = sigma_split(&omega, &zero, &g).unwrap();
        assert!((&spaces::ric(&s1, &g) - &omega).max_norm() < 1e-10);
        assert_eq!(sigma_split(&zero, &zero, &g).unwrap().max_norm(), 0.0);
        // independent route: σ₂(Θ) = Θ∧g/(1-n), σ₁(ω) = -(2ω·g + ω∧g)/(n+1)
        let alt2 = (-0.5) * wedge(&theta, g.matrix(), 0.0);
        assert!(s2.relative_distance(&alt2) < 1e-14);
        let alt1 = (-0.25) * (2.0 * dot(&omega, g.matrix()) + wedge(&omega, g.matrix(), 0.0));
        assert!(s1.relative_distance(&alt1) < 1e-14);
        assert!(matches!(
            sigma_split(&theta, &zero, &g),
            Err(Error::FormSymmetryViolation { which: "omega", .. })
        ));
        assert!(matches!(
            sigma_split(&zero, &omega, &g),
            Err(Error::FormSymmetryViolation { which: "theta", .. })
        ));
    }

    #[test]
    fn restricted_projector_ranks_at_n3() {
        let g = ScalarProduct::euclidean(3).unwrap();
        let basis = ProjectionFamily::generalized_basis(3);
        assert_eq!(basis.ncols(), 24);
        let w = ProjectionFamily::materialize(Mode::W, &g).unwrap();
        let ranks: Vec<usize> = (0..8).map(|j| w.restricted_rank(j, &basis)).collect();
        assert_eq!(ranks, vec![1, 5, 3, 3, 5, 0, 7, 0]);
        let a = ProjectionFamily::materialize(Mode::A, &g).unwrap();
        let ranks: Vec<usize> = (0..8).map(|j| a.restricted_rank(j, &basis)).collect();
        assert_eq!(ranks, vec![1, 5, 5, 3, 3, 0, 7, 0]);
        // idempotent on r(V)
        for m in &w.matrices {
            let pb = m * &basis;
            let ppb = m * &pb;
            assert!((ppb - pb).amax() < 1e-12);
        }
    }
}
