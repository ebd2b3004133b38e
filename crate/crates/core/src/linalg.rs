//! Signature-aware linear algebra: scalar products, bilinear forms and the
//! full-contraction pairing on rank-4 covariant tensors.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Curvature4Tensor;

/// Entries differing from their transpose by more than this are rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;
/// Eigenvalues below this fraction of the spectral norm count as zero.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// A covariant rank-2 tensor `b_{ij}`, stored row-major. No symmetry is assumed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BilinearForm {
    dim: usize,
    entries: Vec<f64>,
}

impl BilinearForm {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Self { dim, entries }
    }

    /// Builds a form from a row-major entry vector of length `dim * dim`.
    pub fn from_row_major(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i))
    }

    /// `S h (x,y) = (h(x,y) + h(y,x)) / 2`.
    pub fn symmetric_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self.get(i, j) + self.get(j, i)))
    }

    /// `Λ h (x,y) = (h(x,y) - h(y,x)) / 2`.
    pub fn antisymmetric_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| 0.5 * (self.get(i, j) - self.get(j, i)))
    }

    /// Splits into symmetric and antisymmetric parts.
    pub fn sym_antisym_split(&self) -> (Self, Self) {
        (self.symmetric_part(), self.antisymmetric_part())
    }

    pub fn max_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Max-norm of `b - b^T`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Max-norm of `b + b^T`.
    pub fn symmetry_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.dim {
            for j in 0..=i {
                worst = worst.max((self.get(i, j) + self.get(j, i)).abs());
            }
        }
        worst
    }

    pub(crate) fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries)
    }

    pub(crate) fn from_matrix(m: &DMatrix<f64>) -> Self {
        Self::from_fn(m.nrows(), |i, j| m[(i, j)])
    }
}

impl Add for &BilinearForm {
    type Output = BilinearForm;
    fn add(self, rhs: &BilinearForm) -> BilinearForm {
        assert_eq!(self.dim, rhs.dim, "bilinear form dimension mismatch");
        BilinearForm {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for BilinearForm {
    type Output = BilinearForm;
    fn add(self, rhs: BilinearForm) -> BilinearForm {
        &self + &rhs
    }
}

impl AddAssign<&BilinearForm> for BilinearForm {
    fn add_assign(&mut self, rhs: &BilinearForm) {
        assert_eq!(self.dim, rhs.dim, "bilinear form dimension mismatch");
        for (a, b) in self.entries.iter_mut().zip(&rhs.entries) {
            *a += b;
        }
    }
}

impl Sub for &BilinearForm {
    type Output = BilinearForm;
    fn sub(self, rhs: &BilinearForm) -> BilinearForm {
        assert_eq!(self.dim, rhs.dim, "bilinear form dimension mismatch");
        BilinearForm {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for BilinearForm {
    type Output = BilinearForm;
    fn sub(self, rhs: BilinearForm) -> BilinearForm {
        &self - &rhs
    }
}

impl Mul<&BilinearForm> for f64 {
    type Output = BilinearForm;
    fn mul(self, rhs: &BilinearForm) -> BilinearForm {
        BilinearForm {
            dim: rhs.dim,
            entries: rhs.entries.iter().map(|x| self * x).collect(),
        }
    }
}

impl Mul<BilinearForm> for f64 {
    type Output = BilinearForm;
    fn mul(self, rhs: BilinearForm) -> BilinearForm {
        self * &rhs
    }
}

impl Neg for BilinearForm {
    type Output = BilinearForm;
    fn neg(self) -> BilinearForm {
        -1.0 * self
    }
}

/// A nondegenerate symmetric bilinear form of signature `(p, q)` with its
/// inverse cached.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarProduct {
    matrix: BilinearForm,
    inverse: BilinearForm,
    signature: (usize, usize),
}

impl ScalarProduct {
    /// Validates symmetry and nondegeneracy, then caches the inverse and signature.
    pub fn new(matrix: BilinearForm) -> Result<Self> {
        let n = matrix.dim();
        if n < 3 {
            return Err(Error::DimensionTooSmall(n));
        }
        let asymmetry = matrix.asymmetry();
        if asymmetry > SYMMETRY_TOLERANCE {
            return Err(Error::NotSymmetric { asymmetry });
        }
        // Symmetrize away sub-tolerance noise before the eigensolve.
        let matrix = matrix.symmetric_part();
        let eigen = matrix.to_matrix().symmetric_eigen();
        let spectral = eigen.eigenvalues.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let smallest = eigen
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |m, x| m.min(x.abs()));
        let threshold = DEGENERACY_THRESHOLD * spectral;
        if spectral == 0.0 || smallest < threshold {
            return Err(Error::DegenerateMetric {
                smallest,
                threshold,
            });
        }
        let p = eigen.eigenvalues.iter().filter(|&&x| x > 0.0).count();
        let inverse = matrix
            .to_matrix()
            .try_inverse()
            .ok_or(Error::DegenerateMetric {
                smallest,
                threshold,
            })?;
        Ok(Self {
            inverse: BilinearForm::from_matrix(&inverse),
            matrix,
            signature: (p, n - p),
        })
    }

    /// `diag(+1 x p, -1 x q)`.
    pub fn standard(p: usize, q: usize) -> Result<Self> {
        let n = p + q;
        Self::new(BilinearForm::from_fn(n, |i, j| match (i == j, i < p) {
            (false, _) => 0.0,
            (true, true) => 1.0,
            (true, false) => -1.0,
        }))
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        Self::standard(n, 0)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &BilinearForm {
        &self.matrix
    }

    pub fn inverse(&self) -> &BilinearForm {
        &self.inverse
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    #[inline]
    pub fn g(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    #[inline]
    pub fn inv(&self, i: usize, j: usize) -> f64 {
        self.inverse.get(i, j)
    }

    /// `c · g` for `c > 0` (pseudo-conformal rescaling).
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        Self::new(c * &self.matrix)
    }

    /// `g^{ij} b_{ij}`.
    pub fn trace(&self, b: &BilinearForm) -> f64 {
        let n = self.dim();
        let mut t = 0.0;
        for i in 0..n {
            for j in 0..n {
                t += self.inv(i, j) * b.get(i, j);
            }
        }
        t
    }

    /// Max-norm of `g · g⁻¹ - I`.
    pub fn inverse_residual(&self) -> f64 {
        let prod = self.matrix.to_matrix() * self.inverse.to_matrix();
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((prod[(i, j)] - target).abs());
            }
        }
        worst
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }
}

/// Contracts one index slot of `t` with `m` (`m^{ab} t_{..b..}`).
fn contract_slot(t: &[f64], n: usize, slot: usize, m: &BilinearForm) -> Vec<f64> {
    let mut out = vec![0.0; t.len()];
    let strides = [n * n * n, n * n, n, 1];
    let stride = strides[slot];
    for (idx, slot_out) in out.iter_mut().enumerate() {
        let a = (idx / stride) % n;
        let base = idx - a * stride;
        let mut acc = 0.0;
        for b in 0..n {
            acc += m.get(a, b) * t[base + b * stride];
        }
        *slot_out = acc;
    }
    out
}

/// Raises all four indices with `m`.
pub(crate) fn raise_all(t: &[f64], n: usize, m: &BilinearForm) -> Vec<f64> {
    (0..4).fold(t.to_vec(), |acc, slot| contract_slot(&acc, n, slot, m))
}

/// `g^{ia} g^{jb} g^{kc} g^{ld} T1_{ijkl} T2_{abcd}`.
pub fn tensor_pairing(
    t1: &Curvature4Tensor,
    t2: &Curvature4Tensor,
    g: &ScalarProduct,
) -> Result<f64> {
    if t1.dim() != t2.dim() {
        return Err(Error::DimensionMismatch {
            expected: t1.dim(),
            found: t2.dim(),
        });
    }
    g.check_dim(t1.dim())?;
    Ok(pairing_unchecked(t1, t2, g.inverse()))
}

pub(crate) fn pairing_unchecked(
    t1: &Curvature4Tensor,
    t2: &Curvature4Tensor,
    inverse: &BilinearForm,
) -> f64 {
    let raised = raise_all(t2.data(), t1.dim(), inverse);
    t1.data().iter().zip(&raised).map(|(a, b)| a * b).sum()
}

/// Upper bound on `|tensor_pairing(t1, t2, g)|` obtained by pairing the
/// entrywise absolute values; used to scale orthogonality residuals.
pub(crate) fn pairing_bound(t1: &Curvature4Tensor, t2: &Curvature4Tensor, g: &ScalarProduct) -> f64 {
    let abs_inv = BilinearForm::from_fn(g.dim(), |i, j| g.inv(i, j).abs());
    let a = t1.map(f64::abs);
    let b = t2.map(f64::abs);
    pairing_unchecked(&a, &b, &abs_inv)
}
