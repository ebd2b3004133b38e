//! Rank-4 covariant tensors `R_{ijkl} = R(e_i, e_j, e_k, e_l)` and the
//! bilinear-form products that build them.

use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::error::{Error, Result};
use crate::linalg::BilinearForm;

/// A rank-4 covariant tensor stored flat in row-major `(i, j, k, l)` order.
///
/// Membership in the curvature spaces is a predicate (see [`crate::spaces`]),
/// not a construction invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct Curvature4Tensor {
    dim: usize,
    data: Vec<f64>,
}

impl Curvature4Tensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim.pow(4)],
        }
    }

    pub fn from_vec(dim: usize, data: Vec<f64>) -> Result<Self> {
        let expected = dim.pow(4);
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dim.pow(4));
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, k: usize, l: usize) -> usize {
        ((i * self.dim + j) * self.dim + k) * self.dim + l
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        self.data[self.index(i, j, k, l)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, k: usize, l: usize, value: f64) {
        let idx = self.index(i, j, k, l);
        self.data[idx] = value;
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Euclidean norm of the coefficient vector.
    pub fn coefficient_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// `R*(x,y,z,w) = -R(x,y,w,z)`.
    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.dim, |i, j, k, l| -self.get(i, j, l, k))
    }

    /// Max-norm of `self - other`, divided by the larger max-norm of the two
    /// (or 1 when both vanish).
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let scale = self.max_norm().max(other.max_norm());
        let diff = (self - other).max_norm();
        if scale > 0.0 {
            diff / scale
        } else {
            diff
        }
    }
}

impl Add for &Curvature4Tensor {
    type Output = Curvature4Tensor;
    fn add(self, rhs: &Curvature4Tensor) -> Curvature4Tensor {
        assert_eq!(self.dim, rhs.dim, "tensor dimension mismatch");
        Curvature4Tensor {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Add for Curvature4Tensor {
    type Output = Curvature4Tensor;
    fn add(mut self, rhs: Curvature4Tensor) -> Curvature4Tensor {
        self += &rhs;
        self
    }
}

impl AddAssign<&Curvature4Tensor> for Curvature4Tensor {
    fn add_assign(&mut self, rhs: &Curvature4Tensor) {
        assert_eq!(self.dim, rhs.dim, "tensor dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&Curvature4Tensor> for Curvature4Tensor {
    fn sub_assign(&mut self, rhs: &Curvature4Tensor) {
        assert_eq!(self.dim, rhs.dim, "tensor dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Sub for &Curvature4Tensor {
    type Output = Curvature4Tensor;
    fn sub(self, rhs: &Curvature4Tensor) -> Curvature4Tensor {
        assert_eq!(self.dim, rhs.dim, "tensor dimension mismatch");
        Curvature4Tensor {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Sub for Curvature4Tensor {
    type Output = Curvature4Tensor;
    fn sub(mut self, rhs: Curvature4Tensor) -> Curvature4Tensor {
        self -= &rhs;
        self
    }
}

impl Mul<&Curvature4Tensor> for f64 {
    type Output = Curvature4Tensor;
    fn mul(self, rhs: &Curvature4Tensor) -> Curvature4Tensor {
        rhs.map(|x| self * x)
    }
}

impl Mul<Curvature4Tensor> for f64 {
    type Output = Curvature4Tensor;
    fn mul(self, mut rhs: Curvature4Tensor) -> Curvature4Tensor {
        rhs.data.iter_mut().for_each(|x| *x *= self);
        rhs
    }
}

impl Neg for Curvature4Tensor {
    type Output = Curvature4Tensor;
    fn neg(self) -> Curvature4Tensor {
        -1.0 * self
    }
}

impl<'a> Sum<&'a Curvature4Tensor> for Option<Curvature4Tensor> {
    fn sum<I: Iterator<Item = &'a Curvature4Tensor>>(iter: I) -> Self {
        iter.fold(None, |acc, t| match acc {
            None => Some(t.clone()),
            Some(mut s) => {
                s += t;
                Some(s)
            }
        })
    }
}

fn check_same(h: &BilinearForm, k: &BilinearForm) -> Result<()> {
    if h.dim() != k.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: k.dim(),
        });
    }
    Ok(())
}

/// `(h ∧_r k)(x,y,z,w) = h(x,z)k(y,w) - h(y,z)k(x,w) - r[h(x,w)k(y,z) - h(y,w)k(x,z)]`.
///
/// `r = 0` is the plain wedge, `r = 1` the Kulkarni–Nomizu product.
pub fn wedge_r(h: &BilinearForm, k: &BilinearForm, r: f64) -> Result<Curvature4Tensor> {
    check_same(h, k)?;
    Ok(wedge(h, k, r))
}

pub(crate) fn wedge(h: &BilinearForm, k: &BilinearForm, r: f64) -> Curvature4Tensor {
    Curvature4Tensor::from_fn(h.dim(), |x, y, z, w| {
        h.get(x, z) * k.get(y, w) - h.get(y, z) * k.get(x, w)
            - r * (h.get(x, w) * k.get(y, z) - h.get(y, w) * k.get(x, z))
    })
}

/// `(h · k)(x,y,z,w) = h(x,y) k(z,w)`.
pub fn dot_product(h: &BilinearForm, k: &BilinearForm) -> Result<Curvature4Tensor> {
    check_same(h, k)?;
    Ok(dot(h, k))
}

pub(crate) fn dot(h: &BilinearForm, k: &BilinearForm) -> Curvature4Tensor {
    Curvature4Tensor::from_fn(h.dim(), |x, y, z, w| h.get(x, y) * k.get(z, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_form(n: usize, seed: f64) -> BilinearForm {
        BilinearForm::from_fn(n, |i, j| ((i * 7 + j * 3) as f64 * seed).sin())
    }

    #[test]
    fn kulkarni_nomizu_of_metric_doubles_wedge() {
        let g = BilinearForm::identity(4);
        let w0 = wedge_r(&g, &g, 0.0).unwrap();
        let w1 = wedge_r(&g, &g, 1.0).unwrap();
        assert_eq!(w1, 2.0 * &w0);
    }

    #[test]
    fn wedge_entries_for_identity() {
        let g = BilinearForm::identity(3);
        let w = wedge_r(&g, &g, 0.0).unwrap();
        assert_eq!(w.get(0, 1, 0, 1), 1.0);
        assert_eq!(w.get(1, 0, 0, 1), -1.0);
        assert_eq!(w.get(0, 0, 0, 0), 0.0);
        let z = BilinearForm::zeros(3);
        assert_eq!(wedge_r(&z, &z, 0.0).unwrap(), Curvature4Tensor::zeros(3));
    }

    #[test]
    fn dot_product_entries() {
        let g = BilinearForm::identity(3);
        let d = dot_product(&g, &g).unwrap();
        assert_eq!(d.get(0, 0, 1, 1), 1.0);
        assert_eq!(d.get(0, 1, 0, 1), 0.0);
        let z = BilinearForm::zeros(3);
        assert_eq!(dot_product(&z, &g).unwrap(), Curvature4Tensor::zeros(3));
    }

    #[test]
    fn dot_product_is_not_commutative() {
        let h = sample_form(3, 0.37);
        let k = sample_form(3, 1.91);
        let hk = dot_product(&h, &k).unwrap();
        let kh = dot_product(&k, &h).unwrap();
        assert!((&hk - &kh).max_norm() > 1e-3);
    }

    #[test]
    fn products_reject_mismatched_dimensions() {
        let a = BilinearForm::identity(3);
        let b = BilinearForm::identity(4);
        assert!(matches!(wedge_r(&a, &b, 1.0), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(dot_product(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn conjugation_is_an_involution() {
        let t = Curvature4Tensor::from_fn(3, |i, j, k, l| ((i + 2 * j + 3 * k + 5 * l) as f64).cos());
        assert_eq!(t.conjugate().conjugate(), t);
        assert_eq!(Curvature4Tensor::zeros(3).conjugate(), Curvature4Tensor::zeros(3));
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(matches!(
            Curvature4Tensor::from_vec(3, vec![0.0; 80]),
            Err(Error::LengthMismatch { expected: 81, found: 80 })
        ));
    }
}
