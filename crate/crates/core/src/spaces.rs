//! Membership predicates for the curvature spaces, Ricci-type traces, the
//! idempotents ψ and μ, and the projector onto generalized curvature tensors.
//!
//! Space tags:
//!
//! | tag  | defining identities |
//! |------|---------------------|
//! | `co` | `R_{ijkl} = -R_{jikl}` |
//! | `r`  | `co` + first Bianchi identity |
//! | `a`  | `r` + `R_{ijkl} = -R_{ijlk}` |
//! | `s`  | `r` + `R_{ijkl} = R_{ijlk}` |
//! | `f`  | `r` + `Ric` symmetric |
//! | `p`  | `r` + `Ric = 0` |
//! | `t`  | `r` + `Ric = Ric* = 0` |

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{BilinearForm, ScalarProduct};
use crate::tensor::Curvature4Tensor;

/// Default membership tolerance (max-norm, normalized by the tensor's max-norm).
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    Co,
    R,
    A,
    S,
    F,
    P,
    T,
}

impl Space {
    pub const ALL: [Space; 7] = [
        Space::Co,
        Space::R,
        Space::A,
        Space::S,
        Space::F,
        Space::P,
        Space::T,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Space::Co => "co",
            Space::R => "r",
            Space::A => "a",
            Space::S => "s",
            Space::F => "f",
            Space::P => "p",
            Space::T => "t",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Space::ALL
            .into_iter()
            .find(|sp| sp.tag() == s)
            .ok_or_else(|| Error::UnknownSpace(s.to_string()))
    }
}

/// All generalized Ricci traces of a tensor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RicciReport {
    pub rho13: BilinearForm,
    pub rho14: BilinearForm,
    pub rho23: BilinearForm,
    pub rho24: BilinearForm,
    pub rho34: BilinearForm,
    /// `ρ₁₄`
    pub ric: BilinearForm,
    /// `ρ₂₃ = -ρ₁₃`
    pub ric_star: BilinearForm,
    pub tau: f64,
}

/// Contracts two slots of `r` with `g⁻¹`, returning the form on the remaining
/// two slots (in their original order).
fn trace_pair(r: &Curvature4Tensor, g: &ScalarProduct, a: usize, b: usize) -> BilinearForm {
    let n = r.dim();
    let free: Vec<usize> = (0..4).filter(|s| *s != a && *s != b).collect();
    BilinearForm::from_fn(n, |x, y| {
        let mut acc = 0.0;
        let mut idx = [0usize; 4];
        idx[free[0]] = x;
        idx[free[1]] = y;
        for i in 0..n {
            for j in 0..n {
                let gij = g.inv(i, j);
                if gij == 0.0 {
                    continue;
                }
                idx[a] = i;
                idx[b] = j;
                acc += gij * r.get(idx[0], idx[1], idx[2], idx[3]);
            }
        }
        acc
    })
}

/// `Ric = ρ₁₄`, `ρ₁₄(x,y) = g^{ij} R(e_i, x, y, e_j)`.
pub(crate) fn ric(r: &Curvature4Tensor, g: &ScalarProduct) -> BilinearForm {
    trace_pair(r, g, 0, 3)
}

/// `Ric* = ρ₂₃`, `ρ₂₃(x,y) = g^{ij} R(x, e_i, e_j, y)`.
pub(crate) fn ric_star(r: &Curvature4Tensor, g: &ScalarProduct) -> BilinearForm {
    trace_pair(r, g, 1, 2)
}

/// `τ = g^{il} g^{jk} R_{ijkl}`.
pub(crate) fn scalar_curvature(r: &Curvature4Tensor, g: &ScalarProduct) -> f64 {
    g.trace(&ric_star(r, g))
}

/// Computes `ρ₁₃, ρ₁₄, ρ₂₃, ρ₂₄, ρ₃₄` and `τ`.
///
/// `ρ₁₃` contracts the first and third slots: `g^{ij} R(e_i, x, e_j, y)`.
pub fn ricci_traces(r: &Curvature4Tensor, g: &ScalarProduct) -> Result<RicciReport> {
    g.check_dim(r.dim())?;
    let rho13 = trace_pair(r, g, 0, 2);
    let rho14 = trace_pair(r, g, 0, 3);
    let rho23 = trace_pair(r, g, 1, 2);
    let rho24 = trace_pair(r, g, 1, 3);
    let rho34 = trace_pair(r, g, 2, 3);
    let n = r.dim();
    let mut tau = 0.0;
    for i in 0..n {
        for l in 0..n {
            let gil = g.inv(i, l);
            if gil == 0.0 {
                continue;
            }
            for j in 0..n {
                for k in 0..n {
                    tau += gil * g.inv(j, k) * r.get(i, j, k, l);
                }
            }
        }
    }
    Ok(RicciReport {
        ric: rho14.clone(),
        ric_star: rho23.clone(),
        rho13,
        rho14,
        rho23,
        rho24,
        rho34,
        tau,
    })
}

/// Max-norm of `R_{ijkl} + R_{jikl}`.
pub fn first_pair_residual(r: &Curvature4Tensor) -> f64 {
    let n = r.dim();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            for k in 0..n {
                for l in 0..n {
                    worst = worst.max((r.get(i, j, k, l) + r.get(j, i, k, l)).abs());
                }
            }
        }
    }
    worst
}

/// `b(T)_{xyzw} = T_{xyzw} + T_{yzxw} + T_{zxyw}`.
pub fn cyclic_sum(t: &Curvature4Tensor) -> Curvature4Tensor {
    Curvature4Tensor::from_fn(t.dim(), |x, y, z, w| {
        t.get(x, y, z, w) + t.get(y, z, x, w) + t.get(z, x, y, w)
    })
}

pub fn bianchi_residual(r: &Curvature4Tensor) -> f64 {
    cyclic_sum(r).max_norm()
}

/// Max-norm of `R_{ijkl} + R_{ijlk}` (zero for tensors alternating in the last pair).
pub fn last_pair_antisymmetry_residual(r: &Curvature4Tensor) -> f64 {
    (r - &r.conjugate()).max_norm()
}

/// Max-norm of `R_{ijkl} - R_{ijlk}`.
pub fn last_pair_symmetry_residual(r: &Curvature4Tensor) -> f64 {
    (r + &r.conjugate()).max_norm()
}

fn normalized(raw: f64, r: &Curvature4Tensor) -> f64 {
    let scale = r.max_norm();
    if scale > 0.0 {
        raw / scale
    } else {
        raw
    }
}

/// Normalized residual of the `r(V)` identities.
pub fn generalized_residual(r: &Curvature4Tensor) -> f64 {
    normalized(first_pair_residual(r).max(bianchi_residual(r)), r)
}

/// Result of a membership test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Membership {
    pub flag: bool,
    pub residual: f64,
}

/// Residual of the identities defining `space`, normalized by `max|R|`.
pub fn membership_residual(r: &Curvature4Tensor, g: &ScalarProduct, space: Space) -> Result<f64> {
    g.check_dim(r.dim())?;
    let base = first_pair_residual(r);
    let raw = match space {
        Space::Co => base,
        Space::R => base.max(bianchi_residual(r)),
        Space::A => base
            .max(bianchi_residual(r))
            .max(last_pair_antisymmetry_residual(r)),
        Space::S => base
            .max(bianchi_residual(r))
            .max(last_pair_symmetry_residual(r)),
        Space::F => base.max(bianchi_residual(r)).max(ric(r, g).asymmetry()),
        Space::P => base.max(bianchi_residual(r)).max(ric(r, g).max_norm()),
        Space::T => base
            .max(bianchi_residual(r))
            .max(ric(r, g).max_norm())
            .max(ric_star(r, g).max_norm()),
    };
    Ok(normalized(raw, r))
}

pub fn membership(r: &Curvature4Tensor, g: &ScalarProduct, space: Space) -> Result<Membership> {
    membership_with_tolerance(r, g, space, MEMBERSHIP_TOLERANCE)
}

pub fn membership_with_tolerance(
    r: &Curvature4Tensor,
    g: &ScalarProduct,
    space: Space,
    tolerance: f64,
) -> Result<Membership> {
    let residual = membership_residual(r, g, space)?;
    Ok(Membership {
        flag: residual <= tolerance,
        residual,
    })
}

/// `4ψ(R)(x,y,z,w) = R(x,y,z,w) + R(y,x,w,z) + R(z,w,x,y) + R(w,z,y,x)`.
pub fn psi(r: &Curvature4Tensor) -> Curvature4Tensor {
    Curvature4Tensor::from_fn(r.dim(), |x, y, z, w| {
        0.25 * (r.get(x, y, z, w) + r.get(y, x, w, z) + r.get(z, w, x, y) + r.get(w, z, y, x))
    })
}

/// `8μ(R)(x,y,z,w) = 3R(x,y,z,w) + 3R(x,y,w,z) + R(x,w,z,y) + R(x,z,w,y) + R(w,y,z,x) + R(z,y,w,x)`.
pub fn mu(r: &Curvature4Tensor) -> Curvature4Tensor {
    Curvature4Tensor::from_fn(r.dim(), |x, y, z, w| {
        0.125
            * (3.0 * r.get(x, y, z, w)
                + 3.0 * r.get(x, y, w, z)
                + r.get(x, w, z, y)
                + r.get(x, z, w, y)
                + r.get(w, y, z, x)
                + r.get(z, y, w, x))
    })
}

/// `psi` and `mu` together.
pub fn psi_mu(r: &Curvature4Tensor) -> (Curvature4Tensor, Curvature4Tensor) {
    (psi(r), mu(r))
}

/// `(T_{ijkl} - T_{jikl}) / 2`.
pub fn antisymmetrize_first_pair(t: &Curvature4Tensor) -> Curvature4Tensor {
    Curvature4Tensor::from_fn(t.dim(), |i, j, k, l| 0.5 * (t.get(i, j, k, l) - t.get(j, i, k, l)))
}

/// Orthogonal projector onto `r(V)`.
///
/// After antisymmetrizing the first pair, `b/3` (with `b` the cyclic sum over
/// the first three slots) is the self-adjoint idempotent onto cyclic-invariant
/// tensors, so `Id - b/3` projects onto its kernel.
pub fn bianchi_project(t: &Curvature4Tensor) -> Curvature4Tensor {
    let a = antisymmetrize_first_pair(t);
    let b = cyclic_sum(&a);
    a - (1.0 / 3.0) * b
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::wedge_r;

    fn noise(n: usize) -> Curvature4Tensor {
        Curvature4Tensor::from_fn(n, |i, j, k, l| {
            ((i * 131 + j * 71 + k * 29 + l * 13) as f64 * 0.618).sin()
        })
    }

    fn gg(g: &ScalarProduct) -> Curvature4Tensor {
        wedge_r(g.matrix(), g.matrix(), 0.0).unwrap()
    }

    #[test]
    fn ricci_of_metric_wedge() {
        let g = ScalarProduct::euclidean(3).unwrap();
        let rep = ricci_traces(&gg(&g), &g).unwrap();
        let expected = -2.0 * g.matrix();
        assert!((&rep.ric - &expected).max_norm() < 1e-15);
        assert!((&rep.ric_star - &expected).max_norm() < 1e-15);
        assert_eq!(rep.tau, -6.0);
    }

    #[test]
    fn ricci_of_zero() {
        let g = ScalarProduct::euclidean(4).unwrap();
        let rep = ricci_traces(&Curvature4Tensor::zeros(4), &g).unwrap();
        assert_eq!(rep.tau, 0.0);
        for f in [&rep.rho13, &rep.rho14, &rep.rho23, &rep.rho24, &rep.rho34] {
            assert_eq!(f.max_norm(), 0.0);
        }
    }

    #[test]
    fn rho_relations_on_generalized_tensor() {
        let g = ScalarProduct::standard(3, 1).unwrap();
        let r = bianchi_project(&noise(4));
        let rep = ricci_traces(&r, &g).unwrap();
        assert!((&rep.rho24 + &rep.rho14).max_norm() < 1e-14);
        assert!((&rep.rho23 + &rep.rho13).max_norm() < 1e-14);
        // ρ₃₄ = -ρ₁₄ + ρ₁₄ᵀ
        let rho34 = &rep.rho14.transpose() - &rep.rho14;
        assert!((&rep.rho34 - &rho34).max_norm() < 1e-14);
        assert!((g.trace(&rep.ric) - rep.tau).abs() < 1e-13);
        assert!((g.trace(&rep.ric_star) - rep.tau).abs() < 1e-13);
        // Ric*(R) = Ric(R*)
        let conj = ricci_traces(&r.conjugate(), &g).unwrap();
        assert!((&rep.ric_star - &conj.ric).max_norm() < 1e-14);
    }

    #[test]
    fn metric_wedge_memberships() {
        let g = ScalarProduct::euclidean(3).unwrap();
        let t = gg(&g);
        for sp in [Space::Co, Space::R, Space::A, Space::F] {
            let m = membership(&t, &g, sp).unwrap();
            assert!(m.flag, "{sp}");
            assert_eq!(m.residual, 0.0);
        }
        assert!(!membership(&t, &g, Space::P).unwrap().flag);
        assert!(!membership(&t, &g, Space::S).unwrap().flag);
    }

    #[test]
    fn zero_is_in_every_space() {
        let g = ScalarProduct::euclidean(3).unwrap();
        for sp in Space::ALL {
            assert!(membership(&Curvature4Tensor::zeros(3), &g, sp).unwrap().flag);
        }
    }

    #[test]
    fn unknown_space_tag() {
        assert!(matches!("x".parse::<Space>(), Err(Error::UnknownSpace(_))));
        assert_eq!("f".parse::<Space>().unwrap(), Space::F);
    }

    #[test]
    fn projector_behaviour() {
        let t = noise(3);
        let r = bianchi_project(&t);
        assert!(bianchi_residual(&r) <= 1e-12);
        assert!(first_pair_residual(&r) <= 1e-12);
        assert!(bianchi_project(&r).relative_distance(&r) < 1e-15);
        // symmetric in the first pair -> killed by the antisymmetrizer
        let sym = Curvature4Tensor::from_fn(3, |i, j, k, l| t.get(i, j, k, l) + t.get(j, i, k, l));
        assert_eq!(bianchi_project(&sym).max_norm(), 0.0);
    }

    #[test]
    fn psi_mu_land_in_a_and_s() {
        let g = ScalarProduct::euclidean(4).unwrap();
        let r = bianchi_project(&noise(4));
        let (p, m) = psi_mu(&r);
        assert!(membership(&p, &g, Space::A).unwrap().flag);
        assert!(membership(&m, &g, Space::S).unwrap().flag);
        assert!(psi(&p).relative_distance(&p) < 1e-14);
        assert!(mu(&m).relative_distance(&m) < 1e-14);
        // A in a: psi(A) = A, mu(A) = 0
        assert!(mu(&p).max_norm() < 1e-14);
        assert!(psi(&m).max_norm() < 1e-14);
        // conjugation signs
        assert!(p.conjugate().relative_distance(&p) < 1e-14);
        assert!(m.conjugate().relative_distance(&(-1.0 * &m)) < 1e-14);
    }
}
