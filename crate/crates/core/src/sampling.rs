//! Seeded sampling of the curvature subspaces and empirical dimensions by
//! singular-value rank.
//!
//! Stream rule: a sample is drawn from `ChaCha8Rng::seed_from_u64(seed)`
//! with `set_stream(index)`, where `index` is the sample's position in the
//! stack (0 for a single [`sample`] call). Noise entries are uniform in
//! `[-1, 1)`, filled in row-major tensor order.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::decompose::{a_components, projective_part_unchecked, traceless_core_unchecked, w_components};
use crate::error::{Error, Result};
use crate::linalg::{BilinearForm, ScalarProduct};
use crate::spaces::{antisymmetrize_first_pair, bianchi_project, mu, psi, ric, Space};
use crate::tensor::Curvature4Tensor;

/// Relative singular-value threshold for rank decisions.
pub const RANK_THRESHOLD: f64 = 1e-8;
/// Minimum ratio between the smallest accepted and largest rejected
/// singular value.
pub const MIN_GAP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpaceTag {
    Base(Space),
    W(u8),
    A(u8),
    APlusS,
}

impl SpaceTag {
    /// Every tag, in report order.
    pub fn all() -> Vec<SpaceTag> {
        let mut v: Vec<SpaceTag> = Space::ALL.iter().map(|s| SpaceTag::Base(*s)).collect();
        v.push(SpaceTag::APlusS);
        v.extend((1..=8).map(SpaceTag::W));
        v.extend((1..=8).map(SpaceTag::A));
        v
    }

    /// Closed-form dimension at `n`.
    pub fn formula_dimension(self, n: usize) -> usize {
        let dim_r = n * n * (n * n - 1) / 3;
        let dim_a = n * n * (n * n - 1) / 12;
        let dim_s = (n - 1) * n * (n + 1) * (n + 2) / 8;
        let lam = n * (n - 1) / 2;
        let sym0 = n * (n + 1) / 2 - 1;
        let weyl = n * (n + 1) * (n + 2) * (n - 3) / 12;
        let w7 = dim_s + 1 - n * n;
        let w8 = dim_r - dim_a - dim_s - lam;
        match self {
            SpaceTag::Base(Space::Co) => n * n * n * (n - 1) / 2,
            SpaceTag::Base(Space::R) => dim_r,
            SpaceTag::Base(Space::A) => dim_a,
            SpaceTag::Base(Space::S) => dim_s,
            SpaceTag::Base(Space::F) => n * (n - 1) * (2 * n * n + 2 * n - 3) / 6,
            SpaceTag::Base(Space::P) => n * n * (n * n - 4) / 3,
            SpaceTag::Base(Space::T) => dim_r + 1 - 2 * n * n,
            SpaceTag::APlusS => dim_a + dim_s,
            SpaceTag::W(j) => match j {
                1 => 1,
                2 | 5 => sym0,
                3 | 4 => lam,
                6 => weyl,
                7 => w7,
                _ => w8,
            },
            SpaceTag::A(j) => match j {
                1 => 1,
                2 | 3 => sym0,
                4 | 5 => lam,
                6 => weyl,
                7 => w7,
                _ => w8,
            },
        }
    }
}

impl fmt::Display for SpaceTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceTag::Base(s) => write!(f, "{s}"),
            SpaceTag::W(j) => write!(f, "W{j}"),
            SpaceTag::A(j) => write!(f, "A{j}"),
            SpaceTag::APlusS => f.write_str("a_plus_s"),
        }
    }
}

impl FromStr for SpaceTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "a_plus_s" {
            return Ok(SpaceTag::APlusS);
        }
        if let Ok(space) = s.parse::<Space>() {
            return Ok(SpaceTag::Base(space));
        }
        let bad = || Error::UnknownSpace(s.to_string());
        let mut chars = s.chars();
        let head = chars.next().ok_or_else(bad)?;
        let j: u8 = chars.as_str().parse().map_err(|_| bad())?;
        if !(1..=8).contains(&j) {
            return Err(bad());
        }
        match head {
            'W' | 'w' => Ok(SpaceTag::W(j)),
            'A' => Ok(SpaceTag::A(j)),
            _ => Err(bad()),
        }
    }
}

impl Serialize for SpaceTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleSpec {
    pub space: SpaceTag,
    pub dim: usize,
    pub signature: (usize, usize),
    pub seed: u64,
}

/// 64-bit FNV-1a, used to derive per-check seeds from names.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(*b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Uniform `[-1, 1)` noise tensor from stream `stream` of `seed`.
pub fn noise_tensor(n: usize, seed: u64, stream: u64) -> Curvature4Tensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let data: Vec<f64> = (0..n.pow(4)).map(|_| rng.random_range(-1.0..1.0)).collect();
    Curvature4Tensor::from_vec(n, data).expect("n^4 entries")
}

/// Uniform `[-1, 1)` bilinear form from stream `stream` of `seed`.
pub fn noise_form(n: usize, seed: u64, stream: u64) -> BilinearForm {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let data: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    BilinearForm::from_row_major(n, data).expect("n^2 entries")
}

/// Builds an element of `tag` from a noise tensor. No emptiness check.
pub fn project_to(tag: SpaceTag, noise: &Curvature4Tensor, g: &ScalarProduct) -> Curvature4Tensor {
    if tag == SpaceTag::Base(Space::Co) {
        return antisymmetrize_first_pair(noise);
    }
    let r = bianchi_project(noise);
    match tag {
        SpaceTag::Base(Space::Co) | SpaceTag::Base(Space::R) => r,
        SpaceTag::Base(Space::A) => psi(&r),
        SpaceTag::Base(Space::S) => mu(&r),
        SpaceTag::APlusS => &psi(&r) + &mu(&r),
        SpaceTag::Base(Space::F) => {
            let [_, _, p3, ..] = w_components(&r, g);
            &r - &p3
        }
        SpaceTag::Base(Space::P) => projective_part_unchecked(&r, g),
        SpaceTag::Base(Space::T) => traceless_core_unchecked(&r, g),
        SpaceTag::W(j) => {
            let comps = w_components(&r, g);
            comps[usize::from(j) - 1].clone()
        }
        SpaceTag::A(j) => {
            let comps = a_components(&r, g);
            comps[usize::from(j) - 1].clone()
        }
    }
}

fn check_spec(dim: usize, signature: (usize, usize)) -> Result<ScalarProduct> {
    if signature.0 + signature.1 != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: signature.0 + signature.1,
        });
    }
    ScalarProduct::standard(signature.0, signature.1)
}

/// One element of the requested space, from stream 0 of `spec.seed`.
pub fn sample(spec: &SampleSpec) -> Result<Curvature4Tensor> {
    let g = check_spec(spec.dim, spec.signature)?;
    if spec.space.formula_dimension(spec.dim) == 0 {
        return Err(Error::EmptySpace {
            space: spec.space.to_string(),
            dim: spec.dim,
        });
    }
    Ok(project_to(spec.space, &noise_tensor(spec.dim, spec.seed, 0), &g))
}

#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    pub space: SpaceTag,
    pub empirical_dim: usize,
    pub formula_dim: Option<usize>,
    pub samples_used: usize,
    /// Smallest accepted over largest rejected singular value; `None` when
    /// one of the two sets is empty or every rejected value is exactly 0.
    pub singular_value_gap: Option<f64>,
}

/// Rank by thresholding at `RANK_THRESHOLD × max(σ_max, 1)`, with the gap
/// between the accepted and rejected singular values.
pub fn numerical_rank(singular_values: &[f64]) -> (usize, Option<f64>) {
    let top = singular_values.iter().fold(0.0_f64, |m, s| m.max(*s));
    let threshold = RANK_THRESHOLD * top.max(1.0);
    let accepted = singular_values.iter().filter(|s| **s > threshold);
    let smallest_kept = accepted.clone().fold(f64::INFINITY, |m, s| m.min(*s));
    let rank = accepted.count();
    let largest_dropped = singular_values
        .iter()
        .filter(|s| **s <= threshold)
        .fold(f64::NEG_INFINITY, |m, s| m.max(*s));
    let gap = if rank == 0 || rank == singular_values.len() || largest_dropped <= 0.0 {
        None
    } else {
        Some(smallest_kept / largest_dropped)
    };
    (rank, gap)
}

/// Rank of the stacked row vectors, each scaled by `1 / scale`.
pub(crate) fn stacked_rank(rows: &[(Vec<f64>, f64)], width: usize) -> (usize, Option<f64>) {
    if rows.is_empty() {
        return (0, None);
    }
    let m = DMatrix::from_fn(rows.len(), width, |i, j| {
        let (v, s) = &rows[i];
        if *s > 0.0 {
            v[j] / s
        } else {
            v[j]
        }
    });
    let sv = m.singular_values();
    numerical_rank(sv.as_slice())
}

/// Empirical dimension with seed 0.
pub fn empirical_dimension(
    space: SpaceTag,
    dim: usize,
    signature: (usize, usize),
    samples: usize,
) -> Result<DimensionReport> {
    empirical_dimension_seeded(space, dim, signature, samples, 0)
}

/// Stacks `samples` elements (streams `0..samples` of `seed`) and returns
/// their numerical rank.
pub fn empirical_dimension_seeded(
    space: SpaceTag,
    dim: usize,
    signature: (usize, usize),
    samples: usize,
    seed: u64,
) -> Result<DimensionReport> {
    let g = check_spec(dim, signature)?;
    let formula = space.formula_dimension(dim);
    let needed = (2 * formula).max(1);
    if samples < needed {
        return Err(Error::InsufficientSamples { needed, got: samples });
    }
    let rows: Vec<(Vec<f64>, f64)> = (0..samples as u64)
        .map(|k| {
            let noise = noise_tensor(dim, seed, k);
            let t = project_to(space, &noise, &g);
            (t.into_data(), noise.max_norm())
        })
        .collect();
    let (rank, gap) = stacked_rank(&rows, dim.pow(4));
    if let Some(gap) = gap {
        if gap < MIN_GAP {
            return Err(Error::InconclusiveRank {
                space: space.to_string(),
                gap,
            });
        }
    }
    Ok(DimensionReport {
        space,
        empirical_dim: rank,
        formula_dim: Some(formula),
        samples_used: samples,
        singular_value_gap: gap,
    })
}

/// Default sample count for a tag: twice the formula dimension plus 8.
pub fn default_samples(space: SpaceTag, dim: usize) -> usize {
    2 * space.formula_dimension(dim) + 8
}

/// Ranks of the antisymmetric and symmetric parts of `Ric` over
/// `samples` elements of `r(V)`.
pub fn ricci_image_dimensions(
    dim: usize,
    signature: (usize, usize),
    samples: usize,
    seed: u64,
) -> Result<(usize, usize)> {
    let g = check_spec(dim, signature)?;
    let mut lam = Vec::with_capacity(samples);
    let mut sym = Vec::with_capacity(samples);
    for k in 0..samples as u64 {
        let noise = noise_tensor(dim, seed, k);
        let r = bianchi_project(&noise);
        let (s, l) = ric(&r, &g).sym_antisym_split();
        let scale = noise.max_norm();
        lam.push((l.entries().to_vec(), scale));
        sym.push((s.entries().to_vec(), scale));
    }
    Ok((stacked_rank(&lam, dim * dim).0, stacked_rank(&sym, dim * dim).0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::membership;

    #[test]
    fn tags_round_trip() {
        for tag in SpaceTag::all() {
            assert_eq!(tag.to_string().parse::<SpaceTag>().unwrap(), tag);
        }
        assert!("W9".parse::<SpaceTag>().is_err());
        assert!("A0".parse::<SpaceTag>().is_err());
        assert!("x".parse::<SpaceTag>().is_err());
        assert!("".parse::<SpaceTag>().is_err());
    }

    #[test]
    fn formula_sums() {
        for n in 3..=6 {
            let r = SpaceTag::Base(Space::R).formula_dimension(n);
            let w: usize = (1..=8).map(|j| SpaceTag::W(j).formula_dimension(n)).sum();
            let a: usize = (1..=8).map(|j| SpaceTag::A(j).formula_dimension(n)).sum();
            assert_eq!(w, r);
            assert_eq!(a, r);
            let t: usize = (6..=8).map(|j| SpaceTag::W(j).formula_dimension(n)).sum();
            assert_eq!(t, SpaceTag::Base(Space::T).formula_dimension(n));
        }
        assert_eq!(SpaceTag::Base(Space::R).formula_dimension(3), 24);
        assert_eq!(SpaceTag::Base(Space::F).formula_dimension(4), 74);
        assert_eq!(SpaceTag::Base(Space::P).formula_dimension(4), 64);
        assert_eq!(SpaceTag::W(6).formula_dimension(3), 0);
    }

    #[test]
    fn fnv_reference_values() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
    }

    #[test]
    fn samples_are_deterministic_and_in_space() {
        let spec = SampleSpec {
            space: SpaceTag::Base(Space::A),
            dim: 3,
            signature: (3, 0),
            seed: 7,
        };
        let a = sample(&spec).unwrap();
        let b = sample(&spec).unwrap();
        assert_eq!(a.data(), b.data());
        let g = ScalarProduct::euclidean(3).unwrap();
        assert!(membership(&a, &g, Space::A).unwrap().residual <= 1e-10);
        let other = sample(&SampleSpec { seed: 8, ..spec }).unwrap();
        assert_ne!(a.data(), other.data());
    }

    #[test]
    fn empty_space_is_signalled() {
        let spec = SampleSpec {
            space: SpaceTag::W(6),
            dim: 3,
            signature: (3, 0),
            seed: 0,
        };
        assert!(matches!(sample(&spec), Err(Error::EmptySpace { dim: 3, .. })));
        let rep = empirical_dimension(SpaceTag::W(6), 3, (3, 0), 4).unwrap();
        assert_eq!(rep.empirical_dim, 0);
    }

    #[test]
    fn rank_helper() {
        assert_eq!(numerical_rank(&[3.0, 1.0, 1e-12]), (2, Some(1e12)));
        assert_eq!(numerical_rank(&[3.0, 1.0]), (2, None));
        assert_eq!(numerical_rank(&[1e-13, 0.0]), (0, None));
        assert_eq!(numerical_rank(&[2.0, 0.0]), (1, None));
        let (_, gap) = numerical_rank(&[1.0, 1e-7, 1e-9]);
        assert!(gap.unwrap() < MIN_GAP);
    }

    #[test]
    fn insufficient_samples() {
        assert!(matches!(
            empirical_dimension(SpaceTag::Base(Space::R), 3, (3, 0), 40),
            Err(Error::InsufficientSamples { needed: 48, got: 40 })
        ));
    }

    #[test]
    fn signature_must_match_dim() {
        assert!(matches!(
            empirical_dimension(SpaceTag::Base(Space::A), 3, (2, 0), 20),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
