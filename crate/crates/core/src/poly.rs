//! Sparse real polynomials in `n` variables with exact differentiation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// `Σ c_e x^e` keyed by exponent vectors of length `num_vars`; zero
/// coefficients are never stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: f64) -> Self {
        Self::from_terms(num_vars, [(vec![0; num_vars], c)])
    }

    /// The coordinate function `x_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Self::from_terms(num_vars, [(e, 1.0)])
    }

    /// Sums repeated exponents and drops zero coefficients.
    ///
    /// Panics if an exponent vector has the wrong length.
    pub fn from_terms(num_vars: usize, terms: impl IntoIterator<Item = (Vec<u32>, f64)>) -> Self {
        let mut out = Self::zero(num_vars);
        for (e, c) in terms {
            assert_eq!(e.len(), num_vars, "exponent length");
            out.add_term(e, c);
        }
        out
    }

    fn add_term(&mut self, e: Vec<u32>, c: f64) {
        if c == 0.0 {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if *o.get() == 0.0 {
                    o.remove();
                }
            }
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, f64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::from_terms(self.num_vars, self.terms.iter().map(|(e, v)| (e.clone(), c * v)))
    }

    /// `∂/∂x_i`, exact.
    pub fn derivative(&self, i: usize) -> Self {
        Self::from_terms(
            self.num_vars,
            self.terms.iter().filter(|(e, _)| e[i] > 0).map(|(e, v)| {
                let mut d = e.clone();
                d[i] -= 1;
                (d, v * f64::from(e[i]))
            }),
        )
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.num_vars, "point dimension");
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &xi)| acc * xi.powi(k as i32))
            })
            .sum()
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.num_vars, other.num_vars, "polynomial variable count mismatch");
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.check(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.check(rhs);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.check(rhs);
        let mut out = Polynomial::zero(self.num_vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

/// Square matrix of polynomials, row-major.
pub type PolyMatrix = Vec<Vec<Polynomial>>;

fn minor(m: &PolyMatrix, row: usize, col: usize) -> PolyMatrix {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect()
}

/// Determinant by cofactor expansion along the first row.
pub fn determinant(m: &PolyMatrix, num_vars: usize) -> Polynomial {
    match m.len() {
        0 => Polynomial::constant(num_vars, 1.0),
        1 => m[0][0].clone(),
        _ => {
            let mut acc = Polynomial::zero(num_vars);
            for (j, entry) in m[0].iter().enumerate() {
                if entry.is_zero() {
                    continue;
                }
                let term = entry * &determinant(&minor(m, 0, j), num_vars);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

/// Adjugate: `adj[i][j] = (-1)^{i+j} det(minor(j, i))`, so that
/// `m · adj = det · I`.
pub fn adjugate(m: &PolyMatrix, num_vars: usize) -> PolyMatrix {
    let n = m.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let d = determinant(&minor(m, j, i), num_vars);
                    if (i + j) % 2 == 0 {
                        d
                    } else {
                        -&d
                    }
                })
                .collect()
        })
        .collect()
}
