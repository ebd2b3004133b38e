//! Algebraic curvature tensors on a scalar product space: the spaces
//! `co ⊃ r ⊃ a, s, f, p, t`, the W- and A-decompositions of `r(V)`,
//! seeded sampling with empirical dimension checks, and curvature of
//! polynomial statistical-manifold charts.

#![allow(clippy::needless_range_loop)]

pub mod error;
pub mod linalg;
pub mod tensor;
pub mod spaces;
pub mod decompose;
pub mod sampling;
pub mod verify;
pub mod poly;
pub mod chart;
pub mod io;

pub use error::{Error, Result};
pub use linalg::{tensor_pairing, BilinearForm, ScalarProduct};
pub use tensor::{dot_product, wedge_r, Curvature4Tensor};
