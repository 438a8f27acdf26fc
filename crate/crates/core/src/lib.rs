//! Exact Poisson calculus on polynomial and Laurent-polynomial coordinate
//! rings, together with truncated deformation quantization.

pub mod calculus;
pub mod error;
pub mod linalg;
pub mod poisson;
pub mod quantize;
pub mod ring;
pub mod series;
pub mod slices;

pub use calculus::{contract, de_rham, lie_derivative, schouten, DiffForm, PolyVector};
pub use error::{Error, Result};
pub use ring::{CoordinateRing, Monomial, Poly, Ring};
pub use series::{HPoly, HSeries};
