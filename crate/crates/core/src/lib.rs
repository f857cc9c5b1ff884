//! Exact reflection representations of 2-spherical Coxeter groups over real
//! cyclotomic fields.

pub mod analysis;
pub mod cartan;
pub mod construction;
pub mod cyclotomic;
pub mod error;
pub mod forms;
pub mod graph;
pub mod io;
pub mod matrix;
pub mod polynomial;
pub mod precision;
mod modular;
mod qvec;
pub mod scalar;

pub use construction::{FieldMatrix, ReflectionRep};
pub use cyclotomic::{FieldContext, FieldElement, IntPolynomial};
pub use error::{CoxError, Result};
pub use scalar::{Rational, Scalar};

/// Dense matrix over the rationals.
pub type RationalMatrix = matrix::Matrix<Rational>;
/// Dense matrix over `f64`, for approximate work.
pub type FloatMatrix = matrix::Matrix<f64>;
