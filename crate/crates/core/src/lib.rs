//! Exact Clifford algebra arithmetic, spinor modules, spin groups, symbol
//! calculus and numerically certified Dirac indices.

#![allow(clippy::needless_range_loop)]

pub mod acceptance;
pub mod clifford;
pub mod dirac;
pub mod error;
pub mod flow;
pub mod linsolve;
pub mod matrix;
pub mod scalar;
pub mod spin;
pub mod spinor;
pub mod symbols;

pub use clifford::{blade_product, AlgebraType, Blade, Multivector, QuadraticForm};
pub use error::{Error, Result};
pub use matrix::ExactMatrix;
pub use scalar::{Coefficient, Scalar};
