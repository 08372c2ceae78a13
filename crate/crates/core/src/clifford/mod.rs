//! Exact real and complex Clifford algebras over a diagonal quadratic form.

mod blade;
mod classify;
mod form;
mod multivector;

pub use blade::{blade_product, Blade};
pub use classify::{classify_complex, classify_real, AlgebraType, DivisionAlgebra};
pub use form::{QuadraticForm, MAX_DIM};
pub use multivector::Multivector;
