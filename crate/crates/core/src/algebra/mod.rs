//! Exact arithmetic over GF(p) and GF(2^m), and dense matrices over those fields.

mod field;
mod matrix;

pub use field::{field_inverse, FieldElement, FieldSpec, MAX_BINARY_DEGREE, MAX_PRIME};
pub use matrix::{mat_inverse, mat_mul, mat_rank, vectorize, Echelon, IncrementalBasis, Matrix};
