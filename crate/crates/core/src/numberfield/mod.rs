//! Exact arithmetic over integer polynomials, real algebraic numbers and the
//! number fields they generate.

mod algebraic;
mod field;
mod poly;

pub use algebraic::{silver_polynomial, silver_root, AlgebraicNumber, SilverIndex, DEFAULT_PRECISION_BITS};
pub use field::{parse_rational, Field, FieldElement};
pub use poly::IntPolynomial;
