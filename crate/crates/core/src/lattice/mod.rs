//! Exact integer linear algebra over arbitrary-precision integers.

mod enumerate;
mod matrix;
mod normal_form;
mod quotient;

pub use enumerate::enumerate_short;
pub use matrix::{GramForm, IntMatrix, LatticeVector};
pub use normal_form::{elementary_divisors, hnf, in_span, inverse_unimodular, kernel_basis, snf, span_membership, Membership, SpanSolver};
pub use quotient::{quotient_by_isotropic, Quotient, Sublattice};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("form is not negative definite (leading minors of -g: {minors})")]
    NotNegativeDefinite { minors: String },
    #[error("vector does not lie in the sublattice")]
    NotInSublattice,
    #[error("vector is not isotropic on the sublattice")]
    NotIsotropic,
    #[error("vector is not primitive in the sublattice (content {content})")]
    NotPrimitive { content: String },
}
