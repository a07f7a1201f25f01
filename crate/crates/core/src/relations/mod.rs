//! Formal divisors on the double curve and the period relations they satisfy.

mod divisor;
mod period;
mod rows;

pub(crate) use divisor::split_signed;
pub use divisor::{FormalDivisor, PointSymbol};
pub use period::{
    derive, hirzebruch_relation, imposed_relations, psi, restriction_dictionary, Certificate, Derivation,
    RelationError, RelationSystem,
};
pub use rows::{verify_row, verify_table2, Preparation, RelationResult, RelationRow, RELATION_ROWS};
