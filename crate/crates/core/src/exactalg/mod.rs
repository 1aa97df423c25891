//! Exact arithmetic: quadratic-field scalars, sparse polynomials,
//! polynomial matrices and linear solving.

mod linalg;
mod poly;
mod polymat;
mod scalar;

pub use linalg::{dot, nullspace, rref, solve_linear, LinearSolution, ScalarMatrix};
pub use poly::{Context, Monomial, Polynomial};
pub use polymat::{combinations, PolyMatrix};
pub use scalar::{check_field, is_square_free, Scalar, ScalarOp};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed quadratic fields sqrt({0}) and sqrt({1})")]
    MixedField(u32, u32),
    #[error("invalid field parameter {0}: expected 0 or a square-free integer >= 2")]
    InvalidField(u32),
    #[error("polynomials live in different variable contexts")]
    ContextMismatch,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("incomplete assignment: {0}")]
    IncompleteAssignment(String),
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("matrix is {0}x{1}, not square")]
    NotSquare(usize, usize),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("internal error: {0}")]
    Internal(String),
}
