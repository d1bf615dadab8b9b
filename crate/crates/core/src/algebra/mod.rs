//! Exact graded-commutative polynomial algebra over (ξ, 𝒫, C, λ, π) and its
//! Poisson bracket.

mod monomial;
mod poly;
mod space;
mod theory;

pub use monomial::{normal_form, Monomial};
pub use poly::{int, rat, Coeff, FieldTerm, GradedPoly};
pub use space::{Sector, Space, Variable};
pub use theory::{MatterVar, TheoryBuilder, TheorySpec};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("parity must be 0 or 1, got {0}")]
    BadParity(u8),
    #[error("too many variables ({0})")]
    TooManyVariables(usize),
    #[error("index out of range in {0}")]
    IndexOutOfRange(String),
    #[error("{0} depends on variables outside the allowed sectors")]
    IllegalDependence(String),
    #[error("bracket {0} violates graded antisymmetry")]
    NotAntisymmetric(String),
    #[error("bracket {0} has the wrong Grassmann parity")]
    WrongParity(String),
    #[error("constraint bracket {0} must be given through the structure functions")]
    ConstraintPairOutsideStructure(String),
}
