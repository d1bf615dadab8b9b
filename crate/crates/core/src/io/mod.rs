//! Text formats: the expression grammar, theory files and charge files.

mod expr;
mod theory_file;

pub use expr::{parse_coeff, parse_expr, serialize, ParseError};
pub use theory_file::{parse_theory, InputError, LiftFile, ObservableDecl, OmegaFile, Theory, TheoryFile, VariableDecl};

use crate::algebra::TheorySpec;

/// Graded Jacobi check of the matter bracket on all generator triples; the
/// returned lines describe each violation (empty when the theory is
/// consistent).
pub fn validate_jacobi(spec: &TheorySpec) -> Vec<String> {
    let s = spec.space();
    spec.jacobi_violations()
        .into_iter()
        .map(|((i, j, k), v)| format!("({}, {}, {}): {}", s.var(i), s.var(j), s.var(k), serialize(s, &v)))
        .collect()
}
