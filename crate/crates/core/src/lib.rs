//! Exact symbolic construction of Sp(2)-symmetric BRST charges Ωᵃ and of
//! BRST-invariant extensions of first-class observables, for irreducible
//! first-class constraint systems given in constraint coordinates ξ.
//!
//! The pipeline is
//!
//! 1. [`algebra`]: graded polynomials over (ξ, 𝒫, C, λ, π) with exact
//!    rational coefficients and the extended Poisson bracket;
//! 2. [`operators`]: the homological operators N, W, Γ, M, Q, W⁺ on
//!    Sp(2)-symmetric tensors;
//! 3. [`solver`]: Ω = Ω₁ + Π with Π obtained from the fixed point
//!    Π = Π₀ + ½⟨Π,Π⟩ or from the descendant expansion;
//! 4. [`observables`]: the lift Φ′ = LΦ₀ and its checks;
//! 5. [`io`] and [`cli`]: theory files, the expression grammar, reports and
//!    the command-line pipeline.
//!
//! All series are truncated at a fixed cp-degree (number of C and π
//! factors); every step of the construction raises that degree, so results
//! are exact through the truncation order.

pub mod algebra;
pub mod cli;
pub mod identities;
pub mod io;
pub mod observables;
pub mod operators;
pub mod solver;

pub use algebra::{Coeff, GradedPoly, Sector, Space, TheorySpec};
pub use operators::{Calculus, SymTensor};
