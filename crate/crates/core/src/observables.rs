//! Realization of observables: a first-class function Φ₀(ξ) is lifted to a
//! BRST-invariant Φ′ = Φ₀ + K with {Ωᵃ, Φ′}′ = 0, and recovered by setting
//! C = π = 0.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{GradedPoly, Sector, Space, TheorySpec};
use crate::operators::SymTensor;
use crate::solver::{Perturbation, Solver, SolverError, SolverResult};

#[derive(Debug, Error)]
pub enum ObservableError {
    #[error("observable depends on ghost variables; only xi and xip are allowed")]
    NotMatter,
    #[error("observable is not first class: {{phi0, xi[{alpha}]}}' has remainder {remainder} off the constraint surface")]
    NotFirstClass { alpha: usize, remainder: String },
    #[error("observable truncation {requested} differs from the order {solved} at which Omega was solved")]
    OrderMismatch { solved: u32, requested: u32 },
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Outcome of the first-class test, with the first failing constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstClassCheck {
    pub first_class: bool,
    /// (α, remainder of {Φ₀, ξ_α}′ modulo the ideal (ξ_β)).
    pub witness: Option<(usize, GradedPoly)>,
}

/// Decides whether {Φ₀, ξ_α}′ lies in the ideal generated by the ξ_β for all
/// α. The generators are coordinates, so division by them leaves exactly the
/// part of the polynomial free of every ξ_β.
pub fn check_first_class(phi0: &GradedPoly, spec: &TheorySpec) -> Result<FirstClassCheck, ObservableError> {
    let s = spec.space();
    if !phi0.only_sectors(s, &[Sector::XiConstraint, Sector::XiPhysical]) {
        return Err(ObservableError::NotMatter);
    }
    let constraints: BTreeSet<Sector> = [Sector::XiConstraint].into_iter().collect();
    for alpha in 1..=s.m() {
        let br = spec.bracket(phi0, &GradedPoly::var(s, s.xi(alpha)));
        let remainder = br.substitute_zero(s, &constraints);
        if !remainder.is_zero() {
            return Ok(FirstClassCheck { first_class: false, witness: Some((alpha, remainder)) });
        }
    }
    Ok(FirstClassCheck { first_class: true, witness: None })
}

/// Φ′|_{C=π=0}.
pub fn restrict(space: &Space, phi_prime: &GradedPoly) -> GradedPoly {
    let sectors: BTreeSet<Sector> = [Sector::Ghost, Sector::LagrangeMomentum].into_iter().collect();
    phi_prime.substitute_zero(space, &sectors)
}

/// Checks carried out on a lift.
#[derive(Clone, Debug)]
pub struct LiftReport {
    /// {Ωᵃ, Φ′}′ through cp-degree k.
    pub direct: SymTensor,
    /// WK + [Ω,Φ₀] + AK + [Π,K] through cp-degree k.
    pub structured: SymTensor,
    pub ngh_zero: bool,
    pub restricts_to_phi0: bool,
    /// Γ̄K, which must vanish.
    pub bar_gamma_k: GradedPoly,
}

impl LiftReport {
    pub fn ok(&self) -> bool {
        self.direct.is_zero() && self.structured.is_zero() && self.ngh_zero && self.restricts_to_phi0 && self.bar_gamma_k.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct ObservableLift {
    pub phi0: GradedPoly,
    pub k_part: GradedPoly,
    pub phi_prime: GradedPoly,
    pub report: LiftReport,
}

/// Lifts Φ₀ with K = -(I + W⁺(A + ad Π))⁻¹W⁺[Ω, Φ₀].
pub fn lift(phi0: &GradedPoly, spec: &TheorySpec, solved: &SolverResult, k: u32) -> Result<ObservableLift, ObservableError> {
    if k != solved.k {
        return Err(ObservableError::OrderMismatch { solved: solved.k, requested: k });
    }
    let check = check_first_class(phi0, spec)?;
    if let Some((alpha, remainder)) = check.witness {
        return Err(ObservableError::NotFirstClass { alpha, remainder: crate::io::serialize(spec.space(), &remainder) });
    }
    let s = spec.space();
    let solver = Solver::new(spec, k)?;
    let calc = solver.calculus();
    let phi0_t = SymTensor::scalar(phi0.clone());
    let source = solver.tensor_bracket(&solved.omega, &phi0_t)?;
    let seed = calc.w_plus(&source).map_err(SolverError::from)?;
    let k_part = solver.neumann_apply(Perturbation::AdPi(&solved.pi), &seed)?.neg().as_scalar().clone();
    let phi_prime = phi0 + &k_part;

    let k_t = SymTensor::scalar(k_part.clone());
    let direct = solver.tensor_bracket(&solved.omega, &SymTensor::scalar(phi_prime.clone()))?;
    let structured = calc
        .w(&k_t)
        .map_err(SolverError::from)?
        .add(&source)
        .add(&solver.apply_a(&k_t)?)
        .add(&solver.tensor_bracket(&solved.pi, &k_t)?)
        .truncate_cp(s, k);
    let report = LiftReport {
        direct,
        structured,
        ngh_zero: phi_prime.is_zero() || phi_prime.ngh(s) == Some(0),
        restricts_to_phi0: restrict(s, &phi_prime) == *phi0,
        bar_gamma_k: calc.bar_gamma(&k_part),
    };
    Ok(ObservableLift { phi0: phi0.clone(), k_part, phi_prime, report })
}

/// Compatibility of the lift with the Poisson structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealizationReport {
    pub bracket_holds: bool,
    pub product_holds: bool,
    pub restrict_lift_identity: bool,
}

impl RealizationReport {
    pub fn ok(&self) -> bool {
        self.bracket_holds && self.product_holds && self.restrict_lift_identity
    }
}

/// Checks {Φ′₁,Φ′₂}′|_{C=π=0} = {φ₁,φ₂}′ and (Φ′₁Φ′₂)|_{C=π=0} = φ₁φ₂.
///
/// Restriction keeps exactly the cp-degree-0 terms, so products and
/// brackets are truncated at cp-degree 0 before comparing.
pub fn verify_realization(first: &ObservableLift, second: &ObservableLift, spec: &TheorySpec) -> RealizationReport {
    let s = spec.space();
    let lifted_bracket = spec.bracket_truncated(&first.phi_prime, &second.phi_prime, Some(0));
    let bracket_holds = lifted_bracket == spec.bracket(&first.phi0, &second.phi0);
    let lifted_product = first.phi_prime.mul_truncated(&second.phi_prime, s, Some(0));
    let product_holds = lifted_product == first.phi0.mul(&second.phi0, s);
    let restrict_lift_identity = restrict(s, &first.phi_prime) == first.phi0 && restrict(s, &second.phi_prime) == second.phi0;
    RealizationReport { bracket_holds, product_holds, restrict_lift_identity }
}
