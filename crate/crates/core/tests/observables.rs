use std::path::PathBuf;

use sp2_brst::io::{parse_expr, parse_theory, Theory};
use sp2_brst::observables::{check_first_class, lift, restrict, verify_realization, ObservableError};
use sp2_brst::solver::{Solver, SolverConfig, SolverResult};

fn fixture(name: &str) -> Theory {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("theories").join(name);
    parse_theory(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn solved(theory: &Theory, k: u32) -> SolverResult {
    Solver::new(&theory.spec, k).unwrap().solve(&SolverConfig::new(k)).unwrap()
}

#[test]
fn so3_observables_lift_and_realize() {
    let theory = fixture("so3.json");
    let k = theory.order;
    let res = solved(&theory, k);
    assert!(res.ok());
    let names = ["casimir", "casimir2", "J1", "J2"];
    let lifts: Vec<_> = names.iter().map(|n| lift(theory.observable(n).unwrap(), &theory.spec, &res, k).unwrap()).collect();
    for (n, l) in names.iter().zip(&lifts) {
        assert!(l.report.ok(), "{n}");
    }
    for a in &lifts {
        for b in &lifts {
            assert!(verify_realization(a, b, &theory.spec).ok());
        }
    }
    // {J1, J2} = J3 survives the lift: the restricted bracket of the lifts.
    let j3 = parse_expr(theory.spec.space(), "xi[3]").unwrap();
    assert_eq!(theory.spec.bracket_truncated(&lifts[2].phi_prime, &lifts[3].phi_prime, Some(0)), j3);
}

#[test]
fn abelian_lifts_are_trivial() {
    let theory = fixture("abelian.json");
    let res = solved(&theory, theory.order);
    assert!(res.pi.is_zero());
    for (name, phi0) in &theory.observables {
        let l = lift(phi0, &theory.spec, &res, theory.order).unwrap();
        assert!(l.k_part.is_zero(), "{name}");
        assert!(l.report.ok());
    }
}

#[test]
fn superalgebra_observable_lifts() {
    let theory = fixture("superalgebra.json");
    let res = solved(&theory, theory.order);
    assert!(res.ok());
    let l = lift(theory.observable("H2").unwrap(), &theory.spec, &res, theory.order).unwrap();
    assert!(l.report.ok());
    assert_eq!(restrict(theory.spec.space(), &l.phi_prime), l.phi0);
}

#[test]
fn non_first_class_observable_is_rejected_with_witness() {
    let theory = fixture("gauge_particle.json");
    let s = theory.spec.space();
    let q = theory.observable("q").unwrap();
    let check = check_first_class(q, &theory.spec).unwrap();
    assert!(!check.first_class);
    let (alpha, remainder) = check.witness.unwrap();
    assert_eq!(alpha, 1);
    assert_eq!(remainder, parse_expr(s, "1").unwrap());
    let res = solved(&theory, theory.order);
    match lift(q, &theory.spec, &res, theory.order) {
        Err(ObservableError::NotFirstClass { alpha, remainder }) => {
            assert_eq!(alpha, 1);
            assert_eq!(remainder, "1");
        }
        other => panic!("expected rejection, got {other:?}"),
    }
    // p² is first class: {p², p} = 0.
    assert!(check_first_class(theory.observable("p2").unwrap(), &theory.spec).unwrap().first_class);
}

#[test]
fn weakly_vanishing_brackets_count_as_first_class() {
    // {ξ₁ξ₂, ξ_α} is quadratic in the constraints, hence weakly zero.
    let theory = fixture("so3.json");
    let s = theory.spec.space();
    assert!(check_first_class(&parse_expr(s, "xi[1]*xi[2]").unwrap(), &theory.spec).unwrap().first_class);
}
