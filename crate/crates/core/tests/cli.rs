use std::path::{Path, PathBuf};
use std::process::Command;

use sp2_brst::algebra::Coeff;
use sp2_brst::cli::{run_pipeline, EXIT_INPUT, EXIT_OK, EXIT_VERIFY_FAILED, MAX_TERMS_VAR};
use sp2_brst::io::{parse_theory, OmegaFile};
use sp2_brst::operators::SymTensor;

fn theory_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("theories").join(name)
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("sp2-brst").chain(args.iter().copied());
    let code = run_pipeline(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_so3_reports_zero_residual() {
    let so3 = theory_path("so3.json");
    let (code, out, _) = run(&["solve", "--order", "6", p(&so3)]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("residual terms by cp-degree: 0:0 1:0 2:0 3:0 4:0 5:0 6:0"));
    assert!(out.contains("boundary conditions: ok"));
    assert!(out.ends_with("status: PASS\n"));
}

#[test]
fn solve_abelian_has_empty_pi() {
    let (code, out, _) = run(&["solve", p(&theory_path("abelian.json"))]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Pi terms: 0"));
    assert!(out.contains("Omega terms by cp-degree: 1:12"));
}

#[test]
fn reports_are_deterministic() {
    let so3 = theory_path("so3.json");
    let first = run(&["solve", "--order", "5", "--method", "both", p(&so3)]);
    let second = run(&["solve", "--order", "5", "--method", "both", p(&so3)]);
    assert_eq!(first.0, EXIT_OK);
    assert_eq!(first.1, second.1);
    let a = run(&["check-identities", "--degree", "3", "--samples", "20", "--seed", "3"]);
    let b = run(&["check-identities", "--degree", "3", "--samples", "20", "--seed", "3"]);
    assert_eq!(a.0, EXIT_OK, "{}", a.1);
    assert_eq!(a.1, b.1);
    let (_, lift_a, _) = run(&["lift", "--observable", "J1", "--order", "4", p(&so3)]);
    let (_, lift_b, _) = run(&["lift", "--observable", "J1", "--order", "4", p(&so3)]);
    assert_eq!(lift_a, lift_b);
}

#[test]
fn verify_round_trip_and_perturbed_charge() {
    let dir = tempfile::tempdir().unwrap();
    let so3 = theory_path("so3.json");
    let omega_path = dir.path().join("omega.json");
    let (code, _, _) = run(&["solve", "--order", "5", "--out", p(&omega_path), p(&so3)]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = run(&["verify", p(&so3), p(&omega_path)]);
    assert_eq!(code, EXIT_OK, "{out}");

    // Change one coefficient of the cp-degree-3 part.
    let theory = parse_theory(&std::fs::read_to_string(&so3).unwrap()).unwrap();
    let s = theory.spec.space();
    let file = OmegaFile::from_json(&std::fs::read_to_string(&omega_path).unwrap()).unwrap();
    let omega = file.tensor(s).unwrap();
    let mut first = omega.component(&[1]).clone();
    let (mono, c) = first.terms().find(|(m, _)| m.cp_degree(s) == 3).map(|(m, c)| (m.clone(), c.clone())).unwrap();
    first.add_term(mono, c * Coeff::from_integer(2.into()));
    let perturbed = SymTensor::vector(first, omega.component(&[2]).clone());
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, OmegaFile::new(s, file.order, &perturbed).to_json()).unwrap();
    let (code, out, _) = run(&["verify", p(&so3), p(&bad_path)]);
    assert_eq!(code, EXIT_VERIFY_FAILED, "{out}");
    assert!(out.ends_with("status: FAIL\n"));
}

#[test]
fn non_first_class_observable_exits_one() {
    let (code, out, _) = run(&["lift", "--observable", "q", p(&theory_path("gauge_particle.json"))]);
    assert_eq!(code, EXIT_VERIFY_FAILED);
    assert!(out.contains("first class: NO"));
}

#[test]
fn lift_accepts_expressions_and_writes_output() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("lift.json");
    let (code, out, _) = run(&["lift", "--observable", "xi[1]*xi[2]", "--order", "4", "--out", p(&out_path), p(&theory_path("so3.json"))]);
    assert_eq!(code, EXIT_OK, "{out}");
    let written: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    assert_eq!(written["phi0"], "xi[1]*xi[2]");
    assert_eq!(written["order"], 4);
}

#[test]
fn bad_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{ \"format\": 1, \"constraints\": [ }").unwrap();
    let (code, _, err) = run(&["solve", p(&broken)]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("line"), "{err}");

    // Bosonic U_{11}^γ must vanish by antisymmetry.
    let asym = dir.path().join("asym.json");
    std::fs::write(&asym, r#"{"format": 1, "constraints": [{"name": "a", "parity": 0}], "U": {"1,1,1": "1"}}"#).unwrap();
    assert_eq!(run(&["solve", p(&asym)]).0, EXIT_INPUT);

    let (code, _, _) = run(&["solve", p(&dir.path().join("missing.json"))]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = run(&["solve", "--order", "1", p(&theory_path("so3.json"))]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = run(&["lift", "--observable", "nonsense(", p(&theory_path("so3.json"))]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn empty_theory_is_trivially_fine() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.json");
    std::fs::write(&empty, r#"{"format": 1, "constraints": []}"#).unwrap();
    let (code, out, _) = run(&["solve", p(&empty)]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn broken_jacobi_is_reported_and_fails() {
    // so(3) with U_{12}^3 = ξ₁: {ξ₃, {ξ₁, ξ₂}} = ξ₂ξ₃ while the other two terms vanish.
    let path = theory_path("broken_jacobi.json");
    let (code, out, _) = run(&["solve", p(&path)]);
    assert!(out.contains("jacobi: VIOLATED"), "{out}");
    assert_eq!(code, EXIT_VERIFY_FAILED);
}

#[test]
fn term_cap_from_environment_exits_two() {
    let bin = env!("CARGO_BIN_EXE_sp2-brst");
    let so3 = theory_path("so3.json");
    let capped = Command::new(bin).args(["solve", "--order", "6", p(&so3)]).env(MAX_TERMS_VAR, "10").output().unwrap();
    assert_eq!(capped.status.code(), Some(EXIT_INPUT));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("exceeds"));
    let free = Command::new(bin).args(["solve", "--order", "4", p(&so3)]).env_remove(MAX_TERMS_VAR).output().unwrap();
    assert_eq!(free.status.code(), Some(EXIT_OK));
}
