//! Acceptance run: one PASS/FAIL line per criterion, exact arithmetic only.
//!
//! Built with `harness = false` so the verdict lines are always printed.
//! The process fails when a criterion fails for an unexpected reason. The
//! one documented, unattainable item (three printed closed forms that are
//! false as stated, see criterion 1) is reported as FAIL together with its
//! counterexamples. It does not fail the process as long as the corrected
//! forms hold and the printed ones are still refuted.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use sp2_brst::algebra::{GradedPoly, TheorySpec};
use sp2_brst::cli::{run_pipeline, EXIT_VERIFY_FAILED};
use sp2_brst::identities::{check_printed_forms, default_space, run_identity_suite, IdentityConfig, Sampler};
use sp2_brst::io::{parse_expr, parse_theory, serialize, OmegaFile, Theory};
use sp2_brst::observables::{lift, verify_realization, ObservableError};
use sp2_brst::operators::{Calculus, SymTensor};
use sp2_brst::solver::{double_factorial_count, enumerate_descendants, tree_shapes, Method, Solver, SolverConfig};

struct Verdict {
    pass: bool,
    /// A failure that is documented as unattainable and was confirmed.
    expected_failure: bool,
    summary: String,
    details: Vec<String>,
}

impl Verdict {
    fn new(pass: bool, summary: impl Into<String>) -> Verdict {
        Verdict { pass, expected_failure: false, summary: summary.into(), details: Vec::new() }
    }
}

fn fixture(name: &str) -> Theory {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("theories").join(name);
    parse_theory(&std::fs::read_to_string(path).expect("fixture readable")).expect("fixture parses")
}

fn criterion_1() -> Verdict {
    let space = default_space();
    let config = IdentityConfig::default();
    let report = run_identity_suite(&space, &config);
    let printed = check_printed_forms(&space, &config);
    let calc = Calculus::new(&space);

    // The closed-form V, tried for several parameters on S¹ and S².
    let mut sampler = Sampler::new(&space, config.seed ^ 0x5eed, config.degree, config.max_terms);
    let mut v_reconstructs = Vec::new();
    for rank in [1usize, 2] {
        let xs: Vec<SymTensor> = (0..20).map(|_| sampler.tensor(rank)).collect();
        for param in 1..=rank + 2 {
            let holds = xs.iter().all(|x| {
                let rebuilt = calc
                    .w_plus(x)
                    .and_then(|wp| calc.v(&wp, param))
                    .and_then(|v| calc.w(&v))
                    .and_then(|b| Ok(calc.w_plus(&calc.w(x)?)?.add(&b)));
                rebuilt.map(|r| r == *x).unwrap_or(false)
            });
            v_reconstructs.push((rank, param, holds));
        }
    }

    let corrected_ok = report.all_passed();
    let printed_refuted = printed.iter().all(|p| p.counterexample.is_some()) && v_reconstructs.iter().all(|&(_, _, h)| !h);
    let passed = report.outcomes.iter().filter(|o| o.failures == 0).count();
    let mut v = Verdict::new(
        corrected_ok && !printed_refuted,
        format!(
            "operator identities: {passed}/{} hold exactly on {} samples; printed forms 4N^2-2MN, 1/2 M N^-1 split and closed-form V reconstruction are false",
            report.outcomes.len(),
            config.samples
        ),
    );
    v.expected_failure = corrected_ok && printed_refuted;
    for o in &report.outcomes {
        v.details.push(format!("{} {} ({} checked)", if o.failures == 0 { "ok  " } else { "FAIL" }, o.name, o.checked));
    }
    for p in &printed {
        v.details.push(format!("printed form refuted -- {p}"));
    }
    for (rank, param, holds) in v_reconstructs {
        v.details.push(format!("X = W+WX + W V(n={param}) W+X on S^{rank}: {}", if holds { "holds" } else { "fails" }));
    }
    v
}

fn criterion_2() -> Verdict {
    let theory = fixture("abelian.json");
    let k = 6;
    let solver = Solver::new(&theory.spec, k).unwrap();
    let res = solver.solve(&SolverConfig::new(k)).unwrap();
    let s = theory.spec.space();
    let mut phis: Vec<GradedPoly> = theory.observables.iter().map(|(_, p)| p.clone()).collect();
    let mut sampler = Sampler::new(s, 2, 4, 4);
    // Random functions of ξ alone.
    while phis.len() < 12 {
        let p = sampler.poly().filter(|m| m.n_degree(s) == m.degree() && m.cp_degree(s) == 0);
        let p = p.filter(|m| m.factors().all(|(v, _)| v < s.m()));
        if !p.is_zero() {
            phis.push(p);
        }
    }
    let k_zero = phis.iter().all(|phi| lift(phi, &theory.spec, &res, k).map(|l| l.k_part.is_zero() && l.report.ok()).unwrap_or(false));
    let pass = res.pi.is_zero() && res.omega == res.omega1 && res.check.vanishes() && k_zero;
    Verdict::new(pass, format!("abelian m=3, k=6: Pi = 0, Omega = Omega1, residual 0, K = 0 for {} observables", phis.len()))
}

fn criterion_3() -> Verdict {
    let spec = TheorySpec::so3();
    let k = 6;
    let solver = Solver::new(&spec, k).unwrap();
    match solver.solve(&SolverConfig::new(k).method(Method::Both)) {
        Ok(res) => {
            let s = spec.space();
            let pass = res.check.direct.is_zero() && res.check.forms_agree() && res.boundary_violations.is_empty();
            let mut v = Verdict::new(
                pass,
                format!("so(3), k=6: direct residual 0, fixed-point = descendants, boundary conditions hold ({} Omega terms)", res.omega.total_terms()),
            );
            v.details.push(format!("Omega terms by cp-degree: {:?}", res.omega_by_degree(s).iter().map(|d| (d.cp, d.terms)).collect::<Vec<_>>()));
            v
        }
        Err(e) => Verdict::new(false, format!("so(3), k=6: solver error {e}")),
    }
}

fn criterion_4() -> Verdict {
    let theory = fixture("superalgebra.json");
    let jacobi = theory.spec.jacobi_violations();
    let k = 4;
    let res = Solver::new(&theory.spec, k).unwrap().solve(&SolverConfig::new(k)).unwrap();
    let u: Vec<String> = theory.spec.structure_functions().map(|((a, b, c), p)| format!("U_{{{a}{b}}}^{c} = {}", serialize(theory.spec.space(), p))).collect();
    let pass = jacobi.is_empty() && res.ok() && !res.pi.is_zero();
    Verdict::new(pass, format!("mixed parity m=2 (parities 0,1), {}, Jacobi ok, k=4: residual 0 ({} Pi terms)", u.join(", "), res.pi.total_terms()))
}

fn criterion_5() -> Verdict {
    let spec = TheorySpec::so3();
    let s = spec.space();
    let solver = Solver::new(&spec, 6).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;
    for m in [3usize, 4] {
        let e = enumerate_descendants(m);
        // Labeled trees from shapes: Σ m!/|Aut T|.
        let factorial: u64 = (1..=m as u64).product();
        let from_shapes: u64 = tree_shapes(m).iter().map(|t| factorial / t.automorphisms()).sum();
        let count_ok = e.trees.len() as u64 == double_factorial_count(m) && from_shapes == double_factorial_count(m);
        // Draw inputs until the multi-bracket is nonzero, so the equality is
        // not vacuous.
        let (rec, sum) = (0..16u64)
            .map(|attempt| {
                let mut sampler = Sampler::new(s, 40 + 100 * attempt + m as u64, 2, 5);
                let xs: Vec<SymTensor> = (0..m)
                    .map(|_| loop {
                        let t = sampler.tensor(1).map(|p| p.filter(|mono| mono.parity(s) == 1 && mono.ngh(s) == 1));
                        if !t.is_zero() {
                            break t;
                        }
                    })
                    .collect();
                (solver.multi_bracket(&xs).unwrap(), solver.descendant_sum(&xs).unwrap())
            })
            .find(|(rec, _)| !rec.is_zero())
            .unwrap_or_else(|| (SymTensor::zero(1), SymTensor::zero(1)));
        let equal = rec == sum;
        pass &= count_ok && equal && !rec.is_zero();
        notes.push(format!("m={m}: {} descendants ({} chains), (2m-3)!! = {}, shape count {from_shapes}, recursion = sum: {equal} ({} terms)", e.trees.len(), e.chains, double_factorial_count(m), rec.total_terms()));
    }
    let three: Vec<String> = enumerate_descendants(3).trees.iter().map(|t| t.to_string()).collect();
    let mut v = Verdict::new(pass, format!("descendants: {}", notes.join("; ")));
    v.details.push(format!("m=3 descendants: {}", three.join(" + ")));
    v
}

fn criterion_6() -> Verdict {
    let theory = fixture("so3.json");
    let k = 6;
    let res = Solver::new(&theory.spec, k).unwrap().solve(&SolverConfig::new(k)).unwrap();
    let mut pass = res.ok();
    let lifts: Vec<_> = ["casimir", "casimir2"].iter().map(|n| lift(theory.observable(n).unwrap(), &theory.spec, &res, k).unwrap()).collect();
    let mut details = Vec::new();
    for (n, l) in ["casimir", "casimir2"].iter().zip(&lifts) {
        pass &= l.report.ok();
        details.push(format!("{n}: {{Omega^a, Phi'}}' = 0 through k=6: {}, restrict(lift) = phi0: {}", l.report.direct.is_zero(), l.report.restricts_to_phi0));
    }
    for a in &lifts {
        for b in &lifts {
            let r = verify_realization(a, b, &theory.spec);
            pass &= r.ok();
        }
    }
    let mut v = Verdict::new(pass, "so(3) Casimir and Casimir^2 lifted at k=6: invariant, restrict(lift) = id, bracket and product morphisms exact");
    v.details = details;
    v
}

fn criterion_7() -> Verdict {
    let spec = TheorySpec::so3();
    let s = spec.space();
    let k = 5;
    let solver = Solver::new(&spec, k).unwrap();
    let res = solver.solve(&SolverConfig::new(k)).unwrap();
    // Double one coefficient of cp-degree 3.
    let mut c1 = res.omega.component(&[1]).clone();
    let (mono, c) = c1.terms().find(|(m, _)| m.cp_degree(s) == 3).map(|(m, c)| (m.clone(), c.clone())).unwrap();
    c1.add_term(mono, c);
    let perturbed = SymTensor::vector(c1, res.omega.component(&[2]).clone());
    let residual_nonzero = !solver.verify_master(&perturbed).unwrap().direct.is_zero();

    let dir = tempfile::tempdir().unwrap();
    let omega_path = dir.path().join("perturbed.json");
    std::fs::write(&omega_path, OmegaFile::new(s, k, &perturbed).to_json()).unwrap();
    let so3_path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("theories/so3.json");
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_pipeline(["sp2-brst", "verify", so3_path.to_str().unwrap(), omega_path.to_str().unwrap()], &mut out, &mut err);

    let gauge = fixture("gauge_particle.json");
    let gres = Solver::new(&gauge.spec, 4).unwrap().solve(&SolverConfig::new(4)).unwrap();
    let q = gauge.observable("q").unwrap();
    let rejected = match lift(q, &gauge.spec, &gres, 4) {
        Err(ObservableError::NotFirstClass { alpha, remainder }) => Some(format!("{{q, xi[{alpha}]}}' = {remainder}")),
        _ => None,
    };
    // A constant shift of a first-class observable stays first class.
    let shifted = parse_expr(gauge.spec.space(), "xi[1]^2 + 3").unwrap();
    let accepts_first_class = lift(&shifted, &gauge.spec, &gres, 4).is_ok();
    let pass = residual_nonzero && code == EXIT_VERIFY_FAILED && rejected.is_some() && accepts_first_class;
    Verdict::new(
        pass,
        format!(
            "negative controls: perturbed Omega residual nonzero: {residual_nonzero}, CLI verify exit {code}; non-first-class q rejected with witness {}",
            rejected.unwrap_or_else(|| "NONE".into())
        ),
    )
}

fn main() {
    let criteria: [(u32, Duration, fn() -> Verdict); 7] = [
        (1, Duration::from_secs(60), criterion_1),
        (2, Duration::from_secs(5), criterion_2),
        (3, Duration::from_secs(120), criterion_3),
        (4, Duration::from_secs(120), criterion_4),
        (5, Duration::from_secs(30), criterion_5),
        (6, Duration::from_secs(120), criterion_6),
        (7, Duration::from_secs(30), criterion_7),
    ];
    let mut unexpected = 0;
    let mut passed = 0;
    for (n, limit, run) in criteria {
        let started = Instant::now();
        let mut verdict = run();
        let elapsed = started.elapsed();
        if elapsed > limit {
            verdict.pass = false;
            verdict.expected_failure = false;
            verdict.summary.push_str(&format!(" [runtime limit {}s exceeded]", limit.as_secs()));
        }
        let status = if verdict.pass { "PASS" } else { "FAIL" };
        println!("criterion {n}: {status} ({:.2}s, limit {}s) {}", elapsed.as_secs_f64(), limit.as_secs(), verdict.summary);
        for d in &verdict.details {
            println!("    {d}");
        }
        if verdict.pass {
            passed += 1;
        } else if verdict.expected_failure {
            println!("    known: the statement is false as printed; the corrected identities above hold. Not counted as a regression.");
        } else {
            unexpected += 1;
        }
    }
    println!("acceptance: {passed}/7 criteria pass, {unexpected} unexpected failure(s)");
    if unexpected > 0 {
        std::process::exit(1);
    }
}
