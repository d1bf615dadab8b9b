//! Command-line driver. Reports go to the given output stream and are
//! byte-for-byte deterministic; timings go to the diagnostic stream.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};

use crate::identities::{check_printed_forms, default_space, run_identity_suite, IdentityConfig};
use crate::io::{parse_theory, serialize, InputError, LiftFile, OmegaFile, Theory};
use crate::observables::{lift, verify_realization, ObservableError};
use crate::solver::{boundary_violations, DegreeCount, Method, Solver, SolverConfig, SolverError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Name of the environment variable capping intermediate term counts.
pub const MAX_TERMS_VAR: &str = "SP2_BRST_MAX_TERMS";
const DEFAULT_MAX_TERMS: usize = 1_000_000;

#[derive(Debug, Parser)]
#[command(name = "sp2-brst", version, about = "Exact Sp(2) BRST charges and lifted observables")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the master equations through a cp-degree and verify the residual.
    Solve {
        file: PathBuf,
        /// Truncation cp-degree; defaults to the file's `order`.
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, default_value = "fixed-point")]
        method: Method,
        /// Write the charge as an Omega JSON file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lift a named observable of the theory file and check the realization.
    Lift {
        file: PathBuf,
        /// Name of an observable in the file, or an expression in xi/xip.
        #[arg(long)]
        observable: String,
        #[arg(long)]
        order: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized operator identity suite.
    CheckIdentities {
        #[arg(long, default_value_t = 4)]
        degree: u32,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Re-verify a previously emitted charge against a theory.
    Verify { file: PathBuf, omega_file: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    /// The construction itself broke down (not a mere nonzero residual).
    Verify(String),
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Order(_) | SolverError::Upsilon(_) | SolverError::TooManyTerms { .. } => Failure::Input(e.to_string()),
            other => Failure::Verify(format!("solver failure: {other}")),
        }
    }
}

fn max_terms() -> Result<usize, Failure> {
    match std::env::var(MAX_TERMS_VAR) {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("{MAX_TERMS_VAR}={v} is not a number"))),
        Err(_) => Ok(DEFAULT_MAX_TERMS),
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write_file(path: &PathBuf, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn degrees(counts: &[DegreeCount]) -> String {
    if counts.is_empty() {
        return "none".into();
    }
    counts.iter().map(|d| format!("{}:{}", d.cp, d.terms)).collect::<Vec<_>>().join(" ")
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "NO"
    }
}

fn header(out: &mut String, theory: &Theory, file: &Path) {
    let s = theory.spec.space();
    let _ = writeln!(out, "theory: {} ({} constraints, {} physical)", file.display(), s.m(), s.n_physical());
    let jac = theory.spec.jacobi_violations();
    if jac.is_empty() {
        let _ = writeln!(out, "jacobi: ok");
    } else {
        for ((i, j, k), v) in &jac {
            let _ = writeln!(out, "jacobi: VIOLATED for ({}, {}, {}): {}", s.var(*i), s.var(*j), s.var(*k), serialize(s, v));
        }
    }
}

fn solve_cmd(file: &PathBuf, order: Option<u32>, method: Method, out_path: Option<&PathBuf>, out: &mut String, diag: &mut String) -> Result<bool, Failure> {
    let theory = parse_theory(&read(file)?)?;
    let k = order.unwrap_or(theory.order);
    let s = theory.spec.space();
    let started = Instant::now();
    let solver = Solver::new(&theory.spec, k)?.with_max_terms(max_terms()?);
    let config = SolverConfig::new(k).method(method);
    let res = solver.solve(&config)?;
    let _ = writeln!(diag, "solve: {:.3}s", started.elapsed().as_secs_f64());

    header(out, &theory, file);
    let _ = writeln!(out, "order: {k}");
    let _ = writeln!(out, "method: {method:?}");
    let _ = writeln!(out, "Omega terms by cp-degree: {}", degrees(&res.omega_by_degree(s)));
    let _ = writeln!(out, "Pi terms: {}", res.pi.total_terms());
    let _ = writeln!(out, "residual terms by cp-degree: {}", degrees(&res.check.residual_by_degree(s)));
    let _ = writeln!(out, "structured form matches direct bracket: {}", yes(res.check.forms_agree()));
    let _ = writeln!(out, "boundary conditions: {}", if res.boundary_violations.is_empty() { "ok".to_string() } else { res.boundary_violations.join("; ") });
    out.push_str(&res.omega.render(s, "Omega"));
    let ok = res.ok() && theory.spec.jacobi_violations().is_empty();
    if let Some(p) = out_path {
        write_file(p, &OmegaFile::new(s, k, &res.omega).to_json())?;
    }
    Ok(ok)
}

fn lift_cmd(file: &PathBuf, name: &str, order: Option<u32>, out_path: Option<&PathBuf>, out: &mut String, diag: &mut String) -> Result<bool, Failure> {
    let theory = parse_theory(&read(file)?)?;
    let k = order.unwrap_or(theory.order);
    let s = theory.spec.space();
    let phi0 = match theory.observable(name) {
        Some(p) => p.clone(),
        None => crate::io::parse_expr(s, name).map_err(|e| Failure::Input(format!("no observable named `{name}` and not an expression: {e}")))?,
    };
    let started = Instant::now();
    let solver = Solver::new(&theory.spec, k)?.with_max_terms(max_terms()?);
    let res = solver.solve(&SolverConfig::new(k))?;
    let lifted = match lift(&phi0, &theory.spec, &res, k) {
        Ok(l) => l,
        Err(ObservableError::NotFirstClass { alpha, remainder }) => {
            header(out, &theory, file);
            let _ = writeln!(out, "observable: {name}");
            let _ = writeln!(out, "first class: NO ({{phi0, {}}}' = {remainder} off the constraint surface)", s.var(s.xi(alpha)));
            return Ok(false);
        }
        Err(ObservableError::Solver(e)) => return Err(e.into()),
        Err(e) => return Err(Failure::Input(e.to_string())),
    };
    header(out, &theory, file);
    let _ = writeln!(out, "order: {k}");
    let _ = writeln!(out, "observable: {name} = {}", serialize(s, &phi0));
    let _ = writeln!(out, "first class: yes");
    let rep = &lifted.report;
    let _ = writeln!(out, "{{Omega^a, Phi'}}' vanishes through cp-degree {k}: {}", yes(rep.direct.is_zero()));
    let _ = writeln!(out, "structured form vanishes: {}", yes(rep.structured.is_zero()));
    let _ = writeln!(out, "ngh(Phi') = 0: {}", yes(rep.ngh_zero));
    let _ = writeln!(out, "Phi' at C=pi=0 equals phi0: {}", yes(rep.restricts_to_phi0));
    let _ = writeln!(out, "barGamma K = 0: {}", yes(rep.bar_gamma_k.is_zero()));
    let mut ok = res.ok() && rep.ok();
    for (other_name, other) in &theory.observables {
        let other_lift = match lift(other, &theory.spec, &res, k) {
            Ok(l) => l,
            Err(_) => continue,
        };
        let r = verify_realization(&lifted, &other_lift, &theory.spec);
        let _ = writeln!(
            out,
            "realization with {other_name}: bracket {}, product {}, restrict(lift) {}",
            yes(r.bracket_holds),
            yes(r.product_holds),
            yes(r.restrict_lift_identity)
        );
        ok &= r.ok();
    }
    let _ = writeln!(out, "K terms: {}", lifted.k_part.len());
    let _ = writeln!(out, "Phi' = {}", serialize(s, &lifted.phi_prime));
    let _ = writeln!(diag, "lift: {:.3}s", started.elapsed().as_secs_f64());
    if let Some(p) = out_path {
        let f = LiftFile { format: 1, order: k, name: name.to_string(), phi0: serialize(s, &phi0), phi_prime: serialize(s, &lifted.phi_prime) };
        write_file(p, &serde_json::to_string_pretty(&f).expect("serializable"))?;
    }
    Ok(ok)
}

fn identities_cmd(degree: u32, samples: usize, seed: u64, out: &mut String, diag: &mut String) -> Result<bool, Failure> {
    let space = default_space();
    let config = IdentityConfig { degree, samples, seed, ..IdentityConfig::default() };
    let started = Instant::now();
    let report = run_identity_suite(&space, &config);
    out.push_str(&report.to_string());
    for check in check_printed_forms(&space, &config) {
        if check.counterexample.is_some() {
            let _ = writeln!(out, "note: commonly quoted form does not hold -- {check}");
        }
    }
    let _ = writeln!(diag, "check-identities: {:.3}s", started.elapsed().as_secs_f64());
    Ok(report.all_passed())
}

fn verify_cmd(file: &PathBuf, omega_file: &PathBuf, out: &mut String) -> Result<bool, Failure> {
    let theory = parse_theory(&read(file)?)?;
    let of = OmegaFile::from_json(&read(omega_file)?)?;
    let s = theory.spec.space();
    let omega = of.tensor(s)?;
    let solver = Solver::new(&theory.spec, of.order)?.with_max_terms(max_terms()?);
    let check = solver.verify_master(&omega)?;
    let bc = boundary_violations(s, &omega);
    header(out, &theory, file);
    let _ = writeln!(out, "order: {}", of.order);
    let _ = writeln!(out, "residual terms by cp-degree: {}", degrees(&check.residual_by_degree(s)));
    let _ = writeln!(out, "structured form matches direct bracket: {}", yes(check.forms_agree()));
    let _ = writeln!(out, "boundary conditions: {}", if bc.is_empty() { "ok".to_string() } else { bc.join("; ") });
    if !check.direct.is_zero() {
        out.push_str(&check.direct.render(s, "residual"));
    }
    Ok(check.vanishes() && bc.is_empty())
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code: 0 when every check passes, 1 on a verification
/// failure, 2 on bad input.
pub fn run_pipeline<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // --help and --version are reported through the same error type
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_INPUT;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    let mut out = String::new();
    let mut diag = String::new();
    let result = match &cli.command {
        Command::Solve { file, order, method, out: path } => solve_cmd(file, *order, *method, path.as_ref(), &mut out, &mut diag),
        Command::Lift { file, observable, order, out: path } => lift_cmd(file, observable, *order, path.as_ref(), &mut out, &mut diag),
        Command::CheckIdentities { degree, samples, seed } => identities_cmd(*degree, *samples, *seed, &mut out, &mut diag),
        Command::Verify { file, omega_file } => verify_cmd(file, omega_file, &mut out),
    };
    let code = match result {
        Ok(true) => {
            out.push_str("status: PASS\n");
            EXIT_OK
        }
        Ok(false) => {
            out.push_str("status: FAIL\n");
            EXIT_VERIFY_FAILED
        }
        Err(Failure::Verify(msg)) => {
            let _ = writeln!(diag, "error: {msg}");
            out.push_str("status: FAIL\n");
            EXIT_VERIFY_FAILED
        }
        Err(Failure::Input(msg)) => {
            let _ = writeln!(diag, "error: {msg}");
            EXIT_INPUT
        }
    };
    let _ = stdout.write_all(out.as_bytes());
    let _ = stderr.write_all(diag.as_bytes());
    code
}
