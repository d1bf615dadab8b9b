//! JSON theory files and Ω files.
//!
//! A theory file looks like
//!
//! ```json
//! {
//!   "format": 1,
//!   "constraints": [{"name": "J1", "parity": 0}, {"name": "J2", "parity": 0}, {"name": "J3", "parity": 0}],
//!   "physical": [],
//!   "U": {"1,2,3": "1", "2,3,1": "1", "3,1,2": "1"},
//!   "observables": [{"name": "casimir", "expr": "xi[1]^2 + xi[2]^2 + xi[3]^2"}],
//!   "order": 6
//! }
//! ```
//!
//! `U["α,β,γ"]` is U_{αβ}^γ in {ξ_α, ξ_β}′ = U_{αβ}^γ ξ_γ. Entries of `mixed`
//! give {ξ_i, ξ_j}′ when at least one side is a physical coordinate; a side
//! is written as a declared name, as `xi[n]`/`xip[n]`, or as `n` / `n'`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::expr::{parse_expr, serialize, ParseError};
use crate::algebra::{AlgebraError, GradedPoly, MatterVar, Space, TheorySpec};
use crate::operators::SymTensor;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("unsupported format version {0} (expected 1)")]
    Format(u32),
    #[error("in {context}: {source}")]
    Expr {
        context: String,
        #[source]
        source: ParseError,
    },
    #[error("bad key `{key}`: {message}")]
    Key { key: String, message: String },
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("Omega file must contain exactly 2 components, found {0}")]
    OmegaArity(usize),
}

impl From<serde_json::Error> for InputError {
    fn from(e: serde_json::Error) -> Self {
        InputError::Json { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub parity: u8,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum ObservableDecl {
    Bare(String),
    Named { name: String, expr: String },
}

impl ObservableDecl {
    /// Declared name, or the expression itself for bare entries.
    pub fn name(&self) -> &str {
        match self {
            ObservableDecl::Bare(e) => e,
            ObservableDecl::Named { name, .. } => name,
        }
    }

    pub fn expr(&self) -> &str {
        match self {
            ObservableDecl::Bare(e) => e,
            ObservableDecl::Named { expr, .. } => expr,
        }
    }
}

fn default_order() -> u32 {
    4
}

/// The on-disk form of a theory.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TheoryFile {
    pub format: u32,
    #[serde(default)]
    pub constraints: Vec<VariableDecl>,
    #[serde(default)]
    pub physical: Vec<VariableDecl>,
    #[serde(rename = "U", default)]
    pub structure: BTreeMap<String, String>,
    #[serde(default)]
    pub mixed: BTreeMap<String, String>,
    #[serde(default)]
    pub observables: Vec<ObservableDecl>,
    #[serde(default = "default_order")]
    pub order: u32,
    /// Lets structure functions depend on the physical coordinates.
    #[serde(default)]
    pub physical_dependence: bool,
}

/// A parsed and validated theory together with its named observables.
#[derive(Clone, Debug)]
pub struct Theory {
    pub spec: TheorySpec,
    pub constraint_names: Vec<String>,
    pub physical_names: Vec<String>,
    pub observables: Vec<(String, GradedPoly)>,
    pub order: u32,
}

impl Theory {
    pub fn observable(&self, name: &str) -> Option<&GradedPoly> {
        self.observables.iter().find(|(n, _)| n == name).map(|(_, p)| p)
    }
}

fn parse_in(space: &Space, src: &str, context: impl Into<String>) -> Result<GradedPoly, InputError> {
    parse_expr(space, src).map_err(|source| InputError::Expr { context: context.into(), source })
}

/// Resolves one side of a `mixed` key.
fn matter_side(tf: &TheoryFile, space: &Space, side: &str, key: &str) -> Result<MatterVar, InputError> {
    let side = side.trim();
    let bad = |message: String| InputError::Key { key: key.to_string(), message };
    if let Some(i) = tf.constraints.iter().position(|d| d.name == side) {
        return Ok(MatterVar::Constraint(i + 1));
    }
    if let Some(i) = tf.physical.iter().position(|d| d.name == side) {
        return Ok(MatterVar::Physical(i + 1));
    }
    let parsed = if let Some(n) = side.strip_suffix('\'') {
        n.parse().ok().map(MatterVar::Physical)
    } else if let Ok(n) = side.parse() {
        Some(MatterVar::Constraint(n))
    } else if let Some(n) = side.strip_prefix("xip[").and_then(|r| r.strip_suffix(']')) {
        n.trim().parse().ok().map(MatterVar::Physical)
    } else if let Some(n) = side.strip_prefix("xi[").and_then(|r| r.strip_suffix(']')) {
        n.trim().parse().ok().map(MatterVar::Constraint)
    } else {
        None
    };
    let var = parsed.ok_or_else(|| bad(format!("`{side}` is not a declared name or variable")))?;
    if var.index(space).is_none() {
        return Err(bad(format!("`{side}` is out of range")));
    }
    Ok(var)
}

fn constraint_index(tf: &TheoryFile, side: &str, key: &str) -> Result<usize, InputError> {
    let side = side.trim();
    if let Some(i) = tf.constraints.iter().position(|d| d.name == side) {
        return Ok(i + 1);
    }
    match side.parse::<usize>() {
        Ok(n) if (1..=tf.constraints.len()).contains(&n) => Ok(n),
        _ => Err(InputError::Key { key: key.to_string(), message: format!("`{side}` is not a constraint index or name") }),
    }
}

impl TheoryFile {
    pub fn from_json(text: &str) -> Result<TheoryFile, InputError> {
        let tf: TheoryFile = serde_json::from_str(text)?;
        if tf.format != 1 {
            return Err(InputError::Format(tf.format));
        }
        Ok(tf)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("theory files always serialize")
    }

    /// Builds and validates the theory.
    pub fn build(&self) -> Result<Theory, InputError> {
        let mut seen = std::collections::BTreeSet::new();
        for d in self.constraints.iter().chain(&self.physical) {
            if !seen.insert(d.name.as_str()) {
                return Err(InputError::DuplicateName(d.name.clone()));
            }
        }
        let space = Space::new(
            self.constraints.iter().map(|d| d.parity).collect(),
            self.physical.iter().map(|d| d.parity).collect(),
        )?;
        let mut builder = TheorySpec::builder(space.clone()).allow_physical_dependence(self.physical_dependence);
        for (key, src) in &self.structure {
            let parts: Vec<&str> = key.split(',').collect();
            if parts.len() != 3 {
                return Err(InputError::Key { key: key.clone(), message: "expected \"alpha,beta,gamma\"".into() });
            }
            let a = constraint_index(self, parts[0], key)?;
            let b = constraint_index(self, parts[1], key)?;
            let g = constraint_index(self, parts[2], key)?;
            builder = builder.structure(a, b, g, parse_in(&space, src, format!("U[{key}]"))?);
        }
        for (key, src) in &self.mixed {
            let parts: Vec<&str> = key.split(',').collect();
            if parts.len() != 2 {
                return Err(InputError::Key { key: key.clone(), message: "expected \"i,j\"".into() });
            }
            let i = matter_side(self, &space, parts[0], key)?;
            let j = matter_side(self, &space, parts[1], key)?;
            builder = builder.mixed(i, j, parse_in(&space, src, format!("mixed[{key}]"))?);
        }
        let spec = builder.build()?;
        let mut observables = Vec::new();
        for decl in &self.observables {
            let p = parse_in(&space, decl.expr(), format!("observable `{}`", decl.name()))?;
            observables.push((decl.name().to_string(), p));
        }
        Ok(Theory {
            spec,
            constraint_names: self.constraints.iter().map(|d| d.name.clone()).collect(),
            physical_names: self.physical.iter().map(|d| d.name.clone()).collect(),
            observables,
            order: self.order,
        })
    }
}

/// Parses and validates a theory document.
pub fn parse_theory(text: &str) -> Result<Theory, InputError> {
    TheoryFile::from_json(text)?.build()
}

/// A previously emitted charge: `{"format": 1, "order": k, "omega": [Ω¹, Ω²]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct OmegaFile {
    pub format: u32,
    pub order: u32,
    pub omega: Vec<String>,
}

impl OmegaFile {
    pub fn new(space: &Space, order: u32, omega: &SymTensor) -> OmegaFile {
        OmegaFile { format: 1, order, omega: vec![serialize(space, omega.component(&[1])), serialize(space, omega.component(&[2]))] }
    }

    pub fn from_json(text: &str) -> Result<OmegaFile, InputError> {
        let f: OmegaFile = serde_json::from_str(text)?;
        if f.format != 1 {
            return Err(InputError::Format(f.format));
        }
        if f.omega.len() != 2 {
            return Err(InputError::OmegaArity(f.omega.len()));
        }
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("omega files always serialize")
    }

    pub fn tensor(&self, space: &Space) -> Result<SymTensor, InputError> {
        Ok(SymTensor::vector(parse_in(space, &self.omega[0], "omega[1]")?, parse_in(space, &self.omega[1], "omega[2]")?))
    }
}

/// A lifted observable as written by `lift --out`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LiftFile {
    pub format: u32,
    pub order: u32,
    pub name: String,
    pub phi0: String,
    pub phi_prime: String,
}
