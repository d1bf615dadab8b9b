//! Construction of the Sp(2) charges Ω^a = Ω₁^a + Π^a.
//!
//! The quadratic master equation is rewritten as the fixed-point problem
//! Π = Π₀ + ½⟨Π,Π⟩ on S¹ and solved either by iteration or by summing bracket
//! trees (descendants) of Π₀. All series are truncated at cp-degree `k`,
//! which is exact because every correction strictly raises the cp-degree.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::algebra::{int, rat, Coeff, GradedPoly, Sector, Space, TheorySpec};
use crate::operators::{eps_upper, Calculus, OperatorError, SymTensor};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("truncation order must be at least 2, got {0}")]
    Order(u32),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error("invalid Upsilon: {0}")]
    Upsilon(String),
    #[error("{op} did not raise the cp-degree (from {from} to {to}); sign or grading convention is broken")]
    NoDegreeRise { op: &'static str, from: u32, to: u32 },
    #[error("fixed-point iteration did not stabilise within {0} iterations")]
    NotStable(usize),
    #[error("fixed-point and descendant solutions differ at cp-degree {0}")]
    MethodsDisagree(u32),
    #[error("term count {count} exceeds the cap of {cap}")]
    TooManyTerms { count: usize, cap: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    FixedPoint,
    Descendants,
    Both,
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed-point" => Ok(Method::FixedPoint),
            "descendants" => Ok(Method::Descendants),
            "both" => Ok(Method::Both),
            other => Err(format!("unknown method `{other}` (expected fixed-point, descendants or both)")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub k: u32,
    /// W-closed part of Π; zero when absent.
    pub upsilon: Option<SymTensor>,
    pub method: Method,
}

impl SolverConfig {
    pub fn new(k: u32) -> SolverConfig {
        SolverConfig { k, upsilon: None, method: Method::FixedPoint }
    }

    pub fn method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }
}

/// Which perturbation is inverted by [`Solver::neumann_apply`].
#[derive(Clone, Copy, Debug)]
pub enum Perturbation<'p> {
    /// (I + W⁺A)⁻¹
    A,
    /// (I + W⁺(A + ad Π))⁻¹
    AdPi(&'p SymTensor),
}

/// Terms of one cp-degree in a tensor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCount {
    pub cp: u32,
    pub terms: usize,
}

fn per_degree(t: &SymTensor, space: &Space) -> Vec<DegreeCount> {
    let mut counts: BTreeMap<u32, usize> = BTreeMap::new();
    for (_, p) in t.independent_components() {
        for (m, _) in p.terms() {
            *counts.entry(m.cp_degree(space)).or_default() += 1;
        }
    }
    counts.into_iter().map(|(cp, terms)| DegreeCount { cp, terms }).collect()
}

/// Both forms of {Ω^a, Ω^b}′ through cp-degree k.
#[derive(Clone, Debug)]
pub struct MasterCheck {
    pub k: u32,
    /// {Ω^a, Ω^b}′ computed directly.
    pub direct: SymTensor,
    /// WΠ + F + AΠ + ½[Π,Π] with Π = Ω - Ω₁.
    pub structured: SymTensor,
}

impl MasterCheck {
    pub fn vanishes(&self) -> bool {
        self.direct.is_zero() && self.structured.is_zero()
    }

    pub fn forms_agree(&self) -> bool {
        self.direct == self.structured
    }

    /// Residual terms per cp-degree 0..=k of the direct form.
    pub fn residual_by_degree(&self, space: &Space) -> Vec<DegreeCount> {
        let found = per_degree(&self.direct, space);
        (0..=self.k)
            .map(|cp| DegreeCount { cp, terms: found.iter().find(|d| d.cp == cp).map_or(0, |d| d.terms) })
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub k: u32,
    pub method: Method,
    pub omega1: SymTensor,
    pub f: SymTensor,
    pub pi0: SymTensor,
    pub pi: SymTensor,
    pub omega: SymTensor,
    pub check: MasterCheck,
    pub boundary_violations: Vec<String>,
    pub iterations: usize,
}

impl SolverResult {
    pub fn ok(&self) -> bool {
        self.check.vanishes() && self.check.forms_agree() && self.boundary_violations.is_empty()
    }

    pub fn omega_by_degree(&self, space: &Space) -> Vec<DegreeCount> {
        per_degree(&self.omega, space)
    }
}

/// A binary bracket tree over leaves 0..m, stored with children sorted so
/// that structurally equal trees compare equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn node(a: Tree, b: Tree) -> Tree {
        if a <= b {
            Tree::Node(Box::new(a), Box::new(b))
        } else {
            Tree::Node(Box::new(b), Box::new(a))
        }
    }

    pub fn leaves(&self) -> usize {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(a, b) => a.leaves() + b.leaves(),
        }
    }

    /// The same tree with every label erased (all leaves `Leaf(0)`).
    pub fn shape(&self) -> Tree {
        match self {
            Tree::Leaf(_) => Tree::Leaf(0),
            Tree::Node(a, b) => Tree::node(a.shape(), b.shape()),
        }
    }

    /// Order of the automorphism group of an unlabeled shape.
    pub fn automorphisms(&self) -> u64 {
        match self {
            Tree::Leaf(_) => 1,
            Tree::Node(a, b) => a.automorphisms() * b.automorphisms() * if a == b { 2 } else { 1 },
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(i) => write!(f, "X{}", i + 1),
            Tree::Node(a, b) => write!(f, "<{a},{b}>"),
        }
    }
}

/// Result of reducing (X₁,…,X_m) by every chain of pair contractions.
#[derive(Clone, Debug)]
pub struct DescendantEnumeration {
    pub chains: usize,
    pub trees: Vec<Tree>,
}

/// Applies every chain P²₁₂ P³_{ij} … P^m_{ij} to (X₁,…,X_m) and collects
/// the distinct resulting trees.
pub fn enumerate_descendants(m: usize) -> DescendantEnumeration {
    fn walk(items: Vec<Tree>, chains: &mut usize, out: &mut BTreeSet<Tree>) {
        if items.len() == 1 {
            *chains += 1;
            out.insert(items.into_iter().next().expect("one item"));
            return;
        }
        for i in 0..items.len() {
            for j in i + 1..items.len() {
                let mut next = vec![Tree::node(items[i].clone(), items[j].clone())];
                next.extend(items.iter().enumerate().filter(|&(t, _)| t != i && t != j).map(|(_, x)| x.clone()));
                walk(next, chains, out);
            }
        }
    }
    let mut chains = 0;
    let mut trees = BTreeSet::new();
    if m > 0 {
        walk((0..m).map(Tree::Leaf).collect(), &mut chains, &mut trees);
    }
    DescendantEnumeration { chains, trees: trees.into_iter().collect() }
}

/// All unlabeled binary tree shapes with `m` leaves.
pub fn tree_shapes(m: usize) -> Vec<Tree> {
    let mut by_size: Vec<Vec<Tree>> = vec![Vec::new(), vec![Tree::Leaf(0)]];
    for n in 2..=m {
        let mut set = BTreeSet::new();
        for left in 1..=n / 2 {
            for a in &by_size[left] {
                for b in &by_size[n - left] {
                    set.insert(Tree::node(a.clone(), b.clone()));
                }
            }
        }
        by_size.push(set.into_iter().collect());
    }
    by_size.get(m).cloned().unwrap_or_default()
}

/// (2m-3)!!, the number of labeled binary bracket trees on m leaves.
pub fn double_factorial_count(m: usize) -> u64 {
    if m < 2 {
        return 1;
    }
    (1..=(2 * m as u64 - 3)).step_by(2).product()
}

/// Solver state shared by all constructions at a fixed truncation order.
pub struct Solver<'a> {
    spec: &'a TheorySpec,
    calc: Calculus<'a>,
    k: u32,
    max_terms: usize,
}

impl<'a> Solver<'a> {
    pub fn new(spec: &'a TheorySpec, k: u32) -> Result<Solver<'a>, SolverError> {
        if k < 2 {
            return Err(SolverError::Order(k));
        }
        Ok(Solver { spec, calc: Calculus::new(spec.space()), k, max_terms: 1_000_000 })
    }

    pub fn with_max_terms(mut self, cap: usize) -> Self {
        self.max_terms = cap;
        self
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn spec(&self) -> &'a TheorySpec {
        self.spec
    }

    pub fn calculus(&self) -> &Calculus<'a> {
        &self.calc
    }

    fn space(&self) -> &'a Space {
        self.spec.space()
    }

    fn cap(&self, t: &SymTensor) -> Result<(), SolverError> {
        let count = t.total_terms();
        if count > self.max_terms {
            return Err(SolverError::TooManyTerms { count, cap: self.max_terms });
        }
        Ok(())
    }

    /// Ω₁^a = ξ_α C^{αa} + ε^{ab} 𝒫_{αb} π^α.
    pub fn omega1(&self) -> SymTensor {
        build_omega1(self.space())
    }

    /// F^{ab} = C^{αa} {ξ_α, ξ_β}′ C^{βb}.
    pub fn f(&self) -> SymTensor {
        let s = self.space();
        let m = s.m();
        let comps = |a: usize, b: usize| {
            let mut out = GradedPoly::zero();
            for alpha in 1..=m {
                for beta in 1..=m {
                    if let Some(w) = self.spec.omega(s.xi(alpha), s.xi(beta)) {
                        let ca = GradedPoly::var(s, s.ghost(alpha, a));
                        let cb = GradedPoly::var(s, s.ghost(beta, b));
                        out += &ca.mul(w, s).mul(&cb, s);
                    }
                }
            }
            out
        };
        SymTensor::from_fn(2, |idx| comps(idx[0], idx[1])).expect("F is symmetric for a valid theory")
    }

    /// A^a X = C^{αa}{ξ_α, X}′ on one component, truncated at k.
    fn a_comp(&self, a: usize, p: &GradedPoly) -> GradedPoly {
        let s = self.space();
        let mut out = GradedPoly::zero();
        if self.spec.is_abelian() {
            return out;
        }
        for alpha in 1..=s.m() {
            let br = self.spec.xi_bracket(alpha, p, Some(self.k));
            if !br.is_zero() {
                out += &GradedPoly::var(s, s.ghost(alpha, a)).mul_truncated(&br, s, Some(self.k));
            }
        }
        out
    }

    /// (AX)^{a a₁…a_n} = A^{{a}X^{a₁…a_n}}, raising the rank by one.
    pub fn apply_a(&self, x: &SymTensor) -> Result<SymTensor, SolverError> {
        Ok(x.raise_cyclic("A", |a, p| self.a_comp(a, p))?)
    }

    /// [X,Y]^{a a₁…a_n} = {X^{{a}, Y^{a₁…a_n}}}′ for X ∈ S¹, truncated at k.
    pub fn tensor_bracket(&self, x: &SymTensor, y: &SymTensor) -> Result<SymTensor, SolverError> {
        assert_eq!(x.rank(), 1, "left bracket argument must have rank 1");
        let xs = [x.component(&[1]), x.component(&[2])];
        Ok(y.raise_cyclic("bracket", |a, p| self.spec.bracket_truncated(xs[a - 1], p, Some(self.k)))?)
    }

    /// (I + W⁺P)⁻¹x as the terminating series Σ (-W⁺P)^m x.
    pub fn neumann_apply(&self, perturbation: Perturbation<'_>, x: &SymTensor) -> Result<SymTensor, SolverError> {
        let s = self.space();
        let mut total = x.truncate_cp(s, self.k);
        let mut term = total.clone();
        while !term.is_zero() {
            let from = term.min_cp(s).expect("nonzero");
            let mut raised = self.apply_a(&term)?;
            if let Perturbation::AdPi(pi) = perturbation {
                raised = raised.add(&self.tensor_bracket(pi, &term)?);
            }
            let next = self.calc.w_plus(&raised.truncate_cp(s, self.k))?.neg();
            if let Some(to) = next.min_cp(s) {
                if to <= from {
                    return Err(SolverError::NoDegreeRise { op: "W+ perturbation", from, to });
                }
            }
            total = total.add(&next);
            self.cap(&total)?;
            term = next;
        }
        Ok(total)
    }

    /// Checks that Υ is a valid W-closed seed.
    pub fn validate_upsilon(&self, upsilon: &SymTensor) -> Result<(), SolverError> {
        let s = self.space();
        if upsilon.rank() != 1 {
            return Err(SolverError::Upsilon(format!("rank {} instead of 1", upsilon.rank())));
        }
        if upsilon.is_zero() {
            return Ok(());
        }
        if !self.calc.w(upsilon)?.truncate_cp(s, self.k).is_zero() {
            return Err(SolverError::Upsilon("W Upsilon is not zero".into()));
        }
        if upsilon.min_cp(s).is_some_and(|c| c < 2) {
            return Err(SolverError::Upsilon("terms of cp-degree below 2".into()));
        }
        if upsilon.ngh(s) != Some(1) {
            return Err(SolverError::Upsilon("ghost number is not 1".into()));
        }
        if upsilon.parity(s) != Some(1) {
            return Err(SolverError::Upsilon("not Grassmann odd".into()));
        }
        Ok(())
    }

    /// Π₀ = (I + W⁺A)⁻¹(Υ - W⁺F).
    pub fn pi0(&self, upsilon: Option<&SymTensor>) -> Result<SymTensor, SolverError> {
        let s = self.space();
        let mut seed = self.calc.w_plus(&self.f().truncate_cp(s, self.k))?.neg();
        if let Some(u) = upsilon {
            self.validate_upsilon(u)?;
            seed = seed.add(&u.truncate_cp(s, self.k));
        }
        self.neumann_apply(Perturbation::A, &seed)
    }

    /// ⟨X₁,X₂⟩ = -½(I + W⁺A)⁻¹W⁺([X₁,X₂] + [X₂,X₁]).
    pub fn bracket_pair(&self, x: &SymTensor, y: &SymTensor) -> Result<SymTensor, SolverError> {
        if x.is_zero() || y.is_zero() {
            return Ok(SymTensor::zero(1));
        }
        let sum = self.tensor_bracket(x, y)?.add(&self.tensor_bracket(y, x)?);
        let half = self.calc.w_plus(&sum)?.scale(&rat(-1, 2));
        self.neumann_apply(Perturbation::A, &half)
    }

    /// Iterates Π ← Π₀ + ½⟨Π,Π⟩ from Π₀ until two iterates agree.
    pub fn solve_fixed_point(&self, pi0: &SymTensor) -> Result<(SymTensor, usize), SolverError> {
        let half = rat(1, 2);
        let mut pi = pi0.clone();
        for iteration in 1..=self.k as usize {
            let next = pi0.add(&self.bracket_pair(&pi, &pi)?.scale(&half));
            self.cap(&next)?;
            if next == pi {
                return Ok((pi, iteration));
            }
            pi = next;
        }
        Err(SolverError::NotStable(self.k as usize))
    }

    /// ⟨X₁,…,X_m⟩ by the recursive definition, memoised over subsets.
    pub fn multi_bracket(&self, xs: &[SymTensor]) -> Result<SymTensor, SolverError> {
        assert!(!xs.is_empty() && xs.len() < 20, "multi-bracket arity");
        let full = (1usize << xs.len()) - 1;
        let mut memo: HashMap<usize, SymTensor> = HashMap::new();
        self.multi_bracket_mask(xs, full, &mut memo)
    }

    fn multi_bracket_mask(&self, xs: &[SymTensor], mask: usize, memo: &mut HashMap<usize, SymTensor>) -> Result<SymTensor, SolverError> {
        if mask.count_ones() == 1 {
            return Ok(xs[mask.trailing_zeros() as usize].truncate_cp(self.space(), self.k));
        }
        if let Some(v) = memo.get(&mask) {
            return Ok(v.clone());
        }
        // ½ Σ over ordered splits equals the sum over unordered splits, since
        // ⟨·,·⟩ is symmetric; fix the lowest element on the left.
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut acc = SymTensor::zero(1);
        let mut sub = rest;
        loop {
            let left = low | sub;
            if left != mask {
                let a = self.multi_bracket_mask(xs, left, memo)?;
                let b = self.multi_bracket_mask(xs, mask ^ left, memo)?;
                acc = acc.add(&self.bracket_pair(&a, &b)?);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        memo.insert(mask, acc.clone());
        Ok(acc)
    }

    /// Evaluates a labeled bracket tree on the given leaves.
    pub fn evaluate_tree(&self, tree: &Tree, xs: &[SymTensor]) -> Result<SymTensor, SolverError> {
        match tree {
            Tree::Leaf(i) => Ok(xs[*i].truncate_cp(self.space(), self.k)),
            Tree::Node(a, b) => {
                let (x, y) = (self.evaluate_tree(a, xs)?, self.evaluate_tree(b, xs)?);
                self.bracket_pair(&x, &y)
            }
        }
    }

    /// Sum of the distinct descendants of (X₁,…,X_m).
    pub fn descendant_sum(&self, xs: &[SymTensor]) -> Result<SymTensor, SolverError> {
        let mut acc = SymTensor::zero(1);
        for tree in enumerate_descendants(xs.len()).trees {
            acc = acc.add(&self.evaluate_tree(&tree, xs)?);
        }
        Ok(acc)
    }

    /// Π = Σ_{m≥1} ⟨Π₀^m⟩/m!. With identical leaves every labeled tree of a
    /// given shape has the same value, and a shape T occurs m!/|Aut T| times,
    /// so the sum is Σ_T value(T)/|Aut T|.
    pub fn solve_descendants(&self, pi0: &SymTensor) -> Result<SymTensor, SolverError> {
        let s = self.space();
        let mut memo: BTreeMap<Tree, SymTensor> = BTreeMap::new();
        memo.insert(Tree::Leaf(0), pi0.truncate_cp(s, self.k));
        let mut pi = pi0.truncate_cp(s, self.k);
        if pi.is_zero() {
            return Ok(pi);
        }
        // ⟨Π₀^m⟩ has cp-degree ≥ m + 1, so m ≤ k - 1 suffices.
        for m in 2..self.k as usize {
            for shape in tree_shapes(m) {
                let value = self.shape_value(&shape, &mut memo)?;
                let weight = Coeff::new(BigInt::one(), BigInt::from(shape.automorphisms()));
                pi = pi.add(&value.scale(&weight));
                self.cap(&pi)?;
            }
        }
        Ok(pi)
    }

    fn shape_value(&self, shape: &Tree, memo: &mut BTreeMap<Tree, SymTensor>) -> Result<SymTensor, SolverError> {
        if let Some(v) = memo.get(shape) {
            return Ok(v.clone());
        }
        let Tree::Node(a, b) = shape else { unreachable!("leaf is pre-seeded") };
        let (x, y) = (self.shape_value(a, memo)?, self.shape_value(b, memo)?);
        let v = self.bracket_pair(&x, &y)?;
        memo.insert(shape.clone(), v.clone());
        Ok(v)
    }

    /// Computes {Ω^a, Ω^b}′ directly and through WΠ + F + AΠ + ½[Π,Π].
    pub fn verify_master(&self, omega: &SymTensor) -> Result<MasterCheck, SolverError> {
        let s = self.space();
        let omega = omega.truncate_cp(s, self.k);
        let comps = [omega.component(&[1]), omega.component(&[2])];
        // Not checked for symmetry: an asymmetric bracket is itself a residual.
        let direct = SymTensor::from_fn_unchecked(2, |idx| {
            self.spec.bracket_truncated(comps[idx[0] - 1], comps[idx[1] - 1], Some(self.k))
        });
        let pi = omega.sub(&self.omega1());
        let structured = self
            .calc
            .w(&pi)?
            .add(&self.f())
            .add(&self.apply_a(&pi)?)
            .add(&self.tensor_bracket(&pi, &pi)?.scale(&rat(1, 2)))
            .truncate_cp(s, self.k);
        Ok(MasterCheck { k: self.k, direct, structured })
    }

    /// The boundary conditions at C = π = 𝒫 = λ = 0:
    /// ∂Ω^a/∂C^{αb} = ξ_α δ^a_b and, at C = π = λ = 0, ∂Ω^a/∂π^α = ε^{ab}𝒫_{αb}.
    pub fn boundary_violations(&self, omega: &SymTensor) -> Vec<String> {
        boundary_violations(self.space(), omega)
    }

    /// Full pipeline for a configuration.
    pub fn solve(&self, config: &SolverConfig) -> Result<SolverResult, SolverError> {
        let s = self.space();
        let pi0 = self.pi0(config.upsilon.as_ref())?;
        let (pi, iterations) = match config.method {
            Method::FixedPoint => self.solve_fixed_point(&pi0)?,
            Method::Descendants => (self.solve_descendants(&pi0)?, 0),
            Method::Both => {
                let (a, it) = self.solve_fixed_point(&pi0)?;
                let b = self.solve_descendants(&pi0)?;
                if a != b {
                    let d = a.sub(&b).min_cp(s).unwrap_or(0);
                    return Err(SolverError::MethodsDisagree(d));
                }
                (a, it)
            }
        };
        let omega1 = self.omega1();
        let omega = omega1.add(&pi);
        let check = self.verify_master(&omega)?;
        let boundary_violations = self.boundary_violations(&omega);
        Ok(SolverResult { k: self.k, method: config.method, omega1, f: self.f(), pi0, pi, omega, check, boundary_violations, iterations })
    }
}

/// Ω₁^a = ξ_α C^{αa} + ε^{ab} 𝒫_{αb} π^α.
pub fn build_omega1(s: &Space) -> SymTensor {
    let comp = |a: usize| {
        let mut out = GradedPoly::zero();
        for alpha in 1..=s.m() {
            out += &GradedPoly::product_of(s, &[s.xi(alpha), s.ghost(alpha, a)]);
            for b in 1..=2 {
                let e = eps_upper(a, b);
                if e != 0 {
                    out.add_scaled(&GradedPoly::product_of(s, &[s.ghost_momentum(alpha, b), s.lagrange_momentum(alpha)]), &int(e));
                }
            }
        }
        out
    };
    SymTensor::vector(comp(1), comp(2))
}

/// Violations of the boundary conditions on the linear part of Ω.
pub fn boundary_violations(s: &Space, omega: &SymTensor) -> Vec<String> {
    let all_ghosts: BTreeSet<Sector> =
        [Sector::Ghost, Sector::LagrangeMomentum, Sector::GhostMomentum, Sector::Lagrange].into_iter().collect();
    let no_lambda: BTreeSet<Sector> = [Sector::Ghost, Sector::LagrangeMomentum, Sector::Lagrange].into_iter().collect();
    let mut out = Vec::new();
    for a in 1..=2 {
        let om = omega.component(&[a]);
        for alpha in 1..=s.m() {
            for b in 1..=2 {
                let got = om.right_derivative(s.ghost(alpha, b), s).substitute_zero(s, &all_ghosts);
                let want = if a == b { GradedPoly::var(s, s.xi(alpha)) } else { GradedPoly::zero() };
                if got != want {
                    out.push(format!(
                        "dOmega^{a}/dC[{alpha},{b}] = {} at C=pi=P=lam=0, expected {}",
                        crate::io::serialize(s, &got),
                        crate::io::serialize(s, &want)
                    ));
                }
            }
            let got = om.right_derivative(s.lagrange_momentum(alpha), s).substitute_zero(s, &no_lambda);
            let mut want = GradedPoly::zero();
            for b in 1..=2 {
                want.add_scaled(&GradedPoly::var(s, s.ghost_momentum(alpha, b)), &int(eps_upper(a, b)));
            }
            if got != want {
                out.push(format!(
                    "dOmega^{a}/dpi[{alpha}] = {} at C=pi=lam=0, expected {}",
                    crate::io::serialize(s, &got),
                    crate::io::serialize(s, &want)
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega1_single_bosonic_constraint() {
        let s = Space::new(vec![0], vec![]).unwrap();
        let o = build_omega1(&s);
        assert_eq!(crate::io::serialize(&s, o.component(&[1])), "xi[1]*C[1,1] + P[1,2]*pi[1]");
        assert_eq!(crate::io::serialize(&s, o.component(&[2])), "xi[1]*C[1,2] - P[1,1]*pi[1]");
        assert_eq!(o.ngh(&s), Some(1));
        assert_eq!(o.parity(&s), Some(1));
    }

    #[test]
    fn no_constraints_gives_zero() {
        let s = Space::new(vec![], vec![0]).unwrap();
        assert!(build_omega1(&s).is_zero());
    }

    #[test]
    fn tree_counts() {
        for (m, want) in [(1, 1), (2, 1), (3, 3), (4, 15), (5, 105)] {
            assert_eq!(enumerate_descendants(m).trees.len() as u64, want);
            assert_eq!(double_factorial_count(m), want);
        }
        assert_eq!(enumerate_descendants(4).chains, 18);
        // labeled count from shapes: Σ m!/|Aut|
        for m in 2..=7usize {
            let fact: u64 = (1..=m as u64).product();
            let total: u64 = tree_shapes(m).iter().map(|t| fact / t.automorphisms()).sum();
            assert_eq!(total, double_factorial_count(m));
        }
    }

    #[test]
    fn so3_residual_at_order_four() {
        let spec = TheorySpec::so3();
        let solver = Solver::new(&spec, 4).unwrap();
        let res = solver.solve(&SolverConfig::new(4).method(Method::Both)).unwrap();
        assert!(res.check.forms_agree(), "direct and structured residuals differ");
        assert!(res.ok(), "{}", res.check.direct.render(spec.space(), "G"));
    }

    #[test]
    fn omega1_alone_leaves_f() {
        let spec = TheorySpec::so3();
        let solver = Solver::new(&spec, 4).unwrap();
        let check = solver.verify_master(&solver.omega1()).unwrap();
        assert_eq!(check.direct, solver.f());
        assert!(!check.direct.is_zero());
    }

    #[test]
    fn order_below_two_rejected() {
        let spec = TheorySpec::so3();
        assert!(matches!(Solver::new(&spec, 1), Err(SolverError::Order(1))));
    }
}
