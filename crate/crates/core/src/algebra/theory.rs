//! Theory data (constraint parities, structure functions) and the Poisson
//! bracket of the extended phase space.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;

use super::poly::{Coeff, GradedPoly};
use super::space::{Sector, Space};
use super::AlgebraError;

/// A matter coordinate: ξ_α (constraint) or ξ_{α′} (physical), 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MatterVar {
    Constraint(usize),
    Physical(usize),
}

impl MatterVar {
    /// Position of the variable in `space`, if it exists there.
    pub fn index(self, space: &Space) -> Option<usize> {
        match self {
            MatterVar::Constraint(a) => space.lookup(Sector::XiConstraint, a, None),
            MatterVar::Physical(a) => space.lookup(Sector::XiPhysical, a, None),
        }
    }
}

impl fmt::Display for MatterVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatterVar::Constraint(a) => write!(f, "xi[{a}]"),
            MatterVar::Physical(a) => write!(f, "xip[{a}]"),
        }
    }
}

/// A first-class constraint system in ξ coordinates.
///
/// Constraint-constraint brackets are given only through the structure
/// functions U_{αβ}^γ, with {ξ_α, ξ_β}′ = U_{αβ}^γ ξ_γ, so they vanish on the
/// constraint surface by construction.
#[derive(Clone, Debug)]
pub struct TheorySpec {
    space: Space,
    structure: BTreeMap<(usize, usize, usize), GradedPoly>,
    mixed: BTreeMap<(MatterVar, MatterVar), GradedPoly>,
    /// ω_{ij} = {ξ_i, ξ_j}′ over matter variable indices, nonzero entries only.
    omega: BTreeMap<(usize, usize), GradedPoly>,
    physical_dependence: bool,
}

#[derive(Clone, Debug)]
pub struct TheoryBuilder {
    space: Space,
    structure: BTreeMap<(usize, usize, usize), GradedPoly>,
    mixed: BTreeMap<(MatterVar, MatterVar), GradedPoly>,
    physical_dependence: bool,
}

impl TheoryBuilder {
    /// Allows structure functions to depend on the physical coordinates ξ_{α′}.
    pub fn allow_physical_dependence(mut self, yes: bool) -> Self {
        self.physical_dependence = yes;
        self
    }

    /// Sets U_{αβ}^γ (1-based indices).
    pub fn structure(mut self, alpha: usize, beta: usize, gamma: usize, u: GradedPoly) -> Self {
        self.structure.insert((alpha, beta, gamma), u);
        self
    }

    /// Sets {i, j}′ for a pair involving at least one physical coordinate.
    pub fn mixed(mut self, i: MatterVar, j: MatterVar, value: GradedPoly) -> Self {
        self.mixed.insert((i, j), value);
        self
    }

    pub fn build(self) -> Result<TheorySpec, AlgebraError> {
        let space = self.space;
        let m = space.m();
        let mut allowed = vec![Sector::XiConstraint];
        if self.physical_dependence {
            allowed.push(Sector::XiPhysical);
        }

        let mut structure = BTreeMap::new();
        for ((a, b, g), u) in self.structure {
            for idx in [a, b, g] {
                if idx == 0 || idx > m {
                    return Err(AlgebraError::IndexOutOfRange(format!("U[{a},{b},{g}]: index {idx} not in 1..={m}")));
                }
            }
            if !u.only_sectors(&space, &allowed) {
                return Err(AlgebraError::IllegalDependence(format!("U[{a},{b},{g}]")));
            }
            if !u.is_zero() {
                structure.insert((a, b, g), u);
            }
        }

        // ω over constraint pairs, from U
        let mut given: BTreeMap<(usize, usize), GradedPoly> = BTreeMap::new();
        for (&(a, b, g), u) in &structure {
            let xi_g = GradedPoly::var(&space, space.xi(g));
            *given.entry((space.xi(a), space.xi(b))).or_default() += &u.mul(&xi_g, &space);
        }
        for ((i, j), w) in self.mixed {
            let (Some(ii), Some(jj)) = (i.index(&space), j.index(&space)) else {
                return Err(AlgebraError::IndexOutOfRange(format!("mixed bracket {{{i}, {j}}}")));
            };
            if matches!((i, j), (MatterVar::Constraint(_), MatterVar::Constraint(_))) {
                return Err(AlgebraError::ConstraintPairOutsideStructure(format!("{{{i}, {j}}}")));
            }
            if !w.only_sectors(&space, &[Sector::XiConstraint, Sector::XiPhysical]) {
                return Err(AlgebraError::IllegalDependence(format!("mixed bracket {{{i}, {j}}}")));
            }
            *given.entry((ii, jj)).or_default() += &w;
        }
        let given: BTreeMap<_, _> = given.into_iter().filter(|(_, w)| !w.is_zero()).collect();

        let mut omega = given.clone();
        for (&(i, j), w) in &given {
            let pi = space.var(i).parity;
            let pj = space.var(j).parity;
            if let Some(p) = w.parity(&space) {
                if p != (pi + pj) % 2 {
                    return Err(AlgebraError::WrongParity(format!("{{{}, {}}}", space.var(i), space.var(j))));
                }
            } else {
                return Err(AlgebraError::WrongParity(format!("{{{}, {}}} is not parity-homogeneous", space.var(i), space.var(j))));
            }
            // ω_ji = -(-1)^{ε_i ε_j} ω_ij
            let swapped = if pi * pj == 1 { w.clone() } else { -w };
            match given.get(&(j, i)) {
                Some(other) if *other != swapped => {
                    return Err(AlgebraError::NotAntisymmetric(format!("{{{}, {}}}", space.var(i), space.var(j))));
                }
                Some(_) => {}
                None => {
                    omega.insert((j, i), swapped);
                }
            }
        }

        Ok(TheorySpec { space, structure, mixed: BTreeMap::new(), omega, physical_dependence: self.physical_dependence }
            .with_mixed_record(&given))
    }
}

impl TheorySpec {
    pub fn builder(space: Space) -> TheoryBuilder {
        TheoryBuilder { space, structure: BTreeMap::new(), mixed: BTreeMap::new(), physical_dependence: false }
    }

    /// A theory whose matter brackets all vanish.
    pub fn abelian(space: Space) -> TheorySpec {
        TheorySpec::builder(space).build().expect("empty tables are valid")
    }

    /// so(3): three bosonic constraints with U_{ij}^k = ε_{ijk}.
    pub fn so3() -> TheorySpec {
        let space = Space::new(vec![0, 0, 0], vec![]).expect("valid parities");
        let one = GradedPoly::one(&space);
        TheorySpec::builder(space)
            .structure(1, 2, 3, one.clone())
            .structure(2, 3, 1, one.clone())
            .structure(3, 1, 2, one)
            .build()
            .expect("so(3) is a valid theory")
    }

    fn with_mixed_record(mut self, given: &BTreeMap<(usize, usize), GradedPoly>) -> TheorySpec {
        let m = self.space.m();
        let as_matter = |i: usize| if i < m { MatterVar::Constraint(i + 1) } else { MatterVar::Physical(i - m + 1) };
        self.mixed = given
            .iter()
            .filter(|(&(i, j), _)| i >= m || j >= m)
            .map(|(&(i, j), w)| ((as_matter(i), as_matter(j)), w.clone()))
            .collect();
        self
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn physical_dependence(&self) -> bool {
        self.physical_dependence
    }

    pub fn structure_functions(&self) -> impl Iterator<Item = (&(usize, usize, usize), &GradedPoly)> {
        self.structure.iter()
    }

    pub fn mixed_brackets(&self) -> impl Iterator<Item = (&(MatterVar, MatterVar), &GradedPoly)> {
        self.mixed.iter()
    }

    /// {ξ_i, ξ_j}′ for matter variable indices of the space.
    pub fn omega(&self, i: usize, j: usize) -> Option<&GradedPoly> {
        self.omega.get(&(i, j))
    }

    pub fn omega_entries(&self) -> impl Iterator<Item = (&(usize, usize), &GradedPoly)> {
        self.omega.iter()
    }

    pub fn is_abelian(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn bracket(&self, x: &GradedPoly, y: &GradedPoly) -> GradedPoly {
        self.bracket_truncated(x, y, None)
    }

    /// {x, y}′ = Σ ∂_r x/∂z^A · ω^{AB} · ∂_l y/∂z^B, keeping terms of
    /// cp-degree ≤ `max_cp`. The ghost pairs have {C^{αa}, 𝒫_{αa}}′ = 1 and
    /// {π^α, λ_α}′ = 1; the reversed pairs follow from graded antisymmetry.
    pub fn bracket_truncated(&self, x: &GradedPoly, y: &GradedPoly, max_cp: Option<u32>) -> GradedPoly {
        let s = &self.space;
        let mut out = GradedPoly::zero();
        if x.is_zero() || y.is_zero() {
            return out;
        }
        let pair = |out: &mut GradedPoly, xd: GradedPoly, yd: GradedPoly, sign: i64| {
            if xd.is_zero() || yd.is_zero() {
                return;
            }
            let prod = xd.mul_truncated(&yd, s, max_cp);
            if sign > 0 {
                *out += &prod;
            } else {
                *out -= &prod;
            }
        };
        for alpha in 1..=s.m() {
            let eps = s.constraint_parity(alpha);
            // ω^{PC} = -(-1)^{ε_C} = (-1)^{ε_α}; ω^{λπ} = -(-1)^{ε_α}
            let pc_sign = if eps == 0 { 1 } else { -1 };
            for a in 1..=2 {
                let c = s.ghost(alpha, a);
                let p = s.ghost_momentum(alpha, a);
                pair(&mut out, x.right_derivative(c, s), y.left_derivative(p, s), 1);
                pair(&mut out, x.right_derivative(p, s), y.left_derivative(c, s), pc_sign);
            }
            let pi = s.lagrange_momentum(alpha);
            let lam = s.lagrange(alpha);
            pair(&mut out, x.right_derivative(pi, s), y.left_derivative(lam, s), 1);
            pair(&mut out, x.right_derivative(lam, s), y.left_derivative(pi, s), -pc_sign);
        }
        if !self.omega.is_empty() {
            let mut dx: BTreeMap<usize, GradedPoly> = BTreeMap::new();
            let mut dy: BTreeMap<usize, GradedPoly> = BTreeMap::new();
            for (&(i, j), w) in &self.omega {
                let xi = dx.entry(i).or_insert_with(|| x.right_derivative(i, s));
                if xi.is_zero() {
                    continue;
                }
                let yj = dy.entry(j).or_insert_with(|| y.left_derivative(j, s));
                if yj.is_zero() {
                    continue;
                }
                let xw = dx[&i].mul_truncated(w, s, max_cp);
                out += &xw.mul_truncated(&dy[&j], s, max_cp);
            }
        }
        out
    }

    /// {ξ_α, x}′ restricted to the matter sector (the only part that can
    /// be nonzero for a constraint coordinate).
    pub fn xi_bracket(&self, alpha: usize, x: &GradedPoly, max_cp: Option<u32>) -> GradedPoly {
        let s = &self.space;
        let i = s.xi(alpha);
        let mut out = GradedPoly::zero();
        for (&(a, j), w) in self.omega.range((i, 0)..(i + 1, 0)) {
            debug_assert_eq!(a, i);
            let dy = x.left_derivative(j, s);
            if !dy.is_zero() {
                out += &w.mul_truncated(&dy, s, max_cp);
            }
        }
        out
    }

    /// Graded Jacobi identity on every triple of matter generators:
    /// (-1)^{ε_iε_k}{ξ_i,{ξ_j,ξ_k}} + cyclic = 0. Returns the offending
    /// triples with the nonzero left-hand side.
    pub fn jacobi_violations(&self) -> Vec<((usize, usize, usize), GradedPoly)> {
        let s = &self.space;
        let matter: Vec<usize> = s.matter_indices().collect();
        let gens: Vec<GradedPoly> = matter.iter().map(|&i| GradedPoly::var(s, i)).collect();
        let par = |i: usize| s.var(matter[i]).parity;
        let sign = |a: usize, b: usize| TheorySpec::koszul(par(a), par(b));
        let mut out = Vec::new();
        let n = matter.len();
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let term = |x: usize, y: usize, z: usize| {
                        self.bracket(&gens[x], &self.bracket(&gens[y], &gens[z])).scale(&sign(x, z))
                    };
                    let total = &(&term(i, j, k) + &term(j, k, i)) + &term(k, i, j);
                    if !total.is_zero() {
                        out.push(((matter[i], matter[j], matter[k]), total));
                    }
                }
            }
        }
        out
    }

    /// The sign (-1)^{ε(x)ε(y)} as a coefficient.
    pub fn koszul(px: u8, py: u8) -> Coeff {
        if px * py == 1 {
            -Coeff::one()
        } else {
            Coeff::one()
        }
    }
}
