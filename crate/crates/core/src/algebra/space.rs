//! Generators of the extended phase space and their gradings.

use std::fmt;

use super::AlgebraError;

/// The six families of generators. The declaration order is the canonical
/// variable order used by every monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sector {
    /// ξ_α, the constraints taken as coordinates.
    XiConstraint,
    /// ξ_{α′}, the remaining (physical) coordinates.
    XiPhysical,
    /// 𝒫_{αa}
    GhostMomentum,
    /// C^{αa}
    Ghost,
    /// λ_α
    Lagrange,
    /// π^α
    LagrangeMomentum,
}

impl Sector {
    pub const ALL: [Sector; 6] = [
        Sector::XiConstraint,
        Sector::XiPhysical,
        Sector::GhostMomentum,
        Sector::Ghost,
        Sector::Lagrange,
        Sector::LagrangeMomentum,
    ];

    /// Name used by the expression grammar.
    pub fn token(self) -> &'static str {
        match self {
            Sector::XiConstraint => "xi",
            Sector::XiPhysical => "xip",
            Sector::GhostMomentum => "P",
            Sector::Ghost => "C",
            Sector::Lagrange => "lam",
            Sector::LagrangeMomentum => "pi",
        }
    }

    pub fn from_token(s: &str) -> Option<Sector> {
        Sector::ALL.iter().copied().find(|sec| sec.token() == s)
    }

    pub fn has_sp2_index(self) -> bool {
        matches!(self, Sector::GhostMomentum | Sector::Ghost)
    }

    /// Whether the counting operator N sees this sector.
    pub fn counted_by_n(self) -> bool {
        matches!(
            self,
            Sector::XiConstraint | Sector::GhostMomentum | Sector::Lagrange
        )
    }

    /// Whether the sector contributes to the (C, π) filtration degree.
    pub fn counted_by_cp(self) -> bool {
        matches!(self, Sector::Ghost | Sector::LagrangeMomentum)
    }
}

/// One generator of the algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Variable {
    pub sector: Sector,
    /// Constraint or physical index, 1-based.
    pub alpha: usize,
    /// Sp(2) index in {1, 2}; only for 𝒫 and C.
    pub sp2: Option<usize>,
    pub parity: u8,
    pub ngh: i32,
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sp2 {
            Some(a) => write!(f, "{}[{},{}]", self.sector.token(), self.alpha, a),
            None => write!(f, "{}[{}]", self.sector.token(), self.alpha),
        }
    }
}

/// The variable registry for a theory with `m` constraints and a number of
/// physical coordinates. Every polynomial is interpreted relative to one space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Space {
    constraint_parities: Vec<u8>,
    physical_parities: Vec<u8>,
    vars: Vec<Variable>,
    odd: Vec<bool>,
    n_counted: Vec<bool>,
    cp_counted: Vec<bool>,
}

impl Space {
    pub fn new(constraint_parities: Vec<u8>, physical_parities: Vec<u8>) -> Result<Space, AlgebraError> {
        if let Some(&p) = constraint_parities.iter().chain(&physical_parities).find(|&&p| p > 1) {
            return Err(AlgebraError::BadParity(p));
        }
        let mut vars = Vec::new();
        for (i, &p) in constraint_parities.iter().enumerate() {
            vars.push(Variable { sector: Sector::XiConstraint, alpha: i + 1, sp2: None, parity: p, ngh: 0 });
        }
        for (i, &p) in physical_parities.iter().enumerate() {
            vars.push(Variable { sector: Sector::XiPhysical, alpha: i + 1, sp2: None, parity: p, ngh: 0 });
        }
        for (i, &p) in constraint_parities.iter().enumerate() {
            for a in 1..=2 {
                vars.push(Variable { sector: Sector::GhostMomentum, alpha: i + 1, sp2: Some(a), parity: 1 - p, ngh: -1 });
            }
        }
        for (i, &p) in constraint_parities.iter().enumerate() {
            for a in 1..=2 {
                vars.push(Variable { sector: Sector::Ghost, alpha: i + 1, sp2: Some(a), parity: 1 - p, ngh: 1 });
            }
        }
        for (i, &p) in constraint_parities.iter().enumerate() {
            vars.push(Variable { sector: Sector::Lagrange, alpha: i + 1, sp2: None, parity: p, ngh: -2 });
        }
        for (i, &p) in constraint_parities.iter().enumerate() {
            vars.push(Variable { sector: Sector::LagrangeMomentum, alpha: i + 1, sp2: None, parity: p, ngh: 2 });
        }
        let odd = vars.iter().map(|v| v.parity == 1).collect();
        let n_counted = vars.iter().map(|v| v.sector.counted_by_n()).collect();
        let cp_counted = vars.iter().map(|v| v.sector.counted_by_cp()).collect();
        if vars.len() > u16::MAX as usize {
            return Err(AlgebraError::TooManyVariables(vars.len()));
        }
        Ok(Space { constraint_parities, physical_parities, vars, odd, n_counted, cp_counted })
    }

    /// Number of constraints m.
    pub fn m(&self) -> usize {
        self.constraint_parities.len()
    }

    pub fn n_physical(&self) -> usize {
        self.physical_parities.len()
    }

    /// Number of matter variables (ξ_α and ξ_{α′}).
    pub fn n_matter(&self) -> usize {
        self.m() + self.n_physical()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn constraint_parity(&self, alpha: usize) -> u8 {
        self.constraint_parities[alpha - 1]
    }

    pub fn constraint_parities(&self) -> &[u8] {
        &self.constraint_parities
    }

    pub fn physical_parities(&self) -> &[u8] {
        &self.physical_parities
    }

    pub fn var(&self, idx: usize) -> &Variable {
        &self.vars[idx]
    }

    pub fn vars(&self) -> &[Variable] {
        &self.vars
    }

    #[inline]
    pub fn is_odd(&self, idx: usize) -> bool {
        self.odd[idx]
    }

    #[inline]
    pub fn counts_n(&self, idx: usize) -> bool {
        self.n_counted[idx]
    }

    #[inline]
    pub fn counts_cp(&self, idx: usize) -> bool {
        self.cp_counted[idx]
    }

    // Index helpers. All indices are 1-based; out-of-range indices panic.

    pub fn xi(&self, alpha: usize) -> usize {
        assert!(alpha >= 1 && alpha <= self.m(), "xi index {alpha} out of range");
        alpha - 1
    }

    pub fn xip(&self, alpha: usize) -> usize {
        assert!(alpha >= 1 && alpha <= self.n_physical(), "xip index {alpha} out of range");
        self.m() + alpha - 1
    }

    pub fn ghost_momentum(&self, alpha: usize, a: usize) -> usize {
        self.check_ghost(alpha, a);
        self.n_matter() + 2 * (alpha - 1) + (a - 1)
    }

    pub fn ghost(&self, alpha: usize, a: usize) -> usize {
        self.check_ghost(alpha, a);
        self.n_matter() + 2 * self.m() + 2 * (alpha - 1) + (a - 1)
    }

    pub fn lagrange(&self, alpha: usize) -> usize {
        assert!(alpha >= 1 && alpha <= self.m(), "lam index {alpha} out of range");
        self.n_matter() + 4 * self.m() + alpha - 1
    }

    pub fn lagrange_momentum(&self, alpha: usize) -> usize {
        assert!(alpha >= 1 && alpha <= self.m(), "pi index {alpha} out of range");
        self.n_matter() + 5 * self.m() + alpha - 1
    }

    fn check_ghost(&self, alpha: usize, a: usize) {
        assert!(alpha >= 1 && alpha <= self.m(), "ghost index {alpha} out of range");
        assert!(a == 1 || a == 2, "Sp(2) index {a} out of range");
    }

    /// Looks up a generator by sector and indices, returning `None` when out of range.
    pub fn lookup(&self, sector: Sector, alpha: usize, sp2: Option<usize>) -> Option<usize> {
        let m = self.m();
        if alpha == 0 {
            return None;
        }
        let needs_sp2 = sector.has_sp2_index();
        match (needs_sp2, sp2) {
            (true, Some(a)) if a == 1 || a == 2 => {}
            (false, None) => {}
            _ => return None,
        }
        let in_range = match sector {
            Sector::XiPhysical => alpha <= self.n_physical(),
            _ => alpha <= m,
        };
        if !in_range {
            return None;
        }
        Some(match sector {
            Sector::XiConstraint => self.xi(alpha),
            Sector::XiPhysical => self.xip(alpha),
            Sector::GhostMomentum => self.ghost_momentum(alpha, sp2.unwrap()),
            Sector::Ghost => self.ghost(alpha, sp2.unwrap()),
            Sector::Lagrange => self.lagrange(alpha),
            Sector::LagrangeMomentum => self.lagrange_momentum(alpha),
        })
    }

    /// Indices of the matter variables: ξ_α first, then ξ_{α′}.
    pub fn matter_indices(&self) -> std::ops::Range<usize> {
        0..self.n_matter()
    }
}
