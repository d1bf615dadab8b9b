//! The linear operators N, W, Γ, M, Q, W⁺, V and the bar operators acting on
//! Sp(2)-symmetric tensors whose components are graded polynomials.
//!
//! Every operator here preserves the N-degree and the cp-degree of each term,
//! which is what makes N⁻¹ a per-term division and keeps truncation exact.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use thiserror::Error;

use crate::algebra::{int, rat, Coeff, FieldTerm, GradedPoly, Monomial, Space};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OperatorError {
    /// N⁻¹ applied to a term that is not in 𝒱.
    #[error("term {0} lies outside V (N-degree 0)")]
    OutsideV(String),
    #[error("{op}: result of rank {rank} is not symmetric under index permutations")]
    Asymmetric { op: &'static str, rank: usize },
    #[error("{op}: unsupported rank {rank}")]
    Rank { op: &'static str, rank: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
}

/// ε^{ab} with ε^{12} = 1 (indices 1-based).
pub fn eps_upper(a: usize, b: usize) -> i64 {
    match (a, b) {
        (1, 2) => 1,
        (2, 1) => -1,
        _ => 0,
    }
}

/// ε_{ab}, the inverse of ε^{ab}: ε^{ab}ε_{bc} = δ^a_c, so ε_{12} = -1.
pub fn eps_lower(a: usize, b: usize) -> i64 {
    -eps_upper(a, b)
}

/// A rank-n tensor with one graded polynomial per multi-index (a₁…a_n),
/// aᵢ ∈ {1, 2}. All 2ⁿ components are stored so symmetry can be checked.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymTensor {
    rank: usize,
    comps: Vec<GradedPoly>,
}

fn mask_of(idx: &[usize]) -> usize {
    idx.iter().enumerate().fold(0, |m, (i, &a)| {
        assert!(a == 1 || a == 2, "Sp(2) index {a} out of range");
        if a == 2 {
            m | (1 << i)
        } else {
            m
        }
    })
}

fn index_of(mask: usize, rank: usize) -> Vec<usize> {
    (0..rank).map(|i| if mask & (1 << i) != 0 { 2 } else { 1 }).collect()
}

impl SymTensor {
    pub fn zero(rank: usize) -> SymTensor {
        SymTensor { rank, comps: vec![GradedPoly::zero(); 1 << rank] }
    }

    pub fn scalar(p: GradedPoly) -> SymTensor {
        SymTensor { rank: 0, comps: vec![p] }
    }

    /// Rank-1 tensor (X¹, X²).
    pub fn vector(x1: GradedPoly, x2: GradedPoly) -> SymTensor {
        SymTensor { rank: 1, comps: vec![x1, x2] }
    }

    /// Builds a tensor from a function of the multi-index; the result must be
    /// symmetric.
    pub fn from_fn(rank: usize, mut f: impl FnMut(&[usize]) -> GradedPoly) -> Result<SymTensor, OperatorError> {
        let comps = (0..1usize << rank).map(|mask| f(&index_of(mask, rank))).collect();
        let t = SymTensor { rank, comps };
        t.ensure_symmetric("from_fn")
    }

    /// Like [`SymTensor::from_fn`] but without the symmetry check.
    pub fn from_fn_unchecked(rank: usize, mut f: impl FnMut(&[usize]) -> GradedPoly) -> SymTensor {
        SymTensor { rank, comps: (0..1usize << rank).map(|mask| f(&index_of(mask, rank))).collect() }
    }

    /// Builds a symmetric tensor from its values on sorted multi-indices,
    /// given as a function of the number of indices equal to 2.
    pub fn from_symmetric(rank: usize, mut f: impl FnMut(usize) -> GradedPoly) -> SymTensor {
        let values: Vec<GradedPoly> = (0..=rank).map(&mut f).collect();
        let comps = (0..1usize << rank).map(|mask| values[mask.count_ones() as usize].clone()).collect();
        SymTensor { rank, comps }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn component(&self, idx: &[usize]) -> &GradedPoly {
        assert_eq!(idx.len(), self.rank, "multi-index length");
        &self.comps[mask_of(idx)]
    }

    /// The scalar of a rank-0 tensor.
    pub fn as_scalar(&self) -> &GradedPoly {
        assert_eq!(self.rank, 0);
        &self.comps[0]
    }

    /// Components with their multi-indices, in index order.
    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &GradedPoly)> {
        let rank = self.rank;
        self.comps.iter().enumerate().map(move |(mask, p)| (index_of(mask, rank), p))
    }

    /// Components on sorted multi-indices (1…1, 1…12, …, 2…2).
    pub fn independent_components(&self) -> impl Iterator<Item = (Vec<usize>, &GradedPoly)> {
        let rank = self.rank;
        (0..=rank).map(move |twos| {
            let mask = ((1usize << twos) - 1) << (rank - twos);
            (index_of(mask, rank), &self.comps[mask])
        })
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(GradedPoly::is_zero)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.comps.len()).all(|mask| {
            let twos = mask.count_ones() as usize;
            let sorted = ((1usize << twos) - 1) << (self.rank - twos);
            self.comps[mask] == self.comps[sorted]
        })
    }

    fn ensure_symmetric(self, op: &'static str) -> Result<SymTensor, OperatorError> {
        if self.is_symmetric() {
            Ok(self)
        } else {
            Err(OperatorError::Asymmetric { op, rank: self.rank })
        }
    }

    pub fn map(&self, f: impl FnMut(&GradedPoly) -> GradedPoly) -> SymTensor {
        SymTensor { rank: self.rank, comps: self.comps.iter().map(f).collect() }
    }

    pub fn try_map<E>(&self, f: impl FnMut(&GradedPoly) -> Result<GradedPoly, E>) -> Result<SymTensor, E> {
        Ok(SymTensor { rank: self.rank, comps: self.comps.iter().map(f).collect::<Result<_, _>>()? })
    }

    pub fn add(&self, other: &SymTensor) -> SymTensor {
        assert_eq!(self.rank, other.rank, "rank mismatch in tensor sum");
        SymTensor { rank: self.rank, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &SymTensor) -> SymTensor {
        assert_eq!(self.rank, other.rank, "rank mismatch in tensor difference");
        SymTensor { rank: self.rank, comps: self.comps.iter().zip(&other.comps).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, c: &Coeff) -> SymTensor {
        self.map(|p| p.scale(c))
    }

    pub fn neg(&self) -> SymTensor {
        self.map(|p| -p)
    }

    pub fn truncate_cp(&self, space: &Space, k: u32) -> SymTensor {
        self.map(|p| p.truncate_cp(space, k))
    }

    pub fn total_terms(&self) -> usize {
        self.comps.iter().map(GradedPoly::len).sum()
    }

    pub fn min_cp(&self, space: &Space) -> Option<u32> {
        self.comps.iter().filter_map(|p| p.min_cp(space)).min()
    }

    pub fn max_cp(&self, space: &Space) -> Option<u32> {
        self.comps.iter().filter_map(|p| p.max_cp(space)).max()
    }

    /// Common ngh of all nonzero components.
    pub fn ngh(&self, space: &Space) -> Option<i32> {
        common(self.comps.iter().filter(|p| !p.is_zero()).map(|p| p.ngh(space)))?
    }

    pub fn parity(&self, space: &Space) -> Option<u8> {
        common(self.comps.iter().filter(|p| !p.is_zero()).map(|p| p.parity(space)))?
    }

    /// Whether every term of every component lies in 𝒱.
    pub fn in_v(&self, space: &Space) -> bool {
        self.comps.iter().all(|p| p.terms().all(|(m, _)| m.n_degree(space) >= 1))
    }

    /// Assembles a rank n+1 tensor from a family of scalar operators Fᵃ via
    /// the cyclic sum (FX)^{a₁…a_{n+1}} = F^{a₁}X^{a₂…a_{n+1}} + cycl. perm.
    pub fn raise_cyclic(&self, op: &'static str, mut f: impl FnMut(usize, &GradedPoly) -> GradedPoly) -> Result<SymTensor, OperatorError> {
        let n = self.rank;
        let images: Vec<[GradedPoly; 2]> = self.comps.iter().map(|c| [f(1, c), f(2, c)]).collect();
        let out_rank = n + 1;
        let mut comps = Vec::with_capacity(1 << out_rank);
        for mask in 0..1usize << out_rank {
            let t = index_of(mask, out_rank);
            let mut acc = GradedPoly::zero();
            for s in 0..out_rank {
                let rest: Vec<usize> = (1..out_rank).map(|j| t[(s + j) % out_rank]).collect();
                acc += &images[mask_of(&rest)][t[s] - 1];
            }
            comps.push(acc);
        }
        SymTensor { rank: out_rank, comps }.ensure_symmetric(op)
    }

    /// Contracts the last index with a family of scalar operators F_a:
    /// (FX)^{a₁…a_{n-1}} = F_a X^{a₁…a_{n-1}a}. Rank 0 maps to zero.
    pub fn contract_last(&self, mut f: impl FnMut(usize, &GradedPoly) -> GradedPoly) -> SymTensor {
        if self.rank == 0 {
            return SymTensor::zero(0);
        }
        let out_rank = self.rank - 1;
        let comps = (0..1usize << out_rank)
            .map(|mask| {
                let idx = index_of(mask, out_rank);
                let mut acc = GradedPoly::zero();
                for a in 1..=2 {
                    let mut full = idx.clone();
                    full.push(a);
                    acc += &f(a, &self.comps[mask_of(&full)]);
                }
                acc
            })
            .collect();
        SymTensor { rank: out_rank, comps }
    }

    pub fn render(&self, space: &Space, name: &str) -> String {
        let mut out = String::new();
        for (idx, p) in self.independent_components() {
            let label: String = idx.iter().map(|a| a.to_string()).collect();
            out.push_str(&format!("{name}^{{{label}}} = {}\n", crate::io::serialize(space, p)));
        }
        out
    }
}

fn common<T: PartialEq>(mut it: impl Iterator<Item = Option<T>>) -> Option<Option<T>> {
    let Some(first) = it.next() else {
        return Some(None);
    };
    let first = first?;
    for x in it {
        if x? != first {
            return None;
        }
    }
    Some(Some(first))
}

/// Holds the vector fields Wᵃ and Γ_a for a space and applies the operator
/// algebra built from them.
#[derive(Clone, Debug)]
pub struct Calculus<'a> {
    space: &'a Space,
    w: [Vec<FieldTerm>; 2],
    gamma: [Vec<FieldTerm>; 2],
}

impl<'a> Calculus<'a> {
    pub fn new(space: &'a Space) -> Calculus<'a> {
        let mono = |vars: &[usize]| -> Monomial {
            vars.iter().fold(Monomial::one(space), |m, &v| m.mul(&Monomial::var(space, v), space).unwrap().0)
        };
        let mut w: [Vec<FieldTerm>; 2] = [Vec::new(), Vec::new()];
        let mut gamma: [Vec<FieldTerm>; 2] = [Vec::new(), Vec::new()];
        for a in 1..=2 {
            for alpha in 1..=space.m() {
                let sign_eps = if space.constraint_parity(alpha) == 0 { 1 } else { -1 };
                // Wᵃ = ξ_α ∂/∂𝒫_{αa} + εᵃᵇ𝒫_{αb} ∂/∂λ_α + (-1)^{ε_α} εᵃᵇ π^α ∂_l/∂C^{αb}
                w[a - 1].push(FieldTerm { coeff: Coeff::one(), mono: mono(&[space.xi(alpha)]), var: space.ghost_momentum(alpha, a) });
                for b in 1..=2 {
                    let e = eps_upper(a, b);
                    if e == 0 {
                        continue;
                    }
                    w[a - 1].push(FieldTerm { coeff: int(e), mono: mono(&[space.ghost_momentum(alpha, b)]), var: space.lagrange(alpha) });
                    w[a - 1].push(FieldTerm {
                        coeff: int(sign_eps * e),
                        mono: mono(&[space.lagrange_momentum(alpha)]),
                        var: space.ghost(alpha, b),
                    });
                }
                // Γ_a = 𝒫_{αa} ∂_l/∂ξ_α - ε_{ab} λ_α ∂/∂𝒫_{αb}
                gamma[a - 1].push(FieldTerm { coeff: Coeff::one(), mono: mono(&[space.ghost_momentum(alpha, a)]), var: space.xi(alpha) });
                for b in 1..=2 {
                    let e = eps_lower(a, b);
                    if e == 0 {
                        continue;
                    }
                    gamma[a - 1].push(FieldTerm { coeff: int(-e), mono: mono(&[space.lagrange(alpha)]), var: space.ghost_momentum(alpha, b) });
                }
            }
        }
        Calculus { space, w, gamma }
    }

    pub fn space(&self) -> &'a Space {
        self.space
    }

    // ---- scalar operators ----

    /// Wᵃ on a single polynomial.
    pub fn w_comp(&self, a: usize, p: &GradedPoly) -> GradedPoly {
        p.apply_vector_field(&self.w[a - 1], self.space)
    }

    /// Γ_a on a single polynomial.
    pub fn gamma_comp(&self, a: usize, p: &GradedPoly) -> GradedPoly {
        p.apply_vector_field(&self.gamma[a - 1], self.space)
    }

    pub fn n_comp(&self, p: &GradedPoly) -> GradedPoly {
        p.map_coefficients(|m, c| c * int(m.n_degree(self.space) as i64))
    }

    /// N^e for any integer e; negative powers require every term in 𝒱.
    pub fn n_pow_comp(&self, p: &GradedPoly, e: i32) -> Result<GradedPoly, OperatorError> {
        self.check_in_v(p, e)?;
        Ok(p.map_coefficients(|m, c| c * pow_i(m.n_degree(self.space), e)))
    }

    fn check_in_v(&self, p: &GradedPoly, e: i32) -> Result<(), OperatorError> {
        if e < 0 {
            if let Some((m, _)) = p.terms().find(|(m, _)| m.n_degree(self.space) == 0) {
                return Err(OperatorError::OutsideV(m.render(self.space)));
            }
        }
        Ok(())
    }

    /// M = Γ_a Wᵃ.
    pub fn m_comp(&self, p: &GradedPoly) -> GradedPoly {
        let mut out = self.gamma_comp(1, &self.w_comp(1, p));
        out += &self.gamma_comp(2, &self.w_comp(2, p));
        out
    }

    /// W̄ = ε_{ab}WᵃWᵇ.
    pub fn bar_w(&self, p: &GradedPoly) -> GradedPoly {
        let w12 = self.w_comp(1, &self.w_comp(2, p));
        let w21 = self.w_comp(2, &self.w_comp(1, p));
        &w21 - &w12
    }

    /// Γ̄ = εᵃᵇΓ_aΓ_b.
    pub fn bar_gamma(&self, p: &GradedPoly) -> GradedPoly {
        let g12 = self.gamma_comp(1, &self.gamma_comp(2, p));
        let g21 = self.gamma_comp(2, &self.gamma_comp(1, p));
        &g12 - &g21
    }

    /// c₀(m)·x + c₁(m)·Mx + c₂(m)·M²x, with m the N-degree of each term.
    fn m_polynomial(&self, p: &GradedPoly, coeffs: impl Fn(u32) -> [Coeff; 3]) -> Result<GradedPoly, OperatorError> {
        self.check_in_v(p, -1)?;
        let mp = self.m_comp(p);
        let mmp = self.m_comp(&mp);
        let mut cache: BTreeMap<u32, [Coeff; 3]> = BTreeMap::new();
        let mut get = |m: u32| cache.entry(m).or_insert_with(|| coeffs(m)).clone();
        let mut out = p.map_coefficients(|m, c| c * &get(m.n_degree(self.space))[0]);
        out += &mp.map_coefficients(|m, c| c * &get(m.n_degree(self.space))[1]);
        out += &mmp.map_coefficients(|m, c| c * &get(m.n_degree(self.space))[2]);
        Ok(out)
    }

    /// Q on a component of a rank-n tensor.
    pub fn q_comp(&self, n: usize, p: &GradedPoly) -> Result<GradedPoly, OperatorError> {
        if n == 0 {
            // (1/6)(11N⁻¹ - 6MN⁻² + M²N⁻³)
            self.m_polynomial(p, |m| {
                let m = m as i64;
                [rat(11, 6 * m), rat(-1, m * m), rat(1, 6 * m * m * m)]
            })
        } else {
            // (nN+M)⁻¹ = (1/n)N⁻¹ - ((n+3)MN⁻² - M²N⁻³)/(n(n+1)(n+2))
            let n = n as i64;
            let d = n * (n + 1) * (n + 2);
            self.m_polynomial(p, |m| {
                let m = m as i64;
                [rat(1, n * m), rat(-(n + 3), d * m * m), rat(1, d * m * m * m)]
            })
        }
    }

    /// The closed-form operator
    /// (n(n²+4n+6)I - (n-4)MN⁻¹ - 2M²N⁻²)/(n(n+1)(n+2)) on one component.
    ///
    /// This is *not* the middle factor of the splitting used by
    /// [`Calculus::decompose`]: since W lowers the M-eigenvalue by one unit of
    /// N and Γ raises it, Q_n W = W Q_{n-1} on the image of W⁺, so the middle
    /// factor must act as the identity there, which this operator does not
    /// (it has eigenvalues (n+1)/n and (n+2)/(n+1) on that image). It is kept
    /// so the discrepancy can be exhibited.
    pub fn v_comp(&self, n: usize, p: &GradedPoly) -> Result<GradedPoly, OperatorError> {
        if n == 0 {
            return Err(OperatorError::Rank { op: "V", rank: 0 });
        }
        let n = n as i64;
        let d = n * (n + 1) * (n + 2);
        // (n(n²+4n+6)I - (n-4)MN⁻¹ - 2M²N⁻²)/(n(n+1)(n+2))
        self.m_polynomial(p, |m| {
            let m = m as i64;
            [rat(n * (n * n + 4 * n + 6), d), rat(-(n - 4), d * m), rat(-2, d * m * m)]
        })
    }

    // ---- tensor operators ----

    pub fn n(&self, x: &SymTensor) -> SymTensor {
        x.map(|p| self.n_comp(p))
    }

    pub fn n_pow(&self, x: &SymTensor, e: i32) -> Result<SymTensor, OperatorError> {
        x.try_map(|p| self.n_pow_comp(p, e))
    }

    pub fn n_inv(&self, x: &SymTensor) -> Result<SymTensor, OperatorError> {
        self.n_pow(x, -1)
    }

    /// W: Sⁿ → Sⁿ⁺¹.
    pub fn w(&self, x: &SymTensor) -> Result<SymTensor, OperatorError> {
        x.raise_cyclic("W", |a, p| self.w_comp(a, p))
    }

    /// Γ: Sⁿ⁺¹ → Sⁿ, zero on S⁰.
    pub fn gamma(&self, x: &SymTensor) -> SymTensor {
        x.contract_last(|a, p| self.gamma_comp(a, p))
    }

    /// M acting componentwise.
    pub fn m(&self, x: &SymTensor) -> SymTensor {
        x.map(|p| self.m_comp(p))
    }

    /// Q: Sⁿ → Sⁿ, dispatched on the rank.
    pub fn q(&self, x: &SymTensor) -> Result<SymTensor, OperatorError> {
        let n = x.rank();
        x.try_map(|p| self.q_comp(n, p))
    }

    /// W⁺ = QΓ: Sⁿ⁺¹ → Sⁿ.
    pub fn w_plus(&self, x: &SymTensor) -> Result<SymTensor, OperatorError> {
        if x.rank() == 0 {
            return Err(OperatorError::Rank { op: "W+", rank: 0 });
        }
        self.q(&self.gamma(x))
    }

    /// V parameterised by `n`, applied componentwise.
    pub fn v(&self, x: &SymTensor, n: usize) -> Result<SymTensor, OperatorError> {
        x.try_map(|p| self.v_comp(n, p))
    }

    /// The two parts (W⁺WX, WW⁺X) of X ∈ Sⁿ, n ≥ 1; they sum to X.
    ///
    /// From (ΓW + WΓ) = nN + M and Q = (nN + M)⁻¹ one gets
    /// X = W⁺WX + Q_n WΓX, and moving Q_n through W turns it into Q_{n-1}.
    pub fn decompose(&self, x: &SymTensor) -> Result<(SymTensor, SymTensor), OperatorError> {
        let n = x.rank();
        if n == 0 {
            return Err(OperatorError::Rank { op: "decompose", rank: 0 });
        }
        let first = self.w_plus(&self.w(x)?)?;
        let second = self.w(&self.w_plus(x)?)?;
        Ok((first, second))
    }

    /// W̄x, Γ̄x and the split x = MN⁻¹x + ¼(W̄Γ̄ - Γ̄W̄)N⁻²x for x ∈ 𝒱,
    /// which follows from W̄Γ̄ - Γ̄W̄ = 4N² - 4MN.
    pub fn bar_ops(&self, x: &GradedPoly) -> Result<BarParts, OperatorError> {
        let bar_w = self.bar_w(x);
        let bar_gamma = self.bar_gamma(x);
        let m_part = self.n_pow_comp(&self.m_comp(x), -1)?;
        let n2 = self.n_pow_comp(x, -2)?;
        let comm = &self.bar_w(&self.bar_gamma(&n2)) - &self.bar_gamma(&self.bar_w(&n2));
        let bar_part = comm.scale(&rat(1, 4));
        Ok(BarParts { bar_w, bar_gamma, m_part, bar_part })
    }

    /// Summary of an operator application.
    pub fn report(&self, op: &str, input: &SymTensor, output: &SymTensor) -> OperatorReport {
        let count = |t: &SymTensor| {
            let mut by_n: BTreeMap<u32, usize> = BTreeMap::new();
            for (_, p) in t.components() {
                for (m, _) in p.terms() {
                    *by_n.entry(m.n_degree(self.space)).or_default() += 1;
                }
            }
            by_n
        };
        OperatorReport {
            op: op.to_string(),
            input_rank: input.rank(),
            output_rank: output.rank(),
            input_terms_by_n: count(input),
            output_terms_by_n: count(output),
        }
    }
}

fn pow_i(m: u32, e: i32) -> Coeff {
    if e >= 0 {
        int((m as i64).pow(e as u32))
    } else {
        rat(1, (m as i64).pow((-e) as u32))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BarParts {
    pub bar_w: GradedPoly,
    pub bar_gamma: GradedPoly,
    /// ½MN⁻¹x
    pub m_part: GradedPoly,
    /// ¼(W̄Γ̄ - Γ̄W̄)N⁻²x
    pub bar_part: GradedPoly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperatorReport {
    pub op: String,
    pub input_rank: usize,
    pub output_rank: usize,
    pub input_terms_by_n: BTreeMap<u32, usize>,
    pub output_terms_by_n: BTreeMap<u32, usize>,
}

impl fmt::Display for OperatorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: S^{} -> S^{}", self.op, self.input_rank, self.output_rank)?;
        for (n, c) in &self.output_terms_by_n {
            let i = self.input_terms_by_n.get(n).copied().unwrap_or(0);
            write!(f, "; N={n}: {i} -> {c} terms")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> Space {
        Space::new(vec![0, 1], vec![]).unwrap()
    }

    fn v(s: &Space, i: usize) -> GradedPoly {
        GradedPoly::var(s, i)
    }

    #[test]
    fn epsilon_inverse() {
        for a in 1..=2 {
            for c in 1..=2 {
                let s: i64 = (1..=2).map(|b| eps_upper(a, b) * eps_lower(b, c)).sum();
                assert_eq!(s, if a == c { 1 } else { 0 });
            }
        }
    }

    #[test]
    fn counting_operator() {
        let s = setup();
        let calc = Calculus::new(&s);
        let x = GradedPoly::product_of(&s, &[s.xi(1), s.ghost_momentum(2, 1), s.ghost(2, 1)]);
        assert_eq!(calc.n_comp(&x), x.scale(&int(2)));
        let c = v(&s, s.ghost(1, 1));
        assert!(calc.n_comp(&c).is_zero());
        assert!(matches!(calc.n_pow_comp(&c, -1), Err(OperatorError::OutsideV(_))));
        let l = v(&s, s.lagrange(1));
        assert_eq!(calc.n_pow_comp(&l, -1).unwrap(), l);
    }

    #[test]
    fn w_on_generators() {
        let s = setup();
        let calc = Calculus::new(&s);
        let p11 = SymTensor::scalar(v(&s, s.ghost_momentum(1, 1)));
        assert_eq!(calc.w(&p11).unwrap(), SymTensor::vector(v(&s, s.xi(1)), GradedPoly::zero()));
        let lam = SymTensor::scalar(v(&s, s.lagrange(1)));
        assert_eq!(calc.w(&lam).unwrap(), SymTensor::vector(v(&s, s.ghost_momentum(1, 2)), -v(&s, s.ghost_momentum(1, 1))));
        for alpha in 1..=2 {
            let sign = if s.constraint_parity(alpha) == 0 { 1 } else { -1 };
            for c in 1..=2 {
                let wc = calc.w(&SymTensor::scalar(v(&s, s.ghost(alpha, c)))).unwrap();
                for a in 1..=2 {
                    let expected = v(&s, s.lagrange_momentum(alpha)).scale(&int(sign * eps_upper(a, c)));
                    assert_eq!(wc.component(&[a]), &expected);
                }
            }
        }
    }

    #[test]
    fn gamma_on_generators() {
        let s = setup();
        let calc = Calculus::new(&s);
        let x = SymTensor::vector(v(&s, s.xi(1)), GradedPoly::zero());
        assert_eq!(calc.gamma(&x), SymTensor::scalar(v(&s, s.ghost_momentum(1, 1))));
        // Γ_a acting on (𝒫_{1,2}, -𝒫_{1,1}): Γ_1𝒫_{1,2} - Γ_2𝒫_{1,1} = λ_1 + λ_1
        let y = SymTensor::vector(v(&s, s.ghost_momentum(1, 2)), -v(&s, s.ghost_momentum(1, 1)));
        assert_eq!(calc.gamma(&y), SymTensor::scalar(v(&s, s.lagrange(1)).scale(&int(2))));
        assert!(calc.gamma(&SymTensor::scalar(v(&s, s.xi(1)))).is_zero());
    }

    #[test]
    fn m_of_one_and_xi() {
        let s = setup();
        let calc = Calculus::new(&s);
        assert!(calc.m_comp(&GradedPoly::one(&s)).is_zero());
        // ξ_1 has no 𝒫, λ or C dependence, so Wᵃξ_1 = 0
        assert!(calc.m_comp(&v(&s, s.xi(1))).is_zero());
        // M𝒫_{1,1} = Γ_1 ξ_1 = 𝒫_{1,1}
        let p = v(&s, s.ghost_momentum(1, 1));
        assert_eq!(calc.m_comp(&p), p);
    }

    #[test]
    fn q_on_m_kernel() {
        let s = setup();
        let calc = Calculus::new(&s);
        let x = GradedPoly::product_of(&s, &[s.xi(1), s.xi(1)]);
        let t = SymTensor::vector(x.clone(), x.clone());
        let q = calc.q(&t).unwrap();
        assert_eq!(q.component(&[1]), &x.scale(&rat(1, 2)));
        let q0 = calc.q(&SymTensor::scalar(v(&s, s.xi(1)))).unwrap();
        assert_eq!(q0.as_scalar(), &v(&s, s.xi(1)).scale(&rat(11, 6)));
    }

    #[test]
    fn symmetry_and_rank_errors() {
        let s = setup();
        let calc = Calculus::new(&s);
        let bad = SymTensor::from_fn(2, |idx| if idx == [1, 2] { GradedPoly::one(&s) } else { GradedPoly::zero() });
        assert!(matches!(bad, Err(OperatorError::Asymmetric { .. })));
        assert!(matches!(calc.w_plus(&SymTensor::zero(0)), Err(OperatorError::Rank { .. })));
        assert!(matches!(calc.decompose(&SymTensor::zero(0)), Err(OperatorError::Rank { .. })));
    }
}
