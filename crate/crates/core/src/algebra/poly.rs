use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, AddAssign, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::Monomial;
use super::space::{Sector, Space};

pub type Coeff = BigRational;

pub fn rat(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

/// An exact linear combination of normal-ordered monomials. Zero coefficients
/// are never stored, so structural equality is polynomial equality.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GradedPoly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl GradedPoly {
    pub fn zero() -> GradedPoly {
        GradedPoly::default()
    }

    pub fn constant(space: &Space, c: Coeff) -> GradedPoly {
        GradedPoly::term(Monomial::one(space), c)
    }

    pub fn one(space: &Space) -> GradedPoly {
        GradedPoly::constant(space, Coeff::one())
    }

    pub fn var(space: &Space, idx: usize) -> GradedPoly {
        GradedPoly::term(Monomial::var(space, idx), Coeff::one())
    }

    pub fn term(mono: Monomial, c: Coeff) -> GradedPoly {
        let mut p = GradedPoly::zero();
        p.add_term(mono, c);
        p
    }

    /// Product of generators in the given (arbitrary) order.
    pub fn product_of(space: &Space, factors: &[usize]) -> GradedPoly {
        match super::monomial::normal_form(space, factors) {
            Some((m, neg)) => GradedPoly::term(m, if neg { -Coeff::one() } else { Coeff::one() }),
            None => GradedPoly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Coeff)> {
        self.terms.into_iter()
    }

    pub fn coeff(&self, mono: &Monomial) -> Option<&Coeff> {
        self.terms.get(mono)
    }

    pub fn add_term(&mut self, mono: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn add_signed(&mut self, mono: Monomial, c: &Coeff, negate: bool) {
        if negate {
            self.add_term(mono, -c);
        } else {
            self.add_term(mono, c.clone());
        }
    }

    pub fn scale(&self, c: &Coeff) -> GradedPoly {
        if c.is_zero() {
            return GradedPoly::zero();
        }
        GradedPoly { terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect() }
    }

    pub fn add_scaled(&mut self, other: &GradedPoly, c: &Coeff) {
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn mul(&self, other: &GradedPoly, space: &Space) -> GradedPoly {
        self.mul_truncated(other, space, None)
    }

    /// Product keeping only terms of cp-degree at most `max_cp`.
    pub fn mul_truncated(&self, other: &GradedPoly, space: &Space, max_cp: Option<u32>) -> GradedPoly {
        let mut out = GradedPoly::zero();
        if self.is_zero() || other.is_zero() {
            return out;
        }
        let rhs: Vec<(&Monomial, &Coeff, u32)> =
            other.terms.iter().map(|(m, c)| (m, c, m.cp_degree(space))).collect();
        for (ma, ca) in &self.terms {
            let cpa = ma.cp_degree(space);
            for &(mb, cb, cpb) in &rhs {
                if let Some(k) = max_cp {
                    if cpa + cpb > k {
                        continue;
                    }
                }
                if let Some((m, neg)) = ma.mul(mb, space) {
                    out.add_signed(m, &(ca * cb), neg);
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32, space: &Space) -> GradedPoly {
        let mut acc = GradedPoly::one(space);
        for _ in 0..n {
            acc = acc.mul(self, space);
        }
        acc
    }

    pub fn left_derivative(&self, idx: usize, space: &Space) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, dm, flip)) = m.left_derivative(idx, space) {
                out.add_signed(dm, &(c * int(e as i64)), flip);
            }
        }
        out
    }

    pub fn right_derivative(&self, idx: usize, space: &Space) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            if let Some((e, dm, flip)) = m.right_derivative(idx, space) {
                out.add_signed(dm, &(c * int(e as i64)), flip);
            }
        }
        out
    }

    /// Applies the first-order operator Σ coefᵢ ∂_l/∂z_{varᵢ}, with each
    /// coefficient monomial multiplied from the left.
    pub fn apply_vector_field(&self, field: &[FieldTerm], space: &Space) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            for ft in field {
                let Some((e, dm, flip)) = m.left_derivative(ft.var, space) else {
                    continue;
                };
                let Some((prod, neg)) = ft.mono.mul(&dm, space) else {
                    continue;
                };
                let v = c * &ft.coeff * int(e as i64);
                out.add_signed(prod, &v, flip ^ neg);
            }
        }
        out
    }

    /// Multiplies every term by f(term); terms mapped to zero are dropped.
    pub fn map_coefficients(&self, mut f: impl FnMut(&Monomial, &Coeff) -> Coeff) -> GradedPoly {
        let mut out = GradedPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(m, c));
        }
        out
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial) -> bool) -> GradedPoly {
        GradedPoly { terms: self.terms.iter().filter(|(m, _)| keep(m)).map(|(m, c)| (m.clone(), c.clone())).collect() }
    }

    /// Common parity of all terms, or `None` for zero or mixed-parity input.
    pub fn parity(&self, space: &Space) -> Option<u8> {
        common(self.terms.keys().map(|m| m.parity(space)))
    }

    pub fn ngh(&self, space: &Space) -> Option<i32> {
        common(self.terms.keys().map(|m| m.ngh(space)))
    }

    pub fn min_cp(&self, space: &Space) -> Option<u32> {
        self.terms.keys().map(|m| m.cp_degree(space)).min()
    }

    pub fn max_cp(&self, space: &Space) -> Option<u32> {
        self.terms.keys().map(|m| m.cp_degree(space)).max()
    }

    pub fn min_n(&self, space: &Space) -> Option<u32> {
        self.terms.keys().map(|m| m.n_degree(space)).min()
    }

    pub fn truncate_cp(&self, space: &Space, k: u32) -> GradedPoly {
        self.filter(|m| m.cp_degree(space) <= k)
    }

    /// Splits into parts homogeneous in (N-degree, cp-degree).
    pub fn grade_decompose(&self, space: &Space) -> BTreeMap<(u32, u32), GradedPoly> {
        let mut out: BTreeMap<(u32, u32), GradedPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry((m.n_degree(space), m.cp_degree(space)))
                .or_default()
                .terms
                .insert(m.clone(), c.clone());
        }
        out
    }

    /// Sets every generator of the listed sectors to zero.
    pub fn substitute_zero(&self, space: &Space, sectors: &BTreeSet<Sector>) -> GradedPoly {
        self.filter(|m| !m.factors().any(|(i, _)| sectors.contains(&space.var(i).sector)))
    }

    /// Whether every generator appearing belongs to one of `sectors`.
    pub fn only_sectors(&self, space: &Space, sectors: &[Sector]) -> bool {
        self.terms.keys().all(|m| m.factors().all(|(i, _)| sectors.contains(&space.var(i).sector)))
    }

    pub fn max_abs_height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs().max(c.denom().abs()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

fn common<T: PartialEq>(mut it: impl Iterator<Item = T>) -> Option<T> {
    let first = it.next()?;
    for x in it {
        if x != first {
            return None;
        }
    }
    Some(first)
}

/// One summand `coeff · mono · ∂_l/∂z_var` of a first-order operator.
#[derive(Clone, Debug)]
pub struct FieldTerm {
    pub coeff: Coeff,
    pub mono: Monomial,
    pub var: usize,
}

impl Add for &GradedPoly {
    type Output = GradedPoly;
    fn add(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for GradedPoly {
    type Output = GradedPoly;
    fn add(mut self, rhs: GradedPoly) -> GradedPoly {
        self += &rhs;
        self
    }
}

impl Sub for &GradedPoly {
    type Output = GradedPoly;
    fn sub(self, rhs: &GradedPoly) -> GradedPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for GradedPoly {
    type Output = GradedPoly;
    fn sub(mut self, rhs: GradedPoly) -> GradedPoly {
        self -= &rhs;
        self
    }
}

impl AddAssign<&GradedPoly> for GradedPoly {
    fn add_assign(&mut self, rhs: &GradedPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&GradedPoly> for GradedPoly {
    fn sub_assign(&mut self, rhs: &GradedPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

impl Neg for &GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        GradedPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for GradedPoly {
    type Output = GradedPoly;
    fn neg(self) -> GradedPoly {
        -&self
    }
}
