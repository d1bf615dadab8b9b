use std::cmp::Ordering;
use std::fmt;

use super::space::{Sector, Space};

/// A normal-ordered product of generators, stored as a dense exponent vector
/// over the variables of a [`Space`]. Odd generators have exponent 0 or 1.
///
/// Monomials sort so that lexicographically larger exponent vectors come
/// first; this is the order in which polynomials are printed.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial {
    exps: Box<[u16]>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        other.exps.cmp(&self.exps)
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Monomial{:?}", self.exps)
    }
}

impl Monomial {
    pub fn one(space: &Space) -> Monomial {
        Monomial { exps: vec![0; space.len()].into_boxed_slice() }
    }

    pub fn from_exponents(exps: Vec<u16>) -> Monomial {
        Monomial { exps: exps.into_boxed_slice() }
    }

    pub fn var(space: &Space, idx: usize) -> Monomial {
        let mut exps = vec![0; space.len()];
        exps[idx] = 1;
        Monomial { exps: exps.into_boxed_slice() }
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exps
    }

    #[inline]
    pub fn exponent(&self, idx: usize) -> u16 {
        self.exps[idx]
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn degree(&self) -> u32 {
        self.exps.iter().map(|&e| e as u32).sum()
    }

    /// Nonzero factors as (variable index, exponent), in canonical order.
    pub fn factors(&self) -> impl Iterator<Item = (usize, u16)> + '_ {
        self.exps.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e))
    }

    pub fn parity(&self, space: &Space) -> u8 {
        let odd: u32 = self.factors().filter(|&(i, _)| space.is_odd(i)).map(|(_, e)| e as u32).sum();
        (odd % 2) as u8
    }

    pub fn ngh(&self, space: &Space) -> i32 {
        self.factors().map(|(i, e)| space.var(i).ngh * e as i32).sum()
    }

    /// Total number of ξ_α, 𝒫 and λ factors.
    pub fn n_degree(&self, space: &Space) -> u32 {
        self.factors().filter(|&(i, _)| space.counts_n(i)).map(|(_, e)| e as u32).sum()
    }

    /// Total number of C and π factors.
    pub fn cp_degree(&self, space: &Space) -> u32 {
        self.factors().filter(|&(i, _)| space.counts_cp(i)).map(|(_, e)| e as u32).sum()
    }

    pub fn contains_sector(&self, space: &Space, sector: Sector) -> bool {
        self.factors().any(|(i, _)| space.var(i).sector == sector)
    }

    /// Product of two monomials: `None` if an odd generator repeats, otherwise
    /// the product and whether reordering introduced a minus sign.
    pub fn mul(&self, other: &Monomial, space: &Space) -> Option<(Monomial, bool)> {
        let mut exps = self.exps.to_vec();
        let mut swaps = 0u32;
        // odd factors of `self` sitting after position i
        let mut odd_after = 0u32;
        for i in (0..exps.len()).rev() {
            let e = other.exps[i];
            if e > 0 {
                if space.is_odd(i) {
                    if self.exps[i] > 0 {
                        return None;
                    }
                    swaps += odd_after;
                }
                exps[i] = exps[i].checked_add(e).expect("exponent overflow");
            }
            if self.exps[i] > 0 && space.is_odd(i) {
                odd_after += 1;
            }
        }
        Some((Monomial { exps: exps.into_boxed_slice() }, swaps % 2 == 1))
    }

    /// Left derivative by generator `idx`: (multiplicity, result, sign flip).
    pub fn left_derivative(&self, idx: usize, space: &Space) -> Option<(u16, Monomial, bool)> {
        let e = self.exps[idx];
        if e == 0 {
            return None;
        }
        let flip = space.is_odd(idx) && self.odd_count(0..idx, space) % 2 == 1;
        let mut exps = self.exps.clone();
        exps[idx] -= 1;
        Some((e, Monomial { exps }, flip))
    }

    /// Right derivative by generator `idx`.
    pub fn right_derivative(&self, idx: usize, space: &Space) -> Option<(u16, Monomial, bool)> {
        let e = self.exps[idx];
        if e == 0 {
            return None;
        }
        let flip = space.is_odd(idx) && self.odd_count(idx + 1..self.exps.len(), space) % 2 == 1;
        let mut exps = self.exps.clone();
        exps[idx] -= 1;
        Some((e, Monomial { exps }, flip))
    }

    /// Renders as `xi[1]^2*C[1,2]`; the empty product renders as `1`.
    pub fn render(&self, space: &Space) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .factors()
            .map(|(i, e)| if e == 1 { space.var(i).to_string() } else { format!("{}^{}", space.var(i), e) })
            .collect();
        parts.join("*")
    }

    fn odd_count(&self, range: std::ops::Range<usize>, space: &Space) -> u32 {
        range
            .filter(|&i| space.is_odd(i))
            .map(|i| self.exps[i] as u32)
            .sum()
    }
}

/// Brings an arbitrary product of generators into canonical order.
///
/// Returns `None` when an odd generator occurs twice (the product vanishes),
/// otherwise the monomial and whether the reordering is an odd permutation of
/// the odd factors.
pub fn normal_form(space: &Space, factors: &[usize]) -> Option<(Monomial, bool)> {
    let mut exps = vec![0u16; space.len()];
    let mut inversions = 0u32;
    for (pos, &v) in factors.iter().enumerate() {
        if space.is_odd(v) {
            if exps[v] > 0 {
                return None;
            }
            inversions += factors[..pos].iter().filter(|&&u| space.is_odd(u) && u > v).count() as u32;
        }
        exps[v] += 1;
    }
    Some((Monomial::from_exponents(exps), inversions % 2 == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> Space {
        Space::new(vec![0, 1], vec![]).unwrap()
    }

    #[test]
    fn odd_transposition_flips_sign() {
        let s = space();
        let (m, neg) = normal_form(&s, &[s.ghost(1, 1), s.ghost_momentum(1, 1)]).unwrap();
        assert!(neg);
        assert_eq!(m, Monomial::var(&s, s.ghost(1, 1)).mul(&Monomial::var(&s, s.ghost_momentum(1, 1)), &s).unwrap().0);
    }

    #[test]
    fn even_square_and_odd_square() {
        let s = space();
        let (m, neg) = normal_form(&s, &[s.xi(1), s.xi(1)]).unwrap();
        assert!(!neg);
        assert_eq!(m.exponent(s.xi(1)), 2);
        assert!(normal_form(&s, &[s.ghost(1, 1), s.ghost(1, 1)]).is_none());
        // ξ_2 is odd for this space
        assert!(normal_form(&s, &[s.xi(2), s.xi(2)]).is_none());
    }

    #[test]
    fn mul_agrees_with_normal_form() {
        let s = space();
        let a = [s.ghost(1, 2), s.xi(2), s.lagrange_momentum(1)];
        let b = [s.ghost_momentum(2, 1), s.ghost(1, 1), s.xi(1)];
        let (ma, na) = normal_form(&s, &a).unwrap();
        let (mb, nb) = normal_form(&s, &b).unwrap();
        let all: Vec<usize> = a.iter().chain(&b).copied().collect();
        let (mab, nab) = normal_form(&s, &all).unwrap();
        let (prod, np) = ma.mul(&mb, &s).unwrap();
        assert_eq!(prod, mab);
        assert_eq!(na ^ nb ^ np, nab);
    }

    #[test]
    fn derivative_signs() {
        let s = space();
        // C^{1,1} P... order: P_{1,1} < C^{1,1}; both odd
        let (m, _) = normal_form(&s, &[s.ghost_momentum(1, 1), s.ghost(1, 1)]).unwrap();
        let (_, _, flip_l) = m.left_derivative(s.ghost(1, 1), &s).unwrap();
        let (_, _, flip_r) = m.right_derivative(s.ghost(1, 1), &s).unwrap();
        assert!(flip_l);
        assert!(!flip_r);
        let (_, _, flip_l) = m.left_derivative(s.ghost_momentum(1, 1), &s).unwrap();
        let (_, _, flip_r) = m.right_derivative(s.ghost_momentum(1, 1), &s).unwrap();
        assert!(!flip_l);
        assert!(flip_r);
    }

    #[test]
    fn gradings() {
        let s = space();
        let (m, _) = normal_form(&s, &[s.xi(1), s.ghost_momentum(2, 1), s.ghost(2, 1), s.lagrange_momentum(1)]).unwrap();
        assert_eq!(m.n_degree(&s), 2);
        assert_eq!(m.cp_degree(&s), 2);
        assert_eq!(m.ngh(&s), 2);
        // P_{2,1}, C^{2,1} even (ε_2 = 1), π^1 even
        assert_eq!(m.parity(&s), 0);
    }
}
