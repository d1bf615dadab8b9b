//! Seeded randomized check of the operator identities on random elements of
//! 𝒱 (and of Sⁿ). Everything is exact, so each identity either holds or
//! produces a concrete counterexample.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{int, rat, GradedPoly, Monomial, Space};
use crate::operators::{Calculus, OperatorError, SymTensor};

/// Parameters of a randomized identity run.
#[derive(Clone, Debug)]
pub struct IdentityConfig {
    /// Bound on both the N-degree and the cp-degree of sampled terms.
    pub degree: u32,
    pub samples: usize,
    pub seed: u64,
    /// Maximum number of terms per sampled polynomial.
    pub max_terms: usize,
}

impl Default for IdentityConfig {
    fn default() -> Self {
        IdentityConfig { degree: 4, samples: 100, seed: 7, max_terms: 3 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub config_line: String,
    pub outcomes: Vec<IdentityOutcome>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.failures == 0 && o.checked > 0)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.config_line)?;
        for o in &self.outcomes {
            let status = if o.failures == 0 { "PASS" } else { "FAIL" };
            writeln!(f, "{status} {:<44} {:>4} checked, {} failed", o.name, o.checked, o.failures)?;
            if let Some(w) = &o.first_failure {
                writeln!(f, "     first failure: {w}")?;
            }
        }
        Ok(())
    }
}

/// Random element generator over a space.
pub struct Sampler<'a> {
    space: &'a Space,
    rng: ChaCha8Rng,
    degree: u32,
    max_terms: usize,
}

impl<'a> Sampler<'a> {
    pub fn new(space: &'a Space, seed: u64, degree: u32, max_terms: usize) -> Sampler<'a> {
        Sampler { space, rng: ChaCha8Rng::seed_from_u64(seed), degree, max_terms }
    }

    /// A monomial with the given N- and cp-degree (plus an optional physical
    /// factor), or `None` if the odd generators collide.
    fn monomial(&mut self, n_deg: u32, cp_deg: u32) -> Option<Monomial> {
        let s = self.space;
        let n_vars: Vec<usize> = (0..s.len()).filter(|&i| s.counts_n(i)).collect();
        let cp_vars: Vec<usize> = (0..s.len()).filter(|&i| s.counts_cp(i)).collect();
        let mut exps = vec![0u16; s.len()];
        for (pool, count) in [(&n_vars, n_deg), (&cp_vars, cp_deg)] {
            for _ in 0..count {
                let &v = pool.choose(&mut self.rng)?;
                if s.is_odd(v) && exps[v] > 0 {
                    return None;
                }
                exps[v] += 1;
            }
        }
        if s.n_physical() > 0 && self.rng.gen_bool(0.3) {
            let v = s.xip(self.rng.gen_range(1..=s.n_physical()));
            if !(s.is_odd(v) && exps[v] > 0) {
                exps[v] += 1;
            }
        }
        Some(Monomial::from_exponents(exps))
    }

    /// A random polynomial in 𝒱 with N-degree in 1..=degree and cp-degree in
    /// 0..=degree, mixing parities.
    pub fn poly(&mut self) -> GradedPoly {
        loop {
            let terms = self.rng.gen_range(1..=self.max_terms);
            let mut p = GradedPoly::zero();
            for _ in 0..terms {
                let n_deg = self.rng.gen_range(1..=self.degree.max(1));
                let cp_deg = self.rng.gen_range(0..=self.degree);
                if let Some(m) = self.monomial(n_deg, cp_deg) {
                    let num = loop {
                        let v: i64 = self.rng.gen_range(-5..=5);
                        if v != 0 {
                            break v;
                        }
                    };
                    let den = self.rng.gen_range(1..=3);
                    p.add_term(m, rat(num, den));
                }
            }
            if !p.is_zero() {
                return p;
            }
        }
    }

    /// A random symmetric tensor of the given rank with components in 𝒱.
    pub fn tensor(&mut self, rank: usize) -> SymTensor {
        SymTensor::from_symmetric(rank, |_| self.poly())
    }
}

type Check<'a> = Box<dyn FnMut(&mut Sampler) -> Result<Option<String>, OperatorError> + 'a>;

/// Runs every operator identity `config.samples` times on a space.
pub fn run_identity_suite(space: &Space, config: &IdentityConfig) -> IdentityReport {
    let calc = Calculus::new(space);
    let c = &calc;
    let mut sampler = Sampler::new(space, config.seed, config.degree, config.max_terms);
    let diff = |lhs: &SymTensor, rhs: &SymTensor| -> Option<String> {
        (lhs != rhs).then(|| format!("difference {}", lhs.sub(rhs).render(space, "D").trim_end().replace('\n', "; ")))
    };
    let diffp = |lhs: &GradedPoly, rhs: &GradedPoly| -> Option<String> {
        (lhs != rhs).then(|| format!("difference {}", crate::io::serialize(space, &(lhs - rhs))))
    };
    // M^n = (2^{n-1}-1) N^{n-2} M² - (2^{n-1}-2) N^{n-1} M
    let m_power = move |n: u32| -> Check {
        Box::new(move |s: &mut Sampler| {
            let x = s.poly();
            let mut lhs = x.clone();
            for _ in 0..n {
                lhs = c.m_comp(&lhs);
            }
            let m1 = c.m_comp(&x);
            let m2 = c.m_comp(&m1);
            let a = int((1 << (n - 1)) - 1);
            let b = int((1 << (n - 1)) - 2);
            let rhs = &c.n_pow_comp(&m2, n as i32 - 2)?.scale(&a) - &c.n_pow_comp(&m1, n as i32 - 1)?.scale(&b);
            Ok(diffp(&lhs, &rhs))
        })
    };
    // (ΓW + WΓ)X = (nN + M)X on Sⁿ
    let homotopy = move |n: usize| -> Check {
        Box::new(move |s: &mut Sampler| {
            let x = s.tensor(n);
            let lhs = c.gamma(&c.w(&x)?).add(&c.w_or_zero(&c.gamma(&x), n)?);
            let rhs = c.n(&x).scale(&int(n as i64)).add(&c.m(&x));
            Ok(diff(&lhs, &rhs))
        })
    };

    let mut checks: Vec<(&'static str, Check)> = vec![
        (
            "W^{a}W^{b} + W^{b}W^{a} = 0",
            Box::new(|s| {
                let x = s.poly();
                for (a, b) in [(1, 1), (1, 2), (2, 2)] {
                    let v = &c.w_comp(a, &c.w_comp(b, &x)) + &c.w_comp(b, &c.w_comp(a, &x));
                    if !v.is_zero() {
                        return Ok(Some(format!("a={a} b={b}: {}", crate::io::serialize(space, &v))));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "Gamma_{a}Gamma_{b} + Gamma_{b}Gamma_{a} = 0",
            Box::new(|s| {
                let x = s.poly();
                for (a, b) in [(1, 1), (1, 2), (2, 2)] {
                    let v = &c.gamma_comp(a, &c.gamma_comp(b, &x)) + &c.gamma_comp(b, &c.gamma_comp(a, &x));
                    if !v.is_zero() {
                        return Ok(Some(format!("a={a} b={b}: {}", crate::io::serialize(space, &v))));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "W^a Gamma_b + Gamma_b W^a = delta^a_b N",
            Box::new(|s| {
                let x = s.poly();
                for a in 1..=2 {
                    for b in 1..=2 {
                        let lhs = &c.w_comp(a, &c.gamma_comp(b, &x)) + &c.gamma_comp(b, &c.w_comp(a, &x));
                        let rhs = if a == b { c.n_comp(&x) } else { GradedPoly::zero() };
                        if let Some(d) = diffp(&lhs, &rhs) {
                            return Ok(Some(format!("a={a} b={b}: {d}")));
                        }
                    }
                }
                Ok(None)
            }),
        ),
        (
            "NW = WN, N Gamma = Gamma N",
            Box::new(|s| {
                let x = s.poly();
                for a in 1..=2 {
                    if let Some(d) = diffp(&c.n_comp(&c.w_comp(a, &x)), &c.w_comp(a, &c.n_comp(&x))) {
                        return Ok(Some(d));
                    }
                    if let Some(d) = diffp(&c.n_comp(&c.gamma_comp(a, &x)), &c.gamma_comp(a, &c.n_comp(&x))) {
                        return Ok(Some(d));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "M^2 W^a = N M W^a, Gamma_a M^2 = N Gamma_a M",
            Box::new(|s| {
                let x = s.poly();
                for a in 1..=2 {
                    let wx = c.w_comp(a, &x);
                    let mwx = c.m_comp(&wx);
                    if let Some(d) = diffp(&c.m_comp(&mwx), &c.n_comp(&mwx)) {
                        return Ok(Some(d));
                    }
                    let mx = c.m_comp(&x);
                    if let Some(d) = diffp(&c.gamma_comp(a, &c.m_comp(&mx)), &c.n_comp(&c.gamma_comp(a, &mx))) {
                        return Ok(Some(d));
                    }
                }
                Ok(None)
            }),
        ),
        ("M^3 reduction", m_power(3)),
        ("M^4 reduction", m_power(4)),
        ("M^5 reduction", m_power(5)),
        (
            "W^2 = 0, Gamma^2 = 0 on S^0, S^1",
            Box::new(|s| {
                for n in 0..=1 {
                    let x = s.tensor(n);
                    if !c.w(&c.w(&x)?)?.is_zero() {
                        return Ok(Some(format!("W^2 != 0 on S^{n}")));
                    }
                    let y = s.tensor(n + 2);
                    if !c.gamma(&c.gamma(&y)).is_zero() {
                        return Ok(Some(format!("Gamma^2 != 0 on S^{}", n + 2)));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "WM = (M+N)W, Gamma M = (M-N)Gamma",
            Box::new(|s| {
                for n in 0..=1 {
                    let x = s.tensor(n);
                    let wx = c.w(&x)?;
                    if let Some(d) = diff(&c.w(&c.m(&x))?, &c.m(&wx).add(&c.n(&wx))) {
                        return Ok(Some(format!("WM on S^{n}: {d}")));
                    }
                    let y = s.tensor(n + 1);
                    let gy = c.gamma(&y);
                    if let Some(d) = diff(&c.gamma(&c.m(&y)), &c.m(&gy).sub(&c.n(&gy))) {
                        return Ok(Some(format!("Gamma M on S^{}: {d}", n + 1)));
                    }
                }
                Ok(None)
            }),
        ),
        ("(Gamma W + W Gamma) = (nN+M) on S^0", homotopy(0)),
        ("(Gamma W + W Gamma) = (nN+M) on S^1", homotopy(1)),
        ("(Gamma W + W Gamma) = (nN+M) on S^2", homotopy(2)),
        (
            "Q (nN+M) = 1 on S^1, S^2",
            Box::new(|s| {
                for n in 1..=2 {
                    let x = s.tensor(n);
                    let y = c.n(&x).scale(&int(n as i64)).add(&c.m(&x));
                    if let Some(d) = diff(&c.q(&y)?, &x) {
                        return Ok(Some(format!("n={n}: {d}")));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "W W+ W = W on S^0, S^1",
            Box::new(|s| {
                for n in 0..=1 {
                    let x = s.tensor(n);
                    let wx = c.w(&x)?;
                    if let Some(d) = diff(&c.w(&c.w_plus(&wx)?)?, &wx) {
                        return Ok(Some(format!("S^{n}: {d}")));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "(W+)^2 = 0 on S^2, S^3",
            Box::new(|s| {
                for n in 2..=3 {
                    let x = s.tensor(n);
                    let v = c.w_plus(&c.w_plus(&x)?)?;
                    if !v.is_zero() {
                        return Ok(Some(format!("S^{n}: {}", v.render(space, "D").trim_end())));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "X = W+WX + WW+X on S^1, S^2",
            Box::new(|s| {
                for n in 1..=2 {
                    let x = s.tensor(n);
                    let (a, b) = c.decompose(&x)?;
                    if let Some(d) = diff(&a.add(&b), &x) {
                        return Ok(Some(format!("S^{n}: {d}")));
                    }
                }
                Ok(None)
            }),
        ),
        (
            "barW barGamma - barGamma barW = 4N^2 - 4MN",
            Box::new(|s| {
                let x = s.poly();
                let lhs = &c.bar_w(&c.bar_gamma(&x)) - &c.bar_gamma(&c.bar_w(&x));
                let nx = c.n_comp(&x);
                let rhs = &c.n_comp(&nx).scale(&int(4)) - &c.m_comp(&nx).scale(&int(4));
                Ok(diffp(&lhs, &rhs))
            }),
        ),
        (
            "X = M N^-1 X + 1/4 (barW barGamma - barGamma barW) N^-2 X",
            Box::new(|s| {
                let x = s.poly();
                let parts = c.bar_ops(&x)?;
                Ok(diffp(&(&parts.m_part + &parts.bar_part), &x))
            }),
        ),
        (
            "barGamma W+ = 0 on S^1",
            Box::new(|s| {
                let y = s.tensor(1);
                let v = c.bar_gamma(c.w_plus(&y)?.as_scalar());
                Ok((!v.is_zero()).then(|| crate::io::serialize(space, &v)))
            }),
        ),
        (
            "gradings: W raises ngh by 1, Gamma lowers by 1",
            Box::new(|s| {
                let x = s.poly();
                let sp = c.space();
                for (m, _) in x.terms() {
                    let t = GradedPoly::term(m.clone(), int(1));
                    let (g0, p0) = (m.ngh(sp), m.parity(sp));
                    for a in 1..=2 {
                        for (img, dn) in [(c.w_comp(a, &t), 1), (c.gamma_comp(a, &t), -1)] {
                            for (mm, _) in img.terms() {
                                if mm.ngh(sp) != g0 + dn || mm.parity(sp) == p0 {
                                    return Ok(Some(format!("term {}", m.render(sp))));
                                }
                            }
                        }
                        for img in [c.m_comp(&t), c.q_comp(1, &t)?, c.v_comp(1, &t)?] {
                            for (mm, _) in img.terms() {
                                if mm.ngh(sp) != g0 || mm.parity(sp) != p0 {
                                    return Ok(Some(format!("term {}", m.render(sp))));
                                }
                            }
                        }
                    }
                }
                Ok(None)
            }),
        ),
    ];

    let mut outcomes = Vec::new();
    for (name, check) in checks.iter_mut() {
        let mut outcome = IdentityOutcome { name, checked: 0, failures: 0, first_failure: None };
        for _ in 0..config.samples {
            outcome.checked += 1;
            let res = check(&mut sampler);
            let failure = match res {
                Ok(None) => None,
                Ok(Some(w)) => Some(w),
                Err(e) => Some(format!("operator error: {e}")),
            };
            if let Some(w) = failure {
                outcome.failures += 1;
                outcome.first_failure.get_or_insert(w);
            }
        }
        outcomes.push(outcome);
    }
    IdentityReport {
        config_line: format!(
            "identity suite: m={} parities={:?}, degree<={}, samples={}, seed={}",
            space.m(),
            space.constraint_parities(),
            config.degree,
            config.samples,
            config.seed
        ),
        outcomes,
    }
}

/// How one of the literature's printed closed forms fares on random input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrintedFormCheck {
    pub name: &'static str,
    pub checked: usize,
    pub held: usize,
    pub counterexample: Option<String>,
}

impl fmt::Display for PrintedFormCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: held on {}/{} samples", self.name, self.held, self.checked)?;
        if let Some(c) = &self.counterexample {
            write!(f, "; counterexample {c}")?;
        }
        Ok(())
    }
}

/// Evaluates three commonly quoted closed forms that disagree with the
/// operator algebra implemented here:
///
/// * W̄Γ̄ - Γ̄W̄ = 4N² - 2MN (the algebra forces 4N² - 4MN),
/// * x = ½MN⁻¹x + ¼(W̄Γ̄ - Γ̄W̄)N⁻²x,
/// * X = W⁺WX + W V W⁺X with V the closed form of [`Calculus::v_comp`].
///
/// Each entry records how often the statement held and one counterexample.
pub fn check_printed_forms(space: &Space, config: &IdentityConfig) -> Vec<PrintedFormCheck> {
    let c = Calculus::new(space);
    let mut sampler = Sampler::new(space, config.seed, config.degree, config.max_terms);
    let mut out = vec![
        PrintedFormCheck { name: "barW barGamma - barGamma barW = 4N^2 - 2MN", checked: 0, held: 0, counterexample: None },
        PrintedFormCheck { name: "X = 1/2 M N^-1 X + 1/4 (barW barGamma - barGamma barW) N^-2 X", checked: 0, held: 0, counterexample: None },
        PrintedFormCheck { name: "X = W+WX + W V W+X with closed-form V", checked: 0, held: 0, counterexample: None },
    ];
    let mut record = |i: usize, holds: bool, what: String| {
        out[i].checked += 1;
        if holds {
            out[i].held += 1;
        } else {
            out[i].counterexample.get_or_insert(what);
        }
    };
    for _ in 0..config.samples {
        let x = sampler.poly();
        let shown = crate::io::serialize(space, &x);
        let nx = c.n_comp(&x);
        let lhs = &c.bar_w(&c.bar_gamma(&x)) - &c.bar_gamma(&c.bar_w(&x));
        let rhs = &c.n_comp(&nx).scale(&int(4)) - &c.m_comp(&nx).scale(&int(2));
        record(0, lhs == rhs, format!("x = {shown}"));
        if let Ok(parts) = c.bar_ops(&x) {
            let half = c.n_pow_comp(&c.m_comp(&x), -1).map(|p| p.scale(&rat(1, 2)));
            let holds = half.map(|h| &h + &parts.bar_part == x).unwrap_or(false);
            record(1, holds, format!("x = {shown}"));
        }
        let t = sampler.tensor(1);
        let rebuilt = c
            .w_plus(&t)
            .and_then(|wp| c.v(&wp, 1))
            .and_then(|v| c.w(&v))
            .and_then(|second| Ok(c.w_plus(&c.w(&t)?)?.add(&second)));
        let holds = rebuilt.map(|r| r == t).unwrap_or(false);
        record(2, holds, format!("X = ({}, {})", crate::io::serialize(space, t.component(&[1])), crate::io::serialize(space, t.component(&[2]))));
    }
    out
}

impl Calculus<'_> {
    /// W on a tensor of rank `n - 1`, or zero when n = 0 (ΓX = 0 on S⁰).
    fn w_or_zero(&self, x: &SymTensor, n: usize) -> Result<SymTensor, OperatorError> {
        if n == 0 {
            Ok(SymTensor::zero(0))
        } else {
            self.w(x)
        }
    }
}

/// The space used by the default suite: one bosonic and one fermionic
/// constraint plus one bosonic physical coordinate.
pub fn default_space() -> Space {
    Space::new(vec![0, 1], vec![0]).expect("valid parities")
}
