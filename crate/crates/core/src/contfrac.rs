//! Continued fraction of `y = √f` in `k(x)` and the order of the divisor at infinity.
//!
//! The expansion runs on surd coordinates: `α_r = (√f + b_r) / c_r`. Because
//! `deg(√f - A) < 0` for `A = [√f]`, the partial quotient is exactly
//! `quo(A + b_r, c_r)` and no Laurent series is ever truncated. The divisor
//! `∞₊ - ∞₋` is torsion iff some `c_r` (r ≥ 1) is a nonzero constant; the first
//! such `r` is the quasi-period `m` and the order is `g + 1 + Σ_{i<m} deg a_i`.

use thiserror::Error;

use crate::algebra::{is_squarefree, sqrt_polynomial_part, AlgebraError, Field, Poly};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContFracError {
    #[error("f must have even degree 2g+2 with g >= 1, got degree {0:?}")]
    BadDegree(Option<usize>),
    #[error("f has a repeated root")]
    NotSquarefree,
    #[error("leading coefficient of f is not a square")]
    NonSquareLeading,
    #[error("inexact division in surd recurrence at step {0}")]
    InexactStep(usize),
    #[error("expansion is not periodic within the order bound")]
    NotPeriodic,
    #[error("inconsistent periodic structure: {0}")]
    Inconsistent(String),
    #[error("no skew value is consistent with the quasi-period: {0}")]
    NoSkewValue(String),
    #[error("convergent index {k} out of range (have {available} quotients)")]
    IndexOutOfRange { k: usize, available: usize },
    #[error("p^2 - f q^2 is not a nonzero constant (degree {0:?})")]
    PellNotConstant(Option<usize>),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `α_r = (√f + b) / c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurdState<F: Field> {
    pub b: Poly<F>,
    pub c: Poly<F>,
}

/// A periodic expansion `y = [a₀; a₁, …, a_n, a₁, …]`.
///
/// `quotients` holds one full period `a₁ … a_n`; `a_m = 2γ·a₀` closes the quasi-period.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CfExpansion<F: Field> {
    genus: usize,
    a0: Poly<F>,
    quotients: Vec<Poly<F>>,
    quasi_period: usize,
    period: usize,
    skew: F,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExpansionOutcome<F: Field> {
    Periodic(CfExpansion<F>),
    /// The running order lower bound passed `bound` before a quasi-period appeared.
    NotPeriodicWithinBound {
        steps: usize,
        degree_sum: u64,
        bound: u64,
    },
}

impl<F: Field> ExpansionOutcome<F> {
    pub fn periodic(&self) -> Option<&CfExpansion<F>> {
        match self {
            ExpansionOutcome::Periodic(e) => Some(e),
            ExpansionOutcome::NotPeriodicWithinBound { .. } => None,
        }
    }

    pub fn into_periodic(self) -> Result<CfExpansion<F>, ContFracError> {
        match self {
            ExpansionOutcome::Periodic(e) => Ok(e),
            ExpansionOutcome::NotPeriodicWithinBound { .. } => Err(ContFracError::NotPeriodic),
        }
    }

    pub fn torsion_order(&self) -> Result<u64, ContFracError> {
        self.periodic()
            .map(torsion_order)
            .ok_or(ContFracError::NotPeriodic)
    }
}

impl<F: Field> CfExpansion<F> {
    /// Assembles an expansion from its parts without running the recurrence.
    pub fn from_parts(
        genus: usize,
        a0: Poly<F>,
        quotients: Vec<Poly<F>>,
        quasi_period: usize,
        period: usize,
        skew: F,
    ) -> Self {
        assert!(quasi_period >= 1 && period >= quasi_period && quotients.len() >= period);
        CfExpansion {
            genus,
            a0,
            quotients,
            quasi_period,
            period,
            skew,
        }
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn a0(&self) -> &Poly<F> {
        &self.a0
    }

    /// `a₁ … a_n`.
    pub fn quotients(&self) -> &[Poly<F>] {
        &self.quotients
    }

    /// Partial quotient `a_i`, `i ≥ 0`, extended periodically past `n`.
    pub fn quotient(&self, i: usize) -> &Poly<F> {
        if i == 0 {
            &self.a0
        } else {
            &self.quotients[(i - 1) % self.period]
        }
    }

    pub fn quasi_period(&self) -> usize {
        self.quasi_period
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// γ, with `a_m = 2γ·a₀`.
    pub fn skew(&self) -> &F {
        &self.skew
    }
}

/// Runs the surd recurrence for `√f`, stopping when a quasi-period appears or
/// the order lower bound `(g+1) + Σ deg a_i` exceeds `max_order_bound`.
pub fn expand<F: Field>(
    f: &Poly<F>,
    max_order_bound: u64,
) -> Result<ExpansionOutcome<F>, ContFracError> {
    let deg = f.degree();
    let g = match deg {
        Some(d) if d % 2 == 0 && d >= 4 => d / 2 - 1,
        _ => return Err(ContFracError::BadDegree(deg)),
    };
    if !is_squarefree(f)? {
        return Err(ContFracError::NotSquarefree);
    }
    let a0 = match sqrt_polynomial_part(f) {
        Ok(a) => a,
        Err(AlgebraError::NonSquareLeading) => return Err(ContFracError::NonSquareLeading),
        Err(e) => return Err(e.into()),
    };
    let ctx = f.ctx().clone();

    let start = SurdState {
        b: Poly::zero(&ctx),
        c: Poly::one(&ctx),
    };
    let (_, first) = step(f, &a0, &start, 0)?;
    let mut state = first.clone();
    let mut quotients = Vec::new();
    let mut order = (g + 1) as u64;
    let mut quasi: Option<(usize, F)> = None;

    for r in 1.. {
        if quasi.is_none() && state.c.is_constant() {
            let gamma = state
                .c
                .lc()
                .and_then(F::inv)
                .ok_or(ContFracError::InexactStep(r))?;
            quasi = Some((r, gamma));
        }
        let (a, next) = step(f, &a0, &state, r)?;
        debug_assert!(next.b.degree() <= Some(g + 1) && next.c.degree() <= Some(g + 1));
        let deg_a = a.degree().unwrap_or(0) as u64;
        quotients.push(a);
        match &quasi {
            None => {
                order += deg_a;
                if order > max_order_bound {
                    return Ok(ExpansionOutcome::NotPeriodicWithinBound {
                        steps: r,
                        degree_sum: order,
                        bound: max_order_bound,
                    });
                }
            }
            Some((m, gamma)) => {
                if next == first {
                    let e = close_period(g, a0, quotients, *m, r, gamma.clone())?;
                    return Ok(ExpansionOutcome::Periodic(e));
                }
                if r >= 2 * m {
                    return Err(ContFracError::Inconsistent(format!(
                        "no period within {} steps after quasi-period {m}",
                        2 * m
                    )));
                }
            }
        }
        state = next;
    }
    unreachable!("the expansion loop only exits by returning")
}

/// One step of the recurrence from `(b_r, c_r)`: returns `a_r` and `(b_{r+1}, c_{r+1})`.
fn step<F: Field>(
    f: &Poly<F>,
    a0: &Poly<F>,
    s: &SurdState<F>,
    r: usize,
) -> Result<(Poly<F>, SurdState<F>), ContFracError> {
    let (a, _) = (a0 + &s.b).divrem(&s.c)?;
    let b = &(&a * &s.c) - &s.b;
    let c = (f - &(&b * &b))
        .exact_div(&s.c)
        .map_err(|_| ContFracError::InexactStep(r))?;
    if c.is_zero() {
        // f would be a perfect square
        return Err(ContFracError::InexactStep(r));
    }
    Ok((a, SurdState { b, c }))
}

fn close_period<F: Field>(
    genus: usize,
    a0: Poly<F>,
    quotients: Vec<Poly<F>>,
    m: usize,
    n: usize,
    skew: F,
) -> Result<CfExpansion<F>, ContFracError> {
    let two_gamma = F::from_i64(2, a0.ctx()) * &skew;
    if quotients[m - 1] != a0.scale(&two_gamma) {
        return Err(ContFracError::Inconsistent(format!("a_{m} is not 2γ·a₀")));
    }
    let consistent = if skew.is_one() {
        n == m
    } else {
        n == 2 * m && m % 2 == 1
    };
    if !consistent {
        return Err(ContFracError::Inconsistent(format!(
            "quasi-period {m}, period {n}, skew {skew}"
        )));
    }
    Ok(CfExpansion {
        genus,
        a0,
        quotients,
        quasi_period: m,
        period: n,
        skew,
    })
}

/// `(g + 1) + Σ_{i=1}^{m-1} deg a_i`.
pub fn torsion_order<F: Field>(e: &CfExpansion<F>) -> u64 {
    let inner: usize = e.quotients[..e.quasi_period - 1]
        .iter()
        .map(|a| a.degree().unwrap_or(0))
        .sum();
    (e.genus + 1 + inner) as u64
}

/// Which alternation of γ^{±1} the inner palindrome follows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkewPattern {
    /// γ = 1 (or no inner quotients): a true palindrome.
    Palindrome,
    /// `a_{m-i} = γ^{+1}·a_i` for odd `i`, `γ^{-1}·a_i` for even `i`.
    OddForward,
    /// `a_{m-i} = γ^{-1}·a_i` for odd `i`, `γ^{+1}·a_i` for even `i`.
    OddInverse,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewReport<F: Field> {
    pub gamma: F,
    pub pattern: SkewPattern,
}

/// Checks the γ-twisted palindrome `a_{m-i} = γ^{±1} a_i` on `(a₁, …, a_{m-1})`
/// together with `a_m = 2γ·a₀`, and returns γ.
pub fn check_skew_symmetry<F: Field>(e: &CfExpansion<F>) -> Result<SkewReport<F>, ContFracError> {
    let m = e.quasi_period;
    let a_m = e.quotient(m);
    let lc0 =
        e.a0.lc()
            .ok_or_else(|| ContFracError::NoSkewValue("a₀ is zero".into()))?;
    let lcm = a_m
        .lc()
        .ok_or_else(|| ContFracError::NoSkewValue("a_m is zero".into()))?;
    let two = F::from_i64(2, e.a0.ctx());
    let gamma = lcm.div(&(two.clone() * lc0)).expect("nonzero");
    if *a_m != e.a0.scale(&(two * &gamma)) {
        return Err(ContFracError::NoSkewValue(format!(
            "a_{m} is not a constant multiple of 2a₀"
        )));
    }
    let gamma_inv = gamma.inv().expect("nonzero γ");

    let mut ratios = Vec::with_capacity(m.saturating_sub(1));
    for i in 1..m {
        let (ai, aj) = (e.quotient(i), e.quotient(m - i));
        let rho = match (ai.lc(), aj.lc()) {
            (Some(x), Some(y)) => y.div(x).expect("nonzero"),
            _ => return Err(ContFracError::NoSkewValue(format!("a_{i} is zero"))),
        };
        if *aj != ai.scale(&rho) {
            return Err(ContFracError::NoSkewValue(format!(
                "a_{} is not a constant multiple of a_{i}",
                m - i
            )));
        }
        ratios.push(rho);
    }

    let matches = |odd: &F, even: &F| {
        ratios
            .iter()
            .enumerate()
            .all(|(k, rho)| if k % 2 == 0 { rho == odd } else { rho == even })
    };
    let pattern = if gamma.is_one() && ratios.iter().all(F::is_one) {
        SkewPattern::Palindrome
    } else if matches(&gamma_inv, &gamma) {
        SkewPattern::OddInverse
    } else if matches(&gamma, &gamma_inv) {
        SkewPattern::OddForward
    } else {
        return Err(ContFracError::NoSkewValue(format!(
            "ratios {ratios:?} do not alternate between γ = {gamma} and its inverse"
        )));
    };
    Ok(SkewReport { gamma, pattern })
}

/// `p_k / q_k = [a₀; a₁, …, a_k]`.
pub fn convergents<F: Field>(
    e: &CfExpansion<F>,
    k: usize,
) -> Result<(Poly<F>, Poly<F>), ContFracError> {
    if k > e.quotients.len() {
        return Err(ContFracError::IndexOutOfRange {
            k,
            available: e.quotients.len(),
        });
    }
    let ctx = e.a0.ctx();
    let (mut p_prev, mut q_prev) = (Poly::one(ctx), Poly::zero(ctx));
    let (mut p, mut q) = (e.a0.clone(), Poly::one(ctx));
    for a in &e.quotients[..k] {
        let p_next = &(a * &p) + &p_prev;
        let q_next = &(a * &q) + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
    }
    Ok((p, q))
}

/// Verifies `p² - f·q²` is a nonzero constant for the convergent at `m - 1`
/// and returns that constant. `deg p` is then the torsion order.
pub fn pell_check<F: Field>(f: &Poly<F>, e: &CfExpansion<F>) -> Result<F, ContFracError> {
    let (p, q) = convergents(e, e.quasi_period - 1)?;
    let c = &(&p * &p) - &(f * &(&q * &q));
    match c.degree() {
        Some(0) => Ok(c.lc().unwrap().clone()),
        d => Err(ContFracError::PellNotConstant(d)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PeriodStructure {
    pub quasi_period: usize,
    pub period: usize,
    pub strict: bool,
}

pub fn period_structure<F: Field>(e: &CfExpansion<F>) -> PeriodStructure {
    let strict = !e.skew.is_one();
    let (m, n) = (e.quasi_period, e.period);
    if strict {
        assert!(
            n == 2 * m && m % 2 == 1,
            "strict quasi-period {m} with period {n}"
        );
    } else {
        assert_eq!(n, m);
    }
    PeriodStructure {
        quasi_period: m,
        period: n,
        strict,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Fp, PrimeField, Rational};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(c: &[i64]) -> Poly<Rational> {
        Poly::from_i64s(c, &())
    }

    fn x4_plus_1() -> CfExpansion<Rational> {
        expand(&q(&[1, 0, 0, 0, 1]), 100)
            .unwrap()
            .into_periodic()
            .unwrap()
    }

    #[test]
    fn x4_plus_1_expansion() {
        let e = x4_plus_1();
        assert_eq!(e.a0(), &q(&[0, 0, 1]));
        assert_eq!(e.quotients(), &[q(&[0, 0, 2])]);
        assert_eq!((e.quasi_period(), e.period()), (1, 1));
        assert!(e.skew().is_one());
        assert_eq!(torsion_order(&e), 2);
        assert_eq!(
            period_structure(&e),
            PeriodStructure {
                quasi_period: 1,
                period: 1,
                strict: false
            }
        );
        let s = check_skew_symmetry(&e).unwrap();
        assert_eq!((s.gamma, s.pattern), (rat(1), SkewPattern::Palindrome));
    }

    #[test]
    fn x4_plus_1_convergents_and_pell() {
        let e = x4_plus_1();
        assert_eq!(convergents(&e, 0).unwrap(), (q(&[0, 0, 1]), q(&[1])));
        assert_eq!(
            convergents(&e, 1).unwrap(),
            (q(&[1, 0, 0, 0, 2]), q(&[0, 0, 2]))
        );
        assert!(matches!(
            convergents(&e, 2),
            Err(ContFracError::IndexOutOfRange { .. })
        ));
        assert_eq!(pell_check(&q(&[1, 0, 0, 0, 1]), &e).unwrap(), rat(-1));
    }

    #[test]
    fn non_torsion_elliptic_stops_at_bound() {
        let out = expand(&q(&[2, 1, 0, 0, 1]), 13).unwrap();
        assert!(matches!(
            out,
            ExpansionOutcome::NotPeriodicWithinBound { bound: 13, .. }
        ));
        assert_eq!(out.torsion_order(), Err(ContFracError::NotPeriodic));
    }

    #[test]
    fn precondition_errors() {
        assert!(matches!(
            expand(&q(&[1, 0, 0, 1]), 10),
            Err(ContFracError::BadDegree(Some(3)))
        ));
        assert!(matches!(
            expand(&q(&[1, 0, 1]), 10),
            Err(ContFracError::BadDegree(Some(2)))
        ));
        assert_eq!(
            expand(&q(&[1, 0, 0, 0, 2]), 10),
            Err(ContFracError::NonSquareLeading)
        );
        // (x^2+1)^2
        assert_eq!(
            expand(&q(&[1, 0, 2, 0, 1]), 10),
            Err(ContFracError::NotSquarefree)
        );
    }

    #[test]
    fn scaled_sequence_skew() {
        // m = 3: (a1, a2 = 3 a1), a3 = 2·3·a0
        let a0 = q(&[0, 0, 1]);
        let a1 = q(&[1, 1]);
        let a2 = a1.scale(&rat(3));
        let a3 = a0.scale(&rat(6));
        let e = CfExpansion::from_parts(1, a0.clone(), vec![a1.clone(), a2, a3], 3, 3, rat(3));
        let s = check_skew_symmetry(&e).unwrap();
        assert_eq!(s.gamma, rat(3));
        assert_eq!(s.pattern, SkewPattern::OddForward);
        // the alternation produced by real expansions: a_{m-1} = γ^{-1} a_1
        let a2 = a1.scale(&Rational::new(1.into(), 3.into()));
        let e =
            CfExpansion::from_parts(1, a0.clone(), vec![a1, a2, a0.scale(&rat(6))], 3, 3, rat(3));
        assert_eq!(
            check_skew_symmetry(&e).unwrap().pattern,
            SkewPattern::OddInverse
        );
    }

    #[test]
    fn broken_palindrome_is_rejected() {
        let a0 = q(&[0, 0, 1]);
        let e = CfExpansion::from_parts(
            1,
            a0.clone(),
            vec![q(&[1, 1]), q(&[2, 1]), a0.scale(&rat(2))],
            3,
            3,
            rat(1),
        );
        assert!(matches!(
            check_skew_symmetry(&e),
            Err(ContFracError::NoSkewValue(_))
        ));
    }

    fn random_admissible_fp(rng: &mut ChaCha8Rng, k: &PrimeField, g: usize) -> Poly<Fp> {
        loop {
            let mut c: Vec<i64> = (0..2 * g + 2)
                .map(|_| rng.gen_range(0..k.modulus() as i64))
                .collect();
            let lead = rng.gen_range(1..k.modulus() as i64);
            c.push(lead * lead);
            let f = Poly::<Fp>::from_i64s(&c, k);
            if crate::algebra::is_squarefree(&f).unwrap() {
                return f;
            }
        }
    }

    #[test]
    fn prime_field_expansions_terminate_with_consistent_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut strict_seen = 0;
        for (p, max_g) in [(3u64, 3), (5, 3), (7, 3), (11, 2), (13, 2)] {
            let k = PrimeField::new(p).unwrap();
            for g in 1..=max_g {
                for _ in 0..25 {
                    let f = random_admissible_fp(&mut rng, &k, g);
                    let e = expand(&f, u64::MAX).unwrap().into_periodic().unwrap();
                    let ps = period_structure(&e);
                    strict_seen += ps.strict as usize;
                    let s = check_skew_symmetry(&e).unwrap();
                    assert_eq!(&s.gamma, e.skew());
                    if ps.strict && *e.skew() != -Fp::one(&k) && e.quasi_period() > 1 {
                        assert_eq!(s.pattern, SkewPattern::OddInverse);
                    }
                    assert_eq!(e.a0().degree(), Some(g + 1));
                    for a in &e.quotients()[..e.quasi_period() - 1] {
                        let d = a.degree().unwrap();
                        assert!((1..=g).contains(&d), "deg a_i = {d}, g = {g}");
                    }
                    let pell = pell_check(&f, &e).unwrap();
                    assert!(!pell.is_zero());
                    let (p_conv, _) = convergents(&e, e.quasi_period() - 1).unwrap();
                    assert_eq!(p_conv.degree().unwrap() as u64, torsion_order(&e));
                }
            }
        }
        assert!(
            strict_seen > 0,
            "sample should contain strict quasi-periods"
        );
    }

    #[test]
    fn order_invariant_under_translation() {
        // x^4 + 1 and a genus-3 curve with a torsion point at infinity.
        let ct = {
            let a1 = q(&[1, 0, 1]);
            let inner = &(&(&a1 * &a1).scale(&rat(2)) + &a1) + &q(&[1]);
            &(&inner * &inner) + &(&a1.scale(&rat(8)) + &q(&[4]))
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for f in [q(&[1, 0, 0, 0, 1]), ct] {
            let base = expand(&f, 200).unwrap().torsion_order().unwrap();
            for _ in 0..25 {
                let c = Rational::new(rng.gen_range(-20..=20).into(), rng.gen_range(1..=6).into());
                let shifted = f.translate(&c);
                assert_eq!(
                    expand(&shifted, 200).unwrap().torsion_order().unwrap(),
                    base
                );
            }
        }
    }
}
