//! Frobenius cycle types and a Dedekind/Jordan certificate that a Galois group
//! is the full symmetric or alternating group.
//!
//! The criterion is sound but incomplete. A degree-`n` polynomial gets an
//! `S_n` verdict once three cycle types have been seen at unramified primes:
//!
//! * `[n]`, so the group is transitive;
//! * a type with exactly one part `2` and every other part odd, whose suitable
//!   power is a transposition;
//! * a type with a prime part `q > n/2`, whose suitable power is a `q`-cycle.
//!   A transitive group containing such a cycle is primitive, and a primitive
//!   group with a transposition is `S_n`.
//!
//! When `disc(f)` is a square the transposition can never appear; then a
//! 3-cycle witness (one part `3`, no other part divisible by 3) together with
//! primitivity gives `A_n` by Jordan's theorem.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    discriminant, encode_coeffs, is_prime, is_squarefree, reduce_mod_p, AlgebraError, Field, Fp,
    FpPoly, Poly, PrimeField, QPoly,
};
use crate::construct::HyperellipticCurve;

pub const DEFAULT_PRIME_BOUND: u64 = 1000;

const EDF_SEED: u64 = 0x5eed_0fed;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("polynomial must have degree at least 2, got {0:?}")]
    DegreeTooSmall(Option<usize>),
    #[error("polynomial is not squarefree over Q")]
    NotSquarefree,
    #[error("the criterion needs deg r = 1, got {0}")]
    CriterionInapplicable(usize),
    #[error("curve has no (a1, r, u) decomposition attached")]
    NoConstruction,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Degrees of the irreducible factors of `f mod p`, largest first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleTypeSample {
    pub p: u64,
    #[serde(rename = "type")]
    pub cycle_type: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "S_n")]
    SymmetricGroup,
    #[serde(rename = "A_n")]
    AlternatingGroup,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisCertificate {
    pub verdict: Verdict,
    pub n: usize,
    pub witnesses: Vec<CycleTypeSample>,
    pub disc_square: bool,
}

/// Distinct-degree factorization of a monic squarefree `f`: pairs `(d, g)` where
/// `g` is the product of all irreducible factors of degree `d`.
pub fn distinct_degree_factorization(f: &FpPoly) -> Vec<(usize, FpPoly)> {
    let k = *f.ctx();
    let p = k.modulus() as u128;
    let x = Poly::x(&k);
    let mut rest = f.monic();
    let mut h = x.clone();
    let mut out = Vec::new();
    let mut d = 0;
    while rest.degree().unwrap_or(0) >= 2 * (d + 1) {
        d += 1;
        h = h.pow_mod(p, &rest);
        let g = (&h - &x).gcd(&rest);
        if !g.is_one() {
            rest = rest.exact_div(&g).expect("gcd divides");
            h = h.rem(&rest).expect("nonzero");
            out.push((d, g));
        }
    }
    if let Some(r) = rest.degree().filter(|&r| r > 0) {
        out.push((r, rest));
    }
    out
}

/// Splits a product of distinct monic irreducibles of common degree `d`.
pub fn equal_degree_factorization(g: &FpPoly, d: usize, rng: &mut impl Rng) -> Vec<FpPoly> {
    let n = g.degree().expect("nonzero");
    if n == d {
        return vec![g.monic()];
    }
    let k = *g.ctx();
    let p = k.modulus();
    loop {
        let a = Poly::new((0..n).map(|_| k.elem(rng.gen_range(0..p))).collect(), k);
        if a.degree().is_none_or(|da| da == 0) {
            continue;
        }
        let b = if p == 2 {
            // trace a + a² + … + a^{2^{d-1}}
            let mut t = a.clone();
            let mut s = a.clone();
            for _ in 1..d {
                t = t.mul_mod(&t, g);
                s = &s + &t;
            }
            s
        } else {
            // a^{(p^d - 1)/2} = (a · a^p ⋯ a^{p^{d-1}})^{(p-1)/2}
            let mut frob = a.clone();
            let mut norm = a.clone();
            for _ in 1..d {
                frob = frob.pow_mod(p as u128, g);
                norm = norm.mul_mod(&frob, g);
            }
            &norm.pow_mod(((p - 1) / 2) as u128, g) - &Poly::one(&k)
        };
        let h = b.gcd(g);
        if h.degree().is_some_and(|dh| dh > 0 && dh < n) {
            let other = g.exact_div(&h).expect("gcd divides");
            let mut out = equal_degree_factorization(&h, d, rng);
            out.extend(equal_degree_factorization(&other, d, rng));
            return out;
        }
    }
}

/// Monic irreducible factors of `f`, sorted by degree then coefficients, or
/// `None` when `f` is constant or not squarefree.
pub fn factor_squarefree(f: &FpPoly) -> Option<Vec<FpPoly>> {
    if !is_squarefree(f).ok()? {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(EDF_SEED);
    let mut out: Vec<FpPoly> = distinct_degree_factorization(f)
        .into_iter()
        .flat_map(|(d, g)| equal_degree_factorization(&g, d, &mut rng))
        .collect();
    out.sort_by_key(|q| {
        (
            q.degree(),
            q.coeffs().iter().map(Fp::value).collect::<Vec<_>>(),
        )
    });
    Some(out)
}

/// Cycle type of Frobenius at `p`, or `None` when `f` has bad reduction there.
pub fn cycle_type(f: &QPoly, p: u64) -> Option<CycleTypeSample> {
    let k = PrimeField::any_prime(p).ok()?;
    let fbar = reduce_mod_p(f, &k).ok()?;
    if fbar.degree() != f.degree() || fbar.degree().is_none_or(|d| d == 0) {
        return None;
    }
    let factors = factor_squarefree(&fbar)?;
    let mut cycle_type: Vec<usize> = factors.iter().map(|q| q.degree().unwrap()).collect();
    cycle_type.sort_unstable_by(|a, b| b.cmp(a));
    Some(CycleTypeSample { p, cycle_type })
}

fn is_transitivity_witness(t: &[usize], n: usize) -> bool {
    t == [n]
}

fn is_transposition_witness(t: &[usize]) -> bool {
    t.iter().filter(|&&c| c == 2).count() == 1 && t.iter().all(|&c| c == 2 || c % 2 == 1)
}

fn is_prime_cycle_witness(t: &[usize], n: usize) -> bool {
    t.iter().any(|&c| 2 * c > n && is_prime(c as u64))
}

fn is_three_cycle_witness(t: &[usize]) -> bool {
    t.iter().filter(|&&c| c == 3).count() == 1 && t.iter().all(|&c| c == 3 || c % 3 != 0)
}

type Role = Box<dyn Fn(&[usize]) -> bool>;

/// Scans primes `p ≤ prime_bound` in ascending order and stops as soon as a full
/// witness set is found, so a certificate never changes once the bound is high
/// enough to produce it.
pub fn certify_symmetric(f: &QPoly, prime_bound: u64) -> Result<GaloisCertificate, GaloisError> {
    let n = match f.degree() {
        Some(n) if n >= 2 => n,
        d => return Err(GaloisError::DegreeTooSmall(d)),
    };
    if !is_squarefree(f)? {
        return Err(GaloisError::NotSquarefree);
    }
    let disc_square = discriminant(f)?.is_square();
    let roles: Vec<Role> = if disc_square {
        vec![
            Box::new(move |t| is_transitivity_witness(t, n)),
            Box::new(move |t| is_prime_cycle_witness(t, n)),
            Box::new(is_three_cycle_witness),
        ]
    } else {
        vec![
            Box::new(move |t| is_transitivity_witness(t, n)),
            Box::new(is_transposition_witness),
            Box::new(move |t| is_prime_cycle_witness(t, n)),
        ]
    };
    let mut found = vec![false; roles.len()];
    let mut witnesses = Vec::new();
    for p in (2..=prime_bound).filter(|&p| is_prime(p)) {
        let Some(sample) = cycle_type(f, p) else {
            continue;
        };
        let mut useful = false;
        for (role, hit) in roles.iter().zip(found.iter_mut()) {
            if !*hit && role(&sample.cycle_type) {
                *hit = true;
                useful = true;
            }
        }
        if useful {
            witnesses.push(sample);
        }
        if found.iter().all(|&h| h) {
            let verdict = if disc_square {
                Verdict::AlternatingGroup
            } else {
                Verdict::SymmetricGroup
            };
            return Ok(GaloisCertificate {
                verdict,
                n,
                witnesses,
                disc_square,
            });
        }
    }
    Ok(GaloisCertificate {
        verdict: Verdict::Inconclusive,
        n,
        witnesses,
        disc_square,
    })
}

/// Re-derives every witness from scratch and checks that it plays the role the
/// verdict needs.
pub fn check_certificate(f: &QPoly, cert: &GaloisCertificate) -> bool {
    let n = cert.n;
    if f.degree() != Some(n) {
        return false;
    }
    let Ok(disc) = discriminant(f) else {
        return false;
    };
    let unramified = |p: u64| {
        PrimeField::any_prime(p)
            .and_then(|k| k.from_rational(&disc))
            .is_ok_and(|d| !d.is_zero())
    };
    let fresh_ok = cert
        .witnesses
        .iter()
        .all(|w| unramified(w.p) && cycle_type(f, w.p).as_ref() == Some(w));
    let any = |pred: &dyn Fn(&[usize]) -> bool| cert.witnesses.iter().any(|w| pred(&w.cycle_type));
    let transitive = any(&|t| is_transitivity_witness(t, n));
    let primitive = any(&|t| is_prime_cycle_witness(t, n));
    match cert.verdict {
        Verdict::SymmetricGroup => {
            fresh_ok
                && !cert.disc_square
                && transitive
                && primitive
                && any(&is_transposition_witness)
        }
        Verdict::AlternatingGroup => {
            fresh_ok && cert.disc_square && transitive && primitive && any(&is_three_cycle_witness)
        }
        Verdict::Inconclusive => fresh_ok,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicityReport {
    pub label: String,
    pub f1: Vec<String>,
    pub certificate: GaloisCertificate,
    pub absolutely_simple: bool,
}

/// For a construction curve with `deg r = 1`, certifies the Galois group of
/// `f₁ = f / r`; an `S_n` or `A_n` verdict implies `End(J) = ℤ`.
pub fn simplicity_report(
    c: &HyperellipticCurve,
    prime_bound: u64,
) -> Result<SimplicityReport, GaloisError> {
    let params = c.construction.as_ref().ok_or(GaloisError::NoConstruction)?;
    if params.beta != 1 {
        return Err(GaloisError::CriterionInapplicable(params.beta));
    }
    let f1 = c.f.exact_div(&params.r)?;
    let certificate = certify_symmetric(&f1, prime_bound)?;
    let absolutely_simple = certificate.verdict != Verdict::Inconclusive;
    Ok(SimplicityReport {
        label: c.label.clone(),
        f1: encode_coeffs(&f1),
        certificate,
        absolutely_simple,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Rational};
    use crate::construct::{builtin_family, param_map, BuiltinFamily};
    use num_bigint::BigInt;
    use num_integer::Integer;
    use num_traits::{Signed, Zero};

    fn q(c: &[i64]) -> QPoly {
        Poly::from_i64s(c, &())
    }

    #[test]
    fn small_cycle_types() {
        let ct = |c: &[i64], p| cycle_type(&q(c), p).map(|s| s.cycle_type);
        assert_eq!(ct(&[1, 0, 1], 3), Some(vec![2]));
        assert_eq!(ct(&[1, 0, 1], 5), Some(vec![1, 1]));
        assert_eq!(ct(&[1, 1, 0, 1], 2), Some(vec![3]));
        // x² + 1 ≡ (x + 1)² mod 2
        assert_eq!(ct(&[1, 0, 1], 2), None);
        // 3x² + 1 drops degree mod 3
        assert_eq!(ct(&[1, 0, 3], 3), None);
    }

    #[test]
    fn factorization_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..150 {
            let p = [2u64, 3, 5, 7, 13, 101][rng.gen_range(0..6)];
            let k = PrimeField::any_prime(p).unwrap();
            let n = rng.gen_range(1..=9);
            let mut c: Vec<Fp> = (0..n).map(|_| k.elem(rng.gen_range(0..p))).collect();
            c.push(k.elem(1));
            let f = Poly::new(c, k);
            let Some(factors) = factor_squarefree(&f) else {
                assert!(!is_squarefree(&f).unwrap());
                continue;
            };
            let prod = factors.iter().fold(Poly::one(&k), |acc, g| &acc * g);
            assert_eq!(prod, f);
            for g in &factors {
                let d = g.degree().unwrap();
                assert!(g.is_monic() && d >= 1);
                // irreducible iff no factor of degree ≤ d/2 from the DDF
                assert_eq!(distinct_degree_factorization(g), vec![(d, g.clone())]);
                if d <= 3 {
                    assert!(k.elements().all(|x| !g.eval(&x).is_zero()) || d == 1);
                }
            }
        }
    }

    /// Rational roots of an integer cubic by the rational root theorem.
    fn has_rational_root(c: &[i64; 4]) -> bool {
        let divisors = |n: i64| -> Vec<i64> {
            let n = n.abs();
            (1..=n).filter(|d| n % d == 0).collect()
        };
        if c[0] == 0 {
            return true;
        }
        for num in divisors(c[0]) {
            for den in divisors(c[3]) {
                for s in [1, -1] {
                    let x = Rational::new(BigInt::from(s * num), BigInt::from(den));
                    let v = (0..4)
                        .rev()
                        .fold(<Rational as Zero>::zero(), |acc, i| acc * &x + rat(c[i]));
                    if Zero::is_zero(&v) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn is_rational_square(r: &Rational) -> bool {
        !r.is_negative() && {
            let (n, d) = (r.numer(), r.denom());
            let sq = |m: &BigInt| m.sqrt().pow(2) == *m;
            sq(n) && sq(d)
        }
    }

    #[test]
    fn cubics_match_discriminant_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let mut seen = 0;
        let mut alternating = 0;
        while seen < 200 {
            let mut c = [0i64; 4];
            for ci in c.iter_mut() {
                *ci = rng.gen_range(-9..=9);
            }
            if c[3] == 0 {
                continue;
            }
            // occasionally plant a cyclic cubic x³ - 3x + 1 scaled and shifted
            if seen % 10 == 0 {
                let s = rng.gen_range(-3i64..=3);
                // (x+s)³ - 3(x+s) + 1
                c = [s * s * s - 3 * s + 1, 3 * s * s - 3, 3 * s, 1];
            }
            let f = q(&c);
            if !is_squarefree(&f).unwrap() {
                continue;
            }
            seen += 1;
            let cert = certify_symmetric(&f, DEFAULT_PRIME_BOUND).unwrap();
            let disc = discriminant(&f).unwrap();
            assert_eq!(cert.disc_square, is_rational_square(&disc));
            let irreducible = !has_rational_root(&c);
            let expected = match (irreducible, cert.disc_square) {
                (true, true) => Verdict::AlternatingGroup,
                (true, false) => Verdict::SymmetricGroup,
                (false, _) => Verdict::Inconclusive,
            };
            assert_eq!(cert.verdict, expected, "{c:?}");
            assert!(check_certificate(&f, &cert));
            alternating += (expected == Verdict::AlternatingGroup) as usize;
        }
        assert!(alternating > 0);
    }

    #[test]
    fn quadratics_and_small_cases() {
        let cert = certify_symmetric(&q(&[1, 0, 1]), DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(cert.verdict, Verdict::SymmetricGroup);
        assert_eq!(
            cert.witnesses,
            vec![CycleTypeSample {
                p: 3,
                cycle_type: vec![2]
            }]
        );
        let cert = certify_symmetric(&q(&[1, 1, 0, 1]), DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(cert.verdict, Verdict::SymmetricGroup);
        assert!(!cert.disc_square);
        // x² - 1 splits everywhere
        let cert = certify_symmetric(&q(&[-1, 0, 1]), DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(cert.verdict, Verdict::Inconclusive);
        assert!(cert.witnesses.is_empty());
        assert_eq!(
            certify_symmetric(&q(&[1, 1]), 100),
            Err(GaloisError::DegreeTooSmall(Some(1)))
        );
        assert_eq!(
            certify_symmetric(&q(&[1, 2, 1]), 100),
            Err(GaloisError::NotSquarefree)
        );
    }

    fn c13_11() -> HyperellipticCurve {
        builtin_family(
            BuiltinFamily::C13,
            &param_map([("u", rat(1)), ("t", rat(1))]),
        )
        .unwrap()
    }

    #[test]
    fn c13_cofactor_is_s7() {
        let report = simplicity_report(&c13_11(), DEFAULT_PRIME_BOUND).unwrap();
        assert!(report.absolutely_simple);
        assert_eq!(report.certificate.verdict, Verdict::SymmetricGroup);
        assert_eq!(report.certificate.n, 7);
        let f1 = crate::algebra::decode_coeffs(&report.f1).unwrap();
        assert_eq!(&f1 * &q(&[1, 1]), c13_11().f);
        assert!(check_certificate(&f1, &report.certificate));
        let json = serde_json::to_value(&report.certificate).unwrap();
        assert_eq!(json["verdict"], "S_n");
        assert_eq!(json["n"], 7);
        assert!(json["witnesses"][0]["type"].is_array());
    }

    #[test]
    fn monotone_in_prime_bound() {
        let f1 = c13_11().f.exact_div(&q(&[1, 1])).unwrap();
        let full = certify_symmetric(&f1, DEFAULT_PRIME_BOUND).unwrap();
        let last = full.witnesses.iter().map(|w| w.p).max().unwrap();
        for bound in [last, last + 1, 2 * last, 5000] {
            assert_eq!(certify_symmetric(&f1, bound).unwrap(), full);
        }
        let below = certify_symmetric(&f1, last - 1).unwrap();
        assert_eq!(below.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn precondition_on_r_degree() {
        let c18 = builtin_family(
            BuiltinFamily::C18,
            &param_map([("s", rat(1)), ("t", rat(1)), ("u", rat(1))]),
        )
        .unwrap();
        assert_eq!(
            simplicity_report(&c18, 100),
            Err(GaloisError::CriterionInapplicable(2))
        );
        let ct10 = builtin_family(BuiltinFamily::Ct10, &param_map([("t", rat(1))])).unwrap();
        assert_eq!(
            simplicity_report(&ct10, 100),
            Err(GaloisError::NoConstruction)
        );
    }

    #[test]
    fn c15_fixture() {
        let c15 = builtin_family(
            BuiltinFamily::C15,
            &param_map([("s", rat(1)), ("t", rat(1))]),
        )
        .unwrap();
        let report = simplicity_report(&c15, DEFAULT_PRIME_BOUND).unwrap();
        assert_eq!(report.certificate.n, 9);
        assert_eq!(report.certificate.verdict, Verdict::SymmetricGroup);
        let ps: Vec<(u64, Vec<usize>)> = report
            .certificate
            .witnesses
            .iter()
            .map(|w| (w.p, w.cycle_type.clone()))
            .collect();
        assert_eq!(
            ps,
            vec![(7, vec![9]), (23, vec![7, 1, 1]), (41, vec![7, 2])]
        );
        assert!(report.absolutely_simple);
    }

    #[test]
    fn witness_primes_are_unramified() {
        let f1 = c13_11().f.exact_div(&q(&[1, 1])).unwrap();
        let disc = discriminant(&f1).unwrap();
        let cert = certify_symmetric(&f1, DEFAULT_PRIME_BOUND).unwrap();
        for w in &cert.witnesses {
            let p = BigInt::from(w.p);
            assert!(!disc.numer().is_multiple_of(&p) && !disc.denom().is_multiple_of(&p));
        }
    }
}
