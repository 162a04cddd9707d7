//! Divisor-class arithmetic over 𝔽_p, used as an oracle independent of the
//! continued-fraction route.
//!
//! A curve `y² = f(x)` with an 𝔽_p-root `x₀` of `f̄` is moved to the odd model
//! `w² = F(z) = z^{2g+2} f̄(x₀ + 1/z)`. The two points at infinity land on
//! `(0, ±h)` with `h² = lc(f̄)`, so `∞₊ − ∞₋` becomes a difference of two
//! degree-one Mumford divisors and its order can be checked with Cantor's
//! algorithm.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    is_squarefree, odd_primes, prime_divisors, reduce_mod_p, AlgebraError, Field, Fp, FpPoly, Poly,
    PrimeField,
};
use crate::construct::HyperellipticCurve;

/// Primes are scanned in ascending order up to this bound.
pub const PRIME_SEARCH_BOUND: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JacobianError {
    #[error("p = 2 is excluded (characteristic 2)")]
    EvenPrime,
    #[error("bad reduction at {p}: {reason}")]
    BadReduction { p: u64, reason: String },
    #[error("a coefficient denominator is divisible by {0}")]
    DenominatorDivisible(u64),
    #[error("reduction has no root in F_{0}")]
    NoRationalRoot(u64),
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("only {found} admissible primes below {bound}, wanted {wanted}")]
    NotEnoughPrimes {
        found: usize,
        wanted: usize,
        bound: u64,
    },
    #[error("order must be at least 2, got {0}")]
    BadOrder(u64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// `w² = F(z)` with `deg F = 2g + 1`, `F` squarefree over 𝔽_p.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OddModelCurve {
    field: PrimeField,
    f: FpPoly,
    genus: usize,
}

impl OddModelCurve {
    pub fn new(f: FpPoly) -> Result<Self, JacobianError> {
        let field = *f.ctx();
        let genus = match f.degree() {
            Some(d) if d % 2 == 1 && d >= 3 => (d - 1) / 2,
            got => {
                return Err(JacobianError::BadReduction {
                    p: field.modulus(),
                    reason: format!("odd model needs odd degree >= 3, got {got:?}"),
                })
            }
        };
        if !is_squarefree(&f)? {
            return Err(JacobianError::NotSquarefree);
        }
        Ok(OddModelCurve { field, f, genus })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn poly(&self) -> &FpPoly {
        &self.f
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn identity(&self) -> MumfordDivisor {
        MumfordDivisor {
            u: Poly::one(&self.field),
            v: Poly::zero(&self.field),
        }
    }

    /// Checks the Mumford conditions: `u` monic, `deg v < deg u ≤ g`, `u | v² − F`.
    pub fn is_valid(&self, d: &MumfordDivisor) -> bool {
        let Some(du) = d.u.degree() else { return false };
        d.u.is_monic()
            && du <= self.genus
            && d.v.degree().is_none_or(|dv| dv < du)
            && (&(&d.v * &d.v) - &self.f)
                .rem(&d.u)
                .is_ok_and(|r| r.is_zero())
    }

    /// The divisor class of `P − ∞` for an affine point `P = (x, y)` on the curve.
    pub fn point(&self, x: Fp, y: Fp) -> Option<MumfordDivisor> {
        (y * y == self.f.eval(&x)).then(|| MumfordDivisor {
            u: Poly::from_coeffs(vec![-x, Fp::one(&self.field)]),
            v: Poly::constant(y),
        })
    }
}

/// Reduced divisor class `(u, v)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MumfordDivisor {
    pub u: FpPoly,
    pub v: FpPoly,
}

impl MumfordDivisor {
    pub fn is_identity(&self) -> bool {
        self.u.is_one()
    }

    /// `−(u, v) = (u, −v)`.
    pub fn negate(&self) -> Self {
        MumfordDivisor {
            u: self.u.clone(),
            v: -&self.v,
        }
    }
}

/// Reduces `f` mod `p`, requiring full degree, squarefreeness and a square leading coefficient.
pub fn reduce_curve(c: &HyperellipticCurve, p: u64) -> Result<FpPoly, JacobianError> {
    if p == 2 {
        return Err(JacobianError::EvenPrime);
    }
    let field = PrimeField::new(p)?;
    let fbar = match reduce_mod_p(&c.f, &field) {
        Ok(f) => f,
        Err(AlgebraError::DenominatorDivisible(p)) => {
            return Err(JacobianError::DenominatorDivisible(p))
        }
        Err(e) => return Err(e.into()),
    };
    let bad = |reason: &str| {
        Err(JacobianError::BadReduction {
            p,
            reason: reason.to_string(),
        })
    };
    if fbar.degree() != c.f.degree() {
        return bad("degree drops");
    }
    if !is_squarefree(&fbar)? {
        return bad("not squarefree");
    }
    if !fbar.lc().unwrap().is_square() {
        return bad("leading coefficient is not a square");
    }
    Ok(fbar)
}

/// Result of moving an even model to the odd model at the smallest root `x₀`.
#[derive(Clone, Debug)]
pub struct OddModel {
    pub curve: OddModelCurve,
    pub root: u64,
    pub d_plus: MumfordDivisor,
    pub d_minus: MumfordDivisor,
}

impl OddModel {
    /// The class of `∞₊ − ∞₋` of the even model.
    pub fn divisor_at_infinity(&self) -> MumfordDivisor {
        cantor_add(&self.curve, &self.d_plus, &self.d_minus.negate())
    }
}

pub fn to_odd_model(fbar: &FpPoly) -> Result<OddModel, JacobianError> {
    let field = *fbar.ctx();
    let p = field.modulus();
    let n = match fbar.degree() {
        Some(n) if n % 2 == 0 && n >= 4 => n,
        got => {
            return Err(JacobianError::BadReduction {
                p,
                reason: format!("even model needs even degree >= 4, got {got:?}"),
            })
        }
    };
    if !is_squarefree(fbar)? {
        return Err(JacobianError::NotSquarefree);
    }
    let h = fbar
        .lc()
        .unwrap()
        .sqrt()
        .ok_or(JacobianError::BadReduction {
            p,
            reason: "leading coefficient is not a square".into(),
        })?;
    let x0 = field
        .elements()
        .find(|x| fbar.eval(x).is_zero())
        .ok_or(JacobianError::NoRationalRoot(p))?;

    // F_j = [x^{n-j}] f̄(x + x₀), j = 0..n-1; the constant term of the shift vanishes.
    let shifted = fbar.translate(&x0);
    debug_assert!(shifted.constant_term().is_zero());
    let odd = Poly::new((0..n).map(|j| shifted.coeff(n - j)).collect(), field);
    debug_assert_eq!(odd.degree(), Some(n - 1));
    let curve = OddModelCurve::new(odd)?;
    let z = Poly::x(&field);
    let d_plus = MumfordDivisor {
        u: z.clone(),
        v: Poly::constant(h),
    };
    let d_minus = MumfordDivisor {
        u: z,
        v: Poly::constant(-h),
    };
    debug_assert!(curve.is_valid(&d_plus) && curve.is_valid(&d_minus));
    Ok(OddModel {
        curve,
        root: x0.value(),
        d_plus,
        d_minus,
    })
}

/// Cantor composition followed by reduction.
pub fn cantor_add(c: &OddModelCurve, d1: &MumfordDivisor, d2: &MumfordDivisor) -> MumfordDivisor {
    let (u1, v1, u2, v2) = (&d1.u, &d1.v, &d2.u, &d2.v);
    let (g1, e1, e2) = u1.ext_gcd(u2);
    let (d, c1, c2) = g1.ext_gcd(&(v1 + v2));
    let s1 = &c1 * &e1;
    let s2 = &c1 * &e2;
    let s3 = c2;

    let u = (u1 * u2).exact_div(&(&d * &d)).expect("d² divides u1·u2");
    let v_num = &(&(&(&s1 * u1) * v2) + &(&(&s2 * u2) * v1)) + &(&s3 * &(&(v1 * v2) + &c.f));
    let v = v_num
        .exact_div(&d)
        .expect("d divides the composed v")
        .rem(&u)
        .expect("nonzero u");
    reduce(c, u, v)
}

fn reduce(c: &OddModelCurve, mut u: FpPoly, mut v: FpPoly) -> MumfordDivisor {
    while u.degree().unwrap() > c.genus {
        let u_next = (&c.f - &(&v * &v))
            .exact_div(&u)
            .expect("u divides F − v²")
            .monic();
        v = (-&v).rem(&u_next).expect("nonzero u");
        u = u_next;
    }
    let u = u.monic();
    let v = v.rem(&u).expect("nonzero u");
    MumfordDivisor { u, v }
}

/// `n·D` by double-and-add.
pub fn scalar_mul(c: &OddModelCurve, n: u64, d: &MumfordDivisor) -> MumfordDivisor {
    let mut acc = c.identity();
    let mut base = d.clone();
    let mut n = n;
    while n > 0 {
        if n & 1 == 1 {
            acc = cantor_add(c, &acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = cantor_add(c, &base, &base);
        }
    }
    acc
}

/// Whether `D` has exact order `n`: `n·D = 0` and `(n/ℓ)·D ≠ 0` for each prime `ℓ | n`.
pub fn has_exact_order(c: &OddModelCurve, n: u64, d: &MumfordDivisor) -> bool {
    scalar_mul(c, n, d).is_identity()
        && prime_divisors(n)
            .into_iter()
            .all(|l| !scalar_mul(c, n / l, d).is_identity())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeRecord {
    pub p: u64,
    pub root: u64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCertificate {
    pub label: String,
    pub order: u64,
    pub primes: Vec<PrimeRecord>,
    pub passed: bool,
}

/// Checks the exact order `n` of `∞₊ − ∞₋` at the first `prime_count` admissible
/// odd primes (good reduction and an 𝔽_p-root of `f̄`).
pub fn certify_order(
    c: &HyperellipticCurve,
    n: u64,
    prime_count: usize,
) -> Result<OrderCertificate, JacobianError> {
    if n < 2 {
        return Err(JacobianError::BadOrder(n));
    }
    let mut primes = Vec::with_capacity(prime_count);
    for p in odd_primes().take_while(|&p| p <= PRIME_SEARCH_BOUND) {
        if primes.len() == prime_count {
            break;
        }
        let Ok(fbar) = reduce_curve(c, p) else {
            continue;
        };
        let Ok(model) = to_odd_model(&fbar) else {
            continue;
        };
        let d = model.divisor_at_infinity();
        let passed = has_exact_order(&model.curve, n, &d);
        primes.push(PrimeRecord {
            p,
            root: model.root,
            passed,
        });
    }
    if primes.len() < prime_count {
        return Err(JacobianError::NotEnoughPrimes {
            found: primes.len(),
            wanted: prime_count,
            bound: PRIME_SEARCH_BOUND,
        });
    }
    let passed = primes.iter().all(|r| r.passed);
    Ok(OrderCertificate {
        label: c.label.clone(),
        order: n,
        primes,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::construct::{builtin_family, param_map, BuiltinFamily};
    use crate::contfrac::expand;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fp_poly(c: &[i64], k: &PrimeField) -> FpPoly {
        Poly::<Fp>::from_i64s(c, k)
    }

    /// All monic polynomials of degree exactly `d` over `k`.
    fn monic_of_degree(k: &PrimeField, d: usize) -> Vec<FpPoly> {
        let p = k.modulus() as usize;
        (0..p.pow(d as u32))
            .map(|mut idx| {
                let mut c: Vec<Fp> = (0..d)
                    .map(|_| {
                        let v = idx % p;
                        idx /= p;
                        k.elem(v as u64)
                    })
                    .collect();
                c.push(Fp::one(k));
                Poly::new(c, *k)
            })
            .collect()
    }

    fn all_of_degree_below(k: &PrimeField, d: usize) -> Vec<FpPoly> {
        let p = k.modulus() as usize;
        (0..p.pow(d as u32))
            .map(|mut idx| {
                let c: Vec<Fp> = (0..d)
                    .map(|_| {
                        let v = idx % p;
                        idx /= p;
                        k.elem(v as u64)
                    })
                    .collect();
                Poly::new(c, *k)
            })
            .collect()
    }

    /// Brute-force enumeration of every reduced divisor class.
    fn enumerate_jacobian(c: &OddModelCurve) -> Vec<MumfordDivisor> {
        let k = c.field();
        let mut out = vec![c.identity()];
        for d in 1..=c.genus() {
            for u in monic_of_degree(&k, d) {
                for v in all_of_degree_below(&k, d) {
                    let div = MumfordDivisor { u: u.clone(), v };
                    if c.is_valid(&div) {
                        out.push(div);
                    }
                }
            }
        }
        out
    }

    fn genus2_curve(p: u64) -> OddModelCurve {
        let k = PrimeField::new(p).unwrap();
        // first squarefree x^5 + a x + b in lexicographic order
        (0..p as i64)
            .flat_map(|a| (1..p as i64).map(move |b| (a, b)))
            .find_map(|(a, b)| OddModelCurve::new(fp_poly(&[b, a, 0, 0, 0, 1], &k)).ok())
            .unwrap()
    }

    fn check_group_laws(c: &OddModelCurve) -> usize {
        let elems = enumerate_jacobian(c);
        let n = elems.len();
        let id = c.identity();
        let index = |d: &MumfordDivisor| elems.iter().position(|e| e == d).expect("closed");
        let mut table = vec![vec![0usize; n]; n];
        for (i, a) in elems.iter().enumerate() {
            assert_eq!(cantor_add(c, a, &id), *a);
            assert!(cantor_add(c, a, &a.negate()).is_identity());
            for (j, b) in elems.iter().enumerate() {
                let s = cantor_add(c, a, b);
                assert!(c.is_valid(&s));
                table[i][j] = index(&s);
            }
        }
        for i in 0..n {
            for j in 0..n {
                assert_eq!(table[i][j], table[j][i], "commutativity");
                for k in 0..n {
                    assert_eq!(
                        table[table[i][j]][k], table[i][table[j][k]],
                        "associativity"
                    );
                }
            }
        }
        // Lagrange: every element's order divides |J|
        for e in &elems {
            assert!(scalar_mul(c, n as u64, e).is_identity());
        }
        n
    }

    #[test]
    fn group_laws_exhaustive_genus2() {
        for p in [3u64, 5] {
            let c = genus2_curve(p);
            let n = check_group_laws(&c) as f64;
            let q = (p as f64).sqrt();
            assert!(
                n >= (q - 1.0).powi(4) && n <= (q + 1.0).powi(4),
                "Weil bound, #J = {n}"
            );
        }
    }

    #[test]
    fn scalar_mul_matches_repeated_addition() {
        let c = genus2_curve(5);
        let elems = enumerate_jacobian(&c);
        for d in elems.iter().take(12) {
            let mut acc = c.identity();
            for n in 0..=20u64 {
                assert_eq!(scalar_mul(&c, n, d), acc, "n = {n}");
                acc = cantor_add(&c, &acc, d);
            }
        }
    }

    #[test]
    fn doubling_is_self_addition() {
        let k = PrimeField::new(101).unwrap();
        let c = OddModelCurve::new(fp_poly(&[7, 3, 0, 1, 5, 0, 0, 1], &k)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut points = Vec::new();
        for x in k.elements() {
            if let Some(y) = c.poly().eval(&x).sqrt() {
                points.push(c.point(x, y).unwrap());
            }
        }
        for _ in 0..200 {
            let d = (0..c.genus()).fold(c.identity(), |acc, _| {
                cantor_add(&c, &acc, &points[rng.gen_range(0..points.len())])
            });
            assert_eq!(scalar_mul(&c, 2, &d), cantor_add(&c, &d, &d));
            assert_eq!(scalar_mul(&c, 0, &d), c.identity());
        }
    }

    #[test]
    fn odd_model_degree_and_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut done = 0;
        while done < 100 {
            let p = [7u64, 11, 13, 17][rng.gen_range(0..4)];
            let k = PrimeField::new(p).unwrap();
            let g = rng.gen_range(1..=4);
            let h = rng.gen_range(1..p as i64);
            let mut c: Vec<i64> = (0..2 * g + 2).map(|_| rng.gen_range(0..p as i64)).collect();
            c.push(h * h);
            let fbar = fp_poly(&c, &k);
            if !is_squarefree(&fbar).unwrap() {
                continue;
            }
            match to_odd_model(&fbar) {
                Ok(m) => {
                    assert_eq!(m.curve.poly().degree(), Some(2 * g + 1));
                    assert_eq!(m.curve.genus(), g);
                    assert!(m.curve.is_valid(&m.d_plus) && m.curve.is_valid(&m.d_minus));
                    assert!(fbar.eval(&k.elem(m.root)).is_zero());
                    assert!(k
                        .elements()
                        .take(m.root as usize)
                        .all(|x| !fbar.eval(&x).is_zero()));
                    done += 1;
                }
                Err(JacobianError::NoRationalRoot(_)) => {
                    assert!(k.elements().all(|x| !fbar.eval(&x).is_zero()));
                }
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn rootless_reduction_errors() {
        // x^4 + 1 has no root mod 5 (fourth powers are 0, 1)
        let k = PrimeField::new(5).unwrap();
        assert!(k
            .elements()
            .all(|x| !(x * x * x * x + Fp::one(&k)).is_zero()));
        assert_eq!(
            to_odd_model(&fp_poly(&[1, 0, 0, 0, 1], &k)).unwrap_err(),
            JacobianError::NoRationalRoot(5)
        );
        // h = 1 and root at 0: F(z) = z^{2g+2} f(1/z)
        let f = fp_poly(&[0, 2, 3, 0, 1], &k);
        let m = to_odd_model(&f).unwrap();
        assert_eq!(m.root, 0);
        assert_eq!(m.curve.poly(), &fp_poly(&[1, 0, 3, 2], &k));
        assert_eq!(m.d_plus.v, fp_poly(&[1], &k));
    }

    #[test]
    fn class_order_matches_continued_fraction_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut checked = 0;
        while checked < 40 {
            let p = [7u64, 11, 13][rng.gen_range(0..3)];
            let k = PrimeField::new(p).unwrap();
            let g = rng.gen_range(1..=2);
            let h = rng.gen_range(1..p as i64);
            let mut c: Vec<i64> = (0..2 * g + 2).map(|_| rng.gen_range(0..p as i64)).collect();
            c.push(h * h);
            let fbar = fp_poly(&c, &k);
            if !is_squarefree(&fbar).unwrap() {
                continue;
            }
            let Ok(model) = to_odd_model(&fbar) else {
                continue;
            };
            let n = expand(&fbar, u64::MAX).unwrap().torsion_order().unwrap();
            let d = model.divisor_at_infinity();
            assert!(has_exact_order(&model.curve, n, &d), "p={p} f={fbar} n={n}");
            checked += 1;
        }
    }

    fn ct10() -> HyperellipticCurve {
        builtin_family(BuiltinFamily::Ct10, &param_map([("t", rat(1))])).unwrap()
    }

    #[test]
    fn reduce_curve_examples() {
        let c = ct10();
        assert!(matches!(
            reduce_curve(&c, 5),
            Err(JacobianError::BadReduction { p: 5, .. })
        ));
        assert_eq!(reduce_curve(&c, 2), Err(JacobianError::EvenPrime));
        let k3 = PrimeField::new(3).unwrap();
        let f3 = reduce_mod_p(&c.f, &k3).unwrap();
        assert_eq!(reduce_curve(&c, 3).is_ok(), is_squarefree(&f3).unwrap());
    }

    #[test]
    fn certificates() {
        let cert = certify_order(&ct10(), 10, 3).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.primes.len(), 3);
        let c13 = builtin_family(
            BuiltinFamily::C13,
            &param_map([("u", rat(1)), ("t", rat(1))]),
        )
        .unwrap();
        assert!(certify_order(&c13, 13, 3).unwrap().passed);
        let wrong = certify_order(&c13, 14, 1).unwrap();
        assert!(!wrong.passed);
        assert_eq!(certify_order(&c13, 1, 1), Err(JacobianError::BadOrder(1)));
    }
}
