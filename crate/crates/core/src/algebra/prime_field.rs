//! 𝔽_p for odd primes p below 2³².

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::field::Field;
use super::rational::Rational;
use super::AlgebraError;

/// A validated odd prime modulus.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrimeField {
    p: u64,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Odd primes in ascending order, starting at 3.
pub fn odd_primes() -> impl Iterator<Item = u64> {
    (3..).step_by(2).filter(|&n| is_prime(n))
}

/// Distinct prime divisors of `n`, ascending.
pub fn prime_divisors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, AlgebraError> {
        if p == 2 || !is_prime(p) || p >= 1 << 32 {
            return Err(AlgebraError::InvalidModulus(p));
        }
        Ok(Self { p })
    }

    /// Like [`PrimeField::new`] but also admits `p = 2`. Only the ring operations
    /// and polynomial factorization are meant to run in characteristic 2.
    pub fn any_prime(p: u64) -> Result<Self, AlgebraError> {
        if p == 2 {
            return Ok(Self { p });
        }
        Self::new(p)
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn elem(&self, v: u64) -> Fp {
        Fp {
            v: v % self.p,
            field: *self,
        }
    }

    pub fn from_bigint(&self, n: &BigInt) -> Fp {
        let r = n.mod_floor(&BigInt::from(self.p));
        self.elem(r.to_u64().expect("residue fits in u64"))
    }

    /// Reduces a rational, failing when p divides the denominator.
    pub fn from_rational(&self, q: &Rational) -> Result<Fp, AlgebraError> {
        let d = self.from_bigint(q.denom());
        let inv = d.inv().ok_or(AlgebraError::DenominatorDivisible(self.p))?;
        Ok(self.from_bigint(q.numer()) * inv)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fp> + '_ {
        (0..self.p).map(move |v| self.elem(v))
    }
}

/// An element of 𝔽_p, stored as its least nonnegative residue.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fp {
    v: u64,
    field: PrimeField,
}

impl Fp {
    pub fn value(&self) -> u64 {
        self.v
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    /// Legendre symbol via Euler's criterion: 1, p-1 or 0.
    fn legendre(&self) -> u64 {
        self.pow((self.field.p - 1) / 2).v
    }

    fn tonelli_shanks(&self) -> Fp {
        let p = self.field.p;
        let mut q = p - 1;
        let mut s = 0;
        while q.is_multiple_of(2) {
            q /= 2;
            s += 1;
        }
        let z = self
            .field
            .elements()
            .skip(2)
            .find(|z| z.legendre() == p - 1)
            .expect("a non-residue exists for odd p");
        let mut m = s;
        let mut c = z.pow(q);
        let mut t = self.pow(q);
        let mut r = self.pow(q.div_ceil(2));
        while t.v != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2.v != 1 {
                t2 = t2 * t2;
                i += 1;
            }
            let b = c.pow(1 << (m - i - 1));
            m = i;
            c = b * b;
            t = t * c;
            r = r * b;
        }
        r
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.v, self.field.p)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.v)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        debug_assert_eq!(self.field, o.field);
        let s = self.v + o.v;
        let p = self.field.p;
        Fp {
            v: if s >= p { s - p } else { s },
            field: self.field,
        }
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        debug_assert_eq!(self.field, o.field);
        let p = self.field.p;
        Fp {
            v: if self.v >= o.v {
                self.v - o.v
            } else {
                self.v + p - o.v
            },
            field: self.field,
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        debug_assert_eq!(self.field, o.field);
        Fp {
            v: (self.v as u128 * o.v as u128 % self.field.p as u128) as u64,
            field: self.field,
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        Fp {
            v: if self.v == 0 {
                0
            } else {
                self.field.p - self.v
            },
            field: self.field,
        }
    }
}

impl Add<&Fp> for Fp {
    type Output = Fp;
    fn add(self, o: &Fp) -> Fp {
        self + *o
    }
}

impl Sub<&Fp> for Fp {
    type Output = Fp;
    fn sub(self, o: &Fp) -> Fp {
        self - *o
    }
}

impl Mul<&Fp> for Fp {
    type Output = Fp;
    fn mul(self, o: &Fp) -> Fp {
        self * *o
    }
}

impl Field for Fp {
    type Ctx = PrimeField;

    fn ctx(&self) -> PrimeField {
        self.field
    }

    fn zero(ctx: &PrimeField) -> Self {
        ctx.elem(0)
    }

    fn one(ctx: &PrimeField) -> Self {
        ctx.elem(1)
    }

    fn from_i64(n: i64, ctx: &PrimeField) -> Self {
        let p = ctx.p as i64;
        ctx.elem(n.rem_euclid(p) as u64)
    }

    fn is_zero(&self) -> bool {
        self.v == 0
    }

    fn is_one(&self) -> bool {
        self.v == 1
    }

    fn inv(&self) -> Option<Self> {
        if self.v == 0 {
            return None;
        }
        Some(self.pow(self.field.p - 2))
    }

    fn sqrt(&self) -> Option<Self> {
        if self.v == 0 || self.field.p == 2 {
            return Some(*self);
        }
        if self.legendre() != 1 {
            return None;
        }
        let r = self.tonelli_shanks();
        Some(if r.v <= self.field.p - r.v { r } else { -r })
    }

    fn is_canonical(&self) -> bool {
        self.v < self.field.p
    }
}
