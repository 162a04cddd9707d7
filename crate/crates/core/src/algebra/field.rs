//! The exact-field abstraction shared by the polynomial code.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// An exact field of characteristic different from 2.
///
/// Elements carry enough information to rebuild their field (`Ctx`), so a
/// polynomial can always produce a zero or one of the right kind, even when
/// it has no coefficients of its own.
pub trait Field:
    Clone
    + PartialEq
    + Eq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    /// Describes which field an element lives in (unit for ℚ, the modulus for 𝔽_p).
    type Ctx: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn ctx(&self) -> Self::Ctx;
    fn zero(ctx: &Self::Ctx) -> Self;
    fn one(ctx: &Self::Ctx) -> Self;
    fn from_i64(n: i64, ctx: &Self::Ctx) -> Self;

    fn is_zero(&self) -> bool;

    fn is_one(&self) -> bool {
        *self == Self::one(&self.ctx())
    }

    /// Multiplicative inverse, `None` for zero.
    fn inv(&self) -> Option<Self>;

    /// Canonical square root, `None` when the element is not a square.
    ///
    /// Over ℚ the nonnegative root; over 𝔽_p the least nonnegative residue.
    fn sqrt(&self) -> Option<Self>;

    fn is_square(&self) -> bool {
        self.sqrt().is_some()
    }

    /// Whether the stored representation is in canonical form.
    fn is_canonical(&self) -> bool {
        true
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }

    fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ctx());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * &base;
            }
            base = base.clone() * &base;
            e >>= 1;
        }
        acc
    }
}
