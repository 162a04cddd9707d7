//! Exact arithmetic over ℚ and 𝔽_p, and dense polynomials over either.

mod field;
mod poly;
mod prime_field;
mod rational;
mod resultant;

pub use field::Field;
pub use poly::Poly;
pub use prime_field::{is_prime, odd_primes, prime_divisors, Fp, PrimeField};
pub use rational::{exact_isqrt, rat, ratio, Rational};
pub use resultant::{discriminant, is_squarefree, resultant, sqrt_polynomial_part};

use thiserror::Error;

pub type QPoly = Poly<Rational>;
pub type FpPoly = Poly<Fp>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("division is not exact")]
    InexactDivision,
    #[error("operation needs a polynomial of degree at least 1")]
    ConstantInput,
    #[error("operation is undefined on the zero polynomial")]
    ZeroPolynomial,
    #[error("expected even degree, got {0}")]
    OddDegree(usize),
    #[error("leading coefficient is not a square in the field")]
    NonSquareLeading,
    #[error("{0} is not an odd prime below 2^32")]
    InvalidModulus(u64),
    #[error("denominator divisible by {0}")]
    DenominatorDivisible(u64),
    #[error("cannot parse coefficient {0:?}")]
    BadCoefficient(String),
}

/// Encodes coefficients ascending as `"num/den"` strings (denominator dropped when 1).
pub fn encode_coeffs(f: &QPoly) -> Vec<String> {
    f.coeffs().iter().map(|c| c.to_string()).collect()
}

pub fn decode_rational(s: &str) -> Result<Rational, AlgebraError> {
    s.trim()
        .parse::<Rational>()
        .map_err(|_| AlgebraError::BadCoefficient(s.to_string()))
}

pub fn decode_coeffs<S: AsRef<str>>(coeffs: &[S]) -> Result<QPoly, AlgebraError> {
    let c = coeffs
        .iter()
        .map(|s| decode_rational(s.as_ref()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Poly::new(c, ()))
}

/// Reduces a rational polynomial mod p.
pub fn reduce_mod_p(f: &QPoly, k: &PrimeField) -> Result<FpPoly, AlgebraError> {
    f.try_map(k, |c| k.from_rational(c))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficient_encoding() {
        let f = Poly::new(vec![ratio(3, 4), rat(0), ratio(-6, 4), rat(2)], ());
        let enc = encode_coeffs(&f);
        assert_eq!(enc, vec!["3/4", "0", "-3/2", "2"]);
        assert_eq!(decode_coeffs(&enc).unwrap(), f);
        assert!(decode_coeffs(&["1/0"]).is_err());
        assert!(decode_coeffs(&["x"]).is_err());
        assert!(encode_coeffs(&Poly::zero(&())).is_empty());
    }

    #[test]
    fn reduction() {
        let k = PrimeField::new(5).unwrap();
        let f = Poly::new(vec![ratio(1, 2), rat(5), rat(7)], ());
        assert_eq!(
            reduce_mod_p(&f, &k).unwrap(),
            Poly::<Fp>::from_i64s(&[3, 0, 2], &k)
        );
        let g = Poly::new(vec![ratio(1, 5), rat(1)], ());
        assert_eq!(
            reduce_mod_p(&g, &k),
            Err(AlgebraError::DenominatorDivisible(5))
        );
    }

    #[test]
    fn translate_and_gcd() {
        let f: QPoly = Poly::from_i64s(&[-1, 0, 1], &());
        assert_eq!(f.translate(&rat(1)), Poly::from_i64s(&[0, 2, 1], &()));
        let g = Poly::from_i64s(&[1, 2, 1], &());
        assert_eq!(f.gcd(&g), Poly::from_i64s(&[1, 1], &()));
        let (d, s, t) = f.ext_gcd(&g);
        assert_eq!(&(&s * &f) + &(&t * &g), d);
    }
}
