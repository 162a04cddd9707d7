//! Resultants, discriminants, squarefreeness and the polynomial part of √f.

use super::field::Field;
use super::poly::Poly;
use super::AlgebraError;

/// Resultant by the subresultant remainder sequence.
///
/// Each step divides the pseudo-remainder by `g·h^δ`, which keeps the
/// intermediate coefficients at the size of the corresponding subresultant
/// minors instead of letting them compound.
pub fn resultant<F: Field>(a: &Poly<F>, b: &Poly<F>) -> F {
    let ctx = a.ctx().clone();
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return F::zero(&ctx);
    };
    if da == 0 {
        return a.lc().unwrap().pow(db as u64);
    }
    if db == 0 {
        return b.lc().unwrap().pow(da as u64);
    }

    let (mut a, mut b) = (a.clone(), b.clone());
    let mut sign_negative = false;
    if da < db {
        std::mem::swap(&mut a, &mut b);
        if da % 2 == 1 && db % 2 == 1 {
            sign_negative = true;
        }
    }
    let mut g = F::one(&ctx);
    let mut h = F::one(&ctx);
    loop {
        let deg_a = a.degree().unwrap();
        let deg_b = b.degree().unwrap();
        let delta = (deg_a - deg_b) as u64;
        if deg_a % 2 == 1 && deg_b % 2 == 1 {
            sign_negative = !sign_negative;
        }
        let lcb = b.lc().unwrap().clone();
        let prem = a
            .rem(&b)
            .expect("nonzero divisor")
            .scale(&lcb.pow(delta + 1));
        let divisor = g.clone() * h.pow(delta);
        a = b;
        b = prem.scale(&divisor.inv().expect("nonzero subresultant scale"));
        g = a.lc().unwrap().clone();
        // h <- g^δ / h^(δ-1)
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div(&h.pow(delta - 1)).expect("nonzero h")
        };
        match b.degree() {
            None => return F::zero(&ctx),
            Some(0) => {
                let deg_a = a.degree().unwrap() as u64;
                let lcb = b.lc().unwrap().pow(deg_a);
                let res = if deg_a == 0 {
                    h * &lcb
                } else {
                    lcb.div(&h.pow(deg_a - 1)).expect("nonzero h")
                };
                return if sign_negative { -res } else { res };
            }
            Some(_) => {}
        }
    }
}

/// `disc(f) = (-1)^{n(n-1)/2} Res(f, f') / lc(f)` with `f'` taken at formal degree `n-1`.
pub fn discriminant<F: Field>(f: &Poly<F>) -> Result<F, AlgebraError> {
    let n = match f.degree() {
        None | Some(0) => return Err(AlgebraError::ConstantInput),
        Some(n) => n,
    };
    let lc = f.lc().unwrap().clone();
    let df = f.derivative();
    let Some(ddf) = df.degree() else {
        return Ok(F::zero(f.ctx()));
    };
    // Res_{n,n-1}(f, f') = lc^{(n-1) - deg f'} Res(f, f')
    let res = resultant(f, &df) * lc.pow((n - 1 - ddf) as u64);
    let d = res.div(&lc).expect("nonzero leading coefficient");
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

/// True iff `gcd(f, f')` is a nonzero constant.
pub fn is_squarefree<F: Field>(f: &Poly<F>) -> Result<bool, AlgebraError> {
    match f.degree() {
        None => Err(AlgebraError::ZeroPolynomial),
        Some(0) => Err(AlgebraError::ConstantInput),
        Some(_) => Ok(f.gcd(&f.derivative()).is_one()),
    }
}

/// The polynomial part `A = [√f]` for `f` of even degree with square leading coefficient.
///
/// Coefficients of `A` are fixed from the top down so that `deg(f - A²) < deg A`.
pub fn sqrt_polynomial_part<F: Field>(f: &Poly<F>) -> Result<Poly<F>, AlgebraError> {
    let n = f.degree().ok_or(AlgebraError::ZeroPolynomial)?;
    if n % 2 == 1 {
        return Err(AlgebraError::OddDegree(n));
    }
    let d = n / 2;
    let ctx = f.ctx().clone();
    let lead = f
        .lc()
        .unwrap()
        .sqrt()
        .ok_or(AlgebraError::NonSquareLeading)?;
    let two_lead_inv = (F::from_i64(2, &ctx) * &lead)
        .inv()
        .expect("characteristic is not 2");

    let mut a = vec![F::zero(&ctx); d + 1];
    a[d] = lead;
    for k in 1..=d {
        // coefficient of x^{2d-k} in (current A)^2, with a[d-k] still zero
        let target = 2 * d - k;
        let mut acc = F::zero(&ctx);
        for i in (d - k + 1)..=d {
            let j = target - i;
            if j <= d && j > d - k {
                acc = acc + a[i].clone() * &a[j];
            }
        }
        a[d - k] = (f.coeff(target) - acc) * &two_lead_inv;
    }
    let a = Poly::new(a, ctx);
    debug_assert!((f - &(&a * &a)).degree().is_none_or(|r| r < d));
    Ok(a)
}
