//! Hyperelliptic curves whose divisor at infinity has a prescribed torsion order.
//!
//! Every constructor returns a validated [`HyperellipticCurve`]: `deg f = 2g+2`,
//! nonzero discriminant, square leading coefficient. Degenerate parameter
//! choices are rejected, never repaired.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::algebra::{discriminant, rat, AlgebraError, Field, Poly, QPoly, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate specialization: discriminant of f is zero")]
    ZeroDiscriminant,
    #[error("degree defect: expected deg f = {expected}, got {got:?}")]
    DegreeDefect { expected: usize, got: Option<usize> },
    #[error("leading coefficient of f is not a rational square")]
    NonSquareLeading,
    #[error("q^2 = r makes the odd-genus quartic family degenerate")]
    QSquaredEqualsR,
    #[error("unknown family label {0:?}")]
    UnknownLabel(String),
    #[error("missing parameter {0:?}")]
    MissingParam(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Inputs `(a₁, r, u)` of the six-step construction, with their degrees `(α, β, γ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionParams {
    pub alpha: usize,
    pub beta: usize,
    pub gamma: usize,
    pub a1: QPoly,
    pub r: QPoly,
    pub u: QPoly,
    pub genus: usize,
}

impl ConstructionParams {
    pub fn new(
        genus: usize,
        alpha: usize,
        beta: usize,
        gamma: usize,
        a1: QPoly,
        r: QPoly,
        u: QPoly,
    ) -> Result<Self, ConstructError> {
        let invalid = |m: String| Err(ConstructError::InvalidParams(m));
        if alpha < 1 || beta < 1 {
            return invalid(format!("need alpha, beta >= 1, got ({alpha}, {beta})"));
        }
        if 2 * alpha + 2 * beta + gamma != genus + 1 {
            return invalid(format!(
                "2*{alpha} + 2*{beta} + {gamma} != g + 1 = {}",
                genus + 1
            ));
        }
        for (name, p, d) in [("a1", &a1, alpha), ("r", &r, beta), ("u", &u, gamma)] {
            if p.degree() != Some(d) {
                return invalid(format!("deg {name} = {:?}, expected {d}", p.degree()));
            }
        }
        Ok(ConstructionParams {
            alpha,
            beta,
            gamma,
            a1,
            r,
            u,
            genus,
        })
    }

    /// Reads `(α, β, γ)` and the genus off the polynomial degrees.
    pub fn from_polys(a1: QPoly, r: QPoly, u: QPoly) -> Result<Self, ConstructError> {
        let deg = |p: &QPoly, name: &str| {
            p.degree()
                .ok_or_else(|| ConstructError::InvalidParams(format!("{name} is zero")))
        };
        let (alpha, beta, gamma) = (deg(&a1, "a1")?, deg(&r, "r")?, deg(&u, "u")?);
        let genus = (2 * alpha + 2 * beta + gamma).saturating_sub(1);
        Self::new(genus, alpha, beta, gamma, a1, r, u)
    }

    pub fn predicted_order(&self) -> u64 {
        (self.genus + 1 + 6 * self.alpha + 3 * self.beta + self.gamma) as u64
    }
}

/// A curve `y² = f(x)` over ℚ with `deg f = 2g+2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HyperellipticCurve {
    pub genus: usize,
    pub f: QPoly,
    pub predicted_order: Option<u64>,
    pub label: String,
    pub params: BTreeMap<String, Rational>,
    /// Present when `f` comes from the `(a₁, r, u)` construction.
    pub construction: Option<ConstructionParams>,
    discriminant: Rational,
}

impl HyperellipticCurve {
    /// Validates degree, discriminant and leading coefficient.
    pub fn new(
        label: impl Into<String>,
        genus: usize,
        f: QPoly,
        predicted_order: Option<u64>,
        params: BTreeMap<String, Rational>,
    ) -> Result<Self, ConstructError> {
        let expected = 2 * genus + 2;
        if f.degree() != Some(expected) {
            return Err(ConstructError::DegreeDefect {
                expected,
                got: f.degree(),
            });
        }
        if !f.lc().unwrap().is_square() {
            return Err(ConstructError::NonSquareLeading);
        }
        let discriminant = discriminant(&f)?;
        if discriminant.is_zero() {
            return Err(ConstructError::ZeroDiscriminant);
        }
        Ok(HyperellipticCurve {
            genus,
            f,
            predicted_order,
            label: label.into(),
            params,
            construction: None,
            discriminant,
        })
    }

    /// Infers the genus from `deg f`.
    pub fn from_poly(label: impl Into<String>, f: QPoly) -> Result<Self, ConstructError> {
        match f.degree() {
            Some(d) if d >= 4 && d % 2 == 0 => {
                Self::new(label, d / 2 - 1, f, None, BTreeMap::new())
            }
            got => Err(ConstructError::DegreeDefect { expected: 4, got }),
        }
    }

    pub fn discriminant(&self) -> &Rational {
        &self.discriminant
    }

    fn with_construction(mut self, c: ConstructionParams) -> Self {
        self.construction = Some(c);
        self
    }
}

/// `−2q − 2a₂ + a₁r + a₃r − 2q·a₁a₂ + a₁a₂a₃r − a₂²a₃`.
pub fn lemma_expression(q: &QPoly, a1: &QPoly, a2: &QPoly, a3: &QPoly, r: &QPoly) -> QPoly {
    let two = rat(2);
    let terms = [
        q.scale(&-two.clone()),
        a2.scale(&-two.clone()),
        a1 * r,
        a3 * r,
        (&(q * a1) * a2).scale(&-two),
        &(&(a1 * a2) * a3) * r,
        -&(&(a2 * a2) * a3),
    ];
    terms.iter().fold(Poly::zero(&()), |acc, t| &acc + t)
}

/// `q = u·r/2, a₂ = a₁·r, a₃ = a₁²·u·r + a₁ + u`, checked against [`lemma_expression`].
pub fn solve_diophantine(a1: &QPoly, r: &QPoly, u: &QPoly) -> (QPoly, QPoly, QPoly) {
    let q = (u * r).scale(&Rational::new(1.into(), 2.into()));
    let a2 = a1 * r;
    let a3 = &(&(&(a1 * a1) * u) * r) + &(a1 + u);
    assert!(
        lemma_expression(&q, a1, &a2, &a3, r).is_zero(),
        "lemma identity failed"
    );
    (q, a2, a3)
}

/// `r²·(u·(a₁²r + 1) + a₁)² + 4·(u·a₁·r² + r)`.
pub fn theorem_polynomial(a1: &QPoly, r: &QPoly, u: &QPoly) -> QPoly {
    let one = Poly::one(&());
    let inner = &(u * &(&(&(a1 * a1) * r) + &one)) + a1;
    let square = &(r * &inner) * &(r * &inner);
    let tail = &(&(u * a1) * &(r * r)) + r;
    &square + &tail.scale(&rat(4))
}

/// The curve of the `(α, β, γ)` construction; predicted order `g + 1 + 6α + 3β + γ`.
pub fn theorem_curve(p: &ConstructionParams) -> Result<HyperellipticCurve, ConstructError> {
    let f = theorem_polynomial(&p.a1, &p.r, &p.u);
    let mut params = BTreeMap::new();
    for (name, poly) in [("A", &p.a1), ("R", &p.r), ("U", &p.u)] {
        for (i, c) in poly.coeffs().iter().enumerate() {
            params.insert(format!("{name}{i}"), c.clone());
        }
    }
    let label = format!("theorem({},{},{})", p.alpha, p.beta, p.gamma);
    Ok(
        HyperellipticCurve::new(label, p.genus, f, Some(p.predicted_order()), params)?
            .with_construction(p.clone()),
    )
}

/// All `(α, β, γ)` with `α, β ≥ 1`, `γ ≥ 0`, `2α + 2β + γ = g + 1` and
/// `N = g + 1 + 6α + 3β + γ`, in lexicographic order.
pub fn partitions(g: usize, n: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for alpha in 1..=g.div_ceil(2) {
        for beta in 1..=g.div_ceil(2) {
            let Some(gamma) = (g + 1).checked_sub(2 * alpha + 2 * beta) else {
                continue;
            };
            let order = g + 1 + 6 * alpha + 3 * beta + gamma;
            debug_assert_eq!(order, 2 * g + 2 + 4 * alpha + beta);
            if order == n {
                out.push((alpha, beta, gamma));
            }
        }
    }
    out
}

/// Every order reachable by [`partitions`] for genus `g`, ascending.
///
/// Not clipped to `[3g, 4g+1]`: for `g ≥ 8` the smallest triple already gives
/// `2g + 7 < 3g`.
pub fn achievable_orders(g: usize) -> Vec<usize> {
    (0..=6 * g + 6)
        .filter(|&n| !partitions(g, n).is_empty())
        .collect()
}

/// `(r·q·a₁² − q²·a₁ + r·a₁ + q)² + 4·(r·q·a₁ − q² + r)`, quasi-period 4.
///
/// Odd genus: `r`, `q` constants with `q² ≠ r`, `g = 2 deg a₁ − 1`, order `5(g+1)/2`.
/// Even genus: `q` constant, `r` linear, `g = 2 deg a₁`, order `5g/2 + 2`.
pub fn quartic_family(
    a1: &QPoly,
    r: &QPoly,
    q: &QPoly,
) -> Result<HyperellipticCurve, ConstructError> {
    let invalid = |m: &str| ConstructError::InvalidParams(m.to_string());
    let da = a1
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| invalid("deg a1 must be >= 1"))?;
    if q.degree() != Some(0) {
        return Err(invalid("q must be a nonzero constant"));
    }
    let (genus, order) = match r.degree() {
        Some(0) => {
            if q * q == *r {
                return Err(ConstructError::QSquaredEqualsR);
            }
            let g = 2 * da - 1;
            (g, 5 * (g + 1) / 2)
        }
        Some(1) => {
            let g = 2 * da;
            (g, 5 * g / 2 + 2)
        }
        _ => return Err(invalid("r must be a nonzero constant or linear")),
    };
    let rq = r * q;
    let qq = q * q;
    let inner = &(&(&(&rq * &(a1 * a1)) - &(&qq * a1)) + &(r * a1)) + q;
    let tail = &(&(&rq * a1) - &qq) + r;
    let f = &(&inner * &inner) + &tail.scale(&rat(4));
    let mut params = BTreeMap::new();
    for (name, poly) in [("A", a1), ("R", r), ("Q", q)] {
        for (i, c) in poly.coeffs().iter().enumerate() {
            params.insert(format!("{name}{i}"), c.clone());
        }
    }
    HyperellipticCurve::new("quartic", genus, f, Some(order as u64), params)
}

/// The explicit one- to three-parameter families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BuiltinFamily {
    Ct10,
    C13,
    C15,
    C17,
    C18,
    C21,
}

impl BuiltinFamily {
    pub const ALL: [BuiltinFamily; 6] = [
        BuiltinFamily::Ct10,
        BuiltinFamily::C13,
        BuiltinFamily::C15,
        BuiltinFamily::C17,
        BuiltinFamily::C18,
        BuiltinFamily::C21,
    ];

    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            BuiltinFamily::Ct10 => &["t"],
            BuiltinFamily::C13 => &["u", "t"],
            BuiltinFamily::C15 | BuiltinFamily::C17 => &["s", "t"],
            BuiltinFamily::C18 | BuiltinFamily::C21 => &["s", "t", "u"],
        }
    }

    pub fn genus(&self) -> usize {
        match self {
            BuiltinFamily::Ct10 | BuiltinFamily::C13 => 3,
            BuiltinFamily::C15 => 4,
            BuiltinFamily::C17 | BuiltinFamily::C18 | BuiltinFamily::C21 => 5,
        }
    }

    pub fn order(&self) -> u64 {
        match self {
            BuiltinFamily::Ct10 => 10,
            BuiltinFamily::C13 => 13,
            BuiltinFamily::C15 => 15,
            BuiltinFamily::C17 => 17,
            BuiltinFamily::C18 => 18,
            BuiltinFamily::C21 => 21,
        }
    }
}

impl fmt::Display for BuiltinFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for BuiltinFamily {
    type Err = ConstructError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BuiltinFamily::ALL
            .into_iter()
            .find(|fam| fam.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| ConstructError::UnknownLabel(s.to_string()))
    }
}

/// Emits the family polynomial at the given parameter values.
///
/// The polynomials are written out term by term as published rather than
/// routed through [`theorem_polynomial`]; tests compare the two.
pub fn builtin_family(
    family: BuiltinFamily,
    params: &BTreeMap<String, Rational>,
) -> Result<HyperellipticCurve, ConstructError> {
    let get = |name: &str| {
        params
            .get(name)
            .cloned()
            .ok_or_else(|| ConstructError::MissingParam(name.to_string()))
    };
    let values: Vec<Rational> = family
        .param_names()
        .iter()
        .map(|n| get(n))
        .collect::<Result<_, _>>()?;
    let x = Poly::x(&());
    let c = |v: &Rational| Poly::constant(v.clone());
    let k = |n: i64| Poly::constant(rat(n));
    let four = k(4);

    // f together with (a1, r, u) when the family comes from the construction
    let (f, decomposition) = match family {
        BuiltinFamily::Ct10 => {
            // (2(x²+t)² + (x²+t) + 1)² + 4(2(x²+t) + 1)
            let w = &(&x * &x) + &c(&values[0]);
            let inner = &(&(&k(2) * &(&w * &w)) + &w) + &k(1);
            (
                &(&inner * &inner) + &(&four * &(&(&k(2) * &w) + &k(1))),
                None,
            )
        }
        BuiltinFamily::C13 => {
            let (u, t) = (&values[0], &values[1]);
            // (x+t)²(2t + u + x + u(x+t)(x+2t)²)² + 4(t + x + u(x+t)²(x+2t))
            let xt = &x + &c(t);
            let x2t = &x + &c(&(t * rat(2)));
            let inner = &(&(&c(&(t * rat(2))) + &c(u)) + &x) + &(&c(u) * &(&xt * &(&x2t * &x2t)));
            let tail = &(&c(t) + &x) + &(&c(u) * &(&(&xt * &xt) * &x2t));
            let f = &(&(&xt * &xt) * &(&inner * &inner)) + &(&four * &tail);
            (f, Some((x2t, xt, c(u))))
        }
        BuiltinFamily::C15 => {
            let (s, t) = (&values[0], &values[1]);
            // (x+t)²(x + (x−s)(1 + x²(x+t)))² + 4(t + x + x(−s+x)(t+x)²)
            let xt = &x + &c(t);
            let xs = &x - &c(s);
            let inner = &x + &(&xs * &(&k(1) + &(&(&x * &x) * &xt)));
            let tail = &(&c(t) + &x) + &(&(&x * &xs) * &(&xt * &xt));
            let f = &(&(&xt * &xt) * &(&inner * &inner)) + &(&four * &tail);
            (f, Some((x.clone(), xt, xs)))
        }
        BuiltinFamily::C17 => {
            let (s, t) = (&values[0], &values[1]);
            // 4(t + x + x(t+x)²(x²+s)) + (x+t)²(x + (x²+s)(1 + x²(x+t)))²
            let xt = &x + &c(t);
            let x2s = &(&x * &x) + &c(s);
            let tail = &(&c(t) + &x) + &(&(&x * &(&xt * &xt)) * &x2s);
            let inner = &x + &(&x2s * &(&k(1) + &(&(&x * &x) * &xt)));
            let f = &(&four * &tail) + &(&(&xt * &xt) * &(&inner * &inner));
            (f, Some((x.clone(), xt, x2s)))
        }
        BuiltinFamily::C18 => {
            let (s, t, u) = (&values[0], &values[1], &values[2]);
            // (x²+s)²(t + u + x + u(x+t)²(x²+s))² + 4(s + x² + u(x+t)(x²+s)²)
            let xt = &x + &c(t);
            let x2s = &(&x * &x) + &c(s);
            let inner = &(&(&c(t) + &c(u)) + &x) + &(&c(u) * &(&(&xt * &xt) * &x2s));
            let tail = &(&c(s) + &(&x * &x)) + &(&c(u) * &(&xt * &(&x2s * &x2s)));
            let f = &(&(&x2s * &x2s) * &(&inner * &inner)) + &(&four * &tail);
            (f, Some((xt, x2s, c(u))))
        }
        BuiltinFamily::C21 => {
            let (s, t, u) = (&values[0], &values[1], &values[2]);
            // 4(s + x + u(x+s)²(x²+t)) + (x+s)²(t + u + x² + u(x+s)(x²+t)²)²
            let xs = &x + &c(s);
            let x2t = &(&x * &x) + &c(t);
            let tail = &(&c(s) + &x) + &(&c(u) * &(&(&xs * &xs) * &x2t));
            let inner = &(&(&c(t) + &c(u)) + &(&x * &x)) + &(&c(u) * &(&xs * &(&x2t * &x2t)));
            let f = &(&four * &tail) + &(&(&xs * &xs) * &(&inner * &inner));
            (f, Some((x2t, xs, c(u))))
        }
    };

    let named: BTreeMap<String, Rational> = family
        .param_names()
        .iter()
        .zip(values)
        .map(|(n, v)| (n.to_string(), v))
        .collect();
    let curve = HyperellipticCurve::new(
        family.to_string(),
        family.genus(),
        f,
        Some(family.order()),
        named,
    )?;
    Ok(match decomposition {
        Some((a1, r, u)) => match ConstructionParams::from_polys(a1, r, u) {
            Ok(p) => curve.with_construction(p),
            // u = 0 leaves the construction; the degree check above already rejected it
            Err(_) => curve,
        },
        None => curve,
    })
}

/// Parameter map from `(name, value)` pairs.
pub fn param_map<'a>(
    pairs: impl IntoIterator<Item = (&'a str, Rational)>,
) -> BTreeMap<String, Rational> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
