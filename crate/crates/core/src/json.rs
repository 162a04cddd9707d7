//! JSON documents exchanged by the command-line tool.
//!
//! Rationals are strings, `"num/den"` or just `"num"`; polynomials are
//! ascending coefficient arrays of such strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{
    decode_coeffs, decode_rational, encode_coeffs, AlgebraError, Poly, QPoly, Rational,
};
use crate::construct::{
    builtin_family, theorem_curve, BuiltinFamily, ConstructError, ConstructionParams,
    HyperellipticCurve,
};
use crate::contfrac::{CfExpansion, ExpansionOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocError {
    #[error("{field}: stored value does not match the recomputed one")]
    Mismatch { field: &'static str },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionDoc {
    pub genus: usize,
    pub a0: Vec<String>,
    pub quotients: Vec<Vec<String>>,
    pub quasi_period: usize,
    pub period: usize,
    pub skew: String,
    pub order: u64,
}

impl ExpansionDoc {
    pub fn new(e: &CfExpansion<Rational>) -> Self {
        ExpansionDoc {
            genus: e.genus(),
            a0: encode_coeffs(e.a0()),
            quotients: e.quotients().iter().map(encode_coeffs).collect(),
            quasi_period: e.quasi_period(),
            period: e.period(),
            skew: e.skew().to_string(),
            order: crate::contfrac::torsion_order(e),
        }
    }
}

/// Emitted instead of an expansion when the degree budget runs out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonPeriodicDoc {
    pub periodic: bool,
    pub steps: usize,
    pub degree_sum: u64,
    pub bound: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutcomeDoc {
    Periodic(ExpansionDoc),
    NotPeriodic(NonPeriodicDoc),
}

impl OutcomeDoc {
    pub fn new(o: &ExpansionOutcome<Rational>) -> Self {
        match o {
            ExpansionOutcome::Periodic(e) => OutcomeDoc::Periodic(ExpansionDoc::new(e)),
            ExpansionOutcome::NotPeriodicWithinBound {
                steps,
                degree_sum,
                bound,
            } => OutcomeDoc::NotPeriodic(NonPeriodicDoc {
                periodic: false,
                steps: *steps,
                degree_sum: *degree_sum,
                bound: *bound,
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub label: String,
    pub genus: usize,
    pub params: BTreeMap<String, String>,
    pub f: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted_order: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<String>,
}

impl CurveDoc {
    pub fn new(c: &HyperellipticCurve) -> Self {
        CurveDoc {
            label: c.label.clone(),
            genus: c.genus,
            params: c
                .params
                .iter()
                .map(|(k, v)| (k.clone(), v.to_string()))
                .collect(),
            f: encode_coeffs(&c.f),
            predicted_order: c.predicted_order,
            discriminant: Some(c.discriminant().to_string()),
        }
    }

    /// Rebuilds the curve, re-deriving the construction data for built-in and
    /// theorem labels, and checks every stored field against the recomputation.
    pub fn to_curve(&self) -> Result<HyperellipticCurve, DocError> {
        let f = decode_coeffs(&self.f)?;
        let params = self
            .params
            .iter()
            .map(|(k, v)| Ok((k.clone(), decode_rational(v)?)))
            .collect::<Result<BTreeMap<_, _>, AlgebraError>>()?;
        let curve = match self.rebuild(&params)? {
            Some(c) => {
                if c.f != f {
                    return Err(DocError::Mismatch { field: "f" });
                }
                c
            }
            None => HyperellipticCurve::new(
                self.label.clone(),
                self.genus,
                f,
                self.predicted_order,
                params,
            )?,
        };
        if curve.genus != self.genus {
            return Err(DocError::Mismatch { field: "genus" });
        }
        if self.predicted_order.is_some() && curve.predicted_order != self.predicted_order {
            return Err(DocError::Mismatch {
                field: "predicted_order",
            });
        }
        if let Some(d) = &self.discriminant {
            if decode_rational(d)? != *curve.discriminant() {
                return Err(DocError::Mismatch {
                    field: "discriminant",
                });
            }
        }
        Ok(curve)
    }

    fn rebuild(
        &self,
        params: &BTreeMap<String, Rational>,
    ) -> Result<Option<HyperellipticCurve>, DocError> {
        if let Ok(family) = self.label.parse::<BuiltinFamily>() {
            return Ok(Some(builtin_family(family, params)?));
        }
        if self.label.starts_with("theorem(") {
            let poly = |prefix: char| -> QPoly {
                let mut coeffs = Vec::new();
                while let Some(c) = params.get(&format!("{prefix}{}", coeffs.len())) {
                    coeffs.push(c.clone());
                }
                Poly::new(coeffs, ())
            };
            let p = ConstructionParams::from_polys(poly('A'), poly('R'), poly('U'))?;
            let c = theorem_curve(&p)?;
            if c.label != self.label {
                return Err(DocError::Mismatch { field: "label" });
            }
            return Ok(Some(c));
        }
        Ok(None)
    }
}

/// One line of `search` output: the curve plus its certified order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchRecord {
    #[serde(flatten)]
    pub curve: CurveDoc,
    pub order: u64,
}
