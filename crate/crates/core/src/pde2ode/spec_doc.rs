//! PDE spec documents (TOML).
//!
//! ```toml
//! dimension = 2
//! order = 2
//!
//! [[terms]]
//! multi_index = [2, 0]
//! coefficient = "1"
//! ```

use crate::error::{Error, Result};
use crate::symcore::{parse_poly, print_poly, MultiIndex, Poly, VarPolicy};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq)]
pub struct PdeSpec {
    pub dimension: usize,
    pub order: u32,
    pub coefficients: BTreeMap<MultiIndex, Poly>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Doc {
    dimension: i64,
    order: i64,
    terms: Vec<DocTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DocTerm {
    multi_index: Vec<i64>,
    coefficient: String,
}

impl PdeSpec {
    /// Build and validate from `(multi-index, coefficient)` pairs.
    pub fn new(dimension: usize, order: u32, terms: Vec<(Vec<u32>, Poly)>) -> Result<Self> {
        let mut coefficients = BTreeMap::new();
        for (q, p) in terms {
            let q = MultiIndex::new(q);
            let e = coefficients.entry(q).or_insert_with(|| Poly::zero(dimension));
            *e = e.add(&p);
        }
        coefficients.retain(|_, p: &mut Poly| !p.is_zero());
        let spec = PdeSpec { dimension, order, coefficients };
        spec.validate().map_err(|m| Error::parse("spec", m))?;
        Ok(spec)
    }

    fn validate(&self) -> std::result::Result<(), String> {
        if self.dimension < 2 {
            return Err(format!("dimension must be >= 2, got {}", self.dimension));
        }
        if self.order < 1 {
            return Err("order must be >= 1".into());
        }
        for (q, p) in &self.coefficients {
            if q.len() != self.dimension {
                return Err(format!("multi-index {:?} has length {} but dimension is {}", q.0, q.len(), self.dimension));
            }
            if q.order() > self.order {
                return Err(format!("multi-index {:?} exceeds order {}", q.0, self.order));
            }
            if p.dim() != self.dimension {
                return Err("coefficient dimension mismatch".into());
            }
            let d = self.dimension;
            if p.uses_var(d) || p.uses_var(d + 1) {
                return Err("coefficients may not contain r or n".into());
            }
        }
        if !self.coefficients.iter().any(|(q, p)| q.order() == self.order && !p.is_zero()) {
            return Err(format!("no nonzero coefficient of order {}", self.order));
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: Doc = toml::from_str(text).map_err(|e| {
            let loc = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or_else(|| "document".into());
            Error::parse(loc, e.message().to_string())
        })?;
        if doc.dimension < 2 {
            return Err(Error::parse("dimension", format!("must be >= 2, got {}", doc.dimension)));
        }
        if doc.order < 1 {
            return Err(Error::parse("order", format!("must be >= 1, got {}", doc.order)));
        }
        let d = doc.dimension as usize;
        let c = doc.order as u32;
        let mut coefficients: BTreeMap<MultiIndex, Poly> = BTreeMap::new();
        for (j, t) in doc.terms.iter().enumerate() {
            let loc = format!("terms[{}]", j);
            if t.multi_index.len() != d {
                return Err(Error::parse(
                    format!("{}.multi_index", loc),
                    format!("length {} does not match dimension {}", t.multi_index.len(), d),
                ));
            }
            if t.multi_index.iter().any(|&e| e < 0) {
                return Err(Error::parse(format!("{}.multi_index", loc), "negative entry"));
            }
            let q = MultiIndex::new(t.multi_index.iter().map(|&e| e as u32).collect());
            if q.order() > c {
                return Err(Error::parse(
                    format!("{}.multi_index", loc),
                    format!("order {} exceeds declared order {}", q.order(), c),
                ));
            }
            let p = parse_poly(&t.coefficient, d, VarPolicy::PDE).map_err(|e| match e {
                Error::Parse { location, message } => {
                    Error::parse(format!("{}.coefficient {}", loc, location), message)
                }
                other => other,
            })?;
            if coefficients.contains_key(&q) {
                return Err(Error::parse(format!("{}.multi_index", loc), "duplicate multi-index"));
            }
            if !p.is_zero() {
                coefficients.insert(q, p);
            }
        }
        let spec = PdeSpec { dimension: d, order: c, coefficients };
        spec.validate().map_err(|m| Error::parse("terms", m))?;
        Ok(spec)
    }

    /// Canonical document text; terms in descending graded-lex order of the
    /// multi-index.
    pub fn to_document(&self) -> String {
        let doc = Doc {
            dimension: self.dimension as i64,
            order: self.order as i64,
            terms: self
                .coefficients
                .iter()
                .rev()
                .map(|(q, p)| DocTerm {
                    multi_index: q.0.iter().map(|&e| e as i64).collect(),
                    coefficient: print_poly(p),
                })
                .collect(),
        };
        toml::to_string(&doc).expect("serializable")
    }

    /// Multiply every coefficient by `s`.
    pub fn scaled(&self, s: &crate::symcore::GaussRat) -> PdeSpec {
        PdeSpec {
            dimension: self.dimension,
            order: self.order,
            coefficients: self.coefficients.iter().map(|(q, p)| (q.clone(), p.scale(s))).collect(),
        }
    }
}

fn line_col(text: &str, offset: usize) -> String {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
    format!("line {}, column {}", line, col)
}
