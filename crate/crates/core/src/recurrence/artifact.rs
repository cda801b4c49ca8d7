//! Text artifacts for derived ODEs and recurrences (TOML). `save(load(t)) == t`
//! for any `t` produced by `save`.

use super::{Recurrence, SmallRecurrence};
use crate::error::{Error, Result};
use crate::pde2ode::{Normalization, OdeInX1};
use crate::symcore::{parse_poly, print_poly, MultiIndex, Poly, VarPolicy};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdeDoc {
    kind: String,
    dimension: usize,
    variables: Vec<String>,
    order: usize,
    normalization: NormDoc,
    coefficients: Vec<OdeTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormDoc {
    x1_power: u32,
    r_power: u32,
    stripped: Vec<u32>,
    scale: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OdeTerm {
    derivative: usize,
    poly: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecDoc {
    kind: String,
    dimension: usize,
    variables: Vec<String>,
    min_shift: i32,
    max_shift: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    source_ode_order: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    highest_x1_power: Option<u32>,
    coefficients: Vec<RecTerm>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecTerm {
    shift: i32,
    poly: String,
}

const ODE_KIND: &str = "ode";
const LARGE_KIND: &str = "large-recurrence";
const SMALL_KIND: &str = "small-recurrence";

fn variables(dim: usize, first_x: usize, with_n: bool) -> Vec<String> {
    let mut v: Vec<String> = (first_x..=dim).map(|i| format!("x{}", i)).collect();
    if with_n {
        v.push("n".into());
    }
    v.push("k".into());
    v
}

fn toml_err(text: &str, e: toml::de::Error) -> Error {
    let loc = e
        .span()
        .map(|s| {
            let before = &text[..s.start.min(text.len())];
            format!("line {}", before.matches('\n').count() + 1)
        })
        .unwrap_or_else(|| "document".into());
    Error::parse(loc, e.message().to_string())
}

fn parse_field(text: &str, dim: usize, policy: VarPolicy, loc: String) -> Result<Poly> {
    parse_poly(text, dim, policy).map_err(|e| match e {
        Error::Parse { location, message } => Error::parse(format!("{} {}", loc, location), message),
        o => o,
    })
}

fn check_header(kind: &str, want: &str, vars: &[String], want_vars: &[String]) -> Result<()> {
    if kind != want {
        return Err(Error::parse("kind", format!("expected '{}', found '{}'", want, kind)));
    }
    if vars != want_vars {
        return Err(Error::parse("variables", format!("expected {:?}, found {:?}", want_vars, vars)));
    }
    Ok(())
}

pub fn save_ode(ode: &OdeInX1) -> String {
    let d = ode.dimension;
    let doc = OdeDoc {
        kind: ODE_KIND.into(),
        dimension: d,
        variables: variables(d, 1, false),
        order: ode.order(),
        normalization: NormDoc {
            x1_power: ode.normalization.x1_power,
            r_power: ode.normalization.r_power,
            stripped: ode.normalization.stripped.0[..d].to_vec(),
            scale: print_poly(&Poly::constant(d, ode.normalization.scale.clone())),
        },
        coefficients: ode
            .coefficients
            .iter()
            .enumerate()
            .map(|(i, p)| OdeTerm { derivative: i, poly: print_poly(p) })
            .collect(),
    };
    toml::to_string(&doc).expect("serializable")
}

pub fn load_ode(text: &str) -> Result<OdeInX1> {
    let doc: OdeDoc = toml::from_str(text).map_err(|e| toml_err(text, e))?;
    let d = doc.dimension;
    if d < 2 {
        return Err(Error::parse("dimension", "must be >= 2"));
    }
    check_header(&doc.kind, ODE_KIND, &doc.variables, &variables(d, 1, false))?;
    let policy = VarPolicy { allow_r: false, allow_n: false, allow_k: true };
    let mut coefficients = vec![Poly::zero(d); doc.order + 1];
    for (j, t) in doc.coefficients.iter().enumerate() {
        if t.derivative > doc.order {
            return Err(Error::parse(format!("coefficients[{}].derivative", j), "exceeds order"));
        }
        coefficients[t.derivative] = parse_field(&t.poly, d, policy, format!("coefficients[{}].poly", j))?;
    }
    if coefficients[doc.order].is_zero() {
        return Err(Error::parse("coefficients", "leading coefficient is zero"));
    }
    if doc.normalization.stripped.len() != d {
        return Err(Error::parse("normalization.stripped", "length does not match dimension"));
    }
    let scale = parse_field(&doc.normalization.scale, d, policy, "normalization.scale".into())?;
    if !scale.is_constant() {
        return Err(Error::parse("normalization.scale", "must be a constant"));
    }
    let mut stripped = doc.normalization.stripped.clone();
    stripped.extend([0, 0, 0]);
    Ok(OdeInX1 {
        dimension: d,
        coefficients,
        normalization: Normalization {
            x1_power: doc.normalization.x1_power,
            r_power: doc.normalization.r_power,
            stripped: MultiIndex(stripped),
            scale: scale.constant_term(),
        },
    })
}

pub fn save_large(rec: &Recurrence) -> String {
    let d = rec.dimension;
    let doc = RecDoc {
        kind: LARGE_KIND.into(),
        dimension: d,
        variables: variables(d, 1, true),
        min_shift: rec.min_shift,
        max_shift: rec.max_shift,
        source_ode_order: Some(rec.source_ode_order),
        highest_x1_power: Some(rec.highest_x1_power),
        coefficients: rec
            .coefficients
            .iter()
            .rev()
            .map(|(&s, p)| RecTerm { shift: s, poly: print_poly(p) })
            .collect(),
    };
    toml::to_string(&doc).expect("serializable")
}

fn load_terms(doc: &RecDoc, policy: VarPolicy, forbid_x1: bool) -> Result<BTreeMap<i32, Poly>> {
    let d = doc.dimension;
    let mut out = BTreeMap::new();
    for (j, t) in doc.coefficients.iter().enumerate() {
        let loc = format!("coefficients[{}]", j);
        if t.shift < doc.min_shift || t.shift > doc.max_shift {
            return Err(Error::parse(format!("{}.shift", loc), "outside [min_shift, max_shift]"));
        }
        let p = parse_field(&t.poly, d, policy, format!("{}.poly", loc))?;
        if forbid_x1 && p.uses_var(0) {
            return Err(Error::parse(format!("{}.poly", loc), "small recurrence may not contain x1"));
        }
        if out.insert(t.shift, p).is_some() {
            return Err(Error::parse(format!("{}.shift", loc), "duplicate shift"));
        }
    }
    out.retain(|_, p: &mut Poly| !p.is_zero());
    if out.keys().next() != Some(&doc.min_shift) || out.keys().next_back() != Some(&doc.max_shift) {
        return Err(Error::parse("coefficients", "extreme shifts must have nonzero coefficients"));
    }
    Ok(out)
}

pub fn load_large(text: &str) -> Result<Recurrence> {
    let doc: RecDoc = toml::from_str(text).map_err(|e| toml_err(text, e))?;
    let d = doc.dimension;
    if d < 2 {
        return Err(Error::parse("dimension", "must be >= 2"));
    }
    check_header(&doc.kind, LARGE_KIND, &doc.variables, &variables(d, 1, true))?;
    let coefficients = load_terms(&doc, VarPolicy::RECURRENCE, false)?;
    Ok(Recurrence {
        dimension: d,
        min_shift: doc.min_shift,
        max_shift: doc.max_shift,
        coefficients,
        source_ode_order: doc
            .source_ode_order
            .ok_or_else(|| Error::parse("source_ode_order", "missing"))?,
        highest_x1_power: doc
            .highest_x1_power
            .ok_or_else(|| Error::parse("highest_x1_power", "missing"))?,
    })
}

pub fn save_small(rec: &SmallRecurrence) -> String {
    let d = rec.dimension;
    let doc = RecDoc {
        kind: SMALL_KIND.into(),
        dimension: d,
        variables: variables(d, 2, true),
        min_shift: rec.min_shift(),
        max_shift: 0,
        source_ode_order: None,
        highest_x1_power: None,
        coefficients: rec
            .coefficients
            .iter()
            .rev()
            .map(|(&s, p)| RecTerm { shift: s, poly: print_poly(p) })
            .collect(),
    };
    toml::to_string(&doc).expect("serializable")
}

pub fn load_small(text: &str) -> Result<SmallRecurrence> {
    let doc: RecDoc = toml::from_str(text).map_err(|e| toml_err(text, e))?;
    let d = doc.dimension;
    if d < 2 {
        return Err(Error::parse("dimension", "must be >= 2"));
    }
    check_header(&doc.kind, SMALL_KIND, &doc.variables, &variables(d, 2, true))?;
    if doc.max_shift != 0 {
        return Err(Error::parse("max_shift", "small recurrence must have max_shift = 0"));
    }
    let coefficients = load_terms(&doc, VarPolicy::RECURRENCE, true)?;
    Ok(SmallRecurrence { dimension: d, coefficients })
}
