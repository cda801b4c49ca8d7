//! Order-parametric derivative recurrences.
//!
//! Differentiating `Σ_i l_i(x) ∂^i_{x1} G = 0` n times, with each `l_i`
//! expanded in powers of `x1`, gives the large-|x1| recurrence
//! `Σ_s c_s(n, x) ∂^{n+s} G = 0`. Setting `x1 = 0` gives the small-|x1|
//! recurrence between on-hyperplane values `(∂^k G)|_{x1=0}`.

pub mod artifact;

use crate::error::{Error, Result};
use crate::pde2ode::OdeInX1;
use crate::symcore::{primitive_many, shift_product_rule, GaussRat, MultiIndex, Poly, Var};
use std::collections::BTreeMap;

/// `Σ_{s=min_shift}^{max_shift} coefficients[s] · ∂^{n+s}_{x1} G = 0` for all
/// `n ≥ 0`, terms with a negative derivative index being absent.
#[derive(Clone, Debug, PartialEq)]
pub struct Recurrence {
    pub dimension: usize,
    pub min_shift: i32,
    pub max_shift: i32,
    pub coefficients: BTreeMap<i32, Poly>,
    pub source_ode_order: usize,
    pub highest_x1_power: u32,
}

/// `Σ_s coefficients[s] · (∂^{n+s} G)|_{x1=0} = 0`, top shift 0. Holds for
/// `n ≥ -min_shift`; below that the renormalized shift maps to a negative
/// order of the parent recurrence.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallRecurrence {
    pub dimension: usize,
    pub coefficients: BTreeMap<i32, Poly>,
}

impl Recurrence {
    pub fn order(&self) -> i32 {
        self.max_shift - self.min_shift
    }

    pub fn leading(&self) -> &Poly {
        &self.coefficients[&self.max_shift]
    }

    /// The coefficients at a concrete `n` (exact).
    pub fn at_n(&self, n: i64) -> BTreeMap<i32, Poly> {
        let ni = Var::N.index(self.dimension);
        self.coefficients
            .iter()
            .map(|(&s, p)| (s, p.subst(ni, &GaussRat::from_int(n))))
            .collect()
    }

    /// Same recurrence up to a polynomial multiple (cross-multiplication).
    pub fn equivalent(&self, other: &Recurrence) -> bool {
        if self.min_shift != other.min_shift || self.max_shift != other.max_shift {
            return false;
        }
        let (la, lb) = (self.leading(), other.leading());
        (self.min_shift..=self.max_shift).all(|s| {
            let a = self.coefficients.get(&s).cloned().unwrap_or_else(|| Poly::zero(self.dimension));
            let b = other.coefficients.get(&s).cloned().unwrap_or_else(|| Poly::zero(self.dimension));
            a.mul(lb) == b.mul(la)
        })
    }
}

impl SmallRecurrence {
    pub fn min_shift(&self) -> i32 {
        *self.coefficients.keys().next().unwrap()
    }

    pub fn order(&self) -> i32 {
        -self.min_shift()
    }

    pub fn leading(&self) -> &Poly {
        &self.coefficients[&0]
    }
}

pub fn ode_to_large_recurrence(ode: &OdeInX1) -> Result<Recurrence> {
    let d = ode.dimension;
    let mut acc: BTreeMap<i32, Poly> = BTreeMap::new();
    for (i, l) in ode.coefficients.iter().enumerate() {
        for (j, qij) in l.coeffs_in(0) {
            for (lshift, coef) in shift_product_rule(j, d) {
                let s = i as i32 - lshift as i32;
                let e = acc.entry(s).or_insert_with(|| Poly::zero(d));
                *e = e.add(&qij.mul(&coef));
            }
        }
    }
    acc.retain(|_, p| !p.is_zero());
    if acc.is_empty() {
        return Err(Error::Internal("recurrence vanished identically".into()));
    }
    let acc = canonicalize(d, acc);
    Ok(Recurrence {
        dimension: d,
        min_shift: *acc.keys().next().unwrap(),
        max_shift: *acc.keys().next_back().unwrap(),
        coefficients: acc,
        source_ode_order: ode.order(),
        highest_x1_power: ode.highest_x1_power(),
    })
}

pub fn specialize_small_recurrence(rec: &Recurrence) -> Result<SmallRecurrence> {
    let d = rec.dimension;
    let zero = GaussRat::zero();
    let mut at0: BTreeMap<i32, Poly> = rec
        .coefficients
        .iter()
        .map(|(&s, p)| (s, p.subst(0, &zero)))
        .filter(|(_, p)| !p.is_zero())
        .collect();
    if at0.is_empty() {
        return Err(Error::DegenerateRecurrence("all coefficients vanish at x1 = 0".into()));
    }
    // renumber so the top shift is 0: with m = n + top, n = m − top
    let top = *at0.keys().next_back().unwrap();
    let ni = Var::N.index(d);
    let n_minus = Poly::var(d, Var::N).sub(&Poly::int(d, top as i64));
    at0 = at0
        .into_iter()
        .map(|(s, p)| (s - top, p.subst_poly(ni, &n_minus)))
        .collect();
    Ok(SmallRecurrence { dimension: d, coefficients: canonicalize(d, at0) })
}

pub fn recurrence_order(rec: &Recurrence) -> i32 {
    rec.order()
}

/// Divide out a common spatial monomial and the rational content.
fn canonicalize(d: usize, coeffs: BTreeMap<i32, Poly>) -> BTreeMap<i32, Poly> {
    let mut common: Option<MultiIndex> = None;
    for p in coeffs.values() {
        let m = p.min_exponents().unwrap();
        common = Some(match common {
            None => m,
            Some(c) => MultiIndex(c.0.iter().zip(&m.0).map(|(a, b)| *a.min(b)).collect()),
        });
    }
    let mut common = common.unwrap();
    for e in common.0.iter_mut().skip(d) {
        *e = 0;
    }
    let keys: Vec<i32> = coeffs.keys().rev().cloned().collect();
    let polys: Vec<Poly> = keys
        .iter()
        .map(|s| coeffs[s].div_monomial(&common).expect("common monomial divides"))
        .collect();
    let (_, polys) = primitive_many(&polys).expect("nonzero");
    keys.into_iter().zip(polys).collect()
}
