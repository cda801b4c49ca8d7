//! Recurrence coefficients prepared for fast numeric evaluation.
//!
//! At a fixed point every coefficient `c_s(n, x, k)` collapses to a polynomial
//! in `n`, which is then evaluated by Horner's rule at each step.

use super::flops::FlopCounter;
use super::scalar::{CDd, Field};
use crate::symcore::{Poly, Var};
use std::collections::BTreeMap;

#[derive(Clone, Debug)]
struct Term {
    n_pow: u32,
    /// Exponents of every variable except `n`, in `Poly` order.
    exps: Vec<(usize, u32)>,
    coeff: CDd,
}

#[derive(Clone, Debug)]
pub struct CompiledCoeffs {
    nvars: usize,
    n_index: usize,
    pub shifts: Vec<i32>,
    terms: Vec<Vec<Term>>,
    max_pow: Vec<u32>,
    n_degree: Vec<u32>,
    /// Every numeric coefficient is real.
    pub real: bool,
}

/// Coefficients at one point: for each shift, ascending coefficients in `n`.
#[derive(Clone, Debug)]
pub struct PointCoeffs<T> {
    pub shifts: Vec<i32>,
    pub polys: Vec<Vec<T>>,
}

impl CompiledCoeffs {
    pub fn new(dim: usize, coefficients: &BTreeMap<i32, Poly>) -> Self {
        let n_index = Var::N.index(dim);
        let nvars = dim + 3;
        let mut max_pow = vec![0u32; nvars];
        let mut shifts = Vec::new();
        let mut terms = Vec::new();
        let mut n_degree = Vec::new();
        for (&s, p) in coefficients {
            let mut ts = Vec::new();
            let mut deg = 0;
            for (m, c) in p.terms() {
                let mut exps = Vec::new();
                let mut n_pow = 0;
                for (v, &e) in m.0.iter().enumerate() {
                    if v == n_index {
                        n_pow = e;
                    } else if e > 0 {
                        exps.push((v, e));
                        max_pow[v] = max_pow[v].max(e);
                    }
                }
                deg = deg.max(n_pow);
                ts.push(Term { n_pow, exps, coeff: CDd::from_gauss(c) });
            }
            shifts.push(s);
            terms.push(ts);
            n_degree.push(deg);
        }
        let real = terms.iter().flatten().all(|t: &Term| t.coeff.im.hi == 0.0 && t.coeff.im.lo == 0.0);
        CompiledCoeffs { nvars, n_index, shifts, terms, max_pow, n_degree, real }
    }

    /// Collapse onto a point. `vals` holds the value of every variable in
    /// `Poly` order; the `n` slot is ignored.
    pub fn at_point<T: Field>(&self, vals: &[T], flops: &mut FlopCounter) -> PointCoeffs<T> {
        debug_assert_eq!(vals.len(), self.nvars);
        let mut pows: Vec<Vec<T>> = Vec::with_capacity(self.nvars);
        for (v, &mp) in self.max_pow.iter().enumerate() {
            let mut row = Vec::with_capacity(mp as usize + 1);
            if v != self.n_index && mp > 0 {
                row.push(T::zero()); // placeholder for the zeroth power, never read
                row.push(vals[v]);
                for e in 2..=mp as usize {
                    let next = row[e - 1] * vals[v];
                    row.push(next);
                }
                T::charge_scale(flops, mp as u64 - 1);
            }
            pows.push(row);
        }
        let mut polys = Vec::with_capacity(self.terms.len());
        for (ts, &deg) in self.terms.iter().zip(&self.n_degree) {
            let mut poly = vec![T::zero(); deg as usize + 1];
            for t in ts {
                let mut acc = T::from_cdd(t.coeff);
                for &(v, e) in &t.exps {
                    acc = acc * pows[v][e as usize];
                }
                T::charge_scale(flops, t.exps.len() as u64);
                T::charge_add(flops, 1);
                poly[t.n_pow as usize] = poly[t.n_pow as usize] + acc;
            }
            polys.push(poly);
        }
        PointCoeffs { shifts: self.shifts.clone(), polys }
    }
}

impl<T: Field> PointCoeffs<T> {
    /// Coefficient of slot `idx` at a concrete `n`.
    pub fn eval(&self, idx: usize, n: f64, flops: &mut FlopCounter) -> T {
        let p = &self.polys[idx];
        let mut acc = *p.last().unwrap();
        for c in p.iter().rev().skip(1) {
            acc = acc.scale_f64(n) + *c;
        }
        let deg = p.len() as u64 - 1;
        T::charge_scale(flops, deg);
        T::charge_add(flops, deg);
        acc
    }
}
