//! Exact multivariate polynomials over Gaussian rationals.
//!
//! Variable layout for dimension `d`: `x1..xd, r, n, k` (indices `0..d+3`).
//! `r` obeys `r^2 = x1^2 + ... + xd^2`; every stored monomial has r-exponent
//! at most one.

use super::gauss::GaussRat;
use super::multi_index::{factorial, MultiIndex};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    /// 1-based spatial variable `x_i`.
    X(usize),
    R,
    N,
    K,
}

impl Var {
    pub fn index(self, dim: usize) -> usize {
        match self {
            Var::X(i) => {
                assert!(i >= 1 && i <= dim, "x{} out of range for d={}", i, dim);
                i - 1
            }
            Var::R => dim,
            Var::N => dim + 1,
            Var::K => dim + 2,
        }
    }

    pub fn name(self) -> String {
        match self {
            Var::X(i) => format!("x{}", i),
            Var::R => "r".into(),
            Var::N => "n".into(),
            Var::K => "k".into(),
        }
    }

    pub fn from_index(dim: usize, idx: usize) -> Var {
        if idx < dim {
            Var::X(idx + 1)
        } else if idx == dim {
            Var::R
        } else if idx == dim + 1 {
            Var::N
        } else {
            Var::K
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    dim: usize,
    terms: BTreeMap<MultiIndex, GaussRat>,
}

impl Poly {
    pub fn zero(dim: usize) -> Self {
        Poly { dim, terms: BTreeMap::new() }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, GaussRat::one())
    }

    pub fn constant(dim: usize, c: GaussRat) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::zeros(dim + 3), c);
        p
    }

    pub fn int(dim: usize, c: i64) -> Self {
        Self::constant(dim, GaussRat::from_int(c))
    }

    pub fn var(dim: usize, v: Var) -> Self {
        Self::var_pow(dim, v, 1)
    }

    pub fn var_pow(dim: usize, v: Var, e: u32) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(MultiIndex::unit(dim + 3, v.index(dim), e), GaussRat::one());
        p
    }

    pub fn monomial(dim: usize, exps: MultiIndex, c: GaussRat) -> Self {
        assert_eq!(exps.len(), dim + 3);
        let mut p = Self::zero(dim);
        p.add_term(exps, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nvars(&self) -> usize {
        self.dim + 3
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &GaussRat)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_zero())
    }

    pub fn constant_term(&self) -> GaussRat {
        self.terms
            .get(&MultiIndex::zeros(self.nvars()))
            .cloned()
            .unwrap_or_else(GaussRat::zero)
    }

    /// Largest monomial in graded lex order with its coefficient.
    pub fn leading(&self) -> Option<(&MultiIndex, &GaussRat)> {
        self.terms.iter().next_back()
    }

    /// Add `c * m` to `self`, applying the `r^2` rewrite.
    pub fn add_term(&mut self, m: MultiIndex, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let ri = self.dim;
        if m.0[ri] >= 2 {
            for (mm, cc) in reduce_r(self.dim, m, c) {
                self.add_reduced(mm, cc);
            }
        } else {
            self.add_reduced(m, c);
        }
    }

    fn add_reduced(&mut self, m: MultiIndex, c: GaussRat) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        self.check_dim(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_reduced(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.check_dim(o);
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_reduced(m.clone(), -c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        self.check_dim(o);
        let mut out = Poly::zero(self.dim);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                out.add_term(ma.add(mb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, s: &GaussRat) -> Poly {
        if s.is_zero() {
            return Poly::zero(self.dim);
        }
        Poly {
            dim: self.dim,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn scale_rat(&self, s: &BigRational) -> Poly {
        self.scale(&GaussRat::real(s.clone()))
    }

    pub fn mul_monomial(&self, m: &MultiIndex) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (mm, c) in &self.terms {
            out.add_term(mm.add(m), c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one(self.dim);
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Quotient of exact division. Division is carried out in the free
    /// polynomial ring (`r` as an ordinary variable) and the result is checked
    /// by multiplying back.
    pub fn exact_divide(&self, b: &Poly) -> Result<Poly> {
        self.check_dim(b);
        let (lm_b, lc_b) = b
            .leading()
            .ok_or_else(|| Error::Division("division by zero polynomial".into()))?;
        let lc_inv = lc_b.inv().expect("nonzero leading coefficient");
        let mut rem: BTreeMap<MultiIndex, GaussRat> = self.terms.clone();
        let mut quot = Poly::zero(self.dim);
        let mut leftover: BTreeMap<MultiIndex, GaussRat> = BTreeMap::new();
        while let Some((m, c)) = rem.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            match m.checked_sub(lm_b) {
                Some(qm) => {
                    let qc = &c * &lc_inv;
                    for (mb, cb) in &b.terms {
                        let key = qm.add(mb);
                        let delta = &qc * cb;
                        let e = rem.entry(key.clone()).or_insert_with(GaussRat::zero);
                        *e = &*e - &delta;
                        if e.is_zero() {
                            rem.remove(&key);
                        }
                    }
                    quot.add_reduced(qm, qc);
                }
                None => {
                    rem.remove(&m);
                    leftover.insert(m, c);
                }
            }
        }
        if !leftover.is_empty() {
            return Err(Error::Division("nonzero remainder".into()));
        }
        if quot.mul(b) != *self {
            return Err(Error::Division("quotient does not multiply back".into()));
        }
        Ok(quot)
    }

    /// Partial derivative treating every variable (including `r`) as
    /// independent.
    pub fn diff(&self, var: usize) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[var];
            if e == 0 {
                continue;
            }
            let mut mm = m.clone();
            mm.0[var] -= 1;
            out.add_reduced(mm, c * &GaussRat::from_int(e as i64));
        }
        out
    }

    /// Substitute a constant for one variable.
    pub fn subst(&self, var: usize, value: &GaussRat) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut mm = m.clone();
            mm.0[var] = 0;
            let mut cc = c.clone();
            for _ in 0..e {
                cc = &cc * value;
            }
            out.add_reduced(mm, cc);
        }
        out
    }

    /// Substitute a polynomial for one variable.
    pub fn subst_poly(&self, var: usize, value: &Poly) -> Poly {
        let mut out = Poly::zero(self.dim);
        for (e, c) in self.coeffs_in(var) {
            out = out.add(&c.mul(&value.pow(e)));
        }
        out
    }

    /// Expansion `self = Σ_e coeff_e · v^e`.
    pub fn coeffs_in(&self, var: usize) -> BTreeMap<u32, Poly> {
        let mut out: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.0[var];
            let mut mm = m.clone();
            mm.0[var] = 0;
            out.entry(e)
                .or_insert_with(|| Poly::zero(self.dim))
                .add_reduced(mm, c.clone());
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).max()
    }

    pub fn min_degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.0[var]).min()
    }

    pub fn uses_var(&self, var: usize) -> bool {
        self.terms.keys().any(|m| m.0[var] > 0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.order()).max().unwrap_or(0)
    }

    /// Divide every monomial by `m`; fails if some monomial is not divisible.
    pub fn div_monomial(&self, m: &MultiIndex) -> Result<Poly> {
        let mut out = Poly::zero(self.dim);
        for (mm, c) in &self.terms {
            let q = mm
                .checked_sub(m)
                .ok_or_else(|| Error::Division("monomial does not divide".into()))?;
            out.add_reduced(q, c.clone());
        }
        Ok(out)
    }

    pub fn eval_c64(&self, vals: &[Complex64]) -> Complex64 {
        assert_eq!(vals.len(), self.nvars());
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = c.to_c64();
            for (v, &e) in vals.iter().zip(&m.0) {
                for _ in 0..e {
                    t *= v;
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact evaluation at rational/Gaussian-rational values of all variables.
    pub fn eval_exact(&self, vals: &[GaussRat]) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in vals.iter().zip(&m.0) {
                for _ in 0..e {
                    t = &t * v;
                }
            }
            acc += &t;
        }
        acc
    }

    /// Split into `(unit * content, primitive)` with the primitive part having
    /// coprime Gaussian-integer coefficients and leading coefficient in the
    /// quadrant `re > 0, im >= 0`.
    pub fn primitive(&self) -> (GaussRat, Poly) {
        primitive_many(std::slice::from_ref(self))
            .map(|(f, mut v)| (f, v.pop().unwrap()))
            .unwrap_or((GaussRat::one(), self.clone()))
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Option<MultiIndex> {
        let mut it = self.terms.keys();
        let first = it.next()?.clone();
        Some(it.fold(first, |acc, m| {
            MultiIndex(acc.0.iter().zip(&m.0).map(|(a, b)| *a.min(b)).collect())
        }))
    }

    /// Re-embed in dimension `dim` by keeping the listed x-variables (1-based,
    /// in order) and dropping/zeroing the others. Panics if a dropped variable
    /// is used.
    pub fn with_dim(&self, dim: usize) -> Poly {
        let mut out = Poly::zero(dim);
        for (m, c) in &self.terms {
            let mut v = vec![0u32; dim + 3];
            for i in 0..self.dim.min(dim) {
                v[i] = m.0[i];
            }
            for i in dim..self.dim {
                assert_eq!(m.0[i], 0, "dropping used variable");
            }
            v[dim] = m.0[self.dim];
            v[dim + 1] = m.0[self.dim + 1];
            v[dim + 2] = m.0[self.dim + 2];
            out.add_term(MultiIndex(v), c.clone());
        }
        out
    }

    fn check_dim(&self, o: &Poly) {
        assert_eq!(self.dim, o.dim, "dimension mismatch in Poly arithmetic");
    }
}

/// Common normalization for a list of polynomials: multiply all by one
/// Gaussian rational `f` so that the combined coefficients are coprime
/// Gaussian integers and the leading coefficient of the first nonzero entry is
/// in the quadrant `re > 0, im >= 0`. Returns `(f, scaled)`; `None` if all are
/// zero.
pub fn primitive_many(polys: &[Poly]) -> Option<(GaussRat, Vec<Poly>)> {
    let lead = polys.iter().find(|p| !p.is_zero())?.leading().unwrap().1.clone();
    let unit = lead.unit_normalizer();
    let mut den_lcm = BigInt::one();
    for p in polys {
        for c in p.terms.values() {
            den_lcm = den_lcm.lcm(c.re.denom());
            den_lcm = den_lcm.lcm(c.im.denom());
        }
    }
    let mut num_gcd = BigInt::zero();
    for p in polys {
        for c in p.terms.values() {
            let a = (&c.re * BigRational::from_integer(den_lcm.clone())).to_integer();
            let b = (&c.im * BigRational::from_integer(den_lcm.clone())).to_integer();
            num_gcd = num_gcd.gcd(&a).gcd(&b);
        }
    }
    let s = BigRational::new(den_lcm, num_gcd.abs());
    let f = unit.scale(&s);
    Some((f.clone(), polys.iter().map(|p| p.scale(&f)).collect()))
}

fn reduce_r(dim: usize, m: MultiIndex, c: GaussRat) -> Vec<(MultiIndex, GaussRat)> {
    let e = m.0[dim];
    let q = e / 2;
    let mut base = m;
    base.0[dim] = e % 2;
    let mut out = Vec::new();
    let qf = factorial(q);
    for_each_composition(q, dim, &mut |parts: &[u32]| {
        let mut mm = base.clone();
        let mut den = BigInt::one();
        for (i, &j) in parts.iter().enumerate() {
            mm.0[i] += 2 * j;
            den *= factorial(j);
        }
        let coef = GaussRat::real(BigRational::new(qf.clone(), den));
        out.push((mm, &c * &coef));
    });
    out
}

/// Calls `f` for every composition of `total` into `parts` non-negative parts.
pub fn for_each_composition(total: u32, parts: usize, f: &mut dyn FnMut(&[u32])) {
    fn rec(rem: u32, i: usize, cur: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if i + 1 == cur.len() {
            cur[i] = rem;
            f(cur);
            return;
        }
        for j in 0..=rem {
            cur[i] = j;
            rec(rem - j, i + 1, cur, f);
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    let mut cur = vec![0; parts];
    rec(total, 0, &mut cur, f);
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::expr::print_poly(self))
    }
}
