//! PDE with polynomial coefficients → ODE in `x1` satisfied by `G(|x|)`.
//!
//! Every spatial derivative of the PDE is first rewritten in terms of radial
//! derivatives `G^{(l)}(r)`; each radial derivative is then rewritten in terms
//! of `∂^m_{x1} G` using `∂_r = (r/x1) ∂_{x1}` (valid for `x1 > 0`; evenness in
//! `x1` extends the result). Coefficients live in polynomials over a monomial
//! denominator `x1^a r^b` until the final clearing step.

pub mod frac;
pub mod spec_doc;

use crate::error::{Error, Result};
use crate::symcore::{
    deriv_sqrt_composition, deriv_square_composition, enumerate_vector_partitions,
    faa_di_bruno_radial, primitive_many, GaussRat, MultiIndex, Poly, Var,
};
use frac::Frac;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
pub use spec_doc::PdeSpec;
pub use crate::verify::verify_ode;

/// `Σ_{i=0}^{a} l_i(x) ∂^i_{x1} G = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeInX1 {
    pub dimension: usize,
    pub coefficients: Vec<Poly>,
    pub normalization: Normalization,
}

/// What was done to the raw radial substitution to obtain the stored
/// coefficients: multiplied by `x1^x1_power r^r_power · scale` and divided by
/// the monomial `stripped`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    pub x1_power: u32,
    pub r_power: u32,
    pub stripped: MultiIndex,
    pub scale: GaussRat,
}

impl OdeInX1 {
    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    /// Largest power of `x1` over all coefficients (`h`).
    pub fn highest_x1_power(&self) -> u32 {
        self.coefficients.iter().filter_map(|p| p.degree_in(0)).max().unwrap_or(0)
    }

    /// `self` and `other` describe the same operator up to a polynomial
    /// multiple: `l_i · m_j = m_i · l_j` for all `i, j`.
    pub fn equivalent(&self, other: &OdeInX1) -> bool {
        if self.order() != other.order() {
            return false;
        }
        let a = self.order();
        // pivot on the top coefficients
        let (la, ma) = (&self.coefficients[a], &other.coefficients[a]);
        (0..=a).all(|i| self.coefficients[i].mul(ma) == other.coefficients[i].mul(la))
    }
}

/// How spatial derivatives are turned into radial ones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    /// Repeated `∂_{x_i} → (x_i/r) ∂_r` and `∂_r → (r/x1) ∂_{x1}`.
    Operators,
    /// Multivariate Faa di Bruno with `g = |x|^2`, the `√z` rule, and the
    /// one-dimensional Faa di Bruno / squared-input rule for `∂^j_r x1`.
    ChainRules,
}

pub fn pde_to_ode(pde: &PdeSpec) -> Result<OdeInX1> {
    pde_to_ode_with(pde, Route::Operators)
}

pub fn pde_to_ode_with(pde: &PdeSpec, route: Route) -> Result<OdeInX1> {
    let d = pde.dimension;
    let c = pde.order;
    let radial = match route {
        Route::Operators => radial_to_x1_operators(d, c),
        Route::ChainRules => radial_to_x1_chain_rules(d, c),
    };
    let mut acc: Vec<Frac> = vec![Frac::zero(d); c as usize + 1];
    for (q, p) in &pde.coefficients {
        let expansion = match route {
            Route::Operators => spatial_to_radial_operators(q),
            Route::ChainRules => spatial_to_radial_chain_rules(q),
        };
        for (l, cl) in expansion.iter().enumerate() {
            if cl.is_zero() {
                continue;
            }
            let cl = cl.mul_poly(p);
            for (m, s) in radial[l].iter().enumerate() {
                if s.is_zero() {
                    continue;
                }
                acc[m] = acc[m].add(&cl.mul(s));
            }
        }
    }
    clear_and_canonicalize(d, c, acc)
}

/// `∂^q G = Σ_l c_l G^{(l)}(r)` by iterating single derivatives.
pub fn spatial_to_radial_operators(q: &MultiIndex) -> Vec<Frac> {
    let d = q.len();
    let mut cur = vec![Frac::one(d)];
    for (i0, &e) in q.0.iter().enumerate() {
        let i = i0 + 1;
        let xi_over_r = Frac { num: Poly::var(d, Var::X(i)), x1_pow: 0, r_pow: 1 };
        for _ in 0..e {
            let mut next = vec![Frac::zero(d); cur.len() + 1];
            for (l, cl) in cur.iter().enumerate() {
                if cl.is_zero() {
                    continue;
                }
                next[l] = next[l].add(&cl.diff(i));
                next[l + 1] = next[l + 1].add(&cl.mul(&xi_over_r));
            }
            cur = next;
        }
    }
    cur
}

/// Same expansion through Faa di Bruno on `f(|x|^2)` and the `√z` rule.
pub fn spatial_to_radial_chain_rules(q: &MultiIndex) -> Vec<Frac> {
    let d = q.len();
    let mut out = vec![Frac::zero(d); q.order() as usize + 1];
    for (k, b) in faa_di_bruno_radial(q) {
        // f^{(k)}(z) at z = r^2, f(z) = G(√z)
        for (l, t) in deriv_sqrt_composition(k) {
            let term = Frac::r_power(d, GaussRat::real(t.coeff.clone()), t.z_exp.sqrt_power())
                .mul_poly(&b);
            out[l as usize] = out[l as usize].add(&term);
        }
    }
    out
}

/// `G^{(l)}(r) = Σ_m S[l][m] ∂^m_{x1} G` for `l ≤ c`, by iterating
/// `(r/x1) ∂_{x1}`.
pub fn radial_to_x1_operators(d: usize, c: u32) -> Vec<Vec<Frac>> {
    let r_over_x1 = Frac { num: Poly::var(d, Var::R), x1_pow: 1, r_pow: 0 };
    let mut out = vec![vec![Frac::one(d)]];
    for _ in 0..c {
        let prev = out.last().unwrap();
        let mut next = vec![Frac::zero(d); prev.len() + 1];
        for (m, s) in prev.iter().enumerate() {
            if s.is_zero() {
                continue;
            }
            next[m] = next[m].add(&s.diff(1).mul(&r_over_x1));
            next[m + 1] = next[m + 1].add(&s.mul(&r_over_x1));
        }
        out.push(next);
    }
    out
}

/// Same table from the one-dimensional Faa di Bruno formula applied to
/// `G(x1(r))` with `x1 = h(r^2)`, `h(ξ) = (ξ − x̄^2)^{1/2}`.
pub fn radial_to_x1_chain_rules(d: usize, c: u32) -> Vec<Vec<Frac>> {
    // dx[j] = ∂^j_r x1 / j!
    let mut dx: Vec<Frac> = vec![Frac::zero(d)];
    for j in 1..=c {
        let mut acc = Frac::zero(d);
        for (k, zm) in deriv_square_composition(j) {
            // h^{(k)}(r^2) = (1/2)(1/2 − 1)...(1/2 − k + 1) x1^{1−2k}
            let mut hk = BigRational::one();
            for t in 0..k {
                hk *= BigRational::new(BigInt::from(1 - 2 * t as i64), BigInt::from(2));
            }
            let coef = GaussRat::real(&zm.coeff * &hk);
            let term = Frac::x1_power(d, coef, 1 - 2 * k as i64)
                .mul(&Frac::from_poly(Poly::var_pow(d, Var::R, zm.z_pow)));
            acc = acc.add(&term);
        }
        let jf = BigRational::from_integer(crate::symcore::multi_index::factorial(j));
        dx.push(acc.mul_poly(&Poly::constant(d, GaussRat::real(BigRational::one() / jf))));
    }
    let mut out = vec![vec![Frac::one(d)]];
    for l in 1..=c {
        let mut row = vec![Frac::zero(d); l as usize + 1];
        let lf = crate::symcore::multi_index::factorial(l);
        for m in 1..=l {
            for part in enumerate_vector_partitions(&MultiIndex::new(vec![l]), m) {
                let mut term = Frac::one(d);
                for (beta, &mult) in &part.multiplicity {
                    for _ in 0..mult {
                        term = term.mul(&dx[beta.0[0] as usize]);
                    }
                }
                let coef = BigRational::new(lf.clone(), part.multiplicity_factorial());
                term = term.mul_poly(&Poly::constant(d, GaussRat::real(coef)));
                row[m as usize] = row[m as usize].add(&term);
            }
        }
        out.push(row);
    }
    out
}

fn clear_and_canonicalize(d: usize, c: u32, mut acc: Vec<Frac>) -> Result<OdeInX1> {
    while acc.len() > 1 && acc.last().unwrap().is_zero() {
        acc.pop();
    }
    if acc.iter().all(|f| f.is_zero()) {
        return Err(Error::Internal("PDE reduced to the zero ODE".into()));
    }
    let a = acc.iter().map(|f| f.x1_pow).max().unwrap();
    let mut b = acc.iter().map(|f| f.r_pow).max().unwrap();
    b += b % 2;
    if a > 2 * c - 1 || b > 2 * c {
        return Err(Error::Internal(format!(
            "denominator x1^{} r^{} exceeds the normalization bound x1^{} r^{}",
            a,
            b,
            2 * c - 1,
            2 * c
        )));
    }
    let mut nums = Vec::with_capacity(acc.len());
    for f in &acc {
        let mut m = MultiIndex::zeros(d + 3);
        m.0[0] = a - f.x1_pow;
        m.0[d] = b - f.r_pow;
        let p = f.num.mul_monomial(&m);
        if p.uses_var(d) {
            return Err(Error::Internal("odd power of r survived denominator clearing".into()));
        }
        nums.push(p);
    }
    // strip a common monomial in the spatial variables
    let mut common: Option<MultiIndex> = None;
    for p in nums.iter().filter(|p| !p.is_zero()) {
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
    let nums: Vec<Poly> = nums
        .iter()
        .map(|p| p.div_monomial(&common).expect("common monomial divides"))
        .collect();
    let (scale, nums) = primitive_many(&nums).expect("nonzero ODE");
    Ok(OdeInX1 {
        dimension: d,
        coefficients: nums,
        normalization: Normalization { x1_power: a, r_power: b, stripped: common, scale },
    })
}
