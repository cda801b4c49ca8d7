//! The differentiation rules consumed by the derivation pipeline.

use super::gauss::{rat_int, GaussRat};
use super::multi_index::{binomial, factorial, rising, MultiIndex};
use super::partitions::enumerate_vector_partitions;
use super::poly::{Poly, Var};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// `∂^α f(g(x))` with `g = x1^2 + ... + xd^2`, as pairs `(k, b_{α,k}(x))` with
/// `∂^α f(g) = Σ_k f^{(k)}(g) b_{α,k}`. Only nonzero `b` are returned.
pub fn faa_di_bruno_radial(alpha: &MultiIndex) -> Vec<(u32, Poly)> {
    let d = alpha.len();
    if alpha.is_zero() {
        return vec![(0, Poly::one(d))];
    }
    let afact = rat_int(alpha.factorial());
    let mut out = Vec::new();
    for k in 1..=alpha.order() {
        let mut b = Poly::zero(d);
        'parts: for part in enumerate_vector_partitions(alpha, k) {
            let mut term = Poly::one(d);
            for (beta, &mult) in &part.multiplicity {
                // ∂^β g / β!
                let f = match (beta.order(), beta.0.iter().position(|&e| e > 0)) {
                    (1, Some(i)) => Poly::var(d, Var::X(i + 1)).scale(&GaussRat::from_int(2)),
                    (2, Some(i)) if beta.0[i] == 2 => Poly::one(d),
                    _ => continue 'parts,
                };
                term = term.mul(&f.pow(mult));
            }
            let c = &afact / rat_int(part.multiplicity_factorial());
            b = b.add(&term.scale_rat(&c));
        }
        if !b.is_zero() {
            out.push((k, b));
        }
    }
    out
}

/// Term `coeff · z^z_pow`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZMonomial {
    pub coeff: BigRational,
    pub z_pow: u32,
}

/// `∂_z^n f(z^2) = Σ_k coeff_k z^{p_k} f^{(k)}(z^2)`.
pub fn deriv_square_composition(n: u32) -> Vec<(u32, ZMonomial)> {
    if n == 0 {
        return vec![(0, ZMonomial { coeff: BigRational::one(), z_pow: 0 })];
    }
    let mut out = Vec::new();
    for k in 0..=n {
        let num = rising(2 * k as i64 - n as i64 + 1, 2 * (n - k));
        if num.is_zero() {
            continue;
        }
        // (2z)^{-(n-2k)} with n-2k <= 0 for surviving terms
        let e = 2 * k - n;
        let coeff = BigRational::new(num * BigInt::from(2).pow(e), factorial(n - k));
        out.push((k, ZMonomial { coeff, z_pow: e }));
    }
    out
}

/// Exponent of z written as `num / 2^den_exp`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DyadicExponent {
    pub num: i64,
    pub den_exp: u32,
}

impl DyadicExponent {
    pub fn half(num: i64) -> Self {
        if num % 2 == 0 {
            DyadicExponent { num: num / 2, den_exp: 0 }
        } else {
            DyadicExponent { num, den_exp: 1 }
        }
    }

    /// The exponent as a power of `√z`.
    pub fn sqrt_power(self) -> i64 {
        match self.den_exp {
            0 => 2 * self.num,
            1 => self.num,
            _ => panic!("not a half-integer exponent"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtTerm {
    pub coeff: BigRational,
    pub z_exp: DyadicExponent,
}

/// `∂_z^n f(√z) = Σ_k coeff_k z^{e_k} f^{(k)}(√z)`.
pub fn deriv_sqrt_composition(n: u32) -> Vec<(u32, SqrtTerm)> {
    if n == 0 {
        return vec![(0, SqrtTerm { coeff: BigRational::one(), z_exp: DyadicExponent::half(0) })];
    }
    let mut out = Vec::new();
    for k in 1..=n {
        let num = rising(k as i64, 2 * (n - k));
        let sign = if (n - k) % 2 == 0 { 1 } else { -1 };
        let p = 2 * n - k;
        let den = factorial(n - k) * BigInt::from(2).pow(p);
        let coeff = BigRational::new(num * sign, den);
        out.push((k, SqrtTerm { coeff, z_exp: DyadicExponent::half(-(p as i64)) }));
    }
    out
}

/// Coefficients of `∂^{n-l} f` in `∂^n (x1^p f)`: `[n]_l C(p,l) x1^{p-l}`.
pub fn shift_product_rule(p: u32, dim: usize) -> Vec<(u32, Poly)> {
    let n = Poly::var(dim, Var::N);
    let mut out = Vec::new();
    let mut falling = Poly::one(dim);
    for l in 0..=p {
        let c = GaussRat::from_bigint(binomial(p, l));
        let coef = falling.mul(&Poly::var_pow(dim, Var::X(1), p - l)).scale(&c);
        out.push((l, coef));
        falling = falling.mul(&n.sub(&Poly::int(dim, l as i64)));
    }
    out
}
