//! Scalars the recurrences run over: `Complex64` for double precision and a
//! complex double-double for extended precision.

use super::flops::FlopCounter;
use crate::kernels::hp::{with_precision, Hp};
use crate::symcore::GaussRat;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Arithmetic shared by real and complex scalars, with the flop charges of
/// scaling by a real and of an addition.
pub trait Field:
    Copy
    + Send
    + Sync
    + std::fmt::Debug
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_cdd(v: CDd) -> Self;
    fn from_f64(v: f64) -> Self;
    fn scale_f64(self, s: f64) -> Self;
    fn norm(self) -> f64;
    fn is_zero(self) -> bool;
    fn charge_scale(flops: &mut FlopCounter, times: u64);
    fn charge_add(flops: &mut FlopCounter, times: u64);
}

pub trait Scalar: Field {
    type Real: Field;
    fn from_c64(v: Complex64) -> Self;
    fn to_c64(self) -> Complex64;
    fn mul_re(self, r: Self::Real) -> Self;
}

impl Field for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_cdd(v: CDd) -> Self {
        v.re.hi
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn scale_f64(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_zero(self) -> bool {
        self == 0.0
    }
    fn charge_scale(flops: &mut FlopCounter, times: u64) {
        flops.rmul(times);
    }
    fn charge_add(flops: &mut FlopCounter, times: u64) {
        flops.radd(times);
    }
}

impl Field for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn from_cdd(v: CDd) -> Self {
        v.re
    }
    fn from_f64(v: f64) -> Self {
        Dd::new(v)
    }
    fn scale_f64(self, s: f64) -> Self {
        self * Dd::new(s)
    }
    fn norm(self) -> f64 {
        self.hi.abs()
    }
    fn is_zero(self) -> bool {
        self.hi == 0.0
    }
    fn charge_scale(flops: &mut FlopCounter, times: u64) {
        flops.rmul(times);
    }
    fn charge_add(flops: &mut FlopCounter, times: u64) {
        flops.radd(times);
    }
}

impl Scalar for Complex64 {
    type Real = f64;
    fn from_c64(v: Complex64) -> Self {
        v
    }
    fn to_c64(self) -> Complex64 {
        self
    }
    fn mul_re(self, r: f64) -> Self {
        self * r
    }
}

impl Field for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn from_cdd(v: CDd) -> Self {
        Complex64::new(v.re.hi, v.im.hi)
    }
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn scale_f64(self, s: f64) -> Self {
        self * s
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn charge_scale(flops: &mut FlopCounter, times: u64) {
        flops.cmul_real(times);
    }
    fn charge_add(flops: &mut FlopCounter, times: u64) {
        flops.cadd(times);
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn new(v: f64) -> Dd {
        Dd { hi: v, lo: 0.0 }
    }

    pub fn from_hp(v: &Hp) -> Dd {
        let hi = v.to_f64();
        let lo = (v - &Hp::from_f64(hi)).to_f64();
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn from_rational(q: &BigRational) -> Dd {
        if q.is_zero() {
            return Dd::ZERO;
        }
        with_precision(192, || Dd::from_hp(&Hp::from_rational(q)))
    }

    pub fn abs(self) -> Dd {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::ZERO;
        }
        let s = self.hi.sqrt();
        // one Newton step: s + (x - s²)/(2s)
        let (p, e) = two_prod(s, s);
        let r = ((self.hi - p) - e + self.lo) / (2.0 * s);
        let (hi, lo) = quick_two_sum(s, r);
        Dd { hi, lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::new(q1);
        let q2 = r.hi / o.hi;
        let r = r - o * Dd::new(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo } + Dd::new(q3)
    }
}

/// Complex double-double.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub fn new(re: Dd, im: Dd) -> CDd {
        CDd { re, im }
    }

    pub fn from_gauss(c: &GaussRat) -> CDd {
        CDd { re: Dd::from_rational(&c.re), im: Dd::from_rational(&c.im) }
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, o: CDd) -> CDd {
        CDd { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for CDd {
    type Output = CDd;
    fn sub(self, o: CDd) -> CDd {
        CDd { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for CDd {
    type Output = CDd;
    fn neg(self) -> CDd {
        CDd { re: -self.re, im: -self.im }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, o: CDd) -> CDd {
        CDd { re: self.re * o.re - self.im * o.im, im: self.re * o.im + self.im * o.re }
    }
}

impl Div for CDd {
    type Output = CDd;
    fn div(self, o: CDd) -> CDd {
        let den = o.re * o.re + o.im * o.im;
        CDd {
            re: (self.re * o.re + self.im * o.im) / den,
            im: (self.im * o.re - self.re * o.im) / den,
        }
    }
}

impl Scalar for CDd {
    type Real = Dd;
    fn from_c64(v: Complex64) -> Self {
        CDd { re: Dd::new(v.re), im: Dd::new(v.im) }
    }
    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.hi + self.re.lo, self.im.hi + self.im.lo)
    }
    fn mul_re(self, r: Dd) -> Self {
        CDd { re: self.re * r, im: self.im * r }
    }
}

impl Field for CDd {
    fn zero() -> Self {
        CDd::default()
    }
    fn from_cdd(v: CDd) -> Self {
        v
    }
    fn from_f64(v: f64) -> Self {
        CDd { re: Dd::new(v), im: Dd::ZERO }
    }
    fn scale_f64(self, s: f64) -> Self {
        CDd { re: self.re * Dd::new(s), im: self.im * Dd::new(s) }
    }
    fn norm(self) -> f64 {
        (self.re.hi * self.re.hi + self.im.hi * self.im.hi).sqrt()
    }
    fn is_zero(self) -> bool {
        self.re.hi == 0.0 && self.im.hi == 0.0
    }
    fn charge_scale(flops: &mut FlopCounter, times: u64) {
        flops.cmul_real(times);
    }
    fn charge_add(flops: &mut FlopCounter, times: u64) {
        flops.cadd(times);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_division_recovers_third() {
        let third = Dd::new(1.0) / Dd::new(3.0);
        let back = third * Dd::new(3.0) - Dd::new(1.0);
        assert!(back.hi.abs() < 1e-31);
    }
}
