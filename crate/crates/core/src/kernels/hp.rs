//! Arbitrary-precision reals and complexes for the derivative oracle.
//!
//! The working precision is thread-local and set with [`with_precision`].

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use std::cell::{Cell, RefCell};
use std::ops::{Add, Div, Mul, Neg, Sub};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static PREC: Cell<usize> = const { Cell::new(256) };
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constants"));
}

/// Euler–Mascheroni constant to 100 digits.
const EULER_GAMMA: &str =
    "0.5772156649015328606065120900824024310421593359399235988057672348848677267776646709369470632917467495";

pub fn precision() -> usize {
    PREC.with(|p| p.get())
}

/// Run `f` with the working precision set to `bits`.
pub fn with_precision<T>(bits: usize, f: impl FnOnce() -> T) -> T {
    let old = PREC.with(|p| p.replace(bits));
    let out = f();
    PREC.with(|p| p.set(old));
    out
}

/// Bits needed for `digits` decimal digits.
pub fn digits_to_bits(digits: u32) -> usize {
    ((digits as f64) * std::f64::consts::LOG2_10).ceil() as usize
}

#[derive(Debug)]
pub struct Hp(pub BigFloat);

impl Clone for Hp {
    fn clone(&self) -> Self {
        Hp(self.0.clone())
    }
}

impl Hp {
    pub fn from_f64(v: f64) -> Hp {
        Hp(BigFloat::from_f64(v, precision().max(64)))
    }

    pub fn from_i64(v: i64) -> Hp {
        Hp(BigFloat::from_i64(v, precision()))
    }

    pub fn zero() -> Hp {
        Hp::from_i64(0)
    }

    pub fn one() -> Hp {
        Hp::from_i64(1)
    }

    pub fn from_bigint(v: &BigInt) -> Hp {
        let s = v.to_string();
        let p = precision().max(s.len() * 4 + 64);
        Hp(CONSTS.with(|c| BigFloat::parse(&s, Radix::Dec, p, RM, &mut c.borrow_mut())))
            .rounded()
    }

    pub fn from_rational(v: &BigRational) -> Hp {
        Hp::from_bigint(v.numer()) / Hp::from_bigint(v.denom())
    }

    fn rounded(mut self) -> Hp {
        let _ = self.0.set_precision(precision(), RM);
        self
    }

    pub fn parse_decimal(s: &str) -> Hp {
        Hp(CONSTS.with(|c| BigFloat::parse(s, Radix::Dec, precision(), RM, &mut c.borrow_mut())))
    }

    pub fn pi() -> Hp {
        Hp(CONSTS.with(|c| c.borrow_mut().pi(precision(), RM)))
    }

    pub fn euler_gamma() -> Hp {
        Hp::parse_decimal(EULER_GAMMA)
    }

    pub fn sqrt(&self) -> Hp {
        Hp(self.0.sqrt(precision(), RM))
    }

    pub fn ln(&self) -> Hp {
        Hp(CONSTS.with(|c| self.0.ln(precision(), RM, &mut c.borrow_mut())))
    }

    pub fn exp(&self) -> Hp {
        Hp(CONSTS.with(|c| self.0.exp(precision(), RM, &mut c.borrow_mut())))
    }

    pub fn cos(&self) -> Hp {
        Hp(CONSTS.with(|c| self.0.cos(precision(), RM, &mut c.borrow_mut())))
    }

    pub fn sin(&self) -> Hp {
        Hp(CONSTS.with(|c| self.0.sin(precision(), RM, &mut c.borrow_mut())))
    }

    pub fn powi(&self, n: usize) -> Hp {
        Hp(self.0.powi(n, precision(), RM))
    }

    pub fn abs(&self) -> Hp {
        Hp(self.0.abs())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn lt(&self, o: &Hp) -> bool {
        matches!(self.0.cmp(&o.0), Some(c) if c < 0)
    }

    /// Binary exponent `e` with `|x| = 0.m · 2^e`; `None` for zero.
    pub fn exponent(&self) -> Option<i64> {
        if self.is_zero() {
            None
        } else {
            self.0.exponent().map(|e| e as i64)
        }
    }

    /// Nearest binary64 up to one unit in the last place.
    pub fn to_f64(&self) -> f64 {
        let Some((words, _, sign, e, _)) = self.0.as_raw_parts() else {
            return f64::NAN;
        };
        if self.0.is_zero() {
            return 0.0;
        }
        let n = words.len();
        let hi = words[n - 1] as f64;
        let lo = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
        let e = e as i32;
        let v = hi * 2f64.powi(e - 64) + lo * 2f64.powi(e - 128);
        if sign == Sign::Neg {
            -v
        } else {
            v
        }
    }
}

impl Add for &Hp {
    type Output = Hp;
    fn add(self, o: &Hp) -> Hp {
        Hp(self.0.add(&o.0, precision(), RM))
    }
}

impl Sub for &Hp {
    type Output = Hp;
    fn sub(self, o: &Hp) -> Hp {
        Hp(self.0.sub(&o.0, precision(), RM))
    }
}

impl Mul for &Hp {
    type Output = Hp;
    fn mul(self, o: &Hp) -> Hp {
        Hp(self.0.mul(&o.0, precision(), RM))
    }
}

impl Div for &Hp {
    type Output = Hp;
    fn div(self, o: &Hp) -> Hp {
        Hp(self.0.div(&o.0, precision(), RM))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr for Hp {
            type Output = Hp;
            fn $f(self, o: Hp) -> Hp { (&self).$f(&o) }
        }
        impl $tr<&Hp> for Hp {
            type Output = Hp;
            fn $f(self, o: &Hp) -> Hp { (&self).$f(o) }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl Neg for &Hp {
    type Output = Hp;
    fn neg(self) -> Hp {
        Hp(self.0.clone().neg())
    }
}

impl Neg for Hp {
    type Output = Hp;
    fn neg(self) -> Hp {
        Hp(self.0.neg())
    }
}

/// Complex number over [`Hp`].
#[derive(Clone, Debug)]
pub struct HpC {
    pub re: Hp,
    pub im: Hp,
}

impl HpC {
    pub fn new(re: Hp, im: Hp) -> HpC {
        HpC { re, im }
    }

    pub fn real(re: Hp) -> HpC {
        HpC { re, im: Hp::zero() }
    }

    pub fn zero() -> HpC {
        HpC::real(Hp::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn scale(&self, s: &Hp) -> HpC {
        HpC { re: &self.re * s, im: &self.im * s }
    }

    pub fn add(&self, o: &HpC) -> HpC {
        HpC { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &HpC) -> HpC {
        HpC { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &HpC) -> HpC {
        HpC {
            re: &(&self.re * &o.re) - &(&self.im * &o.im),
            im: &(&self.re * &o.im) + &(&self.im * &o.re),
        }
    }

    pub fn norm(&self) -> Hp {
        (&(&self.re * &self.re) + &(&self.im * &self.im)).sqrt()
    }

    pub fn to_c64(&self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}
