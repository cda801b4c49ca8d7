//! Polynomials divided by a monomial `x1^a r^b`.

use crate::symcore::{GaussRat, MultiIndex, Poly, Var};

#[derive(Clone, Debug, PartialEq)]
pub struct Frac {
    pub num: Poly,
    pub x1_pow: u32,
    pub r_pow: u32,
}

impl Frac {
    pub fn from_poly(p: Poly) -> Self {
        Frac { num: p, x1_pow: 0, r_pow: 0 }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_poly(Poly::zero(dim))
    }

    pub fn one(dim: usize) -> Self {
        Self::from_poly(Poly::one(dim))
    }

    pub fn dim(&self) -> usize {
        self.num.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// `c · r^e` for a possibly negative `e`.
    pub fn r_power(dim: usize, c: GaussRat, e: i64) -> Self {
        if e >= 0 {
            Frac::from_poly(Poly::var_pow(dim, Var::R, e as u32).scale(&c))
        } else {
            Frac { num: Poly::constant(dim, c), x1_pow: 0, r_pow: (-e) as u32 }.normalized()
        }
    }

    /// `c · x1^e` for a possibly negative `e`.
    pub fn x1_power(dim: usize, c: GaussRat, e: i64) -> Self {
        if e >= 0 {
            Frac::from_poly(Poly::var_pow(dim, Var::X(1), e as u32).scale(&c))
        } else {
            Frac { num: Poly::constant(dim, c), x1_pow: (-e) as u32, r_pow: 0 }
        }
    }

    fn raise(&self, a: u32, b: u32) -> Poly {
        let d = self.dim();
        let mut m = MultiIndex::zeros(d + 3);
        m.0[0] = a - self.x1_pow;
        m.0[d] = b - self.r_pow;
        self.num.mul_monomial(&m)
    }

    pub fn add(&self, o: &Frac) -> Frac {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let a = self.x1_pow.max(o.x1_pow);
        let b = self.r_pow.max(o.r_pow);
        Frac { num: self.raise(a, b).add(&o.raise(a, b)), x1_pow: a, r_pow: b }.normalized()
    }

    pub fn mul(&self, o: &Frac) -> Frac {
        Frac {
            num: self.num.mul(&o.num),
            x1_pow: self.x1_pow + o.x1_pow,
            r_pow: self.r_pow + o.r_pow,
        }
        .normalized()
    }

    pub fn mul_poly(&self, p: &Poly) -> Frac {
        Frac { num: self.num.mul(p), x1_pow: self.x1_pow, r_pow: self.r_pow }.normalized()
    }

    /// Total derivative in `x_i` (1-based), with `∂r/∂x_i = x_i / r`.
    ///
    /// d/dx_i (N / (x1^a r^b))
    ///   = [x1 r² ∂_i N + x1 x_i r ∂_r N − a δ_{i1} r² N − b x1 x_i N] / (x1^{a+1} r^{b+2})
    pub fn diff(&self, i: usize) -> Frac {
        let d = self.dim();
        if self.is_zero() {
            return self.clone();
        }
        let x1 = Poly::var(d, Var::X(1));
        let xi = Poly::var(d, Var::X(i));
        let r = Poly::var(d, Var::R);
        let r2 = Poly::var_pow(d, Var::R, 2);
        let n = &self.num;
        let mut acc = x1.mul(&r2).mul(&n.diff(i - 1));
        acc = acc.add(&x1.mul(&xi).mul(&r).mul(&n.diff(d)));
        if i == 1 && self.x1_pow > 0 {
            acc = acc.sub(&r2.mul(n).scale(&GaussRat::from_int(self.x1_pow as i64)));
        }
        if self.r_pow > 0 {
            acc = acc.sub(&x1.mul(&xi).mul(n).scale(&GaussRat::from_int(self.r_pow as i64)));
        }
        Frac { num: acc, x1_pow: self.x1_pow + 1, r_pow: self.r_pow + 2 }.normalized()
    }

    /// Cancel common factors of `x1` and `r` between numerator and
    /// denominator.
    pub fn normalized(mut self) -> Frac {
        let d = self.dim();
        if self.num.is_zero() {
            self.x1_pow = 0;
            self.r_pow = 0;
            return self;
        }
        if let Some(min) = self.num.min_exponents() {
            let cx = min.0[0].min(self.x1_pow);
            let cr = min.0[d].min(self.r_pow);
            if cx > 0 || cr > 0 {
                let mut m = MultiIndex::zeros(d + 3);
                m.0[0] = cx;
                m.0[d] = cr;
                self.num = self.num.div_monomial(&m).expect("min exponent divides");
                self.x1_pow -= cx;
                self.r_pow -= cr;
            }
        }
        // r^2 in the denominator against a numerator that vanished to second
        // order in r: try exact division by x1^2 + ... + xd^2.
        while self.r_pow >= 2 {
            let rr = Poly::var_pow(d, Var::R, 2);
            match self.num.exact_divide(&rr) {
                Ok(q) => {
                    self.num = q;
                    self.r_pow -= 2;
                }
                Err(_) => break,
            }
        }
        self
    }

    /// `a/b == c/d` by cross-multiplication.
    pub fn equivalent(&self, o: &Frac) -> bool {
        let a = self.x1_pow.max(o.x1_pow);
        let b = self.r_pow.max(o.r_pow);
        self.raise(a, b) == o.raise(a, b)
    }
}
