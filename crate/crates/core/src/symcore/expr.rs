//! Text form of polynomials: `x1^3 + x1*x2^2`, `(1/2 + 3*i)*k^2`, ...
//!
//! Grammar: integers, rationals `a/b`, `i`, `k`, `n`, `r`, `x1..xd`,
//! operators `+ - * ^` and parentheses. Exponents are non-negative integers.

use super::gauss::{rat_int, GaussRat};
use super::poly::{Poly, Var};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Which non-spatial variables an expression may mention.
#[derive(Clone, Copy, Debug)]
pub struct VarPolicy {
    pub allow_r: bool,
    pub allow_n: bool,
    pub allow_k: bool,
}

impl VarPolicy {
    pub const PDE: VarPolicy = VarPolicy { allow_r: false, allow_n: false, allow_k: true };
    pub const ALL: VarPolicy = VarPolicy { allow_r: true, allow_n: true, allow_k: true };
    pub const RECURRENCE: VarPolicy = VarPolicy { allow_r: false, allow_n: true, allow_k: true };
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let chars: Vec<char> = s.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let txt: String = chars[st..i].iter().collect();
            out.push((st, Tok::Int(txt.parse().unwrap())));
        } else if c.is_ascii_alphabetic() {
            let st = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push((st, Tok::Ident(chars[st..i].iter().collect())));
        } else if "+-*^/()".contains(c) {
            out.push((i, Tok::Sym(c)));
            i += 1;
        } else {
            return Err(Error::parse(format!("column {}", i + 1), format!("unexpected character '{}'", c)));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    dim: usize,
    policy: VarPolicy,
    end: usize,
    _src: &'a str,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map(|(c, _)| *c).unwrap_or(self.end) + 1
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(format!("column {}", self.col()), msg)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero(self.dim);
        let mut sign = 1;
        match self.peek() {
            Some(Tok::Sym('-')) => {
                sign = -1;
                self.pos += 1;
            }
            Some(Tok::Sym('+')) => {
                self.pos += 1;
            }
            _ => {}
        }
        loop {
            let t = self.term()?;
            acc = if sign > 0 { acc.add(&t) } else { acc.sub(&t) };
            match self.peek() {
                Some(Tok::Sym('+')) => {
                    sign = 1;
                    self.pos += 1;
                }
                Some(Tok::Sym('-')) => {
                    sign = -1;
                    self.pos += 1;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        while let Some(Tok::Sym('*')) = self.peek() {
            self.pos += 1;
            let f = self.power()?;
            acc = acc.mul(&f);
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if let Some(Tok::Sym('^')) = self.peek() {
            self.pos += 1;
            match self.peek().cloned() {
                Some(Tok::Int(e)) => {
                    self.pos += 1;
                    let e: u32 = e
                        .try_into()
                        .map_err(|_| self.err("exponent too large"))?;
                    return Ok(base.pow(e));
                }
                _ => return Err(self.err("expected non-negative integer exponent")),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek().cloned() {
            Some(Tok::Int(a)) => {
                self.pos += 1;
                if let (Some(Tok::Sym('/')), Some(Tok::Int(b))) =
                    (self.peek().cloned(), self.toks.get(self.pos + 1).map(|(_, t)| t.clone()))
                {
                    if b.is_zero() {
                        self.pos += 1;
                        return Err(self.err("zero denominator"));
                    }
                    self.pos += 2;
                    return Ok(Poly::constant(self.dim, GaussRat::real(BigRational::new(a, b))));
                }
                Ok(Poly::constant(self.dim, GaussRat::real(rat_int(a))))
            }
            Some(Tok::Ident(name)) => {
                let v = self.variable(&name)?;
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                match self.peek() {
                    Some(Tok::Sym(')')) => {
                        self.pos += 1;
                        Ok(e)
                    }
                    _ => Err(self.err("expected ')'")),
                }
            }
            Some(t) => Err(self.err(format!("unexpected token {:?}", t))),
            None => Err(self.err("unexpected end of expression")),
        }
    }

    fn variable(&self, name: &str) -> Result<Poly> {
        let d = self.dim;
        match name {
            "i" => Ok(Poly::constant(d, GaussRat::i())),
            "k" if self.policy.allow_k => Ok(Poly::var(d, Var::K)),
            "n" if self.policy.allow_n => Ok(Poly::var(d, Var::N)),
            "r" if self.policy.allow_r => Ok(Poly::var(d, Var::R)),
            _ => {
                if let Some(idx) = name.strip_prefix('x') {
                    if let Ok(j) = idx.parse::<usize>() {
                        if j >= 1 && j <= d && !idx.starts_with('0') {
                            return Ok(Poly::var(d, Var::X(j)));
                        }
                        return Err(self.err(format!("variable {} out of range for dimension {}", name, d)));
                    }
                }
                Err(self.err(format!("unknown or disallowed variable '{}'", name)))
            }
        }
    }
}

pub fn parse_poly(text: &str, dim: usize, policy: VarPolicy) -> Result<Poly> {
    let toks = tokenize(text)?;
    let mut p = Parser { toks, pos: 0, dim, policy, end: text.chars().count(), _src: text };
    if p.toks.is_empty() {
        return Err(p.err("empty expression"));
    }
    let out = p.expr()?;
    if p.pos != p.toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(out)
}

fn fmt_rat(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Canonical text: terms in descending graded-lex order.
pub fn print_poly(p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let dim = p.dim();
    let mut out = String::new();
    for (idx, (m, c)) in p.terms().rev().enumerate() {
        let mono: Vec<String> = m
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(v, &e)| {
                let name = Var::from_index(dim, v).name();
                if e == 1 {
                    name
                } else {
                    format!("{}^{}", name, e)
                }
            })
            .collect();
        let mono = mono.join("*");
        let (negative, coef) = if c.im.is_zero() {
            let neg = c.re.is_negative();
            let a = c.re.abs();
            (neg, if a.is_one() && !mono.is_empty() { String::new() } else { fmt_rat(&a) })
        } else if c.re.is_zero() {
            let neg = c.im.is_negative();
            let b = c.im.abs();
            (neg, if b.is_one() { "i".to_string() } else { format!("{}*i", fmt_rat(&b)) })
        } else {
            let b = &c.im;
            let s = if b.is_negative() {
                format!("({} - {})", fmt_rat(&c.re), imag_part(&b.abs()))
            } else {
                format!("({} + {})", fmt_rat(&c.re), imag_part(b))
            };
            (false, s)
        };
        if idx == 0 {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        out.push_str(&coef);
        if !coef.is_empty() && !mono.is_empty() {
            out.push('*');
        }
        out.push_str(&mono);
    }
    out
}

fn imag_part(b: &BigRational) -> String {
    if b.is_one() {
        "i".into()
    } else {
        format!("{}*i", fmt_rat(b))
    }
}
