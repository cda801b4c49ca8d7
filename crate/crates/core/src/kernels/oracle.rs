//! Independent high-precision derivative oracle.
//!
//! A kernel's closed form is held as a sum of terms
//! `c · x1^a · r^b · k^e · S(kr)` where `S` is one of a few special factors.
//! Differentiation in `x1` is closed on this term shape (`∂r/∂x1 = x1/r`), so
//! `∂^n_{x1} G` is built by repeated symbolic differentiation and evaluated in
//! arbitrary-precision arithmetic. Nothing here touches the PDE, ODE or
//! recurrence machinery.

use super::hp::{digits_to_bits, with_precision, Hp, HpC};
use super::hp_special::{bessel_ik, bessel_jy, guard_bits};
use super::KernelId;
use crate::error::{Error, Result};
use crate::symcore::GaussRat;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Special {
    One,
    /// `ln r`
    LogR,
    /// `H0^(1)(kr)`
    H0,
    /// `H1^(1)(kr)`
    H1,
    /// `K0(kr)`
    K0,
    /// `K1(kr)`
    K1,
    /// `exp(ikr)`
    ExpIkr,
    /// `exp(-kr)`
    ExpMinusKr,
}

/// Exponents `(a, b, e)` of `x1^a r^b k^e` and the special factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TermKey {
    pub x1: u32,
    pub r: i32,
    pub k: u32,
    pub special: Special,
}

/// `prefactor · π^pi_power · Σ coeff · term`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalForm {
    pub prefactor: GaussRat,
    pub pi_power: i32,
    pub terms: BTreeMap<TermKey, GaussRat>,
}

fn key(x1: u32, r: i32, k: u32, special: Special) -> TermKey {
    TermKey { x1, r, k, special }
}

impl NormalForm {
    /// Closed form of a builtin kernel; `None` for custom kernels.
    pub fn closed_form(id: KernelId) -> Option<NormalForm> {
        use Special::*;
        let half = |n: i64, d: i64| GaussRat::real(BigRational::new(n.into(), d.into()));
        let (pre, pi_power, term) = match id {
            KernelId::Laplace2d => (half(-1, 2), -1, key(0, 0, 0, LogR)),
            KernelId::Laplace3d => (half(-1, 4), -1, key(0, -1, 0, One)),
            KernelId::Helmholtz2d => (GaussRat::new(BigRational::zero(), BigRational::new(1.into(), 4.into())), 0, key(0, 0, 0, H0)),
            KernelId::Helmholtz3d => (half(1, 4), -1, key(0, -1, 0, ExpIkr)),
            KernelId::Yukawa2d => (half(1, 2), -1, key(0, 0, 0, K0)),
            KernelId::Yukawa3d => (half(1, 4), -1, key(0, -1, 0, ExpMinusKr)),
            KernelId::Biharmonic2d => (half(1, 8), -1, key(0, 2, 0, LogR)),
            KernelId::Biharmonic3d => (half(-1, 8), -1, key(0, 1, 0, One)),
            KernelId::Custom => return None,
        };
        let mut terms = BTreeMap::new();
        terms.insert(term, GaussRat::one());
        Some(NormalForm { prefactor: pre, pi_power, terms })
    }

    fn push(out: &mut BTreeMap<TermKey, GaussRat>, k: TermKey, c: GaussRat) {
        if c.is_zero() {
            return;
        }
        let e = out.entry(k).or_insert_with(GaussRat::zero);
        *e += &c;
        if e.is_zero() {
            out.remove(&k);
        }
    }

    /// `∂/∂x1` of the normal form.
    pub fn diff_x1(&self) -> NormalForm {
        use Special::*;
        let mut out = BTreeMap::new();
        for (t, c) in &self.terms {
            let (a, b, e, s) = (t.x1, t.r, t.k, t.special);
            if a > 0 {
                Self::push(&mut out, key(a - 1, b, e, s), c.scale(&BigRational::from_integer((a as i64).into())));
            }
            if b != 0 {
                Self::push(&mut out, key(a + 1, b - 2, e, s), c.scale(&BigRational::from_integer((b as i64).into())));
            }
            let neg = -c.clone();
            match s {
                One => {}
                LogR => Self::push(&mut out, key(a + 1, b - 2, e, One), c.clone()),
                H0 => Self::push(&mut out, key(a + 1, b - 1, e + 1, H1), neg),
                H1 => {
                    Self::push(&mut out, key(a + 1, b - 1, e + 1, H0), c.clone());
                    Self::push(&mut out, key(a + 1, b - 2, e, H1), neg);
                }
                K0 => Self::push(&mut out, key(a + 1, b - 1, e + 1, K1), neg),
                K1 => {
                    Self::push(&mut out, key(a + 1, b - 1, e + 1, K0), neg.clone());
                    Self::push(&mut out, key(a + 1, b - 2, e, K1), neg);
                }
                ExpIkr => Self::push(&mut out, key(a + 1, b - 1, e + 1, ExpIkr), c * &GaussRat::i()),
                ExpMinusKr => Self::push(&mut out, key(a + 1, b - 1, e + 1, ExpMinusKr), neg),
            }
        }
        NormalForm { prefactor: self.prefactor.clone(), pi_power: self.pi_power, terms: out }
    }
}

type Table = Arc<Vec<NormalForm>>;

fn cache() -> &'static Mutex<HashMap<KernelId, Table>> {
    static CACHE: OnceLock<Mutex<HashMap<KernelId, Table>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Normal forms of `∂^0..∂^n_{x1} G`, built once per kernel and extended on
/// demand.
pub fn derivative_table(id: KernelId, n: usize) -> Result<Table> {
    let base = NormalForm::closed_form(id)
        .ok_or_else(|| Error::Capability("custom kernels have no closed form for the oracle".into()))?;
    let mut guard = cache().lock().expect("oracle cache poisoned");
    let entry = guard.entry(id).or_insert_with(|| Arc::new(vec![base]));
    if entry.len() <= n {
        let mut v: Vec<NormalForm> = entry.as_ref().clone();
        while v.len() <= n {
            let next = v.last().unwrap().diff_x1();
            v.push(next);
        }
        *entry = Arc::new(v);
    }
    Ok(entry.clone())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivOracleResult {
    pub values: Vec<Complex64>,
    /// Working precision in decimal digits.
    pub working_precision: u32,
    pub method: &'static str,
}

pub(crate) fn gauss_to_hp(c: &GaussRat) -> HpC {
    let conv = |q: &BigRational| {
        if q.is_zero() {
            Hp::zero()
        } else if q.denom().is_one() {
            Hp::from_bigint(q.numer())
        } else {
            Hp::from_rational(q)
        }
    };
    HpC::new(conv(&c.re), conv(&c.im))
}

/// Values of the special factors at `z = kr`.
struct SpecialValues {
    log_r: Hp,
    h0: HpC,
    h1: HpC,
    k0: Hp,
    k1: Hp,
    exp_ikr: HpC,
    exp_mkr: Hp,
}

fn special_values(id: KernelId, r: &Hp, k: &Hp) -> SpecialValues {
    let z = r * k;
    let mut sv = SpecialValues {
        log_r: Hp::zero(),
        h0: HpC::zero(),
        h1: HpC::zero(),
        k0: Hp::zero(),
        k1: Hp::zero(),
        exp_ikr: HpC::zero(),
        exp_mkr: Hp::zero(),
    };
    match id {
        KernelId::Laplace2d | KernelId::Biharmonic2d => sv.log_r = r.ln(),
        KernelId::Helmholtz2d => {
            let b = bessel_jy(&z);
            sv.h0 = HpC::new(b.j0, b.y0);
            sv.h1 = HpC::new(b.j1, b.y1);
        }
        KernelId::Yukawa2d => {
            let m = bessel_ik(&z);
            sv.k0 = m.k0;
            sv.k1 = m.k1;
        }
        KernelId::Helmholtz3d => sv.exp_ikr = HpC::new(z.cos(), z.sin()),
        KernelId::Yukawa3d => sv.exp_mkr = (-z).exp(),
        _ => {}
    }
    sv
}

/// `∂^0..∂^n_{x1} G(|x|)` at working precision `digits`.
pub fn oracle_derivatives(id: KernelId, k: f64, x: &[f64], n: usize, digits: u32) -> Result<DerivOracleResult> {
    let values = oracle_map(id, k, x, n, digits, HpC::to_c64)?;
    Ok(DerivOracleResult { values, working_precision: digits, method: "normal-form symbolic differentiation" })
}

/// As [`oracle_derivatives`], converting each high-precision value with `conv`
/// while the working precision is still in force.
pub fn oracle_map<R>(id: KernelId, k: f64, x: &[f64], n: usize, digits: u32, conv: impl Fn(&HpC) -> R) -> Result<Vec<R>> {
    if digits < 30 {
        return Err(Error::Config(format!("oracle needs at least 30 digits, got {digits}")));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if !(r2 > 0.0) {
        return Err(Error::Domain("oracle evaluated at the origin".into()));
    }
    let table = derivative_table(id, n)?;
    let z = r2.sqrt() * k.abs();
    let bits = digits_to_bits(digits) + 32 + if id.uses_bessel() { guard_bits(z) } else { 0 };
    let values = with_precision(bits, || {
        let xs: Vec<Hp> = x.iter().map(|&v| Hp::from_f64(v)).collect();
        let r = xs.iter().fold(Hp::zero(), |acc, v| &acc + &(v * v)).sqrt();
        let kh = Hp::from_f64(k);
        let sv = special_values(id, &r, &kh);
        let pi = Hp::pi();
        let mut x1_pows: Vec<Hp> = vec![Hp::one()];
        let mut k_pows: Vec<Hp> = vec![Hp::one()];
        let mut r_pows: BTreeMap<i32, Hp> = BTreeMap::new();
        let rinv = &Hp::one() / &r;
        let mut out = Vec::with_capacity(n + 1);
        for nf in table.iter().take(n + 1) {
            let mut acc = HpC::zero();
            for (t, c) in &nf.terms {
                while x1_pows.len() <= t.x1 as usize {
                    let next = x1_pows.last().unwrap() * &xs[0];
                    x1_pows.push(next);
                }
                while k_pows.len() <= t.k as usize {
                    let next = k_pows.last().unwrap() * &kh;
                    k_pows.push(next);
                }
                let rp = r_pows
                    .entry(t.r)
                    .or_insert_with(|| if t.r >= 0 { r.powi(t.r as usize) } else { rinv.powi((-t.r) as usize) })
                    .clone();
                let mag = &(&x1_pows[t.x1 as usize] * &rp) * &k_pows[t.k as usize];
                let sval = match t.special {
                    Special::One => HpC::real(Hp::one()),
                    Special::LogR => HpC::real(sv.log_r.clone()),
                    Special::H0 => sv.h0.clone(),
                    Special::H1 => sv.h1.clone(),
                    Special::K0 => HpC::real(sv.k0.clone()),
                    Special::K1 => HpC::real(sv.k1.clone()),
                    Special::ExpIkr => sv.exp_ikr.clone(),
                    Special::ExpMinusKr => HpC::real(sv.exp_mkr.clone()),
                };
                acc = acc.add(&gauss_to_hp(c).mul(&sval).scale(&mag));
            }
            let pre = gauss_to_hp(&nf.prefactor);
            let pip = if nf.pi_power >= 0 {
                pi.powi(nf.pi_power as usize)
            } else {
                (&Hp::one() / &pi).powi((-nf.pi_power) as usize)
            };
            out.push(conv(&acc.mul(&pre).scale(&pip)));
        }
        out
    });
    Ok(values)
}

const FD_DIGITS: u32 = 40;

/// Richardson-extrapolated central differences of `G` along `x1`, orders
/// `0..=4`. Sums run in high precision, so only the `O(h^6)` truncation
/// remains. The step is a power of two; stencil abscissae are exact when
/// `x1` is a multiple of `h/8`, otherwise their rounding limits accuracy.
/// An independent cross-check of [`oracle_derivatives`].
pub fn finite_difference_derivatives(id: KernelId, k: f64, x: &[f64], n: usize) -> Result<Vec<Complex64>> {
    if n > 4 {
        return Err(Error::Capability("finite differences only cover orders up to 4".into()));
    }
    let eval = |dx: f64| -> Result<HpC> {
        let mut y = x.to_vec();
        y[0] += dx;
        Ok(oracle_map(id, k, &y, 0, FD_DIGITS, HpC::clone)?.swap_remove(0))
    };
    let bits = digits_to_bits(FD_DIGITS) + 32;
    let stencil = |j: usize, h: f64| -> Result<HpC> {
        // j-th central difference with half-width j*h/2 steps
        let mut acc = HpC::zero();
        for i in 0..=j {
            let c = (0..i).fold(1.0, |acc, m| acc * (j - m) as f64 / (m + 1) as f64);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            let v = eval((j as f64 / 2.0 - i as f64) * h)?;
            acc = with_precision(bits, || acc.add(&v.scale(&Hp::from_f64(sign * c))));
        }
        Ok(with_precision(bits, || acc.scale(&Hp::from_f64(h.powi(-(j as i32))))))
    };
    let richardson = |a: &HpC, b: &HpC, f: f64| with_precision(bits, || b.scale(&Hp::from_f64(f)).sub(a).scale(&Hp::from_f64(1.0 / (f - 1.0))));
    let scale = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut out = vec![eval(0.0)?.to_c64()];
    for j in 1..=n {
        let h = (scale * 1e-3).log2().floor().exp2();
        let d1 = stencil(j, h)?;
        let d2 = stencil(j, h / 2.0)?;
        let d4 = stencil(j, h / 4.0)?;
        let r1 = richardson(&d1, &d2, 4.0);
        let r2 = richardson(&d2, &d4, 4.0);
        out.push(richardson(&r1, &r2, 16.0).to_c64());
    }
    Ok(out)
}
