//! Residual checks of derived ODEs and recurrences against oracle
//! derivatives. Coefficients are evaluated exactly at the (binary64) point and
//! all arithmetic runs at the oracle's working precision.

use crate::error::{Error, Result};
use crate::kernels::hp::{digits_to_bits, with_precision, Hp, HpC};
use crate::kernels::oracle::{gauss_to_hp, oracle_map};
use crate::kernels::{KernelId, KernelSpec};
use crate::pde2ode::OdeInX1;
use crate::recurrence::{Recurrence, SmallRecurrence};
use crate::symcore::{GaussRat, Poly, Var};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

/// Oracle working precision for residual checks.
pub const RESIDUAL_DIGITS: u32 = 50;

fn exact(v: f64) -> GaussRat {
    GaussRat::real(BigRational::from_float(v).expect("finite coordinate"))
}

/// Exact values of `x1..xd, r, n, k` (`r` unused by derived coefficients and
/// set to zero; `n` as given).
fn exact_vals(x: &[f64], n: i64, k: f64) -> Vec<GaussRat> {
    let d = x.len();
    let mut v: Vec<GaussRat> = x.iter().map(|&c| exact(c)).collect();
    v.push(GaussRat::zero());
    v.push(GaussRat::from_int(n));
    v.push(exact(k));
    debug_assert_eq!(v.len(), d + 3);
    v
}

fn oracle_id(kernel: &KernelSpec) -> Result<KernelId> {
    if kernel.id == KernelId::Custom {
        return Err(Error::Capability("custom kernels have no derivative oracle".into()));
    }
    Ok(kernel.id)
}

fn working_bits(kernel: &KernelSpec, x: &[f64]) -> usize {
    let z = x.iter().map(|v| v * v).sum::<f64>().sqrt() * kernel.k_value().abs();
    digits_to_bits(RESIDUAL_DIGITS) + 32 + if kernel.id.uses_bessel() { crate::kernels::hp_special::guard_bits(z) } else { 0 }
}

/// `|Σ c_j v_j| / max_j |c_j v_j|`, 0 when every term vanishes.
fn relative_residual(terms: &[(GaussRat, &HpC)]) -> f64 {
    let mut acc = HpC::zero();
    let mut big = Hp::zero();
    for (c, v) in terms {
        if c.is_zero() || v.is_zero() {
            continue;
        }
        let t = gauss_to_hp(c).mul(v);
        let m = t.norm();
        if big.lt(&m) {
            big = m;
        }
        acc = acc.add(&t);
    }
    if big.is_zero() {
        return 0.0;
    }
    (&acc.norm() / &big).to_f64()
}

fn check_point(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::Domain("residual check at the origin".into()));
    }
    Ok(())
}

/// Max over `points` of `|Σ l_i ∂^i G| / max_i |l_i ∂^i G|`.
pub fn verify_ode(ode: &OdeInX1, kernel: &KernelSpec, points: &[Vec<f64>]) -> Result<f64> {
    let id = oracle_id(kernel)?;
    let mut worst = 0.0f64;
    for x in points {
        check_point(x)?;
        let vals = oracle_map(id, kernel.k_value(), x, ode.order(), RESIDUAL_DIGITS, HpC::clone)?;
        let ex = exact_vals(x, 0, kernel.k_value());
        let res = with_precision(working_bits(kernel, x), || {
            let terms: Vec<(GaussRat, &HpC)> = ode.coefficients.iter().zip(&vals).map(|(l, v)| (l.eval_exact(&ex), v)).collect();
            relative_residual(&terms)
        });
        worst = worst.max(res);
    }
    Ok(worst)
}

/// Residual of `Σ_s c_s(n) ∂^{n+s} G` at one point for the given `n`.
/// Orders `n` whose stencil reaches below zero are not identities and give 0.
fn coeff_residual(coeffs: &BTreeMap<i32, Poly>, vals: &[HpC], n: i64, ex_base: &[GaussRat]) -> f64 {
    if coeffs.keys().next().is_some_and(|&s| n + (s as i64) < 0) {
        return 0.0;
    }
    let d = ex_base.len() - 3;
    let mut ex = ex_base.to_vec();
    ex[Var::N.index(d)] = GaussRat::from_int(n);
    let terms: Vec<(GaussRat, &HpC)> = coeffs
        .iter()
        .map(|(s, c)| (c.eval_exact(&ex), &vals[(n + *s as i64) as usize]))
        .collect();
    relative_residual(&terms)
}

/// Max over `points` and `n ∈ ns` of the large-recurrence residual.
pub fn large_recurrence_residual(rec: &Recurrence, kernel: &KernelSpec, points: &[Vec<f64>], ns: &[i64]) -> Result<f64> {
    let id = oracle_id(kernel)?;
    let top = ns.iter().map(|n| n + rec.max_shift as i64).max().unwrap_or(0).max(0) as usize;
    let mut worst = 0.0f64;
    for x in points {
        check_point(x)?;
        let vals = oracle_map(id, kernel.k_value(), x, top, RESIDUAL_DIGITS, HpC::clone)?;
        let ex = exact_vals(x, 0, kernel.k_value());
        let r = with_precision(working_bits(kernel, x), || {
            ns.iter().map(|&n| coeff_residual(&rec.coefficients, &vals, n, &ex)).fold(0.0, f64::max)
        });
        worst = worst.max(r);
    }
    Ok(worst)
}

/// Max over on-axis points `(0, x̄)` and `n ∈ ns` of the small-recurrence
/// residual on oracle values `(∂^k G)|_{x1=0}`.
pub fn small_recurrence_residual(small: &SmallRecurrence, kernel: &KernelSpec, xbars: &[f64], ns: &[i64]) -> Result<f64> {
    let id = oracle_id(kernel)?;
    let d = kernel.dimension;
    let top = ns.iter().cloned().max().unwrap_or(0).max(0) as usize;
    let mut worst = 0.0f64;
    for &xb in xbars {
        let mut x = vec![0.0; d];
        x[1] = xb;
        check_point(&x)?;
        let vals = oracle_map(id, kernel.k_value(), &x, top, RESIDUAL_DIGITS, HpC::clone)?;
        let ex = exact_vals(&x, 0, kernel.k_value());
        let r = with_precision(working_bits(kernel, &x), || {
            ns.iter().map(|&n| coeff_residual(&small.coefficients, &vals, n, &ex)).fold(0.0, f64::max)
        });
        worst = worst.max(r);
    }
    Ok(worst)
}

/// `count` seeded points in `[-2, 2]^d` with `|x| ≥ 0.1` and
/// `|x1| ≥ min_ratio · x̄`. Empty for `dim < 2`.
pub fn random_points(dim: usize, count: usize, min_ratio: f64, seed: u64) -> Vec<Vec<f64>> {
    if dim < 2 {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let xb = x[1..].iter().map(|v| v * v).sum::<f64>().sqrt();
        if r >= 0.1 && x[0].abs() >= min_ratio * xb && xb > 0.0 {
            out.push(x);
        }
    }
    out
}
