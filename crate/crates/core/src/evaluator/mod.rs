//! Online evaluation of `∂^0..∂^P_{x1} G` at a point with the large-|x1| and
//! small-|x1| recurrences, and the error-model calculators.

pub mod compiled;
pub mod flops;
pub mod scalar;

use crate::error::{Error, Result};
use crate::kernels::hp::HpC;
use crate::kernels::{oracle, KernelSpec};
use crate::pde2ode::{pde_to_ode, OdeInX1, PdeSpec};
use crate::recurrence::{ode_to_large_recurrence, specialize_small_recurrence, Recurrence, SmallRecurrence};
use crate::symcore::{GaussRat, Var};
use compiled::{CompiledCoeffs, PointCoeffs};
pub use flops::FlopCounter;
use num_complex::Complex64;
use scalar::{CDd, Dd, Field, Scalar};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Working digits of the oracle used for extended-precision seeds.
const EXTENDED_SEED_DIGITS: u32 = 40;

/// Largest on-axis order the small branch can seed from closed forms.
const MAX_AXIS_SEED: usize = 6;

/// Fitted single-step constant of the large branch for Laplace 2D at `n = 9`.
pub const DEFAULT_LARGE_BRANCH_C: f64 = 1.0302266e-17;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Large,
    Small,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Large => "large",
            Branch::Small => "small",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PrecisionMode {
    Double,
    /// Double-double arithmetic with oracle-seeded starting values.
    Extended,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridConfig {
    pub xi: f64,
    pub p_small: usize,
    pub p: usize,
    pub precision: PrecisionMode,
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig { xi: 50.0, p_small: 8, p: 9, precision: PrecisionMode::Double }
    }
}

impl HybridConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 1.0) || !self.xi.is_finite() {
            return Err(Error::Config(format!("xi must be > 1, got {}", self.xi)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    /// Per derivative order, the ratio of the largest to the smallest nonzero
    /// term in the recurrence step that produced it (0 for seeded entries).
    pub step_ratios: Vec<f64>,
    /// Small branch: magnitude of the first omitted Taylor term per order.
    pub taylor_remainder: Vec<f64>,
    /// The point was moved by one ulp in `x1` after a singular step.
    pub perturbed: bool,
    pub flops: FlopCounter,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DerivSeq {
    pub point: Vec<f64>,
    pub values: Vec<Complex64>,
    pub branch: Branch,
    pub diagnostics: Diagnostics,
}

/// `x̄ = |(x2, .., xd)|`.
pub fn xbar(x: &[f64]) -> f64 {
    x[1..].iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn classify_region(x: &[f64], xi: f64) -> Result<Branch> {
    if x.iter().all(|v| *v == 0.0) {
        return Err(Error::Domain("point is the origin".into()));
    }
    let xb = xbar(x);
    if xb == 0.0 || x[0].abs() / xb >= 1.0 / xi {
        Ok(Branch::Large)
    } else {
        Ok(Branch::Small)
    }
}

/// The derived artifacts of one PDE.
#[derive(Clone, Debug, PartialEq)]
pub struct Derived {
    pub ode: OdeInX1,
    pub large: Recurrence,
    pub small: SmallRecurrence,
}

pub fn derive(pde: &PdeSpec) -> Result<Derived> {
    let ode = pde_to_ode(pde)?;
    let large = ode_to_large_recurrence(&ode)?;
    let small = specialize_small_recurrence(&large)?;
    Ok(Derived { ode, large, small })
}

/// [`derive`] memoized on the PDE document.
pub fn derive_cached(pde: &PdeSpec) -> Result<Arc<Derived>> {
    static CACHE: OnceLock<Mutex<HashMap<String, Arc<Derived>>>> = OnceLock::new();
    let key = pde.to_document();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(d) = cache.lock().expect("derivation cache poisoned").get(&key) {
        return Ok(d.clone());
    }
    let d = Arc::new(derive(pde)?);
    cache.lock().expect("derivation cache poisoned").insert(key, d.clone());
    Ok(d)
}

/// A kernel with its recurrences prepared for repeated evaluation.
#[derive(Clone, Debug)]
pub struct Evaluator {
    pub kernel: KernelSpec,
    pub large: Recurrence,
    pub small: SmallRecurrence,
    large_c: CompiledCoeffs,
    small_c: CompiledCoeffs,
    /// Even on-axis orders that the small recurrence cannot produce.
    small_seeds: Vec<usize>,
}

impl Evaluator {
    pub fn new(kernel: &KernelSpec) -> Result<Evaluator> {
        let d = derive_cached(&kernel.pde)?;
        Evaluator::from_artifacts(kernel, d.large.clone(), d.small.clone())
    }

    pub fn from_artifacts(kernel: &KernelSpec, large: Recurrence, small: SmallRecurrence) -> Result<Evaluator> {
        if large.dimension != kernel.dimension || small.dimension != kernel.dimension {
            return Err(Error::Config("recurrence dimension does not match the kernel".into()));
        }
        let seeds_needed = large.max_shift.max(0) as usize;
        if seeds_needed > kernel.base_order + 1 {
            return Err(Error::Capability(format!(
                "large recurrence needs {seeds_needed} starting values, kernel provides {}",
                kernel.base_order + 1
            )));
        }
        let small_seeds = small_seed_orders(&small)?;
        Ok(Evaluator {
            kernel: kernel.clone(),
            large_c: CompiledCoeffs::new(large.dimension, &large.coefficients),
            small_c: CompiledCoeffs::new(small.dimension, &small.coefficients),
            large,
            small,
            small_seeds,
        })
    }

    pub fn small_seed_orders(&self) -> &[usize] {
        &self.small_seeds
    }

    fn point_values(&self, x: &[f64]) -> Vec<f64> {
        let d = self.kernel.dimension;
        let mut vals = vec![0.0; d + 3];
        vals[..d].copy_from_slice(&x[..d]);
        vals[Var::R.index(d)] = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        vals[Var::K.index(d)] = self.kernel.k_value();
        vals
    }

    /// Large-|x1| branch: closed-form seeds, then the recurrence up to `p`.
    pub fn eval_large(&self, x: &[f64], p: usize, mode: PrecisionMode) -> Result<DerivSeq> {
        let mut flops = FlopCounter::new();
        self.eval_large_counted(x, p, mode, &mut flops)
    }

    pub fn eval_large_counted(&self, x: &[f64], p: usize, mode: PrecisionMode, flops: &mut FlopCounter) -> Result<DerivSeq> {
        self.kernel.check_point(x)?;
        match mode {
            PrecisionMode::Double => self.large_impl::<Complex64>(x, p, mode, flops),
            PrecisionMode::Extended => self.large_impl::<CDd>(x, p, mode, flops),
        }
    }

    fn large_seeds<T: Scalar>(&self, x: &[f64], m: usize, mode: PrecisionMode, flops: &mut FlopCounter) -> Result<Vec<T>> {
        if mode == PrecisionMode::Extended && self.kernel.id != crate::kernels::KernelId::Custom {
            let v = oracle::oracle_map(self.kernel.id, self.kernel.k_value(), x, m, EXTENDED_SEED_DIGITS, hp_to_cdd)?;
            return Ok(v.into_iter().map(T::from_cdd).collect());
        }
        let v = self.kernel.base_derivatives(x, m)?;
        flops.special(1);
        // chain-rule assembly of the closed forms
        flops.cmul_real(3 * m as u64 + 4);
        flops.cadd(m as u64);
        Ok(v.into_iter().map(T::from_c64).collect())
    }

    fn large_impl<T: Scalar>(&self, x: &[f64], p: usize, mode: PrecisionMode, flops: &mut FlopCounter) -> Result<DerivSeq> {
        let top = self.large.max_shift;
        let nseed = top.max(1) as usize;
        // closed forms are cheaper than recurrence steps up to the base order
        let m = (nseed - 1).max(self.kernel.base_order).min(p);
        let mut vals: Vec<T> = self.large_seeds(x, m, mode, flops)?;
        let mut ratios = vec![0.0; vals.len()];
        if p >= vals.len() {
            let pc = StepCoeffs::<T>::new(&self.large_c, &self.point_values(x), flops);
            let lead_idx = pc.shifts().len() - 1;
            for t in vals.len()..=p {
                let n = t as i64 - top as i64;
                let (v, ratio) = solve_step(&pc, lead_idx, n, &vals, flops)?;
                vals.push(v);
                ratios.push(ratio);
            }
        }
        Ok(DerivSeq {
            point: x.to_vec(),
            values: vals.into_iter().map(T::to_c64).collect(),
            branch: Branch::Large,
            diagnostics: Diagnostics { step_ratios: ratios, taylor_remainder: Vec::new(), perturbed: false, flops: *flops },
        })
    }

    /// On-axis values `(∂^j G)|_{x1=0}` for `j = 0..=jmax` at the projection of
    /// `x` onto `x1 = 0`; odd entries are exact zeros.
    pub fn axis_values(&self, x: &[f64], jmax: usize, mode: PrecisionMode) -> Result<Vec<Complex64>> {
        let mut flops = FlopCounter::new();
        let v = match mode {
            PrecisionMode::Double => self.axis_impl::<Complex64>(x, jmax, mode, &mut flops)?.into_iter().map(|v| v.to_c64()).collect(),
            PrecisionMode::Extended => self.axis_impl::<CDd>(x, jmax, mode, &mut flops)?.into_iter().map(|v| v.to_c64()).collect(),
        };
        Ok(v)
    }

    fn axis_impl<T: Scalar>(&self, x: &[f64], jmax: usize, mode: PrecisionMode, flops: &mut FlopCounter) -> Result<Vec<T>> {
        let xb = xbar(x);
        if xb == 0.0 {
            return Err(Error::Domain("small branch needs a point off the x1 axis".into()));
        }
        let mut y = x.to_vec();
        y[0] = 0.0;
        let seeds: Vec<T> = if mode == PrecisionMode::Extended && self.kernel.id != crate::kernels::KernelId::Custom {
            let v = oracle::oracle_map(self.kernel.id, self.kernel.k_value(), &y, MAX_AXIS_SEED, EXTENDED_SEED_DIGITS, hp_to_cdd)?;
            (0..=MAX_AXIS_SEED / 2).map(|j| T::from_cdd(v[2 * j])).collect()
        } else {
            flops.special(1);
            flops.cmul_real(16);
            flops.cadd(5);
            self.kernel.axis_derivatives(xb)?.into_iter().map(T::from_c64).collect()
        };
        let pc = StepCoeffs::<T>::new(&self.small_c, &self.point_values(&y), flops);
        let lead_idx = pc.shifts().len() - 1;
        let mut vals: Vec<T> = Vec::with_capacity(jmax + 1);
        for j in 0..=jmax {
            if j % 2 == 1 {
                vals.push(T::zero());
            } else if self.small_seeds.contains(&j) {
                let s = seeds.get(j / 2).copied().ok_or_else(|| {
                    Error::Capability(format!("small recurrence needs the on-axis derivative of order {j} as a seed"))
                })?;
                vals.push(s);
            } else {
                let (v, _) = solve_step(&pc, lead_idx, j as i64, &vals, flops)?;
                vals.push(v);
            }
        }
        Ok(vals)
    }

    /// Small-|x1| branch: on-axis values from the small recurrence, then a
    /// Taylor expansion in `x1` truncated after `p_small`.
    pub fn eval_small(&self, x: &[f64], p: usize, p_small: usize, mode: PrecisionMode) -> Result<DerivSeq> {
        let mut flops = FlopCounter::new();
        self.eval_small_counted(x, p, p_small, mode, &mut flops)
    }

    pub fn eval_small_counted(&self, x: &[f64], p: usize, p_small: usize, mode: PrecisionMode, flops: &mut FlopCounter) -> Result<DerivSeq> {
        self.kernel.check_point(x)?;
        match mode {
            PrecisionMode::Double => self.small_impl::<Complex64>(x, p, p_small, mode, flops),
            PrecisionMode::Extended => self.small_impl::<CDd>(x, p, p_small, mode, flops),
        }
    }

    fn small_impl<T: Scalar>(&self, x: &[f64], p: usize, p_small: usize, mode: PrecisionMode, flops: &mut FlopCounter) -> Result<DerivSeq> {
        let axis = self.axis_impl::<T>(x, p + p_small + 2, mode, flops)?;
        let x1 = x[0];
        // x1^k / k!
        let mut taylor = Vec::with_capacity(p_small + 3);
        let mut t = 1.0;
        for k in 0..p_small + 3 {
            if k > 0 {
                t *= x1 / k as f64;
            }
            taylor.push(t);
        }
        flops.rmul(2 * (p_small as u64 + 2));
        // orders the closed forms cover need no expansion
        let exact: Vec<T> = if x1 == 0.0 { Vec::new() } else { self.large_seeds(x, self.kernel.base_order.min(p), mode, flops)? };
        let mut values = Vec::with_capacity(p + 1);
        let mut remainder = Vec::with_capacity(p + 1);
        for i in 0..=p {
            if let Some(v) = exact.get(i) {
                values.push(v.to_c64());
                remainder.push(0.0);
                continue;
            }
            let mut acc = T::zero();
            for k in ((i % 2)..=p_small).step_by(2) {
                acc = acc + axis[i + k].scale_f64(taylor[k]);
                flops.cmul_real(1);
                flops.cadd(1);
            }
            let knext = if (i + p_small + 1) % 2 == 0 { p_small + 1 } else { p_small + 2 };
            remainder.push(axis[i + knext].norm() * taylor[knext].abs());
            values.push(acc.to_c64());
        }
        Ok(DerivSeq {
            point: x.to_vec(),
            values,
            branch: Branch::Small,
            diagnostics: Diagnostics { step_ratios: vec![0.0; p + 1], taylor_remainder: remainder, perturbed: false, flops: *flops },
        })
    }

    /// Region dispatch with one retry one ulp away in `x1` after a singular
    /// step.
    pub fn eval_hybrid(&self, x: &[f64], cfg: &HybridConfig) -> Result<DerivSeq> {
        let mut flops = FlopCounter::new();
        self.eval_hybrid_counted(x, cfg, &mut flops)
    }

    pub fn eval_hybrid_counted(&self, x: &[f64], cfg: &HybridConfig, flops: &mut FlopCounter) -> Result<DerivSeq> {
        cfg.validate()?;
        let run = |y: &[f64], flops: &mut FlopCounter| match classify_region(y, cfg.xi)? {
            Branch::Large => self.eval_large_counted(y, cfg.p, cfg.precision, flops),
            Branch::Small => self.eval_small_counted(y, cfg.p, cfg.p_small, cfg.precision, flops),
        };
        match run(x, flops) {
            Err(Error::SingularStep { .. }) => {
                let mut y = x.to_vec();
                y[0] = y[0].next_up();
                let mut out = run(&y, flops)?;
                out.diagnostics.perturbed = true;
                Ok(out)
            }
            other => other,
        }
    }
}

fn hp_to_cdd(v: &HpC) -> CDd {
    CDd::new(Dd::from_hp(&v.re), Dd::from_hp(&v.im))
}

/// Recurrence coefficients collapsed onto a point, in real arithmetic when
/// every coefficient is real (the variables always are).
enum StepCoeffs<T: Scalar> {
    Real(PointCoeffs<T::Real>),
    Complex(PointCoeffs<T>),
}

impl<T: Scalar> StepCoeffs<T> {
    fn new(c: &CompiledCoeffs, vals: &[f64], flops: &mut FlopCounter) -> Self {
        if c.real {
            let v: Vec<T::Real> = vals.iter().map(|&x| <T::Real as Field>::from_f64(x)).collect();
            StepCoeffs::Real(c.at_point(&v, flops))
        } else {
            let v: Vec<T> = vals.iter().map(|&x| T::from_f64(x)).collect();
            StepCoeffs::Complex(c.at_point(&v, flops))
        }
    }

    fn shifts(&self) -> &[i32] {
        match self {
            StepCoeffs::Real(p) => &p.shifts,
            StepCoeffs::Complex(p) => &p.shifts,
        }
    }
}

/// Solve `Σ_s c_s(n) v[n+s] = 0` for the top entry, which is `vals.len()`.
/// Returns the value and the ratio of the largest to the smallest nonzero
/// term moved to the right-hand side.
fn solve_step<T: Scalar>(pc: &StepCoeffs<T>, lead_idx: usize, n: i64, vals: &[T], flops: &mut FlopCounter) -> Result<(T, f64)> {
    let mut acc = T::zero();
    let (mut big, mut small) = (0.0f64, f64::INFINITY);
    let mut push = |b: T, acc: &mut T| {
        *acc = *acc + b;
        let m = b.norm();
        if m > 0.0 {
            big = big.max(m);
            small = small.min(m);
        }
    };
    let out = match pc {
        StepCoeffs::Real(pc) => {
            let lead = pc.eval(lead_idx, n as f64, flops);
            if lead.is_zero() {
                return Err(Error::SingularStep { n });
            }
            for (idx, &s) in pc.shifts.iter().enumerate().take(lead_idx) {
                let j = n + s as i64;
                if j < 0 {
                    continue;
                }
                let c = pc.eval(idx, n as f64, flops);
                push(vals[j as usize].mul_re(c), &mut acc);
                flops.cmul_real(1);
                flops.cadd(1);
            }
            // one reciprocal, then a complex-by-real product
            flops.rmul(1);
            flops.cmul_real(1);
            let inv = <T::Real as Field>::from_f64(-1.0) / lead;
            acc.mul_re(inv)
        }
        StepCoeffs::Complex(pc) => {
            let lead = pc.eval(lead_idx, n as f64, flops);
            if lead.is_zero() {
                return Err(Error::SingularStep { n });
            }
            for (idx, &s) in pc.shifts.iter().enumerate().take(lead_idx) {
                let j = n + s as i64;
                if j < 0 {
                    continue;
                }
                let c = pc.eval(idx, n as f64, flops);
                push(c * vals[j as usize], &mut acc);
                flops.cmul(1);
                flops.cadd(1);
            }
            flops.cdiv(1);
            -(acc / lead)
        }
    };
    let ratio = if big > 0.0 { big / small } else { 0.0 };
    Ok((out, ratio))
}

/// Even on-axis orders that must be seeded: those where the leading
/// coefficient vanishes identically, or where a term with a nonzero
/// coefficient would reach below order 0.
fn small_seed_orders(small: &SmallRecurrence) -> Result<Vec<usize>> {
    let d = small.dimension;
    let ni = Var::N.index(d);
    let lead = small.leading();
    let mut seeds = Vec::new();
    for j in (0..=64usize).step_by(2) {
        let nval = GaussRat::from_int(j as i64);
        let mut needs = lead.subst(ni, &nval).is_zero();
        for (&s, c) in &small.coefficients {
            if (j as i64) + (s as i64) < 0 && !c.subst(ni, &nval).is_zero() {
                needs = true;
            }
        }
        if needs {
            if j > MAX_AXIS_SEED {
                return Err(Error::Capability(format!("small recurrence needs an on-axis seed of order {j}")));
            }
            seeds.push(j);
        }
    }
    Ok(seeds)
}

/// Convenience wrappers over a freshly prepared [`Evaluator`].
pub fn eval_large(rec: &Recurrence, kernel: &KernelSpec, x: &[f64], p: usize) -> Result<DerivSeq> {
    let small = specialize_small_recurrence(rec)?;
    Evaluator::from_artifacts(kernel, rec.clone(), small)?.eval_large(x, p, PrecisionMode::Double)
}

pub fn eval_small(small: &SmallRecurrence, kernel: &KernelSpec, x: &[f64], p: usize, p_small: usize) -> Result<DerivSeq> {
    let d = derive_cached(&kernel.pde)?;
    Evaluator::from_artifacts(kernel, d.large.clone(), small.clone())?.eval_small(x, p, p_small, PrecisionMode::Double)
}

pub fn eval_hybrid(kernel: &KernelSpec, x: &[f64], cfg: &HybridConfig) -> Result<DerivSeq> {
    Evaluator::new(kernel)?.eval_hybrid(x, cfg)
}

/// Single-step rounding estimate: the largest ratio between two of the terms
/// `b_{n-i} = a_{n-i} ∂^{n-i} G` that combine into `∂^n G`. Only nonzero terms
/// count; with none the estimate is 0.
pub fn single_step_error_estimate(rec: &Recurrence, prefix: &[Complex64], n: usize, x: &[f64], k: f64) -> Result<f64> {
    let terms = step_terms(rec, prefix, n, x, k)?;
    let mags: Vec<f64> = terms.iter().map(|b| b.norm()).filter(|m| *m > 0.0).collect();
    if mags.is_empty() {
        return Ok(0.0);
    }
    let big = mags.iter().cloned().fold(0.0, f64::max);
    let small = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(big / small)
}

/// The terms `b_{n-i}` of one large-recurrence step producing `∂^n G`, in
/// double precision, from a supplied prefix `∂^0..∂^{n-1}`.
pub fn step_terms(rec: &Recurrence, prefix: &[Complex64], n: usize, x: &[f64], k: f64) -> Result<Vec<Complex64>> {
    let d = rec.dimension;
    let m = n as i64 - rec.max_shift as i64;
    if m < 0 {
        return Err(Error::Config(format!("order {n} is seeded, not produced by a recurrence step")));
    }
    if prefix.len() < n {
        return Err(Error::Config(format!("prefix has {} entries, need {n}", prefix.len())));
    }
    let compiled = CompiledCoeffs::new(d, &rec.coefficients);
    let mut vals = vec![Complex64::new(0.0, 0.0); d + 3];
    for i in 0..d {
        vals[i] = Complex64::new(x[i], 0.0);
    }
    vals[Var::R.index(d)] = Complex64::new(x.iter().map(|v| v * v).sum::<f64>().sqrt(), 0.0);
    vals[Var::K.index(d)] = Complex64::new(k, 0.0);
    let mut fl = FlopCounter::new();
    let pc = compiled.at_point::<Complex64>(&vals, &mut fl);
    let lead_idx = pc.shifts.len() - 1;
    let lead = pc.eval(lead_idx, m as f64, &mut fl);
    if lead.is_zero() {
        return Err(Error::SingularStep { n: m });
    }
    let mut out = Vec::new();
    for (idx, &s) in pc.shifts.iter().enumerate().take(lead_idx) {
        let j = m + s as i64;
        if j < 0 {
            continue;
        }
        let a = -pc.eval(idx, m as f64, &mut fl) / lead;
        out.push(a * prefix[j as usize]);
    }
    Ok(out)
}

/// Constants of the combined bound: `M` and `m` from Assumption-style grid
/// sweeps, `C` from the slope fit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundConstants {
    pub big_m: f64,
    pub small_m: f64,
    pub c: f64,
}

/// `max(M/(m (p_small+1)!) ξ^{-e}, C ξ²)` with `e = p_small+1` for even `n`
/// and `p_small+2` for odd `n`.
pub fn combined_error_bound(cfg: &HybridConfig, n: usize, k: &BoundConstants) -> f64 {
    let fact: f64 = (1..=cfg.p_small + 1).map(|i| i as f64).product();
    let e = if n % 2 == 0 { cfg.p_small + 1 } else { cfg.p_small + 2 };
    let small = k.big_m / (k.small_m * fact) * cfg.xi.powi(-(e as i32));
    small.max(k.c * cfg.xi * cfg.xi)
}
