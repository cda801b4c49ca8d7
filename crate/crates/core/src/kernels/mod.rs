//! Radially symmetric Green's functions: closed-form values, low-order
//! derivatives in `x1`, special functions and an independent high-precision
//! derivative oracle.

pub mod hp;
pub mod hp_special;
pub mod oracle;
pub mod special;

use crate::error::{Error, Result};
use crate::pde2ode::PdeSpec;
use crate::symcore::{Poly, Var};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

pub use oracle::DerivOracleResult;

/// Number of closed-form derivatives shipped for every builtin kernel.
pub const BASE_ORDER: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum KernelId {
    Laplace2d,
    Laplace3d,
    Helmholtz2d,
    Helmholtz3d,
    Yukawa2d,
    Yukawa3d,
    Biharmonic2d,
    Biharmonic3d,
    Custom,
}

impl KernelId {
    pub const BUILTIN: [KernelId; 8] = [
        KernelId::Laplace2d,
        KernelId::Laplace3d,
        KernelId::Helmholtz2d,
        KernelId::Helmholtz3d,
        KernelId::Yukawa2d,
        KernelId::Yukawa3d,
        KernelId::Biharmonic2d,
        KernelId::Biharmonic3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Laplace2d => "laplace2d",
            KernelId::Laplace3d => "laplace3d",
            KernelId::Helmholtz2d => "helmholtz2d",
            KernelId::Helmholtz3d => "helmholtz3d",
            KernelId::Yukawa2d => "yukawa2d",
            KernelId::Yukawa3d => "yukawa3d",
            KernelId::Biharmonic2d => "biharmonic2d",
            KernelId::Biharmonic3d => "biharmonic3d",
            KernelId::Custom => "custom",
        }
    }

    pub fn from_name(s: &str) -> Result<KernelId> {
        KernelId::BUILTIN
            .into_iter()
            .chain([KernelId::Custom])
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown kernel id `{s}`")))
    }

    pub fn dimension(self) -> Option<usize> {
        match self {
            KernelId::Laplace2d | KernelId::Helmholtz2d | KernelId::Yukawa2d | KernelId::Biharmonic2d => Some(2),
            KernelId::Custom => None,
            _ => Some(3),
        }
    }

    pub fn needs_k(self) -> bool {
        matches!(self, KernelId::Helmholtz2d | KernelId::Helmholtz3d | KernelId::Yukawa2d | KernelId::Yukawa3d)
    }

    pub(crate) fn uses_bessel(self) -> bool {
        matches!(self, KernelId::Helmholtz2d | KernelId::Yukawa2d)
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Radial derivatives `G, G', G'', G'''` at `r` for a custom kernel.
pub type RadialCallback = Arc<dyn Fn(f64) -> Result<[Complex64; 4]> + Send + Sync>;

#[derive(Clone)]
pub struct KernelSpec {
    pub id: KernelId,
    pub dimension: usize,
    /// Wave number or screening parameter; real and positive when used.
    pub k: Option<f64>,
    pub pde: PdeSpec,
    pub base_order: usize,
    radial: Option<RadialCallback>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KernelSpec")
            .field("id", &self.id)
            .field("dimension", &self.dimension)
            .field("k", &self.k)
            .field("base_order", &self.base_order)
            .finish()
    }
}

/// `Δ`, `Δ + s·k²` or `Δ²` in `d` dimensions.
fn builtin_pde(id: KernelId, d: usize) -> PdeSpec {
    let unit = |i: usize, e: u32| {
        let mut v = vec![0u32; d];
        v[i] = e;
        v
    };
    let mut terms = Vec::new();
    match id {
        KernelId::Biharmonic2d | KernelId::Biharmonic3d => {
            for i in 0..d {
                terms.push((unit(i, 4), Poly::int(d, 1)));
                for j in i + 1..d {
                    let mut v = unit(i, 2);
                    v[j] = 2;
                    terms.push((v, Poly::int(d, 2)));
                }
            }
            return PdeSpec::new(d, 4, terms).expect("builtin PDE is valid");
        }
        _ => {
            for i in 0..d {
                terms.push((unit(i, 2), Poly::int(d, 1)));
            }
            let k2 = Poly::var_pow(d, Var::K, 2);
            match id {
                KernelId::Helmholtz2d | KernelId::Helmholtz3d => terms.push((vec![0; d], k2)),
                KernelId::Yukawa2d | KernelId::Yukawa3d => terms.push((vec![0; d], k2.neg())),
                _ => {}
            }
        }
    }
    PdeSpec::new(d, 2, terms).expect("builtin PDE is valid")
}

/// The PDE of a builtin kernel; `k` stays symbolic.
pub fn builtin_pde_of(id: KernelId) -> Result<PdeSpec> {
    let d = id
        .dimension()
        .ok_or_else(|| Error::Config("custom kernels have no builtin PDE".into()))?;
    Ok(builtin_pde(id, d))
}

impl KernelSpec {
    /// A builtin kernel. `k` is required for Helmholtz and Yukawa kernels and
    /// ignored otherwise.
    pub fn builtin(id: KernelId, k: Option<f64>) -> Result<KernelSpec> {
        let d = id
            .dimension()
            .ok_or_else(|| Error::Config("custom kernels are built with KernelSpec::custom".into()))?;
        let k = if id.needs_k() {
            match k {
                Some(v) if v > 0.0 && v.is_finite() => Some(v),
                Some(v) => return Err(Error::Config(format!("kernel {id} needs k > 0, got {v}"))),
                None => return Err(Error::Config(format!("kernel {id} needs the parameter k"))),
            }
        } else {
            None
        };
        Ok(KernelSpec { id, dimension: d, k, pde: builtin_pde(id, d), base_order: BASE_ORDER, radial: None })
    }

    pub fn from_name(name: &str, k: Option<f64>) -> Result<KernelSpec> {
        KernelSpec::builtin(KernelId::from_name(name)?, k)
    }

    /// A kernel known only through its PDE and a radial-derivative callback.
    /// Custom kernels have no oracle.
    pub fn custom(pde: PdeSpec, k: Option<f64>, radial: RadialCallback) -> KernelSpec {
        KernelSpec { id: KernelId::Custom, dimension: pde.dimension, k, pde, base_order: BASE_ORDER, radial: Some(radial) }
    }

    pub fn k_value(&self) -> f64 {
        self.k.unwrap_or(0.0)
    }

    pub fn eval_kernel(&self, r: f64) -> Result<Complex64> {
        Ok(self.radial_derivatives(r)?[0])
    }

    /// `G(r), G'(r), G''(r), G'''(r)`.
    pub fn radial_derivatives(&self, r: f64) -> Result<[Complex64; 4]> {
        self.radial_with_log(r, r.ln())
    }

    /// As `radial_derivatives`, with `ln r` supplied by the caller.
    fn radial_with_log(&self, r: f64, log_r: f64) -> Result<[Complex64; 4]> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::Domain(format!("kernel evaluated at r = {r}")));
        }
        let c = |v: f64| Complex64::new(v, 0.0);
        let k = self.k_value();
        Ok(match self.id {
            KernelId::Laplace2d => {
                let s = -1.0 / (2.0 * PI);
                [c(s * log_r), c(s / r), c(-s / (r * r)), c(2.0 * s / (r * r * r))]
            }
            KernelId::Laplace3d => {
                let s = -1.0 / (4.0 * PI);
                [c(s / r), c(-s / (r * r)), c(2.0 * s / r.powi(3)), c(-6.0 * s / r.powi(4))]
            }
            KernelId::Biharmonic2d => {
                let s = 1.0 / (8.0 * PI);
                let l = log_r;
                [c(s * r * r * l), c(s * (2.0 * r * l + r)), c(s * (2.0 * l + 3.0)), c(s * 2.0 / r)]
            }
            KernelId::Biharmonic3d => {
                let s = -1.0 / (8.0 * PI);
                [c(s * r), c(s), c(0.0), c(0.0)]
            }
            KernelId::Helmholtz2d => {
                let h = special::hankel0_derivatives(k * r)?;
                let s = Complex64::new(0.0, 0.25);
                [s * h[0], s * k * h[1], s * k * k * h[2], s * k.powi(3) * h[3]]
            }
            KernelId::Yukawa2d => {
                let g = special::k0_derivatives(k * r)?;
                let s = 1.0 / (2.0 * PI);
                [c(s * g[0]), c(s * k * g[1]), c(s * k * k * g[2]), c(s * k.powi(3) * g[3])]
            }
            KernelId::Helmholtz3d => exp_over_r(Complex64::new(0.0, k), r),
            KernelId::Yukawa3d => exp_over_r(Complex64::new(-k, 0.0), r),
            KernelId::Custom => (self.radial.as_ref().expect("custom kernel has a callback"))(r)?,
        })
    }

    /// Closed-form `∂^0..∂^m_{x1} G(|x|)`, `m <= base_order`.
    pub fn base_derivatives(&self, x: &[f64], m: usize) -> Result<Vec<Complex64>> {
        if m > self.base_order {
            return Err(Error::Capability(format!("closed-form derivatives only up to order {}, asked for {m}", self.base_order)));
        }
        self.check_point(x)?;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let g = self.radial_with_log(r, log_norm(x))?;
        let u = x[0] / r;
        let w = (1.0 - u * u) / r; // ∂u/∂x1
        let out = [
            g[0],
            g[1] * u,
            g[2] * (u * u) + g[1] * w,
            g[3] * (u * u * u) + g[2] * (3.0 * u * w) - g[1] * (3.0 * u * w / r),
        ];
        Ok(out[..=m].to_vec())
    }

    /// `(∂^j_{x1} G)` at `x1 = 0` for `j = 0, 2, .., 2·base_order`, where the
    /// remaining coordinates have norm `xbar > 0`. Odd orders vanish.
    pub fn axis_derivatives(&self, xbar: f64) -> Result<Vec<Complex64>> {
        let g = self.radial_derivatives(xbar)?;
        let x = xbar;
        // G(sqrt(xbar² + u)) differentiated in u at 0, then ∂^{2j}|0 = (2j)!/j! F^(j)(0)
        let f1 = g[1] / (2.0 * x);
        let f2 = g[2] / (4.0 * x * x) - g[1] / (4.0 * x.powi(3));
        let f3 = g[3] / (8.0 * x.powi(3)) - g[2] * (3.0 / (8.0 * x.powi(4))) + g[1] * (3.0 / (8.0 * x.powi(5)));
        Ok(vec![g[0], f1 * 2.0, f2 * 12.0, f3 * 120.0])
    }

    /// High-precision `∂^0..∂^n_{x1} G` from the closed form.
    pub fn oracle_derivatives(&self, x: &[f64], n: usize, digits: u32) -> Result<DerivOracleResult> {
        if self.id == KernelId::Custom {
            return Err(Error::Capability("custom kernels have no oracle".into()));
        }
        self.check_point(x)?;
        oracle::oracle_derivatives(self.id, self.k_value(), x, n, digits)
    }

    pub fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dimension {
            return Err(Error::Domain(format!("point has {} coordinates, kernel dimension is {}", x.len(), self.dimension)));
        }
        if x.iter().all(|v| *v == 0.0) {
            return Err(Error::Domain("point is the origin".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("point has non-finite coordinates".into()));
        }
        Ok(())
    }
}

/// Derivatives of `exp(s r) / (4π r)`.
fn exp_over_r(s: Complex64, r: f64) -> [Complex64; 4] {
    let e = (s * r).exp() / (4.0 * PI);
    let mut out = [Complex64::new(0.0, 0.0); 4];
    let fact = [1.0, 1.0, 2.0, 6.0];
    let binom = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    for m in 0..4 {
        for j in 0..=m {
            let inv = if (m - j) % 2 == 0 { 1.0 } else { -1.0 } * fact[m - j] / r.powi((m - j + 1) as i32);
            out[m] += e * s.powi(j as i32) * (binom[m][j] * inv);
        }
    }
    out
}

/// `ln |x|` without the cancellation of `ln(sqrt(Σ x_i²))` near `|x| = 1`.
fn log_norm(x: &[f64]) -> f64 {
    let mut a: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    a.sort_by(|p, q| q.total_cmp(p));
    let s = a.iter().map(|v| v * v).sum::<f64>();
    if !(0.5..=2.0).contains(&s) {
        return 0.5 * s.ln();
    }
    let m = a[0];
    let rest: f64 = a[1..].iter().map(|v| v * v).sum();
    0.5 * ((m - 1.0) * (m + 1.0) + rest).ln_1p()
}
