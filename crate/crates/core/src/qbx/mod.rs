//! Rotation-based line-Taylor QBX for the single-layer potential on closed
//! curves in 2D.
//!
//! For a target `x` on the curve with outward normal `ν`, the expansion center
//! is `c = x − r ν`. Each source-target pair is rotated about `c` so that `ν`
//! becomes `x̂1`; the kernel is then Taylor-expanded along `x1` only, which
//! needs nothing but `∂^i_{x1} G` at `c − y` in the rotated frame.

pub mod direct;
pub mod reference;

use crate::error::{Error, Result};
use crate::evaluator::{Evaluator, FlopCounter, HybridConfig};
use crate::kernels::KernelSpec;
use direct::DirectTable;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// A periodic curve sampled at uniform parameter values.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveDiscretization {
    pub t: Vec<f64>,
    pub nodes: Vec<[f64; 2]>,
    pub normals: Vec<[f64; 2]>,
    pub speed: Vec<f64>,
    /// Trapezoid weights including the speed factor.
    pub weights: Vec<f64>,
}

/// Ellipse `(a cos t, b sin t)` rotated by `angle` about the origin.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ellipse {
    pub a: f64,
    pub b: f64,
    pub angle: f64,
}

impl Ellipse {
    pub fn new(a: f64, b: f64) -> Ellipse {
        Ellipse { a, b, angle: 0.0 }
    }

    pub fn rotated(self, angle: f64) -> Ellipse {
        Ellipse { angle: self.angle + angle, ..self }
    }

    pub fn discretize(&self, n: usize) -> Result<CurveDiscretization> {
        if n < 8 {
            return Err(Error::Config(format!("need at least 8 nodes, got {n}")));
        }
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(Error::Config("ellipse semi-axes must be positive".into()));
        }
        let (sa, ca) = self.angle.sin_cos();
        let rot = |v: [f64; 2]| [ca * v[0] - sa * v[1], sa * v[0] + ca * v[1]];
        let h = 2.0 * PI / n as f64;
        let mut c = CurveDiscretization {
            t: Vec::with_capacity(n),
            nodes: Vec::with_capacity(n),
            normals: Vec::with_capacity(n),
            speed: Vec::with_capacity(n),
            weights: Vec::with_capacity(n),
        };
        for j in 0..n {
            let t = h * j as f64;
            let (s, co) = t.sin_cos();
            let d = [-self.a * s, self.b * co];
            let sp = d[0].hypot(d[1]);
            c.t.push(t);
            c.nodes.push(rot([self.a * co, self.b * s]));
            c.normals.push(rot([d[1] / sp, -d[0] / sp]));
            c.speed.push(sp);
            c.weights.push(h * sp);
        }
        Ok(c)
    }
}

pub fn discretize_ellipse(a: f64, b: f64, n: usize) -> Result<CurveDiscretization> {
    Ellipse::new(a, b).discretize(n)
}

/// Rotate about `center` so that `normal` maps to `x̂1`. Returns the images
/// of `target` and `source`.
pub fn rotate_frame(target: [f64; 2], center: [f64; 2], normal: [f64; 2], source: [f64; 2]) -> ([f64; 2], [f64; 2]) {
    let rot = |p: [f64; 2]| {
        let d = [p[0] - center[0], p[1] - center[1]];
        [center[0] + normal[0] * d[0] + normal[1] * d[1], center[1] - normal[1] * d[0] + normal[0] * d[1]]
    };
    (rot(target), rot(source))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    /// Hybrid large/small-|x1| recurrences.
    Recurrence,
    /// Symbolic derivative tables.
    Direct,
}

impl Backend {
    pub fn name(self) -> &'static str {
        match self {
            Backend::Recurrence => "recurrence",
            Backend::Direct => "direct",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QbxConfig {
    pub p_qbx: usize,
    /// Expansion radius over local node spacing.
    pub radius_factor: f64,
    pub backend: Backend,
    pub hybrid: HybridConfig,
    /// Source nodes per target-grid node; sources sit on the refined grid.
    pub oversample: usize,
}

impl Default for QbxConfig {
    fn default() -> Self {
        QbxConfig { p_qbx: 5, radius_factor: 2.5, backend: Backend::Recurrence, hybrid: HybridConfig::default(), oversample: 4 }
    }
}

/// A prepared derivative backend.
pub enum DerivativeBackend {
    Recurrence(Evaluator, HybridConfig),
    Direct(DirectTable),
}

impl DerivativeBackend {
    pub fn new(kernel: &KernelSpec, backend: Backend, p: usize, hybrid: HybridConfig) -> Result<DerivativeBackend> {
        Ok(match backend {
            Backend::Recurrence => DerivativeBackend::Recurrence(Evaluator::new(kernel)?, HybridConfig { p, ..hybrid }),
            Backend::Direct => DerivativeBackend::Direct(DirectTable::new(kernel, p)?),
        })
    }

    /// `∂^0..∂^p_{x1} G` at `v`.
    pub fn derivatives(&self, v: &[f64], p: usize, flops: &mut FlopCounter) -> Result<Vec<Complex64>> {
        match self {
            DerivativeBackend::Recurrence(ev, cfg) => {
                let cfg = HybridConfig { p, ..*cfg };
                Ok(ev.eval_hybrid_counted(v, &cfg, flops)?.values)
            }
            DerivativeBackend::Direct(t) => t.eval(v, p, flops),
        }
    }
}

/// `Σ_{i≤p} (d^i/dt^i) G(|x' + t x̂1 − y'|)|_{t=−r} r^i / i!` in the rotated
/// frame.
pub fn line_taylor_contribution(
    backend: &DerivativeBackend,
    target: [f64; 2],
    source: [f64; 2],
    r: f64,
    p: usize,
    flops: &mut FlopCounter,
) -> Result<Complex64> {
    let v = [target[0] - r - source[0], target[1] - source[1]];
    if v[0] == 0.0 && v[1] == 0.0 {
        return Err(Error::Geometry("expansion center coincides with a source".into()));
    }
    let d = backend.derivatives(&v, p, flops)?;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut f = 1.0;
    for (i, di) in d.iter().enumerate() {
        if i > 0 {
            f *= r / i as f64;
            flops.rmul(2);
        }
        acc += di * f;
        flops.cmul_real(1);
        flops.cadd(1);
    }
    Ok(acc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct QbxResult {
    pub values: Vec<Complex64>,
    /// Expansion radius per target.
    pub radii: Vec<f64>,
    pub flops: FlopCounter,
    /// Real flops spent on each target.
    pub per_target_flops: Vec<u64>,
}

/// Single-layer potential at curve nodes `targets` of the `n`-node
/// discretization, with sources on the `n·oversample` grid carrying the
/// analytic density.
pub fn single_layer_qbx(
    kernel: &KernelSpec,
    curve: &Ellipse,
    n: usize,
    density: &(dyn Fn(f64) -> f64 + Sync),
    targets: &[usize],
    cfg: &QbxConfig,
) -> Result<QbxResult> {
    if kernel.dimension != 2 {
        return Err(Error::Config("QBX is implemented for 2D kernels".into()));
    }
    if cfg.oversample < 1 {
        return Err(Error::Config("oversample must be at least 1".into()));
    }
    if !(cfg.radius_factor > 0.0) {
        return Err(Error::Config("radius factor must be positive".into()));
    }
    let coarse = curve.discretize(n)?;
    let fine = curve.discretize(n * cfg.oversample)?;
    let sigma: Vec<f64> = fine.t.iter().map(|&t| density(t)).collect();
    let backend = DerivativeBackend::new(kernel, cfg.backend, cfg.p_qbx, cfg.hybrid)?;
    let h = 2.0 * PI / n as f64;
    for &j in targets {
        if j >= n {
            return Err(Error::Config(format!("target index {j} out of range for {n} nodes")));
        }
        if cfg.radius_factor * h * coarse.speed[j] < 1e-12 {
            return Err(Error::Config("expansion radius below 1e-12".into()));
        }
    }
    let per_target: Vec<Result<(Complex64, f64, FlopCounter)>> = targets
        .par_iter()
        .map(|&j| {
            let mut flops = FlopCounter::new();
            let r = cfg.radius_factor * h * coarse.speed[j];
            let x = coarse.nodes[j];
            let nu = coarse.normals[j];
            let c = [x[0] - r * nu[0], x[1] - r * nu[1]];
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, y) in fine.nodes.iter().enumerate() {
                let (tp, yp) = rotate_frame(x, c, nu, *y);
                flops.rmul(8);
                flops.radd(8);
                let contrib = line_taylor_contribution(&backend, tp, yp, r, cfg.p_qbx, &mut flops)?;
                acc += contrib * (fine.weights[m] * sigma[m]);
                flops.rmul(1);
                flops.cmul_real(1);
                flops.cadd(1);
            }
            Ok((acc, r, flops))
        })
        .collect();
    let mut out = QbxResult { values: Vec::with_capacity(targets.len()), radii: Vec::with_capacity(targets.len()), flops: FlopCounter::new(), per_target_flops: Vec::with_capacity(targets.len()) };
    for res in per_target {
        let (v, r, f) = res?;
        out.values.push(v);
        out.radii.push(r);
        out.per_target_flops.push(f.total());
        out.flops += f;
    }
    Ok(out)
}

/// `max_i |a_i − b_i| / max_i |b_i|`.
pub fn linf_relative(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num = a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    let den = b.iter().map(|y| y.norm()).fold(0.0, f64::max);
    num / den
}
