//! Desk-scale numerical studies: error heat maps, the single-step slope fit,
//! derivative-growth heat maps, the QBX error table and the flop comparison.
//! Every study returns an [`ExperimentReport`] whose CSV starts with `#`
//! comment lines holding the full parameterization.

use crate::error::{Error, Result};
use crate::evaluator::{step_terms, Evaluator, FlopCounter, HybridConfig};
use crate::kernels::{KernelId, KernelSpec};
use crate::qbx::direct::DirectTable;
use crate::qbx::{self, Backend, DerivativeBackend, Ellipse, QbxConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Digits of the oracle used as ground truth.
pub const ORACLE_DIGITS: u32 = 50;

/// Full round-trip formatting of a binary64.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub x1: (f64, f64),
    pub x2: (f64, f64),
    pub res1: usize,
    pub res2: usize,
    pub log: bool,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { x1: (1e-3, 10.0), x2: (1e-3, 10.0), res1: 64, res2: 64, log: true }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.res1 < 16 || self.res2 < 16 {
            return Err(Error::Config("grid resolution must be at least 16 per axis".into()));
        }
        for (lo, hi) in [self.x1, self.x2] {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Config(format!("bad grid range [{lo}, {hi}]")));
            }
            if self.log && lo <= 0.0 {
                return Err(Error::Config("log-spaced ranges must be positive".into()));
            }
        }
        if !self.log && self.axis(self.x1, self.res1).contains(&0.0) && self.axis(self.x2, self.res2).contains(&0.0) {
            return Err(Error::Config("grid contains the origin".into()));
        }
        Ok(())
    }

    fn axis(&self, (lo, hi): (f64, f64), n: usize) -> Vec<f64> {
        (0..n)
            .map(|i| {
                let t = i as f64 / (n - 1) as f64;
                if self.log {
                    10f64.powf(lo.log10() + t * (hi.log10() - lo.log10()))
                } else {
                    lo + t * (hi - lo)
                }
            })
            .collect()
    }

    /// Cells in row-major order (`x2` outer, `x1` inner).
    pub fn points(&self) -> Vec<[f64; 2]> {
        let a1 = self.axis(self.x1, self.res1);
        let a2 = self.axis(self.x2, self.res2);
        a2.iter().flat_map(|&b| a1.iter().map(move |&a| [a, b])).collect()
    }

    fn describe(&self) -> String {
        format!(
            "x1=[{}, {}] x2=[{}, {}] res={}x{} spacing={}",
            self.x1.0,
            self.x1.1,
            self.x2.0,
            self.x2.1,
            self.res1,
            self.res2,
            if self.log { "log" } else { "linear" }
        )
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentReport {
    pub id: String,
    pub params: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub summary: BTreeMap<String, f64>,
}

impl ExperimentReport {
    fn new(id: &str, columns: &[&str]) -> Self {
        ExperimentReport {
            id: id.into(),
            params: Vec::new(),
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
            summary: BTreeMap::new(),
        }
    }

    fn param(&mut self, k: &str, v: impl ToString) {
        self.params.push((k.into(), v.to_string()));
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# experiment: {}", self.id);
        for (k, v) in &self.params {
            let _ = writeln!(s, "# {k}: {v}");
        }
        for (k, v) in &self.summary {
            let _ = writeln!(s, "# summary {k}: {}", fmt_f64(*v));
        }
        let _ = writeln!(s, "{}", self.columns.join(","));
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm()
    }
}

fn median(v: &mut [f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn kernel_params(r: &mut ExperimentReport, kernel: &KernelSpec) {
    r.param("kernel", kernel.id.name());
    if kernel.id.needs_k() {
        r.param("k", fmt_f64(kernel.k_value()));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeatmapMode {
    Large,
    Small,
    Hybrid,
}

impl HeatmapMode {
    pub fn name(self) -> &'static str {
        match self {
            HeatmapMode::Large => "large",
            HeatmapMode::Small => "small",
            HeatmapMode::Hybrid => "hybrid",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        match s {
            "large" => Ok(HeatmapMode::Large),
            "small" => Ok(HeatmapMode::Small),
            "hybrid" => Ok(HeatmapMode::Hybrid),
            _ => Err(Error::Config(format!("unknown mode {s:?}"))),
        }
    }
}

/// Relative error of `∂^n_{x1} G` per grid cell against the oracle.
/// Columns: `x1,x2,ratio,branch,value_re,value_im,oracle_re,oracle_im,rel_error`.
pub fn error_heatmap(kernel: &KernelSpec, n: usize, grid: &GridSpec, mode: HeatmapMode, cfg: &HybridConfig) -> Result<ExperimentReport> {
    grid.validate()?;
    cfg.validate()?;
    let ev = Evaluator::new(kernel)?;
    let dim = kernel.dimension;
    let cells = grid.points();
    let rows: Vec<Result<(f64, Vec<String>)>> = cells
        .par_iter()
        .map(|c| {
            let mut x = vec![0.0; dim];
            x[0] = c[0];
            x[1] = c[1];
            let seq = match mode {
                HeatmapMode::Large => ev.eval_large(&x, n, cfg.precision)?,
                HeatmapMode::Small => ev.eval_small(&x, n, cfg.p_small, cfg.precision)?,
                HeatmapMode::Hybrid => ev.eval_hybrid(&x, &HybridConfig { p: n, ..*cfg })?,
            };
            let o = kernel.oracle_derivatives(&x, n, ORACLE_DIGITS)?.values[n];
            let v = seq.values[n];
            let e = rel_err(v, o);
            Ok((
                e,
                vec![
                    fmt_f64(c[0]),
                    fmt_f64(c[1]),
                    fmt_f64(c[0] / c[1]),
                    seq.branch.name().to_string(),
                    fmt_f64(v.re),
                    fmt_f64(v.im),
                    fmt_f64(o.re),
                    fmt_f64(o.im),
                    fmt_f64(e),
                ],
            ))
        })
        .collect();
    let mut r = ExperimentReport::new("heatmap", &["x1", "x2", "ratio", "branch", "value_re", "value_im", "oracle_re", "oracle_im", "rel_error"]);
    r.param("n", n);
    kernel_params(&mut r, kernel);
    r.param("grid", grid.describe());
    r.param("mode", mode.name());
    r.param("xi", fmt_f64(cfg.xi));
    r.param("p_small", cfg.p_small);
    r.param("precision", format!("{:?}", cfg.precision).to_lowercase());
    r.param("oracle_digits", ORACLE_DIGITS);
    let mut errs = Vec::with_capacity(rows.len());
    let mut cone = Vec::new();
    for (c, row) in cells.iter().zip(rows) {
        let (e, row) = row?;
        errs.push(e);
        if c[0] / c[1] < 1e-2 {
            cone.push(e);
        }
        r.rows.push(row);
    }
    r.summary.insert("max_rel_error".into(), errs.iter().cloned().fold(0.0, f64::max));
    r.summary.insert("median_rel_error".into(), median(&mut errs));
    r.summary.insert("median_rel_error_ratio_below_1e-2".into(), median(&mut cone));
    Ok(r)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeFit {
    /// `None` when every sample had zero error.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// `10^intercept`: the constant `C` in `error ≈ C (|x1|/x̄)^slope`.
    pub constant: Option<f64>,
    /// `(ratio, relative error)` per sample with nonzero error.
    pub samples: Vec<(f64, f64)>,
    pub dropped_zero: usize,
}

/// Least-squares line through `(log10 x, log10 y)`; `None` with fewer than
/// two distinct abscissae.
pub fn fit_loglog(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.log10(), y.log10())).collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// The default ratios `|x1|/x̄ = 10^0, 10^-1, …, 10^-9`.
pub fn default_slope_ratios() -> Vec<f64> {
    (0..10).map(|j| 10f64.powi(-j)).collect()
}

/// Single-step relative error of the large recurrence with an exact prefix,
/// fitted against `|x1|/x̄` on log-log axes. Points have `x̄` uniform in
/// `[0.5, 2]` and a random sign of `x1`.
pub fn slope_fit(kernel: &KernelSpec, n: usize, ratios: &[f64], samples_per_ratio: usize, seed: u64) -> Result<SlopeFit> {
    if kernel.dimension != 2 {
        return Err(Error::Config("slope fit uses 2D points".into()));
    }
    let ev = Evaluator::new(kernel)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::new();
    for &q in ratios {
        for _ in 0..samples_per_ratio {
            let xb: f64 = rng.gen_range(0.5..2.0);
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            pts.push((q, [sign * q * xb, xb]));
        }
    }
    let errs: Vec<Result<f64>> = pts
        .par_iter()
        .map(|(_, x)| {
            let o = kernel.oracle_derivatives(x, n, ORACLE_DIGITS)?.values;
            let terms = step_terms(&ev.large, &o[..n], n, x, kernel.k_value())?;
            let v: Complex64 = terms.iter().sum();
            Ok(rel_err(v, o[n]))
        })
        .collect();
    let mut samples = Vec::new();
    let mut dropped = 0;
    for ((q, _), e) in pts.iter().zip(errs) {
        let e = e?;
        if e > 0.0 {
            samples.push((*q, e));
        } else {
            dropped += 1;
        }
    }
    let fit = fit_loglog(&samples);
    Ok(SlopeFit {
        slope: fit.map(|f| f.0),
        intercept: fit.map(|f| f.1),
        constant: fit.map(|f| 10f64.powf(f.1)),
        samples,
        dropped_zero: dropped,
    })
}

/// Report form of [`slope_fit`]. Columns: `ratio,rel_error`.
pub fn slope_report(kernel: &KernelSpec, n: usize, ratios: &[f64], samples_per_ratio: usize, seed: u64) -> Result<ExperimentReport> {
    let fit = slope_fit(kernel, n, ratios, samples_per_ratio, seed)?;
    let mut r = ExperimentReport::new("slope", &["ratio", "rel_error"]);
    r.param("n", n);
    kernel_params(&mut r, kernel);
    r.param("ratios", ratios.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" "));
    r.param("samples_per_ratio", samples_per_ratio);
    r.param("seed", seed);
    r.param("oracle_digits", ORACLE_DIGITS);
    r.param("dropped_zero_error_samples", fit.dropped_zero);
    r.param("slope", fit.slope.map(fmt_f64).unwrap_or_else(|| "undefined".into()));
    for (q, e) in &fit.samples {
        r.rows.push(vec![fmt_f64(*q), fmt_f64(*e)]);
    }
    if let (Some(s), Some(i), Some(c)) = (fit.slope, fit.intercept, fit.constant) {
        r.summary.insert("slope".into(), s);
        r.summary.insert("intercept".into(), i);
        r.summary.insert("constant".into(), c);
    }
    Ok(r)
}

/// Chebyshev–Lobatto samples of `[0, a]`, endpoints included.
pub fn chebyshev_samples(a: f64, m: usize) -> Vec<f64> {
    let m = m.max(2);
    (0..m)
        .map(|j| 0.5 * a * (1.0 - (std::f64::consts::PI * j as f64 / (m - 1) as f64).cos()))
        .collect()
}

/// Maximum of `f` over the samples, refined by golden-section search
/// between the neighbours of the best sample.
fn sampled_max(samples: &[f64], f: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let vals = samples.iter().map(|&s| f(s)).collect::<Result<Vec<f64>>>()?;
    let (i, mut best) = vals.iter().cloned().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, v)| if v > a.1 { (i, v) } else { a });
    let (mut lo, mut hi) = (samples[i.saturating_sub(1)], samples[(i + 1).min(samples.len() - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..60 {
        if hi - lo <= 1e-12 * hi.abs().max(1e-300) {
            break;
        }
        let (a, b) = (hi - g * (hi - lo), lo + g * (hi - lo));
        let (fa, fb) = (f(a)?, f(b)?);
        best = best.max(fa).max(fb);
        if fa >= fb {
            hi = b;
        } else {
            lo = a;
        }
    }
    Ok(best)
}

/// `|x1|^e` exponents of the normalizations `|x1|^a / x̄^{c+1}` (odd order)
/// and `|x1|^b / x̄^d` (even order).
fn normalization_powers(id: KernelId) -> (i32, i32) {
    match id {
        KernelId::Biharmonic2d | KernelId::Biharmonic3d => (3, 2),
        _ => (1, 0),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AssumptionConfig {
    pub c: usize,
    pub d_even: usize,
    /// Samples of `ξ ∈ [0, x1]` for the maximum.
    pub samples: usize,
}

impl Default for AssumptionConfig {
    fn default() -> Self {
        AssumptionConfig { c: 5, d_even: 6, samples: 64 }
    }
}

/// Per cell, `max_{0≤ξ≤x1} |∂^c G(ξ, x2)|` over its normalization for the
/// odd order `c` and the same for the even order `d`.
/// Columns: `x1,x2,ratio,in_region,odd_ratio,even_ratio`; the region is
/// `|x1|/x̄ < 1`.
pub fn assumption_heatmap(kernel: &KernelSpec, grid: &GridSpec, cfg: &AssumptionConfig) -> Result<ExperimentReport> {
    grid.validate()?;
    if cfg.c % 2 == 0 {
        return Err(Error::Config(format!("c must be odd, got {}", cfg.c)));
    }
    if cfg.d_even % 2 == 1 {
        return Err(Error::Config(format!("d must be even, got {}", cfg.d_even)));
    }
    let table = DirectTable::new(kernel, cfg.c.max(cfg.d_even))?;
    let (a, b) = normalization_powers(kernel.id);
    let dim = kernel.dimension;
    let cells = grid.points();
    let vals: Vec<Result<(f64, f64)>> = cells
        .par_iter()
        .map(|c| {
            let (x1, xb) = (c[0], c[1]);
            let top = cfg.c.max(cfg.d_even);
            let f = |xi: f64, order: usize| -> Result<f64> {
                let mut x = vec![0.0; dim];
                x[0] = xi;
                x[1] = xb;
                Ok(table.eval(&x, top, &mut FlopCounter::new())?[order].norm())
            };
            // the extrema sit at ξ of order x̄, so [0, x1] and [0, min(x1, 8 x̄)] are both sampled
            let mut xs = chebyshev_samples(x1, cfg.samples);
            if x1 > 8.0 * xb {
                xs.extend(chebyshev_samples(8.0 * xb, cfg.samples));
                xs.sort_by(f64::total_cmp);
                xs.dedup();
            }
            let mo = sampled_max(&xs, |xi| f(xi, cfg.c))?;
            let me = sampled_max(&xs, |xi| f(xi, cfg.d_even))?;
            let odd = mo / (x1.powi(a) / xb.powi(cfg.c as i32 + 1));
            let even = me / (x1.powi(b) / xb.powi(cfg.d_even as i32));
            Ok((odd, even))
        })
        .collect();
    let mut r = ExperimentReport::new("assumptions", &["x1", "x2", "ratio", "in_region", "odd_ratio", "even_ratio"]);
    kernel_params(&mut r, kernel);
    r.param("c", cfg.c);
    r.param("d", cfg.d_even);
    r.param("xi_samples", format!("{n} Chebyshev-Lobatto points on [0, x1] plus {n} on [0, 8 xbar] when x1 > 8 xbar, best refined by golden-section search", n = cfg.samples));
    r.param("odd_normalization", format!("|x1|^{a} / xbar^(c+1)"));
    r.param("even_normalization", format!("|x1|^{b} / xbar^d"));
    r.param("grid", grid.describe());
    r.param("region", "x1/xbar < 1");
    let (mut omin, mut omax, mut emin, mut emax) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
    for (c, v) in cells.iter().zip(vals) {
        let (o, e) = v?;
        let inside = c[0] / c[1] < 1.0;
        if inside {
            omin = omin.min(o);
            omax = omax.max(o);
            emin = emin.min(e);
            emax = emax.max(e);
        }
        r.rows.push(vec![fmt_f64(c[0]), fmt_f64(c[1]), fmt_f64(c[0] / c[1]), (inside as u8).to_string(), fmt_f64(o), fmt_f64(e)]);
    }
    r.summary.insert("odd_ratio_min".into(), omin);
    r.summary.insert("odd_ratio_max".into(), omax);
    r.summary.insert("even_ratio_min".into(), emin);
    r.summary.insert("even_ratio_max".into(), emax);
    Ok(r)
}

/// The ellipse problem: `(2 cos t, sin t)` with density `cos(10 t)`.
pub fn benchmark_ellipse() -> Ellipse {
    Ellipse::new(2.0, 1.0)
}

pub fn cos10(t: f64) -> f64 {
    (10.0 * t).cos()
}

/// Target indices: `count` equispaced nodes of an `n`-node grid.
pub fn equispaced_targets(n: usize, count: usize) -> Vec<usize> {
    let count = count.min(n);
    (0..count).map(|i| i * n / count).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct QbxTableConfig {
    pub n_list: Vec<usize>,
    pub p_list: Vec<usize>,
    pub backends: Vec<Backend>,
    pub targets: usize,
    pub qbx: QbxConfig,
    pub reference_oversample: usize,
}

impl Default for QbxTableConfig {
    fn default() -> Self {
        QbxTableConfig {
            n_list: vec![200, 400, 800, 1600],
            p_list: vec![3, 5, 7, 9, 11],
            backends: vec![Backend::Recurrence, Backend::Direct],
            targets: 50,
            qbx: QbxConfig::default(),
            reference_oversample: 4,
        }
    }
}

/// L∞ relative error against the certified reference per `(N, p, backend)`
/// on the ellipse problem with the Laplace kernel.
/// Columns: `N,p_qbx,backend,radius_factor,linf_rel_error,flops`.
pub fn qbx_error_table(cfg: &QbxTableConfig) -> Result<ExperimentReport> {
    let kernel = KernelSpec::builtin(KernelId::Laplace2d, None)?;
    let ell = benchmark_ellipse();
    let mut r = ExperimentReport::new("qbx-table", &["N", "p_qbx", "backend", "radius_factor", "linf_rel_error", "flops"]);
    r.param("kernel", kernel.id.name());
    r.param("curve", "ellipse (2 cos t, sin t)");
    r.param("density", "cos(10 t)");
    r.param("targets", format!("{} equispaced nodes", cfg.targets));
    r.param("radius_factor", fmt_f64(cfg.qbx.radius_factor));
    r.param("source_oversample", cfg.qbx.oversample);
    r.param("reference", format!("spectral log-quadrature, oversample {} certified against {}", cfg.reference_oversample, 2 * cfg.reference_oversample));
    r.param("xi", fmt_f64(cfg.qbx.hybrid.xi));
    r.param("p_small", cfg.qbx.hybrid.p_small);
    for &n in &cfg.n_list {
        let targets = equispaced_targets(n, cfg.targets);
        let reference = qbx::reference::reference_potential(&kernel, &ell, n, &cos10, &targets, cfg.reference_oversample)?;
        for &p in &cfg.p_list {
            for &b in &cfg.backends {
                let q = QbxConfig { p_qbx: p, backend: b, ..cfg.qbx };
                let res = qbx::single_layer_qbx(&kernel, &ell, n, &cos10, &targets, &q)?;
                let e = qbx::linf_relative(&res.values, &reference);
                r.rows.push(vec![n.to_string(), p.to_string(), b.name().into(), fmt_f64(q.radius_factor), fmt_f64(e), res.flops.total().to_string()]);
            }
        }
    }
    Ok(r)
}

/// Flops of one line-Taylor expansion per backend: the mean over all source
/// points seen from one target of the ellipse problem (`N = 200`, target
/// node 0), so both branches of the hybrid evaluator are represented.
pub fn line_taylor_flops(kernel: &KernelSpec, backend: Backend, p: usize, qcfg: &QbxConfig) -> Result<f64> {
    let n = 200;
    let ell = benchmark_ellipse();
    let coarse = ell.discretize(n)?;
    let fine = ell.discretize(n * qcfg.oversample)?;
    let be = DerivativeBackend::new(kernel, backend, p, qcfg.hybrid)?;
    let h = 2.0 * std::f64::consts::PI / n as f64;
    let (x, nu) = (coarse.nodes[0], coarse.normals[0]);
    let r = qcfg.radius_factor * h * coarse.speed[0];
    let c = [x[0] - r * nu[0], x[1] - r * nu[1]];
    let mut fl = FlopCounter::new();
    for y in &fine.nodes {
        let (tp, yp) = qbx::rotate_frame(x, c, nu, *y);
        qbx::line_taylor_contribution(&be, tp, yp, r, p, &mut fl)?;
    }
    Ok(fl.total() as f64 / fine.nodes.len() as f64)
}

/// Columns: `p,recurrence_flops,direct_flops`.
pub fn flop_comparison(kernel: &KernelSpec, p_range: std::ops::RangeInclusive<usize>) -> Result<ExperimentReport> {
    if kernel.dimension != 2 {
        return Err(Error::Config("flop comparison uses the 2D line-Taylor setting".into()));
    }
    let qcfg = QbxConfig::default();
    let mut r = ExperimentReport::new("flops", &["p", "recurrence_flops", "direct_flops"]);
    kernel_params(&mut r, kernel);
    r.param("p_range", format!("{}..{}", p_range.start(), p_range.end()));
    r.param("setting", "mean over the sources seen from target node 0 of the N=200 ellipse problem");
    r.param("counting", "real additions plus multiplications; special-function calls excluded");
    let (mut rec, mut dir) = (Vec::new(), Vec::new());
    for p in p_range {
        let a = line_taylor_flops(kernel, Backend::Recurrence, p, &qcfg)?;
        let b = line_taylor_flops(kernel, Backend::Direct, p, &qcfg)?;
        rec.push((p as f64, a));
        dir.push((p as f64, b));
        r.rows.push(vec![p.to_string(), fmt_f64(a), fmt_f64(b)]);
    }
    if let Some((s, _)) = fit_loglog(&rec) {
        r.summary.insert("recurrence_exponent".into(), s);
    }
    if let Some((s, _)) = fit_loglog(&dir) {
        r.summary.insert("direct_exponent".into(), s);
    }
    Ok(r)
}

/// Whether every order strictly above `threshold` has recurrence flops below
/// direct flops.
pub fn separated_above(report: &ExperimentReport, threshold: usize) -> bool {
    report.rows.iter().all(|row| {
        let p: usize = row[0].parse().unwrap_or(0);
        let a: f64 = row[1].parse().unwrap_or(f64::NAN);
        let b: f64 = row[2].parse().unwrap_or(f64::NAN);
        p <= threshold || a < b
    })
}
