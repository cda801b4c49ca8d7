//! Command-line front end. [`run`] parses arguments, dispatches and returns the
//! process exit code: 0 success, 2 usage or validation error, 3 numerical
//! certification failure, 1 internal error.

use crate::error::{Error, Result};
use crate::evaluator::{derive, Derived, Evaluator, HybridConfig, PrecisionMode};
use crate::experiments::{self, fmt_f64, AssumptionConfig, GridSpec, HeatmapMode, QbxTableConfig};
use crate::kernels::{builtin_pde_of, KernelId, KernelSpec};
use crate::pde2ode::PdeSpec;
use crate::qbx::{self, Backend, Ellipse, QbxConfig};
use crate::recurrence::artifact::{load_large, load_ode, load_small, save_large, save_ode, save_small};
use crate::verify;
use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Environment variable overriding the artifact cache directory.
pub const CACHE_ENV: &str = "GREENREC_CACHE_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CERTIFICATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "greenrec", version, about = "Derivative recurrences for radially symmetric Green's functions")]
struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Derive the ODE and both recurrences and write them as artifacts.
    Derive(DeriveArgs),
    /// Evaluate the x1-derivatives of a kernel at a point.
    Eval(EvalArgs),
    /// Check ODE and recurrence residuals against the oracle.
    Verify(VerifyArgs),
    /// Single-layer QBX on an ellipse, or the flop comparison.
    Qbx(QbxArgs),
    /// Run one of the numerical studies and write its CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args, Debug)]
struct KernelSel {
    /// Builtin kernel name.
    #[arg(long)]
    kernel: Option<String>,
    /// PDE spec document (TOML) for a custom operator.
    #[arg(long, conflicts_with = "kernel")]
    spec: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DeriveArgs {
    #[command(flatten)]
    sel: KernelSel,
    /// Output directory for ode.toml, large.toml and small.toml.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Precision {
    Double,
    Extended,
}

impl From<Precision> for PrecisionMode {
    fn from(p: Precision) -> Self {
        match p {
            Precision::Double => PrecisionMode::Double,
            Precision::Extended => PrecisionMode::Extended,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// Builtin kernel name.
    #[arg(long)]
    kernel: String,
    /// Wave number or screening parameter (Helmholtz and Yukawa kernels).
    #[arg(long)]
    k: Option<f64>,
    /// Comma-separated coordinates.
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    /// Highest derivative order.
    #[arg(long = "p", default_value_t = 9)]
    p: usize,
    #[arg(long, default_value_t = 50.0)]
    xi: f64,
    #[arg(long = "p-small", default_value_t = 8)]
    p_small: usize,
    #[arg(long, value_enum, default_value_t = Precision::Double)]
    precision: Precision,
    /// Add the oracle relative error of each entry.
    #[arg(long)]
    check: bool,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    sel: KernelSel,
    /// Wave number for the numeric check (default 1).
    #[arg(long)]
    k: Option<f64>,
    /// Directory with ode.toml, large.toml, small.toml to check instead of a
    /// fresh derivation.
    #[arg(long)]
    artifacts: Option<PathBuf>,
    /// Random points per check.
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum BackendSel {
    Recurrence,
    Direct,
    Both,
}

#[derive(Args, Debug)]
struct QbxArgs {
    /// Semi-axes `a,b` of the ellipse (a cos t, b sin t).
    #[arg(long, default_value = "2,1")]
    ellipse: String,
    /// Density: `const` or `cos<m>t`, e.g. `cos10t`.
    #[arg(long, default_value = "cos10t")]
    density: String,
    #[arg(long = "p", default_value_t = 5)]
    p: usize,
    #[arg(long = "N", default_value_t = 400)]
    n: usize,
    #[arg(long, value_enum, default_value_t = BackendSel::Recurrence)]
    backend: BackendSel,
    #[arg(long, default_value = "laplace2d")]
    kernel: String,
    #[arg(long)]
    k: Option<f64>,
    /// Number of equispaced target nodes.
    #[arg(long, default_value_t = 50)]
    targets: usize,
    #[arg(long = "radius-factor", default_value_t = 2.5)]
    radius_factor: f64,
    /// Source grid refinement relative to the target grid.
    #[arg(long, default_value_t = 4)]
    oversample: usize,
    /// Refinement of the reference quadrature (laplace2d only).
    #[arg(long = "reference-oversample", default_value_t = 4)]
    reference_oversample: usize,
    #[arg(long, default_value_t = 50.0)]
    xi: f64,
    #[arg(long = "p-small", default_value_t = 8)]
    p_small: usize,
    /// Run the flop comparison instead of a potential evaluation.
    #[arg(long)]
    flops: bool,
    /// Order range `lo..hi` for `--flops`.
    #[arg(long = "p-range", default_value = "1..12")]
    p_range: String,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExperimentId {
    Heatmap,
    Slope,
    Assumptions,
    QbxTable,
    Flops,
}

impl ExperimentId {
    fn file_stem(self) -> &'static str {
        match self {
            ExperimentId::Heatmap => "heatmap",
            ExperimentId::Slope => "slope",
            ExperimentId::Assumptions => "assumptions",
            ExperimentId::QbxTable => "qbx-table",
            ExperimentId::Flops => "flops",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeSel {
    Large,
    Small,
    Hybrid,
}

#[derive(Args, Debug)]
struct ExperimentArgs {
    #[arg(value_enum)]
    id: ExperimentId,
    #[arg(long, default_value = "laplace2d")]
    kernel: String,
    /// Wave number (default 1 for kernels that need one).
    #[arg(long)]
    k: Option<f64>,
    /// Derivative order (heatmap, slope).
    #[arg(long = "n", default_value_t = 9)]
    n: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Output directory; the CSV is `<id>.csv`.
    #[arg(long = "out-dir", default_value = ".")]
    out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeSel::Hybrid)]
    mode: ModeSel,
    #[arg(long, default_value_t = 50.0)]
    xi: f64,
    #[arg(long = "p-small", default_value_t = 8)]
    p_small: usize,
    #[arg(long, value_enum, default_value_t = Precision::Double)]
    precision: Precision,
    /// Cells per grid axis.
    #[arg(long, default_value_t = 64)]
    res: usize,
    /// Samples per ratio (slope) or of ξ ∈ [0, x1] (assumptions).
    #[arg(long)]
    samples: Option<usize>,
    /// Odd order for the assumptions study.
    #[arg(long = "c", default_value_t = 5)]
    c: usize,
    /// Even order for the assumptions study.
    #[arg(long = "d", default_value_t = 6)]
    d: usize,
    /// Order range `lo..hi` (flops).
    #[arg(long = "p-range", default_value = "2..12")]
    p_range: String,
    /// Comma-separated N values (qbx-table).
    #[arg(long = "N-list", default_value = "200,400,800,1600")]
    n_list: String,
    /// Comma-separated QBX orders (qbx-table).
    #[arg(long = "p-list", default_value = "3,5,7,9,11")]
    p_list: String,
}

/// Run the CLI on `args` (program name first), writing normal output to
/// `out` and diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        if j == 0 {
            let _ = writeln!(err, "error: --jobs must be at least 1");
            return EXIT_USAGE;
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
    let res = match cli.cmd {
        Cmd::Derive(a) => cmd_derive(&a, out),
        Cmd::Eval(a) => cmd_eval(&a, out),
        Cmd::Verify(a) => cmd_verify(&a, out, err),
        Cmd::Qbx(a) => cmd_qbx(&a, out),
        Cmd::Experiment(a) => cmd_experiment(&a, out),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Config(_) | Error::Domain(_) | Error::Io(_) | Error::Capability(_) | Error::Geometry(_) => EXIT_USAGE,
        Error::ReferenceNotConverged { .. } => EXIT_CERTIFICATION,
        _ => EXIT_INTERNAL,
    }
}

fn read_file(p: &Path) -> Result<String> {
    std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write_file(p: &Path, text: &str) -> Result<()> {
    std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn selected_pde(sel: &KernelSel) -> Result<(PdeSpec, Option<KernelId>)> {
    match (&sel.kernel, &sel.spec) {
        (Some(name), None) => {
            let id = KernelId::from_name(name)?;
            Ok((builtin_pde_of(id)?, Some(id)))
        }
        (None, Some(path)) => Ok((PdeSpec::parse(&read_file(path)?)?, None)),
        _ => Err(Error::Config("give exactly one of --kernel and --spec".into())),
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(|t| t.trim().parse::<T>().map_err(|_| Error::Config(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn parse_range(s: &str) -> Result<std::ops::RangeInclusive<usize>> {
    let (a, b) = s.split_once("..").ok_or_else(|| Error::Config(format!("range {s:?} must look like lo..hi")))?;
    let lo: usize = a.trim().parse().map_err(|_| Error::Config(format!("bad range start {a:?}")))?;
    let hi: usize = b.trim().trim_start_matches('=').parse().map_err(|_| Error::Config(format!("bad range end {b:?}")))?;
    if lo > hi {
        return Err(Error::Config(format!("empty range {s:?}")));
    }
    Ok(lo..=hi)
}

fn kernel_with_default_k(name: &str, k: Option<f64>) -> Result<KernelSpec> {
    let id = KernelId::from_name(name)?;
    KernelSpec::builtin(id, if id.needs_k() { Some(k.unwrap_or(1.0)) } else { k })
}

/// Cache directory: `$GREENREC_CACHE_DIR`, else `$XDG_CACHE_HOME/greenrec`,
/// else `$HOME/.cache/greenrec`, else a directory under the system temp dir.
pub fn cache_dir() -> PathBuf {
    if let Some(d) = std::env::var_os(CACHE_ENV) {
        return PathBuf::from(d);
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return PathBuf::from(d).join("greenrec");
    }
    if let Some(d) = std::env::var_os("HOME") {
        return PathBuf::from(d).join(".cache").join("greenrec");
    }
    std::env::temp_dir().join("greenrec-cache")
}

/// SHA-256 of the canonical PDE document.
pub fn spec_hash(pde: &PdeSpec) -> String {
    hex::encode(Sha256::digest(pde.to_document().as_bytes()))
}

fn write_artifacts(dir: &Path, d: &Derived) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    write_file(&dir.join("ode.toml"), &save_ode(&d.ode))?;
    write_file(&dir.join("large.toml"), &save_large(&d.large))?;
    write_file(&dir.join("small.toml"), &save_small(&d.small))?;
    Ok(())
}

fn read_artifacts(dir: &Path) -> Result<Derived> {
    Ok(Derived {
        ode: load_ode(&read_file(&dir.join("ode.toml"))?)?,
        large: load_large(&read_file(&dir.join("large.toml"))?)?,
        small: load_small(&read_file(&dir.join("small.toml"))?)?,
    })
}

/// Artifacts for `pde` from the cache, deriving and storing them on a miss.
/// Cache write failures are not fatal.
pub fn cached_artifacts(pde: &PdeSpec) -> Result<Derived> {
    let dir = cache_dir().join(spec_hash(pde));
    if let Ok(d) = read_artifacts(&dir) {
        return Ok(d);
    }
    let d = derive(pde)?;
    let _ = write_artifacts(&dir, &d);
    Ok(d)
}

fn cmd_derive(a: &DeriveArgs, out: &mut dyn Write) -> Result<i32> {
    let (pde, _) = selected_pde(&a.sel)?;
    let d = derive(&pde)?;
    write_artifacts(&a.out, &d)?;
    let _ = writeln!(out, "ode order a = {}", d.ode.order());
    let _ = writeln!(out, "highest x1 power h = {}", d.ode.highest_x1_power());
    let _ = writeln!(out, "recurrence order = {} (shifts {}..{})", d.large.order(), d.large.min_shift, d.large.max_shift);
    let _ = writeln!(out, "a + h bound = {}", d.ode.order() as u32 + d.ode.highest_x1_power());
    let _ = writeln!(out, "small recurrence order = {}", d.small.order());
    let _ = writeln!(out, "wrote {}", a.out.display());
    Ok(EXIT_OK)
}

fn cmd_eval(a: &EvalArgs, out: &mut dyn Write) -> Result<i32> {
    let id = KernelId::from_name(&a.kernel)?;
    if id.needs_k() && a.k.is_none() {
        return Err(Error::Config(format!("kernel {} needs --k", id.name())));
    }
    let kernel = KernelSpec::builtin(id, a.k)?;
    let x: Vec<f64> = parse_list(&a.point, "point")?;
    if x.len() != kernel.dimension {
        return Err(Error::Config(format!("point has {} coordinates, kernel dimension is {}", x.len(), kernel.dimension)));
    }
    kernel.check_point(&x)?;
    let d = cached_artifacts(&kernel.pde)?;
    let ev = Evaluator::from_artifacts(&kernel, d.large, d.small)?;
    let cfg = HybridConfig { xi: a.xi, p_small: a.p_small, p: a.p, precision: a.precision.into() };
    let seq = ev.eval_hybrid(&x, &cfg)?;
    let oracle = if a.check { Some(kernel.oracle_derivatives(&x, a.p, experiments::ORACLE_DIGITS)?.values) } else { None };
    let mut s = String::new();
    match a.format {
        Format::Csv => {
            let _ = writeln!(s, "order,branch,re,im{}", if a.check { ",rel_error" } else { "" });
        }
        Format::Table => {
            let _ = writeln!(s, "# kernel {} point {:?} branch {}{}", kernel.id.name(), x, seq.branch.name(), if seq.diagnostics.perturbed { " (x1 perturbed by one ulp)" } else { "" });
            let _ = writeln!(s, "{:>5} {:>7} {:>25} {:>25}{}", "order", "branch", "re", "im", if a.check { format!(" {:>25}", "rel_error") } else { String::new() });
        }
    }
    for (i, v) in seq.values.iter().enumerate() {
        let err = oracle.as_ref().map(|o| {
            let d = (v - o[i]).norm();
            if d == 0.0 {
                0.0
            } else {
                d / o[i].norm()
            }
        });
        match a.format {
            Format::Csv => {
                let _ = write!(s, "{i},{},{},{}", seq.branch.name(), fmt_f64(v.re), fmt_f64(v.im));
                if let Some(e) = err {
                    let _ = write!(s, ",{}", fmt_f64(e));
                }
            }
            Format::Table => {
                let _ = write!(s, "{:>5} {:>7} {:>25} {:>25}", i, seq.branch.name(), fmt_f64(v.re), fmt_f64(v.im));
                if let Some(e) = err {
                    let _ = write!(s, " {:>25}", fmt_f64(e));
                }
            }
        }
        s.push('\n');
    }
    let _ = write!(out, "{s}");
    Ok(EXIT_OK)
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let (pde, id) = selected_pde(&a.sel)?;
    let Some(id) = id else {
        let _ = writeln!(err, "warning: no derivative oracle for a custom operator; residual checks skipped");
        let _ = writeln!(out, "verify: SKIPPED (custom kernel without oracle)");
        return Ok(EXIT_OK);
    };
    let kernel = KernelSpec::builtin(id, if id.needs_k() { Some(a.k.unwrap_or(1.0)) } else { a.k })?;
    let d = match &a.artifacts {
        Some(dir) => read_artifacts(dir)?,
        None => derive(&pde)?,
    };
    let dim = kernel.dimension;
    let pts = verify::random_points(dim, a.points, 0.0, a.seed);
    let stable = verify::random_points(dim, a.points.min(10), 1.0, a.seed.wrapping_add(1));
    let xbars: Vec<f64> = verify::random_points(2, a.points.min(10), 0.0, a.seed.wrapping_add(2)).iter().map(|p| p[1].abs().max(0.1)).collect();
    let ns: Vec<i64> = (3..=12).collect();
    let even: Vec<i64> = (0..=14).step_by(2).collect();
    let checks = [
        ("ode residual", verify::verify_ode(&d.ode, &kernel, &pts)?),
        ("large recurrence residual, n = 3..12", verify::large_recurrence_residual(&d.large, &kernel, &stable, &ns)?),
        ("small recurrence residual, even k <= 14", verify::small_recurrence_residual(&d.small, &kernel, &xbars, &even)?),
    ];
    let order_ok = d.large.order() as u32 <= d.ode.order() as u32 + d.ode.highest_x1_power();
    let mut ok = order_ok;
    let _ = writeln!(out, "kernel {}", id.name());
    for (name, v) in &checks {
        let pass = *v <= a.tol;
        ok &= pass;
        let _ = writeln!(out, "{} {name}: {}", if pass { "PASS" } else { "FAIL" }, fmt_f64(*v));
    }
    let _ = writeln!(out, "{} recurrence order {} <= a + h = {}", if order_ok { "PASS" } else { "FAIL" }, d.large.order(), d.ode.order() as u32 + d.ode.highest_x1_power());
    let _ = writeln!(out, "verify: {}", if ok { "PASS" } else { "FAIL" });
    Ok(if ok { EXIT_OK } else { EXIT_CERTIFICATION })
}

fn parse_density(s: &str) -> Result<Box<dyn Fn(f64) -> f64 + Sync>> {
    if s == "const" {
        return Ok(Box::new(|_| 1.0));
    }
    let m = s
        .strip_prefix("cos")
        .and_then(|r| r.strip_suffix('t'))
        .and_then(|m| if m.is_empty() { Some(1.0) } else { m.parse::<f64>().ok() })
        .ok_or_else(|| Error::Config(format!("unknown density {s:?}; use const or cos<m>t")))?;
    Ok(Box::new(move |t: f64| (m * t).cos()))
}

fn cmd_qbx(a: &QbxArgs, out: &mut dyn Write) -> Result<i32> {
    let kernel = kernel_with_default_k(&a.kernel, a.k)?;
    if a.flops {
        let r = experiments::flop_comparison(&kernel, parse_range(&a.p_range)?)?;
        emit(&a.out, &r.to_csv(), out)?;
        return Ok(EXIT_OK);
    }
    let ab: Vec<f64> = parse_list(&a.ellipse, "ellipse")?;
    if ab.len() != 2 {
        return Err(Error::Config("--ellipse takes a,b".into()));
    }
    let ell = Ellipse::new(ab[0], ab[1]);
    ell.discretize(a.n)?;
    let density = parse_density(&a.density)?;
    let targets = experiments::equispaced_targets(a.n, a.targets);
    let base = QbxConfig {
        p_qbx: a.p,
        radius_factor: a.radius_factor,
        backend: Backend::Recurrence,
        hybrid: HybridConfig { xi: a.xi, p_small: a.p_small, p: a.p, precision: PrecisionMode::Double },
        oversample: a.oversample,
    };
    let backends: Vec<Backend> = match a.backend {
        BackendSel::Recurrence => vec![Backend::Recurrence],
        BackendSel::Direct => vec![Backend::Direct],
        BackendSel::Both => vec![Backend::Recurrence, Backend::Direct],
    };
    let reference = if kernel.id == KernelId::Laplace2d {
        Some(qbx::reference::reference_potential(&kernel, &ell, a.n, &*density, &targets, a.reference_oversample)?)
    } else {
        None
    };
    let mut results = Vec::new();
    for &b in &backends {
        let res = qbx::single_layer_qbx(&kernel, &ell, a.n, &*density, &targets, &QbxConfig { backend: b, ..base })?;
        results.push((b, res));
    }
    let ref_scale = reference.as_ref().map(|r| r.iter().map(|v| v.norm()).fold(0.0, f64::max));
    let agreement: Option<Vec<f64>> = if results.len() == 2 {
        let scale = results[1].1.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        Some(results[0].1.values.iter().zip(&results[1].1.values).map(|(x, y)| (x - y).norm() / scale).collect())
    } else {
        None
    };
    let mut s = String::new();
    let _ = writeln!(s, "# kernel: {}", kernel.id.name());
    let _ = writeln!(s, "# ellipse: {},{}", ab[0], ab[1]);
    let _ = writeln!(s, "# density: {}", a.density);
    let _ = writeln!(s, "# radius_factor: {}", fmt_f64(a.radius_factor));
    let _ = writeln!(s, "# source_oversample: {}", a.oversample);
    let _ = writeln!(s, "# flops: per target, real additions plus multiplications");
    let _ = writeln!(s, "# error_vs_reference: |value - reference| / max|reference|");
    let _ = writeln!(s, "# backend_agreement: |recurrence - direct| / max|direct|");
    let _ = writeln!(s, "N,p_qbx,backend,target_index,value_re,value_im,reference,error_vs_reference,backend_agreement,flops");
    for (b, res) in &results {
        for (i, &t) in targets.iter().enumerate() {
            let v = res.values[i];
            let (rv, ev) = match (&reference, ref_scale) {
                (Some(r), Some(sc)) => (fmt_f64(r[i].re), fmt_f64((v - r[i]).norm() / sc)),
                _ => (String::new(), String::new()),
            };
            let ag = agreement.as_ref().map(|g| fmt_f64(g[i])).unwrap_or_default();
            let _ = writeln!(s, "{},{},{},{},{},{},{},{},{},{}", a.n, a.p, b.name(), t, fmt_f64(v.re), fmt_f64(v.im), rv, ev, ag, res.per_target_flops[i]);
        }
    }
    emit(&a.out, &s, out)?;
    Ok(EXIT_OK)
}

fn emit(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => {
            let _ = write!(out, "{text}");
            Ok(())
        }
    }
}

fn cmd_experiment(a: &ExperimentArgs, out: &mut dyn Write) -> Result<i32> {
    let kernel = kernel_with_default_k(&a.kernel, a.k)?;
    let grid = GridSpec { res1: a.res, res2: a.res, ..GridSpec::default() };
    let report = match a.id {
        ExperimentId::Heatmap => {
            let mode = match a.mode {
                ModeSel::Large => HeatmapMode::Large,
                ModeSel::Small => HeatmapMode::Small,
                ModeSel::Hybrid => HeatmapMode::Hybrid,
            };
            let cfg = HybridConfig { xi: a.xi, p_small: a.p_small, p: a.n, precision: a.precision.into() };
            experiments::error_heatmap(&kernel, a.n, &grid, mode, &cfg)?
        }
        ExperimentId::Slope => experiments::slope_report(&kernel, a.n, &experiments::default_slope_ratios(), a.samples.unwrap_or(5), a.seed)?,
        ExperimentId::Assumptions => {
            let cfg = AssumptionConfig { c: a.c, d_even: a.d, samples: a.samples.unwrap_or(64) };
            experiments::assumption_heatmap(&kernel, &grid, &cfg)?
        }
        ExperimentId::QbxTable => {
            let cfg = QbxTableConfig { n_list: parse_list(&a.n_list, "N")?, p_list: parse_list(&a.p_list, "p")?, ..QbxTableConfig::default() };
            experiments::qbx_error_table(&cfg)?
        }
        ExperimentId::Flops => experiments::flop_comparison(&kernel, parse_range(&a.p_range)?)?,
    };
    std::fs::create_dir_all(&a.out_dir).map_err(|e| Error::Io(format!("{}: {e}", a.out_dir.display())))?;
    let path = a.out_dir.join(format!("{}.csv", a.id.file_stem()));
    write_file(&path, &report.to_csv())?;
    for (k, v) in &report.summary {
        let _ = writeln!(out, "{k} = {}", fmt_f64(*v));
    }
    let _ = writeln!(out, "wrote {}", path.display());
    Ok(EXIT_OK)
}
