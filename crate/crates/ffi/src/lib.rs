//! C ABI over the greenrec engine.
//!
//! Objects are opaque handles created by `*_new`/`gr_derive` and released by
//! the matching `*_free`. Every fallible call returns a [`GrStatus`]; the
//! message of the most recent failure on the calling thread is available from
//! [`gr_last_error_message`]. Strings returned by the library are freed with
//! [`gr_string_free`]. Panics never cross the boundary.

use greenrec::error::Error;
use greenrec::evaluator::{derive, Derived, Evaluator, HybridConfig, PrecisionMode};
use greenrec::kernels::{KernelId, KernelSpec};
use greenrec::pde2ode::PdeSpec;
use greenrec::recurrence::artifact::{save_large, save_ode, save_small};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Malformed input text or invalid configuration.
    InvalidArgument = 2,
    /// Point outside the kernel's domain.
    Domain = 3,
    /// The request is not supported for this kernel or operator.
    Capability = 4,
    /// A numerical step failed (singular or degenerate recurrence).
    Numerical = 5,
    /// Output buffer too small.
    BufferTooSmall = 6,
    /// Internal error or caught panic.
    Internal = 7,
}

/// Evaluation arithmetic.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrPrecision {
    Double = 0,
    Extended = 1,
}

/// Branch that produced a derivative sequence.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrBranch {
    Large = 0,
    Small = 1,
}

/// Opaque derivative evaluator bound to one kernel.
pub struct GrEvaluator {
    inner: Evaluator,
    dimension: usize,
}

/// Opaque set of derived artifacts: ODE, large and small recurrences.
pub struct GrDerived {
    inner: Derived,
}

/// Hybrid evaluation settings. Obtain defaults from [`gr_hybrid_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct GrHybridConfig {
    /// Switch to the small branch when `x̄ / |x1|` exceeds this value.
    pub xi: f64,
    /// Truncation order of the small-branch Taylor expansion.
    pub p_small: usize,
    pub precision: GrPrecision,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GrStatus {
    match e {
        Error::Parse { .. } | Error::Config(_) | Error::Geometry(_) | Error::Io(_) => GrStatus::InvalidArgument,
        Error::Domain(_) => GrStatus::Domain,
        Error::Capability(_) => GrStatus::Capability,
        Error::SingularStep { .. } | Error::DegenerateRecurrence(_) | Error::Division(_) | Error::ReferenceNotConverged { .. } => GrStatus::Numerical,
        _ => GrStatus::Internal,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), (GrStatus, String)>) -> GrStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GrStatus::Ok,
        Ok(Err((s, m))) => {
            set_error(&m);
            s
        }
        Err(_) => {
            set_error("panic inside greenrec");
            GrStatus::Internal
        }
    }
}

fn lib<T>(r: greenrec::error::Result<T>) -> Result<T, (GrStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GrStatus, String) {
    (GrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (GrStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (GrStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

/// Copy of the last error message on this thread, or an empty string.
/// Writes at most `len` bytes including the terminating NUL and returns the
/// full message length (excluding NUL). `buf` may be null to query the length.
#[no_mangle]
pub unsafe extern "C" fn gr_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Default hybrid settings.
#[no_mangle]
pub extern "C" fn gr_hybrid_default() -> GrHybridConfig {
    let d = HybridConfig::default();
    GrHybridConfig { xi: d.xi, p_small: d.p_small, precision: GrPrecision::Double }
}

/// Create an evaluator for a builtin kernel by name. `k` is used only when
/// `has_k` is nonzero.
#[no_mangle]
pub unsafe extern "C" fn gr_evaluator_new(kernel: *const c_char, k: f64, has_k: i32, out: *mut *mut GrEvaluator) -> GrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let name = c_str(kernel, "kernel")?;
        let id = lib(KernelId::from_name(name))?;
        let spec = lib(KernelSpec::builtin(id, (has_k != 0).then_some(k)))?;
        let inner = lib(Evaluator::new(&spec))?;
        *out = Box::into_raw(Box::new(GrEvaluator { inner, dimension: spec.dimension }));
        Ok(())
    })
}

/// Release an evaluator. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gr_evaluator_free(ev: *mut GrEvaluator) {
    if !ev.is_null() {
        drop(Box::from_raw(ev));
    }
}

/// Spatial dimension of the evaluator's kernel, 0 for null.
#[no_mangle]
pub unsafe extern "C" fn gr_evaluator_dimension(ev: *const GrEvaluator) -> usize {
    ev.as_ref().map_or(0, |e| e.dimension)
}

/// Derivatives `∂^j_{x1} G(x)` for `j = 0..=p` into `out_re`/`out_im`, each
/// of length `out_len ≥ p + 1`. `x` holds `dim` coordinates. `cfg` may be
/// null for defaults; `branch` may be null.
#[no_mangle]
pub unsafe extern "C" fn gr_evaluate(
    ev: *const GrEvaluator,
    x: *const f64,
    dim: usize,
    p: usize,
    cfg: *const GrHybridConfig,
    out_re: *mut f64,
    out_im: *mut f64,
    out_len: usize,
    branch: *mut GrBranch,
) -> GrStatus {
    guard(|| {
        let ev = ev.as_ref().ok_or_else(|| null("evaluator"))?;
        if x.is_null() {
            return Err(null("x"));
        }
        if out_re.is_null() || out_im.is_null() {
            return Err(null("output buffer"));
        }
        if dim != ev.dimension {
            return Err((GrStatus::InvalidArgument, format!("point has {dim} coordinates, kernel dimension is {}", ev.dimension)));
        }
        if out_len < p + 1 {
            return Err((GrStatus::BufferTooSmall, format!("need {} output slots, got {out_len}", p + 1)));
        }
        let c = cfg.as_ref().copied().unwrap_or_else(|| gr_hybrid_default());
        let hc = HybridConfig {
            xi: c.xi,
            p_small: c.p_small,
            p,
            precision: match c.precision {
                GrPrecision::Double => PrecisionMode::Double,
                GrPrecision::Extended => PrecisionMode::Extended,
            },
        };
        let xs = std::slice::from_raw_parts(x, dim);
        let seq = lib(ev.inner.eval_hybrid(xs, &hc))?;
        for (i, v) in seq.values.iter().take(p + 1).enumerate() {
            *out_re.add(i) = v.re;
            *out_im.add(i) = v.im;
        }
        if let Some(b) = branch.as_mut() {
            *b = match seq.branch {
                greenrec::evaluator::Branch::Large => GrBranch::Large,
                greenrec::evaluator::Branch::Small => GrBranch::Small,
            };
        }
        Ok(())
    })
}

/// Derive the ODE and both recurrences from a PDE spec document.
#[no_mangle]
pub unsafe extern "C" fn gr_derive(spec_document: *const c_char, out: *mut *mut GrDerived) -> GrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let text = c_str(spec_document, "spec document")?;
        let pde = lib(PdeSpec::parse(text))?;
        let inner = lib(derive(&pde))?;
        *out = Box::into_raw(Box::new(GrDerived { inner }));
        Ok(())
    })
}

/// Release derived artifacts. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gr_derived_free(d: *mut GrDerived) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Shift range of the large recurrence. Either output may be null.
#[no_mangle]
pub unsafe extern "C" fn gr_derived_shifts(d: *const GrDerived, min_shift: *mut i32, max_shift: *mut i32) -> GrStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("derived"))?;
        if let Some(m) = min_shift.as_mut() {
            *m = d.inner.large.min_shift;
        }
        if let Some(m) = max_shift.as_mut() {
            *m = d.inner.large.max_shift;
        }
        Ok(())
    })
}

/// Which artifact to serialize.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrArtifact {
    Ode = 0,
    Large = 1,
    Small = 2,
}

/// Serialize one artifact to its text form. The returned string is owned by
/// the caller and released with [`gr_string_free`].
#[no_mangle]
pub unsafe extern "C" fn gr_derived_artifact(d: *const GrDerived, which: GrArtifact, out: *mut *mut c_char) -> GrStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let d = d.as_ref().ok_or_else(|| null("derived"))?;
        let text = match which {
            GrArtifact::Ode => save_ode(&d.inner.ode),
            GrArtifact::Large => save_large(&d.inner.large),
            GrArtifact::Small => save_small(&d.inner.small),
        };
        let c = CString::new(text).map_err(|_| (GrStatus::Internal, "artifact contains NUL".to_string()))?;
        *out = c.into_raw();
        Ok(())
    })
}

/// Release a string returned by the library. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn gr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
