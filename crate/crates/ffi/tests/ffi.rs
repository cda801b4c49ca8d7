use greenrec_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

fn last_error() -> String {
    let mut buf = vec![0 as std::ffi::c_char; 512];
    unsafe {
        gr_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

fn evaluator(name: &str, k: Option<f64>) -> Result<*mut GrEvaluator, GrStatus> {
    let name = CString::new(name).unwrap();
    let mut ev = ptr::null_mut();
    let s = unsafe { gr_evaluator_new(name.as_ptr(), k.unwrap_or(0.0), k.is_some() as i32, &mut ev) };
    if s == GrStatus::Ok {
        Ok(ev)
    } else {
        assert!(ev.is_null());
        Err(s)
    }
}

#[test]
fn laplace_derivatives_match_closed_form() {
    let ev = evaluator("laplace2d", None).unwrap();
    assert_eq!(unsafe { gr_evaluator_dimension(ev) }, 2);
    let x = [3.0, 4.0];
    let (mut re, mut im) = ([0.0; 4], [0.0; 4]);
    let mut br = GrBranch::Small;
    let s = unsafe { gr_evaluate(ev, x.as_ptr(), 2, 3, ptr::null(), re.as_mut_ptr(), im.as_mut_ptr(), 4, &mut br) };
    assert_eq!(s, GrStatus::Ok);
    assert_eq!(br, GrBranch::Large);
    // G = -ln r / 2π, ∂1 G = -x1 / (2π r²)
    let two_pi = 2.0 * std::f64::consts::PI;
    assert!((re[0] + 5f64.ln() / two_pi).abs() < 1e-15);
    assert!((re[1] + 3.0 / (two_pi * 25.0)).abs() < 1e-15);
    assert!(im.iter().all(|v| *v == 0.0));
    unsafe { gr_evaluator_free(ev) };
}

#[test]
fn errors_map_to_status_codes() {
    assert_eq!(evaluator("nosuchkernel", None).unwrap_err(), GrStatus::InvalidArgument);
    assert!(last_error().contains("nosuchkernel"));
    let mut ev = ptr::null_mut();
    assert_eq!(unsafe { gr_evaluator_new(ptr::null(), 0.0, 0, &mut ev) }, GrStatus::NullPointer);

    let ev = evaluator("laplace2d", None).unwrap();
    let (mut re, mut im) = ([0.0; 2], [0.0; 2]);
    let origin = [0.0, 0.0];
    let s = unsafe { gr_evaluate(ev, origin.as_ptr(), 2, 1, ptr::null(), re.as_mut_ptr(), im.as_mut_ptr(), 2, ptr::null_mut()) };
    assert_eq!(s, GrStatus::Domain);
    let x = [1.0, 1.0];
    let s = unsafe { gr_evaluate(ev, x.as_ptr(), 2, 5, ptr::null(), re.as_mut_ptr(), im.as_mut_ptr(), 2, ptr::null_mut()) };
    assert_eq!(s, GrStatus::BufferTooSmall);
    let s = unsafe { gr_evaluate(ev, x.as_ptr(), 3, 1, ptr::null(), re.as_mut_ptr(), im.as_mut_ptr(), 2, ptr::null_mut()) };
    assert_eq!(s, GrStatus::InvalidArgument);
    let s = unsafe { gr_evaluate(ptr::null(), x.as_ptr(), 2, 1, ptr::null(), re.as_mut_ptr(), im.as_mut_ptr(), 2, ptr::null_mut()) };
    assert_eq!(s, GrStatus::NullPointer);
    unsafe { gr_evaluator_free(ev) };
    unsafe { gr_evaluator_free(ptr::null_mut()) };
}

#[test]
fn helmholtz_small_branch_near_axis() {
    let ev = evaluator("helmholtz2d", Some(1.0)).unwrap();
    let x = [1e-4, 1.0];
    let (mut re, mut im) = ([0.0; 7], [0.0; 7]);
    let mut br = GrBranch::Large;
    let mut cfg = gr_hybrid_default();
    cfg.precision = GrPrecision::Extended;
    let s = unsafe { gr_evaluate(ev, x.as_ptr(), 2, 6, &cfg, re.as_mut_ptr(), im.as_mut_ptr(), 7, &mut br) };
    assert_eq!(s, GrStatus::Ok, "{}", last_error());
    assert_eq!(br, GrBranch::Small);
    // G = (i/4) H0(kr): Re G = -Y0(r)/4, Y0(1) = 0.088256964215676957...
    assert!((re[0] + 0.088_256_964_215_676_96 / 4.0).abs() < 1e-9);
    unsafe { gr_evaluator_free(ev) };
}

#[test]
fn derive_from_document_and_serialize() {
    let doc = CString::new(greenrec::kernels::builtin_pde_of(greenrec::kernels::KernelId::Laplace2d).unwrap().to_document()).unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { gr_derive(doc.as_ptr(), &mut d) }, GrStatus::Ok);
    let (mut lo, mut hi) = (0, 0);
    assert_eq!(unsafe { gr_derived_shifts(d, &mut lo, &mut hi) }, GrStatus::Ok);
    assert_eq!((lo, hi), (-1, 2));
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { gr_derived_artifact(d, GrArtifact::Large, &mut s) }, GrStatus::Ok);
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    assert!(text.contains("large-recurrence"));
    unsafe {
        gr_string_free(s);
        gr_derived_free(d);
    }

    let bad = CString::new("dimension = 2\norder = oops\n").unwrap();
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { gr_derive(bad.as_ptr(), &mut d) }, GrStatus::InvalidArgument);
    assert!(d.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn error_message_length_query() {
    let _ = evaluator("bogus", None);
    let n = unsafe { gr_last_error_message(ptr::null_mut(), 0) };
    assert_eq!(n, last_error().len());
    let mut tiny = [1 as std::ffi::c_char; 4];
    unsafe { gr_last_error_message(tiny.as_mut_ptr(), 4) };
    assert_eq!(tiny[3], 0);
}
