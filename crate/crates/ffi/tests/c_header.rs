//! Compiles and runs a small C program against the generated header and the
//! static library. Skipped when no C compiler is on the path.

use std::path::PathBuf;
use std::process::Command;

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include "greenrec.h"

int main(void) {
    GrEvaluator *ev = NULL;
    if (gr_evaluator_new("laplace2d", 0.0, 0, &ev) != GrStatus_Ok) return 10;
    double x[2] = {3.0, 4.0}, re[3], im[3];
    GrBranch br;
    if (gr_evaluate(ev, x, 2, 2, NULL, re, im, 3, &br) != GrStatus_Ok) return 11;
    gr_evaluator_free(ev);
    if (fabs(re[0] + log(5.0) / (2.0 * 3.14159265358979323846)) > 1e-14) return 12;
    if (gr_evaluator_new("nope", 0.0, 0, &ev) != GrStatus_InvalidArgument) return 13;
    char msg[256];
    gr_last_error_message(msg, sizeof msg);
    printf("ok %s\n", msg);
    return 0;
}
"#;

#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler; skipped");
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let include = manifest.join("include");
    // test binary lives in target/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap().to_path_buf();
    let lib = profile_dir.join("libgreenrec_ffi.a");
    if !lib.exists() {
        eprintln!("static library not found at {}; skipped", lib.display());
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let out = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&bin)
        .output()
        .unwrap();
    assert!(out.status.success(), "compile failed: {}", String::from_utf8_lossy(&out.stderr));
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
