use greenrec::cli::{self, EXIT_CERTIFICATION, EXIT_OK, EXIT_USAGE};
use greenrec::kernels::{builtin_pde_of, KernelId};
use greenrec::recurrence::artifact::load_large;
use greenrec::symcore::{parse_poly, Poly, VarPolicy};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

fn cache() -> &'static Path {
    static DIR: OnceLock<PathBuf> = OnceLock::new();
    DIR.get_or_init(|| {
        let d = tempfile::tempdir().unwrap().keep();
        std::env::set_var(cli::CACHE_ENV, &d);
        d
    })
}

fn run(args: &[&str]) -> (i32, String, String) {
    cache();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cli::run(std::iter::once("greenrec").chain(args.iter().copied()), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn summary(stdout: &str, key: &str) -> f64 {
    stdout.lines().find_map(|l| l.strip_prefix(&format!("{key} = "))).unwrap_or_else(|| panic!("no {key} in {stdout}")).parse().unwrap()
}

#[test]
fn derive_laplace_matches_expected_recurrence() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["derive", "--kernel", "laplace2d", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("recurrence order = 3"));
    assert!(out.contains("a + h bound = 5"));
    let rec = load_large(&std::fs::read_to_string(dir.path().join("large.toml")).unwrap()).unwrap();
    let p = |s: &str| parse_poly(s, 2, VarPolicy::ALL).unwrap();
    let expect: BTreeMap<i32, Poly> = BTreeMap::from([
        (2, p("x1^3 + x1*x2^2")),
        (1, p("(3*n + 1)*x1^2 + (n - 1)*x2^2")),
        (0, p("(3*n^2 - n)*x1")),
        (-1, p("n*(n - 1)^2")),
    ]);
    let top = &rec.coefficients[&2];
    assert!(rec.coefficients.keys().eq(expect.keys()));
    for (s, c) in &rec.coefficients {
        assert_eq!(c.mul(&expect[&2]), expect[s].mul(top), "shift {s}");
    }
    for f in ["ode.toml", "small.toml"] {
        assert!(dir.path().join(f).exists());
    }
}

#[test]
fn derive_from_spec_file_and_errors() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("pde.toml");
    std::fs::write(&spec, builtin_pde_of(KernelId::Helmholtz2d).unwrap().to_document()).unwrap();
    let out_dir = dir.path().join("art");
    let (code, _, _) = run(&["derive", "--spec", spec.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = run(&["verify", "--kernel", "helmholtz2d", "--artifacts", out_dir.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("verify: PASS"));

    let (code, _, err) = run(&["derive", "--spec", "/nonexistent/pde.toml", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("error"));
    std::fs::write(&spec, "dimension = 2\norder = two\n").unwrap();
    assert_eq!(run(&["derive", "--spec", spec.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]).0, EXIT_USAGE);
}

#[test]
fn eval_check_column() {
    let (code, out, _) = run(&["eval", "--kernel", "laplace2d", "--point", "3,4", "--p", "9", "--check", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 10);
    for r in &rows {
        assert_eq!(r[1], "large");
        assert!(r[4].parse::<f64>().unwrap() <= 1e-10, "{r:?}");
    }
    assert!(out.starts_with("order,branch,re,im,rel_error\n"));
}

#[test]
fn eval_parity_on_axis() {
    let (code, out, _) = run(&["eval", "--kernel", "laplace2d", "--point", "0,1", "--p", "5", "--format", "csv"]);
    assert_eq!(code, EXIT_OK);
    for r in data_rows(&out) {
        let order: usize = r[0].parse().unwrap();
        assert_eq!(r[1], "small");
        if order % 2 == 1 {
            assert_eq!((r[2].parse::<f64>().unwrap(), r[3].parse::<f64>().unwrap()), (0.0, 0.0));
        }
    }
}

#[test]
fn eval_full_precision_output() {
    let (_, out, _) = run(&["eval", "--kernel", "laplace2d", "--point", "3,4", "--p", "2", "--format", "csv"]);
    let v: f64 = data_rows(&out)[0][2].parse().unwrap();
    assert_eq!(v, -(5f64.ln()) / (2.0 * std::f64::consts::PI));
    let (_, out, _) = run(&["eval", "--kernel", "laplace2d", "--point", "-3,4", "--p", "2"]);
    assert!(out.contains("branch large"));
}

#[test]
fn eval_validation() {
    assert_eq!(run(&["eval", "--kernel", "helmholtz2d", "--point", "1,1"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "--kernel", "helmholtz2d", "--k", "1", "--point", "1,1"]).0, EXIT_OK);
    assert_eq!(run(&["eval", "--kernel", "laplace2d", "--point", "0,0"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "--kernel", "laplace2d", "--point", "1,2,3"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "--kernel", "nope", "--point", "1,2"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "--kernel", "laplace2d", "--point", "1,2", "--bogus"]).0, EXIT_USAGE);
    assert_eq!(run(&["eval", "--kernel", "laplace2d", "--point", "1,2", "--xi", "0.5"]).0, EXIT_USAGE);
    assert_eq!(run(&["--jobs", "0", "eval", "--kernel", "laplace2d", "--point", "1,2"]).0, EXIT_USAGE);
}

#[test]
fn help_lists_flags() {
    let (code, out, _) = run(&["eval", "--help"]);
    assert_eq!(code, EXIT_OK);
    for f in ["--kernel", "--k", "--point", "--p", "--xi", "--p-small", "--precision", "--check", "--format"] {
        assert!(out.contains(f), "{f} missing");
    }
    let (code, out, _) = run(&["qbx", "--help"]);
    assert_eq!(code, EXIT_OK);
    for f in ["--ellipse", "--density", "--N", "--backend", "--radius-factor", "--flops", "--p-range", "--out"] {
        assert!(out.contains(f), "{f} missing");
    }
    assert_eq!(run(&["frobnicate"]).0, EXIT_USAGE);
}

#[test]
fn eval_uses_content_addressed_cache() {
    let (code, _, _) = run(&["eval", "--kernel", "yukawa2d", "--k", "2", "--point", "1,1"]);
    assert_eq!(code, EXIT_OK);
    let pde = builtin_pde_of(KernelId::Yukawa2d).unwrap();
    let d = cache().join(cli::spec_hash(&pde));
    for f in ["ode.toml", "large.toml", "small.toml"] {
        assert!(d.join(f).exists(), "{f}");
    }
}

#[test]
fn verify_all_builtins() {
    for id in KernelId::BUILTIN {
        let (code, out, _) = run(&["verify", "--kernel", id.name(), "--points", "8"]);
        assert_eq!(code, EXIT_OK, "{}: {out}", id.name());
        assert!(out.contains("verify: PASS"));
    }
}

#[test]
fn verify_detects_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(run(&["derive", "--kernel", "laplace2d", "--out", d]).0, EXIT_OK);
    let path = dir.path().join("large.toml");
    let text = std::fs::read_to_string(&path).unwrap();
    let tampered = text.replacen("3*x1*n^2", "5*x1*n^2", 1);
    assert_ne!(text, tampered);
    std::fs::write(&path, tampered).unwrap();
    let (code, out, _) = run(&["verify", "--kernel", "laplace2d", "--artifacts", d]);
    assert_eq!(code, EXIT_CERTIFICATION, "{out}");
    assert!(out.contains("FAIL"));
}

#[test]
fn verify_custom_kernel_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("pde.toml");
    let doc = "dimension = 2\norder = 2\n\n[[terms]]\nmulti_index = [2, 0]\ncoefficient = \"1\"\n\n[[terms]]\nmulti_index = [0, 2]\ncoefficient = \"2\"\n";
    std::fs::write(&spec, doc).unwrap();
    let (code, out, err) = run(&["verify", "--spec", spec.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("SKIPPED"));
    assert!(err.contains("warning"));
}

#[test]
fn qbx_both_backends_agree() {
    let (code, out, _) = run(&["qbx", "--ellipse", "2,1", "--density", "cos10t", "--p", "5", "--N", "400", "--backend", "both"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.lines().any(|l| l == "N,p_qbx,backend,target_index,value_re,value_im,reference,error_vs_reference,backend_agreement,flops"));
    let rows = data_rows(&out);
    assert_eq!(rows.len(), 100);
    for r in &rows {
        assert!(r[8].parse::<f64>().unwrap() <= 1e-8);
        assert!(r[7].parse::<f64>().unwrap() <= 1e-4);
        assert!(r[9].parse::<u64>().unwrap() > 0);
    }
}

#[test]
fn qbx_flops_and_validation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flops.csv");
    let (code, _, _) = run(&["qbx", "--flops", "--kernel", "helmholtz2d", "--k", "1", "--p-range", "1..12", "--out", path.to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let csv = std::fs::read_to_string(&path).unwrap();
    let get = |k: &str| -> f64 { csv.lines().find_map(|l| l.strip_prefix(&format!("# summary {k}: "))).unwrap().parse().unwrap() };
    assert!(get("direct_exponent") > get("recurrence_exponent") + 0.5);
    assert_eq!(data_rows(&csv).len(), 12);

    assert_eq!(run(&["qbx", "--p", "-1"]).0, EXIT_USAGE);
    assert_eq!(run(&["qbx", "--ellipse", "2"]).0, EXIT_USAGE);
    assert_eq!(run(&["qbx", "--density", "sin3t"]).0, EXIT_USAGE);
    assert_eq!(run(&["qbx", "--N", "4"]).0, EXIT_USAGE);
    assert_eq!(run(&["qbx", "--reference-oversample", "2", "--N", "64"]).0, EXIT_USAGE);
}

#[test]
fn qbx_reference_failure_is_certification_error() {
    let (code, _, err) = run(&["qbx", "--N", "8", "--density", "cos30t", "--targets", "2"]);
    assert_eq!(code, EXIT_CERTIFICATION, "{err}");
}

#[test]
fn experiment_slope_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let (code, out, _) = run(&["experiment", "slope", "--kernel", "laplace2d", "--n", "9", "--seed", "7", "--out-dir", a.path().to_str().unwrap()]);
    assert_eq!(code, EXIT_OK);
    let s = summary(&out, "slope");
    assert!((-2.3..=-1.7).contains(&s), "slope {s}");
    run(&["experiment", "slope", "--kernel", "laplace2d", "--n", "9", "--seed", "7", "--out-dir", b.path().to_str().unwrap()]);
    let fa = std::fs::read(a.path().join("slope.csv")).unwrap();
    let fb = std::fs::read(b.path().join("slope.csv")).unwrap();
    assert_eq!(fa, fb);
}

#[test]
fn experiment_assumptions_and_heatmap() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, out, _) = run(&["experiment", "assumptions", "--kernel", "laplace2d", "--res", "16", "--out-dir", d]);
    assert_eq!(code, EXIT_OK);
    assert!(summary(&out, "odd_ratio_min") >= 1.0 && summary(&out, "odd_ratio_max") <= 100.0);
    let (code, out, _) = run(&["experiment", "assumptions", "--kernel", "biharmonic2d", "--res", "16", "--out-dir", d]);
    assert_eq!(code, EXIT_OK);
    assert!(summary(&out, "odd_ratio_max").is_finite());
    let (code, out, _) = run(&["experiment", "heatmap", "--res", "16", "--out-dir", d]);
    assert_eq!(code, EXIT_OK);
    assert!(summary(&out, "max_rel_error") <= 1e-6);
    assert!(dir.path().join("heatmap.csv").exists());
}

#[test]
fn experiment_validation() {
    assert_eq!(run(&["experiment", "nonsense"]).0, EXIT_USAGE);
    assert_eq!(run(&["experiment", "heatmap", "--res", "0"]).0, EXIT_USAGE);
    assert_eq!(run(&["experiment", "assumptions", "--c", "4", "--res", "16"]).0, EXIT_USAGE);
    assert_eq!(run(&["experiment", "flops", "--p-range", "5"]).0, EXIT_USAGE);
}
