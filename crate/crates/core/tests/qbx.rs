use greenrec::evaluator::{FlopCounter, HybridConfig};
use greenrec::experiments::{cos10, equispaced_targets, fit_loglog, benchmark_ellipse};
use greenrec::kernels::{KernelId, KernelSpec};
use greenrec::qbx::reference::reference_potential;
use greenrec::qbx::*;
use greenrec::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn laplace() -> KernelSpec {
    KernelSpec::builtin(KernelId::Laplace2d, None).unwrap()
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

fn run(curve: &Ellipse, n: usize, density: &(dyn Fn(f64) -> f64 + Sync), targets: &[usize], p: usize, backend: Backend) -> QbxResult {
    let cfg = QbxConfig { p_qbx: p, backend, ..QbxConfig::default() };
    single_layer_qbx(&laplace(), curve, n, density, targets, &cfg).unwrap()
}

#[test]
fn discretization_examples() {
    let c = discretize_ellipse(1.0, 1.0, 100).unwrap();
    assert!((c.weights.iter().sum::<f64>() - 2.0 * PI).abs() < 1e-10);
    let e = discretize_ellipse(2.0, 1.0, 200).unwrap();
    assert!(dist(e.normals[0], [1.0, 0.0]) < 1e-15);
    for nu in &e.normals {
        assert!((nu[0].hypot(nu[1]) - 1.0).abs() < 1e-14);
    }
    // composite Simpson on the speed, far finer than the trapezoid grid
    let m = 200_000;
    let speed = |t: f64| (4.0 * t.sin().powi(2) + t.cos().powi(2)).sqrt();
    let hs = 2.0 * PI / m as f64;
    let simpson: f64 = (0..m).map(|i| {
        let t = i as f64 * hs;
        hs / 6.0 * (speed(t) + 4.0 * speed(t + hs / 2.0) + speed(t + hs))
    }).sum();
    assert!((e.weights.iter().sum::<f64>() - simpson).abs() < 1e-8);
    assert!(matches!(discretize_ellipse(2.0, 1.0, 7), Err(Error::Config(_))));
    assert!(matches!(discretize_ellipse(-2.0, 1.0, 64), Err(Error::Config(_))));
}

#[test]
fn rotation_examples() {
    let (t, s) = rotate_frame([1.0, 2.0], [0.5, 0.5], [1.0, 0.0], [-3.0, 4.0]);
    assert_eq!((t, s), ([1.0, 2.0], [-3.0, 4.0]));
    let rho = 0.3;
    let (t, _) = rotate_frame([0.0, rho], [0.0, 0.0], [0.0, 1.0], [1.0, 1.0]);
    assert!(dist(t, [rho, 0.0]) < 1e-16);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_preserves_distances(
        tx in -3.0..3.0f64, ty in -3.0..3.0f64, cx in -3.0..3.0f64, cy in -3.0..3.0f64,
        sx in -3.0..3.0f64, sy in -3.0..3.0f64, angle in 0.0..(2.0 * PI),
    ) {
        let nu = [angle.cos(), angle.sin()];
        let (t, c, s) = ([tx, ty], [cx, cy], [sx, sy]);
        let (t2, s2) = rotate_frame(t, c, nu, s);
        prop_assert!((dist(t2, c) - dist(t, c)).abs() <= 1e-14 * (1.0 + dist(t, c)));
        prop_assert!((dist(s2, c) - dist(s, c)).abs() <= 1e-14 * (1.0 + dist(s, c)));
        prop_assert!((dist(t2, s2) - dist(t, s)).abs() <= 1e-14 * (1.0 + dist(t, s)));
    }
}

#[test]
fn rotation_maps_normal_to_x1() {
    let nu = [0.6, -0.8];
    let c = [0.2, 0.1];
    let (t, _) = rotate_frame([c[0] + 2.0 * nu[0], c[1] + 2.0 * nu[1]], c, nu, [0.0, 0.0]);
    assert!(dist(t, [c[0] + 2.0, c[1]]) < 1e-15);
}

#[test]
fn line_taylor_examples() {
    let k = laplace();
    let rec = DerivativeBackend::new(&k, Backend::Recurrence, 5, HybridConfig::default()).unwrap();
    let dir = DerivativeBackend::new(&k, Backend::Direct, 5, HybridConfig::default()).unwrap();
    let (target, source, r) = ([0.4, 0.1], [-0.9, 0.7], 0.05);
    let mut f = FlopCounter::new();
    let v0 = line_taylor_contribution(&rec, target, source, r, 0, &mut f).unwrap();
    let center = [target[0] - r, target[1]];
    assert!((v0 - k.eval_kernel(dist(center, source)).unwrap()).norm() < 1e-15);

    let a = line_taylor_contribution(&rec, target, source, r, 5, &mut f).unwrap();
    let b = line_taylor_contribution(&dir, target, source, r, 5, &mut f).unwrap();
    assert!((a - b).norm() <= 1e-10 * b.norm());
    // the expansion converges to the kernel at the target
    assert!((b - k.eval_kernel(dist(target, source)).unwrap()).norm() < 1e-6);

    let err = line_taylor_contribution(&rec, [1.0 + r, 0.0], [1.0, 0.0], r, 3, &mut f);
    assert!(matches!(err, Err(Error::Geometry(_))));
}

#[test]
fn line_taylor_flop_growth() {
    let k = KernelSpec::builtin(KernelId::Helmholtz2d, Some(1.0)).unwrap();
    let (mut rec, mut dir) = (Vec::new(), Vec::new());
    for p in 2..=12 {
        let mut fr = FlopCounter::new();
        let mut fd = FlopCounter::new();
        let br = DerivativeBackend::new(&k, Backend::Recurrence, p, HybridConfig::default()).unwrap();
        let bd = DerivativeBackend::new(&k, Backend::Direct, p, HybridConfig::default()).unwrap();
        line_taylor_contribution(&br, [0.0, 0.0], [-1.3, 0.4], 0.1, p, &mut fr).unwrap();
        line_taylor_contribution(&bd, [0.0, 0.0], [-1.3, 0.4], 0.1, p, &mut fd).unwrap();
        if p > 2 {
            assert!(fr.total() < fd.total(), "p={p}");
        }
        rec.push((p as f64, fr.total() as f64));
        dir.push((p as f64, fd.total() as f64));
    }
    let (sr, _) = fit_loglog(&rec).unwrap();
    let (sd, _) = fit_loglog(&dir).unwrap();
    assert!(sd >= 1.8, "direct exponent {sd}");
    assert!(sr < sd - 0.5, "recurrence exponent {sr}");
    // asymptotically one recurrence step per order: constant increments
    let inc: Vec<f64> = rec.windows(2).skip(3).map(|w| w[1].1 - w[0].1).collect();
    assert!(inc.iter().all(|d| *d == inc[0]), "{inc:?}");
}

#[test]
fn constant_density_on_circle() {
    // single layer of σ = 1 on the circle of radius R is −R ln R on the curve
    let r = 2.0;
    let circle = Ellipse::new(r, r);
    let targets = equispaced_targets(400, 20);
    let q = run(&circle, 400, &|_| 1.0, &targets, 5, Backend::Recurrence);
    let exact = -r * r.ln();
    for v in &q.values {
        assert!((v.re - exact).abs() <= 1e-6 * exact.abs(), "{v} vs {exact}");
    }
}

#[test]
fn reference_matches_circle_closed_forms() {
    let k = laplace();
    let r = 1.5;
    let circle = Ellipse::new(r, r);
    let targets = equispaced_targets(128, 16);
    let c = reference_potential(&k, &circle, 128, &|_| 1.0, &targets, 4).unwrap();
    for v in &c {
        assert!((v.re + r * r.ln()).abs() < 1e-8);
    }
    // σ = cos(m t) gives R cos(m t) / (2m)
    let m = 10.0;
    let c = reference_potential(&k, &circle, 128, &|t| (m * t).cos(), &targets, 4).unwrap();
    for (v, &j) in c.iter().zip(&targets) {
        let t = 2.0 * PI * j as f64 / 128.0;
        assert!((v.re - r * (m * t).cos() / (2.0 * m)).abs() < 1e-8);
    }
}

#[test]
fn reference_errors() {
    let ell = benchmark_ellipse();
    let t = equispaced_targets(64, 4);
    assert!(matches!(reference_potential(&laplace(), &ell, 64, &cos10, &t, 2), Err(Error::Config(_))));
    let hk = KernelSpec::builtin(KernelId::Helmholtz2d, Some(1.0)).unwrap();
    assert!(matches!(reference_potential(&hk, &ell, 64, &cos10, &t, 4), Err(Error::Capability(_))));
    // a grid far too coarse for cos(30 t) fails certification
    assert!(matches!(reference_potential(&laplace(), &ell, 8, &|t| (30.0 * t).cos(), &[0, 1], 4), Err(Error::ReferenceNotConverged { .. })));
}

#[test]
fn backends_agree_on_ellipse() {
    let ell = benchmark_ellipse();
    let targets = equispaced_targets(200, 25);
    for (p, tol) in [(3, 1e-8), (5, 1e-8), (7, 1e-8), (9, 1e-6), (11, 1e-6)] {
        let a = run(&ell, 200, &cos10, &targets, p, Backend::Recurrence);
        let b = run(&ell, 200, &cos10, &targets, p, Backend::Direct);
        let d = linf_relative(&a.values, &b.values);
        assert!(d <= tol, "p={p}: {d:e}");
    }
}

#[test]
fn h_refinement_is_monotone() {
    let ell = benchmark_ellipse();
    let mut last = f64::INFINITY;
    for n in [100, 200, 400, 800] {
        let targets = equispaced_targets(n, 20);
        let reference = reference_potential(&laplace(), &ell, n, &cos10, &targets, 4).unwrap();
        let e = linf_relative(&run(&ell, n, &cos10, &targets, 5, Backend::Recurrence).values, &reference);
        assert!(e <= last, "N={n}: {e:e} after {last:e}");
        last = e;
    }
    assert!(last < 1e-6);
}

#[test]
fn rigid_rotation_invariance() {
    let ell = benchmark_ellipse();
    let targets = equispaced_targets(200, 20);
    let a = run(&ell, 200, &cos10, &targets, 5, Backend::Recurrence);
    let b = run(&ell.rotated(0.7), 200, &cos10, &targets, 5, Backend::Recurrence);
    assert!(linf_relative(&b.values, &a.values) <= 1e-12);
}

#[test]
fn results_are_deterministic_and_flops_add_up() {
    let ell = benchmark_ellipse();
    let targets = equispaced_targets(200, 10);
    let a = run(&ell, 200, &cos10, &targets, 5, Backend::Recurrence);
    let b = run(&ell, 200, &cos10, &targets, 5, Backend::Recurrence);
    assert_eq!(a, b);
    assert_eq!(a.per_target_flops.iter().sum::<u64>(), a.flops.total());
    assert!(a.values.iter().all(|v: &Complex64| v.im == 0.0));
}

#[test]
fn config_errors() {
    let ell = benchmark_ellipse();
    let k = laplace();
    let tiny = QbxConfig { radius_factor: 1e-20, ..QbxConfig::default() };
    assert!(matches!(single_layer_qbx(&k, &ell, 64, &cos10, &[0], &tiny), Err(Error::Config(_))));
    let neg = QbxConfig { radius_factor: -1.0, ..QbxConfig::default() };
    assert!(matches!(single_layer_qbx(&k, &ell, 64, &cos10, &[0], &neg), Err(Error::Config(_))));
    assert!(matches!(single_layer_qbx(&k, &ell, 64, &cos10, &[64], &QbxConfig::default()), Err(Error::Config(_))));
    let k3 = KernelSpec::builtin(KernelId::Laplace3d, None).unwrap();
    assert!(matches!(single_layer_qbx(&k3, &ell, 64, &cos10, &[0], &QbxConfig::default()), Err(Error::Config(_))));
}
