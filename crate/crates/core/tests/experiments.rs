use greenrec::evaluator::HybridConfig;
use greenrec::experiments::*;
use greenrec::kernels::{KernelId, KernelSpec};
use greenrec::qbx::Backend;
use greenrec::Error;

fn kernel(id: KernelId) -> KernelSpec {
    KernelSpec::builtin(id, id.needs_k().then_some(1.0)).unwrap()
}

fn col(r: &ExperimentReport, name: &str) -> usize {
    r.columns.iter().position(|c| c == name).unwrap()
}

#[test]
fn grid_validation() {
    assert!(GridSpec::default().validate().is_ok());
    assert!(matches!(GridSpec { res1: 15, ..GridSpec::default() }.validate(), Err(Error::Config(_))));
    let origin = GridSpec { x1: (0.0, 1.0), x2: (0.0, 1.0), log: false, ..GridSpec::default() };
    assert!(matches!(origin.validate(), Err(Error::Config(_))));
    assert!(matches!(GridSpec { x1: (0.0, 1.0), ..GridSpec::default() }.validate(), Err(Error::Config(_))));
    assert_eq!(GridSpec::default().points().len(), 64 * 64);
}

#[test]
fn heatmap_hybrid_vs_large() {
    let k = kernel(KernelId::Laplace2d);
    let cfg = HybridConfig::default();
    let g = GridSpec::default();
    let h = error_heatmap(&k, 9, &g, HeatmapMode::Hybrid, &cfg).unwrap();
    let l = error_heatmap(&k, 9, &g, HeatmapMode::Large, &cfg).unwrap();
    assert!(h.summary["max_rel_error"] <= 1e-6, "{:?}", h.summary);
    let cone = "median_rel_error_ratio_below_1e-2";
    assert!(l.summary[cone] >= 1e3 * h.summary[cone], "large {:e} hybrid {:e}", l.summary[cone], h.summary[cone]);
    // the branch switches on the line x2 = ξ x1
    let (ri, bi) = (col(&h, "ratio"), col(&h, "branch"));
    for row in &h.rows {
        let ratio: f64 = row[ri].parse().unwrap();
        assert_eq!(row[bi], if ratio < 1.0 / cfg.xi { "small" } else { "large" });
    }
}

#[test]
fn heatmap_first_derivative_is_exact_everywhere() {
    let k = kernel(KernelId::Laplace2d);
    for mode in [HeatmapMode::Large, HeatmapMode::Small, HeatmapMode::Hybrid] {
        let r = error_heatmap(&k, 1, &GridSpec { res1: 16, res2: 16, ..GridSpec::default() }, mode, &HybridConfig::default()).unwrap();
        assert!(r.summary["max_rel_error"] <= 1e-12, "{}: {:?}", mode.name(), r.summary);
    }
    assert!(HeatmapMode::from_name("hybrid").is_ok());
    assert!(HeatmapMode::from_name("both").is_err());
}

#[test]
fn slope_fit_laplace() {
    let k = kernel(KernelId::Laplace2d);
    let a = slope_fit(&k, 9, &default_slope_ratios(), 5, 7).unwrap();
    let s = a.slope.unwrap();
    assert!((-2.3..=-1.7).contains(&s), "slope {s}");
    let b = slope_fit(&k, 9, &default_slope_ratios(), 5, 11).unwrap();
    let (ca, cb) = (a.constant.unwrap(), b.constant.unwrap());
    assert!(ca / cb < 10.0 && cb / ca < 10.0, "C {ca:e} vs {cb:e}");
    assert_eq!(a.samples.len() + a.dropped_zero, 50);
}

#[test]
fn fitter_self_test() {
    let pts: Vec<(f64, f64)> = (0..10).map(|j| 10f64.powi(-j)).map(|q| (q, 3e-17 * q.powi(-2))).collect();
    let (s, i) = fit_loglog(&pts).unwrap();
    assert!((s + 2.0).abs() < 1e-6);
    assert!((10f64.powf(i) / 3e-17 - 1.0).abs() < 1e-6);
    assert!(fit_loglog(&[(1.0, 0.0), (2.0, 0.0)]).is_none());
    assert!(fit_loglog(&[(1.0, 1.0), (1.0, 2.0)]).is_none());
}

#[test]
fn slope_report_is_deterministic() {
    let k = kernel(KernelId::Laplace2d);
    let ratios = [1.0, 1e-2, 1e-4];
    let a = slope_report(&k, 9, &ratios, 2, 3).unwrap().to_csv();
    let b = slope_report(&k, 9, &ratios, 2, 3).unwrap().to_csv();
    assert_eq!(a, b);
    assert!(a.contains("# seed: 3"));
}

fn region_range(r: &ExperimentReport) -> (f64, f64, f64, f64) {
    (r.summary["odd_ratio_min"], r.summary["odd_ratio_max"], r.summary["even_ratio_min"], r.summary["even_ratio_max"])
}

#[test]
fn assumptions_laplace_within_bounds() {
    let r = assumption_heatmap(&kernel(KernelId::Laplace2d), &GridSpec::default(), &AssumptionConfig::default()).unwrap();
    let (a, b, c, d) = region_range(&r);
    assert!(a >= 1.0 && b <= 100.0, "odd [{a}, {b}]");
    assert!(c >= 1.0 && d <= 100.0, "even [{c}, {d}]");
}

#[test]
fn assumptions_helmholtz_depend_on_k_xbar() {
    // within k x̄ ≤ 1 the Laplace-like bounds hold; at large k x̄ the
    // oscillatory decay of the Hankel function breaks the x̄^{-c-1} scaling
    let k = kernel(KernelId::Helmholtz2d);
    let unit = GridSpec { x1: (1e-3, 1.0), x2: (1e-3, 1.0), ..GridSpec::default() };
    let r = assumption_heatmap(&k, &unit, &AssumptionConfig::default()).unwrap();
    let (a, b, c, d) = region_range(&r);
    assert!(a >= 1.0 && b <= 100.0 && c >= 1.0 && d <= 100.0, "{:?}", r.summary);
    let r = assumption_heatmap(&k, &GridSpec::default(), &AssumptionConfig::default()).unwrap();
    assert!(region_range(&r).3 > 100.0);
}

#[test]
fn assumptions_biharmonic_odd_ratio_grows_near_axis() {
    // ∂⁶G on the axis is nonzero, so ∂⁵G ~ x1 ∂⁶G|₀ and the ratio against
    // |x1|³ grows like (x̄/x1)² as x1 → 0
    let r = assumption_heatmap(&kernel(KernelId::Biharmonic2d), &GridSpec::default(), &AssumptionConfig::default()).unwrap();
    let (oi, ri, ii) = (col(&r, "odd_ratio"), col(&r, "ratio"), col(&r, "in_region"));
    let mut near = Vec::new();
    for row in &r.rows {
        if row[ii] == "1" {
            let q: f64 = row[ri].parse().unwrap();
            let v: f64 = row[oi].parse().unwrap();
            if q < 1e-2 {
                near.push(v * q * q);
            }
        }
    }
    let lo = near.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = near.iter().cloned().fold(0.0, f64::max);
    assert!(hi / lo < 1.1, "ratio·(x1/x̄)² spans [{lo}, {hi}]");
    assert!(r.summary["odd_ratio_max"] > 100.0);
}

#[test]
fn assumption_sampling_converges() {
    let g = GridSpec { res1: 16, res2: 16, ..GridSpec::default() };
    for id in [KernelId::Laplace2d, KernelId::Helmholtz2d, KernelId::Biharmonic2d] {
        let k = kernel(id);
        let a = assumption_heatmap(&k, &g, &AssumptionConfig::default()).unwrap();
        let b = assumption_heatmap(&k, &g, &AssumptionConfig { samples: 128, ..AssumptionConfig::default() }).unwrap();
        for (ra, rb) in a.rows.iter().zip(&b.rows) {
            for c in [4, 5] {
                let (x, y): (f64, f64) = (ra[c].parse().unwrap(), rb[c].parse().unwrap());
                assert!((x - y).abs() <= 0.01 * y, "{}: {x} vs {y}", id.name());
            }
        }
    }
}

#[test]
fn assumption_parameter_validation() {
    let k = kernel(KernelId::Laplace2d);
    assert!(assumption_heatmap(&k, &GridSpec::default(), &AssumptionConfig { c: 4, ..AssumptionConfig::default() }).is_err());
    assert!(assumption_heatmap(&k, &GridSpec::default(), &AssumptionConfig { d_even: 5, ..AssumptionConfig::default() }).is_err());
}

#[test]
fn qbx_table_small() {
    let cfg = QbxTableConfig { n_list: vec![100, 200], p_list: vec![0, 5], targets: 10, ..QbxTableConfig::default() };
    let r = qbx_error_table(&cfg).unwrap();
    assert_eq!(r.rows.len(), 2 * 2 * 2);
    let err = |n: &str, p: &str, b: &str| -> f64 {
        r.rows.iter().find(|row| row[0] == n && row[1] == p && row[2] == b).unwrap()[4].parse().unwrap()
    };
    for n in ["100", "200"] {
        let (a, b) = (err(n, "5", "recurrence"), err(n, "5", "direct"));
        assert!((a - b).abs() <= 1e-8 * b.max(1e-300) + 1e-15, "N={n}: {a:e} vs {b:e}");
    }
    let p0 = err("100", "0", "recurrence");
    assert!(p0.is_finite() && p0 > 1e-3, "p=0 error {p0:e}");
    assert!(err("200", "5", "recurrence") < err("100", "5", "recurrence"));
}

#[test]
fn flop_comparison_helmholtz() {
    let r = flop_comparison(&kernel(KernelId::Helmholtz2d), 2..=12).unwrap();
    assert!(separated_above(&r, 2));
    let (rec, dir) = (r.summary["recurrence_exponent"], r.summary["direct_exponent"]);
    assert!(dir >= 1.8, "direct exponent {dir}");
    assert!(rec < dir, "recurrence exponent {rec}");
    assert_eq!(Backend::Direct.name(), "direct");
}

#[test]
fn reports_record_parameters() {
    let k = kernel(KernelId::Laplace2d);
    let csv = error_heatmap(&k, 3, &GridSpec { res1: 16, res2: 16, ..GridSpec::default() }, HeatmapMode::Small, &HybridConfig::default())
        .unwrap()
        .to_csv();
    for key in ["# experiment: heatmap", "# n: 3", "# mode: small", "# p_small: 8", "# grid:"] {
        assert!(csv.contains(key), "missing {key}");
    }
    assert!(csv.lines().any(|l| l == "x1,x2,ratio,branch,value_re,value_im,oracle_re,oracle_im,rel_error"));
}

#[test]
fn chebyshev_samples_cover_interval() {
    let s = chebyshev_samples(2.0, 64);
    assert_eq!(s.len(), 64);
    assert_eq!(s[0], 0.0);
    assert!((s[63] - 2.0).abs() < 1e-15);
    assert!(s.windows(2).all(|w| w[0] < w[1]));
}
