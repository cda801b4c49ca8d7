use greenrec::kernels::hp::{with_precision, Hp, HpC};
use greenrec::kernels::oracle::{finite_difference_derivatives, oracle_map};
use greenrec::kernels::special::bessel_j0y0j1y1;
use greenrec::kernels::{builtin_pde_of, KernelId, KernelSpec};
use greenrec::verify::random_points;
use greenrec::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::Arc;

fn kernel(id: KernelId, k: f64) -> KernelSpec {
    KernelSpec::builtin(id, id.needs_k().then_some(k)).unwrap()
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm().max(a.norm())
    }
}

#[test]
fn eval_kernel_values() {
    assert_eq!(kernel(KernelId::Laplace2d, 0.0).eval_kernel(1.0).unwrap().norm(), 0.0);
    let g = kernel(KernelId::Laplace3d, 0.0).eval_kernel(1.0).unwrap();
    assert!((g.re + 1.0 / (4.0 * PI)).abs() < 1e-16 && g.im == 0.0);
    // (i/4)(J0(1) + i Y0(1)) from independent tabulated values
    let (j0, y0) = (0.765_197_686_557_966_6, 0.088_256_964_215_676_96);
    let g = kernel(KernelId::Helmholtz2d, 1.0).eval_kernel(1.0).unwrap();
    assert!(rel(g, Complex64::new(-y0 / 4.0, j0 / 4.0)) < 1e-14);
    for r in [0.0, -1.0, f64::NAN] {
        assert!(matches!(kernel(KernelId::Laplace2d, 0.0).eval_kernel(r), Err(Error::Domain(_))));
    }
}

#[test]
fn base_derivatives_examples() {
    let k = kernel(KernelId::Laplace2d, 0.0);
    let b = k.base_derivatives(&[3.0, 4.0], 1).unwrap();
    assert!((b[0].re + 5f64.ln() / (2.0 * PI)).abs() < 1e-16);
    assert!((b[1].re + 3.0 / (50.0 * PI)).abs() < 1e-16);
    let on_axis = k.base_derivatives(&[0.0, 0.7], 3).unwrap();
    assert_eq!(on_axis[1].norm(), 0.0);
    assert_eq!(on_axis[3].norm(), 0.0);
    assert!(matches!(k.base_derivatives(&[1.0, 1.0], 4), Err(Error::Capability(_))));
    assert!(matches!(k.base_derivatives(&[0.0, 0.0], 1), Err(Error::Domain(_))));

    let h = kernel(KernelId::Helmholtz2d, 2.0);
    let b = h.base_derivatives(&[1.0, 1.0], 2).unwrap();
    let o = h.oracle_derivatives(&[1.0, 1.0], 2, 40).unwrap();
    for j in 0..=2 {
        assert!(rel(b[j], o.values[j]) < 1e-12, "order {j}");
    }
}

#[test]
fn base_matches_oracle_everywhere() {
    let p2 = random_points(2, 20, 0.0, 101);
    let p3 = random_points(3, 20, 0.0, 102);
    for id in KernelId::BUILTIN {
        let k = kernel(id, 1.7);
        for x in if k.dimension == 2 { &p2 } else { &p3 } {
            let b = k.base_derivatives(x, 3).unwrap();
            let o = k.oracle_derivatives(x, 3, 40).unwrap();
            let scale = o.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
            for j in 0..=3 {
                // relative to the entry, or to the largest entry when it is tiny
                let err = (b[j] - o.values[j]).norm() / o.values[j].norm().max(1e-6 * scale);
                assert!(err < 1e-12, "{} at {x:?} order {j}: {err:e}", id.name());
            }
        }
    }
}

#[test]
fn oracle_examples() {
    let k = kernel(KernelId::Laplace2d, 0.0);
    let o = k.oracle_derivatives(&[3.0, 4.0], 2, 50).unwrap();
    assert!(o.working_precision >= 50);
    assert!((o.values[2].re + 7.0 / (1250.0 * PI)).abs() < 1e-17);

    for id in KernelId::BUILTIN {
        let k = kernel(id, 0.9);
        let mut x = vec![0.4; k.dimension];
        x[0] = 1.1;
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let o = k.oracle_derivatives(&x, 0, 40).unwrap();
        assert!(rel(o.values[0], k.eval_kernel(r).unwrap()) < 1e-14, "{}", id.name());
    }

    let b = kernel(KernelId::Biharmonic2d, 0.0);
    let o = b.oracle_derivatives(&[1.0, 2.0], 8, 40).unwrap();
    assert!(o.values.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    let near = b.oracle_derivatives(&[1e-9, 2.0], 8, 40).unwrap();
    let at = b.oracle_derivatives(&[0.0, 2.0], 8, 40).unwrap();
    for j in (1..=7).step_by(2) {
        assert_eq!(at.values[j].norm(), 0.0);
        assert!(near.values[j].norm() < 1e-6 * near.values[j + 1].norm().max(near.values[j - 1].norm()));
    }
}

#[test]
fn oracle_rejects_custom_and_origin() {
    let pde = builtin_pde_of(KernelId::Laplace2d).unwrap();
    let cb: greenrec::kernels::RadialCallback = Arc::new(|r: f64| {
        let c = -1.0 / (2.0 * PI);
        Ok([Complex64::new(c * r.ln(), 0.0), Complex64::new(c / r, 0.0), Complex64::new(-c / (r * r), 0.0), Complex64::new(2.0 * c / r.powi(3), 0.0)])
    });
    let custom = KernelSpec::custom(pde, None, cb);
    assert!(matches!(custom.oracle_derivatives(&[1.0, 1.0], 2, 40), Err(Error::Capability(_))));
    // the callback still drives closed-form seeding
    let b = custom.base_derivatives(&[3.0, 4.0], 1).unwrap();
    assert!((b[1].re + 3.0 / (50.0 * PI)).abs() < 1e-16);
    let k = kernel(KernelId::Laplace2d, 0.0);
    assert!(matches!(k.oracle_derivatives(&[0.0, 0.0], 2, 40), Err(Error::Domain(_))));
}

#[test]
fn finite_differences_cross_check_oracle() {
    for id in [KernelId::Laplace2d, KernelId::Helmholtz2d, KernelId::Yukawa3d] {
        let k = kernel(id, 1.0);
        // dyadic coordinates keep the stencil abscissae exact
        let mut x = vec![0.625; k.dimension];
        x[0] = 0.875;
        let fd = finite_difference_derivatives(id, 1.0, &x, 4).unwrap();
        let o = k.oracle_derivatives(&x, 4, 40).unwrap();
        for j in 0..=4 {
            assert!(rel(fd[j], o.values[j]) < 1e-9, "{} order {j}: {:e}", id.name(), rel(fd[j], o.values[j]));
        }
    }
}

#[test]
fn oracle_is_even_in_x1() {
    for id in KernelId::BUILTIN {
        let k = kernel(id, 1.2);
        let mut x = vec![0.5; k.dimension];
        x[0] = 0.8;
        let mut y = x.clone();
        y[0] = -0.8;
        let a = k.oracle_derivatives(&x, 7, 40).unwrap();
        let b = k.oracle_derivatives(&y, 7, 40).unwrap();
        for j in 0..=7 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            assert!(rel(a.values[j], b.values[j] * sign) < 1e-15, "{} order {j}", id.name());
        }
    }
}

/// `∂^q G` at `x`: the x1 part from the oracle, the other directions by
/// central differences on 60-digit oracle values with step `h`.
fn mixed_derivative(k: &KernelSpec, x: &[f64], q: &[u32], h: f64) -> HpC {
    fn rec(k: &KernelSpec, x: &mut Vec<f64>, q: &[u32], dir: usize, h: f64) -> HpC {
        if dir == q.len() {
            let n = q[0] as usize;
            return oracle_map(k.id, k.k_value(), x, n, 60, HpC::clone).unwrap().swap_remove(n);
        }
        let (offsets, weights): (&[i32], &[f64]) = match q[dir] {
            0 => return rec(k, x, q, dir + 1, h),
            1 => (&[-1, 1], &[-0.5, 0.5]),
            2 => (&[-1, 0, 1], &[1.0, -2.0, 1.0]),
            3 => (&[-2, -1, 1, 2], &[-0.5, 1.0, -1.0, 0.5]),
            4 => (&[-2, -1, 0, 1, 2], &[1.0, -4.0, 6.0, -4.0, 1.0]),
            m => panic!("order {m}"),
        };
        let base = x[dir];
        let mut acc = HpC::zero();
        for (&o, &w) in offsets.iter().zip(weights) {
            x[dir] = base + o as f64 * h;
            acc = acc.add(&rec(k, x, q, dir + 1, h).scale(&Hp::from_f64(w)));
        }
        x[dir] = base;
        acc.scale(&Hp::from_f64(h.powi(-(q[dir] as i32))))
    }
    rec(k, &mut x.to_vec(), q, 1, h)
}

#[test]
fn oracle_satisfies_own_pde() {
    let h = 2f64.powi(-14);
    for id in KernelId::BUILTIN {
        let k = kernel(id, 1.4);
        let d = k.dimension;
        for x in random_points(d, 4, 0.0, 7 + d as u64).iter().filter(|p| p.iter().map(|v| v * v).sum::<f64>() > 0.25) {
            let mut vals: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            vals.push(Complex64::new(0.0, 0.0));
            vals.push(Complex64::new(0.0, 0.0));
            vals.push(Complex64::new(k.k_value(), 0.0));
            let (sum, big) = with_precision(256, || {
                let mut sum = HpC::zero();
                let mut big = 0.0f64;
                for (q, p) in &k.pde.coefficients {
                    let c = p.eval_c64(&vals);
                    let dq = mixed_derivative(&k, x, &q.0, h);
                    let term = HpC::new(&(&dq.re * &Hp::from_f64(c.re)) - &(&dq.im * &Hp::from_f64(c.im)), &(&dq.re * &Hp::from_f64(c.im)) + &(&dq.im * &Hp::from_f64(c.re)));
                    big = big.max(term.norm().to_f64());
                    sum = sum.add(&term);
                }
                (sum.norm().to_f64(), big)
            });
            assert!(sum / big <= 1e-8, "{} at {x:?}: {:e}", id.name(), sum / big);
        }
    }
}

#[test]
fn bessel_identities() {
    let [j0, _, _, _] = bessel_j0y0j1y1(1e-12).unwrap();
    assert!((j0 - 1.0).abs() < 1e-15);
    assert!(matches!(bessel_j0y0j1y1(0.0), Err(Error::Domain(_))));
    assert!(matches!(bessel_j0y0j1y1(-2.0), Err(Error::Domain(_))));
    for i in 1..=200 {
        let z = i as f64 * 0.25;
        let [j0, y0, j1, y1] = bessel_j0y0j1y1(z).unwrap();
        let w = j1 * y0 - j0 * y1;
        assert!((w - 2.0 / (PI * z)).abs() <= 1e-10 * (2.0 / (PI * z)), "wronskian at {z}");
        // J0'' + J0'/z + J0 = 0 with J0' = -J1, J0'' = -J0 + J1/z
        let res = (-j0 + j1 / z) + (-j1) / z + j0;
        assert!(res.abs() <= 1e-10, "ode at {z}");
    }
}

#[test]
fn j0_at_one_matches_series() {
    // Σ (-1/4)^m / (m!)² at 128 bits, truncated after the terms fall below 1e-35
    let series = with_precision(128, || {
        let mut term = Hp::one();
        let mut sum = Hp::one();
        let q = Hp::from_f64(-0.25);
        for m in 1..40 {
            let mm = Hp::from_i64(m * m);
            term = &(&term * &q) / &mm;
            sum = &sum + &term;
        }
        sum.to_f64()
    });
    let [j0, ..] = bessel_j0y0j1y1(1.0).unwrap();
    assert!((j0 - series).abs() <= 1e-12 * series);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bessel_accuracy_against_oracle(z in 0.01f64..50.0) {
        let [j0, y0, j1, y1] = bessel_j0y0j1y1(z).unwrap();
        let b = with_precision(128 + greenrec::kernels::hp_special::guard_bits(z), || greenrec::kernels::hp_special::bessel_jy(&Hp::from_f64(z)));
        for (v, e) in [(j0, &b.j0), (y0, &b.y0), (j1, &b.j1), (y1, &b.y1)] {
            let e = e.to_f64();
            // relative, or absolute near the zeros
            prop_assert!((v - e).abs() <= 1e-12 * e.abs().max(1e-3), "z {z}: {v} vs {e}");
        }
    }
}
