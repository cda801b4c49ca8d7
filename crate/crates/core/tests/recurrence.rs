use greenrec::kernels::{builtin_pde_of, KernelId, KernelSpec};
use greenrec::pde2ode::{pde_to_ode, OdeInX1, Normalization};
use greenrec::recurrence::artifact::{load_large, load_ode, load_small, save_large, save_ode, save_small};
use greenrec::recurrence::{ode_to_large_recurrence, recurrence_order, specialize_small_recurrence, Recurrence};
use greenrec::symcore::{parse_poly, GaussRat, MultiIndex, Poly, Var, VarPolicy};
use greenrec::verify::{large_recurrence_residual, random_points, small_recurrence_residual};
use greenrec::Error;
use std::collections::BTreeMap;

fn poly(text: &str, d: usize) -> Poly {
    parse_poly(text, d, VarPolicy::ALL).unwrap()
}

fn kernel(id: KernelId) -> KernelSpec {
    KernelSpec::builtin(id, id.needs_k().then_some(1.3)).unwrap()
}

fn large(id: KernelId) -> Recurrence {
    ode_to_large_recurrence(&pde_to_ode(&builtin_pde_of(id).unwrap()).unwrap()).unwrap()
}

/// `a` and `b` agree up to a common polynomial multiple, shift by shift.
fn proportional(a: &BTreeMap<i32, Poly>, b: &BTreeMap<i32, Poly>) -> bool {
    if a.keys().ne(b.keys()) {
        return false;
    }
    let top = *a.keys().last().unwrap();
    a.iter().all(|(s, p)| p.mul(&b[&top]) == b[s].mul(&a[&top]))
}

#[test]
fn laplace_2d_large_recurrence() {
    let rec = large(KernelId::Laplace2d);
    assert_eq!((rec.min_shift, rec.max_shift), (-1, 2));
    let expect = BTreeMap::from([
        (2, poly("x1^3 + x1*x2^2", 2)),
        (1, poly("(3*n + 1)*x1^2 + (n - 1)*x2^2", 2)),
        (0, poly("(3*n^2 - n)*x1", 2)),
        (-1, poly("n*(n - 1)^2", 2)),
    ]);
    assert!(proportional(&rec.coefficients, &expect));
    assert_eq!(recurrence_order(&rec), 3);
}

#[test]
fn laplace_2d_recurrence_at_n_1_and_2() {
    // n = 1: ∂ applied once to the ODE; n = 2: twice. Both are ODEs in x1 that
    // the oracle derivatives satisfy, so checking the residual covers them.
    let rec = large(KernelId::Laplace2d);
    let k = kernel(KernelId::Laplace2d);
    let pts = random_points(2, 10, 0.0, 21);
    assert!(large_recurrence_residual(&rec, &k, &pts, &[1, 2]).unwrap() <= 1e-8);
    let n1 = rec.at_n(1);
    assert_eq!(n1[&-1], Poly::zero(2));
    assert_eq!(n1[&0], poly("2*x1", 2));
    assert_eq!(n1[&1], poly("4*x1^2", 2));
}

#[test]
fn recurrence_residuals_all_kernels() {
    let stable2 = random_points(2, 10, 1.0, 31);
    let stable3 = random_points(3, 10, 1.0, 32);
    let ns: Vec<i64> = (3..=12).collect();
    for id in KernelId::BUILTIN {
        let rec = large(id);
        let k = kernel(id);
        let pts = if k.dimension == 2 { &stable2 } else { &stable3 };
        let res = large_recurrence_residual(&rec, &k, pts, &ns).unwrap();
        assert!(res <= 1e-8, "{} residual {res:e}", id.name());
    }
}

#[test]
fn order_bound_holds() {
    for id in KernelId::BUILTIN {
        let ode = pde_to_ode(&builtin_pde_of(id).unwrap()).unwrap();
        let rec = ode_to_large_recurrence(&ode).unwrap();
        assert!(!rec.leading().is_zero());
        let bound = ode.order() as i32 + ode.highest_x1_power() as i32;
        assert!(recurrence_order(&rec) <= bound, "{}: {} > {bound}", id.name(), recurrence_order(&rec));
        let small = specialize_small_recurrence(&rec).unwrap();
        assert!(small.order() <= rec.order());
    }
}

#[test]
fn constant_coefficient_ode_has_order_a() {
    let d = 2;
    let ode = OdeInX1 {
        dimension: d,
        coefficients: vec![Poly::int(d, 2), Poly::zero(d), Poly::var_pow(d, Var::X(2), 2), Poly::one(d)],
        normalization: Normalization { x1_power: 0, r_power: 0, stripped: MultiIndex::zeros(d), scale: GaussRat::one() },
    };
    let rec = ode_to_large_recurrence(&ode).unwrap();
    assert_eq!(ode.highest_x1_power(), 0);
    assert_eq!(recurrence_order(&rec), 3);
}

#[test]
fn laplace_2d_small_recurrence() {
    let small = specialize_small_recurrence(&large(KernelId::Laplace2d)).unwrap();
    // (∂ⁿG)|₀ = −(n−1)(n−2) (∂^{n−2}G)|₀ / x2²
    let expect = BTreeMap::from([(0, poly("x2^2", 2)), (-2, poly("(n - 1)*(n - 2)", 2))]);
    assert!(proportional(&small.coefficients, &expect));
    // only shifts of equal parity
    assert!(small.coefficients.keys().all(|s| s % 2 == 0));
    for p in small.coefficients.values() {
        assert!(!p.uses_var(0));
    }
}

#[test]
fn small_recurrence_residuals() {
    let xbars = [0.3, 0.7, 1.1, 1.9];
    let even: Vec<i64> = (0..=14).step_by(2).collect();
    for id in KernelId::BUILTIN {
        let small = specialize_small_recurrence(&large(id)).unwrap();
        let res = small_recurrence_residual(&small, &kernel(id), &xbars, &even).unwrap();
        assert!(res <= 1e-8, "{} residual {res:e}", id.name());
    }
}

#[test]
fn odd_orders_vanish_on_axis() {
    for id in [KernelId::Laplace2d, KernelId::Helmholtz2d, KernelId::Biharmonic3d, KernelId::Yukawa3d] {
        let k = kernel(id);
        let mut x = vec![0.0; k.dimension];
        x[1] = 0.8;
        let o = k.oracle_derivatives(&x, 9, 40).unwrap();
        for j in (1..=9).step_by(2) {
            assert_eq!(o.values[j].norm(), 0.0, "{} order {j}", id.name());
        }
        assert!(o.values[2].norm() > 0.0);
    }
}

#[test]
fn degenerate_small_recurrence_errors() {
    let d = 2;
    let x1 = Poly::var(d, Var::X(1));
    let rec = Recurrence {
        dimension: d,
        min_shift: 0,
        max_shift: 1,
        coefficients: BTreeMap::from([(1, x1.clone()), (0, x1.pow(2))]),
        source_ode_order: 1,
        highest_x1_power: 2,
    };
    assert!(matches!(specialize_small_recurrence(&rec), Err(Error::DegenerateRecurrence(_))));
}

#[test]
fn artifacts_round_trip_bit_exactly() {
    for id in KernelId::BUILTIN {
        let ode = pde_to_ode(&builtin_pde_of(id).unwrap()).unwrap();
        let rec = ode_to_large_recurrence(&ode).unwrap();
        let small = specialize_small_recurrence(&rec).unwrap();
        let (a, b, c) = (save_ode(&ode), save_large(&rec), save_small(&small));
        assert_eq!(save_ode(&load_ode(&a).unwrap()), a);
        assert_eq!(save_large(&load_large(&b).unwrap()), b);
        assert_eq!(save_small(&load_small(&c).unwrap()), c);
        assert_eq!(load_large(&b).unwrap(), rec);
    }
}

#[test]
fn artifact_errors() {
    assert!(matches!(load_large("kind = \"ode\"\n"), Err(Error::Parse { .. })));
    let text = save_large(&large(KernelId::Laplace2d)).replace("x1^3 + x1*x2^2", "x1^3 + x1*x3");
    assert!(matches!(load_large(&text), Err(Error::Parse { .. })));
}

#[test]
fn tampered_recurrence_fails_residual() {
    let mut rec = large(KernelId::Helmholtz2d);
    let c = rec.coefficients.get_mut(&0).unwrap();
    *c = c.add(&Poly::var(2, Var::N));
    let k = kernel(KernelId::Helmholtz2d);
    let res = large_recurrence_residual(&rec, &k, &random_points(2, 10, 1.0, 3), &[5]).unwrap();
    assert!(res > 1e-3, "residual {res:e}");
}
