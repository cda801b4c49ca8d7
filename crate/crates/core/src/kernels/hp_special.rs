//! Bessel functions of orders 0 and 1 in arbitrary precision, by ascending
//! series. The caller must choose a working precision with enough guard bits
//! for the cancellation in the series (about `3 z` bits).

use super::hp::{precision, Hp};

pub struct BesselHp {
    pub j0: Hp,
    pub j1: Hp,
    pub y0: Hp,
    pub y1: Hp,
}

pub struct ModBesselHp {
    pub i0: Hp,
    pub i1: Hp,
    pub k0: Hp,
    pub k1: Hp,
}

/// Guard bits for the series at argument `z`.
pub fn guard_bits(z: f64) -> usize {
    (3.0 * z.abs()) as usize + 64
}

/// Terms `t_k = (z^2/4)^k/(k!)^2` and `u_k = (z/2)^{2k+1}/(k!(k+1)!)`
/// together with harmonic numbers, summed with `sign = ±1` alternation.
struct Sums {
    a: Hp,  // Σ s^k t_k
    ah: Hp, // Σ s^k H_k t_k
    b: Hp,  // Σ s^k u_k
    bh: Hp, // Σ s^k (H_k + H_{k+1}) u_k
}

fn series(z: &Hp, alternating: bool) -> Sums {
    let q = &(z * z) / &Hp::from_i64(4);
    let mut t = Hp::one();
    let mut u = z / &Hp::from_i64(2);
    let mut h = Hp::zero();
    let mut a = Hp::one();
    let mut ah = Hp::zero();
    let mut b = u.clone();
    let mut bh = u.clone(); // H_0 + H_1 = 1
    let eps_exp = -(precision() as i64) - 8;
    let zf = z.to_f64();
    let mut k: i64 = 0;
    loop {
        k += 1;
        t = &(&t * &q) / &Hp::from_i64(k * k);
        u = &(&u * &q) / &Hp::from_i64(k * (k + 1));
        h = &h + &(&Hp::one() / &Hp::from_i64(k));
        let h1 = &h + &(&Hp::one() / &Hp::from_i64(k + 1));
        let neg = alternating && k % 2 == 1;
        let (ta, tah, tb, tbh) = (t.clone(), &h * &t, u.clone(), &(&h + &h1) * &u);
        if neg {
            a = &a - &ta;
            ah = &ah - &tah;
            b = &b - &tb;
            bh = &bh - &tbh;
        } else {
            a = &a + &ta;
            ah = &ah + &tah;
            b = &b + &tb;
            bh = &bh + &tbh;
        }
        if (k as f64) > zf {
            let small = |x: &Hp, s: &Hp| match (x.exponent(), s.exponent()) {
                (None, _) => true,
                (Some(ex), Some(es)) => ex - es < eps_exp,
                (Some(_), None) => false,
            };
            if small(&tah, &a) && small(&tbh, &b) && small(&tah, &ah) {
                break;
            }
        }
    }
    Sums { a, ah, b, bh }
}

pub fn bessel_jy(z: &Hp) -> BesselHp {
    let s = series(z, true);
    let pi = Hp::pi();
    let gamma = Hp::euler_gamma();
    let two = Hp::from_i64(2);
    let lz = (z / &two).ln();
    let j0 = s.a.clone();
    let j1 = s.b.clone();
    // Y0 = (2/π)[(ln(z/2)+γ) J0 − Σ (−1)^k H_k t_k]
    let y0 = &(&two / &pi) * &(&(&(&lz + &gamma) * &j0) - &s.ah);
    // Y1 = −2/(πz) + (2/π) ln(z/2) J1 − (1/π) Σ (−1)^k (H_k + H_{k+1} − 2γ) u_k
    let corr = &s.bh - &(&(&two * &gamma) * &s.b);
    let y1 = &(&(&(&two / &pi) * &(&lz * &j1)) - &(&two / &(&pi * z))) - &(&corr / &pi);
    BesselHp { j0, j1, y0, y1 }
}

pub fn bessel_ik(z: &Hp) -> ModBesselHp {
    let s = series(z, false);
    let gamma = Hp::euler_gamma();
    let two = Hp::from_i64(2);
    let lz = (z / &two).ln();
    let i0 = s.a.clone();
    let i1 = s.b.clone();
    // K0 = −(ln(z/2)+γ) I0 + Σ H_k t_k
    let k0 = &s.ah - &(&(&lz + &gamma) * &i0);
    // K1 = 1/z + ln(z/2) I1 − (1/2) Σ (H_k + H_{k+1} − 2γ) u_k
    let corr = &s.bh - &(&(&two * &gamma) * &s.b);
    let k1 = &(&(&Hp::one() / z) + &(&lz * &i1)) - &(&corr / &two);
    ModBesselHp { i0, i1, k0, k1 }
}
