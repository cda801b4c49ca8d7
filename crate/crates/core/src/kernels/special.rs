//! Double-precision Bessel functions of orders 0 and 1 for real positive
//! arguments.
//!
//! `J` and `Y` use the ascending series for `z <= 8`, Miller's backward
//! recurrence with Neumann series for `8 < z <= 25` and the Hankel asymptotic
//! expansion beyond. `K` uses the ascending series for `z <= 2` and a
//! trapezoid rule on `∫ exp(-z cosh t) cosh(νt) dt` beyond.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `J0, Y0, J1, Y1` at `z > 0`.
pub fn bessel_j0y0j1y1(z: f64) -> Result<[f64; 4]> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {z}")));
    }
    Ok(if z <= 8.0 {
        series_jy(z)
    } else if z <= 25.0 {
        miller_jy(z)
    } else {
        hankel_jy(z)
    })
}

/// `K0, K1` at `z > 0`.
pub fn bessel_k0k1(z: f64) -> Result<[f64; 2]> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("Bessel argument must be positive and finite, got {z}")));
    }
    Ok(if z <= 2.0 { series_k(z) } else { integral_k(z) })
}

/// `H0^(1)` and its first three derivatives with respect to the argument.
pub fn hankel0_derivatives(z: f64) -> Result<[Complex64; 4]> {
    let [j0, y0, j1, y1] = bessel_j0y0j1y1(z)?;
    let h0 = Complex64::new(j0, y0);
    let h1 = -Complex64::new(j1, y1);
    let h2 = -h0 - h1 / z;
    let h3 = -h1 - h2 / z + h1 / (z * z);
    Ok([h0, h1, h2, h3])
}

/// `K0` and its first three derivatives with respect to the argument.
pub fn k0_derivatives(z: f64) -> Result<[f64; 4]> {
    let [k0, k1] = bessel_k0k1(z)?;
    let g1 = -k1;
    let g2 = k0 - g1 / z;
    let g3 = g1 - g2 / z + g1 / (z * z);
    Ok([k0, g1, g2, g3])
}

fn series_jy(z: f64) -> [f64; 4] {
    let q = z * z / 4.0;
    let (mut t, mut u) = (1.0, z / 2.0);
    let (mut j0, mut ah, mut j1, mut bh) = (1.0, 0.0, u, u);
    let mut h = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        t *= -q / (kf * kf);
        u *= -q / (kf * (kf + 1.0));
        h += 1.0 / kf;
        let h1 = h + 1.0 / (kf + 1.0);
        j0 += t;
        ah += h * t;
        j1 += u;
        bh += (h + h1) * u;
        if kf > z && (h + h1) * u.abs() < 1e-18 * bh.abs().max(1e-300) && h * t.abs() < 1e-18 * ah.abs().max(1e-300) {
            break;
        }
    }
    let lz = (z / 2.0).ln();
    let y0 = 2.0 / PI * ((lz + EULER_GAMMA) * j0 - ah);
    let y1 = 2.0 / PI * lz * j1 - 2.0 / (PI * z) - (bh - 2.0 * EULER_GAMMA * j1) / PI;
    [j0, y0, j1, y1]
}

fn miller_jy(z: f64) -> [f64; 4] {
    let start = ((z + 12.0 * z.cbrt() + 40.0) as usize) | 1;
    let start = start + 1; // even
    let mut vals = vec![0.0f64; start + 2];
    vals[start] = 1e-300;
    for n in (1..=start).rev() {
        vals[n - 1] = 2.0 * n as f64 / z * vals[n] - vals[n + 1];
        if vals[n - 1].abs() > 1e250 {
            for v in vals[n - 1..].iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    let mut norm = vals[0];
    for k in (2..=start).step_by(2) {
        norm += 2.0 * vals[k];
    }
    for v in vals.iter_mut() {
        *v /= norm;
    }
    let (j0, j1) = (vals[0], vals[1]);
    let lz = (z / 2.0).ln() + EULER_GAMMA;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    for k in 1..=start / 2 {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let kf = k as f64;
        s0 += sign * vals[2 * k] / kf;
        s1 += sign * (vals[2 * k - 1] - vals[2 * k + 1]) / kf;
    }
    let y0 = 2.0 / PI * lz * j0 - 4.0 / PI * s0;
    let y1 = -2.0 / PI * j0 / z + 2.0 / PI * lz * j1 + 2.0 / PI * s1;
    [j0, y0, j1, y1]
}

/// Hankel's `P` and `Q` for order `nu`.
fn hankel_pq(nu: f64, z: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        term *= (mu - (2.0 * kf - 1.0).powi(2)) / (8.0 * kf * z);
        if term.abs() >= last || term == 0.0 {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

fn hankel_jy(z: f64) -> [f64; 4] {
    let amp = (2.0 / (PI * z)).sqrt();
    let mut out = [0.0; 4];
    for (slot, nu) in [(0usize, 0.0f64), (2, 1.0)] {
        let (p, q) = hankel_pq(nu, z);
        let chi = z - (nu / 2.0 + 0.25) * PI;
        let (s, c) = chi.sin_cos();
        out[slot] = amp * (p * c - q * s);
        out[slot + 1] = amp * (p * s + q * c);
    }
    out
}

fn series_k(z: f64) -> [f64; 2] {
    let q = z * z / 4.0;
    let (mut t, mut u) = (1.0, z / 2.0);
    let (mut i0, mut ah, mut i1, mut bh) = (1.0, 0.0, u, u);
    let mut h = 0.0;
    for k in 1..200 {
        let kf = k as f64;
        t *= q / (kf * kf);
        u *= q / (kf * (kf + 1.0));
        h += 1.0 / kf;
        let h1 = h + 1.0 / (kf + 1.0);
        i0 += t;
        ah += h * t;
        i1 += u;
        bh += (h + h1) * u;
        if (h + h1) * u < 1e-18 * bh && h * t < 1e-18 * ah {
            break;
        }
    }
    let lz = (z / 2.0).ln();
    let k0 = ah - (lz + EULER_GAMMA) * i0;
    let k1 = 1.0 / z + lz * i1 - 0.5 * (bh - 2.0 * EULER_GAMMA * i1);
    [k0, k1]
}

fn integral_k(z: f64) -> [f64; 2] {
    // The strip of analyticity narrows like 1/sqrt(z), so the step shrinks too.
    let h = (2.0 * PI / (80.0 * z).sqrt()).min(0.2);
    let (mut s0, mut s1) = (0.5, 0.5);
    for j in 1..4000 {
        let t = j as f64 * h;
        let e = (-z * (t.cosh() - 1.0)).exp();
        s0 += e;
        s1 += e * t.cosh();
        if e < 1e-18 {
            break;
        }
    }
    let scale = h * (-z).exp();
    [s0 * scale, s1 * scale]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        let [j0, y0, j1, y1] = bessel_j0y0j1y1(1.0).unwrap();
        assert!((j0 - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((y0 - 0.088_256_964_215_676_96).abs() < 1e-15);
        assert!((j1 - 0.440_050_585_744_933_5).abs() < 1e-15);
        assert!((y1 + 0.781_212_821_300_288_7).abs() < 1e-15);
        let [k0, k1] = bessel_k0k1(1.0).unwrap();
        assert!((k0 - 0.421_024_438_240_708_3).abs() < 1e-15);
        assert!((k1 - 0.601_907_230_197_234_6).abs() < 1e-15);
    }
}
