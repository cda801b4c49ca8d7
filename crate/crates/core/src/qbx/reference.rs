//! Reference single-layer values for the Laplace kernel by Kress's spectral
//! product quadrature for the logarithmic singularity.

use super::Ellipse;
use crate::error::{Error, Result};
use crate::kernels::{KernelId, KernelSpec};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Agreement required between the `oversample` and `2·oversample` grids.
pub const CERTIFY_TOL: f64 = 1e-10;

/// Values at the `targets` nodes of the `n`-node grid on a grid of `m` nodes,
/// `m` a multiple of `n`.
fn kress(curve: &Ellipse, n: usize, m: usize, density: &(dyn Fn(f64) -> f64 + Sync), targets: &[usize]) -> Result<Vec<f64>> {
    if m % n != 0 || m % 2 != 0 {
        return Err(Error::Config("reference grid must be an even multiple of the target grid".into()));
    }
    let fine = curve.discretize(m)?;
    let half = m / 2;
    let hn = half as f64;
    // weights R(t_i − t_j) depend on the index difference only
    let rw: Vec<f64> = (0..m)
        .into_par_iter()
        .map(|d| {
            let th = 2.0 * PI * d as f64 / m as f64;
            let mut s = 0.0;
            for k in 1..half {
                s += (k as f64 * th).cos() / k as f64;
            }
            -2.0 * PI / hn * s - PI / (hn * hn) * (hn * th).cos()
        })
        .collect();
    let phi: Vec<f64> = (0..m).map(|j| density(fine.t[j]) * fine.speed[j]).collect();
    let stride = m / n;
    Ok(targets
        .par_iter()
        .map(|&ti| {
            let i = ti * stride;
            let x = fine.nodes[i];
            let t = fine.t[i];
            let mut acc = 0.0;
            for j in 0..m {
                let d = (i + m - j) % m;
                let smooth = if j == i {
                    (fine.speed[i] * fine.speed[i]).ln()
                } else {
                    let y = fine.nodes[j];
                    let dist2 = (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
                    let s = ((t - fine.t[j]) / 2.0).sin();
                    (dist2 / (4.0 * s * s)).ln()
                };
                acc += (rw[d] + PI / hn * smooth) * phi[j];
            }
            -acc / (4.0 * PI)
        })
        .collect())
}

/// Certified reference values of the Laplace 2D single layer at target
/// nodes of the `n`-node grid.
pub fn reference_potential(
    kernel: &KernelSpec,
    curve: &Ellipse,
    n: usize,
    density: &(dyn Fn(f64) -> f64 + Sync),
    targets: &[usize],
    oversample: usize,
) -> Result<Vec<Complex64>> {
    if kernel.id != KernelId::Laplace2d {
        return Err(Error::Capability("reference quadrature is implemented for laplace2d only".into()));
    }
    if oversample < 4 {
        return Err(Error::Config(format!("reference oversample must be at least 4, got {oversample}")));
    }
    let a = kress(curve, n, n * oversample, density, targets)?;
    let b = kress(curve, n, 2 * n * oversample, density, targets)?;
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let diff = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale;
    if diff > CERTIFY_TOL {
        return Err(Error::ReferenceNotConverged { diff });
    }
    Ok(b.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
}
