//! Direct derivative backend: the oracle's symbolic derivative tables
//! compiled to double precision for one kernel and wave number.

use crate::error::{Error, Result};
use crate::evaluator::FlopCounter;
use crate::kernels::oracle::{derivative_table, Special};
use crate::kernels::{special, KernelSpec};
use num_complex::Complex64;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
struct DirectTerm {
    x1: u32,
    r: i32,
    special: Special,
    coeff: Complex64,
}

/// `∂^0..∂^p_{x1} G` as explicit sums of `c · x1^a r^b S(kr)`.
#[derive(Clone, Debug)]
pub struct DirectTable {
    kernel: KernelSpec,
    orders: Vec<Vec<DirectTerm>>,
    max_x1: u32,
    min_r: i32,
    max_r: i32,
}

impl DirectTable {
    pub fn new(kernel: &KernelSpec, p: usize) -> Result<DirectTable> {
        let table = derivative_table(kernel.id, p)?;
        let k = kernel.k_value();
        let mut orders = Vec::with_capacity(p + 1);
        let (mut max_x1, mut min_r, mut max_r) = (0, 0, 0);
        for nf in table.iter().take(p + 1) {
            let pre = nf.prefactor.to_c64() * PI.powi(nf.pi_power);
            let terms: Vec<DirectTerm> = nf
                .terms
                .iter()
                .map(|(t, c)| {
                    max_x1 = max_x1.max(t.x1);
                    min_r = min_r.min(t.r);
                    max_r = max_r.max(t.r);
                    DirectTerm { x1: t.x1, r: t.r, special: t.special, coeff: c.to_c64() * pre * k.powi(t.k as i32) }
                })
                .collect();
            orders.push(terms);
        }
        Ok(DirectTable { kernel: kernel.clone(), orders, max_x1, min_r, max_r })
    }

    pub fn order(&self) -> usize {
        self.orders.len() - 1
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    /// Evaluate `∂^0..∂^p` at `x` (2 or 3 coordinates), counting operations.
    pub fn eval(&self, x: &[f64], p: usize, flops: &mut FlopCounter) -> Result<Vec<Complex64>> {
        if p > self.order() {
            return Err(Error::Capability(format!("direct table built to order {}, asked for {p}", self.order())));
        }
        self.kernel.check_point(x)?;
        let r2: f64 = x.iter().map(|v| v * v).sum();
        let r = r2.sqrt();
        flops.rmul(x.len() as u64);
        flops.radd(x.len() as u64 - 1 + 1); // sum of squares and the square root
        let k = self.kernel.k_value();
        let z = k * r;
        let svals = special_values(self.kernel.id, r, z, flops)?;
        let mut x1p = vec![1.0; self.max_x1 as usize + 1];
        for a in 1..x1p.len() {
            x1p[a] = x1p[a - 1] * x[0];
        }
        flops.rmul(self.max_x1.saturating_sub(1) as u64);
        let nr = (self.max_r - self.min_r) as usize + 1;
        let mut rp = vec![1.0; nr];
        let inv = 1.0 / r;
        flops.rmul(1);
        for b in self.min_r..=self.max_r {
            rp[(b - self.min_r) as usize] = if b >= 0 { r.powi(b) } else { inv.powi(-b) };
        }
        flops.rmul(nr.saturating_sub(2) as u64);
        let mut out = Vec::with_capacity(p + 1);
        for terms in self.orders.iter().take(p + 1) {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                let mag = x1p[t.x1 as usize] * rp[(t.r - self.min_r) as usize];
                let s = svals.get(t.special);
                acc += t.coeff * mag * s;
                flops.rmul(1);
                flops.cmul_real(1);
                if t.special != Special::One {
                    flops.cmul(1);
                }
                flops.cadd(1);
            }
            out.push(acc);
        }
        Ok(out)
    }
}

struct SpecialF64 {
    log_r: f64,
    h0: Complex64,
    h1: Complex64,
    k0: f64,
    k1: f64,
    exp_ikr: Complex64,
    exp_mkr: f64,
}

impl SpecialF64 {
    fn get(&self, s: Special) -> Complex64 {
        let c = |v: f64| Complex64::new(v, 0.0);
        match s {
            Special::One => c(1.0),
            Special::LogR => c(self.log_r),
            Special::H0 => self.h0,
            Special::H1 => self.h1,
            Special::K0 => c(self.k0),
            Special::K1 => c(self.k1),
            Special::ExpIkr => self.exp_ikr,
            Special::ExpMinusKr => c(self.exp_mkr),
        }
    }
}

fn special_values(id: crate::kernels::KernelId, r: f64, z: f64, flops: &mut FlopCounter) -> Result<SpecialF64> {
    use crate::kernels::KernelId::*;
    let zero = Complex64::new(0.0, 0.0);
    let mut sv = SpecialF64 { log_r: 0.0, h0: zero, h1: zero, k0: 0.0, k1: 0.0, exp_ikr: zero, exp_mkr: 0.0 };
    match id {
        Laplace2d | Biharmonic2d => {
            sv.log_r = r.ln();
            flops.special(1);
        }
        Helmholtz2d => {
            let [j0, y0, j1, y1] = special::bessel_j0y0j1y1(z)?;
            sv.h0 = Complex64::new(j0, y0);
            sv.h1 = Complex64::new(j1, y1);
            flops.special(1);
        }
        Yukawa2d => {
            let [k0, k1] = special::bessel_k0k1(z)?;
            sv.k0 = k0;
            sv.k1 = k1;
            flops.special(1);
        }
        Helmholtz3d => {
            sv.exp_ikr = Complex64::new(z.cos(), z.sin());
            flops.special(1);
        }
        Yukawa3d => {
            sv.exp_mkr = (-z).exp();
            flops.special(1);
        }
        _ => {}
    }
    Ok(sv)
}
