use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{integrate, RadialGrid};
use crate::special::sector_integral;

/// Mass parameters of the 2+1 system, fermion mass 1 and third-particle mass `m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassParams {
    pub m: f64,
    pub mu: f64,
    pub nu: f64,
}

impl MassParams {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(Error::Parameter("mass must be positive and finite"));
        }
        let mu = 2.0 / (m + 1.0);
        Ok(MassParams { m, mu, nu: 1.0 - mu * mu / 4.0 })
    }
}

pub fn mass_params(m: f64) -> Result<MassParams> {
    MassParams::new(m)
}

/// `2 pi int P_l(y) (r^2 + rp^2 + mu r rp y + lambda)^{-power} dy`, without the `rp^2`
/// measure factor. Symmetric in `(r, rp)`.
pub(crate) fn kernel_sym(ell: usize, mu: f64, lambda: f64, r: f64, rp: f64, power: u32) -> f64 {
    let a = r * r + rp * rp + lambda;
    let b = mu * r * rp;
    let d = r - rp;
    let amb = d * d + (2.0 - mu) * r * rp + lambda;
    if ell == 0 && power == 1 && b > 0.0 {
        return 2.0 * PI * (2.0 * b / amb).ln_1p() / b;
    }
    2.0 * PI * sector_integral(ell, a, b, amb, power)
}

/// Sector kernel `2 pi int_{-1}^{1} P_l(y) rp^2 / (r^2 + rp^2 + mu r rp y + lambda)^power dy`.
pub fn angular_kernel(ell: usize, mu: f64, lambda: f64, r: f64, rp: f64, power: u32) -> Result<f64> {
    if !(r > 0.0 && rp > 0.0) {
        return Err(Error::Domain("momenta must be positive"));
    }
    if !(lambda > 0.0) {
        return Err(Error::Domain("lambda must be positive"));
    }
    if !(mu > 0.0 && mu < 2.0) {
        return Err(Error::Domain("mu must lie in (0, 2)"));
    }
    if power != 1 && power != 2 {
        return Err(Error::Parameter("power must be 1 or 2"));
    }
    Ok(rp * rp * kernel_sym(ell, mu, lambda, r, rp, power))
}

/// Angle-averaged integrand of the ball integral: `4 pi q^2 <1/(q^2 + c + eps q y)>_y`.
fn ball_radial(q: f64, c: f64, eps: f64) -> f64 {
    let qq = q * q + c;
    let x = eps * q;
    if x == 0.0 {
        return 4.0 * PI * q * q / qq;
    }
    4.0 * PI * q * q * (2.0 * x / (qq - x)).ln_1p() / (2.0 * x)
}

/// `int_{|p2| < R} dp2 / (p1^2 + p2^2 + mu p1.p2 + lambda)`.
pub fn truncated_ball_integral(p1: f64, mu: f64, nu: f64, lambda: f64, r: f64) -> f64 {
    let c = p1 * p1 + lambda;
    let kappa = c.sqrt();
    let eps = mu * p1;
    if r < 0.25 * kappa {
        // All closed forms cancel to a relative (R/kappa)^2 here.
        return integrate(|q| ball_radial(q, c, eps), 0.0, r, 2, 16);
    }
    if eps * r < 1e-6 * c {
        let th = (r / kappa).atan();
        let s4 = 3.0 * th / 8.0 - (2.0 * th).sin() / 4.0 + (4.0 * th).sin() / 32.0;
        let s6c2 = 5.0 * th / 128.0 - (2.0 * th).sin() / 64.0 - (4.0 * th).sin() / 128.0
            + (6.0 * th).sin() / 192.0
            - (8.0 * th).sin() / 1024.0;
        let e2 = eps * eps;
        return 4.0 * PI * (r - kappa * th)
            + 4.0 * PI / 3.0 * e2 * s4 / kappa
            + 4.0 * PI / 5.0 * e2 * e2 * s6c2 / (kappa * kappa * kappa);
    }
    let s = (nu * p1 * p1 + lambda).sqrt();
    let den = r * r + p1 * p1 - eps * r + lambda;
    let l = (2.0 * eps * r / den).ln_1p();
    2.0 * PI * r * (1.0 + r * l / (2.0 * eps))
        + 2.0 * PI * s * (((eps - 2.0 * r) / (2.0 * s)).atan() - ((eps + 2.0 * r) / (2.0 * s)).atan())
        + PI * ((4.0 * nu - 2.0) * p1 * p1 + 2.0 * lambda) * l / (2.0 * eps)
}

/// `int_{R^3} dp2 / (p1^2 + p2^2 + mu p1.p2 + lambda)^2 = pi^2 / sqrt(nu p1^2 + lambda)`.
pub fn squared_denominator_integral(p1: f64, _mu: f64, nu: f64, lambda: f64) -> f64 {
    PI * PI / (nu * p1 * p1 + lambda).sqrt()
}

/// `int_{|p2| < R} dp2 / (p1^2 + p2^2 + mu p1.p2 + lambda)^2`.
pub fn truncated_squared_integral(p1: f64, mu: f64, nu: f64, lambda: f64, r: f64) -> f64 {
    let c = p1 * p1 + lambda;
    let kappa = c.sqrt();
    let e2 = mu * mu * p1 * p1;
    let radial = |q: f64| {
        let qq = q * q + c;
        4.0 * PI * q * q / (qq * qq - e2 * q * q)
    };
    if r <= 4.0 * kappa {
        return integrate(radial, 0.0, r, 8, 16);
    }
    // Tail in u = 1/q.
    let tail = integrate(
        |u| {
            let a = 1.0 + c * u * u;
            4.0 * PI / (a * a - e2 * u * u)
        },
        0.0,
        1.0 / r,
        4,
        16,
    );
    squared_denominator_integral(p1, mu, nu, lambda) - tail
}

/// Radial samples of a charge in one angular sector.
#[derive(Debug, Clone, PartialEq)]
pub struct Charge<'g> {
    pub ell: usize,
    pub values: Vec<Complex64>,
    pub grid: &'g RadialGrid,
}

impl<'g> Charge<'g> {
    pub fn new(ell: usize, grid: &'g RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Parameter("charge length differs from grid size"));
        }
        Ok(Charge { ell, values, grid })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(ell: usize, grid: &'g RadialGrid, f: F) -> Self {
        Charge { ell, values: grid.nodes.iter().map(|&p| f(p)).collect(), grid }
    }

    pub fn zero(ell: usize, grid: &'g RadialGrid) -> Self {
        Charge { ell, values: alloc::vec![Complex64::new(0.0, 0.0); grid.len()], grid }
    }

    /// Coordinates in the symmetrized representation, `sqrt(w p^2) xi`.
    pub fn to_symmetric(&self) -> Vec<Complex64> {
        self.grid.measure_roots().iter().zip(&self.values).map(|(l, v)| v * l).collect()
    }

    pub fn from_symmetric(ell: usize, grid: &'g RadialGrid, x: &[Complex64]) -> Self {
        let values = grid.measure_roots().iter().zip(x).map(|(l, v)| v / l).collect();
        Charge { ell, values, grid }
    }

    /// Value at an arbitrary momentum: exact at nodes, linear in `ln p` between them,
    /// constant beyond the outermost nodes.
    pub fn value_at(&self, p: f64) -> Complex64 {
        let nodes = &self.grid.nodes;
        let n = nodes.len();
        if p <= nodes[0] {
            return self.values[0];
        }
        if p >= nodes[n - 1] {
            return self.values[n - 1];
        }
        let k = nodes.partition_point(|&x| x <= p);
        let (a, b) = (nodes[k - 1], nodes[k]);
        if p == a {
            return self.values[k - 1];
        }
        let t = (p / a).ln() / (b / a).ln();
        self.values[k - 1] * (1.0 - t) + self.values[k] * t
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Charge { ell: self.ell, values: self.values.iter().map(|v| v * c).collect(), grid: self.grid }
    }
}

/// Per-sector radial norm `(sum_i w_i p_i^2 (1 + p_i^2)^s |xi_i|^2)^{1/2}`.
pub fn sobolev_norm(xi: &Charge<'_>, s: f64) -> f64 {
    let g = xi.grid;
    g.nodes
        .iter()
        .zip(&g.weights)
        .zip(&xi.values)
        .map(|((&p, &w), v)| w * p * p * (1.0 + p * p).powf(s) * v.norm_sqr())
        .sum::<f64>()
        .sqrt()
}
