use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on [-1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; n];
    let mut w = alloc::vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    for i in 0..m {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..30 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d.is_finite() {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule over `panels` equal panels of [a, b].
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut sum = 0.0;
    for k in 0..panels {
        let lo = a + h * k as f64;
        let mut s = 0.0;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(lo + 0.5 * h * (xi + 1.0));
        }
        sum += 0.5 * h * s;
    }
    sum
}

/// Composite Gauss-Legendre rule with panels uniform in ln p over [a, b], a > 0.
pub fn integrate_log<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    integrate(
        |t| {
            let p = t.exp();
            p * f(p)
        },
        a.ln(),
        b.ln(),
        panels,
        order,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridScheme {
    LogUniform,
    GaussLegendreComposite,
}

/// Quadrature on the momentum half-line: `sum_i weights[i] f(nodes[i])` approximates the
/// integral of f over [p_min, p_max].
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub p_min: f64,
    pub p_max: f64,
    pub scheme: GridScheme,
}

pub const DEFAULT_GRID_N: usize = 512;
pub const DEFAULT_P_MIN: f64 = 1e-4;
pub const DEFAULT_P_MAX: f64 = 1e4;

impl RadialGrid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sqrt(w_i p_i^2)`, the similarity factors of the symmetrized representation.
    pub fn measure_roots(&self) -> Vec<f64> {
        self.nodes.iter().zip(&self.weights).map(|(p, w)| (w * p * p).sqrt()).collect()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&p, &w)| w * f(p)).sum()
    }

    /// Same grid with both cutoffs (and every node) multiplied by `c`.
    pub fn scaled(&self, c: f64) -> RadialGrid {
        RadialGrid {
            nodes: self.nodes.iter().map(|p| p * c).collect(),
            weights: self.weights.iter().map(|w| w * c).collect(),
            p_min: self.p_min * c,
            p_max: self.p_max * c,
            scheme: self.scheme,
        }
    }
}

pub fn default_grid() -> RadialGrid {
    build_grid(GridScheme::GaussLegendreComposite, DEFAULT_GRID_N, DEFAULT_P_MIN, DEFAULT_P_MAX)
        .expect("default grid parameters are valid")
}

/// Composite grid with a fixed number of nodes per decade (rounded to whole 16-point panels).
pub fn grid_per_decade(nodes_per_decade: usize, p_min: f64, p_max: f64) -> Result<RadialGrid> {
    let decades = (p_max / p_min).log10();
    let panels = ((nodes_per_decade as f64 * decades / 16.0).round() as usize).max(1);
    build_grid(GridScheme::GaussLegendreComposite, panels * 16, p_min, p_max)
}

pub fn build_grid(scheme: GridScheme, n: usize, p_min: f64, p_max: f64) -> Result<RadialGrid> {
    if n < 8 {
        return Err(Error::Parameter("grid needs at least 8 nodes"));
    }
    if !(p_min > 0.0 && p_max > p_min && p_max.is_finite()) {
        return Err(Error::Parameter("grid bounds must satisfy 0 < p_min < p_max"));
    }
    let (nodes, weights) = match scheme {
        GridScheme::LogUniform => {
            let h = (p_max / p_min).ln() / n as f64;
            let nodes: Vec<f64> = (0..n).map(|i| p_min * (h * i as f64).exp()).collect();
            let mut weights: Vec<f64> = nodes.iter().map(|p| p * h).collect();
            weights[0] *= 0.5;
            weights[n - 1] *= 0.5;
            (nodes, weights)
        }
        GridScheme::GaussLegendreComposite => {
            let order = if n % 16 == 0 {
                16
            } else if n % 8 == 0 {
                8
            } else {
                return Err(Error::Parameter("composite grid size must be a multiple of 8"));
            };
            let panels = n / order;
            let (x, w) = gauss_legendre(order);
            let (a, b) = (p_min.ln(), p_max.ln());
            let h = (b - a) / panels as f64;
            let mut nodes = Vec::with_capacity(n);
            let mut weights = Vec::with_capacity(n);
            for k in 0..panels {
                let lo = a + h * k as f64;
                for (xi, wi) in x.iter().zip(&w) {
                    let p = (lo + 0.5 * h * (xi + 1.0)).exp();
                    nodes.push(p);
                    weights.push(0.5 * h * wi * p);
                }
            }
            (nodes, weights)
        }
    };
    Ok(RadialGrid { nodes, weights, p_min, p_max, scheme })
}
