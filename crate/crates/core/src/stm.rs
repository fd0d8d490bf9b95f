//! Three identical bosons at a point interaction: the s-wave STM equation
//! `(alpha + 2 pi^2 sqrt(3/4 p^2 + E)) xi(p) - 2 int xi(q) / (p^2 + q^2 + p.q + E) dq = 0`.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{Charge, MassParams};
use crate::linalg::{sorted_eigen, sorted_eigenvalues};
use crate::quad::RadialGrid;
use crate::sector::{add_diagonal, diagonal_from, kernel_matrix, MatrixKind, SectorMatrix};

/// Exchange coefficient of the bosonic STM kernel.
pub const EXCHANGE: f64 = -2.0;

/// Symmetrized `M(E)`. `exchange` scales the kernel term; the physical value is [`EXCHANGE`].
pub fn build_stm_operator_with(e: f64, alpha: f64, grid: &RadialGrid, exchange: f64) -> Result<SectorMatrix> {
    if !(e > 0.0 && e.is_finite()) {
        return Err(Error::Parameter("energy must be positive"));
    }
    let mass = MassParams::new(1.0)?;
    let mut m = kernel_matrix(grid, 0, mass.mu, e, 1) * exchange;
    add_diagonal(&mut m, &diagonal_from(grid, |p| alpha + 2.0 * PI * PI * (0.75 * p * p + e).sqrt()));
    Ok(SectorMatrix { kind: MatrixKind::Stm, ell: 0, lambda: e, mass, grid: grid.clone(), entries: m })
}

pub fn build_stm_operator(e: f64, alpha: f64, grid: &RadialGrid) -> Result<SectorMatrix> {
    build_stm_operator_with(e, alpha, grid, EXCHANGE)
}

fn stm_eigenvalues(e: f64, alpha: f64, grid: &RadialGrid) -> Result<Vec<f64>> {
    Ok(sorted_eigenvalues(&build_stm_operator(e, alpha, grid)?.entries))
}

/// Smallest singular value of the symmetrized `M(E)`.
pub fn stm_smallest_singular(e: f64, alpha: f64, grid: &RadialGrid) -> Result<f64> {
    Ok(stm_eigenvalues(e, alpha, grid)?.iter().fold(f64::INFINITY, |m, v| m.min(v.abs())))
}

/// Number of negative eigenvalues of `M(E)`: levels deeper than `-E`.
pub fn stm_level_count(e: f64, alpha: f64, grid: &RadialGrid) -> Result<usize> {
    Ok(stm_eigenvalues(e, alpha, grid)?.iter().filter(|&&v| v < 0.0).count())
}

#[derive(Debug, Clone, PartialEq)]
pub struct StmLevels {
    pub alpha: f64,
    /// Binding energies `E_n` (bound states at `-E_n`), shallowest first.
    pub energies: Vec<f64>,
    pub ratios: Vec<f64>,
    pub s0_from_ratios: Vec<f64>,
    /// Grid cutoff `p_max`.
    pub cutoff: f64,
    /// Trusted window: `(10 p_min)^2 <= E <= (0.01 p_max)^2`.
    pub ir_floor: f64,
    pub uv_ceiling: f64,
    /// Levels deeper than the UV ceiling (cutoff-contaminated, not located).
    pub contaminated: usize,
    /// Levels shallower than the IR floor (not located).
    pub below_floor: usize,
    /// Fewer trusted levels than requested.
    pub partial: bool,
    /// Eigenvalue index of each located level in the sorted spectrum of `M(E_n)`.
    pub eigen_index: Vec<usize>,
}

pub const SCAN_POINTS_PER_DECADE: usize = 6;
const LEVEL_REL_TOL: f64 = 1e-10;

/// Shallowest `n_levels` trusted roots of `det M(E) = 0`.
///
/// The `j`-th smallest eigenvalue of `M(E)` is continuous and increasing in `E` (`dM/dE` is
/// positive semidefinite), so each level is the zero of one eigenvalue branch; branches are
/// bracketed on a geometric scan and refined with Brent's method in `ln E`.
pub fn stm_spectrum(alpha: f64, grid: &RadialGrid, n_levels: usize) -> Result<StmLevels> {
    if n_levels == 0 {
        return Err(Error::Parameter("at least one level must be requested"));
    }
    let floor = (10.0 * grid.p_min).powi(2);
    let ceiling = (0.01 * grid.p_max).powi(2);
    if !(ceiling > floor) {
        return Err(Error::Parameter("grid too narrow for a trusted window"));
    }
    let decades = (ceiling / floor).log10();
    let steps = ((decades * SCAN_POINTS_PER_DECADE as f64).ceil() as usize).max(2);
    let scan: Vec<f64> = (0..=steps).map(|k| floor * (ceiling / floor).powf(k as f64 / steps as f64)).collect();
    let spectra: Vec<Vec<f64>> = scan.iter().map(|&e| stm_eigenvalues(e, alpha, grid)).collect::<Result<_>>()?;
    let count = |s: &Vec<f64>| s.iter().filter(|&&v| v < 0.0).count();
    let n_floor = count(&spectra[0]);
    let n_ceiling = count(&spectra[steps]);
    let first = (n_ceiling + 1).max((n_floor + 1).saturating_sub(n_levels));
    let mut found: Vec<(f64, usize)> = Vec::new();
    for j in (first..=n_floor).rev() {
        let idx = j - 1;
        let k = (0..steps)
            .find(|&k| spectra[k][idx] < 0.0 && spectra[k + 1][idx] >= 0.0)
            .ok_or(Error::Numerical("eigenvalue branch has no bracket on the scan"))?;
        let f = |t: f64| -> f64 {
            stm_eigenvalues(t.exp(), alpha, grid).map(|v| v[idx]).unwrap_or(f64::NAN)
        };
        let t = brent(f, scan[k].ln(), scan[k + 1].ln(), spectra[k][idx], spectra[k + 1][idx], LEVEL_REL_TOL)?;
        found.push((t.exp(), idx));
    }
    let energies: Vec<f64> = found.iter().map(|f| f.0).collect();
    let ratios: Vec<f64> = energies.windows(2).map(|w| w[1] / w[0]).collect();
    let s0_from_ratios = ratios.iter().map(|r| 2.0 * PI / r.ln()).collect();
    Ok(StmLevels {
        alpha,
        partial: energies.len() < n_levels,
        eigen_index: found.iter().map(|f| f.1).collect(),
        energies,
        ratios,
        s0_from_ratios,
        cutoff: grid.p_max,
        ir_floor: floor,
        uv_ceiling: ceiling,
        contaminated: n_ceiling,
        below_floor: stm_level_count(1e-3 * floor, alpha, grid)?.saturating_sub(n_floor),
    })
}

/// Brent's method on a bracket with `fa < 0 <= fb`; `tol` is absolute in the argument.
fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, fa: f64, fb: f64, tol: f64) -> Result<f64> {
    let (mut a, mut b, mut fa, mut fb) = (a, b, fa, fb);
    if fa * fb > 0.0 {
        return Err(Error::NotBracketed);
    }
    if fa.abs() < fb.abs() {
        core::mem::swap(&mut a, &mut b);
        core::mem::swap(&mut fa, &mut fb);
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() < tol {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let between = if lo < b { s > lo && s < b } else { s > b && s < lo };
        if !between
            || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
            || (mflag && (b - c).abs() < tol)
            || (!mflag && (c - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            mflag = true;
        } else {
            mflag = false;
        }
        let fs = f(s);
        if !fs.is_finite() {
            return Err(Error::Numerical("root function not finite"));
        }
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            core::mem::swap(&mut a, &mut b);
            core::mem::swap(&mut fa, &mut fb);
        }
    }
    Err(Error::Numerical("Brent iteration did not converge"))
}

/// Null vector of `M(E)` for the located level with eigenvalue index `index`, as a charge.
pub fn stm_null_vector<'g>(e: f64, alpha: f64, grid: &'g RadialGrid, index: usize) -> Result<Charge<'g>> {
    let m = build_stm_operator(e, alpha, grid)?;
    let (_, vecs) = sorted_eigen(&m.entries);
    let x: Vec<Complex64> = vecs.column(index).iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(Charge::from_symmetric(0, grid, &x))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DanilovFit {
    /// Amplitude of `sin(s0 ln p)`.
    pub a: f64,
    /// Amplitude of `cos(s0 ln p)`.
    pub b: f64,
    pub s0: f64,
    /// `A/B`; `None` when `B` vanishes.
    pub beta: Option<f64>,
    /// `||fit - data|| / ||data||` over the window.
    pub residual: f64,
    pub window: (f64, f64),
    pub points: usize,
}

pub const DANILOV_MAX_RESIDUAL: f64 = 0.05;
const S0_SCAN: (f64, f64, f64) = (0.2, 4.0, 1e-3);

/// Least squares of `p^2 xi(p) ~ A sin(s0 ln p) + B cos(s0 ln p)` over the window nodes:
/// linear in `(A, B)` for fixed `s0`, with `s0` from a scan refined by golden section.
pub fn danilov_fit(xi: &Charge<'_>, window: (f64, f64)) -> Result<DanilovFit> {
    let g = xi.grid;
    let (lo, hi) = window;
    if !(lo >= 10.0 * g.p_min * (1.0 - 1e-12) && hi <= g.p_max / 10.0 * (1.0 + 1e-12) && lo < hi) {
        return Err(Error::Parameter("window must lie inside [10 p_min, p_max / 10]"));
    }
    let pts: Vec<(f64, f64)> = g
        .nodes
        .iter()
        .zip(&xi.values)
        .filter(|(&p, _)| p >= lo && p <= hi)
        .map(|(&p, v)| (p.ln(), p * p * v.re))
        .collect();
    if pts.len() < 8 {
        return Err(Error::Parameter("window holds fewer than 8 nodes"));
    }
    let norm = pts.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::Parameter("charge vanishes on the window"));
    }
    let solve = |s0: f64| -> (f64, f64, f64) {
        let (mut ss, mut sc, mut cc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(t, y) in &pts {
            let (s, c) = (s0 * t).sin_cos();
            ss += s * s;
            sc += s * c;
            cc += c * c;
            ys += y * s;
            yc += y * c;
        }
        let det = ss * cc - sc * sc;
        let a = (ys * cc - yc * sc) / det;
        let b = (yc * ss - ys * sc) / det;
        let r2: f64 = pts
            .iter()
            .map(|&(t, y)| {
                let (s, c) = (s0 * t).sin_cos();
                let e = a * s + b * c - y;
                e * e
            })
            .sum();
        (a, b, r2.sqrt() / norm)
    };
    let (start, stop, step) = S0_SCAN;
    let n = ((stop - start) / step).round() as usize;
    let mut best = (start, f64::INFINITY);
    for k in 0..=n {
        let s0 = start + step * k as f64;
        let r = solve(s0).2;
        if r < best.1 {
            best = (s0, r);
        }
    }
    let (mut x0, mut x1) = ((best.0 - step).max(start), (best.0 + step).min(stop));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = x1 - phi * (x1 - x0);
    let mut d = x0 + phi * (x1 - x0);
    let (mut fc, mut fd) = (solve(c).2, solve(d).2);
    while x1 - x0 > 1e-13 {
        if fc < fd {
            x1 = d;
            d = c;
            fd = fc;
            c = x1 - phi * (x1 - x0);
            fc = solve(c).2;
        } else {
            x0 = c;
            c = d;
            fc = fd;
            d = x0 + phi * (x1 - x0);
            fd = solve(d).2;
        }
    }
    let s0 = 0.5 * (x0 + x1);
    let (a, b, residual) = solve(s0);
    if residual > DANILOV_MAX_RESIDUAL {
        return Err(Error::FitFailure { residual });
    }
    let beta = (b.abs() > 1e-12 * a.abs()).then(|| a / b);
    Ok(DanilovFit { a, b, s0, beta, residual, window, points: pts.len() })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThomasRatioCheck {
    pub s0_estimate: f64,
    /// Largest relative difference between pairwise estimates; `None` for a single ratio.
    pub max_pairwise_deviation: Option<f64>,
}

pub fn thomas_ratio_check(levels: &StmLevels) -> Result<ThomasRatioCheck> {
    let s = &levels.s0_from_ratios;
    if s.is_empty() {
        return Err(Error::Parameter("need at least two levels"));
    }
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let dev = (s.len() >= 2).then(|| {
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        (hi - lo) / mean
    });
    Ok(ThomasRatioCheck { s0_estimate: mean, max_pairwise_deviation: dev })
}

/// Levels from bare energies (ratio statistics only).
pub fn levels_from_energies(alpha: f64, energies: Vec<f64>, cutoff: f64) -> StmLevels {
    let ratios: Vec<f64> = energies.windows(2).map(|w| w[1] / w[0]).collect();
    StmLevels {
        alpha,
        s0_from_ratios: ratios.iter().map(|r| 2.0 * PI / r.ln()).collect(),
        ratios,
        eigen_index: Vec::new(),
        energies,
        cutoff,
        ir_floor: 0.0,
        uv_ceiling: f64::INFINITY,
        contaminated: 0,
        below_floor: 0,
        partial: false,
    }
}
