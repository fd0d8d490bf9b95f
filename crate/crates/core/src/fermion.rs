//! Sector operators of two identical fermions interacting with a third particle of mass `m`:
//!
//! `T xi(p) = 2 pi^2 sqrt(nu p^2 + lambda) xi(p) + int xi(q) / (p^2 + q^2 + mu p.q + lambda) dq`,
//! `W xi(p) = 2 pi^2 / sqrt(nu p^2 + lambda) xi(p) - 2 int xi(q) / (p^2 + q^2 + mu p.q + lambda)^2 dq`,
//!
//! reduced to angular sector `l`. `Q` is the integral part of `T`. All matrices live in the
//! symmetrized representation `x_i = sqrt(w_i p_i^2) xi(p_i)`, where the Euclidean inner product
//! is the `L^2(R^3)` inner product of the sector.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::kernels::{
    angular_kernel, kernel_sym, squared_denominator_integral, truncated_ball_integral, truncated_squared_integral,
    Charge, MassParams,
};
use crate::linalg::{apply_complex, cholesky, dot_complex, generalized_eigenvalues, norm_complex, sorted_eigenvalues, spectral_norm, Matrix};
use crate::quad::RadialGrid;
use crate::sector::{add_diagonal, diagonal_from, kernel_matrix, MatrixKind, SectorMatrix};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter("lambda must be positive"))
    }
}

fn sector(kind: MatrixKind, ell: usize, lambda: f64, mass: MassParams, grid: &RadialGrid, entries: Matrix) -> SectorMatrix {
    SectorMatrix { kind, ell, lambda, mass, grid: grid.clone(), entries }
}

pub fn build_q(ell: usize, lambda: f64, mass: MassParams, grid: &RadialGrid) -> Result<SectorMatrix> {
    check_lambda(lambda)?;
    let q = kernel_matrix(grid, ell, mass.mu, lambda, 1);
    Ok(sector(MatrixKind::Q, ell, lambda, mass, grid, q))
}

pub fn build_t(ell: usize, lambda: f64, mass: MassParams, grid: &RadialGrid) -> Result<SectorMatrix> {
    let mut t = build_q(ell, lambda, mass, grid)?;
    add_diagonal(&mut t.entries, &diagonal_from(grid, |p| 2.0 * PI * PI * (mass.nu * p * p + lambda).sqrt()));
    t.kind = MatrixKind::T;
    Ok(t)
}

/// Errors with [`Error::NotPositiveDefinite`] if the Cholesky factorization fails.
pub fn build_w(ell: usize, lambda: f64, mass: MassParams, grid: &RadialGrid) -> Result<SectorMatrix> {
    check_lambda(lambda)?;
    let mut w = kernel_matrix(grid, ell, mass.mu, lambda, 2) * -2.0;
    add_diagonal(&mut w, &diagonal_from(grid, |p| 2.0 * PI * PI / (mass.nu * p * p + lambda).sqrt()));
    cholesky(&w)?;
    Ok(sector(MatrixKind::W, ell, lambda, mass, grid, w))
}

/// Symmetric operator used in place of `T` on the `l = 0` sector.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum SzeroSpec {
    #[default]
    Zero,
    /// Multiplication by `amplitude * exp(-1 / (1 - t^2))`, `t = ln(p / center) / width`,
    /// supported on `|t| < 1`.
    Multiplication { amplitude: f64, center: f64, width: f64 },
}

impl SzeroSpec {
    pub fn profile(&self, p: f64) -> f64 {
        match *self {
            SzeroSpec::Zero => 0.0,
            SzeroSpec::Multiplication { amplitude, center, width } => {
                let t = (p / center).ln() / width;
                if t.abs() < 1.0 {
                    amplitude * (-1.0 / (1.0 - t * t)).exp()
                } else {
                    0.0
                }
            }
        }
    }
}

pub fn build_s0(kind: SzeroSpec, lambda: f64, mass: MassParams, grid: &RadialGrid) -> Result<SectorMatrix> {
    if let SzeroSpec::Multiplication { amplitude, center, width } = kind {
        if !(amplitude.is_finite() && center > 0.0 && width > 0.0) {
            return Err(Error::Parameter("bump needs finite amplitude, positive center and width"));
        }
    }
    let mut m = Matrix::zeros(grid.len(), grid.len());
    add_diagonal(&mut m, &diagonal_from(grid, |p| kind.profile(p)));
    Ok(sector(MatrixKind::S0, 0, lambda, mass, grid, m))
}

/// `A = 2 W^{-1} (T + alpha)` for `l >= 1`, `2 W^{-1} (S0 + alpha)` for `l = 0`.
pub fn build_a(ell: usize, lambda: f64, mass: MassParams, alpha: f64, grid: &RadialGrid, s0: SzeroSpec) -> Result<SectorMatrix> {
    let w = build_w(ell, lambda, mass, grid)?;
    let base = if ell == 0 { build_s0(s0, lambda, mass, grid)? } else { build_t(ell, lambda, mass, grid)? };
    let mut rhs = base.entries * 2.0;
    add_diagonal(&mut rhs, &alloc::vec![2.0 * alpha; grid.len()]);
    let a = cholesky(&w.entries)?.solve(&rhs);
    Ok(sector(MatrixKind::A, ell, lambda, mass, grid, a))
}

fn same_sector(a: &Charge<'_>, b: &Charge<'_>) -> Result<()> {
    if a.ell != b.ell {
        return Err(Error::SectorMismatch { left: a.ell, right: b.ell });
    }
    if a.values.len() != b.values.len() {
        return Err(Error::Parameter("charges live on different grids"));
    }
    Ok(())
}

/// `<u_xi, u_eta>` from the reduced double integral
/// `2 int int [conj(xi(p)) eta(p) - conj(xi(p)) eta(q)] / (p^2 + q^2 + mu p.q + lambda)^2 dp dq`,
/// evaluated node by node without assembling `W`.
pub fn pair_norm_u(xi: &Charge<'_>, eta: &Charge<'_>, lambda: f64, mass: MassParams) -> Result<Complex64> {
    same_sector(xi, eta)?;
    check_lambda(lambda)?;
    let g = xi.grid;
    let (p, w) = (&g.nodes, &g.weights);
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..g.len() {
        let xc = xi.values[i].conj();
        if xc == Complex64::new(0.0, 0.0) {
            continue;
        }
        let diag = 2.0 * squared_denominator_integral(p[i], mass.mu, mass.nu, lambda) * eta.values[i];
        let mut cross = Complex64::new(0.0, 0.0);
        for j in 0..g.len() {
            cross += eta.values[j] * w[j] * angular_kernel(xi.ell, mass.mu, lambda, p[i], p[j], 2)?;
        }
        total += xc * w[i] * p[i] * p[i] * (diag - 2.0 * cross);
    }
    Ok(total)
}

/// `<x, M y>` for charges in the symmetrized representation.
pub fn sector_form(m: &SectorMatrix, xi: &Charge<'_>, eta: &Charge<'_>) -> Result<Complex64> {
    same_sector(xi, eta)?;
    if m.ell != xi.ell && m.kind != MatrixKind::S0 {
        return Err(Error::SectorMismatch { left: m.ell, right: xi.ell });
    }
    Ok(dot_complex(&xi.to_symmetric(), &apply_complex(&m.entries, &eta.to_symmetric())))
}

/// `|| alpha xi + T xi - W eta / 2 ||` (with `S0` in place of `T` on `l = 0`), in `L^2`.
pub fn tms_residual_21(xi: &Charge<'_>, eta: &Charge<'_>, alpha: f64, t_or_s0: &SectorMatrix, w: &SectorMatrix) -> Result<f64> {
    same_sector(xi, eta)?;
    for m in [t_or_s0, w] {
        if m.ell != xi.ell {
            return Err(Error::SectorMismatch { left: m.ell, right: xi.ell });
        }
    }
    let x = xi.to_symmetric();
    let tx = apply_complex(&t_or_s0.entries, &x);
    let we = apply_complex(&w.entries, &eta.to_symmetric());
    let r: Vec<Complex64> = x.iter().zip(&tx).zip(&we).map(|((x, t), w)| x * alpha + t - w * 0.5).collect();
    Ok(norm_complex(&r))
}

/// Integral part `int K(p1, q) xi(q) dq` at an arbitrary momentum, summed over the grid nodes
/// with `q <= cut`.
fn kernel_action_at(xi: &Charge<'_>, lambda: f64, mass: MassParams, p1: f64, power: u32, cut: f64) -> Complex64 {
    let g = xi.grid;
    g.nodes
        .iter()
        .zip(&g.weights)
        .zip(&xi.values)
        .filter(|((&q, _), _)| q <= cut)
        .map(|((&q, &w), v)| v * (w * q * q * kernel_sym(xi.ell, mass.mu, lambda, p1, q, power)))
        .sum()
}

/// `(T xi)(p1)` at an arbitrary momentum.
pub fn t_hat_at(xi: &Charge<'_>, lambda: f64, mass: MassParams, p1: f64) -> Complex64 {
    xi.value_at(p1) * (2.0 * PI * PI * (mass.nu * p1 * p1 + lambda).sqrt())
        + kernel_action_at(xi, lambda, mass, p1, 1, f64::INFINITY)
}

/// `(W eta)(p1)` at an arbitrary momentum.
pub fn w_hat_at(eta: &Charge<'_>, lambda: f64, mass: MassParams, p1: f64) -> Complex64 {
    eta.value_at(p1) * (2.0 * PI * PI / (mass.nu * p1 * p1 + lambda).sqrt())
        - kernel_action_at(eta, lambda, mass, p1, 2, f64::INFINITY) * 2.0
}

/// `int_{|p2| < R} g(p1, p2) dp2` for the singular part of a sector element with charges
/// `(xi, eta)`. The diagonal terms use the closed-form truncated integrals; the exchange terms
/// are sector quadratures over the grid nodes inside the ball. Requires `R <= p_max / 2`.
pub fn shell_integral_21(xi: &Charge<'_>, eta: &Charge<'_>, lambda: f64, mass: MassParams, p1: f64, r: f64) -> Result<Complex64> {
    same_sector(xi, eta)?;
    check_lambda(lambda)?;
    if !(r > 0.0 && r <= 0.5 * xi.grid.p_max) {
        return Err(Error::Parameter("shell radius must lie in (0, p_max / 2]"));
    }
    if !(p1 > 0.0) {
        return Err(Error::Domain("p1 must be positive"));
    }
    let (mu, nu) = (mass.mu, mass.nu);
    Ok(xi.value_at(p1) * truncated_ball_integral(p1, mu, nu, lambda, r)
        - kernel_action_at(xi, lambda, mass, p1, 1, r)
        + eta.value_at(p1) * truncated_squared_integral(p1, mu, nu, lambda, r)
        - kernel_action_at(eta, lambda, mass, p1, 2, r))
}

/// Leading and constant coefficients predicted for [`shell_integral_21`]:
/// `4 pi xi(p1)` and `-(T xi)(p1) + (W eta)(p1) / 2`.
pub fn shell_asymptotics_21(xi: &Charge<'_>, eta: &Charge<'_>, lambda: f64, mass: MassParams, p1: f64) -> (Complex64, Complex64) {
    (xi.value_at(p1) * 4.0 * PI, -t_hat_at(xi, lambda, mass, p1) + w_hat_at(eta, lambda, mass, p1) * 0.5)
}

#[derive(Debug, Clone, PartialEq)]
pub struct MappingNormLadder {
    pub ell: usize,
    pub s: f64,
    pub cutoffs: Vec<f64>,
    pub norms: Vec<f64>,
    /// `|n_last - n_prev| / n_prev`.
    pub last_variation: f64,
    pub strictly_increasing: bool,
}

/// `|| G_{s-1}^{1/2} Q G_s^{-1/2} ||_2` with `G_s = diag((1 + p^2)^s)`, the discrete operator
/// norm of the integral part of `T` from `H^s` to `H^{s-1}`, on each grid of the ladder.
pub fn mapping_norm_estimate(ell: usize, s: f64, lambda: f64, mass: MassParams, ladder: &[RadialGrid]) -> Result<MappingNormLadder> {
    if ladder.len() < 2 {
        return Err(Error::Parameter("ladder needs at least two grids"));
    }
    let mut norms = Vec::with_capacity(ladder.len());
    for g in ladder {
        let q = build_q(ell, lambda, mass, g)?.entries;
        let d1 = diagonal_from(g, |p| (1.0 + p * p).powf(0.5 * (s - 1.0)));
        let d2 = diagonal_from(g, |p| (1.0 + p * p).powf(-0.5 * s));
        let scaled = Matrix::from_fn(g.len(), g.len(), |i, j| d1[i] * q[(i, j)] * d2[j]);
        norms.push(spectral_norm(&scaled));
    }
    let n = norms.len();
    Ok(MappingNormLadder {
        ell,
        s,
        cutoffs: ladder.iter().map(|g| g.p_max).collect(),
        last_variation: (norms[n - 1] - norms[n - 2]).abs() / norms[n - 2],
        strictly_increasing: norms.windows(2).all(|w| w[1] > w[0]),
        norms,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub cutoffs: Vec<f64>,
    /// `||Q xi_0||^2_{H^{1/2}}` on `[p_min, p_max]`, `xi_0` the indicator of the unit ball.
    pub squared_norms: Vec<f64>,
    /// Successive differences of `squared_norms`.
    pub increments: Vec<f64>,
    /// Largest relative gap between the grid image `Q xi_0` and the closed form on the grid.
    pub profile_defect: f64,
    /// Range of `(1 + p^2) (Q xi_0)(p)` over `[10, p_max / 10]`.
    pub decay_band: (f64, f64),
}

/// Image of the unit-ball indicator under the `l = 0` integral part of `T`, in closed form.
pub fn counterexample_profile(p: f64, lambda: f64, mass: MassParams) -> f64 {
    truncated_ball_integral(p, mass.mu, mass.nu, lambda, 1.0)
}

/// `ladder[k]` must share `p_min` and node density and have `1.0` on a panel edge for the
/// indicator to be integrated exactly.
pub fn counterexample_l0(lambda: f64, mass: MassParams, ladder: &[RadialGrid]) -> Result<CounterexampleReport> {
    check_lambda(lambda)?;
    if ladder.len() < 2 || ladder.windows(2).any(|w| w[1].p_max <= w[0].p_max) {
        return Err(Error::Parameter("cutoff ladder must increase"));
    }
    let mut squared_norms = Vec::new();
    let mut defect = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for g in ladder {
        let profile = diagonal_from(g, |p| counterexample_profile(p, lambda, mass));
        let indicator = Charge::from_fn(0, g, |p| Complex64::new(if p <= 1.0 { 1.0 } else { 0.0 }, 0.0));
        for (i, &p) in g.nodes.iter().enumerate() {
            let grid_image = kernel_action_at(&indicator, lambda, mass, p, 1, 1.0).re;
            defect = defect.max((grid_image - profile[i]).abs() / profile[i]);
            if p >= 10.0 && p <= g.p_max / 10.0 {
                let v = (1.0 + p * p) * profile[i];
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        squared_norms.push(g.integrate(|p| p * p * (1.0 + p * p).sqrt() * counterexample_profile(p, lambda, mass).powi(2)));
    }
    Ok(CounterexampleReport {
        cutoffs: ladder.iter().map(|g| g.p_max).collect(),
        increments: squared_norms.windows(2).map(|w| w[1] - w[0]).collect(),
        squared_norms,
        profile_defect: defect,
        decay_band: (lo, hi),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormEquivalenceReport {
    pub ell: usize,
    pub lambda: f64,
    /// Estimates on the finest grid of the ladder.
    pub c1_est: f64,
    pub c2_est: f64,
    /// `(p_max, nodes, c1, c2)` per ladder grid.
    pub ladder: Vec<(f64, usize, f64, f64)>,
    /// Largest relative change of `c1` or `c2` between successive grids.
    pub max_variation: f64,
}

/// Constants of `c1 ||xi||_{H^{-1/2}} <= ||u_xi|| <= c2 ||xi||_{H^{-1/2}}`: square roots of the
/// extremal eigenvalues of `W x = theta G x`, `G = diag((1 + p^2)^{-1/2})`.
pub fn norm_equivalence_bounds(ell: usize, lambda: f64, mass: MassParams, ladder: &[RadialGrid]) -> Result<NormEquivalenceReport> {
    if ladder.is_empty() {
        return Err(Error::Parameter("empty grid ladder"));
    }
    let mut rows = Vec::new();
    for g in ladder {
        let w = build_w(ell, lambda, mass, g)?.entries;
        let h = diagonal_from(g, |p| (1.0 + p * p).powf(0.25));
        let scaled = Matrix::from_fn(g.len(), g.len(), |i, j| h[i] * w[(i, j)] * h[j]);
        let ev = sorted_eigenvalues(&scaled);
        rows.push((g.p_max, g.len(), ev[0].sqrt(), ev[ev.len() - 1].sqrt()));
    }
    let max_variation = rows
        .windows(2)
        .map(|w| ((w[1].2 - w[0].2) / w[0].2).abs().max(((w[1].3 - w[0].3) / w[0].3).abs()))
        .fold(0.0, f64::max);
    let last = rows[rows.len() - 1];
    Ok(NormEquivalenceReport { ell, lambda, c1_est: last.2, c2_est: last.3, ladder: rows, max_variation })
}

/// Bottom of the spectrum of `A` at `alpha = 0`: smallest `theta` in `2 T x = theta W x`.
pub fn spectral_bottom(ell: usize, lambda: f64, mass: MassParams, grid: &RadialGrid) -> Result<f64> {
    let t = build_t(ell, lambda, mass, grid)?.entries * 2.0;
    let w = build_w(ell, lambda, mass, grid)?.entries;
    Ok(generalized_eigenvalues(&t, &w)?[0])
}

#[derive(Debug, Clone, PartialEq)]
pub struct MassSample {
    pub m: f64,
    /// Spectral bottom on each ladder grid.
    pub bottoms: Vec<f64>,
    pub stable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalityScan {
    pub ell: usize,
    pub lambda: f64,
    pub m_crit: f64,
    /// Final `(unstable, stable)` bracket.
    pub bracket: (f64, f64),
    pub samples: Vec<MassSample>,
}

/// Unstable when the bottom on the finest grid is negative and below the previous rung:
/// the spectrum runs off to `-infinity` as the cutoff grows.
pub fn classify_mass(ell: usize, lambda: f64, m: f64, ladder: &[RadialGrid]) -> Result<MassSample> {
    let mass = MassParams::new(m)?;
    let bottoms = ladder.iter().map(|g| spectral_bottom(ell, lambda, mass, g)).collect::<Result<Vec<_>>>()?;
    let n = bottoms.len();
    let unstable = bottoms[n - 1] < 0.0 && bottoms[n - 1] < bottoms[n - 2];
    Ok(MassSample { m, bottoms, stable: !unstable })
}

/// Bisection in `ln m` for the stable/unstable boundary of an odd sector, to relative `rel_tol`.
pub fn mass_criticality_scan(ell: usize, lambda: f64, ladder: &[RadialGrid], m_range: (f64, f64), rel_tol: f64) -> Result<CriticalityScan> {
    if ell % 2 == 0 {
        return Err(Error::Parameter("criticality is scanned in odd sectors"));
    }
    check_lambda(lambda)?;
    if ladder.len() < 2 {
        return Err(Error::Parameter("ladder needs at least two grids"));
    }
    let (lo, hi) = m_range;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Parameter("mass range must satisfy 0 < m_lo < m_hi"));
    }
    let a = classify_mass(ell, lambda, lo, ladder)?;
    let b = classify_mass(ell, lambda, hi, ladder)?;
    if a.stable || !b.stable {
        return Err(Error::NotBracketed);
    }
    let (mut unstable, mut stable) = (lo, hi);
    let mut samples = alloc::vec![a, b];
    while stable / unstable - 1.0 > rel_tol {
        let mid = (unstable * stable).sqrt();
        let s = classify_mass(ell, lambda, mid, ladder)?;
        if s.stable {
            stable = mid;
        } else {
            unstable = mid;
        }
        samples.push(s);
    }
    Ok(CriticalityScan { ell, lambda, m_crit: (unstable * stable).sqrt(), bracket: (unstable, stable), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::symmetry_defect;
    use crate::quad::{build_grid, grid_per_decade, GridScheme};

    fn grid() -> RadialGrid {
        build_grid(GridScheme::GaussLegendreComposite, 192, 1e-3, 1e3).unwrap()
    }

    fn m1() -> MassParams {
        MassParams::new(1.0).unwrap()
    }

    fn charge<'g>(g: &'g RadialGrid, ell: usize, a: f64, phase: f64) -> Charge<'g> {
        Charge::from_fn(ell, g, |p| Complex64::from_polar(p.powi(ell as i32) / (1.0 + p * p / (a * a)).powi(3), phase * p))
    }

    #[test]
    fn t_w_q_are_symmetric() {
        let g = grid();
        for ell in 0..3 {
            for m in [
                build_t(ell, 1.0, m1(), &g).unwrap(),
                build_w(ell, 1.0, m1(), &g).unwrap(),
                build_q(ell, 1.0, m1(), &g).unwrap(),
            ] {
                assert!(symmetry_defect(&m.entries) < 1e-13);
            }
        }
    }

    #[test]
    fn t_diagonal_and_kernel_decay() {
        let g = grid();
        let t = build_t(0, 1.0, m1(), &g).unwrap();
        let q = build_q(0, 1.0, m1(), &g).unwrap();
        let i = 0;
        let d = t.entries[(i, i)] - q.entries[(i, i)];
        assert!((d - 2.0 * PI * PI * (0.75 * g.nodes[0].powi(2) + 1.0).sqrt()).abs() < 1e-12);
        let max = |m: &Matrix| m.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let q1 = build_q(1, 1.0, m1(), &g).unwrap();
        let q5 = build_q(5, 1.0, m1(), &g).unwrap();
        assert!(max(&q5.entries) < max(&q1.entries));
    }

    #[test]
    fn w_diagonal_reduces_to_two_body_eta_coefficient() {
        // At p -> 0 the multiplicative part of W is 2 pi^2 / sqrt(lambda): twice pi^2 / sqrt(lambda).
        let g = grid();
        let w = build_w(0, 4.0, m1(), &g).unwrap();
        let q2 = kernel_matrix(&g, 0, 1.0, 4.0, 2);
        let d = w.entries[(0, 0)] + 2.0 * q2[(0, 0)];
        assert!((d - PI * PI).abs() < 1e-6 * PI * PI);
    }

    #[test]
    fn w_positive_and_pair_norm_matches() {
        let g = grid();
        for ell in 0..=3 {
            let w = build_w(ell, 0.5, MassParams::new(2.0).unwrap(), &g).unwrap();
            assert!(sorted_eigenvalues(&w.entries)[0] > 0.0);
            let xi = charge(&g, ell, 2.0, 0.3);
            let eta = charge(&g, ell, 0.7, -1.1);
            let direct = pair_norm_u(&xi, &eta, 0.5, w.mass).unwrap();
            let via_w = sector_form(&w, &xi, &eta).unwrap();
            assert!((direct - via_w).norm() < 1e-10 * via_w.norm());
            let self_norm = pair_norm_u(&xi, &xi, 0.5, w.mass).unwrap();
            assert!(self_norm.re > 0.0 && self_norm.im.abs() < 1e-12 * self_norm.re);
        }
        let a = charge(&g, 0, 1.0, 0.0);
        let b = charge(&g, 1, 1.0, 0.0);
        assert!(matches!(pair_norm_u(&a, &b, 1.0, m1()), Err(Error::SectorMismatch { .. })));
    }

    #[test]
    fn a_is_w_symmetric() {
        let g = grid();
        let a = build_a(1, 1.0, m1(), 0.3, &g, SzeroSpec::Zero).unwrap();
        let w = build_w(1, 1.0, m1(), &g).unwrap();
        let t = build_t(1, 1.0, m1(), &g).unwrap();
        let wa = &w.entries * &a.entries;
        let mut want = t.entries.clone() * 2.0;
        add_diagonal(&mut want, &alloc::vec![0.6; g.len()]);
        assert!((&wa - &want).norm() / t.entries.norm() < 1e-10);
        assert!(symmetry_defect(&wa) < 1e-12);
        let a0 = build_a(0, 1.0, m1(), 0.0, &g, SzeroSpec::Zero).unwrap();
        assert_eq!(a0.entries.norm(), 0.0);
    }

    #[test]
    fn tms_residual_properties() {
        let g = grid();
        let t = build_t(1, 1.0, m1(), &g).unwrap();
        let w = build_w(1, 1.0, m1(), &g).unwrap();
        let a = build_a(1, 1.0, m1(), 1.0, &g, SzeroSpec::Zero).unwrap();
        let xi = charge(&g, 1, 3.0, 0.0);
        let x = xi.to_symmetric();
        let eta = Charge::from_symmetric(1, &g, &apply_complex(&a.entries, &x));
        let scale = norm_complex(&apply_complex(&t.entries, &x));
        assert!(tms_residual_21(&xi, &eta, 1.0, &t, &w).unwrap() < 1e-10 * scale);
        let zero = Charge::zero(1, &g);
        let r = tms_residual_21(&xi, &zero, 1.0, &t, &w).unwrap();
        let tx: Vec<Complex64> = apply_complex(&t.entries, &x).iter().zip(&x).map(|(t, x)| t + x).collect();
        assert!((r - norm_complex(&tx)).abs() < 1e-12 * r);
        let c = Complex64::new(-2.0, 1.0);
        let r2 = tms_residual_21(&xi.scale(c), &zero, 1.0, &t, &w).unwrap();
        assert!((r2 - c.norm() * r).abs() < 1e-12 * r2);
    }

    #[test]
    fn s0_bump_is_compact_and_symmetric() {
        let g = grid();
        let kind = SzeroSpec::Multiplication { amplitude: 2.0, center: 1.0, width: 1.0 };
        let s = build_s0(kind, 1.0, m1(), &g).unwrap();
        assert!(symmetry_defect(&s.entries) == 0.0);
        assert_eq!(kind.profile(10.0), 0.0);
        assert!((kind.profile(1.0) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        let xi = charge(&g, 0, 100.0, 0.0);
        let image = Charge::from_symmetric(0, &g, &apply_complex(&s.entries, &xi.to_symmetric()));
        assert!(crate::kernels::sobolev_norm(&image, 0.5).is_finite());
    }

    #[test]
    fn counterexample_profile_at_origin() {
        // 4 pi (1 - arctan 1) at p -> 0, mu = 1, lambda = 1.
        let v = counterexample_profile(1e-12, 1.0, m1());
        assert!((v - 4.0 * PI * (1.0 - PI / 4.0)).abs() < 1e-10);
    }

    #[test]
    fn criticality_rejects_even_and_unbracketed() {
        let ladder = [grid_per_decade(16, 1e-2, 1e2).unwrap(), grid_per_decade(16, 1e-2, 1e3).unwrap()];
        assert!(mass_criticality_scan(0, 1.0, &ladder, (0.01, 5.0), 1e-2).is_err());
        assert!(matches!(mass_criticality_scan(1, 1.0, &ladder, (3.0, 5.0), 1e-2), Err(Error::NotBracketed)));
    }
}
