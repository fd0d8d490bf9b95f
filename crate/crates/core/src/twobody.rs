//! The analytic two-body point-interaction family.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::RadialGrid;

/// Extension parameter; `Friedrichs` is the `alpha = infinity` member.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    Finite(f64),
    Friedrichs,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionParam2B {
    pub alpha: Alpha,
    pub lambda: f64,
    /// `+inf` for the Friedrichs member.
    pub tau: f64,
    /// `-1/(4 pi alpha)`: infinite at `alpha = 0`, zero for Friedrichs.
    pub scattering_length: f64,
}

impl ExtensionParam2B {
    pub fn new(alpha: Alpha, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let (tau, scattering_length) = match alpha {
            Alpha::Finite(a) => (tau_from_alpha(a, lambda)?, -1.0 / (4.0 * PI * a)),
            Alpha::Friedrichs => (f64::INFINITY, 0.0),
        };
        Ok(ExtensionParam2B { alpha, lambda, tau, scattering_length })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter("lambda must be positive"))
    }
}

pub fn tau_from_alpha(alpha: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let s = lambda.sqrt();
    Ok(2.0 * s * (4.0 * PI * alpha + s))
}

pub fn alpha_from_tau(tau: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok((tau - 2.0 * lambda) / (8.0 * PI * lambda.sqrt()))
}

/// Singular data `(xi, eta)` of an element of the adjoint's domain, at shift `lambda`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularPair2B {
    pub xi: Complex64,
    pub eta: Complex64,
    pub lambda: f64,
}

impl SingularPair2B {
    pub fn new(xi: Complex64, eta: Complex64, lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        if !(xi.re.is_finite() && xi.im.is_finite() && eta.re.is_finite() && eta.im.is_finite()) {
            return Err(Error::Parameter("charges must be finite"));
        }
        Ok(SingularPair2B { xi, eta, lambda })
    }

    /// Momentum profile `xi/(p^2+lambda) + eta/(p^2+lambda)^2`.
    pub fn profile(&self, p: f64) -> Complex64 {
        let d = p * p + self.lambda;
        self.xi / d + self.eta / (d * d)
    }
}

pub fn u_xi_hat(xi: Complex64, lambda: f64, p: f64) -> Complex64 {
    xi / (p * p + lambda)
}

/// `int_{|p| < R}` of the singular part of the momentum profile.
pub fn shell_integral_2b(pair: &SingularPair2B, r: f64) -> Complex64 {
    let s = pair.lambda.sqrt();
    let at = (r / s).atan();
    let xi_part = 4.0 * PI * (r - s * at);
    let eta_part = -2.0 * PI * r / (r * r + pair.lambda) + 2.0 * PI / s * at;
    pair.xi * xi_part + pair.eta * eta_part
}

/// `(linear, constant)` of the large-R expansion `linear * R + constant + O(1/R)`.
pub fn asymptotic_coeffs_2b(pair: &SingularPair2B) -> (Complex64, Complex64) {
    let s = pair.lambda.sqrt();
    let linear = pair.xi * (4.0 * PI);
    let constant = pair.xi * (-2.0 * PI * PI * s) + pair.eta * (PI * PI / s);
    (linear, constant)
}

/// Coefficient `c` of the `c / R` term following the constant in the large-R expansion.
pub fn next_order_coeff_2b(pair: &SingularPair2B) -> Complex64 {
    (pair.xi * pair.lambda - pair.eta) * (4.0 * PI)
}

pub fn tms_check_2b(pair: &SingularPair2B, alpha: f64) -> f64 {
    let s = pair.lambda.sqrt();
    (pair.eta - pair.xi * (2.0 * s * (4.0 * PI * alpha + s))).norm()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChargeEstimates {
    pub radii: Vec<f64>,
    pub estimates: Vec<Complex64>,
    /// Exponent `k` in `|estimate_{j+1} - estimate_j| ~ R^k`, least squares over the ladder.
    pub rate: f64,
}

/// Berezin-Faddeev style extraction `xi ~ (1/4 pi R) int_{|p| < R}`.
pub fn charge_extract_2b(pair: &SingularPair2B, radii: &[f64]) -> Result<ChargeEstimates> {
    if radii.len() < 3 || radii.windows(2).any(|w| !(w[1] > w[0])) || radii[0] <= 0.0 {
        return Err(Error::Parameter("need at least three increasing positive radii"));
    }
    let estimates: Vec<Complex64> =
        radii.iter().map(|&r| shell_integral_2b(pair, r) / (4.0 * PI * r)).collect();
    let pts: Vec<(f64, f64)> = radii
        .windows(2)
        .zip(estimates.windows(2))
        .filter_map(|(r, e)| {
            let d = (e[1] - e[0]).norm();
            (d > 0.0).then(|| (r[0].ln(), d.ln()))
        })
        .collect();
    let rate = if pts.len() >= 2 { fit_slope(&pts) } else { f64::NAN };
    Ok(ChargeEstimates { radii: radii.to_vec(), estimates, rate })
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Bound-state energy of the member `alpha`, located as the zero of `tau(lambda)`.
/// `None` when the member has no bound state (`alpha >= 0` or Friedrichs).
pub fn bound_state_energy(alpha: Alpha) -> Option<f64> {
    let a = match alpha {
        Alpha::Finite(a) if a < 0.0 => a,
        _ => return None,
    };
    let tau = |l: f64| 2.0 * l.sqrt() * (4.0 * PI * a + l.sqrt());
    let (mut lo, mut hi) = (1.0, 1.0);
    while tau(hi) <= 0.0 {
        hi *= 4.0;
    }
    while tau(lo) >= 0.0 {
        lo *= 0.25;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tau(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(-0.5 * (lo + hi))
}

/// Radially symmetric smooth trial function, sampled in momentum space.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularPart2B<'g> {
    pub grid: &'g RadialGrid,
    pub samples: Vec<f64>,
}

impl<'g> RegularPart2B<'g> {
    pub fn from_fn<F: Fn(f64) -> f64>(grid: &'g RadialGrid, f: F) -> Self {
        RegularPart2B { grid, samples: grid.nodes.iter().map(|&p| f(p)).collect() }
    }

    pub fn gaussian(grid: &'g RadialGrid, amplitude: f64, a: f64) -> Self {
        Self::from_fn(grid, |p| amplitude * (-a * p * p).exp())
    }
}

/// `||grad phi||^2 - lambda ||phi + u_xi||^2 + lambda ||phi||^2 + tau (pi^2/sqrt(lambda)) |xi|^2`.
/// Terms involving `phi` are radial quadratures; `||u_xi||^2` is used in closed form.
pub fn form_value_2b(phi: &RegularPart2B<'_>, xi: Complex64, lambda: f64, tau: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let g = phi.grid;
    let mut grad = 0.0;
    let mut phi2 = 0.0;
    let mut cross = 0.0;
    for ((&p, &w), &f) in g.nodes.iter().zip(&g.weights).zip(&phi.samples) {
        let m = 4.0 * PI * w * p * p;
        grad += m * p * p * f * f;
        phi2 += m * f * f;
        cross += m * f * (xi / (p * p + lambda)).re;
    }
    let u2 = PI * PI * xi.norm_sqr() / lambda.sqrt();
    Ok(grad - lambda * (phi2 + 2.0 * cross + u2) + lambda * phi2 + tau * u2)
}

/// `e^{-sqrt(lambda) x} / (4 pi x)`.
pub fn greens_function(x: f64, lambda: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(Error::Domain("distance must be positive"));
    }
    if !(lambda >= 0.0) {
        return Err(Error::Parameter("lambda must be nonnegative"));
    }
    Ok((-lambda.sqrt() * x).exp() / (4.0 * PI * x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{build_grid, integrate_log, GridScheme};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn tau_alpha_examples() {
        assert_eq!(tau_from_alpha(0.0, 1.0).unwrap(), 2.0);
        for lambda in [0.3, 1.0, 7.0] {
            let a = -lambda.sqrt() / (4.0 * PI);
            assert!(tau_from_alpha(a, lambda).unwrap().abs() < 1e-15);
        }
        assert!(tau_from_alpha(1.0, 0.0).is_err());
        assert!(alpha_from_tau(1.0, -1.0).is_err());
    }

    #[test]
    fn shell_integral_exact_value() {
        let pair = SingularPair2B::new(c(0.0), c(1.0), 4.0).unwrap();
        let v = shell_integral_2b(&pair, 1.0);
        let want = -2.0 * PI / 5.0 + PI * 0.5f64.atan();
        assert!((v.re - want).abs() < 1e-15 && v.im == 0.0);
        let q = integrate_log(|p| 4.0 * PI * p * p / (p * p + 4.0).powi(2), 1e-12, 1.0, 40, 16);
        assert!((q - want).abs() < 1e-12);
    }

    #[test]
    fn asymptotic_coefficients() {
        let pair = SingularPair2B::new(c(1.0), c(0.0), 1.0).unwrap();
        let (l, k) = asymptotic_coeffs_2b(&pair);
        assert_eq!((l.re, k.re), (4.0 * PI, -2.0 * PI * PI));
        let (l, k) = asymptotic_coeffs_2b(&SingularPair2B::new(c(0.0), c(0.0), 3.0).unwrap());
        assert_eq!((l, k), (c(0.0), c(0.0)));
        // Next order of the expansion is 4 pi lambda xi / R.
        let v = shell_integral_2b(&pair, 1e4) - 4.0 * PI * 1e4;
        assert!((v.re + 2.0 * PI * PI - 4.0 * PI * 1e-4).abs() < 1e-10);
        let pair = SingularPair2B::new(c(2.0), c(-3.0), 4.0).unwrap();
        let (l, k) = asymptotic_coeffs_2b(&pair);
        let r = 1e5;
        let rem = (shell_integral_2b(&pair, r) - l * r - k) * r;
        assert!((rem - next_order_coeff_2b(&pair)).norm() < 1e-6 * next_order_coeff_2b(&pair).norm());
    }

    #[test]
    fn tms_residual_examples() {
        let pair = SingularPair2B::new(c(0.0), c(1.0), 2.0).unwrap();
        assert_eq!(tms_check_2b(&pair, 0.4), 1.0);
        let pair = SingularPair2B::new(c(1.0), c(0.0), 1.0).unwrap();
        assert!(tms_check_2b(&pair, -1.0 / (4.0 * PI)) < 1e-15);
    }

    #[test]
    fn charge_extraction() {
        let pair = SingularPair2B::new(c(1.0), c(0.0), 1.0).unwrap();
        let est = charge_extract_2b(&pair, &[1e2, 1e3, 1e4]).unwrap();
        assert!((est.estimates[2] - c(1.0)).norm() < 1e-3);
        assert!((est.rate + 1.0).abs() < 0.1);
        let pair = SingularPair2B::new(Complex64::new(2.0, 1.0), c(5.0), 3.0).unwrap();
        let est = charge_extract_2b(&pair, &[1e2, 1e3, 1e4]).unwrap();
        assert!((est.estimates[2] - Complex64::new(2.0, 1.0)).norm() < 1e-3);
        let pair = SingularPair2B::new(c(0.0), c(1.0), 1.0).unwrap();
        let est = charge_extract_2b(&pair, &[1e2, 1e3, 1e4]).unwrap();
        for (e, r) in est.estimates.iter().zip(&est.radii) {
            assert!(e.norm() * r < 1.0);
        }
        assert!(charge_extract_2b(&pair, &[1.0, 2.0]).is_err());
    }

    #[test]
    fn bound_state_examples() {
        let e = bound_state_energy(Alpha::Finite(-1.0 / (4.0 * PI))).unwrap();
        assert!((e + 1.0).abs() < 1e-14);
        assert!(bound_state_energy(Alpha::Finite(1.0)).is_none());
        assert!(bound_state_energy(Alpha::Finite(0.0)).is_none());
        assert!(bound_state_energy(Alpha::Friedrichs).is_none());
        let e = bound_state_energy(Alpha::Finite(-1.0)).unwrap();
        assert!((e / (16.0 * PI * PI) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn u_xi_values_and_norm() {
        assert_eq!(u_xi_hat(c(1.0), 1.0, 0.0), c(1.0));
        assert_eq!(u_xi_hat(c(1.0), 1.0, 1.0), c(0.5));
        let g = build_grid(GridScheme::GaussLegendreComposite, 1024, 1e-6, 1e10).unwrap();
        for lambda in [0.5, 1.0, 4.0] {
            let n2 = g.integrate(|p| 4.0 * PI * p * p * u_xi_hat(c(1.0), lambda, p).norm_sqr());
            let want = PI * PI / lambda.sqrt();
            assert!(((n2 - want) / want).abs() < 1e-8, "{n2} {want}");
        }
    }

    #[test]
    fn form_value_examples() {
        let g = build_grid(GridScheme::GaussLegendreComposite, 512, 1e-6, 1e3).unwrap();
        let zero = RegularPart2B::from_fn(&g, |_| 0.0);
        let v = form_value_2b(&zero, c(1.0), 1.0, 2.0).unwrap();
        assert!((v - PI * PI).abs() < 1e-12);
        let v = form_value_2b(&zero, c(1.0), 1.0, 0.0).unwrap();
        assert!((v / (PI * PI) + 1.0).abs() < 1e-14);
        let phi = RegularPart2B::gaussian(&g, 1.3, 0.7);
        let grad = g.integrate(|p| 4.0 * PI * p.powi(4) * (1.3 * (-0.7 * p * p).exp()).powi(2));
        for tau in [-3.0, 0.0, 11.0] {
            let v = form_value_2b(&phi, c(0.0), 2.0, tau).unwrap();
            assert!((v - grad).abs() < 1e-12 * grad);
        }
        // int p^4 e^{-a p^2} dp = 3 sqrt(pi) / (8 a^{5/2}), here a = 2 * 0.7
        let a: f64 = 1.4;
        let exact = 1.69 * 4.0 * PI * 3.0 * PI.sqrt() / (8.0 * a.powf(2.5));
        assert!((grad - exact).abs() < 1e-10 * exact, "{grad} {exact}");
    }

    #[test]
    fn greens_function_values() {
        assert!((greens_function(1.0, 1e-12).unwrap() - 1.0 / (4.0 * PI)).abs() < 1e-6);
        assert!((greens_function(1.0, 1.0).unwrap() - (-1.0f64).exp() / (4.0 * PI)).abs() < 1e-16);
        assert!(greens_function(0.0, 1.0).is_err());
        let g = build_grid(GridScheme::GaussLegendreComposite, 512, 1e-12, 1e3).unwrap();
        for lambda in [0.25, 1.0, 9.0] {
            let n2 = g.integrate(|x| 4.0 * PI * x * x * greens_function(x, lambda).unwrap().powi(2));
            let want = 1.0 / (8.0 * PI * lambda.sqrt());
            assert!(((n2 - want) / want).abs() < 1e-8, "{lambda} {n2} {want}");
        }
    }
}
