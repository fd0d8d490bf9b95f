//! Krein-Vishik-Birman bounds checked on the two-body family, where every bottom is explicit.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::{build_grid, GridScheme};
use crate::twobody::{alpha_from_tau, bound_state_energy, tau_from_alpha, Alpha, SingularPair2B};

#[derive(Debug, Clone, PartialEq)]
pub struct KvbCheck {
    pub alpha: f64,
    pub lambda: f64,
    /// Bottom of the shifted reference operator, `lambda`.
    pub m_s: f64,
    /// Bottom of the extension parameter, `tau(lambda)`.
    pub m_t: f64,
    /// Bottom of the shifted extension, `lambda + E_0`.
    pub m_st: f64,
    /// `m_t - m_st`.
    pub upper_margin: f64,
    /// `m_st - m_s m_t / (m_s + m_t)`.
    pub lower_margin: f64,
    pub upper_ok: bool,
    pub lower_ok: bool,
    /// Set when `tau(lambda) <= -lambda` and the bounds do not apply.
    pub skipped: Option<&'static str>,
}

/// Margins are compared against rounding of the bottoms, not against zero exactly.
const MARGIN_SLACK: f64 = 1e-12;

pub fn kvb_bound_check(alpha: f64, lambda: f64) -> Result<KvbCheck> {
    let tau = tau_from_alpha(alpha, lambda)?;
    let m_st = lambda + bound_state_energy(Alpha::Finite(alpha)).unwrap_or(0.0);
    let mut check = KvbCheck {
        alpha,
        lambda,
        m_s: lambda,
        m_t: tau,
        m_st,
        upper_margin: f64::NAN,
        lower_margin: f64::NAN,
        upper_ok: false,
        lower_ok: false,
        skipped: None,
    };
    if !(tau > -lambda) {
        check.skipped = Some("m(T) <= -m(S): bounds not applicable");
        return Ok(check);
    }
    let scale = tau.abs() + m_st.abs() + lambda;
    check.upper_margin = tau - m_st;
    check.lower_margin = m_st - lambda * tau / (lambda + tau);
    check.upper_ok = check.upper_margin >= -MARGIN_SLACK * scale;
    check.lower_ok = check.lower_margin >= -MARGIN_SLACK * scale;
    Ok(check)
}

fn sign(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

/// For each shift: `sign(tau(lambda)) == sign(lambda - (4 pi alpha)^2)` when `alpha < 0`,
/// and `tau(lambda) > 0` when `alpha >= 0`.
pub fn positivity_equivalence_check(alpha: f64, lambdas: &[f64]) -> Result<Vec<bool>> {
    lambdas
        .iter()
        .map(|&l| {
            let tau = tau_from_alpha(alpha, l)?;
            Ok(if alpha < 0.0 {
                let k = 4.0 * PI * alpha;
                sign(tau) == sign(l - k * k)
            } else {
                tau > 0.0
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriedrichsKreinReport {
    pub lambda: f64,
    /// Member with `tau(lambda) = 0`.
    pub alpha_krein: f64,
    pub krein_bound_state: Option<f64>,
    /// `|E_0 + lambda| / lambda`.
    pub krein_deviation: f64,
    pub friedrichs_bound_state: Option<f64>,
}

pub fn friedrichs_krein_identify(lambda: f64) -> Result<FriedrichsKreinReport> {
    let alpha_krein = alpha_from_tau(0.0, lambda)?;
    let krein_bound_state = bound_state_energy(Alpha::Finite(alpha_krein));
    let krein_deviation = krein_bound_state.map_or(f64::INFINITY, |e| (e + lambda).abs() / lambda);
    Ok(FriedrichsKreinReport {
        lambda,
        alpha_krein,
        krein_bound_state,
        krein_deviation,
        friedrichs_bound_state: bound_state_energy(Alpha::Friedrichs),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionCheck {
    pub lambda1: f64,
    pub lambda2: f64,
    /// Charges fitted from the momentum profile at the second shift.
    pub xi_fit: Complex64,
    pub eta_fit: Complex64,
    /// Closed-form re-decomposition at the second shift.
    pub eta_exact: Complex64,
    /// `|xi_fit - xi|`, the lambda-independence residual.
    pub xi_residual: f64,
    pub eta_residual: f64,
}

/// Charges of the same profile re-decomposed at shift `lambda2`:
/// `xi' = xi`, `eta' = sqrt(l2) (2 xi (sqrt(l2) - sqrt(l1)) + eta / sqrt(l1))`.
pub fn redecompose(pair: &SingularPair2B, lambda2: f64) -> (Complex64, Complex64) {
    let (s1, s2) = (pair.lambda.sqrt(), lambda2.sqrt());
    (pair.xi, (pair.xi * (2.0 * (s2 - s1)) + pair.eta / s1) * s2)
}

/// Decomposes the profile of `pair` (regular part zero) again at `lambda2`: `xi'` from a
/// least-squares fit of the large-p tail onto `1/(p^2+l2)` and `1/(p^2+l2)^2`, `eta'` from
/// the requirement that the remainder integrates to zero.
pub fn decomposition_uniqueness_check(pair: &SingularPair2B, lambda1: f64, lambda2: f64) -> Result<DecompositionCheck> {
    if !(lambda1 > 0.0 && lambda2 > 0.0) {
        return Err(Error::Parameter("shifts must be positive"));
    }
    let pair = SingularPair2B::new(pair.xi, pair.eta, lambda1)?;
    // Tail fit on [1e3, 1e5]: basis mismatch is O(p^-4) relative.
    let tail = build_grid(GridScheme::LogUniform, 64, 1e3, 1e5)?;
    let (mut a11, mut a12, mut a22) = (0.0, 0.0, 0.0);
    let (mut b1, mut b2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for &p in &tail.nodes {
        // Rows scaled by p^2 so every node carries comparable weight.
        let d = p * p + lambda2;
        let f1 = p * p / d;
        let f2 = p * p / (d * d);
        let g = pair.profile(p) * (p * p);
        a11 += f1 * f1;
        a12 += f1 * f2;
        a22 += f2 * f2;
        b1 += g * f1;
        b2 += g * f2;
    }
    let det = a11 * a22 - a12 * a12;
    let xi_fit = (b1 * a22 - b2 * a12) / det;
    // A fit error in xi' enters multiplied by p_max, so the grid stops early and the tail is added.
    let wide = build_grid(GridScheme::GaussLegendreComposite, 1024, 1e-8, 1e5)?;
    let mut integral = Complex64::new(0.0, 0.0);
    for (&p, &w) in wide.nodes.iter().zip(&wide.weights) {
        integral += (pair.profile(p) - xi_fit / (p * p + lambda2)) * (4.0 * PI * w * p * p);
    }
    // Analytic tail beyond the grid: the integrand decays like (eta + xi (l2 - l1)) / p^4.
    let pm = wide.p_max;
    integral += (pair.eta + xi_fit * (lambda2 - lambda1)) * (4.0 * PI / pm);
    let eta_fit = integral * (lambda2.sqrt() / (PI * PI));
    let (_, eta_exact) = redecompose(&pair, lambda2);
    Ok(DecompositionCheck {
        lambda1,
        lambda2,
        xi_fit,
        eta_fit,
        eta_exact,
        xi_residual: (xi_fit - pair.xi).norm(),
        eta_residual: (eta_fit - eta_exact).norm() / (1.0 + eta_exact.norm()),
    })
}
