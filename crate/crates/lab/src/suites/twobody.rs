use std::f64::consts::PI;

use num_complex::Complex64;
use tmslab_core::twobody::{
    alpha_from_tau, asymptotic_coeffs_2b, bound_state_energy, charge_extract_2b, fit_slope, form_value_2b,
    next_order_coeff_2b, shell_integral_2b, tau_from_alpha, tms_check_2b, Alpha, RegularPart2B, SingularPair2B,
};

use super::rel;
use crate::config::Resolved;
use crate::error::{Context, LabError};
use crate::record::{ResultRecord, Series};

pub const TOLERANCES: &[(&str, f64)] = &[
    ("round_trip", 1e-15),
    ("bound_state", 1e-10),
    ("tms_residual", 1e-12),
    ("coefficient_ratio", 1e-12),
    ("decay_exponent", 0.1),
    ("next_order", 1e-3),
];

const RADII: [f64; 7] = [1e1, 3e1, 1e2, 3e2, 1e3, 3e3, 1e4];

pub fn run(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let (alpha, lambda) = (cfg.alpha, cfg.lambda);
    let tau = tau_from_alpha(alpha, lambda).context("tau")?;
    let back = alpha_from_tau(tau, lambda).context("alpha")?;
    rec.scalar("tau", tau);
    rec.check_below("round_trip", (back - alpha).abs() / alpha.abs().max(1.0), cfg.tol("round_trip"), "|alpha(tau(alpha)) - alpha|");

    match bound_state_energy(Alpha::Finite(alpha)) {
        Some(e) => {
            rec.scalar("bound_state", e);
            let exact = -(4.0 * PI * alpha).powi(2);
            rec.check_below("bound_state", rel(e, exact), cfg.tol("bound_state"), "bisection root of tau against -(4 pi alpha)^2");
        }
        None => {
            rec.scalar("bound_state_count", 0.0);
            rec.check("bound_state", 0.0, cfg.tol("bound_state"), alpha >= 0.0, "no bound state, consistent with alpha >= 0");
        }
    }

    // Pair satisfying the boundary condition: eta = tau xi.
    let pair = SingularPair2B::new(Complex64::new(1.0, 0.0), Complex64::new(tau, 0.0), lambda).context("pair")?;
    rec.check_below("tms_residual", tms_check_2b(&pair, alpha), cfg.tol("tms_residual"), "|eta - tau xi|");
    let (lin, con) = asymptotic_coeffs_2b(&pair);
    rec.scalar("linear_coeff", lin.re);
    rec.scalar("constant_coeff", con.re);
    let ratio = (con / lin).re;
    let want = 2.0 * PI * PI * alpha;
    rec.check_below("coefficient_ratio", (ratio - want).abs() / want.abs().max(1.0), cfg.tol("coefficient_ratio"), "constant/linear against 2 pi^2 alpha");

    let next = next_order_coeff_2b(&pair).re;
    rec.scalar("next_order_coeff", next);
    let mut s = Series::new(&["R", "shell", "remainder", "R_times_remainder"]).log(true, true);
    let mut pts = Vec::new();
    for &r in &RADII {
        let v = shell_integral_2b(&pair, r);
        let rem = (v - lin * r - con).re;
        s.push(vec![r, v.re, rem.abs(), r * rem]);
        pts.push((r.ln(), rem.abs().ln()));
    }
    let slope = fit_slope(&pts);
    rec.scalar("decay_exponent", slope);
    rec.check_below("decay_exponent", (slope + 1.0).abs(), cfg.tol("decay_exponent"), "fitted exponent of the shell remainder against -1");
    let last = s.rows.last().expect("radii")[3];
    rec.check_below("next_order", rel(last, next), cfg.tol("next_order"), "R (shell - linear - constant) at the largest radius against 4 pi (lambda xi - eta)");
    rec.series("shell_asymptotics", s);

    let est = charge_extract_2b(&pair, &RADII).context("charge extraction")?;
    rec.scalar("charge_estimate", est.estimates.last().expect("radii").re);
    rec.scalar("charge_rate", est.rate);

    let grid = cfg.grid()?;
    let phi = RegularPart2B::gaussian(&grid, 1.0, 1.0);
    rec.scalar("form_value", form_value_2b(&phi, Complex64::new(1.0, 0.0), lambda, tau).context("form value")?);
    Ok(())
}
