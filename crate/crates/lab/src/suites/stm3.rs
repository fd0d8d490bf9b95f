use tmslab_core::quad::{build_grid, RadialGrid};
use tmslab_core::stm::{danilov_fit, stm_null_vector, stm_spectrum, thomas_ratio_check, StmLevels};

use crate::config::Resolved;
use crate::error::{Context, LabError};
use crate::record::{ResultRecord, Series};

pub const TOLERANCES: &[(&str, f64)] = &[("ratio_spread", 0.01), ("danilov_vs_ratio", 0.02), ("cutoff_rescale", 0.01)];

/// Factor applied to the UV cutoff for the rescaling check. The IR cutoff and the node
/// density stay fixed, so the levels move with the cutoff (E_n roughly times RESCALE^2)
/// while the ratios should not.
pub const RESCALE: f64 = 2.0;

/// The grid with `p_max` multiplied by `c` at the same number of nodes per decade.
pub fn uv_rescaled(grid: &RadialGrid, c: f64) -> Result<RadialGrid, LabError> {
    let decades = |hi: f64| (hi / grid.p_min).log10();
    let n = (grid.len() as f64 * decades(c * grid.p_max) / decades(grid.p_max) / 16.0).round() as usize * 16;
    build_grid(grid.scheme, n.max(16), grid.p_min, c * grid.p_max).context("UV-rescaled grid")
}

/// Largest relative change of the ratios `E_{n+1}/E_n` between two spectra, pairing each level
/// of `a` with the level of `b` nearest to `c^2 E_n`.
pub fn rescaled_ratio_deviation(a: &StmLevels, b: &StmLevels, c: f64) -> Option<f64> {
    let nearest = |e: f64| -> Option<f64> {
        b.energies.iter().copied().min_by(|x, y| (x / (c * c * e)).ln().abs().total_cmp(&(y / (c * c * e)).ln().abs()))
    };
    let mut worst: Option<f64> = None;
    for w in a.energies.windows(2) {
        let (x, y) = (nearest(w[0])?, nearest(w[1])?);
        if x == y {
            continue;
        }
        let d = ((y / x) / (w[1] / w[0]) - 1.0).abs();
        worst = Some(worst.map_or(d, |m: f64| m.max(d)));
    }
    worst
}

pub fn run(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let grid = cfg.grid()?;
    let scaled = uv_rescaled(&grid, RESCALE)?;
    let (base, other) = rayon::join(|| stm_spectrum(cfg.alpha, &grid, cfg.levels), || stm_spectrum(cfg.alpha, &scaled, cfg.levels));
    let base = base.context("STM spectrum")?;
    let other = other.context("STM spectrum, rescaled cutoff")?;

    let n = base.energies.len();
    rec.scalar("trusted_levels", n as f64);
    rec.scalar("contaminated_levels", base.contaminated as f64);
    rec.scalar("levels_below_floor", base.below_floor as f64);
    rec.scalar("cutoff", base.cutoff);
    rec.check("trusted_levels", n as f64, 3.0, n >= 3, "levels inside [(10 p_min)^2, (0.01 p_max)^2]; at least 3");
    if base.partial {
        rec.note("trusted_levels", "fewer trusted levels than requested");
    }
    let mut lv = Series::new(&["n", "E_n"]).log(false, true);
    for (k, e) in base.energies.iter().enumerate() {
        lv.push(vec![k as f64 + 1.0, *e]);
    }
    if n > 0 {
        rec.series("levels", lv);
    }
    let mut rt = Series::new(&["n", "ratio", "s0_from_ratios"]);
    for (k, (r, s)) in base.ratios.iter().zip(&base.s0_from_ratios).enumerate() {
        rt.push(vec![k as f64 + 1.0, *r, *s]);
    }
    if !rt.rows.is_empty() {
        rec.series("ratios", rt);
    }

    let ratio_check = if n >= 2 { thomas_ratio_check(&base).ok() } else { None };
    match &ratio_check {
        Some(c) => {
            rec.scalar("s0_estimate", c.s0_estimate);
            match c.max_pairwise_deviation {
                Some(d) => rec.check_below("ratio_spread", d, cfg.tol("ratio_spread"), "spread of 2 pi / ln(E_{n+1}/E_n)"),
                None => {
                    rec.check("ratio_spread", f64::NAN, cfg.tol("ratio_spread"), false, "a single ratio has no spread");
                }
            }
        }
        None => rec.check("ratio_spread", f64::NAN, cfg.tol("ratio_spread"), false, "fewer than two levels"),
    }

    if n > 0 {
        // Shallowest level: widest asymptotic window between sqrt(E) and the cutoff.
        let e = base.energies[0];
        let xi = stm_null_vector(e, cfg.alpha, &grid, base.eigen_index[0]).context("null vector")?;
        let lo = (30.0 * e.sqrt()).max(10.0 * grid.p_min);
        let hi = grid.p_max / 30.0;
        match danilov_fit(&xi, (lo, hi)) {
            Ok(fit) => {
                rec.scalar("danilov_s0", fit.s0);
                rec.scalar("danilov_A", fit.a);
                rec.scalar("danilov_B", fit.b);
                rec.scalar("danilov_residual", fit.residual);
                if let Some(beta) = fit.beta {
                    rec.scalar("beta", beta);
                }
                let mut tail = Series::new(&["ln_p", "p2_xi", "danilov_fit"]);
                for (&p, v) in grid.nodes.iter().zip(&xi.values) {
                    if p >= lo && p <= hi {
                        let t = p.ln();
                        tail.push(vec![t, p * p * v.re, fit.a * (fit.s0 * t).sin() + fit.b * (fit.s0 * t).cos()]);
                    }
                }
                rec.series("danilov_tail", tail);
                match &ratio_check {
                    Some(c) => rec.check_below(
                        "danilov_vs_ratio",
                        (fit.s0 - c.s0_estimate).abs() / c.s0_estimate,
                        cfg.tol("danilov_vs_ratio"),
                        "fitted log-period against the ratio estimate",
                    ),
                    None => rec.check("danilov_vs_ratio", f64::NAN, cfg.tol("danilov_vs_ratio"), false, "no ratio estimate"),
                }
            }
            Err(e) => rec.check("danilov_vs_ratio", f64::NAN, cfg.tol("danilov_vs_ratio"), false, format!("fit rejected: {e}")),
        }
    }

    // Shift of the shallowest level under the UV doubling; RESCALE^2 in the scaling limit.
    let target = |e: f64| move |x: &f64| (x / (RESCALE * RESCALE * e)).ln().abs();
    if let Some(&e0) = base.energies.first() {
        if let Some(x) = other.energies.iter().copied().min_by(|x, y| target(e0)(x).total_cmp(&target(e0)(y))) {
            rec.scalar("rescale_energy_factor", x / e0);
        }
    }
    match rescaled_ratio_deviation(&base, &other, RESCALE) {
        Some(d) => rec.check_below("cutoff_rescale", d, cfg.tol("cutoff_rescale"), "ratio change with the UV cutoff doubled"),
        None => rec.check("cutoff_rescale", f64::NAN, cfg.tol("cutoff_rescale"), false, "no ratio pairs to compare"),
    }
    Ok(())
}
