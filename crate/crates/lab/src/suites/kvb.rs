use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tmslab_core::kvb::{decomposition_uniqueness_check, friedrichs_krein_identify, kvb_bound_check, positivity_equivalence_check, KvbCheck};
use tmslab_core::twobody::SingularPair2B;

use crate::config::Resolved;
use crate::error::{Context, LabError};
use crate::record::{ResultRecord, Series};

pub const TOLERANCES: &[(&str, f64)] = &[("krein", 1e-12), ("decomposition", 1e-8)];

pub const SAMPLES: usize = 200;
const SEED: u64 = 0x6b76_6231;

/// `(alpha, lambda)` pairs with `tau(lambda) > -lambda`, drawn from a fixed stream.
pub fn admissible_samples(n: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let alpha: f64 = rng.gen_range(-1.0..1.0);
        let lambda = 10f64.powf(rng.gen_range(-3.0..3.0));
        let (s, k) = (lambda.sqrt(), 4.0 * PI * alpha.abs());
        if alpha >= 0.0 || 3.0 * s > 2.0 * k {
            out.push((alpha, lambda));
        }
    }
    out
}

pub fn run(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let (alpha, lambda) = (cfg.alpha, cfg.lambda);
    let here = kvb_bound_check(alpha, lambda).context("kvb bounds")?;
    rec.scalar("m_S", here.m_s);
    rec.scalar("m_T", here.m_t);
    rec.scalar("m_ST", here.m_st);
    match here.skipped {
        Some(reason) => rec.note("bounds_at_input", reason),
        None => {
            rec.scalar("upper_margin", here.upper_margin);
            rec.scalar("lower_margin", here.lower_margin);
            rec.check("bounds_at_input", here.upper_margin.min(here.lower_margin), 0.0, here.upper_ok && here.lower_ok, "m(T) >= m(S_T) >= m(S) m(T) / (m(S) + m(T))");
        }
    }

    let samples = admissible_samples(SAMPLES);
    let checks: Vec<KvbCheck> = samples.par_iter().map(|&(a, l)| kvb_bound_check(a, l)).collect::<Result<_, _>>().context("kvb sweep")?;
    let worst = checks.iter().map(|c| c.upper_margin.min(c.lower_margin)).fold(f64::INFINITY, f64::min);
    let ok = checks.iter().all(|c| c.skipped.is_none() && c.upper_ok && c.lower_ok);
    rec.check("bounds_sweep", worst, 0.0, ok, format!("{SAMPLES} sampled (alpha, lambda) with tau > -lambda; value is the smallest margin"));

    let lambdas: Vec<f64> = (0..=40).map(|k| 10f64.powf(-3.0 + 0.15 * k as f64)).collect();
    let signs = positivity_equivalence_check(alpha, &lambdas).context("positivity equivalence")?;
    let agree = signs.iter().filter(|&&b| b).count();
    rec.check("positivity_equivalence", (signs.len() - agree) as f64, 0.0, agree == signs.len(), "sign tau(lambda) == sign(lambda - (4 pi alpha)^2) on a lambda grid");
    let threshold = positivity_equivalence_check(-1.0, &[16.0 * PI * PI]).context("threshold")?;
    rec.check("positivity_threshold", 0.0, 0.0, threshold[0], "alpha = -1 at lambda = 16 pi^2: both sides vanish");

    let fk = friedrichs_krein_identify(lambda).context("krein")?;
    rec.scalar("alpha_krein", fk.alpha_krein);
    rec.check_below("krein", fk.krein_deviation, cfg.tol("krein"), "tau = 0 member has bound state -lambda");
    rec.check("friedrichs", 0.0, 0.0, fk.friedrichs_bound_state.is_none(), "Friedrichs member has no bound state");

    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst_xi = 0.0f64;
    let mut cases = vec![(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), lambda, 2.0 * lambda)];
    for _ in 0..10 {
        let xi = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let eta = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        cases.push((xi, eta, 10f64.powf(rng.gen_range(-1.0..1.0)), 10f64.powf(rng.gen_range(-1.0..1.0))));
    }
    for (xi, eta, l1, l2) in cases {
        let pair = SingularPair2B::new(xi, eta, l1).context("pair")?;
        let d = decomposition_uniqueness_check(&pair, l1, l2).context("decomposition")?;
        worst_xi = worst_xi.max(d.xi_residual / xi.norm().max(1.0));
    }
    rec.check_below("decomposition", worst_xi, cfg.tol("decomposition"), "xi re-fitted at a second shift, 11 cases");

    let mut s = Series::new(&["lambda", "m_T", "m_ST", "upper_margin", "lower_margin"]).log(true, false);
    for &l in &lambdas {
        let c = kvb_bound_check(alpha, l).context("kvb curve")?;
        if c.skipped.is_none() {
            s.push(vec![l, c.m_t, c.m_st, c.upper_margin, c.lower_margin]);
        }
    }
    if !s.rows.is_empty() {
        rec.series("kvb_margins", s);
    }
    Ok(())
}
