use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use tmslab_core::fermion::{
    build_a, build_s0, build_t, build_w, counterexample_l0, mapping_norm_estimate, mass_criticality_scan, norm_equivalence_bounds,
    pair_norm_u, sector_form, shell_asymptotics_21, shell_integral_21, tms_residual_21, SzeroSpec,
};
use tmslab_core::kernels::{Charge, MassParams};
use tmslab_core::linalg::{apply_complex, dot_complex, norm_complex, sorted_eigenvalues, Matrix};
use tmslab_core::quad::{grid_per_decade, RadialGrid};

use crate::config::Resolved;
use crate::error::{Context, LabError};
use crate::record::{ResultRecord, Series};

pub const TOLERANCES: &[(&str, f64)] = &[
    ("pair_norm", 1e-6),
    ("a_identity", 1e-10),
    ("w_symmetry", 1e-10),
    ("tms_residual", 1e-10),
    ("shell_constant", 1e-3),
    ("norm_equivalence", 0.1),
    ("mapping_bounded", 0.05),
    ("counterexample_increments", 0.1),
    ("criticality", 1e-2),
];

const SEED: u64 = 0x3231_6665;
pub const PAIRS: usize = 50;
pub const SYMMETRY_PAIRS: usize = 20;

/// Smooth test charge `c (p/a)^l (1 + p^2/a^2)^{-k} e^{i phi p}` with random parameters.
pub fn random_charge<'g>(rng: &mut ChaCha8Rng, g: &'g RadialGrid, ell: usize) -> Charge<'g> {
    let a: f64 = rng.gen_range(0.3..5.0);
    let k: i32 = rng.gen_range(2..4);
    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let phase: f64 = rng.gen_range(-1.0..1.0);
    Charge::from_fn(ell, g, move |p| c * Complex64::from_polar((p / a).powi(ell as i32) / (1.0 + p * p / (a * a)).powi(k), phase * p))
}

/// Cutoff ladder for the mapping-norm estimates: `p_max = 1e4 * 2^k` from `p_min = 1e-2`.
pub fn mapping_ladder(rungs: usize) -> Result<Vec<RadialGrid>, LabError> {
    (0..rungs).map(|k| grid_per_decade(32, 1e-2, 1e4 * 2f64.powi(k as i32)).context("mapping ladder")).collect()
}

/// Cutoff ladder for the spectral-bottom classification.
pub fn criticality_ladder(nodes_per_decade: usize) -> Result<Vec<RadialGrid>, LabError> {
    [1e3, 1e4, 1e5].iter().map(|&pm| grid_per_decade(nodes_per_decade, 1e-2, pm).context("criticality ladder")).collect()
}

pub fn counterexample_ladder() -> Result<Vec<RadialGrid>, LabError> {
    [1e2, 1e3, 1e4, 1e5, 1e6].iter().map(|&pm| grid_per_decade(32, 1e-2, pm).context("counterexample ladder")).collect()
}

pub const CRITICAL_RANGE: (f64, f64) = (2e-3, 5.0);

type Task = fn(&Resolved, &mut ResultRecord) -> Result<(), LabError>;

pub fn run(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let mut tasks: Vec<Task> = vec![operators, shell, equivalence, mapping, counterexample];
    if cfg.ell % 2 == 1 {
        tasks.push(criticality);
    }
    let parts: Vec<ResultRecord> = tasks
        .par_iter()
        .map(|task| {
            let mut part = rec.clone();
            task(cfg, &mut part).map(|_| part)
        })
        .collect::<Result<_, _>>()?;
    for p in parts {
        rec.scalars.extend(p.scalars);
        rec.series.extend(p.series);
        rec.checks.extend(p.checks);
        rec.notes.extend(p.notes);
    }
    Ok(())
}

fn mass(cfg: &Resolved) -> Result<MassParams, LabError> {
    MassParams::new(cfg.mass).context("mass")
}

fn operators(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let g = cfg.grid()?;
    let m = mass(cfg)?;
    let (ell, lambda, alpha) = (cfg.ell, cfg.lambda, cfg.alpha);
    rec.scalar("mu", m.mu);
    rec.scalar("nu", m.nu);
    let w = build_w(ell, lambda, m, &g).context("W")?;
    let t = build_t(ell, lambda, m, &g).context("T")?;
    let w_min = sorted_eigenvalues(&w.entries)[0];
    rec.scalar("w_min_eig", w_min);
    rec.check("w_positive", w_min, 0.0, w_min > 0.0, "smallest eigenvalue of W");

    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    for _ in 0..PAIRS {
        let xi = random_charge(&mut rng, &g, ell);
        let eta = random_charge(&mut rng, &g, ell);
        let a = pair_norm_u(&xi, &eta, lambda, m).context("pair norm")?;
        let b = sector_form(&w, &xi, &eta).context("W form")?;
        worst = worst.max((a - b).norm() / b.norm());
    }
    rec.check_below("pair_norm", worst, cfg.tol("pair_norm"), format!("<u_xi, u_eta> against <xi, W eta>, {PAIRS} pairs"));

    let a = build_a(ell, lambda, m, alpha, &g, SzeroSpec::Zero).context("A")?;
    let base = if ell == 0 { build_s0(SzeroSpec::Zero, lambda, m, &g).context("S0")? } else { t.clone() };
    let mut want = base.entries.clone() * 2.0;
    for i in 0..g.len() {
        want[(i, i)] += 2.0 * alpha;
    }
    let identity = (&w.entries * &a.entries - &want).norm() / t.entries.norm();
    rec.check_below("a_identity", identity, cfg.tol("a_identity"), "||W A - 2 (T + alpha)|| / ||T||");

    let mut sym = 0.0f64;
    for _ in 0..SYMMETRY_PAIRS {
        let x = random_charge(&mut rng, &g, ell).to_symmetric();
        let y = random_charge(&mut rng, &g, ell).to_symmetric();
        let wa_x = apply_complex(&w.entries, &apply_complex(&a.entries, &x));
        let wa_y = apply_complex(&w.entries, &apply_complex(&a.entries, &y));
        let lhs = dot_complex(&y, &wa_x);
        let rhs = dot_complex(&wa_y, &x);
        let scale = norm_complex(&x) * norm_complex(&y) * spectral_scale(&w.entries, &a.entries);
        sym = sym.max((lhs - rhs).norm() / scale);
    }
    rec.check_below("w_symmetry", sym, cfg.tol("w_symmetry"), format!("<eta, A xi>_W - <A eta, xi>_W over {SYMMETRY_PAIRS} pairs"));

    let xi = random_charge(&mut rng, &g, ell);
    let eta = Charge::from_symmetric(ell, &g, &apply_complex(&a.entries, &xi.to_symmetric()));
    let lhs = if ell == 0 { &base } else { &t };
    let res = tms_residual_21(&xi, &eta, alpha, lhs, &w).context("TMS residual")?;
    let scale = norm_complex(&apply_complex(&lhs.entries, &xi.to_symmetric())) + alpha.abs() * norm_complex(&xi.to_symmetric());
    rec.check_below("tms_residual", res / scale.max(f64::MIN_POSITIVE), cfg.tol("tms_residual"), "alpha xi + T xi - W eta / 2 with eta = A xi");
    Ok(())
}

fn spectral_scale(w: &Matrix, a: &Matrix) -> f64 {
    (w * a).norm().max(f64::MIN_POSITIVE)
}

fn shell(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let g = cfg.grid()?;
    let m = mass(cfg)?;
    let r = (1e4f64).min(0.5 * g.p_max);
    rec.scalar("shell_radius", r);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let mut worst = 0.0f64;
    let mut s = Series::new(&["p1", "re_constant", "re_predicted"]);
    for _ in 0..5 {
        let xi = random_charge(&mut rng, &g, cfg.ell);
        let eta = random_charge(&mut rng, &g, cfg.ell);
        let target: f64 = rng.gen_range(0.2..3.0);
        let p1 = g.nodes[g.nodes.partition_point(|&p| p < target).min(g.len() - 1)];
        let v = shell_integral_21(&xi, &eta, cfg.lambda, m, p1, r).context("shell integral")?;
        let (lead, constant) = shell_asymptotics_21(&xi, &eta, cfg.lambda, m, p1);
        let got = v - lead * r;
        worst = worst.max((got - constant).norm() / constant.norm());
        s.push(vec![p1, got.re, constant.re]);
    }
    rec.check_below("shell_constant", worst, cfg.tol("shell_constant"), "constant term against -T xi + W eta / 2, 5 charges");
    rec.series("shell_constant", s);
    Ok(())
}

fn equivalence(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let m = mass(cfg)?;
    let decades = (cfg.p_max / cfg.p_min).log10();
    let npd = ((cfg.n as f64 / decades).round() as usize).max(8);
    let ladder = vec![
        grid_per_decade(npd, cfg.p_min, cfg.p_max).context("ladder")?,
        grid_per_decade(npd, cfg.p_min, 10.0 * cfg.p_max).context("ladder")?,
        grid_per_decade(2 * npd, cfg.p_min, 10.0 * cfg.p_max).context("ladder")?,
    ];
    let r = norm_equivalence_bounds(cfg.ell, cfg.lambda, m, &ladder).context("norm equivalence")?;
    rec.scalar("c1_est", r.c1_est);
    rec.scalar("c2_est", r.c2_est);
    let mut s = Series::new(&["p_max", "nodes", "c1_est", "c2_est"]).log(true, false);
    for &(pm, n, c1, c2) in &r.ladder {
        s.push(vec![pm, n as f64, c1, c2]);
    }
    rec.series("norm_equivalence", s);
    rec.check(
        "norm_equivalence",
        r.max_variation,
        cfg.tol("norm_equivalence"),
        r.c1_est > 0.0 && r.c1_est <= r.c2_est && r.max_variation <= cfg.tol("norm_equivalence"),
        "0 < c1 <= c2, window stable across refinement",
    );
    Ok(())
}

fn mapping(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let m = mass(cfg)?;
    let ladder = mapping_ladder(4)?;
    let tol = cfg.tol("mapping_bounded");
    for (ell, s, name) in [(0usize, 1.0, "l0_s1"), (1, 1.5, "l1_s3_2"), (0, 1.5, "l0_s3_2")] {
        let r = mapping_norm_estimate(ell, s, cfg.lambda, m, &ladder).context("mapping norm")?;
        let mut ser = Series::new(&["p_max", "norm"]).log(true, false);
        for (pm, n) in r.cutoffs.iter().zip(&r.norms) {
            ser.push(vec![*pm, *n]);
        }
        rec.series(&format!("mapping_{name}"), ser);
        if name == "l0_s3_2" {
            rec.check("mapping_unbounded_l0_s3_2", r.last_variation, 0.0, r.strictly_increasing, "norm strictly increasing along the cutoff ladder");
        } else {
            rec.check_below(&format!("mapping_bounded_{name}"), r.last_variation, tol, "relative change over the final doubling");
        }
    }
    Ok(())
}

fn counterexample(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let m = mass(cfg)?;
    let r = counterexample_l0(cfg.lambda, m, &counterexample_ladder()?).context("counterexample")?;
    let mut s = Series::new(&["p_max", "squared_norm"]).log(true, false);
    for (pm, v) in r.cutoffs.iter().zip(&r.squared_norms) {
        s.push(vec![*pm, *v]);
    }
    rec.series("counterexample_l0", s);
    let mean = r.increments.iter().sum::<f64>() / r.increments.len() as f64;
    let spread = r.increments.iter().map(|d| (d - mean).abs() / mean).fold(0.0, f64::max);
    rec.scalar("counterexample_increment", mean);
    rec.check(
        "counterexample_increments",
        spread,
        cfg.tol("counterexample_increments"),
        mean > 0.0 && spread <= cfg.tol("counterexample_increments"),
        "squared H^{1/2} norm grows by a constant per decade of cutoff",
    );
    Ok(())
}

fn criticality(cfg: &Resolved, rec: &mut ResultRecord) -> Result<(), LabError> {
    let coarse = criticality_ladder(32)?;
    let fine = criticality_ladder(64)?;
    let (a, b) = rayon::join(
        || mass_criticality_scan(cfg.ell, cfg.lambda, &coarse, CRITICAL_RANGE, 2e-3),
        || mass_criticality_scan(cfg.ell, cfg.lambda, &fine, CRITICAL_RANGE, 2e-3),
    );
    match (a, b) {
        (Ok(a), Ok(b)) => {
            rec.scalar("m_crit", a.m_crit);
            rec.scalar("m_crit_refined", b.m_crit);
            let mut s = Series::new(&["m", "bottom_p1e3", "bottom_p1e4", "bottom_p1e5"]).log(true, false);
            let mut samples = a.samples.clone();
            samples.sort_by(|x, y| x.m.total_cmp(&y.m));
            for smp in &samples {
                s.push(vec![smp.m, smp.bottoms[0], smp.bottoms[1], smp.bottoms[2]]);
            }
            rec.series("criticality", s);
            rec.check_below("criticality", (a.m_crit - b.m_crit).abs() / b.m_crit, cfg.tol("criticality"), "critical mass under doubled node density");
        }
        (Err(tmslab_core::Error::NotBracketed), _) | (_, Err(tmslab_core::Error::NotBracketed)) => {
            rec.note("criticality", "no stable/unstable transition inside the scanned mass range");
        }
        (Err(e), _) | (_, Err(e)) => return Err(LabError::Numerical { context: "criticality", source: e }),
    }
    Ok(())
}
