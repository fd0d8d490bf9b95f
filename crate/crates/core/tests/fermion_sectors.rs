use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use tmslab_core::fermion::*;
use tmslab_core::kernels::{Charge, MassParams};
use tmslab_core::linalg::sorted_eigenvalues;
use tmslab_core::quad::{build_grid, default_grid, grid_per_decade, GridScheme, RadialGrid};

fn random_charge<'g>(rng: &mut ChaCha8Rng, g: &'g RadialGrid, ell: usize) -> Charge<'g> {
    let a: f64 = rng.gen_range(0.3..5.0);
    let k: i32 = rng.gen_range(2..4);
    let c = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    let ph: f64 = rng.gen_range(-1.0..1.0);
    Charge::from_fn(ell, g, move |p| c * Complex64::from_polar((p / a).powi(ell as i32) / (1.0 + p * p / (a * a)).powi(k), ph * p))
}

#[test]
fn w_positive_on_parameter_table() {
    let g = build_grid(GridScheme::GaussLegendreComposite, 256, 1e-4, 1e4).unwrap();
    for ell in 0..=4 {
        for lambda in [0.1, 1.0, 10.0] {
            for m in [0.5, 1.0, 5.0] {
                let w = build_w(ell, lambda, MassParams::new(m).unwrap(), &g).unwrap();
                assert!(sorted_eigenvalues(&w.entries)[0] > 0.0, "l={ell} lambda={lambda} m={m}");
            }
        }
    }
}

#[test]
fn pair_norm_identity_random_pairs() {
    let g = build_grid(GridScheme::GaussLegendreComposite, 128, 1e-3, 1e3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mass = MassParams::new(1.7).unwrap();
    for ell in 0..=3 {
        let w = build_w(ell, 1.0, mass, &g).unwrap();
        for _ in 0..50 {
            let xi = random_charge(&mut rng, &g, ell);
            let eta = random_charge(&mut rng, &g, ell);
            let a = pair_norm_u(&xi, &eta, 1.0, mass).unwrap();
            let b = sector_form(&w, &xi, &eta).unwrap();
            assert!((a - b).norm() < 1e-6 * b.norm().max(1e-300));
        }
    }
}

#[test]
fn mapping_norm_dichotomy() {
    let ladder: Vec<RadialGrid> = (0..4).map(|k| grid_per_decade(32, 1e-2, 1e4 * 2f64.powi(k)).unwrap()).collect();
    let m1 = MassParams::new(1.0).unwrap();
    let bounded0 = mapping_norm_estimate(0, 1.0, 1.0, m1, &ladder).unwrap();
    let bounded1 = mapping_norm_estimate(1, 1.5, 1.0, m1, &ladder).unwrap();
    let unbounded = mapping_norm_estimate(0, 1.5, 1.0, m1, &ladder).unwrap();
    println!("{bounded0:?}\n{bounded1:?}\n{unbounded:?}");
    assert!(bounded0.last_variation < 0.05);
    assert!(bounded1.last_variation < 0.05);
    assert!(unbounded.strictly_increasing);
    // Growth per doubling stays away from zero.
    let inc: Vec<f64> = unbounded.norms.windows(2).map(|w| w[1] - w[0]).collect();
    assert!(inc.iter().all(|&d| d > 0.5 * inc[0]));
}

#[test]
fn counterexample_grows_logarithmically() {
    let ladder: Vec<RadialGrid> = [1e2, 1e3, 1e4, 1e5, 1e6].iter().map(|&pm| grid_per_decade(32, 1e-2, pm).unwrap()).collect();
    let r = counterexample_l0(1.0, MassParams::new(1.0).unwrap(), &ladder).unwrap();
    println!("{r:?}");
    let model = 16.0 * PI * PI / 9.0 * 10f64.ln();
    for d in &r.increments {
        assert!((d - model).abs() < 0.1 * model);
    }
    let (lo, hi) = r.decay_band;
    assert!(lo > 0.0 && hi < 2.0 * lo);
    // The grid misses the ball below p_min = 1e-2, a relative 3 p_min^3 of the indicator mass.
    assert!(r.profile_defect < 1e-5);
}

#[test]
fn norm_equivalence_window() {
    let m1 = MassParams::new(1.0).unwrap();
    let ladder = [grid_per_decade(32, 1e-3, 1e3).unwrap(), grid_per_decade(32, 1e-3, 1e4).unwrap(), grid_per_decade(64, 1e-3, 1e4).unwrap()];
    let mut windows = Vec::new();
    for lambda in [0.5, 1.0, 2.0] {
        let r = norm_equivalence_bounds(0, lambda, m1, &ladder).unwrap();
        assert!(0.0 < r.c1_est && r.c1_est <= r.c2_est);
        assert!(r.max_variation < 0.1, "{r:?}");
        windows.push((r.c1_est, r.c2_est));
    }
    println!("{windows:?}");
    // Continuous in lambda: neighbouring windows differ by a bounded factor.
    for w in windows.windows(2) {
        assert!((w[1].0 / w[0].0 - 1.0).abs() < 0.5 && (w[1].1 / w[0].1 - 1.0).abs() < 0.5);
    }
}

#[test]
fn shell_asymptotics_constant_term() {
    let g = grid_per_decade(32, 1e-3, 1e5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mass = MassParams::new(1.3).unwrap();
    let r = 1e4;
    for k in 0..5 {
        let ell = k % 2;
        let xi = random_charge(&mut rng, &g, ell);
        let eta = random_charge(&mut rng, &g, ell);
        let p1 = g.nodes[g.nodes.partition_point(|&p| p < rng.gen_range(0.2..3.0))];
        let v = shell_integral_21(&xi, &eta, 1.0, mass, p1, r).unwrap();
        let (lead, constant) = shell_asymptotics_21(&xi, &eta, 1.0, mass, p1);
        let got = v - lead * r;
        assert!((got - constant).norm() < 1e-3 * constant.norm(), "l={ell} got={got} want={constant}");
    }
}

#[test]
fn shell_constant_term_separates() {
    // eta = 0: the constant tends to -T xi(p1) with an O(1/R) approach.
    let g = grid_per_decade(32, 1e-3, 1e5).unwrap();
    let m1 = MassParams::new(1.0).unwrap();
    let xi = Charge::from_fn(0, &g, |p| Complex64::new((-(p.ln() / 0.3).powi(2)).exp(), 0.0));
    let zero = Charge::zero(0, &g);
    let p1 = g.nodes[g.nodes.partition_point(|&p| p < 1.0)];
    let (lead, c) = shell_asymptotics_21(&xi, &zero, 1.0, m1, p1);
    let errs: Vec<f64> = [1e2, 1e3, 1e4]
        .iter()
        .map(|&r| (shell_integral_21(&xi, &zero, 1.0, m1, p1, r).unwrap() - lead * r - c).norm())
        .collect();
    assert!(errs[1] < 0.2 * errs[0] && errs[2] < 0.2 * errs[1], "{errs:?}");
    // xi = 0, eta a bump: the constant is W eta(p1) / 2.
    let (lead, c) = shell_asymptotics_21(&zero, &xi, 1.0, m1, p1);
    assert_eq!(lead.norm(), 0.0);
    let v = shell_integral_21(&zero, &xi, 1.0, m1, p1, 1e4).unwrap();
    assert!((v - c).norm() < 1e-3 * c.norm());
    assert!(shell_integral_21(&xi, &zero, 1.0, m1, p1, 6e4).is_err());
}

#[test]
fn shell_terms_reduce_to_two_body_at_zero_momentum() {
    use tmslab_core::kernels::{truncated_ball_integral, truncated_squared_integral};
    use tmslab_core::twobody::{shell_integral_2b, SingularPair2B};
    let m = MassParams::new(2.0).unwrap();
    for r in [0.5, 3.0, 1e3] {
        let ball = truncated_ball_integral(1e-10, m.mu, m.nu, 2.0, r);
        let sq = truncated_squared_integral(1e-10, m.mu, m.nu, 2.0, r);
        let two = shell_integral_2b(&SingularPair2B::new(Complex64::new(1.0, 0.0), Complex64::new(0.5, 0.0), 2.0).unwrap(), r);
        assert!((ball + 0.5 * sq - two.re).abs() < 1e-9 * two.re.abs());
    }
}

/// `int int |xi(p1) - xi(p2)|^2 / (p1^2 + p2^2 + p1.p2 + 1)^2 dp1 dp2` over `R^6` for
/// `xi = (1 + p^2)^{-2}`, by importance sampling with radial density `1 / (1 + r)^2`.
fn monte_carlo_norm(samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xi = |r2: f64| 1.0 / ((1.0 + r2) * (1.0 + r2));
    let draw = |rng: &mut ChaCha8Rng| -> ([f64; 3], f64) {
        let u: f64 = rng.gen();
        let r = u / (1.0 - u);
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        let dens = 1.0 / ((1.0 + r) * (1.0 + r) * 4.0 * PI * r * r);
        ([r * s * phi.cos(), r * s * phi.sin(), r * z], dens)
    };
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let (a, da) = draw(&mut rng);
        let (b, db) = draw(&mut rng);
        let a2 = a[0] * a[0] + a[1] * a[1] + a[2] * a[2];
        let b2 = b[0] * b[0] + b[1] * b[1] + b[2] * b[2];
        let ab = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        let d = a2 + b2 + ab + 1.0;
        let f = (xi(a2) - xi(b2)).powi(2) / (d * d) / (da * db);
        sum += f;
        sum2 += f * f;
    }
    let n = samples as f64;
    let mean = sum / n;
    (mean, ((sum2 / n - mean * mean) / n).sqrt())
}

#[test]
fn pair_norm_against_monte_carlo() {
    let g = default_grid();
    let xi = Charge::from_fn(0, &g, |p| Complex64::new(1.0 / (1.0 + p * p).powi(2), 0.0));
    let radial = pair_norm_u(&xi, &xi, 1.0, MassParams::new(1.0).unwrap()).unwrap().re;
    // The sector value carries the spherical harmonic Y_00; the full 3D integral is 4 pi times it.
    let full = 4.0 * PI * radial;
    let (mc, se) = monte_carlo_norm(10_000_000, 2024);
    println!("full={full} mc={mc} se={se}");
    assert!((mc - full).abs() < 1e-2 * full);
}
