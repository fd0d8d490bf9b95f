use tmslab_core::quad::{build_grid, default_grid, GridScheme};
use tmslab_core::stm::{danilov_fit, stm_level_count, stm_null_vector, stm_spectrum, thomas_ratio_check};

#[test]
fn cascade_on_default_grid() {
    let g = default_grid();
    let lv = stm_spectrum(0.0, &g, 4).unwrap();
    println!("{lv:?}");
    assert!(lv.energies.len() >= 3);
    assert!(lv.energies.windows(2).all(|w| w[0] > 0.0 && w[1] > w[0]));
    assert!(lv.ratios.iter().all(|&r| r > 1.0));
    let chk = thomas_ratio_check(&lv).unwrap();
    assert!(chk.max_pairwise_deviation.unwrap() < 0.01, "{chk:?}");

    // Each located level is a zero of one eigenvalue branch: the count of
    // negative eigenvalues drops by one across it.
    for &e in &lv.energies {
        let below = stm_level_count(e * (1.0 - 1e-6), 0.0, &g).unwrap();
        let above = stm_level_count(e * (1.0 + 1e-6), 0.0, &g).unwrap();
        assert_eq!(below, above + 1);
    }

    let e = lv.energies[0];
    let xi = stm_null_vector(e, 0.0, &g, lv.eigen_index[0]).unwrap();
    let fit = danilov_fit(&xi, (30.0 * e.sqrt(), g.p_max / 30.0)).unwrap();
    println!("{fit:?}");
    assert!((fit.s0 - chk.s0_estimate).abs() < 0.02 * chk.s0_estimate);
}

#[test]
fn unitary_limit_scale_covariance() {
    let g = build_grid(GridScheme::GaussLegendreComposite, 384, 1e-3, 1e4).unwrap();
    let c = 2.0;
    let a = stm_spectrum(0.0, &g, 3).unwrap();
    let b = stm_spectrum(0.0, &g.scaled(c), 3).unwrap();
    let n = a.energies.len().min(b.energies.len());
    assert!(n >= 2);
    // Match levels by value: scaled energies should coincide with c^2 E_n.
    for ea in &a.energies {
        let want = c * c * ea;
        let best = b.energies.iter().map(|eb| (eb - want).abs() / want).fold(f64::INFINITY, f64::min);
        if want <= b.uv_ceiling && want >= b.ir_floor {
            assert!(best < 0.01, "E={ea} best={best}");
        }
    }
}
