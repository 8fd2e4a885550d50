use lpverify::dyadic::DyadicWindow;
use lpverify::forge::{advection, generate, picard_solve, steady_residual, SpectrumSpec};
use lpverify::ledger::energy_balance_residual;
use lpverify::norms::block_l2;
use lpverify::spectral::{divergence, transform_inverse};
use lpverify::{Error, TorusGrid};

#[test]
fn taylor_green_is_divergence_free_and_analytic() {
    let g = TorusGrid::periodic(16).unwrap();
    let u = generate(g, &SpectrumSpec::taylor_green(1.0)).unwrap();
    assert!(divergence(&u).unwrap().max_abs() <= 1e-13 * u.max_abs());
    let want = g.sample(|x| x[0].sin() * x[1].cos() * x[2].cos());
    let got = transform_inverse(u.comp(0));
    let err = want
        .iter()
        .zip(&got)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    assert!(err <= 1e-13);
}

#[test]
fn power_law_block_norms_follow_the_slope() {
    let g = TorusGrid::periodic(128).unwrap();
    let w = DyadicWindow::for_grid(&g).unwrap();
    let alpha = 1.2;
    let u = generate(g, &SpectrumSpec::power_law(alpha, 31)).unwrap();
    assert!(u.is_div_free());
    for k in w.k_min..w.k_max {
        let step = (block_l2(&u, k + 1) / block_l2(&u, k)).log2();
        assert!((step + alpha).abs() <= 0.05, "k = {k}: {step}");
    }
}

#[test]
fn seeded_fields_are_reproducible_and_refinement_invariant() {
    let spec = SpectrumSpec::power_law(0.3, 12).with_band(0, 2);
    let a = generate(TorusGrid::periodic(32).unwrap(), &spec).unwrap();
    let b = generate(TorusGrid::periodic(32).unwrap(), &spec).unwrap();
    assert_eq!(a.comp(1).coeffs(), b.comp(1).coeffs());
    let fine = generate(TorusGrid::periodic(64).unwrap(), &spec).unwrap();
    assert!((fine.energy() - a.energy()).abs() <= 1e-12 * a.energy());
}

#[test]
fn band_outside_the_window_is_rejected() {
    let g = TorusGrid::periodic(32).unwrap();
    let r = generate(g, &SpectrumSpec::power_law(0.0, 1).with_band(0, 5));
    assert!(matches!(r, Err(Error::GuardBand(_))));
}

#[test]
fn shear_is_a_steady_solution_in_one_step() {
    let g = TorusGrid::periodic(16).unwrap();
    // |m| = 1, so the forcing equals the solution for every s
    let f = generate(
        g,
        &SpectrumSpec::single_mode([0, 0, 1], [1.0, 0.0, 0.0], 1.0, 0.0),
    )
    .unwrap();
    assert!(advection(&f).unwrap().max_abs() <= 1e-14);
    let sol = picard_solve(&f, 0.75, 10, 1e-13).unwrap();
    assert_eq!(sol.iterations, 1);
    assert!(sol.u.try_sub(&f).unwrap().max_abs() <= 1e-13);
}

#[test]
fn weakly_forced_taylor_green_converges_and_balances() {
    let g = TorusGrid::periodic(32).unwrap();
    let f = generate(g, &SpectrumSpec::taylor_green(1e-2)).unwrap();
    let sol = picard_solve(&f, 1.0, 30, 1e-10).unwrap();
    assert!(sol.residual <= 1e-10);
    let r = steady_residual(&sol.u, &f, 1.0).unwrap().energy().sqrt() / f.energy().sqrt();
    assert!(r <= 1e-10);
    let w = DyadicWindow::for_grid(&g).unwrap();
    for k in w.eval_range() {
        let e = energy_balance_residual(&sol.u, &f, 1.0, k).unwrap();
        assert!(e.residual <= 1e-9 * e.scale, "k = {k}: {e:?}");
    }
}

#[test]
fn picard_rejects_orders_below_one_half() {
    let g = TorusGrid::periodic(16).unwrap();
    let f = generate(g, &SpectrumSpec::taylor_green(1e-2)).unwrap();
    assert!(picard_solve(&f, 0.4, 10, 1e-10).is_err());
}
