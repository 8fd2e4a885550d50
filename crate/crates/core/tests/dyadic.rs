use lpverify::dyadic::{
    bernstein_check, block, lattice_blocks, lowpass, tail, tilde_block, DyadicProfile,
    DyadicWindow, Region,
};
use lpverify::forge::{generate, SpectrumSpec};
use lpverify::paraproduct::pairwise_sum;
use lpverify::spectral::transform_forward;
use lpverify::{SpectralField, TorusGrid};
use proptest::prelude::*;

fn scalar(n: usize, alpha: f64, seed: u64) -> SpectralField {
    let g = TorusGrid::periodic(n).unwrap();
    generate(g, &SpectrumSpec::power_law(alpha, seed))
        .unwrap()
        .comp(0)
        .clone()
}

#[test]
fn profile_sums_to_one_on_the_plateau() {
    for i in 1..200 {
        let r = 0.05 * i as f64;
        let total: f64 = (-8..8).map(|k| DyadicProfile::phi(r / 2f64.powi(k))).sum();
        assert!((total - 1.0).abs() < 1e-14, "r = {r}");
    }
}

#[test]
fn blocks_vanish_exactly_outside_their_annulus() {
    let f = scalar(32, 0.3, 1);
    let g = *f.grid();
    let geo = g.geometry();
    for k in lattice_blocks(&g) {
        let b = block(&f, k);
        for (c, &r) in b.coeffs().iter().zip(&geo.norm) {
            if r <= 2f64.powi(k - 1) || r >= 2f64.powi(k + 1) {
                assert_eq!(c.norm(), 0.0, "k = {k}, r = {r}");
            }
        }
    }
}

#[test]
fn low_pass_of_unit_mode_is_the_mode() {
    let g = TorusGrid::periodic(16).unwrap();
    let s = transform_forward(g, &g.sample(|x| x[2].sin())).unwrap();
    // round-off outside |ξ| = 1 is the only thing the operators may remove
    let tol = 1e-15 * s.max_abs();
    assert!((&lowpass(&s, 1) - &s).max_abs() <= tol);
    assert!(lowpass(&s, -1).max_abs() <= tol);
    assert!(tail(&s, 1).max_abs() <= tol);
    // |ξ| = 1 sits where φ(1) = 1
    assert!((&block(&s, 0) - &s).max_abs() <= tol);
}

#[test]
fn tilde_block_is_three_blocks() {
    let f = scalar(32, 0.0, 2);
    let k = 1;
    let direct = &(&block(&f, k - 1) + &block(&f, k)) + &block(&f, k + 1);
    assert!((&tilde_block(&f, k) - &direct).max_abs() <= 1e-15 * f.max_abs());
}

#[test]
fn l2_bernstein_bounds_hold_on_every_block() {
    let f = scalar(32, -0.5, 3);
    for k in lattice_blocks(f.grid()) {
        let rep = bernstein_check(&block(&f, k), k, Region::Annulus, 2.0, 2.0).unwrap();
        assert!(rep.l2_bounds_hold, "k = {k}");
    }
}

#[test]
fn bernstein_rejects_misplaced_support() {
    let f = scalar(32, 0.0, 4);
    assert!(bernstein_check(&block(&f, 2), 0, Region::Annulus, 2.0, 2.0).is_err());
}

/// `max_k ‖Δ̇_k u‖_∞ / (2^{3k/2} ‖Δ̇_k u‖₂)` for a field carried identically
/// by both grids.
fn sup_ratio(n: usize) -> f64 {
    let g = TorusGrid::periodic(n).unwrap();
    let u = generate(g, &SpectrumSpec::power_law(0.4, 17).with_band(0, 3)).unwrap();
    (0..=3)
        .map(|k| {
            bernstein_check(&block(u.comp(0), k), k, Region::Annulus, 2.0, f64::INFINITY)
                .unwrap()
                .lift_ratio
        })
        .fold(0.0, f64::max)
}

#[test]
fn l2_to_sup_constant_is_stable_under_refinement() {
    let (a, b) = (sup_ratio(64), sup_ratio(128));
    assert!(a > 0.0 && a.is_finite());
    assert!((b - a).abs() <= 0.15 * a, "{a} vs {b}");
}

#[test]
fn window_examples() {
    for (n, lo, hi) in [(32, 0, 2), (64, 0, 3), (128, 0, 4)] {
        let w = DyadicWindow::for_grid(&TorusGrid::periodic(n).unwrap()).unwrap();
        assert_eq!((w.k_min, w.k_max), (lo, hi));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn blocks_reconstruct_and_telescope(seed in 0u64..10_000, alpha in -1.5f64..1.5) {
        let f = scalar(16, alpha, seed);
        let g = *f.grid();
        let blocks: Vec<i32> = lattice_blocks(&g).collect();
        let parts: Vec<SpectralField> = blocks.iter().map(|&k| block(&f, k)).collect();
        let amp = f.max_abs();
        prop_assert!((&pairwise_sum(g, parts.clone()) - &f).max_abs() <= 1e-12 * amp);
        for (i, &k) in blocks.iter().enumerate() {
            let d = &(&lowpass(&f, k + 1) - &lowpass(&f, k)) - &parts[i];
            prop_assert!(d.max_abs() <= 1e-12 * amp);
            for &j in &blocks {
                if (j - k).abs() >= 2 {
                    prop_assert_eq!(block(&parts[i], j).max_abs(), 0.0);
                }
            }
        }
    }
}
