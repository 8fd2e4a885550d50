use lpverify::dyadic::DyadicWindow;
use lpverify::forge::{generate, SpectrumSpec};
use lpverify::ledger::*;
use lpverify::{TorusGrid, VectorField};

fn field(n: usize, seed: u64) -> VectorField {
    let g = TorusGrid::periodic(n).unwrap();
    generate(g, &SpectrumSpec::power_law(0.6, seed)).unwrap()
}

#[test]
fn classical_ledger_closes_at_every_k() {
    let u = field(32, 3);
    let w = DyadicWindow::for_grid(u.grid()).unwrap();
    for k in w.eval_range() {
        let ledgers = ledger_classical_multi(&u, k, &[0.25, 0.5, 0.75]).unwrap();
        for l in &ledgers {
            for c in &l.checks {
                assert!(c.pass, "k = {k} θ = {}: {c:?}", l.theta);
            }
        }
        let sums: Vec<f64> = ledgers
            .iter()
            .map(|l| l.term("I231").unwrap() + l.term("I232").unwrap())
            .collect();
        for s in &sums {
            assert!((s - sums[0]).abs() <= TOL_THETA * ledgers[0].scale);
        }
    }
}

fn shear(n: usize) -> VectorField {
    let g = TorusGrid::periodic(n).unwrap();
    generate(
        g,
        &SpectrumSpec::single_mode([0, 0, 1], [1.0, 0.0, 0.0], 1.0, 0.0),
    )
    .unwrap()
}

#[test]
fn advection_is_skew_for_divergence_free_fields() {
    let u = field(16, 4);
    let a = field(16, 5);
    let t = lpverify::dealias::trilinear(&u, &a, &a).unwrap();
    let scale = lpverify::dealias::trilinear(&u, &a, &u)
        .unwrap()
        .abs()
        .max(1.0);
    assert!(t.abs() <= 1e-12 * scale, "{t}");
}

#[test]
fn shear_flow_carries_no_transfer() {
    let u = shear(16);
    let w = DyadicWindow::for_grid(u.grid()).unwrap();
    for k in w.eval_range() {
        let l = ledger_classical(&u, k, 0.5).unwrap();
        for (name, v) in &l.terms {
            assert!(v.abs() <= 1e-14 * l.scale.max(1.0), "k = {k} {name} = {v}");
        }
    }
}

#[test]
fn zero_field_ledgers_vanish_exactly() {
    let z = VectorField::zeros(TorusGrid::periodic(16).unwrap());
    let w = DyadicWindow::for_grid(z.grid()).unwrap();
    for k in w.eval_range() {
        assert!(ledger_classical(&z, k, 0.5)
            .unwrap()
            .terms
            .values()
            .all(|v| *v == 0.0));
        if k >= 0 {
            assert!(ledger_fractional_high(&z, k, 0.6)
                .unwrap()
                .terms
                .values()
                .all(|v| *v == 0.0));
        }
        let e = energy_balance_residual(&z, &z, 1.0, k).unwrap();
        assert_eq!(e.residual, 0.0);
    }
}

#[test]
fn support_audit_finds_no_violations() {
    let u = field(32, 6);
    let w = DyadicWindow::for_grid(u.grid()).unwrap();
    for k in w.eval_range() {
        let a = support_audit(&u, k).unwrap();
        assert_eq!(a.violations, 0, "k = {k}");
        for e in a.entries.iter().filter(|e| e.disjoint) {
            assert_eq!(e.pairing, 0.0, "k = {k} {} l = {}", e.term, e.l);
        }
    }
}

#[test]
fn fractional_paths_reject_orders_outside_their_range() {
    let u = field(16, 7);
    assert!(ledger_fractional_low(&u, 0, 0.6).is_err());
    assert!(ledger_fractional_high(&u, 0, 0.9).is_err());
    assert!(ledger_fractional_high(&u, -1, 0.6).is_err());
}

#[test]
fn high_theta_at_the_endpoints() {
    assert_eq!(high_theta(0.5), 0.0);
    assert!((high_theta(0.7) - 0.5).abs() <= 1e-15);
    assert!((high_theta(5.0 / 6.0) - 1.0).abs() <= 1e-15);
}
