use lpverify::harness::{error_code, estimate_bytes, exit_code, run_suite, Suite, SuiteConfig};
use lpverify::Error;

#[test]
fn core_suite_passes_on_a_small_grid() {
    let r = run_suite(&SuiteConfig::new(Suite::Core, 16)).unwrap();
    assert!(r.passed, "{:?}", r.failures().collect::<Vec<_>>());
    assert_eq!(exit_code(&Ok(r)), 0);
}

#[test]
fn tiny_grid_has_no_window() {
    let e = run_suite(&SuiteConfig::new(Suite::All, 8)).unwrap_err();
    assert!(matches!(e, Error::WindowTooSmall(_)), "{e:?}");
    assert_eq!(error_code(&e), 2);
}

#[test]
fn classical_reconstruction_holds_at_every_k() {
    let r = run_suite(&SuiteConfig::new(Suite::ClassicalIdentity, 32)).unwrap();
    let recon: Vec<_> = r
        .checks_for("classical-identity")
        .filter(|c| c.name.contains("reconstruction"))
        .collect();
    assert!(!recon.is_empty());
    assert!(recon.iter().all(|c| c.pass));
    assert!(r.passed);
}

#[test]
fn tolerance_override_can_fail_a_check() {
    let mut cfg = SuiteConfig::new(Suite::Core, 16);
    cfg.tolerances.insert("plancherel".into(), -1.0);
    let r = run_suite(&cfg).unwrap();
    assert!(!r.passed);
    assert!(r.failures().all(|c| c.name == "plancherel"));
    assert_eq!(exit_code(&Ok(r)), 1);
}

#[test]
fn validation_rejects_bad_configs() {
    let mut cfg = SuiteConfig::new(Suite::SHalf, 32);
    cfg.s = vec![0.6];
    assert!(matches!(cfg.validate(), Err(Error::Config(_))));

    let mut cfg = SuiteConfig::new(Suite::Core, 32);
    cfg.s = vec![0.5];
    assert!(cfg.validate().is_err());

    let mut cfg = SuiteConfig::new(Suite::Core, 32);
    cfg.theta = 1.0;
    assert!(cfg.validate().is_err());

    let mut cfg = SuiteConfig::new(Suite::Core, 32);
    cfg.k_window = Some([0, 9]);
    assert!(cfg.validate().is_err());

    let mut cfg = SuiteConfig::new(Suite::Core, 32);
    cfg.threads = Some(0);
    assert!(cfg.validate().is_err());
}

#[test]
fn json_configs_are_strict() {
    let ok: SuiteConfig =
        serde_json::from_str(r#"{"suite": "fractional-high", "n": 32, "s": [0.6]}"#).unwrap();
    assert_eq!(ok.suite, Suite::FractionalHigh);
    assert_eq!(ok.theta, 0.5);
    let bad = serde_json::from_str::<SuiteConfig>(r#"{"suite": "core", "n": 32, "sedd": 1}"#);
    assert!(bad.is_err());
}

#[test]
fn suite_names_round_trip() {
    for s in Suite::ALL.into_iter().chain([Suite::All]) {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
    assert!("nope".parse::<Suite>().is_err());
}

#[test]
fn budget_estimate_scales_with_volume() {
    assert_eq!(estimate_bytes(64), 8 * estimate_bytes(32));
}
