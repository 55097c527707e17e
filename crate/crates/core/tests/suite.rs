use tensor_gauss::verify::check::Outcome;
use tensor_gauss::verify::suite::{registry, run_suite, SuiteConfig};

#[test]
fn default_suite_passes_and_is_deterministic() {
    let config = SuiteConfig::default();
    let a = run_suite(&config).unwrap();
    println!("{}", a.to_text());
    assert!(a.passed(), "{}", a.to_text());
    let b = run_suite(&config).unwrap();
    assert_eq!(a, b);
}

#[test]
fn sigma_fault_fails_exactly_the_sigma_dependent_checks() {
    let config = SuiteConfig { sigma_scale: Some(1.1), ..Default::default() };
    let report = run_suite(&config).unwrap();
    println!("{}", report.to_text());
    let specs = registry();
    for spec in &specs {
        let records: Vec<_> = report.records.iter().filter(|r| r.check_id == spec.id).collect();
        assert!(!records.is_empty());
        let failed = records.iter().any(|r| r.outcome == Outcome::Fail);
        assert_eq!(failed, spec.sigma_dependent, "{}", spec.id);
    }
}
