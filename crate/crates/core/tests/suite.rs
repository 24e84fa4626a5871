use cauchy_lipschitz::identities::{run_identity_suite, SuiteSpec};
use cauchy_lipschitz::{CurveSpec, QuadConfig};

fn wedge_suite() -> SuiteSpec {
    let mut spec = SuiteSpec::with_curves(vec![CurveSpec::wedge(0.5).unwrap()]);
    spec.curve_free = false;
    spec.tau_grid = cauchy_lipschitz::transform::log_grid(1e-2, 1e2, 6).unwrap();
    spec.distortion_samples = 2000;
    spec
}

#[test]
fn loosened_tolerances_still_pass() {
    let cfg = QuadConfig::default();
    let loose = QuadConfig {
        rel_tol: cfg.rel_tol * 10.0,
        ..cfg.clone()
    };
    for c in [cfg, loose] {
        let report = run_identity_suite(&wedge_suite(), &c);
        let failed: Vec<_> = report.failed_rows().map(|r| (&r.id, &r.case, &r.note)).collect();
        assert!(report.pass, "{failed:?}");
    }
}

#[test]
fn rows_come_out_in_registration_order() {
    let report = run_identity_suite(&wedge_suite(), &QuadConfig::default());
    let ids: Vec<&str> = report.rows.iter().map(|r| r.id.as_str()).collect();
    let first = |id: &str| ids.iter().position(|x| *x == id).unwrap();
    assert!(first("kz_normalization") < first("schur_row_integral"));
    assert!(first("schur_row_integral") < first("norm_scan_bound"));
    assert!(first("plemelj_jump") < first("cauchy_riemann"));
    assert!(first("cauchy_riemann") < first("distortion_lower"));
    let again = run_identity_suite(&wedge_suite(), &QuadConfig::default()).without_timings();
    assert_eq!(again.to_json(), report.without_timings().to_json());
}

#[test]
fn curve_free_rows_cover_special_functions_and_identities() {
    let mut spec = SuiteSpec::empty();
    spec.curve_free = true;
    let report = run_identity_suite(&spec, &QuadConfig::default());
    assert!(report.pass);
    for id in ["gamma_half", "beta_closed_form", "beta_integral", "koebe_inf_value", "green_identity", "green_anchor", "littlewood_paley", "littlewood_paley_anchor"] {
        assert!(report.rows.iter().any(|r| r.id == id), "missing {id}");
    }
}
