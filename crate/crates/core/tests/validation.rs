use ftgap::asymptotics::Regime;
use ftgap::fredholm::TruthOptions;
use ftgap::painleve::{hm_solve, pv_sigma_solve};
use ftgap::validation::{axis, poisson_limit_check, regime_residual_scan, run_suite, GridSample, Suite};

#[test]
fn fast_suites_pass() {
    let pii = hm_solve(-12.0, 8.0, 4000).unwrap();
    let pv = pv_sigma_solve(12.0, 2000).unwrap();
    for suite in [Suite::Equivalence, Suite::Limits, Suite::Painleve] {
        let report = run_suite(suite, &pii, &pv);
        let failed: Vec<_> = report.checks.iter().filter(|c| !c.passed).collect();
        assert!(report.passed && failed.is_empty(), "{}: {failed:#?}", suite.name());
    }
}

#[test]
fn poisson_limit_improves_with_colder_filling() {
    let shallow = poisson_limit_check(2.0, -12.0).unwrap();
    let deep = poisson_limit_check(2.0, -24.0).unwrap();
    assert!(shallow < 1e-4);
    assert!(deep < shallow * 1e-3, "{deep:e} vs {shallow:e}");
    assert!(poisson_limit_check(2.0, 0.0).unwrap_err().is_precondition());
}

#[test]
fn regime_scan_covers_the_grid_and_keeps_failures_per_point() {
    let pii = hm_solve(-12.0, 8.0, 4000).unwrap();
    let pv = pv_sigma_solve(12.0, 2000).unwrap();
    let grid = GridSample::compute(axis(1.0, 3.0, 1.0).unwrap(), axis(-4.0, 16.0, 10.0).unwrap(), &TruthOptions::default())
        .unwrap();
    assert!(grid.errors.is_empty());
    assert_eq!(grid.monotonicity_defect(), 0.0);
    let reports = regime_residual_scan(&grid, &pii, &pv);
    assert_eq!(reports.len(), 9);
    assert!(reports.windows(2).all(|w| (w[0].s, w[0].x) <= (w[1].s, w[1].x)));
    for r in &reports {
        assert!(r.truth.is_some());
        if r.regime == Regime::NoGap && r.s <= 0.0 {
            assert!(r.residual.unwrap().abs() < 1e-3, "{r:?}");
        }
    }
}
