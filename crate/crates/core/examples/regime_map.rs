//! A coarse phase diagram: the regime of each (x, s) point and its prediction
//! against the quadrature truth.

use ftgap::fredholm::TruthOptions;
use ftgap::painleve::{hm_solve, pv_sigma_solve};
use ftgap::validation::{axis, regime_residual_scan, GridSample};

fn main() -> ftgap::Result<()> {
    let pii = hm_solve(-12.0, 8.0, 4000)?;
    let pv = pv_sigma_solve(12.0, 2000)?;
    let grid = GridSample::compute(axis(0.5, 4.0, 0.5)?, axis(-20.0, 100.0, 40.0)?, &TruthOptions::default())?;
    println!("{:>5} {:>6} {:>12} {:>14} {:>14} {:>10}", "x", "s", "regime", "prediction", "truth", "residual");
    for r in regime_residual_scan(&grid, &pii, &pv) {
        let f = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.6}"));
        let res = r.residual.map_or("-".to_string(), |v| format!("{v:.1e}"));
        println!("{:>5} {:>6} {:>12} {:>14} {:>14} {res:>10} {}", r.x, r.s, r.regime.to_string(), f(r.prediction), f(r.truth), r.error.unwrap_or_default());
    }
    Ok(())
}
