//! Each large-gap expansion against the truth inside its own regime.

use ftgap::asymptotics::{asy_no_gap, asy_one_gap, asy_pv_regime, asy_transition, x_from_scaled_y};
use ftgap::fredholm::gap_log_det;
use ftgap::painleve::{hm_solve, pv_sigma_solve};

fn main() -> ftgap::Result<()> {
    let pii = hm_solve(-12.0, 8.0, 4000)?;
    let pv = pv_sigma_solve(12.0, 2000)?;

    println!("no-gap, s = 0");
    for x in [2.0, 4.0, 6.0] {
        let t = gap_log_det(x, 0.0)?.log_det;
        println!("  x = {x}: truth {t:.14}, residual {:.2e}", asy_no_gap(x, 0.0)? - t);
    }
    println!("one-gap, s = 50 (error O(s))");
    for l in [0.3, 0.5, 0.7] {
        let x = 2.0 * l * 50f64.sqrt() / std::f64::consts::PI;
        let t = gap_log_det(x, 50.0)?.log_det;
        println!("  l = {l}: truth {t:.6}, residual / s {:.3}", (asy_one_gap(x, 50.0)? - t) / 50.0);
    }
    println!("transition, s = 50");
    for y in [-2.0, 0.0, 2.0] {
        let x = x_from_scaled_y(y, 50.0)?;
        let t = gap_log_det(x, 50.0)?.log_det;
        println!("  y = {y}: truth {t:.6}, residual {:.3e}", asy_transition(x, 50.0, &pii)? - t);
    }
    println!("Painleve V, s = 400");
    for tau in [0.5, 1.0, 2.0] {
        let x = tau / 20.0;
        let t = gap_log_det(x, 400.0)?.log_det;
        println!("  sqrt(s) x = {tau}: truth {t:.12}, residual {:.2e}", asy_pv_regime(x, 400.0, &pv)? - t);
    }
    Ok(())
}
