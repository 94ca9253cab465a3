//! The Hastings–McLeod solution of Painlevé II with its Hamiltonian and the
//! Tracy–Widom log-CDF, and the sigma-form Painlevé V solution attached to the
//! classical sine-kernel determinant.

mod hastings_mcleod;
mod ode;
mod sigma_pv;

pub use hastings_mcleod::{hm_left_asymptotic, hm_solve, PainleveIITable, PII_DEFAULT_N, PII_DEFAULT_WINDOW};
pub use ode::{dormand_prince, OdeOptions, OdeSolution};
pub use sigma_pv::{
    logdet_sine_via_pv, pv_sigma_solve, sigma_pv_residual, SigmaPVTable, PV_DEFAULT_N, PV_DEFAULT_TAU_MAX,
    PV_TAU0,
};

use crate::error::{Error, Result};

/// Cubic Hermite interpolation on [t0, t1] from values and slopes.
pub(crate) fn hermite(t0: f64, t1: f64, f0: f64, d0: f64, f1: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    let r = (t - t0) / h;
    let r2 = r * r;
    let r3 = r2 * r;
    let h00 = 2.0 * r3 - 3.0 * r2 + 1.0;
    let h10 = r3 - 2.0 * r2 + r;
    let h01 = -2.0 * r3 + 3.0 * r2;
    let h11 = r3 - r2;
    h00 * f0 + h10 * h * d0 + h01 * f1 + h11 * h * d1
}

/// Index `k` of the uniform-grid cell [t_k, t_{k+1}] that contains `t`.
pub(crate) fn cell_of(grid: &[f64], t: f64) -> usize {
    let n = grid.len();
    let h = (grid[n - 1] - grid[0]) / (n - 1) as f64;
    let k = ((t - grid[0]) / h).floor();
    (k.max(0.0) as usize).min(n - 2)
}

pub(crate) fn check_window(what: &'static str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfRange { what, value, lo, hi })
    }
}

/// log F_TW(y) from a prepared Painlevé II table.
pub fn tw_log_cdf(y: f64, table: &PainleveIITable) -> Result<f64> {
    table.tw_log_cdf(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubics() {
        let f = |t: f64| t * t * t - 2.0 * t + 1.0;
        let d = |t: f64| 3.0 * t * t - 2.0;
        let v = hermite(0.5, 1.5, f(0.5), d(0.5), f(1.5), d(1.5), 1.1);
        assert!((v - f(1.1)).abs() < 1e-14);
    }

    #[test]
    fn cell_lookup() {
        let g: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        assert_eq!(cell_of(&g, 0.0), 0);
        assert_eq!(cell_of(&g, 0.25), 2);
        assert_eq!(cell_of(&g, 1.0), 9);
    }
}
