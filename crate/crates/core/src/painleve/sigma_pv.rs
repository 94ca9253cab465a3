use std::f64::consts::PI;

use serde::Serialize;

use super::ode::{dormand_prince, OdeOptions};
use super::{cell_of, check_window, hermite};
use crate::error::{Error, Result};
use crate::fredholm::{sine_log_derivative, sine_log_derivative_pair};
use crate::quadrature::gauss_legendre_shared;

pub const PV_TAU0: f64 = 1e-3;
pub const PV_DEFAULT_TAU_MAX: f64 = 12.0;
pub const PV_DEFAULT_N: usize = 2000;

const FIT_POINTS: [f64; 2] = [5e-3, 1e-2];
const CHECK_POINTS: [f64; 3] = [0.5, 1.0, 2.0];
const CHECK_TOL: f64 = 1e-4;
const ORACLE_NODES: usize = 60;
/// Relative size below which a negative radicand counts as rounding noise.
const RADICAND_SLACK: f64 = 1e-10;

const A: f64 = 2.0 / PI;

/// Tabulated solution of the sigma-form Painlevé V equation with sine-kernel
/// boundary behaviour, v(τ) = τ d/dτ log det(I − K_sin,τ).
#[derive(Debug, Clone, Serialize)]
pub struct SigmaPVTable {
    pub tau: Vec<f64>,
    pub v: Vec<f64>,
    pub dv: Vec<f64>,
    /// Coefficients of v = −aτ − a²q₂τ² − a³q₃τ³ with a = 2/π near τ = 0.
    pub q2: f64,
    pub q3: f64,
}

fn series(tau: f64, q2: f64, q3: f64) -> (f64, f64) {
    let at = A * tau;
    let v = -at * (1.0 + at * (q2 + at * q3));
    let dv = -A * (1.0 + at * (2.0 * q2 + 3.0 * at * q3));
    (v, dv)
}

/// Right-hand side v″ = −(2/τ)√((4v − 4τv′ − v′²)(τv′ − v)).
fn second_derivative(tau: f64, v: f64, dv: f64) -> Result<f64> {
    let p = 4.0 * v - 4.0 * tau * dv - dv * dv;
    let q = tau * dv - v;
    let mut radicand = p * q;
    if radicand < 0.0 {
        let scale = (4.0 * v.abs() + 4.0 * (tau * dv).abs() + dv * dv) * ((tau * dv).abs() + v.abs());
        if radicand < -RADICAND_SLACK * scale {
            return Err(Error::Branch { tau, radicand });
        }
        radicand = 0.0;
    }
    Ok(-2.0 / tau * radicand.sqrt())
}

/// Left-hand side of (τv″)² + 4(4v − 4τv′ − v′²)(v − τv′) = 0 divided by the
/// size of its terms.
pub fn sigma_pv_residual(tau: f64, v: f64, dv: f64, ddv: f64) -> f64 {
    let first = (tau * ddv).powi(2);
    let second = 4.0 * (4.0 * v - 4.0 * tau * dv - dv * dv) * (v - tau * dv);
    let scale = first.abs() + second.abs();
    if scale == 0.0 {
        0.0
    } else {
        (first + second).abs() / scale
    }
}

/// Fits q₂, q₃ so that the cubic series reproduces the Nyström values of v.
fn fit_series() -> Result<(f64, f64)> {
    let mut r = [0.0; 2];
    for (slot, &tau) in r.iter_mut().zip(&FIT_POINTS) {
        let v = sine_log_derivative(tau, ORACLE_NODES)?;
        let at = A * tau;
        *slot = -(v + at) / (at * at);
    }
    // r(τ) = q₂ + q₃·aτ
    let (x0, x1) = (A * FIT_POINTS[0], A * FIT_POINTS[1]);
    let q3 = (r[1] - r[0]) / (x1 - x0);
    let q2 = r[0] - q3 * x0;
    Ok((q2, q3))
}

/// Integrates the sigma-form Painlevé V equation from τ₀ = 10⁻³ to `tau_max`
/// and samples it on `n` uniform points of [τ₀, tau_max].
///
/// The solution is unstable forward in τ: a relative error δ in the data at
/// τ₀ reaches v(τ) with a factor of order τe^{2τ}. The initial values are
/// therefore the Nyström resolvent values of v and v′ at τ₀ (accurate to
/// rounding), while the fitted series covers (0, τ₀).
///
/// The branch is checked against the Nyström value of τ d/dτ log det at
/// τ = 0.5, 1, 2; a mismatch above 10⁻⁴ is reported as an error.
pub fn pv_sigma_solve(tau_max: f64, n: usize) -> Result<SigmaPVTable> {
    if !(5.0..=40.0).contains(&tau_max) {
        return Err(Error::OutOfRange { what: "tau_max", value: tau_max, lo: 5.0, hi: 40.0 });
    }
    if n < 200 {
        return Err(Error::invalid(format!("pv_sigma_solve needs n >= 200 points, got {n}")));
    }
    let (q2, q3) = fit_series()?;
    let (v0, dv0) = sine_log_derivative_pair(PV_TAU0, ORACLE_NODES)?;
    let opts = OdeOptions { rtol: 1e-15, atol: 1e-18, initial_step: 1e-6, max_steps: 2_000_000 };
    let sol = dormand_prince(
        |tau, y, dy| {
            dy[0] = y[1];
            dy[1] = second_derivative(tau, y[0], y[1])?;
            Ok(())
        },
        PV_TAU0,
        &[v0, dv0],
        tau_max,
        &opts,
    )?;
    for &tau in CHECK_POINTS.iter().filter(|&&t| t <= tau_max) {
        let ode = sol.eval(tau)?[0];
        let oracle = sine_log_derivative(tau, ORACLE_NODES)?;
        if (ode - oracle).abs() > CHECK_TOL {
            return Err(Error::Consistency { what: "sigma-PV branch check", a: ode, b: oracle, tol: CHECK_TOL });
        }
    }
    let step = (tau_max - PV_TAU0) / (n - 1) as f64;
    let mut tau = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    let mut dv = Vec::with_capacity(n);
    for i in 0..n {
        let t = if i == n - 1 { tau_max } else { PV_TAU0 + i as f64 * step };
        let y = sol.eval(t)?;
        tau.push(t);
        v.push(y[0]);
        dv.push(y[1]);
    }
    Ok(SigmaPVTable { tau, v, dv, q2, q3 })
}

impl SigmaPVTable {
    /// Rebuilds a table from its columns; the series coefficients are
    /// recovered from v and v′ at the first grid point.
    pub fn from_columns(tau: Vec<f64>, v: Vec<f64>, dv: Vec<f64>) -> Result<Self> {
        let n = tau.len();
        if n < 5 || v.len() != n || dv.len() != n {
            return Err(Error::invalid("sigma-PV table columns must have equal length >= 5"));
        }
        if !(tau[0] > 0.0) || tau.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("sigma-PV grid must be positive and strictly increasing"));
        }
        let x = A * tau[0];
        // v = −x(1 + x q₂ + x² q₃), v′/(−a) = 1 + 2x q₂ + 3x² q₃
        let r1 = -v[0] / x - 1.0;
        let r2 = -dv[0] / A - 1.0;
        let q3 = (r2 - 2.0 * r1) / (x * x);
        let q2 = (r1 - x * x * q3) / x;
        Ok(Self { tau, v, dv, q2, q3 })
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn tau_min(&self) -> f64 {
        self.tau[0]
    }

    pub fn tau_max(&self) -> f64 {
        self.tau[self.tau.len() - 1]
    }

    /// v(τ) on (0, tau_max]: the boundary series below τ₀, cubic Hermite
    /// interpolation above.
    pub fn v_at(&self, tau: f64) -> Result<f64> {
        check_window("tau", tau, 0.0, self.tau_max())?;
        if tau <= self.tau_min() {
            return Ok(series(tau, self.q2, self.q3).0);
        }
        let k = cell_of(&self.tau, tau);
        Ok(hermite(self.tau[k], self.tau[k + 1], self.v[k], self.dv[k], self.v[k + 1], self.dv[k + 1], tau))
    }

    /// Largest scale-relative residual of the sigma-form equation over interior
    /// grid points, with v″ from fourth-order differences of v′.
    pub fn max_residual(&self) -> f64 {
        let n = self.len();
        let h = (self.tau_max() - self.tau_min()) / (n - 1) as f64;
        (2..n - 2)
            .map(|i| {
                let ddv = (-self.dv[i + 2] + 8.0 * self.dv[i + 1] - 8.0 * self.dv[i - 1] + self.dv[i - 2]) / (12.0 * h);
                sigma_pv_residual(self.tau[i], self.v[i], self.dv[i], ddv)
            })
            .fold(0.0, f64::max)
    }

    /// ∫_0^t v(τ)/τ dτ.
    pub fn logdet_sine(&self, t: f64) -> Result<f64> {
        check_window("t", t, 0.0, self.tau_max())?;
        let tau0 = self.tau_min();
        let series_integral = |x: f64| {
            let ax = A * x;
            -ax * (1.0 + ax * (self.q2 / 2.0 + ax * self.q3 / 3.0))
        };
        if t <= tau0 {
            return Ok(series_integral(t));
        }
        let rule = gauss_legendre_shared(6)?;
        let k_end = cell_of(&self.tau, t);
        let mut sum = series_integral(tau0);
        for k in 0..=k_end {
            let a = self.tau[k];
            let b = if k == k_end { t } else { self.tau[k + 1] };
            if b <= a {
                continue;
            }
            let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                let tau = c + r * x;
                let v =
                    hermite(self.tau[k], self.tau[k + 1], self.v[k], self.dv[k], self.v[k + 1], self.dv[k + 1], tau);
                sum += w * r * v / tau;
            }
        }
        Ok(sum)
    }
}

/// log det(I − K_sin,t) = ∫_0^t v(τ)/τ dτ from a sigma-PV table.
pub fn logdet_sine_via_pv(t: f64, table: &SigmaPVTable) -> Result<f64> {
    table.logdet_sine(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fredholm::{nystrom_logdet, KernelSpec};
    use std::sync::OnceLock;

    fn table() -> &'static SigmaPVTable {
        static T: OnceLock<SigmaPVTable> = OnceLock::new();
        T.get_or_init(|| pv_sigma_solve(PV_DEFAULT_TAU_MAX, PV_DEFAULT_N).unwrap())
    }

    #[test]
    fn series_coefficients_are_near_one() {
        let t = table();
        assert!((t.q2 - 1.0).abs() < 1e-5, "q2 = {}", t.q2);
        assert!((t.q3 - 1.0).abs() < 1e-2, "q3 = {}", t.q3);
    }

    #[test]
    fn boundary_behaviour() {
        let t = table();
        let v0 = t.v_at(1e-3).unwrap();
        assert!((v0 / 1e-3 + 2.0 / PI).abs() < 1e-3);
        let v8 = t.v_at(8.0).unwrap();
        assert!((v8 + 64.25).abs() < 0.05, "v(8) = {v8}");
        assert!(t.v.iter().all(|&x| x < 0.0));
    }

    #[test]
    fn matches_log_derivative_of_determinant() {
        let t = table();
        let h = 1e-3;
        let ld = |x: f64| nystrom_logdet(&KernelSpec::sine(x), 80).unwrap().log_det;
        let fd = 2.0 * (ld(2.0 + h) - ld(2.0 - h)) / (2.0 * h);
        assert!((t.v_at(2.0).unwrap() - fd).abs() < 1e-5);
    }

    #[test]
    fn log_determinant_consistency() {
        let t = table();
        assert_eq!(t.logdet_sine(0.0).unwrap(), 0.0);
        for &x in &[1.0, 2.0, 4.0] {
            let nys = nystrom_logdet(&KernelSpec::sine(x), 80).unwrap().log_det;
            let pv = logdet_sine_via_pv(x, t).unwrap();
            assert!((nys - pv).abs() < 1e-6, "t={x} nys={nys} pv={pv}");
        }
    }

    #[test]
    fn ode_residual_small() {
        assert!(table().max_residual() < 1e-6, "{}", table().max_residual());
    }

    #[test]
    fn columns_round_trip() {
        let t = table();
        let back = SigmaPVTable::from_columns(t.tau.clone(), t.v.clone(), t.dv.clone()).unwrap();
        assert!((back.q2 - t.q2).abs() < 1e-4);
        assert!((back.logdet_sine(3.0).unwrap() - t.logdet_sine(3.0).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn rejects_bad_windows() {
        assert!(pv_sigma_solve(3.0, 400).unwrap_err().is_precondition());
        assert!(pv_sigma_solve(8.0, 50).unwrap_err().is_precondition());
        assert!(table().logdet_sine(13.0).unwrap_err().is_precondition());
    }
}
