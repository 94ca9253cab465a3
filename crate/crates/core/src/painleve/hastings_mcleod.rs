use serde::Serialize;

use super::{cell_of, check_window, hermite};
use crate::error::{Error, Result};
use crate::fredholm::airy_ai;
use crate::quadrature::{adaptive_integrate, gauss_legendre_shared};

/// Default solve window [t_min, t_max].
pub const PII_DEFAULT_WINDOW: (f64, f64) = (-12.0, 8.0);
/// Default number of uniform grid nodes.
pub const PII_DEFAULT_N: usize = 4000;

const MAX_NEWTON: usize = 50;
const ROUTE_TOL: f64 = 1e-8;

/// Asymptotic expansion of the Hastings–McLeod solution as t → −∞,
/// √(−t/2)·(1 + 1/(8t³) − 73/(128t⁶) + 10657/(1024t⁹)).
///
/// The coefficients follow from substituting the ansatz into u″ = tu + 2u³
/// order by order; the unit tests check the residual directly.
pub fn hm_left_asymptotic(t: f64) -> f64 {
    let r = 1.0 / (t * t * t);
    (-t / 2.0).sqrt() * (1.0 + r * (1.0 / 8.0 + r * (-73.0 / 128.0 + r * 10657.0 / 1024.0)))
}

/// Tabulated Hastings–McLeod solution with its Hamiltonian and log F_TW.
#[derive(Debug, Clone, Serialize)]
pub struct PainleveIITable {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    pub du: Vec<f64>,
    pub h: Vec<f64>,
    pub log_f: Vec<f64>,
    /// Newton iterations used by the solve (0 for tables restored from disk).
    pub newton_iterations: usize,
    #[serde(skip)]
    tail_mass: f64,
    #[serde(skip)]
    tail_moment: f64,
}

fn rhs(t: f64, u: f64) -> f64 {
    t * u + 2.0 * u * u * u
}

/// Solves u″ = tu + 2u³ on [t_min, t_max] with Airy data on the right and the
/// growing √(−t/2) branch on the left.
///
/// Uses the fourth-order Numerov discretisation on `n` uniform nodes and a
/// Newton iteration with a tridiagonal Jacobian.
pub fn hm_solve(t_min: f64, t_max: f64, n: usize) -> Result<PainleveIITable> {
    if !(t_min <= -8.0) {
        return Err(Error::OutOfRange { what: "t_min", value: t_min, lo: f64::NEG_INFINITY, hi: -8.0 });
    }
    if !(6.0..=25.0).contains(&t_max) {
        return Err(Error::OutOfRange { what: "t_max", value: t_max, lo: 6.0, hi: 25.0 });
    }
    if t_min < -200.0 {
        return Err(Error::OutOfRange { what: "t_min", value: t_min, lo: -200.0, hi: -8.0 });
    }
    if n < 400 {
        return Err(Error::invalid(format!("hm_solve needs n >= 400 nodes, got {n}")));
    }

    let h = (t_max - t_min) / (n - 1) as f64;
    let t: Vec<f64> = (0..n).map(|i| t_min + i as f64 * h).collect();
    let mut u: Vec<f64> = Vec::with_capacity(n);
    for &ti in &t {
        let ai = airy_ai(ti.max(-25.0))?.0;
        u.push((ai * ai + (-ti / 2.0).max(0.0)).sqrt());
    }
    u[0] = hm_left_asymptotic(t_min);
    u[n - 1] = airy_ai(t_max)?.0;

    let h2 = h * h / 12.0;
    let interior = n - 2;
    let mut sub = vec![0.0; interior];
    let mut diag = vec![0.0; interior];
    let mut sup = vec![0.0; interior];
    let mut res = vec![0.0; interior];
    let mut iterations = 0;
    let mut last_step = f64::INFINITY;
    loop {
        if iterations == MAX_NEWTON {
            return Err(Error::Newton { iterations, residual: last_step });
        }
        iterations += 1;
        for k in 0..interior {
            let i = k + 1;
            let f = |j: usize| rhs(t[j], u[j]);
            let df = |j: usize| t[j] + 6.0 * u[j] * u[j];
            res[k] = u[i + 1] - 2.0 * u[i] + u[i - 1] - h2 * (f(i + 1) + 10.0 * f(i) + f(i - 1));
            sub[k] = 1.0 - h2 * df(i - 1);
            diag[k] = -2.0 - 10.0 * h2 * df(i);
            sup[k] = 1.0 - h2 * df(i + 1);
        }
        let delta = thomas(&sub, &diag, &sup, &res)?;
        let mut step: f64 = 0.0;
        for k in 0..interior {
            u[k + 1] -= delta[k];
            step = step.max(delta[k].abs());
        }
        last_step = step;
        if step < 1e-14 {
            break;
        }
    }
    if u.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::Newton { iterations, residual: last_step });
    }
    PainleveIITable::from_solution(t, u, iterations)
}

fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut m = diag[0];
    if m.abs() < 1e-300 {
        return Err(Error::Conditioning { pivot: m.abs() });
    }
    c[0] = sup[0] / m;
    d[0] = rhs[0] / m;
    for i in 1..n {
        m = diag[i] - sub[i] * c[i - 1];
        if m.abs() < 1e-300 {
            return Err(Error::Conditioning { pivot: m.abs() });
        }
        c[i] = sup[i] / m;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

impl PainleveIITable {
    fn from_solution(t: Vec<f64>, u: Vec<f64>, iterations: usize) -> Result<Self> {
        let n = t.len();
        let h = t[1] - t[0];
        let f: Vec<f64> = t.iter().zip(&u).map(|(&ti, &ui)| rhs(ti, ui)).collect();
        let mut du = vec![0.0; n];
        for i in 1..n - 1 {
            du[i] = (u[i + 1] - u[i - 1]) / (2.0 * h) - h * (f[i + 1] - f[i - 1]) / 12.0;
        }
        du[0] = (u[1] - u[0]) / h - h * (2.0 * f[0] + f[1]) / 6.0 + h * (f[0] - 2.0 * f[1] + f[2]) / 24.0;
        du[n - 1] = (u[n - 1] - u[n - 2]) / h + h * (2.0 * f[n - 1] + f[n - 2]) / 6.0
            - h * (f[n - 1] - 2.0 * f[n - 2] + f[n - 3]) / 24.0;
        Self::from_columns(t, u, du, iterations)
    }

    /// Rebuilds H and log F from the t, u, u′ columns.
    pub fn from_columns(t: Vec<f64>, u: Vec<f64>, du: Vec<f64>, newton_iterations: usize) -> Result<Self> {
        let n = t.len();
        if n < 4 || u.len() != n || du.len() != n {
            return Err(Error::invalid("Painlevé II table columns must have equal length >= 4"));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::invalid("Painlevé II grid must be strictly increasing"));
        }
        let t_max = t[n - 1];
        let hv: Vec<f64> = (0..n)
            .map(|i| du[i] * du[i] - u[i].powi(4) - t[i] * u[i] * u[i])
            .collect();
        let ai2 = |x: f64| airy_ai(x).map(|(a, _)| a * a).unwrap_or(0.0);
        let upper = (t_max + 12.0).min(29.0);
        let tail_mass = adaptive_integrate(ai2, t_max, upper, 1e-26)?;
        let tail_moment = adaptive_integrate(|x| (x - t_max) * ai2(x), t_max, upper, 1e-26)?;

        let mut log_f = vec![0.0; n];
        log_f[n - 1] = -tail_moment;
        for i in (0..n - 1).rev() {
            let hstep = t[i + 1] - t[i];
            let cell = 0.5 * hstep * (hv[i] + hv[i + 1]) + hstep * hstep / 12.0 * (u[i + 1] * u[i + 1] - u[i] * u[i]);
            log_f[i] = log_f[i + 1] - cell;
        }
        Ok(Self { t, u, du, h: hv, log_f, newton_iterations, tail_mass, tail_moment })
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_min(&self) -> f64 {
        self.t[0]
    }

    pub fn t_max(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    fn check_inside(&self, t: f64) -> Result<()> {
        check_window("t", t, self.t_min(), self.t_max())
    }

    /// u(t) by cubic Hermite interpolation of the table.
    pub fn u_at(&self, t: f64) -> Result<f64> {
        self.check_inside(t)?;
        let k = cell_of(&self.t, t);
        Ok(hermite(self.t[k], self.t[k + 1], self.u[k], self.du[k], self.u[k + 1], self.du[k + 1], t))
    }

    /// log F_TW(t) from the tabulated H-integral, interpolated with H as slope.
    pub fn log_f_at(&self, t: f64) -> Result<f64> {
        self.check_inside(t)?;
        let k = cell_of(&self.t, t);
        Ok(hermite(self.t[k], self.t[k + 1], self.log_f[k], self.h[k], self.log_f[k + 1], self.h[k + 1], t))
    }

    /// −∫_y^∞ (τ − y) u(τ)² dτ by Gauss–Legendre quadrature on each table
    /// cell, with Airy data beyond t_max.
    pub fn log_f_moment_route(&self, y: f64) -> Result<f64> {
        self.check_inside(y)?;
        let rule = gauss_legendre_shared(6)?;
        let n = self.len();
        let k0 = cell_of(&self.t, y);
        let mut sum = 0.0;
        for k in k0..n - 1 {
            let a = if k == k0 { y } else { self.t[k] };
            let b = self.t[k + 1];
            if b <= a {
                continue;
            }
            let (c, r) = (0.5 * (a + b), 0.5 * (b - a));
            for (x, w) in rule.nodes().iter().zip(rule.weights()) {
                let tau = c + r * x;
                let uu = hermite(self.t[k], self.t[k + 1], self.u[k], self.du[k], self.u[k + 1], self.du[k + 1], tau);
                sum += w * r * (tau - y) * uu * uu;
            }
        }
        sum += self.tail_moment + (self.t_max() - y) * self.tail_mass;
        Ok(-sum)
    }

    /// log F_TW(y) by both routes; errors if they disagree beyond 1e−8.
    pub fn tw_log_cdf_routes(&self, y: f64) -> Result<(f64, f64)> {
        check_window("y", y, self.t_min() + 1.0, self.t_max() - 1.0)?;
        let by_h = self.log_f_at(y)?;
        let by_moment = self.log_f_moment_route(y)?;
        if (by_h - by_moment).abs() > ROUTE_TOL {
            return Err(Error::Consistency { what: "log F_TW", a: by_h, b: by_moment, tol: ROUTE_TOL });
        }
        Ok((by_h, by_moment))
    }

    /// log F_TW(y), the H-integral route after checking the moment route.
    pub fn tw_log_cdf(&self, y: f64) -> Result<f64> {
        self.tw_log_cdf_routes(y).map(|(h, _)| h)
    }

    /// Largest Numerov residual over interior nodes, scaled by 1/h² so that it
    /// reads as a residual of u″ − tu − 2u³.
    pub fn max_discrete_residual(&self) -> f64 {
        let n = self.len();
        let h = self.t[1] - self.t[0];
        let h2 = h * h / 12.0;
        let f = |j: usize| rhs(self.t[j], self.u[j]);
        (1..n - 1)
            .map(|i| {
                let r = self.u[i + 1] - 2.0 * self.u[i] + self.u[i - 1] - h2 * (f(i + 1) + 10.0 * f(i) + f(i - 1));
                (r / (h * h)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Relative mismatch of u and u′ against Airy data at t_max.
    pub fn right_boundary_mismatch(&self) -> Result<(f64, f64)> {
        let n = self.len();
        let (ai, dai) = airy_ai(self.t_max())?;
        Ok(((self.u[n - 1] / ai - 1.0).abs(), (self.du[n - 1] / dai - 1.0).abs()))
    }

    /// Relative mismatch of u(t_min) against the leading √(−t/2).
    pub fn left_boundary_mismatch(&self) -> f64 {
        (self.u[0] / (-self.t_min() / 2.0).sqrt() - 1.0).abs()
    }
}
