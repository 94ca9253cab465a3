//! The Fermi weight sigma(tau; s) = 1 / (1 + exp(tau^2 - s)) and the scalar
//! functions of `s` built from it.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::{graded_breakpoints, integrate_until_stable, truncation_radius};

pub const DEFAULT_EPS: f64 = 1e-12;

const NODES_PER_PANEL: usize = 16;
/// Panel width as a fraction of the distance to the nearest pole of sigma.
const POLE_RATIO: f64 = 0.5;
const MAX_PANEL: f64 = 1.0;
const LAMBDA0_MAX_ITER: usize = 200;

/// Fermi weight with parameter `s` and tail tolerance `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiWeight {
    pub s: f64,
    pub eps: f64,
}

/// sigma(tau; s), overflow-safe for any real arguments.
pub fn sigma(tau: f64, s: f64) -> f64 {
    logistic(s - tau * tau)
}

/// 1 / (1 + exp(-a)).
pub(crate) fn logistic(a: f64) -> f64 {
    if a >= 0.0 {
        1.0 / (1.0 + (-a).exp())
    } else {
        let e = a.exp();
        e / (1.0 + e)
    }
}

/// sigma (1 - sigma), the derivative of sigma with respect to s.
pub(crate) fn sigma_ds(tau: f64, s: f64) -> f64 {
    let a = s - tau * tau;
    let e = (-a.abs()).exp();
    e / ((1.0 + e) * (1.0 + e))
}

fn csqrt(re: f64, im: f64) -> (f64, f64) {
    let r = re.hypot(im);
    let a = ((r + re) * 0.5).max(0.0).sqrt();
    let b = ((r - re) * 0.5).max(0.0).sqrt();
    (a, if im < 0.0 { -b } else { b })
}

/// Distance from the real point `t` to the nearest complex pole of
/// tau -> sigma(tau; s); the poles sit at tau^2 = s + i pi (2k + 1).
pub fn pole_distance(t: f64, s: f64) -> f64 {
    let mut best = f64::INFINITY;
    for k in 0..4 {
        let (a, b) = csqrt(s, PI * (2 * k + 1) as f64);
        for sign in [1.0, -1.0] {
            best = best.min((t - sign * a).hypot(b));
        }
    }
    best
}

/// Breakpoints on [0, radius] adapted to the pole structure of sigma(.; s).
pub(crate) fn half_line_breakpoints(s: f64, radius: f64) -> Vec<f64> {
    let anchors: Vec<f64> = if s > 0.0 { vec![s.sqrt()] } else { vec![] };
    graded_breakpoints(0.0, radius, &anchors, |t| {
        (POLE_RATIO * pole_distance(t, s)).min(MAX_PANEL)
    })
}

impl FermiWeight {
    pub fn new(s: f64, eps: f64) -> Result<Self> {
        if !s.is_finite() {
            return Err(Error::invalid(format!("s must be finite, got {s}")));
        }
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::OutOfRange { what: "eps", value: eps, lo: 0.0, hi: 1.0 });
        }
        Ok(Self { s, eps })
    }

    pub fn with_default_eps(s: f64) -> Result<Self> {
        Self::new(s, DEFAULT_EPS)
    }

    pub fn sigma(&self, tau: f64) -> f64 {
        sigma(tau, self.s)
    }

    pub fn truncation_radius(&self) -> f64 {
        truncation_radius(self.s, self.eps)
    }

    /// The integral of sigma(lambda; s) lambda^k over the real line, k in {0, 2}.
    pub fn moment(&self, k: u32) -> Result<f64> {
        let s = self.s;
        let f: Box<dyn Fn(f64) -> f64> = match k {
            0 => Box::new(move |t: f64| sigma(t, s)),
            2 => Box::new(move |t: f64| t * t * sigma(t, s)),
            _ => return Err(Error::invalid(format!("moment order must be 0 or 2, got {k}"))),
        };
        self.half_line_integral(f).map(|v| 2.0 * v)
    }

    /// d/ds of moment(s, 0), i.e. the integral of sigma (1 - sigma).
    pub fn moment0_ds(&self) -> Result<f64> {
        let s = self.s;
        self.half_line_integral(move |t| sigma_ds(t, s)).map(|v| 2.0 * v)
    }

    fn half_line_integral<F: Fn(f64) -> f64>(&self, f: F) -> Result<f64> {
        let radius = self.truncation_radius();
        let bp = half_line_breakpoints(self.s, radius);
        integrate_until_stable(&bp, NODES_PER_PANEL, f, self.eps)
    }

    /// c0(s) = (1 / 2 pi^2) * integral over (-inf, s) of moment(tau, 0)^2.
    pub fn c0(&self) -> Result<f64> {
        let s = self.s;
        let eps = self.eps;
        let lower = s.min(0.0) - 2.0 * (1.0 / eps).ln().max(40.0);
        // moment(tau, 0) is analytic in tau up to the poles at tau = i pi (2k + 1)
        let breakpoints = graded_breakpoints(lower, s, &[], |_| 0.5 * PI * POLE_RATIO);
        let inner = move |tau: f64| -> f64 {
            FermiWeight { s: tau, eps }
                .moment(0)
                .map(|m| m * m)
                .unwrap_or(f64::NAN)
        };
        let v = integrate_until_stable(&breakpoints, NODES_PER_PANEL, inner, eps)?;
        if !v.is_finite() {
            return Err(Error::invalid("inner moment failed while computing c0"));
        }
        Ok(v / (2.0 * PI * PI))
    }

    /// L(s) = moment(s, 0) / (2 sqrt(s)), defined for s > 0.
    pub fn capital_l(&self) -> Result<f64> {
        if !(self.s > 0.0) {
            return Err(Error::Regime(format!("L(s) needs s > 0, got s = {}", self.s)));
        }
        Ok(self.moment(0)? / (2.0 * self.s.sqrt()))
    }

    /// Left side of the endpoint equation: the integral over zeta > 0 of
    /// sigma(sqrt(s) sqrt(zeta^2 + lambda0^2); s), together with its
    /// derivative in lambda0.
    ///
    /// Substituting u = sqrt(s) zeta gives moment(s (1 - lambda0^2), 0) / (2 sqrt(s)).
    pub fn endpoint_integral(&self, lambda0: f64) -> Result<(f64, f64)> {
        let shifted = FermiWeight { s: self.s * (1.0 - lambda0 * lambda0), eps: self.eps };
        let root_s = self.s.sqrt();
        let value = shifted.moment(0)? / (2.0 * root_s);
        let slope = -shifted.moment0_ds()? * root_s * lambda0;
        Ok((value, slope))
    }

    /// The endpoint lambda0 > 0 of the one-gap regime at gap size `x`.
    pub fn lambda0(&self, x: f64) -> Result<f64> {
        let s = self.s;
        if !(s > 0.0) || !(x > 0.0) {
            return Err(Error::Regime(format!(
                "the one-gap endpoint needs x > 0 and s > 0, got x = {x}, s = {s}"
            )));
        }
        let l = 0.5 * PI * x / s.sqrt();
        let cap = self.capital_l()?;
        if l > cap {
            return Err(Error::Regime(format!(
                "the one-gap endpoint does not exist for l = {l} > L(s) = {cap}"
            )));
        }
        let mut lo = 1e-12;
        let mut hi = ((s + (1.0 / self.eps).ln()) / s).sqrt();
        let (g_lo, _) = self.endpoint_integral(lo)?;
        if g_lo <= l {
            return Ok(lo);
        }
        let mut lam = 0.5 * (lo + hi);
        // start from the large-s estimate lambda0^2 ~ 1 - l^2 when it is inside the bracket
        let guess = (1.0 - l * l).max(0.0).sqrt();
        if guess > lo && guess < hi {
            lam = guess;
        }
        let mut residual = f64::INFINITY;
        for _ in 0..LAMBDA0_MAX_ITER {
            let (g, dg) = self.endpoint_integral(lam)?;
            residual = g - l;
            if residual.abs() <= 1e-14 * l.max(1.0) {
                return Ok(lam);
            }
            if residual > 0.0 {
                lo = lam;
            } else {
                hi = lam;
            }
            if hi - lo <= 4.0 * f64::EPSILON * hi {
                return Ok(lam);
            }
            let newton = lam - residual / dg;
            lam = if dg < 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::Newton { iterations: LAMBDA0_MAX_ITER, residual: residual.abs() })
    }
}

/// moment(s, k) with the default tolerance.
pub fn moment(s: f64, k: u32) -> Result<f64> {
    FermiWeight::with_default_eps(s)?.moment(k)
}

pub fn c0(s: f64) -> Result<f64> {
    FermiWeight::with_default_eps(s)?.c0()
}

pub fn capital_l(s: f64) -> Result<f64> {
    FermiWeight::with_default_eps(s)?.capital_l()
}

pub fn lambda0(x: f64, s: f64) -> Result<f64> {
    FermiWeight::with_default_eps(s)?.lambda0(x)
}
