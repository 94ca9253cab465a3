//! Nyström discretisation of the sine, Airy and finite-temperature sine kernels
//! and the log-determinants of I - K built from it.

mod airy;
mod lu;
mod truth;

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermi::{pole_distance, sigma, DEFAULT_EPS};
use crate::quadrature::{graded_breakpoints, truncation_radius, CompositeRule, QuadratureRule};

pub use airy::{airy_ai, AIRY_LIMIT};
pub use lu::{cholesky_solve, lu_log_det, positive_log_det, LuLogDet};
pub use truth::{gap_log_det, gap_log_det_with, Precision, TruthOptions};

pub const MIN_NODES: usize = 8;
pub const MIN_INNER_NODES: usize = 32;
pub const AIRY_MIN_Y: f64 = -15.0;
pub const TW_MIN_Y: f64 = -10.0;
/// Panel width as a fraction of the distance to the nearest pole of sigma.
const POLE_RATIO: f64 = 0.5;
/// Smallest share of the full per-panel order given to a weighted-kernel panel.
const MIN_PANEL_SHARE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KernelKind {
    /// sin(pi (l - m)) / (pi (l - m)) on (-x/pi, x/pi).
    Sine,
    /// Airy kernel on (y, infinity).
    Airy,
    /// sqrt(sigma(l)) sin(x (l - m)) / (pi (l - m)) sqrt(sigma(m)) on the real line.
    FTSineWeighted,
    /// The cosine transform of sigma on (-x/pi, x/pi).
    FTSineInterval,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub x: f64,
    pub s: f64,
    pub y: f64,
    /// Gauss–Legendre nodes per panel of the inner (tau) quadrature.
    pub inner_nodes: usize,
    pub eps: f64,
}

impl KernelSpec {
    fn base(kind: KernelKind) -> Self {
        Self { kind, x: 0.0, s: 0.0, y: 0.0, inner_nodes: MIN_INNER_NODES, eps: DEFAULT_EPS }
    }

    pub fn sine(x: f64) -> Self {
        Self { x, ..Self::base(KernelKind::Sine) }
    }

    pub fn airy(y: f64) -> Self {
        Self { y, ..Self::base(KernelKind::Airy) }
    }

    pub fn ft_weighted(x: f64, s: f64) -> Self {
        Self { x, s, ..Self::base(KernelKind::FTSineWeighted) }
    }

    pub fn ft_interval(x: f64, s: f64, inner_nodes: usize) -> Self {
        Self { x, s, inner_nodes, ..Self::base(KernelKind::FTSineInterval) }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::OutOfRange { what: "eps", value: self.eps, lo: 0.0, hi: 1.0 });
        }
        match self.kind {
            KernelKind::Airy => {
                if !(self.y >= AIRY_MIN_Y && self.y <= AIRY_LIMIT - 1.0) {
                    return Err(Error::OutOfRange {
                        what: "Airy kernel left endpoint y",
                        value: self.y,
                        lo: AIRY_MIN_Y,
                        hi: AIRY_LIMIT - 1.0,
                    });
                }
            }
            _ => {
                if !(self.x >= 0.0) || !self.x.is_finite() {
                    return Err(Error::invalid(format!("gap parameter x must be >= 0, got {}", self.x)));
                }
                if !self.s.is_finite() {
                    return Err(Error::invalid(format!("s must be finite, got {}", self.s)));
                }
            }
        }
        if self.kind == KernelKind::FTSineInterval && self.inner_nodes < MIN_INNER_NODES {
            return Err(Error::OutOfRange {
                what: "inner_nodes",
                value: self.inner_nodes as f64,
                lo: MIN_INNER_NODES as f64,
                hi: f64::INFINITY,
            });
        }
        Ok(())
    }

    /// Kernel value K(lambda, mu).
    pub fn eval(&self, lambda: f64, mu: f64) -> Result<f64> {
        self.validate()?;
        Ok(match self.kind {
            KernelKind::Sine => sinc_pi(lambda - mu),
            KernelKind::Airy => airy_kernel(lambda, mu)?,
            KernelKind::FTSineWeighted => {
                (sigma(lambda, self.s) * sigma(mu, self.s)).sqrt() * weighted_core(self.x, lambda - mu)
            }
            KernelKind::FTSineInterval => {
                ft_sine_interval_kernel_eps(lambda, mu, self.s, self.inner_nodes, self.eps)?
            }
        })
    }
}

/// Where a determinant's operator was discretised.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Domain {
    Interval { a: f64, b: f64 },
    TruncatedLine { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Arithmetic {
    Double,
    Extended { bits: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminantResult {
    pub log_det: f64,
    pub nodes_used: usize,
    /// |log_det(m) - log_det(m/2)|
    pub refinement_error: f64,
    pub domain: Domain,
    pub arithmetic: Arithmetic,
}

impl DeterminantResult {
    pub fn det(&self) -> f64 {
        self.log_det.exp()
    }
}

fn sinc_pi(d: f64) -> f64 {
    if d == 0.0 {
        1.0
    } else {
        (PI * d).sin() / (PI * d)
    }
}

/// sin(x d) / (pi d) with its value x / pi at d = 0.
fn weighted_core(x: f64, d: f64) -> f64 {
    if d == 0.0 {
        x / PI
    } else {
        (x * d).sin() / (PI * d)
    }
}

fn airy_kernel(lambda: f64, mu: f64) -> Result<f64> {
    let (a, da) = airy_ai(lambda)?;
    if lambda == mu {
        return Ok(da * da - lambda * a * a);
    }
    let (b, db) = airy_ai(mu)?;
    Ok((a * db - da * b) / (lambda - mu))
}

/// Right end of the Airy-kernel domain: the point beyond which Ai^2 < 1e-30.
fn airy_cutoff() -> f64 {
    static CUTOFF: OnceLock<f64> = OnceLock::new();
    *CUTOFF.get_or_init(|| {
        let (mut lo, mut hi) = (5.0, 25.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let (a, _) = airy_ai(mid).expect("cutoff search stays inside the Airy range");
            if a * a < 1e-30 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    })
}

/// Breakpoints on [0, radius] for integrands sigma(t; s) * (oscillation with
/// angular frequency `omega`).
pub(crate) fn sigma_breakpoints(s: f64, radius: f64, omega: f64) -> Vec<f64> {
    let anchors: Vec<f64> = if s > 0.0 && s.sqrt() < radius { vec![s.sqrt()] } else { vec![] };
    let cap = if omega > 0.0 { (4.0 / omega).min(1.0) } else { 1.0 };
    graded_breakpoints(0.0, radius, &anchors, |t| (POLE_RATIO * pole_distance(t, s)).min(cap))
}

/// Inner rule on (0, Lambda) for the interval kernel with differences up to `spread`.
pub(crate) fn interval_inner_rule(s: f64, eps: f64, spread: f64, per_panel: usize) -> Result<CompositeRule> {
    let radius = truncation_radius(s, eps);
    let omega = PI * spread;
    let mut bp = sigma_breakpoints(s, radius, omega);
    // at least ceil(4 |lambda - mu|) panels
    let min_panels = (4.0 * spread).ceil() as usize;
    while bp.len() - 1 < min_panels {
        bp = crate::quadrature::bisect_panels(&bp);
    }
    CompositeRule::new(&bp, per_panel)
}

/// The interval kernel: the integral over tau > 0 of cos(pi (l - m) tau) sigma(tau; s).
pub fn ft_sine_interval_kernel(lambda: f64, mu: f64, s: f64, inner_nodes: usize) -> Result<f64> {
    ft_sine_interval_kernel_eps(lambda, mu, s, inner_nodes, DEFAULT_EPS)
}

pub fn ft_sine_interval_kernel_eps(lambda: f64, mu: f64, s: f64, inner_nodes: usize, eps: f64) -> Result<f64> {
    if inner_nodes < MIN_INNER_NODES {
        return Err(Error::OutOfRange {
            what: "inner_nodes",
            value: inner_nodes as f64,
            lo: MIN_INNER_NODES as f64,
            hi: f64::INFINITY,
        });
    }
    let d = lambda - mu;
    let rule = interval_inner_rule(s, eps, d.abs(), inner_nodes)?;
    Ok(rule.integrate(|t| (PI * d * t).cos() * sigma(t, s)))
}

/// Symmetric panel layout on (-Lambda, Lambda) for the weighted kernel and
/// per-panel orders that spend roughly `m` nodes on it.
///
/// Entries of the symmetrised matrix on a panel are bounded by the largest
/// sigma there, so a panel where sigma is down to 10^-d needs about d fewer
/// digits and gets proportionally fewer nodes.
pub(crate) fn weighted_layout(x: f64, s: f64, eps: f64, m: usize) -> (Vec<f64>, Vec<usize>, f64) {
    let radius = truncation_radius(s, eps);
    let half = sigma_breakpoints(s, radius, x);
    let mut bp: Vec<f64> = half.iter().rev().map(|t| -t).collect();
    bp.extend(half.iter().skip(1));
    let digits = (1.0 / eps).log10().max(1.0);
    let need: Vec<f64> = bp
        .windows(2)
        .map(|w| {
            let nearest = if w[0] <= 0.0 && w[1] >= 0.0 { 0.0 } else { w[0].abs().min(w[1].abs()) };
            let lost = -sigma(nearest, s).max(f64::MIN_POSITIVE).log10();
            ((digits - lost) / digits).clamp(MIN_PANEL_SHARE, 1.0)
        })
        .collect();
    let total: f64 = need.iter().sum();
    let orders = need.iter().map(|f| ((m as f64 * f / total).round() as usize).max(2)).collect();
    (bp, orders, radius)
}

fn nodes_and_matrix(kernel: &KernelSpec, m: usize) -> Result<(Vec<f64>, usize, Domain)> {
    let k = kernel;
    match k.kind {
        KernelKind::Sine => {
            let a = k.x / PI;
            let rule = crate::quadrature::gauss_legendre(m)?.map_affine(-a, a)?;
            let mat = build_symmetric(&rule, |l, u| sinc_pi(l - u));
            Ok((mat, m, Domain::Interval { a: -a, b: a }))
        }
        KernelKind::Airy => {
            let end = airy_cutoff().max(k.y + 1.0);
            let rule = crate::quadrature::gauss_legendre(m)?.map_affine(k.y, end)?;
            let values: Vec<(f64, f64)> =
                rule.nodes().iter().map(|&t| airy_ai(t)).collect::<Result<_>>()?;
            let t = rule.nodes();
            let w = rule.weights();
            let mut mat = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..m {
                    let (a, da) = values[i];
                    let (b, db) = values[j];
                    let kij = if i == j {
                        da * da - t[i] * a * a
                    } else {
                        (a * db - da * b) / (t[i] - t[j])
                    };
                    mat[i * m + j] = -(w[i] * w[j]).sqrt() * kij;
                }
                mat[i * m + i] += 1.0;
            }
            Ok((mat, m, Domain::Interval { a: k.y, b: end }))
        }
        KernelKind::FTSineWeighted => {
            let (bp, orders, radius) = weighted_layout(k.x, k.s, k.eps, m);
            let rule = CompositeRule::with_orders(&bp, &orders)?;
            let r = rule.rule();
            let n = r.order();
            let root_sigma: Vec<f64> = r.nodes().iter().map(|&t| sigma(t, k.s).sqrt()).collect();
            let x = k.x;
            let mut mat = build_symmetric(r, |l, u| weighted_core(x, l - u));
            for i in 0..n {
                for j in 0..n {
                    let scale = root_sigma[i] * root_sigma[j];
                    let delta = if i == j { 1.0 } else { 0.0 };
                    mat[i * n + j] = delta + (mat[i * n + j] - delta) * scale;
                }
            }
            Ok((mat, n, Domain::TruncatedLine { radius }))
        }
        KernelKind::FTSineInterval => {
            let a = k.x / PI;
            let outer = crate::quadrature::gauss_legendre(m)?.map_affine(-a, a)?;
            let inner = interval_inner_rule(k.s, k.eps, 2.0 * a, k.inner_nodes)?;
            let ir = inner.rule();
            let weights: Vec<f64> = ir
                .nodes()
                .iter()
                .zip(ir.weights())
                .map(|(&t, &w)| (w * sigma(t, k.s)).sqrt())
                .collect();
            let nin = ir.order();
            let mut c = vec![0.0; m * nin];
            let mut sn = vec![0.0; m * nin];
            for i in 0..m {
                let scale = outer.weights()[i].sqrt();
                for (kk, (&t, &w)) in ir.nodes().iter().zip(&weights).enumerate() {
                    let (sv, cv) = (PI * outer.nodes()[i] * t).sin_cos();
                    c[i * nin + kk] = scale * w * cv;
                    sn[i * nin + kk] = scale * w * sv;
                }
            }
            let mut mat = vec![0.0; m * m];
            for i in 0..m {
                for j in 0..=i {
                    let ci = &c[i * nin..(i + 1) * nin];
                    let cj = &c[j * nin..(j + 1) * nin];
                    let si = &sn[i * nin..(i + 1) * nin];
                    let sj = &sn[j * nin..(j + 1) * nin];
                    let dot: f64 = ci.iter().zip(cj).map(|(p, q)| p * q).sum::<f64>()
                        + si.iter().zip(sj).map(|(p, q)| p * q).sum::<f64>();
                    mat[i * m + j] = -dot;
                    mat[j * m + i] = -dot;
                }
                mat[i * m + i] += 1.0;
            }
            Ok((mat, m, Domain::Interval { a: -a, b: a }))
        }
    }
}

/// I - W^{1/2} K W^{1/2} for a kernel that is cheap to evaluate pointwise.
fn build_symmetric<F: Fn(f64, f64) -> f64>(rule: &QuadratureRule, kernel: F) -> Vec<f64> {
    let n = rule.order();
    let t = rule.nodes();
    let w = rule.weights();
    let mut mat = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let v = -(w[i] * w[j]).sqrt() * kernel(t[i], t[j]);
            mat[i * n + j] = v;
            mat[j * n + i] = v;
        }
        mat[i * n + i] += 1.0;
    }
    mat
}

fn single_log_det(kernel: &KernelSpec, m: usize) -> Result<(f64, usize, Domain)> {
    let zero_width = matches!(kernel.kind, KernelKind::Sine | KernelKind::FTSineWeighted | KernelKind::FTSineInterval)
        && kernel.x == 0.0;
    if zero_width {
        let domain = match kernel.kind {
            KernelKind::FTSineWeighted => Domain::TruncatedLine { radius: truncation_radius(kernel.s, kernel.eps) },
            _ => Domain::Interval { a: 0.0, b: 0.0 },
        };
        return Ok((0.0, 0, domain));
    }
    let (mut mat, n, domain) = nodes_and_matrix(kernel, m)?;
    let ld = positive_log_det(&mut mat, n)?;
    Ok((ld, n, domain))
}

/// log det(I - K) by symmetrised Nyström discretisation with `m` nodes,
/// together with the change against the same discretisation with `m / 2`.
pub fn nystrom_logdet(kernel: &KernelSpec, m: usize) -> Result<DeterminantResult> {
    kernel.validate()?;
    if m < MIN_NODES {
        return Err(Error::OutOfRange {
            what: "Nystrom nodes",
            value: m as f64,
            lo: MIN_NODES as f64,
            hi: crate::quadrature::MAX_ORDER as f64,
        });
    }
    let (log_det, nodes_used, domain) = single_log_det(kernel, m)?;
    let refinement_error = match single_log_det(kernel, (m / 2).max(2)) {
        Ok((coarse, _, _)) => (log_det - coarse).abs(),
        Err(_) => f64::INFINITY,
    };
    Ok(DeterminantResult { log_det, nodes_used, refinement_error, domain, arithmetic: Arithmetic::Double })
}

/// log F_TW(y) as the Airy-kernel Fredholm determinant on (y, infinity).
pub fn tw_log_cdf_via_airy(y: f64, m: usize) -> Result<f64> {
    if !(y >= TW_MIN_Y) {
        return Err(Error::OutOfRange { what: "Tracy-Widom argument y", value: y, lo: TW_MIN_Y, hi: f64::INFINITY });
    }
    nystrom_logdet(&KernelSpec::airy(y), m).map(|r| r.log_det)
}

/// v(t) = t d/dt log det(I - K_sin) on (-t/pi, t/pi), from the resolvent
/// trace on the rescaled interval (-1, 1) with `m` Gauss–Legendre nodes.
pub fn sine_log_derivative(t: f64, m: usize) -> Result<f64> {
    sine_log_derivative_pair(t, m).map(|(v, _)| v)
}

/// v(t) and v'(t) for the sine kernel, see [`sine_log_derivative`].
///
/// On (-1, 1) the kernel is sin(t(u - w)) / (pi (u - w)). Its t-derivative
/// cos(t(u - w)) / pi = (a a^T + b b^T) / pi has rank two with a = cos(t u),
/// b = sin(t u), so with M = I - K and T = a^T M^-1 a + b^T M^-1 b we get
/// v = -(t / pi) T and v' = -T / pi - (t / pi) T', where T' follows from
/// dM/dt = -(a a^T + b b^T) / pi.
pub fn sine_log_derivative_pair(t: f64, m: usize) -> Result<(f64, f64)> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::invalid(format!("sine interval half-width must be finite and >= 0, got {t}")));
    }
    if m < MIN_NODES {
        return Err(Error::OutOfRange {
            what: "Nystrom nodes",
            value: m as f64,
            lo: MIN_NODES as f64,
            hi: crate::quadrature::MAX_ORDER as f64,
        });
    }
    if t == 0.0 {
        return Ok((0.0, -2.0 / PI));
    }
    let rule = crate::quadrature::gauss_legendre(m)?;
    let mut mat = build_symmetric(&rule, |u, w| {
        let d = u - w;
        if d == 0.0 { t / PI } else { (t * d).sin() / (PI * d) }
    });
    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    let mut da = Vec::with_capacity(m);
    let mut db = Vec::with_capacity(m);
    for (&u, &w) in rule.nodes().iter().zip(rule.weights()) {
        let (sv, cv) = (t * u).sin_cos();
        let r = w.sqrt();
        a.push(r * cv);
        b.push(r * sv);
        da.push(-r * u * sv);
        db.push(r * u * cv);
    }
    let mut sol = vec![a.clone(), b.clone()];
    cholesky_solve(&mut mat, m, &mut sol)?;
    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(x, y)| x * y).sum::<f64>();
    let (x, y) = (&sol[0], &sol[1]);
    let (axx, aby, bxy) = (dot(&a, x), dot(&b, y), dot(&a, y));
    let trace = axx + aby;
    let dtrace = 2.0 * (dot(&da, x) + dot(&db, y)) + (axx * axx + 2.0 * bxy * bxy + aby * aby) / PI;
    Ok((-t * trace / PI, -trace / PI - t * dtrace / PI))
}
