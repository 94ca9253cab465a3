//! Gauss–Legendre rules, composite panel rules and the adaptive integrator used
//! as an independent oracle throughout the crate.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 2000;
const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX_ITER: usize = 100;
/// Number of panel doublings before a refinement loop gives up.
pub const MAX_DOUBLINGS: usize = 20;

/// Nodes and weights of an interpolatory rule.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn from_parts(nodes: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.is_empty() {
            return Err(Error::invalid("nodes and weights must be non-empty and of equal length"));
        }
        Ok(Self { nodes, weights })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Transports the rule affinely from (-1, 1) onto (a, b).
    pub fn map_affine(&self, a: f64, b: f64) -> Result<QuadratureRule> {
        map_affine(self, a, b)
    }
}

/// Legendre polynomial P_m(x) and P_{m-1}(x) by the three-term recurrence.
pub(crate) fn legendre_pair(m: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    (p, p_prev)
}

fn compute_gauss_legendre(m: usize) -> QuadratureRule {
    let mf = m as f64;
    let half = m / 2;
    let mut pos_nodes = Vec::with_capacity(half + 1);
    let mut pos_weights = Vec::with_capacity(half + 1);
    // k-th largest root; Chebyshev-like initial guess.
    for k in 1..=half {
        let mut x = (std::f64::consts::PI * (k as f64 - 0.25) / (mf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, p1) = legendre_pair(m, x);
            dp = mf * (x * p - p1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < NEWTON_TOL {
                let (p, p1) = legendre_pair(m, x);
                dp = mf * (x * p - p1) / (x * x - 1.0);
                break;
            }
        }
        pos_nodes.push(x);
        pos_weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    let mut nodes = Vec::with_capacity(m);
    let mut weights = Vec::with_capacity(m);
    for (x, w) in pos_nodes.iter().zip(&pos_weights) {
        nodes.push(-x);
        weights.push(*w);
    }
    if m % 2 == 1 {
        let (_, p1) = legendre_pair(m, 0.0);
        // P'_m(0) = m P_{m-1}(0)
        let dp = mf * p1;
        nodes.push(0.0);
        weights.push(2.0 / (dp * dp));
    }
    for (x, w) in pos_nodes.iter().zip(&pos_weights).rev() {
        nodes.push(*x);
        weights.push(*w);
    }
    QuadratureRule { nodes, weights }
}

fn rule_cache() -> &'static Mutex<HashMap<usize, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, cached m-point Gauss–Legendre rule on (-1, 1).
pub fn gauss_legendre_shared(m: usize) -> Result<Arc<QuadratureRule>> {
    if !(2..=MAX_ORDER).contains(&m) {
        return Err(Error::OutOfRange {
            what: "Gauss-Legendre order",
            value: m as f64,
            lo: 2.0,
            hi: MAX_ORDER as f64,
        });
    }
    if let Some(rule) = rule_cache().lock().unwrap().get(&m) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(compute_gauss_legendre(m));
    rule_cache()
        .lock()
        .unwrap()
        .entry(m)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// The m-point Gauss–Legendre rule on (-1, 1), `2 <= m <= 2000`.
pub fn gauss_legendre(m: usize) -> Result<QuadratureRule> {
    gauss_legendre_shared(m).map(|r| (*r).clone())
}

pub fn map_affine(rule: &QuadratureRule, a: f64, b: f64) -> Result<QuadratureRule> {
    if !(a < b) {
        return Err(Error::invalid(format!("map_affine needs a < b, got ({a}, {b})")));
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    Ok(QuadratureRule {
        nodes: rule.nodes.iter().map(|t| mid + half * t).collect(),
        weights: rule.weights.iter().map(|w| half * w).collect(),
    })
}

/// Radius beyond which the Fermi weight sigma(.; s) is below `eps * e^-4`.
pub fn truncation_radius(s: f64, eps: f64) -> f64 {
    (s.max(0.0) + (1.0 / eps).ln() + 4.0).sqrt()
}

/// Composite Gauss–Legendre rule: one fixed-order rule per panel.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    breakpoints: Vec<f64>,
    per_panel: usize,
    rule: QuadratureRule,
}

impl CompositeRule {
    pub fn new(breakpoints: &[f64], per_panel: usize) -> Result<Self> {
        let orders = vec![per_panel; breakpoints.len().saturating_sub(1)];
        Self::with_orders(breakpoints, &orders)
    }

    /// One rule of order `orders[k]` on panel k.
    pub fn with_orders(breakpoints: &[f64], orders: &[usize]) -> Result<Self> {
        if breakpoints.len() < 2 || breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("composite rule needs strictly increasing breakpoints"));
        }
        if orders.len() != breakpoints.len() - 1 {
            return Err(Error::invalid("composite rule needs one order per panel"));
        }
        let mut nodes = Vec::with_capacity(orders.iter().sum());
        let mut weights = Vec::with_capacity(nodes.capacity());
        for (w, &order) in breakpoints.windows(2).zip(orders) {
            let base = gauss_legendre_shared(order)?;
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (t, wt) in base.nodes.iter().zip(&base.weights) {
                nodes.push(mid + half * t);
                weights.push(half * wt);
            }
        }
        Ok(Self {
            breakpoints: breakpoints.to_vec(),
            per_panel: orders.iter().copied().max().unwrap_or(0),
            rule: QuadratureRule { nodes, weights },
        })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    pub fn panels(&self) -> usize {
        self.breakpoints.len() - 1
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, f: F) -> f64 {
        self.rule.integrate(f)
    }

    /// Same panels split in half.
    pub fn refined(&self) -> Result<Self> {
        Self::new(&bisect_panels(&self.breakpoints), self.per_panel)
    }
}

pub(crate) fn bisect_panels(breakpoints: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * breakpoints.len());
    for w in breakpoints.windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(*breakpoints.last().unwrap());
    out
}

/// Panel breakpoints on `[a, b]` that always include the `anchors` and whose
/// widths never exceed the local length scale `scale(t)`.
///
/// The scale is typically a fixed fraction of the distance to the nearest
/// complex singularity of the integrand, which keeps the per-panel
/// Gauss–Legendre convergence factor uniform.
pub fn graded_breakpoints<S: Fn(f64) -> f64>(a: f64, b: f64, anchors: &[f64], scale: S) -> Vec<f64> {
    let mut fixed: Vec<f64> = anchors.iter().copied().filter(|&p| p > a && p < b).collect();
    fixed.push(a);
    fixed.push(b);
    fixed.sort_by(|x, y| x.partial_cmp(y).unwrap());
    fixed.dedup_by(|x, y| (*x - *y).abs() < 1e-14 * (1.0 + y.abs()));

    let mut out = vec![fixed[0]];
    for seg in fixed.windows(2) {
        let (p, q) = (seg[0], seg[1]);
        // march from both ends towards the middle so that anchors (where the
        // scale is smallest) get the finest panels
        let mut left = vec![p];
        let mut right = vec![q];
        loop {
            let l = *left.last().unwrap();
            let r = *right.last().unwrap();
            let gap = r - l;
            let wl = step(&scale, l, 1.0);
            let wr = step(&scale, r, -1.0);
            if wl + wr >= gap {
                if wl.max(wr) < gap {
                    // two panels fit; split proportionally to the local scales
                    left.push(l + gap * wl / (wl + wr));
                }
                break;
            }
            if wl <= wr {
                left.push(l + wl);
            } else {
                right.push(r - wr);
            }
        }
        out.extend(left.into_iter().skip(1));
        out.extend(right.into_iter().rev());
    }
    out
}

fn step<S: Fn(f64) -> f64>(scale: &S, t: f64, dir: f64) -> f64 {
    let w = scale(t).max(1e-12);
    // one look-ahead so the panel respects the scale at its far end as well
    w.min(scale(t + dir * w).max(1e-12))
}

/// Integrates over fixed panels, doubling all panels until two successive
/// estimates agree to `tol * |I|`.
pub fn integrate_until_stable<F: Fn(f64) -> f64>(
    breakpoints: &[f64],
    per_panel: usize,
    f: F,
    tol: f64,
) -> Result<f64> {
    let mut rule = CompositeRule::new(breakpoints, per_panel)?;
    let mut previous = rule.integrate(&f);
    for _ in 0..MAX_DOUBLINGS {
        rule = rule.refined()?;
        let current = rule.integrate(&f);
        if (current - previous).abs() <= tol * current.abs() {
            return Ok(current);
        }
        previous = current;
    }
    let last = rule.integrate(&f);
    Err(Error::Accuracy {
        doublings: MAX_DOUBLINGS,
        last,
        previous,
    })
}

/// Panel-doubling Gauss–Legendre integration of `f` over `(a, b)`.
///
/// Starts from a single 15-point panel and doubles the panel count until two
/// consecutive estimates differ by at most `tol`.
pub fn adaptive_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    if !(a < b) {
        return Err(Error::invalid(format!("adaptive_integrate needs a < b, got ({a}, {b})")));
    }
    if !(tol > 0.0) {
        return Err(Error::invalid("tolerance must be positive"));
    }
    let base = gauss_legendre_shared(15)?;
    let estimate = |panels: usize| -> f64 {
        let width = (b - a) / panels as f64;
        let half = 0.5 * width;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * width;
            let mut panel = 0.0;
            for (t, w) in base.nodes.iter().zip(&base.weights) {
                panel += w * f(mid + half * t);
            }
            total += half * panel;
        }
        total
    };
    let mut panels = 1usize;
    let mut previous = estimate(panels);
    for _ in 0..MAX_DOUBLINGS {
        panels *= 2;
        let current = estimate(panels);
        if !current.is_finite() {
            return Err(Error::invalid("integrand produced a non-finite value"));
        }
        if (current - previous).abs() <= tol {
            return Ok(current);
        }
        previous = current;
    }
    Err(Error::Accuracy {
        doublings: MAX_DOUBLINGS,
        last: estimate(panels),
        previous,
    })
}
