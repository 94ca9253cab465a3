//! Extended-precision (MPFR) versions of the gap determinant and of the no-gap
//! asymptotic formula.
//!
//! For large `x sqrt(s)` the top eigenvalue of the kernel sits within roughly
//! `exp(-2 x sqrt(s))` of 1, so log det(I - K) loses about `2 x sqrt(s) / ln 2`
//! bits to cancellation. Everything here runs at a caller-chosen MPFR
//! precision that absorbs that loss.
//!
//! Both determinant representations use the reflection symmetry of the kernel:
//! on symmetric nodes det(I - K) factors into an even and an odd block of half
//! the size.

use std::collections::HashMap;
use std::f64::consts::{LN_2, PI};
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::fredholm::{sigma_breakpoints, weighted_layout};
use crate::quadrature::{gauss_legendre_shared, graded_breakpoints};

pub const MIN_BITS: u32 = 64;
pub const MAX_BITS: u32 = 4096;
const GUARD_BITS: f64 = 40.0;
const ESCALATIONS: usize = 3;

/// Working precision for log det(I - K) at (x, s) with absolute accuracy `target`.
pub fn bits_for(x: f64, s: f64, target: f64) -> u32 {
    let c = x.abs() * s.max(0.0).sqrt();
    let bits = 2.0 * c / LN_2 + (1.0 / target).log2().max(0.0) + GUARD_BITS;
    let bits = (bits.ceil() as u32).clamp(MIN_BITS, MAX_BITS);
    bits.div_ceil(32) * 32
}

/// Gauss–Legendre order per pole-graded panel that reaches `bits` of accuracy.
fn panel_order(bits: u32) -> usize {
    (0.17 * bits as f64).ceil() as usize + 10
}

fn float(prec: u32, v: f64) -> Float {
    Float::with_val(prec, v)
}

/// Gauss–Legendre rule on (-1, 1) with nodes and weights correct to `prec` bits.
#[derive(Debug)]
pub struct MpRule {
    pub nodes: Vec<Float>,
    pub weights: Vec<Float>,
}

fn legendre_mp(m: usize, x: &Float) -> (Float, Float) {
    let prec = x.prec();
    let mut p_prev = float(prec, 1.0);
    let mut p = x.clone();
    for k in 1..m {
        let kf = k as u32;
        let mut next = Float::with_val(prec, x * &p);
        next *= 2 * kf + 1;
        next -= Float::with_val(prec, &p_prev * kf);
        next /= kf + 1;
        p_prev = std::mem::replace(&mut p, next);
    }
    (p, p_prev)
}

fn compute_mp_rule(m: usize, prec: u32) -> Result<MpRule> {
    let base = gauss_legendre_shared(m)?;
    let tol = Float::with_val(prec, Float::i_exp(1, -(prec as i32) + 4));
    let mut nodes: Vec<Float> = Vec::with_capacity(m);
    let mut weights: Vec<Float> = Vec::with_capacity(m);
    for i in 0..m {
        let mirror = m - 1 - i;
        if i > mirror {
            let x: Float = -nodes[mirror].clone();
            nodes.push(x);
            weights.push(weights[mirror].clone());
            continue;
        }
        let mut x = float(prec, base.nodes()[i]);
        let mut derivative = float(prec, 0.0);
        for _ in 0..12 {
            let (p, p1) = legendre_mp(m, &x);
            let x2m1 = Float::with_val(prec, x.square_ref()) - 1u32;
            let mut d = Float::with_val(prec, &x * &p) - &p1;
            d *= m as u32;
            d /= &x2m1;
            let dx = Float::with_val(prec, &p / &d);
            x -= &dx;
            derivative = d;
            if dx.abs() < tol {
                break;
            }
        }
        if m % 2 == 1 && i == m / 2 {
            x = float(prec, 0.0);
            let (_, p1) = legendre_mp(m, &x);
            derivative = p1 * (m as u32);
        }
        let one_minus = 1u32 - Float::with_val(prec, x.square_ref());
        let w = Float::with_val(prec, 2u32) / (one_minus * derivative.square());
        nodes.push(x);
        weights.push(w);
    }
    Ok(MpRule { nodes, weights })
}

/// Cached extended-precision Gauss–Legendre rule.
pub fn mp_gauss_legendre(m: usize, prec: u32) -> Result<Arc<MpRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<MpRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(r) = cache.lock().unwrap().get(&(m, prec)) {
        return Ok(Arc::clone(r));
    }
    let rule = Arc::new(compute_mp_rule(m, prec)?);
    cache.lock().unwrap().insert((m, prec), Arc::clone(&rule));
    Ok(rule)
}

/// Nodes and weights of a composite rule over f64 breakpoints.
fn composite(breakpoints: &[f64], order: usize, prec: u32) -> Result<(Vec<Float>, Vec<Float>)> {
    let rule = mp_gauss_legendre(order, prec)?;
    let mut nodes = Vec::with_capacity(order * breakpoints.len());
    let mut weights = Vec::with_capacity(nodes.capacity());
    for w in breakpoints.windows(2) {
        let a = float(prec, w[0]);
        let b = float(prec, w[1]);
        let half = Float::with_val(prec, &b - &a) / 2u32;
        let mid = Float::with_val(prec, &a + &b) / 2u32;
        for (t, wt) in rule.nodes.iter().zip(&rule.weights) {
            nodes.push(Float::with_val(prec, &half * t) + &mid);
            weights.push(Float::with_val(prec, &half * wt));
        }
    }
    Ok((nodes, weights))
}

/// sigma(tau; s) = 1 / (1 + exp(tau^2 - s)).
pub fn sigma(tau: &Float, s: &Float) -> Float {
    let prec = tau.prec().max(s.prec());
    let mut e = Float::with_val(prec, tau.square_ref()) - s;
    e.exp_mut();
    e += 1u32;
    e.recip()
}

fn truncation(s: f64, bits: u32) -> f64 {
    (s.max(0.0) + bits as f64 * LN_2 + 4.0).sqrt()
}

/// Outer node count at which `interval_log_det` has converged to `bits` at (x, s).
///
/// The cosine transform of sigma is entire with growth set by the truncation
/// radius, so the outer rule needs a little more than x times that radius.
pub fn interval_nodes(x: f64, s: f64, bits: u32) -> usize {
    let m = 0.9 * x.abs() * truncation(s, bits) + 30.0;
    (m.ceil() as usize).div_ceil(2) * 2
}

/// Log-determinant of a square matrix with positive determinant, by LU with
/// partial pivoting. Returns (log det, log2 of the smallest pivot magnitude).
fn positive_log_det(mut a: Vec<Float>, n: usize) -> Result<(Float, f64)> {
    let prec = a.first().map(|f| f.prec()).unwrap_or(MIN_BITS);
    let mut product = float(prec, 1.0);
    let mut swaps = 0usize;
    let mut negative = 0usize;
    let mut min_log2 = f64::INFINITY;
    for k in 0..n {
        let mut p = k;
        for i in k + 1..n {
            if a[i * n + k].cmp_abs(&a[p * n + k]) == Some(std::cmp::Ordering::Greater) {
                p = i;
            }
        }
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
            swaps += 1;
        }
        let pivot = a[k * n + k].clone();
        if pivot.is_zero() {
            return Err(Error::Conditioning { pivot: 0.0 });
        }
        if pivot.is_sign_negative() {
            negative += 1;
        }
        let (mantissa, exp) = pivot.to_f64_exp();
        min_log2 = min_log2.min(mantissa.abs().log2() + exp as f64);
        product *= &pivot;
        let inv = pivot.recip();
        let (upper, lower) = a.split_at_mut((k + 1) * n);
        let row_k = &upper[k * n..(k + 1) * n];
        for row in lower.chunks_exact_mut(n) {
            if row[k].is_zero() {
                continue;
            }
            let factor = Float::with_val(prec, &row[k] * &inv);
            for j in k + 1..n {
                row[j] -= &factor * &row_k[j];
            }
        }
    }
    if (swaps + negative) % 2 == 1 {
        return Err(Error::Sign { negative_pivots: negative });
    }
    Ok((product.abs().ln(), min_log2))
}

/// An extended-precision determinant together with its diagnostics.
#[derive(Debug, Clone)]
pub struct MpLogDet {
    pub log_det: Float,
    pub bits: u32,
    pub outer_nodes: usize,
    pub inner_nodes: usize,
    /// log2 of the smallest LU pivot magnitude over both blocks.
    pub min_pivot_log2: f64,
}

impl MpLogDet {
    /// The pivot check used for precision escalation: the smallest pivot must
    /// stay well above the working precision.
    pub fn is_resolved(&self) -> bool {
        self.min_pivot_log2 > -(self.bits as f64 - 60.0)
    }
}

fn zero_result(bits: u32) -> MpLogDet {
    MpLogDet { log_det: float(bits, 0.0), bits, outer_nodes: 0, inner_nodes: 0, min_pivot_log2: 0.0 }
}

/// Even and odd blocks of I - K from the factor matrices C and S, where
/// K = 2 C C^T on the even subspace and 2 S S^T on the odd one.
fn blocks_from_factors(c: &[Vec<Float>], s: &[Vec<Float>], prec: u32) -> Result<(Float, f64)> {
    let half = c.len();
    let mut total = float(prec, 0.0);
    let mut min_log2 = f64::INFINITY;
    for factor in [c, s] {
        let mut mat = vec![float(prec, 0.0); half * half];
        for i in 0..half {
            for j in 0..=i {
                let mut acc = float(prec, 0.0);
                for (p, q) in factor[i].iter().zip(&factor[j]) {
                    acc += p * q;
                }
                acc *= 2u32;
                if i == j {
                    mat[i * half + i] = 1u32 - acc;
                } else {
                    acc = -acc;
                    mat[j * half + i] = acc.clone();
                    mat[i * half + j] = acc;
                }
            }
        }
        let (ld, ml) = positive_log_det(mat, half)?;
        total += ld;
        min_log2 = min_log2.min(ml);
    }
    Ok((total, min_log2))
}

/// log det(I - K) for the interval kernel on (-x/pi, x/pi) with `m` outer
/// Gauss–Legendre nodes (rounded up to even), at `bits` of precision.
///
/// `x` and `s` are taken as exact multiprecision values so that finite
/// difference stencils can place their points exactly.
pub fn interval_log_det(x: &Float, s: &Float, m: usize, bits: u32) -> Result<MpLogDet> {
    let prec = bits;
    if x.is_zero() {
        return Ok(zero_result(bits));
    }
    if x.is_sign_negative() {
        return Err(Error::invalid("gap parameter x must be >= 0"));
    }
    let m = m.max(8).div_ceil(2) * 2;
    let (xf, sf) = (x.to_f64(), s.to_f64());
    let s = Float::with_val(prec, s);
    let radius = truncation(sf, bits);
    let breakpoints = sigma_breakpoints(sf, radius, 2.0 * xf);
    let (tau, w_tau) = composite(&breakpoints, panel_order(bits), prec)?;
    let root_weights: Vec<Float> = tau
        .iter()
        .zip(&w_tau)
        .map(|(t, w)| (sigma(t, &s) * w).sqrt())
        .collect();

    let pi = Float::with_val(prec, Constant::Pi);
    let a = Float::with_val(prec, x / &pi);
    let outer = mp_gauss_legendre(m, prec)?;
    let half = m / 2;
    let mut c = Vec::with_capacity(half);
    let mut sn = Vec::with_capacity(half);
    for i in half..m {
        let t = Float::with_val(prec, &a * &outer.nodes[i]);
        let scale = Float::with_val(prec, &a * &outer.weights[i]).sqrt();
        let freq = Float::with_val(prec, &pi * &t);
        let mut crow = Vec::with_capacity(tau.len());
        let mut srow = Vec::with_capacity(tau.len());
        for (tk, rw) in tau.iter().zip(&root_weights) {
            let angle = Float::with_val(prec, &freq * tk);
            let (sv, cv) = angle.sin_cos(Float::new(prec));
            let f = Float::with_val(prec, &scale * rw);
            crow.push(cv * &f);
            srow.push(sv * &f);
        }
        c.push(crow);
        sn.push(srow);
    }
    let (log_det, min_pivot_log2) = blocks_from_factors(&c, &sn, prec)?;
    Ok(MpLogDet { log_det, bits, outer_nodes: m, inner_nodes: tau.len(), min_pivot_log2 })
}

/// log det(I - K) for the weighted kernel on the truncated real line with the
/// same pole-graded layout as the double-precision engine.
pub fn weighted_log_det(x: &Float, s: &Float, m: usize, eps: f64, bits: u32) -> Result<MpLogDet> {
    let prec = bits;
    if x.is_zero() {
        return Ok(zero_result(bits));
    }
    let (xf, sf) = (x.to_f64(), s.to_f64());
    let s = Float::with_val(prec, s);
    let (bp, orders, _) = weighted_layout(xf, sf, eps, m);
    let per_panel = orders.iter().copied().max().unwrap_or(2);
    let positive: Vec<f64> = bp.iter().copied().filter(|&b| b >= 0.0).collect();
    let (t, w) = composite(&positive, per_panel, prec)?;
    let n = t.len();
    let pi = Float::with_val(prec, Constant::Pi);
    let scaled: Vec<Float> = t
        .iter()
        .zip(&w)
        .map(|(ti, wi)| (sigma(ti, &s) * wi).sqrt())
        .collect();
    let core = |d: &Float| -> Float {
        if d.is_zero() {
            Float::with_val(prec, x / &pi)
        } else {
            let num = Float::with_val(prec, x * d).sin();
            num / Float::with_val(prec, &pi * d)
        }
    };
    let mut total = float(prec, 0.0);
    let mut min_log2 = f64::INFINITY;
    let mut even = vec![float(prec, 0.0); n * n];
    let mut odd = vec![float(prec, 0.0); n * n];
    for i in 0..n {
        for j in 0..=i {
            let direct = core(&Float::with_val(prec, &t[i] - &t[j]));
            let mirror = core(&Float::with_val(prec, &t[i] + &t[j]));
            let scale = Float::with_val(prec, &scaled[i] * &scaled[j]);
            let e = Float::with_val(prec, &direct + &mirror) * &scale;
            let o = Float::with_val(prec, &direct - &mirror) * &scale;
            let (e, o) = if i == j { (1u32 - e, 1u32 - o) } else { (-e, -o) };
            even[j * n + i] = e.clone();
            even[i * n + j] = e;
            odd[j * n + i] = o.clone();
            odd[i * n + j] = o;
        }
    }
    for mat in [even, odd] {
        let (ld, ml) = positive_log_det(mat, n)?;
        total += ld;
        min_log2 = min_log2.min(ml);
    }
    Ok(MpLogDet { log_det: total, bits, outer_nodes: 2 * n, inner_nodes: 0, min_pivot_log2: min_log2 })
}

/// Runs `compute` at increasing precision until the pivot check passes.
pub fn with_escalation<F>(bits: u32, mut compute: F) -> Result<MpLogDet>
where
    F: FnMut(u32) -> Result<MpLogDet>,
{
    let mut bits = bits;
    let mut last_err = None;
    for _ in 0..=ESCALATIONS {
        match compute(bits) {
            Ok(r) if r.is_resolved() => return Ok(r),
            Ok(r) => last_err = Some(Error::Conditioning { pivot: 2f64.powf(r.min_pivot_log2) }),
            Err(e @ Error::Sign { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
        bits = (bits * 2).min(MAX_BITS);
    }
    Err(last_err.unwrap_or(Error::Conditioning { pivot: 0.0 }))
}

/// moment(s, k) = integral of sigma(l; s) l^k over the real line, k in {0, 2}.
pub fn moment(s: &Float, k: u32, bits: u32) -> Result<Float> {
    if k != 0 && k != 2 {
        return Err(Error::invalid(format!("moment order must be 0 or 2, got {k}")));
    }
    let prec = bits;
    let sf = s.to_f64();
    let radius = truncation(sf, bits);
    let bp = sigma_breakpoints(sf, radius, 0.0);
    let (t, w) = composite(&bp, panel_order(bits), prec)?;
    let s = Float::with_val(prec, s);
    let mut acc = float(prec, 0.0);
    for (ti, wi) in t.iter().zip(&w) {
        let mut term = sigma(ti, &s) * wi;
        if k == 2 {
            term *= Float::with_val(prec, ti.square_ref());
        }
        acc += term;
    }
    Ok(acc * 2u32)
}

/// moment(tau, 0) for tau <= -1 from sqrt(pi) sum (-1)^{j+1} e^{j tau} / sqrt(j).
fn moment0_series(tau: &Float, prec: u32) -> Float {
    let z = Float::with_val(prec, tau.exp_ref());
    let mut zj = z.clone();
    let mut sum = float(prec, 0.0);
    let cutoff = Float::with_val(prec, Float::i_exp(1, -(prec as i32) - 8));
    for j in 1u32.. {
        let term = Float::with_val(prec, &zj / Float::with_val(prec, j).sqrt());
        if j % 2 == 1 {
            sum += &term;
        } else {
            sum -= &term;
        }
        if term < Float::with_val(prec, &sum * &cutoff) {
            break;
        }
        zj *= &z;
    }
    sum * Float::with_val(prec, Constant::Pi).sqrt()
}

/// c0(s) = (1 / 2 pi^2) * integral over (-inf, s) of moment(tau, 0)^2.
pub fn c0(s: &Float, bits: u32) -> Result<Float> {
    let prec = bits;
    let sf = s.to_f64();
    let lower = sf.min(0.0) - bits as f64 * LN_2 / 2.0 - 10.0;
    let mut anchors = vec![];
    if sf > -1.0 {
        anchors.push(-1.0);
    }
    // moment(tau, 0) has its singularities at tau = i pi (2k + 1)
    let bp = graded_breakpoints(lower, sf, &anchors, |_| 0.5 * PI);
    let (t, w) = composite(&bp, panel_order(bits), prec)?;
    let mut acc = float(prec, 0.0);
    for (ti, wi) in t.iter().zip(&w) {
        let m0 = if ti.to_f64() <= -1.0 { moment0_series(ti, prec) } else { moment(ti, 0, bits)? };
        acc += m0.square() * wi;
    }
    let pi2 = Float::with_val(prec, Constant::Pi).pow(2u32);
    Ok(acc / (pi2 * 2u32))
}

/// -(2x/pi) moment(s, 2) + c0(s) in extended precision.
pub fn asy_no_gap(x: &Float, s: &Float, bits: u32) -> Result<Float> {
    let prec = bits;
    let pi = Float::with_val(prec, Constant::Pi);
    let m2 = moment(s, 2, bits)?;
    let lead = Float::with_val(prec, x * &m2) * 2u32 / pi;
    Ok(c0(s, bits)? - lead)
}
