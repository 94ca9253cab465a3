//! Executable checks of the identities satisfied by log D(x, s): the two PDEs,
//! the small-x data, equivalence of the two kernel representations, the dilute
//! limit, the phase-transition coefficient and residual scans of the regime
//! predictions.

use std::f64::consts::PI;

use rayon::prelude::*;
use rug::Float;
use serde::Serialize;

use crate::asymptotics::{
    classify_regime, coeff_c, predict, sine_large_gap_asy, x_from_scaled_y, RegimeReport, Side,
};
use crate::error::{Error, Result};
use crate::fermi::moment;
use crate::fredholm::{
    airy_ai, gap_log_det_with, nystrom_logdet, tw_log_cdf_via_airy, KernelSpec, TruthOptions,
};
use crate::painleve::{PainleveIITable, SigmaPVTable};
use crate::precise::{self, bits_for, interval_log_det, interval_nodes, with_escalation};

/// Finite-difference step used by the PDE checks.
pub const DEFAULT_STEP: f64 = 0.05;
/// Absolute accuracy of each stencil determinant.
const STENCIL_TARGET: f64 = 1e-30;
/// Inner nodes per panel for the interval kernel in the equivalence check.
const EQUIVALENCE_INNER_NODES: usize = 32;
const POISSON_BITS: u32 = 128;
/// Step of the finite differences across l = 1.
const WITNESS_STEP: f64 = 1e-2;

/// Uniformly spaced values start, start + step, ... up to `end`.
pub fn axis(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite()) || end < start {
        return Err(Error::invalid(format!("empty range {start}:{end}")));
    }
    if start == end {
        return Ok(vec![start]);
    }
    if !(step > 0.0) {
        return Err(Error::invalid(format!("range step must be > 0, got {step}")));
    }
    let count = ((end - start) / step + 1e-9).floor() as usize + 1;
    if count > 100_000 {
        return Err(Error::invalid(format!("range {start}:{end}:{step} has {count} points")));
    }
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn spacing(what: &str, values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid(format!("{what} axis is empty")));
    }
    if values.len() == 1 {
        return Ok(0.0);
    }
    let h = (values[values.len() - 1] - values[0]) / (values.len() - 1) as f64;
    for (k, w) in values.windows(2).enumerate() {
        if !(w[1] > w[0]) || ((w[1] - w[0]) - h).abs() > 1e-9 * h.max(1.0) {
            return Err(Error::invalid(format!("{what} axis not uniform at index {k}")));
        }
    }
    Ok(h)
}

/// log D on a uniform (x, s) grid.
#[derive(Debug, Clone, Serialize)]
pub struct GridSample {
    pub x_values: Vec<f64>,
    pub s_values: Vec<f64>,
    /// `log_d[j][i]` at (x_values[i], s_values[j]); NaN where the solve failed.
    pub log_d: Vec<Vec<f64>>,
    pub h_x: f64,
    pub h_s: f64,
    /// (i, j, message) for every failed point.
    pub errors: Vec<(usize, usize, String)>,
}

impl GridSample {
    /// Fills the grid with the truth engine.
    pub fn compute(x_values: Vec<f64>, s_values: Vec<f64>, opts: &TruthOptions) -> Result<Self> {
        Self::compute_with(x_values, s_values, |x, s| Ok(gap_log_det_with(x, s, opts)?.log_det))
    }

    /// Fills the grid with an arbitrary log D evaluator.
    pub fn compute_with<F>(x_values: Vec<f64>, s_values: Vec<f64>, eval: F) -> Result<Self>
    where
        F: Fn(f64, f64) -> Result<f64> + Sync,
    {
        let h_x = spacing("x", &x_values)?;
        let h_s = spacing("s", &s_values)?;
        let nx = x_values.len();
        let points: Vec<(usize, usize)> =
            (0..s_values.len()).flat_map(|j| (0..nx).map(move |i| (i, j))).collect();
        let values: Vec<Result<f64>> = points
            .par_iter()
            .map(|&(i, j)| {
                let v = eval(x_values[i], s_values[j])?;
                if v > 1e-12 {
                    return Err(Error::Consistency { what: "log D <= 0", a: v, b: 0.0, tol: 1e-12 });
                }
                Ok(v.min(0.0))
            })
            .collect();
        let mut log_d = vec![vec![f64::NAN; nx]; s_values.len()];
        let mut errors = Vec::new();
        for (&(i, j), v) in points.iter().zip(values) {
            match v {
                Ok(v) => log_d[j][i] = v,
                Err(e) => errors.push((i, j, e.to_string())),
            }
        }
        Ok(Self { x_values, s_values, log_d, h_x, h_s, errors })
    }

    pub fn len(&self) -> usize {
        self.x_values.len() * self.s_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        let v = self.log_d[j][i];
        v.is_finite().then_some(v)
    }

    /// Largest violation of log D non-increasing in x and in s (0 if monotone).
    pub fn monotonicity_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.log_d {
            for w in row.windows(2) {
                if w[0].is_finite() && w[1].is_finite() {
                    worst = worst.max(w[1] - w[0]);
                }
            }
        }
        for w in self.log_d.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                if a.is_finite() && b.is_finite() {
                    worst = worst.max(b - a);
                }
            }
        }
        worst
    }
}

/// A PDE residual with the magnitude of its largest term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeResidual {
    pub residual: f64,
    pub scale: f64,
    /// residual / scale
    pub relative: f64,
}

/// log D on the 5 × 3 points (x + i h, s + j h), i in -2..=2, j in -1..=1,
/// with the coordinates formed exactly in extended precision.
#[derive(Debug, Clone)]
pub struct Stencil {
    pub x: f64,
    pub s: f64,
    pub h: f64,
    pub bits: u32,
    pub outer_nodes: usize,
    q: Vec<Float>,
}

impl Stencil {
    pub fn compute(x: f64, s: f64, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::invalid(format!("stencil step must be > 0, got {h}")));
        }
        if !(x - 2.0 * h > 0.0) || !x.is_finite() || !s.is_finite() {
            return Err(Error::invalid(format!("stencil around ({x}, {s}) with h = {h} leaves x > 0")));
        }
        let bits = bits_for(x + 2.0 * h, s + h, STENCIL_TARGET);
        let m = interval_nodes(x + 2.0 * h, s + h, bits);
        let points: Vec<(i32, i32)> = (-1..=1).flat_map(|j| (-2..=2).map(move |i| (i, j))).collect();
        let solved: Vec<Result<precise::MpLogDet>> = points
            .par_iter()
            .map(|&(i, j)| {
                with_escalation(bits, |b| {
                    let xs = Float::with_val(b, x) + Float::with_val(b, h) * i;
                    let ss = Float::with_val(b, s) + Float::with_val(b, h) * j;
                    interval_log_det(&xs, &ss, m, b)
                })
            })
            .collect();
        let q = solved
            .into_iter()
            .map(|r| r.map(|d| Float::with_val(bits, d.log_det)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { x, s, h, bits, outer_nodes: m, q })
    }

    fn q(&self, i: i32, j: i32) -> &Float {
        &self.q[((j + 1) * 5 + i + 2) as usize]
    }

    fn f(&self, v: f64) -> Float {
        Float::with_val(self.bits, v)
    }

    /// Second x-difference of q at (i, j), i in -1..=1.
    fn qxx(&self, i: i32, j: i32) -> Float {
        let h2 = self.f(self.h * self.h);
        let d = Float::with_val(self.bits, self.q(i + 1, j) + self.q(i - 1, j)) - self.f(2.0) * self.q(i, j);
        d / h2
    }

    /// b² = −q_xx at (i, j), rejecting negative values.
    fn b2(&self, i: i32, j: i32) -> Result<Float> {
        let v = -self.qxx(i, j);
        if !v.is_sign_positive() || v.is_zero() {
            return Err(Error::NegativeSquare {
                x: self.x + i as f64 * self.h,
                s: self.s + j as f64 * self.h,
                b2: v.to_f64(),
            });
        }
        Ok(v)
    }

    /// ∂x(∂s∂x b / (2b)) − ∂s(b²) + 1 at the centre.
    pub fn residual_b(&self) -> Result<PdeResidual> {
        let h = self.f(self.h);
        let mut b = Vec::with_capacity(9);
        for j in -1..=1 {
            for i in -1..=1 {
                b.push(self.b2(i, j)?.sqrt());
            }
        }
        let at = |i: i32, j: i32| &b[((j + 1) * 3 + i + 1) as usize];
        let two = self.f(2.0);
        let b0 = at(0, 0).clone();
        let bx = Float::with_val(self.bits, at(1, 0) - at(-1, 0)) / (two.clone() * &h);
        let bsx = (Float::with_val(self.bits, at(1, 1) - at(1, -1)) - at(-1, 1) + at(-1, -1))
            / (self.f(4.0) * &h * &h);
        let xx = |j: i32| Float::with_val(self.bits, at(1, j) + at(-1, j)) - two.clone() * at(0, j);
        let bsxx = (xx(1) - xx(-1)) / (two.clone() * &h * &h * &h);
        let b2s = Float::with_val(self.bits, self.b2(0, 1)? - self.b2(0, -1)?) / (two.clone() * &h);

        let t1 = Float::with_val(self.bits, &bsxx / (two.clone() * &b0));
        let t2 = -Float::with_val(self.bits, &bsx * &bx) / (two * &b0 * &b0);
        let t3 = -b2s;
        let sum = Float::with_val(self.bits, &t1 + &t2) + &t3 + 1u32;
        let scale = [t1.to_f64(), t2.to_f64(), t3.to_f64(), 1.0].iter().fold(0.0f64, |m, t| m.max(t.abs()));
        let residual = sum.to_f64();
        Ok(PdeResidual { residual, scale, relative: residual / scale })
    }

    /// (∂s q_xx)² + 4 q_xx (2x ∂s∂x q + (∂s∂x q)² − 2 ∂s q) at the centre,
    /// relative to its largest term.
    pub fn residual_q(&self) -> Result<PdeResidual> {
        let h = self.f(self.h);
        let two = self.f(2.0);
        let qxx = self.qxx(0, 0);
        let qsxx = (self.qxx(0, 1) - self.qxx(0, -1)) / (two.clone() * &h);
        let qsx = (Float::with_val(self.bits, self.q(1, 1) - self.q(1, -1)) - self.q(-1, 1) + self.q(-1, -1))
            / (self.f(4.0) * &h * &h);
        let qs = Float::with_val(self.bits, self.q(0, 1) - self.q(0, -1)) / (two * &h);

        let t1 = Float::with_val(self.bits, qsxx.square_ref());
        let t2 = self.f(8.0 * self.x) * &qxx * &qsx;
        let t3 = self.f(4.0) * &qxx * Float::with_val(self.bits, qsx.square_ref());
        let t4 = self.f(-8.0) * &qxx * &qs;
        let sum = Float::with_val(self.bits, &t1 + &t2) + &t3 + &t4;
        let scale = [&t1, &t2, &t3, &t4].iter().fold(0.0f64, |m, t| m.max(t.to_f64().abs()));
        let residual = sum.to_f64();
        if !(scale > 0.0) {
            return Err(Error::Consistency { what: "PDE term scale", a: scale, b: 0.0, tol: 0.0 });
        }
        Ok(PdeResidual { residual, scale, relative: residual / scale })
    }
}

/// Residual of the PDE satisfied by b = √(−∂²ₓ log D).
pub fn pde_residual_b(x: f64, s: f64, h: f64) -> Result<PdeResidual> {
    Stencil::compute(x, s, h)?.residual_b()
}

/// Scale-relative residual of the PDE satisfied by q = log D.
pub fn pde_residual_q(x: f64, s: f64, h: f64) -> Result<PdeResidual> {
    Stencil::compute(x, s, h)?.residual_q()
}

/// D(x, s) − (1 − (x/π) ∫σ), which is O(x²).
pub fn small_x_residual(x: f64, s: f64) -> Result<f64> {
    if !(x > 0.0 && x <= 0.1) {
        return Err(Error::OutOfRange { what: "x", value: x, lo: 0.0, hi: 0.1 });
    }
    let d = gap_log_det_with(x, s, &TruthOptions::default())?.log_det.exp();
    Ok(d - (1.0 - x / PI * moment(s, 0)?))
}

/// |log det of the weighted kernel − log det of the interval kernel| at `m` nodes.
pub fn rep_equivalence(x: f64, s: f64, m: usize) -> Result<f64> {
    if m < 100 {
        return Err(Error::OutOfRange { what: "m", value: m as f64, lo: 100.0, hi: f64::INFINITY });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let weighted = nystrom_logdet(&KernelSpec::ft_weighted(x, s), m)?;
    let interval = nystrom_logdet(&KernelSpec::ft_interval(x, s, EQUIVALENCE_INNER_NODES), m)?;
    Ok((weighted.log_det - interval.log_det).abs())
}

/// |log D + tr K| / tr K with tr K = (x/π) ∫σ, for s ≤ −10.
pub fn poisson_limit_check(x: f64, s: f64) -> Result<f64> {
    if !(s <= -10.0) {
        return Err(Error::OutOfRange { what: "s", value: s, lo: f64::NEG_INFINITY, hi: -10.0 });
    }
    if !(x > 0.0 && x.is_finite()) {
        return Err(Error::invalid(format!("gap parameter x must be > 0, got {x}")));
    }
    let bits = POISSON_BITS;
    let xs = Float::with_val(bits, x);
    let ss = Float::with_val(bits, s);
    let m = interval_nodes(x, s, bits);
    let ld = with_escalation(bits, |b| interval_log_det(&xs, &ss, m, b))?;
    let pi = Float::with_val(bits, rug::float::Constant::Pi);
    let trace = Float::with_val(bits, &xs / &pi) * precise::moment(&ss, 0, bits)?;
    let dev = Float::with_val(bits, &ld.log_det + &trace).abs() / &trace;
    Ok(dev.to_f64())
}

/// Finite-difference comparison of the C₋ and C₊ branches at l = 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionWitness {
    /// |C₋ − C₊| and |C₋^(k) − C₊^(k)| for k = 1, 2.
    pub value_gap: f64,
    pub first_gap: f64,
    pub second_gap: f64,
    /// C₋‴(1) − C₊‴(1); 2 exactly.
    pub third_jump: f64,
}

fn branch_derivatives(side: Side, d: f64) -> Result<[f64; 4]> {
    central_derivatives(|l| coeff_c(l, side), 1.0, d)
}

/// Value and sixth-order central first, second and third derivatives at `at`.
fn central_derivatives<F: Fn(f64) -> Result<f64>>(f: F, centre: f64, d: f64) -> Result<[f64; 4]> {
    let v: Vec<f64> = (-4..=4).map(|k| f(centre + k as f64 * d)).collect::<Result<_>>()?;
    let at = |k: i32| v[(k + 4) as usize];
    let d1 = (at(3) - 9.0 * at(2) + 45.0 * at(1) - 45.0 * at(-1) + 9.0 * at(-2) - at(-3)) / (60.0 * d);
    let d2 = (2.0 * at(3) - 27.0 * at(2) + 270.0 * at(1) - 490.0 * at(0) + 270.0 * at(-1) - 27.0 * at(-2)
        + 2.0 * at(-3))
        / (180.0 * d * d);
    let d3 = (7.0 * at(4) - 72.0 * at(3) + 338.0 * at(2) - 488.0 * at(1) + 488.0 * at(-1) - 338.0 * at(-2)
        + 72.0 * at(-3)
        - 7.0 * at(-4))
        / (240.0 * d * d * d);
    Ok([at(0), d1, d2, d3])
}

/// Sixth-order central differences of both coefficient branches at l = 1.
pub fn phase_transition_witness() -> Result<TransitionWitness> {
    let minus = branch_derivatives(Side::Minus, WITNESS_STEP)?;
    let plus = branch_derivatives(Side::Plus, WITNESS_STEP)?;
    Ok(TransitionWitness {
        value_gap: (minus[0] - plus[0]).abs(),
        first_gap: (minus[1] - plus[1]).abs(),
        second_gap: (minus[2] - plus[2]).abs(),
        third_jump: minus[3] - plus[3],
    })
}

/// Prediction, truth and residual at every grid point, sorted by (s, x).
/// Failures are recorded on the report instead of aborting the scan.
pub fn regime_residual_scan(grid: &GridSample, pii: &PainleveIITable, pv: &SigmaPVTable) -> Vec<RegimeReport> {
    let mut out = Vec::with_capacity(grid.len());
    for (j, &s) in grid.s_values.iter().enumerate() {
        for (i, &x) in grid.x_values.iter().enumerate() {
            let report = match predict(x, s, pii, pv) {
                Ok(r) => r,
                Err(e) => classify_regime(x, s).with_error(e),
            };
            let report = match grid.get(i, j) {
                Some(truth) => report.with_truth(truth),
                None => {
                    let msg = grid
                        .errors
                        .iter()
                        .find(|(a, b, _)| *a == i && *b == j)
                        .map_or_else(|| "truth unavailable".to_string(), |(_, _, m)| m.clone());
                    match report.error {
                        Some(ref prev) => {
                            let combined = format!("{prev}; {msg}");
                            report.with_error(combined)
                        }
                        None => report.with_error(msg),
                    }
                }
            };
            out.push(report);
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Pde,
    SmallX,
    Equivalence,
    Limits,
    Regimes,
    Painleve,
    All,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Suite::Pde, Suite::SmallX, Suite::Equivalence, Suite::Limits, Suite::Regimes, Suite::Painleve];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Pde => "pde",
            Suite::SmallX => "smallx",
            Suite::Equivalence => "equivalence",
            Suite::Limits => "limits",
            Suite::Regimes => "regimes",
            Suite::Painleve => "painleve",
            Suite::All => "all",
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .iter()
            .chain(std::iter::once(&Suite::All))
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| Error::invalid(format!("unknown suite '{s}'")))
    }
}

/// One check: passes when `observed` is within `tolerance` (or, for
/// ratio-style checks, the stated bound).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub tolerance: f64,
    pub observed: f64,
    pub passed: bool,
    /// Set when the check could not be evaluated at all.
    pub error: Option<String>,
}

impl Check {
    fn below(suite: &'static str, name: impl Into<String>, tolerance: f64, observed: Result<f64>) -> Self {
        Self::judge(suite, name, tolerance, observed, |v| v.abs() < tolerance)
    }

    fn judge(
        suite: &'static str,
        name: impl Into<String>,
        tolerance: f64,
        observed: Result<f64>,
        pass: impl Fn(f64) -> bool,
    ) -> Self {
        let name = name.into();
        match observed {
            Ok(v) => Check { suite, name, tolerance, observed: v, passed: pass(v), error: None },
            Err(e) => Check { suite, name, tolerance, observed: f64::NAN, passed: false, error: Some(e.to_string()) },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub suite: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
}

/// Runs a suite. The Painlevé tables are only needed by `painleve`,
/// `regimes` and `all`.
pub fn run_suite(suite: Suite, pii: &PainleveIITable, pv: &SigmaPVTable) -> ValidationReport {
    let checks = match suite {
        Suite::All => Suite::ALL.iter().flat_map(|&s| run_suite(s, pii, pv).checks).collect(),
        Suite::Pde => pde_checks(),
        Suite::SmallX => small_x_checks(),
        Suite::Equivalence => equivalence_checks(),
        Suite::Limits => limit_checks(),
        Suite::Regimes => regime_checks(pii, pv),
        Suite::Painleve => painleve_checks(pii, pv),
    };
    let passed = checks.iter().all(|c| c.passed);
    ValidationReport { suite: suite.name(), passed, checks }
}

/// PDE check points.
pub const PDE_POINTS: [(f64, f64); 3] = [(1.0, -2.0), (2.0, 2.0), (4.0, 8.0)];
/// Bounds on the residual ratio between steps h and h/2 for a second-order stencil.
pub const HALVING_RATIO: (f64, f64) = (2.5, 6.0);

fn pde_checks() -> Vec<Check> {
    let suite = "pde";
    let mut out = Vec::new();
    for &(x, s) in &PDE_POINTS {
        let coarse = Stencil::compute(x, s, DEFAULT_STEP);
        let fine = Stencil::compute(x, s, DEFAULT_STEP / 2.0);
        let pair = |st: &Result<Stencil>, which: fn(&Stencil) -> Result<PdeResidual>| {
            st.as_ref().map_err(clone_err).and_then(which)
        };
        let checks: [(&str, fn(&Stencil) -> Result<PdeResidual>); 2] =
            [("b", Stencil::residual_b), ("q", Stencil::residual_q)];
        for (label, which) in checks {
            let c = pair(&coarse, which);
            let f = pair(&fine, which);
            out.push(Check::below(
                suite,
                format!("pde_{label} relative residual at ({x}, {s}), h = {DEFAULT_STEP}"),
                5e-2,
                c.as_ref().map(|r| r.relative).map_err(clone_err),
            ));
            let ratio = match (c, f) {
                (Ok(c), Ok(f)) => Ok(c.residual.abs() / f.residual.abs()),
                (Err(e), _) | (_, Err(e)) => Err(e),
            };
            out.push(Check::judge(
                suite,
                format!("pde_{label} residual ratio h / (h/2) at ({x}, {s})"),
                HALVING_RATIO.1,
                ratio,
                |r| r >= HALVING_RATIO.0 && r <= HALVING_RATIO.1,
            ));
        }
    }
    out
}

fn clone_err(e: &Error) -> Error {
    Error::InvalidArgument(e.to_string())
}

/// Small-x abscissae and Fermi parameters of the O(x²) check.
pub const SMALL_X_POINTS: [f64; 3] = [0.02, 0.04, 0.08];
pub const SMALL_X_S: [f64; 3] = [-5.0, 0.0, 5.0];

/// max/min of |residual| / x^power over `SMALL_X_POINTS` at fixed s.
///
/// The second-order term of det(I - K), ((tr K)² - tr K²)/2, vanishes to
/// fourth order in x, so the residual is flat against x⁴ and falls like x²
/// against x².
pub fn small_x_ratio_spread(s: f64, power: i32) -> Result<f64> {
    let ratios = SMALL_X_POINTS
        .iter()
        .map(|&x| Ok(small_x_residual(x, s)? / x.powi(power)))
        .collect::<Result<Vec<f64>>>()?;
    if ratios.iter().any(|r| r.signum() != ratios[0].signum() || *r == 0.0) {
        return Ok(f64::INFINITY);
    }
    let hi = ratios.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let lo = ratios.iter().fold(f64::INFINITY, |a, &b| a.min(b.abs()));
    Ok(hi / lo)
}

fn small_x_checks() -> Vec<Check> {
    let suite = "smallx";
    let mut out: Vec<Check> = SMALL_X_S
        .iter()
        .map(|&s| {
            Check::judge(suite, format!("residual/x^4 spread at s = {s}"), 2.0, small_x_ratio_spread(s, 4), |r| {
                r <= 2.0
            })
        })
        .collect();
    out.push(Check::below(suite, "residual at (0.05, -5)", 1e-3, small_x_residual(0.05, -5.0)));
    let monotone = SMALL_X_POINTS
        .iter()
        .map(|&x| small_x_residual(x, 0.0).map(f64::abs))
        .collect::<Result<Vec<_>>>()
        .map(|r| r.windows(2).map(|w| w[0] - w[1]).fold(f64::NEG_INFINITY, f64::max));
    out.push(Check::judge(suite, "residual decreases as x -> 0 at s = 0", 0.0, monotone, |d| d < 0.0));
    out
}

/// Grid of the representation-equivalence check.
pub const EQUIVALENCE_X: [f64; 3] = [1.0, 2.0, 4.0];
pub const EQUIVALENCE_S: [f64; 3] = [0.0, 4.0, 16.0];

fn equivalence_checks() -> Vec<Check> {
    let suite = "equivalence";
    let mut out = Vec::new();
    for &s in &EQUIVALENCE_S {
        for &x in &EQUIVALENCE_X {
            out.push(Check::below(suite, format!("weighted vs interval at ({x}, {s}), m = 200"), 1e-7, rep_equivalence(x, s, 200)));
        }
    }
    out.push(Check::below(suite, "weighted vs interval at (0.5, 0), m = 200", 1e-9, rep_equivalence(0.5, 0.0, 200)));
    out.push(Check::judge(suite, "x = 0 gives 0 exactly", 0.0, rep_equivalence(0.0, 3.0, 200), |v| v == 0.0));
    out
}

fn limit_checks() -> Vec<Check> {
    let suite = "limits";
    let a = poisson_limit_check(2.0, -15.0);
    let b = poisson_limit_check(2.0, -30.0);
    let improves = match (&a, &b) {
        (Ok(a), Ok(b)) => Ok(b / a),
        (Err(e), _) | (_, Err(e)) => Err(clone_err(e)),
    };
    let linear = (|| {
        let opts = TruthOptions { precision: crate::fredholm::Precision::Bits(POISSON_BITS), ..Default::default() };
        let two = gap_log_det_with(2.0, -15.0, &opts)?.log_det;
        let four = gap_log_det_with(4.0, -15.0, &opts)?.log_det;
        Ok((four / two - 2.0).abs())
    })();
    vec![
        Check::below(suite, "dilute limit at (2, -15)", 1e-4, a),
        Check::judge(suite, "dilute limit improves from s = -15 to -30", 1.0, improves, |r| r < 1.0),
        Check::below(suite, "-log D linear in x at s = -15", 1e-4, linear),
    ]
}

/// x values of the no-gap scan.
pub const NO_GAP_X: [f64; 3] = [6.0, 7.0, 8.0];
pub const NO_GAP_S: [f64; 3] = [0.0, 2.0, 4.0];
pub const TRANSITION_S: f64 = 50.0;
pub const TRANSITION_Y: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

fn scan_max(reports: &[RegimeReport]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for r in reports {
        match (r.residual, &r.error) {
            (Some(v), None) => worst = worst.max(v.abs()),
            (_, Some(e)) => return Err(Error::InvalidArgument(format!("({}, {}): {e}", r.x, r.s))),
            (None, None) => return Err(Error::invalid(format!("({}, {}) has no residual", r.x, r.s))),
        }
    }
    Ok(worst)
}

fn regime_checks(pii: &PainleveIITable, pv: &SigmaPVTable) -> Vec<Check> {
    let suite = "regimes";
    let mut out = Vec::new();
    let opts = TruthOptions::default();

    let no_gap = GridSample::compute(NO_GAP_X.to_vec(), NO_GAP_S.to_vec(), &opts)
        .map(|g| regime_residual_scan(&g, pii, pv));
    let ng = no_gap.as_ref().map_err(clone_err).and_then(|r| scan_max(r));
    out.push(Check::below(suite, "no-gap residual for x >= 6, s <= 4", 1e-3, ng));

    let xs: Result<Vec<f64>> = TRANSITION_Y.iter().map(|&y| x_from_scaled_y(y, TRANSITION_S)).collect();
    let transition = xs
        .and_then(|xs| GridSample::compute(xs, vec![TRANSITION_S], &opts))
        .map(|g| regime_residual_scan(&g, pii, pv));
    let bound = 5.0 * TRANSITION_S.powf(-1.0 / 6.0);
    let tr = transition.as_ref().map_err(clone_err).and_then(|r| scan_max(r));
    out.push(Check::judge(suite, "transition residual at s = 50, |y| <= 2", bound, tr, |v| v <= bound));

    let all: Vec<&RegimeReport> =
        no_gap.iter().flatten().chain(transition.iter().flatten()).collect();
    let positive = all
        .iter()
        .flat_map(|r| [r.prediction, r.truth])
        .flatten()
        .fold(f64::NEG_INFINITY, f64::max);
    out.push(Check::judge(suite, "scan predictions and truths are <= 0", 0.0, Ok(positive), |v| v <= 0.0));

    let w = phase_transition_witness();
    let field = |f: fn(&TransitionWitness) -> f64| w.as_ref().map(f).map_err(clone_err);
    out.push(Check::below(suite, "C(l) continuous at l = 1", 1e-8, field(|w| w.value_gap)));
    out.push(Check::below(suite, "C'(l) continuous at l = 1", 1e-8, field(|w| w.first_gap)));
    out.push(Check::below(suite, "C''(l) continuous at l = 1", 1e-8, field(|w| w.second_gap)));
    out.push(Check::judge(suite, "third-derivative jump at l = 1 (nominal 2)", 1e-5, field(|w| w.third_jump), |j| {
        (j - 2.0).abs() <= 1e-5
    }));
    out
}

/// Abscissae of the Tracy–Widom cross-check.
pub const TW_POINTS: [f64; 4] = [-4.0, -2.0, 0.0, 2.0];
pub const SINE_POINTS: [f64; 3] = [1.0, 2.0, 4.0];

fn painleve_checks(pii: &PainleveIITable, pv: &SigmaPVTable) -> Vec<Check> {
    let suite = "painleve";
    let mut out = Vec::new();
    for &y in &TW_POINTS {
        let diff = (|| Ok(pii.tw_log_cdf(y)? - tw_log_cdf_via_airy(y, 120)?))();
        out.push(Check::below(suite, format!("log F_TW({y}) vs Airy determinant"), 1e-6, diff));
        let routes = pii.tw_log_cdf_routes(y).map(|(a, b)| a - b);
        out.push(Check::below(suite, format!("log F_TW({y}) route agreement"), 1e-8, routes));
    }
    let ratio = (|| Ok(pii.u_at(6.0)? / airy_ai(6.0)?.0 - 1.0))();
    out.push(Check::below(suite, "u(6)/Ai(6) - 1", 1e-6, ratio));
    let left = (|| Ok(pii.u_at(-8.0)? / 2.0 - 1.0))();
    out.push(Check::below(suite, "u(-8)/2 - 1", 2e-2, left));
    for &t in &SINE_POINTS {
        let diff = (|| Ok(pv.logdet_sine(t)? - nystrom_logdet(&KernelSpec::sine(t), 80)?.log_det))();
        out.push(Check::below(suite, format!("sigma-PV log det at t = {t} vs Nystrom"), 1e-6, diff));
    }
    let constant = (|| Ok(nystrom_logdet(&KernelSpec::sine(8.0), 120)?.log_det - sine_large_gap_asy(8.0)?))();
    out.push(Check::below(suite, "sine determinant at 8 vs large-gap asymptotics", 5e-3, constant));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_differences_of_exp() {
        let [v, d1, d2, d3] = central_derivatives(|t| Ok(t.exp()), 0.5, 1e-2).unwrap();
        let e = 0.5f64.exp();
        assert!((v - e).abs() < 1e-15);
        assert!((d1 - e).abs() < 1e-12);
        assert!((d2 - e).abs() < 1e-10);
        assert!((d3 - e).abs() < 1e-7);
    }

    #[test]
    fn witness_matches_closed_form() {
        let w = phase_transition_witness().unwrap();
        assert!(w.value_gap < 1e-12 && w.first_gap < 1e-8 && w.second_gap < 1e-8, "{w:?}");
        assert!((w.third_jump - 2.0).abs() < 1e-5, "{w:?}");
    }

    #[test]
    fn axis_and_spacing() {
        assert_eq!(axis(0.0, 1.0, 0.25).unwrap(), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(axis(2.0, 2.0, 0.0).unwrap(), vec![2.0]);
        assert_eq!(axis(0.0, 0.3, 0.1).unwrap().len(), 4);
        assert!(axis(1.0, 0.0, 0.1).is_err());
        assert!(axis(0.0, 1.0, 0.0).is_err());
        assert!(spacing("x", &[0.0, 1.0, 3.0]).is_err());
        assert!(spacing("x", &[]).is_err());
    }

    #[test]
    fn grid_records_failures_and_monotonicity() {
        let g = GridSample::compute_with(vec![1.0, 2.0, 3.0], vec![0.0, 1.0], |x, s| {
            if x == 2.0 && s == 1.0 {
                Err(Error::invalid("boom"))
            } else {
                Ok(-x * (1.0 + s))
            }
        })
        .unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(g.errors.len(), 1);
        assert_eq!(g.get(1, 1), None);
        assert_eq!(g.get(2, 1), Some(-6.0));
        assert_eq!(g.monotonicity_defect(), 0.0);
        let bad = GridSample::compute_with(vec![1.0, 2.0], vec![0.0], |x, _| Ok(if x > 1.5 { 1.0 } else { -1.0 }));
        assert_eq!(bad.unwrap().errors.len(), 1);
        let up = GridSample::compute_with(vec![1.0, 2.0], vec![0.0], |x, _| Ok(-1.0 / x)).unwrap();
        assert!((up.monotonicity_defect() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn preconditions() {
        assert_eq!(rep_equivalence(0.0, 7.0, 200).unwrap(), 0.0);
        assert!(rep_equivalence(1.0, 0.0, 99).is_err());
        assert!(poisson_limit_check(2.0, -5.0).is_err());
        assert!(small_x_residual(0.2, 0.0).is_err());
        assert!(small_x_residual(0.0, 0.0).is_err());
        assert!(Stencil::compute(0.05, 0.0, 0.05).is_err());
        assert!(Stencil::compute(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL.iter().chain([Suite::All].iter()) {
            assert_eq!(s.name().parse::<Suite>().unwrap(), *s);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn small_x_residual_is_fourth_order() {
        let spread = small_x_ratio_spread(0.0, 4).unwrap();
        assert!(spread < 1.1, "{spread}");
        let r2 = small_x_ratio_spread(0.0, 2).unwrap();
        assert!((r2 - 16.0).abs() < 1.0, "{r2}");
    }
}
