//! Acceptance criteria 1–11, one status line each.
//!
//! Runs without the libtest harness so that the lines are always printed.
//! A line is `PASS`, `FAIL`, or `KNOWN-FAIL` for a requirement that the
//! mathematics rules out at the stated tolerance; the reason is printed with
//! it and the literal check lives in `known_gaps.rs` as an ignored test.
//! The process exits non-zero only on a plain `FAIL`.

use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::Instant;

use rug::Float;

use ftgap::asymptotics::{
    asy_no_gap, asy_one_gap, asy_pv_regime, asy_transition, coeff_c, sine_large_gap_asy, x_from_scaled_y, Side,
};
use ftgap::fredholm::{airy_ai, cholesky_solve, gap_log_det, gap_log_det_with, nystrom_logdet, tw_log_cdf_via_airy};
use ftgap::fredholm::{KernelSpec, TruthOptions};
use ftgap::painleve::{hm_solve, logdet_sine_via_pv, pv_sigma_solve, PainleveIITable, SigmaPVTable};
use ftgap::precise;
use ftgap::quadrature::{gauss_legendre, map_affine};
use ftgap::validation::{
    axis, phase_transition_witness, rep_equivalence, small_x_ratio_spread, small_x_residual, GridSample, Stencil,
    EQUIVALENCE_S, EQUIVALENCE_X, HALVING_RATIO, PDE_POINTS, SINE_POINTS, SMALL_X_POINTS, SMALL_X_S, TRANSITION_S,
    TRANSITION_Y, TW_POINTS,
};

enum Status {
    Pass,
    Fail,
    Known(&'static str),
}

struct Line {
    id: &'static str,
    status: Status,
    detail: String,
}

fn line(id: &'static str, ok: bool, detail: String) -> Line {
    Line { id, status: if ok { Status::Pass } else { Status::Fail }, detail }
}

/// A literal requirement that cannot hold; passing it anyway would be a bug.
fn known(id: &'static str, ok: bool, detail: String, reason: &'static str) -> Line {
    Line { id, status: if ok { Status::Fail } else { Status::Known(reason) }, detail }
}

fn sci(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.2e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn max_of(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, f64::max)
}

fn criterion_1() -> Vec<Line> {
    let mut worst = 0.0f64;
    for &x in &EQUIVALENCE_X {
        for &s in &EQUIVALENCE_S {
            worst = worst.max(rep_equivalence(x, s, 200).unwrap_or(f64::INFINITY));
        }
    }
    vec![line("1", worst < 1e-7, format!("interval vs weighted, 3x3 grid, m = 200: max diff {worst:.2e} < 1e-7"))]
}

/// ∫ τ^k σ(τ; s) over the real line by the trapezoid rule, which converges
/// geometrically for this analytic, rapidly decaying integrand.
fn trapezoid_moment(s: f64, k: i32) -> f64 {
    let (h, n) = (1e-3, 20_000);
    (-n..=n)
        .map(|i| {
            let t = i as f64 * h;
            t.powi(k) / (1.0 + (t * t - s).exp())
        })
        .sum::<f64>()
        * h
}

fn criterion_2() -> Vec<Line> {
    let spreads_x2: Vec<f64> = SMALL_X_S.iter().map(|&s| small_x_ratio_spread(s, 2).unwrap_or(f64::INFINITY)).collect();
    let spreads_x4: Vec<f64> = SMALL_X_S.iter().map(|&s| small_x_ratio_spread(s, 4).unwrap_or(f64::INFINITY)).collect();
    // second Fredholm term: ((tr K)^2 - tr K^2)/2 = m0 m2 x^4 / (3 pi^2) + O(x^6)
    let coefficient_error = max_of(SMALL_X_S.iter().map(|&s| {
        let x = SMALL_X_POINTS[0];
        let predicted = trapezoid_moment(s, 0) * trapezoid_moment(s, 2) / (3.0 * PI * PI);
        let observed = small_x_residual(x, s).unwrap_or(f64::NAN) / x.powi(4);
        ((observed - predicted) / predicted).abs()
    }));
    vec![
        known(
            "2",
            max_of(spreads_x2.iter().copied()) <= 2.0,
            format!("residual/x^2 spreads {spreads_x2:.2?} within factor 2"),
            "D - (1 - tr K) = ((tr K)^2 - tr K^2)/2 + ... is O(x^4), so residual/x^2 varies by 16 over x = 0.02..0.08",
        ),
        line(
            "2",
            max_of(spreads_x4.iter().copied()) <= 2.0 && coefficient_error < 1e-2,
            format!(
                "residual/x^4 spreads {spreads_x4:.4?} within factor 2; x^4 coefficient vs m0 m2/(3 pi^2): rel err {coefficient_error:.1e} < 1e-2"
            ),
        ),
    ]
}

fn criterion_3() -> Vec<Line> {
    let bits = 320;
    let residuals: Vec<f64> = [4.0, 6.0, 8.0]
        .iter()
        .map(|&x| {
            let (xs, s) = (Float::with_val(bits, x), Float::with_val(bits, 0));
            let m = precise::interval_nodes(x, 0.0, bits);
            let truth = precise::with_escalation(bits, |b| precise::interval_log_det(&xs, &s, m, b));
            match (truth, precise::asy_no_gap(&xs, &s, bits)) {
                (Ok(t), Ok(a)) => Float::with_val(bits, t.log_det - a).abs().to_f64(),
                _ => f64::INFINITY,
            }
        })
        .collect();
    let decays = residuals.windows(2).all(|w| w[1] * 10.0 <= w[0]);
    vec![line(
        "3",
        decays && residuals[2] < 1e-4,
        format!("no-gap residual at s = 0, x = 4, 6, 8: {}; >= 10x decay per step, < 1e-4 at x = 8", sci(&residuals)),
    )]
}

fn one_gap_ratio(l: f64, s: f64) -> f64 {
    let x = 2.0 * l * s.sqrt() / PI;
    match (gap_log_det(x, s), asy_one_gap(x, s)) {
        (Ok(t), Ok(a)) => (t.log_det - a).abs() / s,
        _ => f64::INFINITY,
    }
}

fn criterion_4() -> Vec<Line> {
    let ls = [0.3, 0.5, 0.7];
    let at100: Vec<f64> = ls.iter().map(|&l| one_gap_ratio(l, 100.0)).collect();
    let at50: Vec<f64> = ls.iter().map(|&l| one_gap_ratio(l, 50.0)).collect();
    let stability = max_of(at100.iter().zip(&at50).map(|(a, b)| (a / b).max(b / a)));
    vec![line(
        "4",
        max_of(at100.iter().copied()) < 3.0 && stability <= 3.0,
        format!("one-gap |residual|/s at s = 100: {at100:.3?} < 3; s = 50: {at50:.3?}; worst ratio {stability:.2} <= 3"),
    )]
}

fn criterion_5(pii: &PainleveIITable) -> Vec<Line> {
    let s = TRANSITION_S;
    let bound = 5.0 * s.powf(-1.0 / 6.0);
    let residuals: Vec<f64> = TRANSITION_Y
        .iter()
        .map(|&y| {
            let x = x_from_scaled_y(y, s).unwrap();
            match (gap_log_det(x, s), asy_transition(x, s, pii)) {
                (Ok(t), Ok(a)) => (t.log_det - a).abs(),
                _ => f64::INFINITY,
            }
        })
        .collect();
    let x4 = x_from_scaled_y(4.0, s).unwrap();
    let tail = (asy_transition(x4, s, pii).unwrap() - asy_no_gap(x4, s).unwrap()).abs();
    let airy_tail = tw_log_cdf_via_airy(4.0, 120).map(f64::abs).unwrap_or(f64::NAN);
    vec![
        line("5", max_of(residuals.iter().copied()) <= bound, format!("transition residuals at s = 50, y = -2..2: {} <= {bound:.3}", sci(&residuals))),
        known(
            "5",
            tail < 1e-8,
            format!("|transition - no-gap| at y = 4: {tail:.3e} < 1e-8 (Airy-kernel |log F_TW(4)| = {airy_tail:.3e})"),
            "the difference is exactly |log F_TW(4)| ~ 5e-8; the Tracy-Widom tail first drops below 1e-8 near y = 4.37",
        ),
    ]
}

/// First-order Fermi-edge correction to log D in the Painlevé V regime:
/// (π²/(24 s²)) tr((I − K_sin)⁻¹ M), M(u, v) = θ sin θ + cos θ, θ = π(u − v), on (−t/π, t/π).
fn fermi_edge_correction(t: f64, s: f64) -> f64 {
    let m = 40;
    let rule = map_affine(&gauss_legendre(m).unwrap(), -t / PI, t / PI).unwrap();
    let (u, w) = (rule.nodes(), rule.weights());
    let mut a = vec![0.0; m * m];
    let mut rhs = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let th = PI * (u[i] - u[j]);
            let k = if th == 0.0 { 1.0 } else { th.sin() / th };
            let sw = (w[i] * w[j]).sqrt();
            a[i * m + j] = f64::from(u8::from(i == j)) - sw * k;
            rhs[j][i] = sw * (th * th.sin() + th.cos());
        }
    }
    cholesky_solve(&mut a, m, &mut rhs).unwrap();
    PI * PI / (24.0 * s * s) * (0..m).map(|i| rhs[i][i]).sum::<f64>()
}

fn criterion_6(pv: &SigmaPVTable) -> Vec<Line> {
    let s = 400.0f64;
    let ts = [0.5, 1.0, 2.0];
    let residuals: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let x = t / s.sqrt();
            match (gap_log_det(x, s), asy_pv_regime(x, s, pv)) {
                (Ok(d), Ok(a)) => d.log_det - a,
                _ => f64::NAN,
            }
        })
        .collect();
    let edge_error = max_of(ts.iter().zip(&residuals).map(|(&t, r)| {
        let c = fermi_edge_correction(t, s);
        ((r - c) / c).abs()
    }));
    let abs: Vec<f64> = residuals.iter().map(|r| r.abs()).collect();
    vec![
        line("6", abs[0] < 1e-5 && abs[1] < 1e-5, format!("PV-regime residuals at s = 400, t = 0.5, 1: {} < 1e-5", sci(&abs[..2]))),
        known(
            "6",
            abs[2] < 1e-5,
            format!("PV-regime residual at s = 400, t = 2: {:.3e} < 1e-5", abs[2]),
            "the remainder is the Fermi-edge term c(t)/s^2 with c(2) = 4.74, i.e. 2.96e-5 at s = 400",
        ),
        line("6", edge_error < 1e-2, format!("residuals vs first-order Fermi-edge correction: max rel err {edge_error:.1e} < 1e-2")),
    ]
}

fn criterion_7(pii: &PainleveIITable) -> Vec<Line> {
    let vs_airy = max_of(TW_POINTS.iter().map(|&y| {
        match (pii.tw_log_cdf(y), tw_log_cdf_via_airy(y, 120)) {
            (Ok(a), Ok(b)) => (a - b).abs(),
            _ => f64::INFINITY,
        }
    }));
    let routes = max_of(TW_POINTS.iter().map(|&y| pii.tw_log_cdf_routes(y).map_or(f64::INFINITY, |(a, b)| (a - b).abs())));
    let right = (pii.u_at(6.0).unwrap() / airy_ai(6.0).unwrap().0 - 1.0).abs();
    let left = (pii.u_at(-8.0).unwrap() / 2.0 - 1.0).abs();
    vec![line(
        "7",
        vs_airy < 1e-6 && routes < 1e-8 && right < 1e-6 && left < 2e-2,
        format!(
            "log F_TW vs Airy determinant {vs_airy:.1e} < 1e-6; two routes {routes:.1e} < 1e-8; |u(6)/Ai(6) - 1| {right:.1e} < 1e-6; |u(-8)/2 - 1| {left:.1e} < 2e-2"
        ),
    )]
}

fn criterion_8(pv: &SigmaPVTable) -> Vec<Line> {
    let vs_nystrom = max_of(SINE_POINTS.iter().map(|&t| {
        match (logdet_sine_via_pv(t, pv), nystrom_logdet(&KernelSpec::sine(t), 80)) {
            (Ok(a), Ok(b)) => (a - b.log_det).abs(),
            _ => f64::INFINITY,
        }
    }));
    let large_gap = (nystrom_logdet(&KernelSpec::sine(8.0), 80).unwrap().log_det - sine_large_gap_asy(8.0).unwrap()).abs();
    vec![line(
        "8",
        vs_nystrom < 1e-6 && large_gap < 5e-3,
        format!("sigma-PV vs Nystrom sine determinant at t = 1, 2, 4: {vs_nystrom:.1e} < 1e-6; large-gap constant at 8: {large_gap:.1e} < 5e-3"),
    )]
}

fn criterion_9() -> Vec<Line> {
    let mut out = Vec::new();
    for &(x, s) in &PDE_POINTS {
        let pair = Stencil::compute(x, s, 0.05).and_then(|c| Ok((c, Stencil::compute(x, s, 0.025)?)));
        let Ok((coarse, fine)) = pair else {
            out.push(line("9", false, format!("stencil at ({x}, {s}) failed")));
            continue;
        };
        let mut parts = Vec::new();
        let mut ok = true;
        for (name, c, f) in [
            ("b", coarse.residual_b(), fine.residual_b()),
            ("q", coarse.residual_q(), fine.residual_q()),
        ] {
            let (c, f) = (c.map_or(f64::INFINITY, |r| r.relative.abs()), f.map_or(f64::INFINITY, |r| r.relative.abs()));
            let ratio = c / f;
            ok &= c < 5e-2 && ratio > HALVING_RATIO.0 && ratio < HALVING_RATIO.1;
            parts.push(format!("{name}: {c:.1e} -> {f:.1e} (x{ratio:.2})"));
        }
        out.push(line("9", ok, format!("PDE residuals at ({x}, {s}), h = 0.05 -> 0.025: {}; < 5e-2 and ratio in (2.5, 6)", parts.join(", "))));
    }
    out
}

fn criterion_10() -> Vec<Line> {
    let w = phase_transition_witness().unwrap();
    // closed forms at l = 1: C- = C+ = -5/12, C'-(1) = C'+(1) = 1/6, C''-(1) = C''+(1) = 1/6
    let closed = [
        coeff_c(1.0, Side::Minus).unwrap() + 5.0 / 12.0,
        coeff_c(1.0, Side::Plus).unwrap() + 5.0 / 12.0,
    ];
    let ok = w.value_gap < 1e-8
        && w.first_gap < 1e-8
        && w.second_gap < 1e-8
        && (w.third_jump - 2.0).abs() < 1e-5
        && closed.iter().all(|d| d.abs() < 1e-15);
    vec![line(
        "10",
        ok,
        format!(
            "C at l = 1: value/1st/2nd gaps {:.1e}/{:.1e}/{:.1e} < 1e-8; third-derivative jump {:.8} = 2 +- 1e-5",
            w.value_gap, w.first_gap, w.second_gap, w.third_jump
        ),
    )]
}

fn criterion_11() -> Vec<Line> {
    let refinement = Mutex::new(Vec::new());
    let grid = GridSample::compute_with(axis(0.0, 6.0, 2.0).unwrap(), axis(-100.0, 100.0, 50.0).unwrap(), |x, s| {
        let r = gap_log_det_with(x, s, &TruthOptions::with_nodes(240))?;
        refinement.lock().unwrap().push(r.refinement_error);
        Ok(r.log_det)
    })
    .unwrap();
    let refinement = max_of(refinement.into_inner().unwrap());
    let defect = grid.monotonicity_defect();
    let max_log_d = grid.log_d.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    vec![line(
        "11",
        grid.errors.is_empty() && max_log_d <= 0.0 && defect <= 0.0 && refinement < 1e-9,
        format!(
            "x in 0..6, s in -100..100 ({} points, {} failures): max log D {max_log_d:.1e} <= 0; monotonicity defect {defect:.1e}; node-doubling change at m = 240 {refinement:.1e} < 1e-9",
            grid.len(),
            grid.errors.len()
        ),
    )]
}

fn main() {
    let start = Instant::now();
    let pii = hm_solve(-12.0, 8.0, 4000).expect("Hastings-McLeod table");
    let pv = pv_sigma_solve(12.0, 2000).expect("sigma-PV table");
    let criteria: Vec<Box<dyn Fn() -> Vec<Line>>> = vec![
        Box::new(criterion_1),
        Box::new(criterion_2),
        Box::new(criterion_3),
        Box::new(criterion_4),
        Box::new(|| criterion_5(&pii)),
        Box::new(|| criterion_6(&pv)),
        Box::new(|| criterion_7(&pii)),
        Box::new(|| criterion_8(&pv)),
        Box::new(criterion_9),
        Box::new(criterion_10),
        Box::new(criterion_11),
    ];
    let mut failures = 0;
    for criterion in &criteria {
        let t = Instant::now();
        for l in criterion() {
            let status = match l.status {
                Status::Pass => "PASS".to_string(),
                Status::Fail => {
                    failures += 1;
                    "FAIL".to_string()
                }
                Status::Known(reason) => format!("KNOWN-FAIL ({reason})"),
            };
            println!("criterion {:>2} {status}: {} [{:.1}s]", l.id, l.detail, t.elapsed().as_secs_f64());
        }
    }
    println!("acceptance: {failures} unexpected failure(s) in {:.0}s", start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
