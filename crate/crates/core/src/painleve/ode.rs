//! Dormand–Prince 5(4) integration with step-size control and the
//! fourth-order continuous extension.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, atol: 1e-14, initial_step: 1e-4, max_steps: 1_000_000 }
    }
}

#[derive(Debug, Clone)]
struct Step {
    t: f64,
    h: f64,
    /// Five coefficient vectors of the continuous extension.
    cont: [Vec<f64>; 5],
}

/// Accepted steps of an integration, evaluable anywhere in [t0, t_end].
#[derive(Debug, Clone)]
pub struct OdeSolution {
    steps: Vec<Step>,
    t0: f64,
    t_end: f64,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Integrates y′ = f(t, y) from `t0` to `t_end`.
///
/// `f` writes the derivative into its third argument and may fail, which
/// aborts the integration with that error.
pub fn dormand_prince<F>(mut f: F, t0: f64, y0: &[f64], t_end: f64, opts: &OdeOptions) -> Result<OdeSolution>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(t_end > t0) {
        return Err(Error::invalid(format!("integration needs t_end > t0, got ({t0}, {t_end})")));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut t = t0;
    let mut h = opts.initial_step.min(t_end - t0);
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    f(t, &y, &mut k[0])?;
    let mut steps = Vec::new();
    let mut count = 0;
    while t < t_end {
        count += 1;
        if count > opts.max_steps {
            return Err(Error::Accuracy { doublings: count, last: t, previous: h });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let stage = |coef: &[(usize, f64)], k: &[Vec<f64>], out: &mut [f64], y: &[f64]| {
            for i in 0..n {
                out[i] = y[i] + h * coef.iter().map(|&(j, a)| a * k[j][i]).sum::<f64>();
            }
        };
        stage(&[(0, A21)], &k, &mut tmp, &y);
        f(t + C2 * h, &tmp, &mut k[1])?;
        stage(&[(0, A31), (1, A32)], &k, &mut tmp, &y);
        f(t + C3 * h, &tmp, &mut k[2])?;
        stage(&[(0, A41), (1, A42), (2, A43)], &k, &mut tmp, &y);
        f(t + C4 * h, &tmp, &mut k[3])?;
        stage(&[(0, A51), (1, A52), (2, A53), (3, A54)], &k, &mut tmp, &y);
        f(t + C5 * h, &tmp, &mut k[4])?;
        stage(&[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], &k, &mut tmp, &y);
        f(t + h, &tmp, &mut k[5])?;
        let mut y_new = vec![0.0; n];
        stage(&[(0, A71), (2, A73), (3, A74), (4, A75), (5, A76)], &k, &mut y_new, &y);
        f(t + h, &y_new, &mut k[6])?;

        let mut err = 0.0;
        for i in 0..n {
            let e = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() {
            return Err(Error::Accuracy { doublings: count, last: t, previous: h });
        }
        if err <= 1.0 {
            let mut cont: [Vec<f64>; 5] = Default::default();
            for c in cont.iter_mut() {
                c.resize(n, 0.0);
            }
            for i in 0..n {
                let dy = y_new[i] - y[i];
                let bspl = h * k[0][i] - dy;
                cont[0][i] = y[i];
                cont[1][i] = dy;
                cont[2][i] = bspl;
                cont[3][i] = dy - h * k[6][i] - bspl;
                cont[4][i] = h
                    * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
            }
            steps.push(Step { t, h, cont });
            t = if last { t_end } else { t + h };
            y = y_new;
            k.swap(0, 6);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::Accuracy { doublings: count, last: t, previous: h });
        }
    }
    Ok(OdeSolution { steps, t0, t_end })
}

impl OdeSolution {
    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn accepted_steps(&self) -> usize {
        self.steps.len()
    }

    /// Dense output at `t` within the integration range.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        if !(t >= self.t0 && t <= self.t_end) {
            return Err(Error::OutOfRange { what: "t", value: t, lo: self.t0, hi: self.t_end });
        }
        let idx = self.steps.partition_point(|s| s.t + s.h < t).min(self.steps.len() - 1);
        let s = &self.steps[idx];
        let theta = (t - s.t) / s.h;
        let theta1 = 1.0 - theta;
        let c = &s.cont;
        Ok((0..c[0].len())
            .map(|i| c[0][i] + theta * (c[1][i] + theta1 * (c[2][i] + theta * (c[3][i] + theta1 * c[4][i]))))
            .collect())
    }
}
