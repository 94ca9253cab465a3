//! Airy function Ai and its derivative on |z| <= 30.
//!
//! Three evaluation zones:
//! * `-8.7 <= z <= 2`: Maclaurin series summed in double-double arithmetic, so
//!   the cancellation between the two series on the negative axis costs nothing;
//! * `z > 2`: the modified Bessel representation, with K_nu evaluated by the
//!   trapezoidal rule on its cosh integral (exponentially convergent);
//! * `z < -8.7`: the oscillatory asymptotic expansion, truncated at its
//!   smallest term.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const AIRY_LIMIT: f64 = 30.0;
const SERIES_LEFT: f64 = -8.7;
const SERIES_RIGHT: f64 = 2.0;

// Ai(0) and -Ai'(0) as unevaluated double-double sums.
const AI0: Dd = Dd { hi: 0.355_028_053_887_817_2, lo: 2.052_336_324_362_12e-17 };
const DAI0: Dd = Dd { hi: 0.258_819_403_792_806_8, lo: -2.522_243_111_610_832e-17 };

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn from(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    fn add(self, o: Dd) -> Dd {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        quick_two_sum(s, err + self.lo + o.lo)
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = (self.hi - p - e + self.lo) / d;
        quick_two_sum(q1, r)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn series(z: f64) -> (f64, f64) {
    let zd = Dd::from(z);
    let z2 = zd.mul(zd);
    let z3 = z2.mul(zd);
    let mut f_term = Dd::from(1.0);
    let mut g_term = zd;
    let mut f = f_term;
    let mut g = g_term;
    let mut df = Dd::from(0.0);
    let mut dg = Dd::from(1.0);
    for k in 1..200 {
        let kf = k as f64;
        df = df.add(f_term.mul(z2).div_f64(3.0 * kf - 1.0));
        dg = dg.add(g_term.mul(z2).div_f64(3.0 * kf));
        f_term = f_term.mul(z3).div_f64((3.0 * kf - 1.0) * (3.0 * kf));
        g_term = g_term.mul(z3).div_f64((3.0 * kf) * (3.0 * kf + 1.0));
        f = f.add(f_term);
        g = g.add(g_term);
        if f_term.hi.abs() < 1e-34 && g_term.hi.abs() < 1e-34 {
            break;
        }
    }
    let ai = AI0.mul(f).add(DAI0.mul(g).neg());
    let dai = AI0.mul(df).add(DAI0.mul(dg).neg());
    (ai.to_f64(), dai.to_f64())
}

/// e^zeta K_nu(zeta) for nu in {1/3, 2/3} by the trapezoidal rule.
fn scaled_bessel_k(nu: f64, zeta: f64) -> f64 {
    // the integrand narrows like exp(-zeta t^2 / 2)
    let h = (0.6 / zeta.sqrt()).min(0.2);
    let mut sum = 0.5;
    for k in 1..2000 {
        let t = k as f64 * h;
        let term = (-zeta * (t.cosh() - 1.0)).exp() * (nu * t).cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
    }
    h * sum
}

fn bessel_zone(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let decay = (-zeta).exp();
    let k13 = scaled_bessel_k(1.0 / 3.0, zeta) * decay;
    let k23 = scaled_bessel_k(2.0 / 3.0, zeta) * decay;
    let ai = (z / 3.0).sqrt() * k13 / PI;
    let dai = -z / (PI * 3f64.sqrt()) * k23;
    (ai, dai)
}

fn oscillatory_zone(z: f64) -> (f64, f64) {
    let x = -z;
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    // u_k and v_k coefficients interleaved into the four even/odd sums
    let (mut p, mut q, mut r, mut s) = (1.0, 0.0, 1.0, 0.0);
    let mut u = 1.0;
    let mut zpow = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        zpow /= zeta;
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        let term = u * zpow;
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        // (-1)^j for the j-th term of the even (k = 2j) or odd (k = 2j + 1) sum
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
            r += sign * v * zpow;
        } else {
            q += sign * term;
            s += sign * v * zpow;
        }
        if last < 1e-18 {
            break;
        }
    }
    let (sin_t, cos_t) = (zeta - 0.25 * PI).sin_cos();
    let root = PI.sqrt();
    let quarter = x.powf(0.25);
    let ai = (cos_t * p + sin_t * q) / (root * quarter);
    let dai = quarter / root * (sin_t * r - cos_t * s);
    (ai, dai)
}

/// Ai(z) and Ai'(z) for |z| <= 30.
pub fn airy_ai(z: f64) -> Result<(f64, f64)> {
    if !(z.abs() <= AIRY_LIMIT) {
        return Err(Error::OutOfRange { what: "Airy argument", value: z, lo: -AIRY_LIMIT, hi: AIRY_LIMIT });
    }
    Ok(if z > SERIES_RIGHT {
        bessel_zone(z)
    } else if z >= SERIES_LEFT {
        series(z)
    } else {
        oscillatory_zone(z)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::adaptive_integrate;

    // reference values to 20 digits
    const TABLE: &[(f64, f64, f64)] = &[
        (-29.5, 0.171_614_532_396_066_35, -0.925_931_534_379_072_8),
        (-20.0, -0.176_406_127_077_984_7, 0.892_862_856_736_471_2),
        (-12.0, -0.066_555_175_054_373_13, 1.023_110_453_367_970_7),
        (-9.0, -0.022_133_721_547_341_404, -0.975_663_980_926_331_6),
        (-8.7, -0.269_204_540_700_509_7, -0.562_976_849_501_853),
        (-8.69, -0.274_716_442_757_917_6, -0.539_328_217_112_491),
        (-6.0, -0.329_145_173_629_823_1, 0.345_935_487_281_342_9),
        (-3.3, -0.417_180_937_374_550_14, -0.070_963_617_177_835_88),
        (-1.0, 0.535_560_883_292_352_1, -0.010_160_567_116_645_21),
        (0.5, 0.231_693_606_480_833_5, -0.224_910_532_664_683_9),
        (1.9, 0.040_594_420_031_529_5, -0.060_436_781_785_756_55),
        (2.0, 0.034_924_130_423_274_38, -0.053_090_384_433_653_63),
        (2.01, 0.034_396_707_129_894_23, -0.052_395_459_043_403_01),
        (3.0, 0.006_591_139_357_460_719, -0.011_912_976_705_951_318),
        (5.0, 1.083_444_281_360_744_2e-4, -2.474_138_908_684_625e-4),
        (8.0, 4.692_207_616_099_231_6e-8, -1.341_439_297_906_786_6e-7),
        (13.2, 1.923_378_383_265_197_3e-15, -7.023_947_757_071_749e-15),
        (20.0, 1.691_672_868_670_540_3e-27, -7.586_391_625_748_355e-27),
        (29.9, 5.550_083_400_355_549e-49, -3.039_458_094_430_743e-48),
    ];

    #[test]
    fn matches_reference_table() {
        for &(z, a, da) in TABLE {
            let (ai, dai) = airy_ai(z).unwrap();
            assert!((ai - a).abs() < 1e-13, "Ai({z}) = {ai}, expected {a}");
            assert!((dai - da).abs() < 1e-13, "Ai'({z}) = {dai}, expected {da}");
            if z > 0.0 {
                assert!(((ai - a) / a).abs() < 1e-12);
                assert!(((dai - da) / da).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn values_at_origin_from_gamma_integrals() {
        // Gamma(p) = integral of 3 u^{3p - 1} e^{-u^3}, smooth after the substitution t = u^3
        let gamma = |p: f64| {
            adaptive_integrate(|u| 3.0 * u.powf(3.0 * p - 1.0) * (-u * u * u).exp(), 0.0, 5.0, 1e-15).unwrap()
        };
        let ai0 = 3f64.powf(-2.0 / 3.0) / gamma(2.0 / 3.0);
        let dai0 = -(3f64.powf(-1.0 / 3.0)) / gamma(1.0 / 3.0);
        let (a, d) = airy_ai(0.0).unwrap();
        assert!((a - ai0).abs() < 1e-13 && (a - 0.355_028_053_887_817_2).abs() < 1e-15);
        assert!((d - dai0).abs() < 1e-13 && (d + 0.258_819_403_792_806_8).abs() < 1e-15);
    }

    #[test]
    fn satisfies_airy_equation() {
        for z in [-15.0, -8.7, -3.0, 1.0, 2.0, 4.0, 12.0] {
            let h = 1e-3;
            let f = |t: f64| airy_ai(t).unwrap().0;
            let second = (f(z + h) - 2.0 * f(z) + f(z - h)) / (h * h);
            assert!((second - z * f(z)).abs() < 1e-6 * (1.0 + z * z), "z={z}");
            let d = airy_ai(z).unwrap().1;
            let fd = (f(z + h) - f(z - h)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-6 * (1.0 + z.abs()));
        }
    }

    #[test]
    fn wronskian_like_continuity_across_zones() {
        for edge in [SERIES_LEFT, SERIES_RIGHT] {
            let a = airy_ai(edge - 1e-9).unwrap();
            let b = airy_ai(edge + 1e-9).unwrap();
            assert!((a.0 - b.0).abs() < 1e-8);
            assert!((a.1 - b.1).abs() < 1e-8 * (1.0 + edge.abs()));
        }
    }

    #[test]
    fn rejects_outside_range() {
        assert!(airy_ai(30.5).is_err());
        assert!(airy_ai(-31.0).is_err());
        assert!(airy_ai(f64::NAN).is_err());
    }
}
