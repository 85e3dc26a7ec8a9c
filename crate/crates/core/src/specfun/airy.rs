//! Airy function Ai and its derivative on the real line.
//!
//! Regions: Maclaurin series on [−3, 1.5]; the Macdonald-function integral
//! Ai(x) = √(x/3)/π · K_{1/3}(ζ) by the trapezoid rule for x > 1.5; Taylor
//! continuation of Ai″ = x·Ai from tabulated anchors on [−9, −3); and the
//! oscillatory asymptotic series below −9.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::{Error, Result};

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = -0.258_819_403_792_806_8;

pub const AIRY_MIN_X: f64 = -40.0;
pub const AIRY_MAX_X: f64 = 100.0;

const MACLAURIN_LO: f64 = -3.0;
const MACLAURIN_HI: f64 = 1.5;
const ASYMPTOTIC_BELOW: f64 = -9.0;
const ANCHOR_STEP: f64 = 0.5;

/// Ai(x).
pub fn airy_ai(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.0)
}

/// Ai′(x).
pub fn airy_ai_prime(x: f64) -> Result<f64> {
    airy_pair(x).map(|p| p.1)
}

/// (Ai(x), Ai′(x)).
pub fn airy_pair(x: f64) -> Result<(f64, f64)> {
    if !(AIRY_MIN_X..=AIRY_MAX_X).contains(&x) {
        return Err(Error::Range(format!(
            "Airy evaluation supported on [{AIRY_MIN_X}, {AIRY_MAX_X}], got {x}"
        )));
    }
    Ok(if x > MACLAURIN_HI {
        macdonald(x)
    } else if x >= MACLAURIN_LO {
        maclaurin(x)
    } else if x >= ASYMPTOTIC_BELOW {
        from_anchor(x)
    } else {
        oscillatory(-x)
    })
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.c += (self.sum - t) + v;
        } else {
            self.c += (v - t) + self.sum;
        }
        self.sum = t;
    }
    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

pub(crate) fn maclaurin(x: f64) -> (f64, f64) {
    let x3 = x * x * x;
    let (mut f, mut g, mut fp, mut gp) = (
        Compensated::default(),
        Compensated::default(),
        Compensated::default(),
        Compensated::default(),
    );
    let (mut tf, mut tg, mut tfp, mut tgp) = (1.0, x, 0.5 * x * x, 1.0);
    f.add(tf);
    g.add(tg);
    fp.add(tfp);
    gp.add(tgp);
    for k in 1..120 {
        let kf = 3.0 * k as f64;
        tf *= x3 / ((kf - 1.0) * kf);
        tg *= x3 / (kf * (kf + 1.0));
        tfp *= x3 / (kf * (kf + 2.0));
        tgp *= x3 / ((kf - 2.0) * kf);
        f.add(tf);
        g.add(tg);
        fp.add(tfp);
        gp.add(tgp);
        let biggest = tf.abs().max(tg.abs()).max(tfp.abs()).max(tgp.abs());
        if biggest < 1e-18 {
            break;
        }
    }
    (
        AI0 * f.value() + AIP0 * g.value(),
        AI0 * fp.value() + AIP0 * gp.value(),
    )
}

/// e^{ζ}K_ν(ζ) = ∫₀^∞ e^{−2ζ sinh²(s/2)} cosh(νs) ds by the trapezoid rule.
fn scaled_bessel_k(nu: f64, zeta: f64) -> f64 {
    // the integrand narrows like ζ^{−1/2}
    let h = (0.5 / zeta.sqrt()).min(0.1);
    let mut sum = 0.5;
    let mut j = 1;
    loop {
        let s = j as f64 * h;
        let sh = (0.5 * s).sinh();
        let expo = -2.0 * zeta * sh * sh;
        let term = expo.exp() * (nu * s).cosh();
        sum += term;
        if expo + nu * s < -45.0 {
            break;
        }
        j += 1;
    }
    sum * h
}

fn macdonald(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x * x.sqrt();
    let damp = (-zeta).exp();
    let c = 1.0 / (PI * 3.0_f64.sqrt());
    let ai = c * x.sqrt() * scaled_bessel_k(1.0 / 3.0, zeta) * damp;
    let aip = -c * x * scaled_bessel_k(2.0 / 3.0, zeta) * damp;
    (ai, aip)
}

/// Advances (y, y′) of y″ = x·y from x0 by h with a Taylor series.
pub(crate) fn taylor_step(x0: f64, y: f64, yp: f64, h: f64) -> (f64, f64) {
    let mut a = vec![y, yp, 0.5 * x0 * y];
    let scale = y.abs() + yp.abs();
    let (mut val, mut der) = (0.0, 0.0);
    let mut hp = 1.0;
    for n in 0..200 {
        if n >= 3 {
            // (n)(n−1) a_n = x0 a_{n−2} + a_{n−3}
            a.push((x0 * a[n - 2] + a[n - 3]) / (n as f64 * (n - 1) as f64));
        }
        if n >= 1 {
            der += n as f64 * a[n] * hp;
            hp *= h;
        }
        val += a[n] * hp;
        if n > 8 && (a[n] * hp).abs() < 1e-19 * scale && (a[n - 1] * hp / h).abs() < 1e-19 * scale {
            break;
        }
    }
    (val, der)
}

fn anchors() -> &'static [(f64, f64, f64)] {
    static TABLE: OnceLock<Vec<(f64, f64, f64)>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let (mut y, mut yp) = maclaurin(MACLAURIN_LO);
        let mut x = MACLAURIN_LO;
        let mut out = vec![(x, y, yp)];
        while x > ASYMPTOTIC_BELOW - ANCHOR_STEP {
            // two half steps keep the series short
            for _ in 0..2 {
                let (ny, nyp) = taylor_step(x, y, yp, -0.5 * ANCHOR_STEP);
                y = ny;
                yp = nyp;
                x -= 0.5 * ANCHOR_STEP;
            }
            out.push((x, y, yp));
        }
        out
    })
}

fn from_anchor(x: f64) -> (f64, f64) {
    let table = anchors();
    let idx = (((MACLAURIN_LO - x) / ANCHOR_STEP).round() as usize).min(table.len() - 1);
    let (x0, y, yp) = table[idx];
    taylor_step(x0, y, yp, x - x0)
}

/// Asymptotic series for Ai(−z), Ai′(−z) with z > 0 large.
fn oscillatory(z: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * z * z.sqrt();
    let (mut pu, mut qu, mut pv, mut qv) = (1.0, 0.0, 1.0, 0.0);
    let mut u = 1.0;
    let mut zp = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / (216.0 * kf * (2.0 * kf - 1.0));
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zp /= zeta;
        let tu = u * zp;
        if tu.abs() > last {
            break;
        }
        last = tu.abs();
        let tv = v * zp;
        // k odd contributes to the sine-type sums, signs alternate every two orders
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            pu += sign * tu;
            pv += sign * tv;
        } else {
            qu += sign * tu;
            qv += sign * tv;
        }
        if last < 1e-17 {
            break;
        }
    }
    let phase = zeta - PI / 4.0;
    let (s, c) = phase.sin_cos();
    let z4 = z.powf(0.25);
    let pref = 1.0 / PI.sqrt();
    let ai = pref / z4 * (c * pu + s * qu);
    let aip = pref * z4 * (s * pv - c * qv);
    (ai, aip)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 40-digit evaluation.
    const REF: [(f64, f64, f64); 11] = [
        (0.0, 0.355_028_053_887_817_24, -0.258_819_403_792_806_8),
        (1.0, 0.135_292_416_312_881_42, -0.159_147_441_296_793_2),
        (2.0, 0.034_924_130_423_274_38, -0.053_090_384_433_653_63),
        (5.5, 3.368_531_190_859_981_4e-5, -8.046_339_130_556_514e-5),
        (10.0, 1.104_753_255_289_868_6e-10, -3.520_633_676_738_923_6e-10),
        (40.0, 6.365_742_658_552_915e-75, -4.030_017_977_600_678e-74),
        (-3.0, -0.378_814_293_677_658_1, 0.314_583_769_216_598_6),
        (-5.5, 0.017_781_541_276_574_976, 0.864_197_217_771_398_4),
        (-9.0, -0.022_133_721_547_341_404, -0.975_663_980_926_331_6),
        (-12.0, -0.066_555_175_054_373_13, 1.023_110_453_367_970_7),
        (-40.0, -0.045_933_923_437_957_25, -1.389_090_875_260_718_4),
    ];

    #[test]
    fn reference_values() {
        for (x, ai, aip) in REF {
            let (a, ap) = airy_pair(x).unwrap();
            let tol = |r: f64| 1e-12 * r.abs().max(if x < 0.0 { 1.0 } else { 0.0 });
            assert!((a - ai).abs() <= tol(ai), "Ai({x}) = {a} vs {ai}");
            assert!((ap - aip).abs() <= tol(aip), "Ai'({x}) = {ap} vs {aip}");
        }
    }

    #[test]
    fn value_at_origin_matches_gamma_form() {
        // 3^{−2/3}/Γ(2/3) with Γ(2/3) = 1.3541179394264004169…
        let exact = 3f64.powf(-2.0 / 3.0) / 1.354_117_939_426_400_4;
        assert!((airy_ai(0.0).unwrap() - exact).abs() < 1e-15);
    }

    #[test]
    fn switch_points_overlap() {
        for (x, left, right) in [
            (MACLAURIN_HI, maclaurin(MACLAURIN_HI), macdonald(MACLAURIN_HI)),
            (ASYMPTOTIC_BELOW, from_anchor(ASYMPTOTIC_BELOW), oscillatory(-ASYMPTOTIC_BELOW)),
            (-3.2, maclaurin(-3.2), from_anchor(-3.2)),
        ] {
            assert!((left.0 - right.0).abs() < 1e-11, "Ai at {x}");
            assert!((left.1 - right.1).abs() < 1e-11, "Ai' at {x}");
        }
    }

    #[test]
    fn ode_residual_by_finite_differences() {
        // eighth-order central stencil for the second derivative
        const C: [f64; 5] = [-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0];
        let h = 0.03;
        let f = |t: f64| airy_ai(t).unwrap();
        let mut x = -15.0;
        while x <= 15.0 {
            let mut second = C[0] * f(x);
            for (j, c) in C.iter().enumerate().skip(1) {
                let d = j as f64 * h;
                second += c * (f(x + d) + f(x - d));
            }
            second /= h * h;
            let res = (second - x * f(x)).abs();
            assert!(res < 1e-10, "x={x}: {res}");
            x += 0.37;
        }
    }

    #[test]
    fn derivative_consistent_with_values() {
        let h = 1e-4;
        for x in [-20.0, -7.3, -1.1, 0.6, 3.3] {
            let d = (airy_ai(x + h).unwrap() - airy_ai(x - h).unwrap()) / (2.0 * h);
            assert!((d - airy_ai_prime(x).unwrap()).abs() < 1e-7 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn positive_axis_ratio_has_five_48ths_correction() {
        for x in [20.0, 40.0, 80.0] {
            let zeta = 2.0 / 3.0 * x * f64::sqrt(x);
            let lead = x.powf(-0.25) / (2.0 * PI.sqrt()) * (-zeta).exp();
            let ratio = airy_ai(x).unwrap() / lead;
            let c = (ratio - 1.0) * x.powf(1.5);
            // next order is O(x^{-3/2}) relative to this coefficient
            assert!((c + 5.0 / 48.0).abs() < 0.5 * x.powf(-1.5), "x={x}: {c}");
        }
    }

    #[test]
    fn out_of_range_is_an_error() {
        assert!(matches!(airy_ai(-40.5), Err(Error::Range(_))));
        assert!(matches!(airy_ai(f64::NAN), Err(Error::Range(_))));
    }
}
