//! Gauss–Legendre rules and adaptive Gauss–Kronrod integration.

use crate::{Error, Result};

/// Gauss–Legendre nodes (ascending) and weights on (−1, 1).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * z * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [0.0; 15];
    fv[7] = f(c);
    for j in 0..7 {
        let dx = h * XGK[j];
        fv[j] = f(c - dx);
        fv[14 - j] = f(c + dx);
    }
    let mut kron = fv[7] * WGK[7];
    let mut gauss = fv[7] * WG[3];
    let mut resabs = WGK[7] * fv[7].abs();
    for j in 0..7 {
        let s = fv[j] + fv[14 - j];
        kron += WGK[j] * s;
        resabs += WGK[j] * (fv[j].abs() + fv[14 - j].abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    let mean = 0.5 * kron;
    let mut resasc = WGK[7] * (fv[7] - mean).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }
    // error scaling as in QUADPACK's qk15
    let mut err = ((kron - gauss) * h).abs();
    let resasc = resasc * h.abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * resabs * h.abs();
    (kron * h, err.max(floor))
}

/// Globally adaptive 15-point Gauss–Kronrod quadrature on a finite interval.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    let mut parts = vec![(a, b, gk15(&f, a, b))];
    for _ in 0..4000 {
        let total: f64 = parts.iter().map(|p| p.2 .0).sum();
        let err: f64 = parts.iter().map(|p| p.2 .1).sum();
        if err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok(total);
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2 .1.total_cmp(&y.1 .2 .1))
            .unwrap();
        let (lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        parts.push((lo, mid, gk15(&f, lo, mid)));
        parts.push((mid, hi, gk15(&f, mid, hi)));
    }
    Err(Error::NonConvergence("adaptive quadrature exhausted its subdivisions".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_point_rule_nodes() {
        let (x, w) = gauss_legendre(4);
        assert!((x[3] - 0.861_136_311_594_052_6).abs() < 1e-15);
        assert!((x[2] - 0.339_981_043_584_856_3).abs() < 1e-15);
        assert!((x[0] + x[3]).abs() < 1e-15);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rule_is_exact_for_polynomials() {
        for n in [5usize, 17, 64, 200, 400] {
            let (x, w) = gauss_legendre(n);
            let deg = 2 * n - 1;
            let q: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32 - 1)).sum();
            let exact = 2.0 / deg as f64;
            assert!((q - exact).abs() < 1e-13, "n={n}: {q} vs {exact}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn adaptive_handles_endpoint_singularity() {
        let v = integrate(|t: f64| (1.0 - t * t).sqrt(), -1.0, 1.0, 1e-13, 1e-13).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
    }
}
