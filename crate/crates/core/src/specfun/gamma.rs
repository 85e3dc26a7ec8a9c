use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::{Error, Result};

/// Vertical line along which arg Γ is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaLine {
    /// z = i·y
    Imaginary,
    /// z = ½ + i·y
    Half,
}

// B_{2m} / (2m(2m−1)) for m = 1..5
const STIRLING: [f64; 5] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
];

/// Continuous argument of Γ along the chosen line, i.e. Im ln Γ(z).
pub fn arg_gamma(line: GammaLine, y: f64) -> Result<f64> {
    let x0 = match line {
        GammaLine::Imaginary => {
            if y == 0.0 {
                return Err(Error::Pole { what: "Gamma at the origin".into(), distance: 0.0 });
            }
            0.0
        }
        GammaLine::Half => 0.5,
    };
    let shift = (12.0 - y.abs()).ceil().max(0.0) as usize;
    let w = Complex64::new(x0 + shift as f64, y);
    let mut lg = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln();
    let w2 = w * w;
    let mut wp = w;
    for c in STIRLING {
        lg += c / wp;
        wp *= w2;
    }
    let back: f64 = (0..shift).map(|j| y.atan2(x0 + j as f64)).sum();
    Ok(lg.im - back)
}

/// ζ′(−1) by Euler–Maclaurin summation differentiated in s.
pub fn zeta_prime_minus_one() -> f64 {
    static CACHE: OnceLock<f64> = OnceLock::new();
    *CACHE.get_or_init(|| {
        const N: f64 = 10.0;
        // B_{2k} for k = 2..8
        const B: [f64; 7] = [
            -1.0 / 30.0,
            1.0 / 42.0,
            -1.0 / 30.0,
            5.0 / 66.0,
            -691.0 / 2730.0,
            7.0 / 6.0,
            -3617.0 / 510.0,
        ];
        let ln_n = N.ln();
        let mut sum: f64 = (2..10).map(|n| -(n as f64) * (n as f64).ln()).sum();
        sum += 0.5 * N * N * ln_n - 0.25 * N * N - 0.5 * N * ln_n;
        sum += (1.0 + ln_n) / 12.0;
        for (i, b) in B.iter().enumerate() {
            let k = (i + 2) as f64;
            sum -= b / ((2.0 * k) * (2.0 * k - 1.0) * (2.0 * k - 2.0)) * N.powf(2.0 - 2.0 * k);
        }
        sum
    })
}

/// c₀ = exp(ln 2 / 24 + ζ′(−1)).
pub fn tw_constant() -> f64 {
    (2f64.ln() / 24.0 + zeta_prime_minus_one()).exp()
}
