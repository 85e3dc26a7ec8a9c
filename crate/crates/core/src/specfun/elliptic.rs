use std::f64::consts::FRAC_PI_2;

use crate::{Error, Result};

/// Complete integrals (K, E) at modulus `k` with complementary modulus `kp`,
/// together with the AGM tail T = Σ_{n≥1} 2^{n−1} c_n², so that E = K(1 − k²/2 − T).
pub(crate) fn agm_complete(k: f64, kp: f64) -> (f64, f64, f64) {
    let (mut a, mut b) = (1.0_f64, kp);
    let mut s = 0.0;
    let mut pow = 0.5;
    for _ in 0..64 {
        let c = 0.5 * (a - b);
        let a1 = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a1;
        pow *= 2.0;
        s += pow * c * c;
        // the next correction is O(c²), already below rounding
        if c.abs() <= 1e-9 * a {
            break;
        }
    }
    let big_k = FRAC_PI_2 / a;
    (big_k, big_k * (1.0 - 0.5 * k * k - s), s)
}

/// Arithmetic–geometric mean of two positive numbers.
pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let a1 = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = a1;
    }
    0.5 * (a + b)
}

pub(crate) fn complement(k: f64) -> f64 {
    ((1.0 - k) * (1.0 + k)).sqrt()
}

/// Complete elliptic integral of the first kind K(k).
pub fn ellip_k(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("K(k) needs 0 <= k < 1, got {k}")));
    }
    if k >= 1.0 - 1e-15 {
        return Err(Error::Overflow(format!("K(k) diverges as k -> 1 (k = {k})")));
    }
    Ok(agm_complete(k, complement(k)).0)
}

/// Complete elliptic integral of the second kind E(k).
pub fn ellip_e(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain(format!("E(k) needs 0 <= k <= 1, got {k}")));
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    Ok(agm_complete(k, complement(k)).1)
}

/// K, K′, E, E′ at one modulus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticQuad {
    pub k: f64,
    pub kprime: f64,
    pub big_k: f64,
    pub big_kprime: f64,
    pub big_e: f64,
    pub big_eprime: f64,
    /// K′ − E′, evaluated without cancellation.
    pub(crate) kp_minus_ep: f64,
    /// Σ_{n≥1} 2^{n−1} c_n² of the AGM run for K′, so that E′ = K′(1 − k′²/2 − tail).
    pub(crate) comp_tail: f64,
    /// The same tail for the run producing K.
    pub(crate) own_tail: f64,
}

impl EllipticQuad {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::Domain(format!("modulus must lie in (0,1), got {k}")));
        }
        let kp = complement(k);
        let (big_k, big_e, own_tail) = agm_complete(k, kp);
        let (big_kp, big_ep, tail) = agm_complete(kp, k);
        Ok(Self {
            k,
            kprime: kp,
            big_k,
            big_kprime: big_kp,
            big_e,
            big_eprime: big_ep,
            kp_minus_ep: big_kp * (0.5 * kp * kp + tail),
            comp_tail: tail,
            own_tail,
        })
    }

    /// E K′ + E′ K − K K′, which equals π/2.
    pub fn legendre_residual(&self) -> f64 {
        self.big_e * self.big_kprime + self.big_eprime * self.big_k
            - self.big_k * self.big_kprime
            - FRAC_PI_2
    }
}

/// Leading terms of the logarithmic expansions of K and E as k → 1.
///
/// Returns (K, E) truncated after the (k′)⁴ terms; intended as a cross-check of the AGM
/// values near the singular endpoint.
pub fn ellip_expansion_near_one(k: f64) -> (f64, f64) {
    let kp2 = (1.0 - k) * (1.0 + k);
    let l = (4.0 / kp2.sqrt()).ln();
    let big_k = l + 0.25 * kp2 * (l - 1.0) + 9.0 / 64.0 * kp2 * kp2 * (l - 7.0 / 6.0);
    let big_e = 1.0 + 0.5 * kp2 * (l - 0.5) + 3.0 / 16.0 * kp2 * kp2 * (l - 13.0 / 12.0);
    (big_k, big_e)
}
