use std::f64::consts::PI;

use super::elliptic::{agm_complete, complement};
use crate::{Error, Result};

/// A real nome q = e^{−π·tau_im}, i.e. τ = i·tau_im on the imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaNome {
    pub q: f64,
    pub tau_im: f64,
}

impl ThetaNome {
    pub fn from_tau_im(tau_im: f64) -> Result<Self> {
        if !(tau_im > 0.0) || !tau_im.is_finite() {
            return Err(Error::Domain(format!("tau_im must be positive, got {tau_im}")));
        }
        Ok(Self { q: (-PI * tau_im).exp(), tau_im })
    }

    pub fn from_q(q: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::Domain(format!("nome must lie in (0,1), got {q}")));
        }
        Ok(Self { q, tau_im: -q.ln() / PI })
    }
}

/// Nome of modulus k: q = exp(−πK′/K).
pub fn nome_from_modulus(k: f64) -> Result<ThetaNome> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("modulus must lie in (0,1), got {k}")));
    }
    let kp = complement(k);
    let big_k = agm_complete(k, kp).0;
    let big_kp = agm_complete(kp, k).0;
    ThetaNome::from_tau_im(big_kp / big_k)
}

const CAP: usize = 64;

/// Raw q-series for θ₂, θ₃, θ₄ with the convention θ₃(z) = 1 + 2Σ q^{n²} cos 2πnz.
pub fn theta_series(j: u8, z: f64, q: f64) -> f64 {
    match j {
        2 => {
            let mut sum = 0.0;
            let mut scale = 0.0;
            for n in 0..CAP {
                let e = (n as f64 + 0.5).powi(2);
                let term = q.powf(e);
                sum += 2.0 * term * ((2 * n + 1) as f64 * PI * z).cos();
                scale += 2.0 * term;
                if q.powf((n as f64 + 1.5).powi(2)) < 1e-17 * scale {
                    break;
                }
            }
            sum
        }
        3 | 4 => {
            let sign = if j == 4 { -1.0 } else { 1.0 };
            let mut sum = 1.0;
            let mut scale = 1.0;
            let mut s = 1.0;
            for n in 1..CAP {
                s *= sign;
                let term = q.powi((n * n) as i32);
                if term < 1e-17 * scale {
                    break;
                }
                sum += 2.0 * s * term * (2.0 * PI * n as f64 * z).cos();
                scale += 2.0 * term;
            }
            sum
        }
        _ => f64::NAN,
    }
}

/// Poisson-resummed form, accurate for small tau_im:
/// θ₃(z|ia) = a^{−1/2} Σ_m e^{−π(z−m)²/a}, θ₂ with an extra (−1)^m.
fn theta_poisson(alternating: bool, z: f64, a: f64) -> f64 {
    let mut sum = (-PI * z * z / a).exp();
    let mut scale = sum;
    for m in 1..CAP {
        let mf = m as f64;
        let s = if alternating && m % 2 == 1 { -1.0 } else { 1.0 };
        let lo = (-PI * (z - mf).powi(2) / a).exp();
        let hi = (-PI * (z + mf).powi(2) / a).exp();
        sum += s * (lo + hi);
        scale += lo + hi;
        if (-PI * (mf + 0.5 - z.abs()).powi(2) / a).exp() < 1e-17 * scale {
            break;
        }
    }
    sum / a.sqrt()
}

/// Jacobi theta function θ_j(z | τ) for j ∈ {2, 3, 4} and purely imaginary τ.
pub fn theta(j: u8, z: f64, nome: ThetaNome) -> Result<f64> {
    if !matches!(j, 2..=4) {
        return Err(Error::Domain(format!("theta index must be 2, 3 or 4, got {j}")));
    }
    if nome.q == 0.0 {
        return Ok(if j == 2 { 0.0 } else { 1.0 });
    }
    let z = if j == 4 { z + 0.5 } else { z };
    // reduce to [−1/2, 1/2): θ₃ has period 1, θ₂ flips sign
    let n = z.round();
    let r = z - n;
    let flip = if j == 2 && (n as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let a = nome.tau_im;
    let value = if a >= 1.0 {
        theta_series(if j == 2 { 2 } else { 3 }, r, nome.q)
    } else {
        theta_poisson(j == 2, r, a)
    };
    Ok(flip * value)
}

/// cd in theta form at the normalised argument ζ = z/(2K).
pub fn cd_normalised(zeta: f64, nome: ThetaNome) -> Result<f64> {
    let ratio0 = theta(3, 0.0, nome)? / theta(2, 0.0, nome)?;
    Ok(ratio0 * theta(2, zeta, nome)? / theta(3, zeta, nome)?)
}

/// Jacobi elliptic function cd(z, λ) = cn/dn.
pub fn jacobi_cd(z: f64, lam: f64) -> Result<f64> {
    let (big_k, nome) = period_and_nome(lam)?;
    cd_normalised(z / (2.0 * big_k), nome)
}

/// dc(z, λ) = 1/cd(z, λ); fails near the poles z = (2n+1)K.
pub fn jacobi_dc(z: f64, lam: f64) -> Result<f64> {
    let (big_k, nome) = period_and_nome(lam)?;
    let cd = cd_normalised(z / (2.0 * big_k), nome)?;
    if cd.abs() < 1e-8 {
        let u = z / big_k;
        let nearest = 2.0 * ((u - 1.0) / 2.0).round() + 1.0;
        return Err(Error::Pole {
            what: "dc at an odd multiple of K".into(),
            distance: (u - nearest).abs() * big_k,
        });
    }
    Ok(1.0 / cd)
}

fn period_and_nome(lam: f64) -> Result<(f64, ThetaNome)> {
    if !(lam > 0.0 && lam < 1.0) {
        return Err(Error::Domain(format!("modulus must lie in (0,1), got {lam}")));
    }
    let lp = complement(lam);
    let big_k = agm_complete(lam, lp).0;
    let big_kp = agm_complete(lp, lam).0;
    Ok((big_k, ThetaNome::from_tau_im(big_kp / big_k)?))
}
