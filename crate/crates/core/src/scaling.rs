//! Double-scaling coordinates, the elliptic modulus equation and the regime diagram.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;

use crate::quad::integrate;
use crate::specfun::{EllipticQuad, ThetaNome};
use crate::{Error, Result};

/// Slope 2√2/3 of the separating line v = (2√2/3)t.
pub const SEPARATRIX_SLOPE: f64 = 2.0 * std::f64::consts::SQRT_2 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// |s₁| < 1
    Regular,
    /// 1 < |s₁| < √2
    Singular,
}

/// Double-scaling coordinates of a point (x, s₁).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalePoint {
    pub x: f64,
    pub t: f64,
    pub v: f64,
    pub kappa: f64,
    pub sigma: f64,
    /// sgn Im s₁
    pub eps: f64,
    pub branch: Branch,
}

impl ScalePoint {
    pub fn from_x_v(x: f64, v: f64, eps: f64, branch: Branch) -> Result<Self> {
        if !(x < 0.0) || !x.is_finite() {
            return Err(Error::Domain(format!("x must be negative, got {x}")));
        }
        Self::from_t_v((-x).powf(1.5), v, eps, branch).map(|p| Self { x, ..p })
    }

    pub fn from_t_v(t: f64, v: f64, eps: f64, branch: Branch) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("t must be positive, got {t}")));
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::Domain(format!("v must be positive, got {v}")));
        }
        if eps != 1.0 && eps != -1.0 {
            return Err(Error::Domain(format!("eps must be +1 or -1, got {eps}")));
        }
        let kappa = v / t;
        Ok(Self {
            x: -t.powf(2.0 / 3.0),
            t,
            v,
            kappa,
            sigma: SEPARATRIX_SLOPE - kappa,
            eps,
            branch,
        })
    }

    /// |s₁|² recovered from v and the branch.
    pub fn s1_abs_sq(&self) -> f64 {
        match self.branch {
            Branch::Regular => -(-self.v).exp_m1(),
            Branch::Singular => 1.0 + (-self.v).exp(),
        }
    }
}

/// Coordinates for x < 0 and γ = |s₁|².
pub fn scale_from_x_gamma(x: f64, gamma: f64, eps: f64) -> Result<ScalePoint> {
    if !(gamma > 0.0) || gamma >= 2.0 || gamma == 1.0 || !gamma.is_finite() {
        return Err(Error::Domain(format!(
            "gamma must lie in (0,1) or (1,2), got {gamma}"
        )));
    }
    let (v, branch) = if gamma < 1.0 {
        (-(-gamma).ln_1p(), Branch::Regular)
    } else {
        (-(gamma - 1.0).ln(), Branch::Singular)
    };
    ScalePoint::from_x_v(x, v, eps, branch)
}

/// Stokes multipliers (s₁, s₂, s₃).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesTriple {
    pub s1: Complex64,
    pub s2: Complex64,
    pub s3: Complex64,
}

impl StokesTriple {
    /// The real-solution family s₁ = −i√γ, s₂ = 0, s₃ = i√γ.
    pub fn ablowitz_segur(gamma: f64) -> Self {
        let r = gamma.sqrt();
        Self {
            s1: Complex64::new(0.0, -r),
            s2: Complex64::new(0.0, 0.0),
            s3: Complex64::new(0.0, r),
        }
    }

    /// Completes (s₁, ·, s̄₁) using s₂ = (s₁ + s₃)/(1 − s₁s₃).
    pub fn from_s1(s1: Complex64) -> Result<Self> {
        let s3 = s1.conj();
        let den = 1.0 - s1 * s3;
        if den.norm() < 1e-14 {
            return Err(Error::Domain("|s1| = 1 leaves s2 undetermined".into()));
        }
        Ok(Self { s1, s2: (s1 + s3) / den, s3 })
    }
}

/// |s₁ − s₂ + s₃ + s₁s₂s₃|.
pub fn check_cyclic(s: &StokesTriple) -> f64 {
    (s.s1 - s.s2 + s.s3 + s.s1 * s.s2 * s.s3).norm()
}

/// ϰ(k) = (2/3)√(2/(1+k²))·[E′ − (2k²/(1+k²))K′].
pub fn kappa_of_k(k: f64) -> Result<f64> {
    let q = EllipticQuad::new(k)?;
    Ok(kappa_from_quad(&q))
}

fn kappa_from_quad(q: &EllipticQuad) -> f64 {
    let k2 = q.k * q.k;
    let kp2 = q.kprime * q.kprime;
    // E′ − 2k²K′/(1+k²) rewritten so that the leading k′² terms cancel exactly
    let bracket = q.big_kprime * (kp2 * kp2 / (2.0 * (1.0 + k2)) - q.comp_tail);
    2.0 / 3.0 * (2.0 / (1.0 + k2)).sqrt() * bracket
}

/// dϰ/dk, always negative on (0,1).
pub fn kappa_derivative(k: f64) -> Result<f64> {
    let q = EllipticQuad::new(k)?;
    Ok(kappa_derivative_from_quad(&q))
}

fn kappa_derivative_from_quad(q: &EllipticQuad) -> f64 {
    let k2 = q.k * q.k;
    let pre = (2.0 / (1.0 + k2)).powf(1.5);
    // ϰ = pre·I with I = ∫ₖ¹√((1−μ²)(μ²−k²))dμ and dI/dk = −k(K′ − E′)
    let integral = kappa_from_quad(q) / pre;
    -q.k * pre * (3.0 * integral / (1.0 + k2) + q.kp_minus_ep)
}

const KAPPA_SMALL: f64 = 1e-10;
const SIGMA_SMALL: f64 = 1e-12;

/// Inverts ϰ(k) on (0, 2√2/3).
pub fn solve_modulus(kappa: f64) -> Result<f64> {
    if !(kappa > 1e-14 && kappa < SEPARATRIX_SLOPE - 1e-14) {
        return Err(Error::Range(format!(
            "kappa must lie in (0, 2*sqrt(2)/3), got {kappa}"
        )));
    }
    if kappa < KAPPA_SMALL {
        return Ok(Expansions::k_small_kappa(kappa));
    }
    let sigma = SEPARATRIX_SLOPE - kappa;
    if sigma < SIGMA_SMALL {
        return Ok(Expansions::k_near_line(sigma));
    }
    let f = |k: f64| kappa_of_k(k).map(|v| v - kappa);
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut k = 0.5 * (lo + hi);
    for _ in 0..60 {
        let q = EllipticQuad::new(k)?;
        let r = kappa_from_quad(&q) - kappa;
        if r > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let mut next = k - r / kappa_derivative_from_quad(&q);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - k).abs();
        k = next;
        if step <= 4.0 * f64::EPSILON * k || hi - lo <= 2.0 * f64::EPSILON * k {
            return Ok(k);
        }
    }
    Err(Error::NonConvergence(format!("modulus solver stalled at kappa = {kappa}")))
}

/// Everything derived from one elliptic modulus k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulusData {
    pub k: f64,
    pub quad: EllipticQuad,
    pub m: f64,
    pub big_m: f64,
    pub v: f64,
    pub tau_im: f64,
    pub tau_prime_im: f64,
    pub q: f64,
    pub landen: f64,
    pub ell_im: f64,
}

impl ModulusData {
    pub fn nome(&self) -> ThetaNome {
        ThetaNome { q: self.q, tau_im: self.tau_im }
    }
}

pub fn modulus_data(k: f64) -> Result<ModulusData> {
    let quad = EllipticQuad::new(k)?;
    let k2 = k * k;
    let root = (2.0 * (1.0 + k2)).sqrt();
    let tau_im = 2.0 * quad.big_k / quad.big_kprime;
    Ok(ModulusData {
        k,
        quad,
        m: k / root,
        big_m: 1.0 / root,
        v: frequency(&quad),
        tau_im,
        tau_prime_im: 1.0 / tau_im,
        q: (-PI * tau_im).exp(),
        landen: (1.0 - k) / (1.0 + k),
        ell_im: compute_ell(k)?,
    })
}

/// V = −(2/3π)√(2/(1+k²))·[E − ((1−k²)/(1+k²))K].
fn frequency(q: &EllipticQuad) -> f64 {
    let k2 = q.k * q.k;
    // E = K(1 − k²/2 − tail)
    let bracket = q.big_k * (2.0 * k2 / (1.0 + k2) - 0.5 * k2 - q.own_tail);
    -2.0 / (3.0 * PI) * (2.0 / (1.0 + k2)).sqrt() * bracket
}

/// Im ℓ = (M − 4M³/3) + 4∫_M^∞ [√((μ²−M²)(μ²−m²)) − μ² + 1/4] dμ.
pub fn compute_ell(k: f64) -> Result<f64> {
    if !(k > 0.0 && k < 1.0) {
        return Err(Error::Domain(format!("modulus must lie in (0,1), got {k}")));
    }
    let root = (2.0 * (1.0 + k * k)).sqrt();
    let (m, big_m) = (k / root, 1.0 / root);
    let r2 = k * k;
    let mm = m * big_m;
    // (mM)² − 1/16 with the difference of squares taken apart
    let numerator = (mm - 0.25) * (mm + 0.25);
    // μ = M/s removes the infinite range, s = 1 − u² the square root at s = 1
    let integrand = |u: f64| {
        let s = 1.0 - u * u;
        let w = u * ((2.0 - u * u) * (1.0 - r2 * s * s)).sqrt();
        2.0 * u / (big_m * big_m * (1.0 + w) - 0.25 * s * s)
    };
    // only the product with the vanishing numerator matters as k → 1
    let abs_tol = 1e-15 / (4.0 * big_m * numerator.abs()).max(1e-300);
    let integral = integrate(integrand, 0.0, 1.0, abs_tol.max(1e-15), 1e-13)?;
    Ok(big_m - 4.0 * big_m.powi(3) / 3.0 + 4.0 * big_m * numerator * integral)
}

/// Named approximants of k, V and τ′ near the two ends of (0, 2√2/3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expansions {
    pub k_small_kappa: f64,
    pub k_near_line: f64,
    pub v_small_kappa: f64,
    pub v_near_line: f64,
    pub tau_prime_im_near_line: f64,
}

impl Expansions {
    /// k ≈ 1 − 2√(ϰ/π) + 2ϰ/π − (29/8)(ϰ/π)^{3/2}.
    pub fn k_small_kappa(kappa: f64) -> f64 {
        let r = kappa / PI;
        1.0 - 2.0 * r.sqrt() + 2.0 * r - 29.0 / 8.0 * r.powf(1.5)
    }

    pub fn k_near_line(sigma: f64) -> f64 {
        let l = sigma.ln();
        let ll = l.abs().ln();
        (std::f64::consts::SQRT_2 * sigma / l.abs()).sqrt()
            * (1.0 + ll / (2.0 * l) + (2.0 + 7.0 * LN_2) / (4.0 * l))
    }

    pub fn v_small_kappa(kappa: f64) -> f64 {
        let c = kappa / (2.0 * PI * PI);
        -2.0 / (3.0 * PI) - c * kappa.ln() + c * (1.0 + (16.0 * PI).ln())
    }

    pub fn v_near_line(sigma: f64) -> f64 {
        let l = sigma.ln();
        let ll = l.abs().ln();
        -(sigma / l.abs()) * (1.0 + ll / l + (2.0 + 7.0 * LN_2) / (2.0 * l))
    }

    /// Im τ′ from τ′ ≈ −(|ln σ|/2πi)(1 − ln|ln σ|/ln σ − 7 ln 2/(2 ln σ) + ln|ln σ|/ln²σ).
    pub fn tau_prime_im_near_line(sigma: f64) -> f64 {
        let l = sigma.ln();
        let ll = l.abs().ln();
        l.abs() / (2.0 * PI) * (1.0 - ll / l - 7.0 * LN_2 / (2.0 * l) + ll / (l * l))
    }
}

/// Evaluates every approximant at one ϰ; the caller decides which ones are in range.
pub fn expansions(kappa: f64) -> Expansions {
    let sigma = SEPARATRIX_SLOPE - kappa;
    Expansions {
        k_small_kappa: Expansions::k_small_kappa(kappa),
        k_near_line: Expansions::k_near_line(sigma),
        v_small_kappa: Expansions::v_small_kappa(kappa),
        v_near_line: Expansions::v_near_line(sigma),
        tau_prime_im_near_line: Expansions::tau_prime_im_near_line(sigma),
    }
}

/// Scale constants bounding the regimes of the transition diagram.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeParams {
    pub delta: f64,
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

impl Default for RegimeParams {
    fn default() -> Self {
        Self { delta: 0.1, f1: 1.0, f2: 1.0, f3: 1.0 }
    }
}

impl RegimeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < SEPARATRIX_SLOPE / 2.0) {
            return Err(Error::Domain(format!(
                "delta must lie in (0, sqrt(2)/3), got {}",
                self.delta
            )));
        }
        if !(self.f1 > 0.0) || !self.f2.is_finite() || !self.f3.is_finite() {
            return Err(Error::Domain("f1 must be positive and f2, f3 finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeTag {
    Boutroux,
    /// `depth` is ((2√2/3)t − v)/ln t; `lines_crossed` counts the lines (6j+1)/6 ≤ depth.
    StokesRegion { depth: f64, lines_crossed: u32 },
    HastingsMcLeod,
    AboveLine,
}

impl RegimeTag {
    pub fn name(&self) -> &'static str {
        match self {
            RegimeTag::Boutroux => "boutroux",
            RegimeTag::StokesRegion { .. } => "stokes",
            RegimeTag::HastingsMcLeod => "hastings-mcleod",
            RegimeTag::AboveLine => "above-line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeLabel {
    pub tag: RegimeTag,
    /// v − (2√2/3)t
    pub line_distance: f64,
    /// v − ((2√2/3)t − c·ln t) for the nearest Stokes line c; `None` when t ≤ 1
    pub stokes_distance: Option<f64>,
}

impl RegimeLabel {
    /// ln t coefficient of the deepest Stokes line crossed.
    pub fn line_coefficient(&self) -> Option<f64> {
        match self.tag {
            RegimeTag::StokesRegion { lines_crossed, .. } if lines_crossed > 0 => {
                Some(stokes_coefficient(lines_crossed - 1))
            }
            _ => None,
        }
    }
}

/// Coefficient (6j+1)/6 of the j-th Stokes line v = (2√2/3)t − c·ln t.
pub fn stokes_coefficient(j: u32) -> f64 {
    (6.0 * j as f64 + 1.0) / 6.0
}

pub fn classify_regime(t: f64, v: f64, params: &RegimeParams) -> RegimeLabel {
    let kappa = v / t;
    let line_distance = v - SEPARATRIX_SLOPE * t;
    let lnt = t.ln();
    let (depth, stokes_distance) = if t > 1.0 {
        let d = -line_distance / lnt;
        let j = ((6.0 * d - 1.0) / 6.0).round().max(0.0) as u32;
        (d, Some(v - (SEPARATRIX_SLOPE * t - stokes_coefficient(j) * lnt)))
    } else {
        (f64::NEG_INFINITY, None)
    };
    let tag = if kappa > SEPARATRIX_SLOPE {
        RegimeTag::AboveLine
    } else if kappa <= SEPARATRIX_SLOPE - params.delta {
        RegimeTag::Boutroux
    } else if v >= SEPARATRIX_SLOPE * t - params.f2 || t <= 1.0 {
        RegimeTag::HastingsMcLeod
    } else {
        let lines_crossed = if depth >= 1.0 / 6.0 {
            ((depth - 1.0 / 6.0).floor() as u32) + 1
        } else {
            0
        };
        RegimeTag::StokesRegion { depth, lines_crossed }
    };
    RegimeLabel { tag, line_distance, stokes_distance }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn coordinates() {
        let p = scale_from_x_gamma(-4.0, -(-8f64).exp_m1(), -1.0).unwrap();
        assert!((p.t - 8.0).abs() < 1e-14);
        assert!((p.v - 8.0).abs() < 1e-12);
        assert!((p.kappa - 1.0).abs() < 1e-12);
        let s = scale_from_x_gamma(-4.0, 1.5, -1.0).unwrap();
        assert_eq!(s.branch, Branch::Singular);
        assert!((s.v - LN_2).abs() < 1e-15);
        assert!((s.s1_abs_sq() - 1.5).abs() < 1e-15);
        let on_line = ScalePoint::from_t_v(9.0, SEPARATRIX_SLOPE * 9.0, 1.0, Branch::Regular).unwrap();
        assert!(on_line.sigma.abs() < 1e-15);
        assert!(scale_from_x_gamma(-4.0, 1.0, -1.0).is_err());
        assert!(scale_from_x_gamma(-4.0, 2.0, -1.0).is_err());
        assert!(scale_from_x_gamma(1.0, 0.5, -1.0).is_err());
    }

    #[test]
    fn cyclic_relation() {
        for g in [0.3, 1.0, 1.7] {
            assert!(check_cyclic(&StokesTriple::ablowitz_segur(g)) < 1e-15);
        }
        let t = StokesTriple::from_s1(Complex64::new(0.1, 0.0)).unwrap();
        assert!(check_cyclic(&t) < 1e-14);
        let t = StokesTriple::from_s1(Complex64::new(0.3, -0.4)).unwrap();
        assert!(check_cyclic(&t) < 1e-14);
        assert!(t.s2.im.abs() < 1e-15);
    }

    fn kappa_by_quadrature(k: f64) -> f64 {
        let i = integrate(
            |mu: f64| ((1.0 - mu * mu) * (mu * mu - k * k)).sqrt(),
            k,
            1.0,
            1e-15,
            1e-13,
        )
        .unwrap();
        (2.0 / (1.0 + k * k)).powf(1.5) * i
    }

    #[test]
    fn kappa_matches_integral_form() {
        assert!((kappa_of_k(0.5).unwrap() - 0.293_838_645_022_755_4).abs() < 1e-12);
        for k in [0.01, 0.1, 0.5, 0.8, 0.99, 0.999] {
            assert!((kappa_of_k(k).unwrap() - kappa_by_quadrature(k)).abs() < 1e-12, "k={k}");
        }
        assert!((kappa_of_k(1e-9).unwrap() - SEPARATRIX_SLOPE).abs() < 1e-12);
        let k = 1.0 - 1e-4;
        let lead = PI / 4.0 * 1e-8;
        assert!((kappa_of_k(k).unwrap() / lead - 1.0).abs() < 2e-4);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        for k in [0.05, 0.3, 0.6, 0.9, 0.99] {
            let h = 1e-6;
            let fd = (kappa_of_k(k + h).unwrap() - kappa_of_k(k - h).unwrap()) / (2.0 * h);
            let d = kappa_derivative(k).unwrap();
            assert!(d < 0.0);
            assert!((fd - d).abs() < 1e-8 * d.abs().max(1.0), "k={k}: {fd} vs {d}");
        }
    }

    #[test]
    fn kappa_is_strictly_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let k = 0.001 + 0.998 * i as f64 / 199.0;
            let v = kappa_of_k(k).unwrap();
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn solver_reference_points() {
        let k = solve_modulus(0.9).unwrap();
        assert!((k - 0.083_715_200_390_558_91).abs() < 1e-12);
        let k = solve_modulus(kappa_of_k(0.5).unwrap()).unwrap();
        assert!((k - 0.5).abs() < 1e-11);
        assert!(matches!(solve_modulus(0.0), Err(Error::Range(_))));
        assert!(matches!(solve_modulus(SEPARATRIX_SLOPE), Err(Error::Range(_))));
        assert!(solve_modulus(1e-12).unwrap() > 0.999);
        assert!(solve_modulus(SEPARATRIX_SLOPE - 1e-13).unwrap() < 1e-5);
    }

    #[test]
    fn round_trip_over_modulus_range() {
        for i in 0..=60 {
            let k = 1e-4 + (1.0 - 2e-4) * i as f64 / 60.0;
            let back = solve_modulus(kappa_of_k(k).unwrap()).unwrap();
            assert!((back - k).abs() < 1e-11, "k={k}: {back}");
        }
    }

    #[test]
    fn modulus_record_at_point_six() {
        let d = modulus_data(0.6).unwrap();
        assert!((d.quad.big_k - 1.750_753_802_915_752_5).abs() < 1e-12);
        assert!((d.quad.big_e - 1.418_083_394_448_724_2).abs() < 1e-12);
        assert!((d.quad.big_kprime - 1.995_302_777_664_729_4).abs() < 1e-12);
        assert!((d.v + 0.152_910_219_801_036_1).abs() < 1e-12);
        assert!((d.m - 0.363_803_437_554_499_46).abs() < 1e-12);
        assert!((d.big_m - 0.606_339_062_590_832_4).abs() < 1e-12);
        assert!((d.tau_im - 1.754_875_322_696_445).abs() < 1e-12);
        assert!((d.q - 0.004_033_570_069_917_498).abs() < 1e-12);
        assert!((d.landen - 0.25).abs() < 1e-15);
        assert!((d.ell_im - 0.240_190_811_592_867_76).abs() < 1e-10);
        assert!((d.m * d.m + d.big_m * d.big_m - 0.5).abs() < 1e-14);
    }

    #[test]
    fn frequency_limits() {
        let near_one = modulus_data(1.0 - 1e-9).unwrap();
        assert!((near_one.v + 2.0 / (3.0 * PI)).abs() < 1e-6);
        let near_zero = modulus_data(1e-6).unwrap();
        assert!(near_zero.v.abs() < 1e-11);
    }

    #[test]
    fn ell_reference_and_limit() {
        assert!((compute_ell(0.3).unwrap() - 0.086_843_419_475_747_88).abs() < 1e-10);
        assert!((compute_ell(1.0 - 1e-7).unwrap() - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn ell_against_direct_quadrature() {
        for k in [0.2f64, 0.6, 0.9] {
            let root = (2.0 * (1.0 + k * k)).sqrt();
            let (m, big_m) = (k / root, 1.0 / root);
            let c = (m * big_m).powi(2) - 1.0 / 16.0;
            let f = |mu: f64| ((mu * mu - big_m * big_m) * (mu * mu - m * m)).sqrt() - mu * mu + 0.25;
            let cut = big_m + 20.0;
            let head = integrate(f, big_m, cut, 1e-14, 1e-13).unwrap();
            // beyond the cut the integrand is c/(2(μ² − 1/4)) up to O(μ⁻⁶)
            let tail = 0.5 * c * ((cut + 0.5) / (cut - 0.5)).ln();
            let i = head + tail;
            let direct = big_m - 4.0 * big_m.powi(3) / 3.0 + 4.0 * i;
            assert!((direct - compute_ell(k).unwrap()).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn nome_obeys_landen() {
        for i in 0..50 {
            let k = 0.01 + 0.98 * i as f64 / 49.0;
            let d = modulus_data(k).unwrap();
            let lam = EllipticQuad::new(d.landen).unwrap();
            let q_landen = (-PI * lam.big_kprime / lam.big_k).exp();
            assert!((d.q - q_landen).abs() < 1e-12);
        }
    }

    #[test]
    fn small_kappa_expansions() {
        let kappa = 1e-4;
        let k = solve_modulus(kappa).unwrap();
        let d = modulus_data(k).unwrap();
        assert!((d.v - Expansions::v_small_kappa(kappa)).abs() < 0.05 * kappa * kappa);
        assert!((k - Expansions::k_small_kappa(kappa)).abs() < 0.1 * kappa * kappa.sqrt());
    }

    #[test]
    fn near_line_expansions_improve_at_expected_order() {
        for sigma in [1e-6, 1e-8, 1e-11] {
            let kappa = SEPARATRIX_SLOPE - sigma;
            let k = solve_modulus(kappa).unwrap();
            let d = modulus_data(k).unwrap();
            let e = expansions(kappa);
            let l = sigma.ln();
            let order = l.abs().ln() / (l * l);
            assert!(((e.k_near_line - k) / k).abs() < 5.0 * order, "sigma={sigma}");
            assert!(((e.tau_prime_im_near_line - d.tau_prime_im) / d.tau_prime_im).abs() < order);
            assert!(((e.v_near_line - d.v) / d.v).abs() < 60.0 / (l * l));
        }
    }

    #[test]
    fn regime_examples() {
        let p = RegimeParams::default();
        assert_eq!(classify_regime(100.0, 40.0, &p).tag, RegimeTag::Boutroux);
        assert_eq!(
            classify_regime(100.0, SEPARATRIX_SLOPE * 100.0 + 1.0, &p).tag,
            RegimeTag::AboveLine
        );
        let l = classify_regime(100.0, SEPARATRIX_SLOPE * 100.0 - 100f64.ln(), &p);
        match l.tag {
            RegimeTag::StokesRegion { depth, lines_crossed } => {
                assert!((depth - 1.0).abs() < 1e-12);
                assert_eq!(lines_crossed, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(l.line_coefficient(), Some(1.0 / 6.0));
        assert!((l.line_distance + 100f64.ln()).abs() < 1e-12);
        assert_eq!(
            classify_regime(100.0, SEPARATRIX_SLOPE * 100.0 - 0.5, &p).tag,
            RegimeTag::HastingsMcLeod
        );
    }

    proptest! {
        #[test]
        fn exactly_one_regime_and_consistent_distances(t in 1.5f64..1e4, frac in 0.01f64..1.2) {
            let v = frac * t;
            let l = classify_regime(t, v, &RegimeParams::default());
            prop_assert!((l.line_distance - (v - SEPARATRIX_SLOPE * t)).abs() < 1e-12 * t);
            match l.tag {
                RegimeTag::AboveLine => prop_assert!(v / t > SEPARATRIX_SLOPE),
                RegimeTag::Boutroux => prop_assert!(v / t <= SEPARATRIX_SLOPE - 0.1),
                RegimeTag::HastingsMcLeod => prop_assert!(v >= SEPARATRIX_SLOPE * t - 1.0),
                RegimeTag::StokesRegion { depth, lines_crossed } => {
                    prop_assert!(depth > 0.0);
                    let deepest = l.line_coefficient();
                    if lines_crossed > 0 {
                        prop_assert!(deepest.unwrap() <= depth);
                        prop_assert!(depth < deepest.unwrap() + 1.0);
                    } else {
                        prop_assert!(depth < 1.0 / 6.0);
                    }
                }
            }
        }

        #[test]
        fn modulus_identities(k in 0.001f64..0.999) {
            let d = modulus_data(k).unwrap();
            prop_assert!((d.m * d.m + d.big_m * d.big_m - 0.5).abs() < 1e-14);
            let gap = (1.0 - k) / (2f64.sqrt() * (1.0 + k * k).sqrt());
            prop_assert!((d.big_m - d.m - gap).abs() < 1e-13);
            prop_assert!(d.v < 0.0 && d.v > -2.0 / (3.0 * PI));
            prop_assert!((d.ell_im + PI / 2.0 * d.v).abs() < 1e-10);
        }

        #[test]
        fn solver_is_monotone(a in 0.001f64..0.9, b in 0.001f64..0.9) {
            prop_assume!((a - b).abs() > 1e-9);
            let (ka, kb) = (solve_modulus(a).unwrap(), solve_modulus(b).unwrap());
            prop_assert_eq!(a < b, ka > kb);
        }
    }
}
