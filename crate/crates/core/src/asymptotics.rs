//! Closed-form asymptotic evaluators for u(x|s), the Airy-kernel determinant and
//! the top eigenvalue gaps.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::scaling::{
    classify_regime, modulus_data, solve_modulus, Branch, RegimeLabel, RegimeParams, RegimeTag,
    ScalePoint, SEPARATRIX_SLOPE,
};
use crate::specfun::{arg_gamma, cd_normalised, tw_constant, GammaLine};
use crate::{Error, Result};

/// Error order attached to an evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Envelope {
    /// O(t^e)
    PowerT(f64),
    /// O((−x)^e)
    PowerAbsX(f64),
    /// O(1/ln t)
    InverseLog,
}

impl Envelope {
    pub fn exponent(&self) -> Option<f64> {
        match *self {
            Envelope::PowerT(e) | Envelope::PowerAbsX(e) => Some(e),
            Envelope::InverseLog => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Envelope::PowerT(e) => format!("t^{e}"),
            Envelope::PowerAbsX(e) => format!("|x|^{e}"),
            Envelope::InverseLog => "1/ln t".into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Formula {
    BoutrouxRegular,
    BoutrouxSingular,
    HmRegion,
    Stokes,
    HmFixed,
    AsFixed,
    KapaevFixed,
}

impl Formula {
    pub fn name(&self) -> &'static str {
        match self {
            Formula::BoutrouxRegular => "boutroux-regular",
            Formula::BoutrouxSingular => "boutroux-singular",
            Formula::HmRegion => "hm-region",
            Formula::Stokes => "stokes",
            Formula::HmFixed => "hm-fixed",
            Formula::AsFixed => "as-fixed",
            Formula::KapaevFixed => "kapaev-fixed",
        }
    }
}

/// One asymptotic evaluation of u(x|s).
#[derive(Debug, Clone, PartialEq)]
pub struct PIIAsymptote {
    pub value: f64,
    pub formula: Formula,
    pub regime: Option<RegimeLabel>,
    pub envelope: Envelope,
    pub pole_distance: Option<f64>,
    pub warning: Option<String>,
}

impl PIIAsymptote {
    fn new(value: f64, formula: Formula, envelope: Envelope) -> Self {
        Self { value, formula, regime: None, envelope, pole_distance: None, warning: None }
    }
}

/// Amplitude of the e^{σt}/√t correction near the separating line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HmConstant {
    /// 2^{−1/4}/(2π)
    InverseTwoPi,
    /// 2^{−5/4}/√π, twice the Stokes correction amplitude
    #[default]
    StokesConsistent,
}

impl HmConstant {
    pub fn amplitude(&self) -> f64 {
        match self {
            HmConstant::InverseTwoPi => 2f64.powf(-0.25) / (2.0 * PI),
            HmConstant::StokesConsistent => 2f64.powf(-1.25) / PI.sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            HmConstant::InverseTwoPi => "inverse-2pi",
            HmConstant::StokesConsistent => "stokes-consistent",
        }
    }
}

/// β and φ of the oscillatory fixed-|s₁| formulas.
///
/// On the singular branch the fields hold β̂ = ln(|s₁|²−1)/(2π) and φ̂.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseData {
    pub branch: Branch,
    pub beta: f64,
    pub phi: f64,
}

impl PhaseData {
    /// φ = −π/4 − arg Γ(iβ) − arg s₁, or φ̂ = −arg Γ(½+iβ̂) − arg s₁.
    pub fn new(s1: Complex64) -> Result<Self> {
        let a2 = s1.norm_sqr();
        if a2 < 1.0 {
            let beta = (-a2).ln_1p() / (2.0 * PI);
            let phi = -FRAC_PI_4 - arg_gamma(GammaLine::Imaginary, beta)? - s1.arg();
            Ok(Self { branch: Branch::Regular, beta, phi })
        } else if a2 > 1.0 && a2 < 2.0 {
            let beta = (a2 - 1.0).ln() / (2.0 * PI);
            let phi = -arg_gamma(GammaLine::Half, beta)? - s1.arg();
            Ok(Self { branch: Branch::Singular, beta, phi })
        } else {
            Err(Error::Domain(format!("|s1|^2 must lie in (0,1) or (1,2), got {a2}")))
        }
    }

    /// The real family s₁ = −i√γ, where φ = π/4 − arg Γ(iβ) and φ̂ = π/2 − arg Γ(½+iβ̂).
    pub fn for_real_family(gamma: f64) -> Result<Self> {
        if gamma < 1.0 && gamma > 0.0 {
            let beta = (-gamma).ln_1p() / (2.0 * PI);
            Ok(Self {
                branch: Branch::Regular,
                beta,
                phi: FRAC_PI_4 - arg_gamma(GammaLine::Imaginary, beta)?,
            })
        } else if gamma > 1.0 && gamma < 2.0 {
            let beta = (gamma - 1.0).ln() / (2.0 * PI);
            Ok(Self {
                branch: Branch::Singular,
                beta,
                phi: FRAC_PI_2 - arg_gamma(GammaLine::Half, beta)?,
            })
        } else {
            Err(Error::Domain(format!("gamma must lie in (0,1) or (1,2), got {gamma}")))
        }
    }

    /// (2/3)t + β ln(8t) + φ with t = (−x)^{3/2}.
    pub fn phase(&self, x: f64) -> f64 {
        let t = (-x).powf(1.5);
        2.0 / 3.0 * t + self.beta * (8.0 * t).ln() + self.phi
    }
}

/// εp/√2 in the Stokes region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StokesCorrection {
    pub p_over: f64,
    pub sigma_t: f64,
}

impl StokesCorrection {
    /// −e^{σt}/(2^{9/4}√π·√t).
    pub fn new(pt: &ScalePoint) -> Self {
        let sigma_t = pt.sigma * pt.t;
        Self {
            p_over: -sigma_t.exp() / (2f64.powf(2.25) * PI.sqrt() * pt.t.sqrt()),
            sigma_t,
        }
    }

    /// The same quantity written as −(1/2π)√(π/2)·e^{σt}/(2√2·t)^{1/2}.
    pub fn alternate_form(pt: &ScalePoint) -> f64 {
        let sigma_t = pt.sigma * pt.t;
        -(1.0 / (2.0 * PI)) * (PI / 2.0).sqrt() * sigma_t.exp()
            / (2.0 * std::f64::consts::SQRT_2 * pt.t).sqrt()
    }
}

const BOUTROUX_DELTA: f64 = 0.1;

fn boutroux_envelope(pt: &ScalePoint) -> Envelope {
    if pt.kappa <= SEPARATRIX_SLOPE - BOUTROUX_DELTA {
        Envelope::PowerT(-1.0 / 15.0)
    } else {
        Envelope::InverseLog
    }
}

fn check_boutroux(pt: &ScalePoint, branch: Branch) -> Result<()> {
    if pt.branch != branch {
        return Err(Error::Regime(format!("point is on the {:?} branch", pt.branch)));
    }
    if !(pt.kappa > 0.0 && pt.kappa < SEPARATRIX_SLOPE) {
        return Err(Error::Regime(format!(
            "Boutroux formula needs kappa in (0, 2*sqrt(2)/3), got {}",
            pt.kappa
        )));
    }
    Ok(())
}

/// −ε√(−x/2)·(1−k)/√(1+k²)·cd(2tV·K(λ), λ), λ = (1−k)/(1+k).
pub fn u_boutroux_regular(pt: &ScalePoint) -> Result<PIIAsymptote> {
    check_boutroux(pt, Branch::Regular)?;
    let k = solve_modulus(pt.kappa)?;
    let md = modulus_data(k)?;
    // cd(2tV·K(λ)) in theta form has normalised argument tV and nome e^{−2πK/K′}
    let cd = cd_normalised(pt.t * md.v, md.nome())?;
    let amp = (1.0 - k) / (1.0 + k * k).sqrt();
    let value = -pt.eps * (-pt.x / 2.0).sqrt() * amp * cd;
    let mut out = PIIAsymptote::new(value, Formula::BoutrouxRegular, boutroux_envelope(pt));
    out.regime = Some(classify_regime(pt.t, pt.v, &RegimeParams::default()));
    Ok(out)
}

pub const POLE_WARN: f64 = 0.05;
pub const POLE_ERROR: f64 = 1e-3;

/// min over nonzero integers n of |2tV − n|.
pub fn exceptional_distance(two_tv: f64) -> f64 {
    let n = two_tv.round();
    if n != 0.0 {
        (two_tv - n).abs()
    } else {
        (two_tv.abs() - 1.0).abs()
    }
}

/// −ε√(−x/2)·(1+k)/√(1+k²)·dc(2tV·K(λ), λ).
pub fn u_boutroux_singular(pt: &ScalePoint) -> Result<PIIAsymptote> {
    check_boutroux(pt, Branch::Singular)?;
    let k = solve_modulus(pt.kappa)?;
    let md = modulus_data(k)?;
    let zeta = pt.t * md.v;
    let dist = exceptional_distance(2.0 * zeta);
    if dist < POLE_ERROR {
        return Err(Error::Pole {
            what: "2tV is within the exceptional set".into(),
            distance: dist,
        });
    }
    let cd = cd_normalised(zeta, md.nome())?;
    let amp = (1.0 + k) / (1.0 + k * k).sqrt();
    let value = -pt.eps * (-pt.x / 2.0).sqrt() * amp / cd;
    let mut out = PIIAsymptote::new(value, Formula::BoutrouxSingular, boutroux_envelope(pt));
    out.regime = Some(classify_regime(pt.t, pt.v, &RegimeParams::default()));
    out.pole_distance = Some(dist);
    if dist < POLE_WARN {
        out.warning = Some(format!("2tV is {dist:.3e} from the exceptional set"));
    }
    Ok(out)
}

/// −ε√(−x/2)·(1 ∓ A e^{σt}/√t), minus on the regular branch.
pub fn u_hm_region(pt: &ScalePoint, constant: HmConstant) -> Result<PIIAsymptote> {
    let growth = (pt.sigma * pt.t).exp();
    let corr = constant.amplitude() * growth / pt.t.sqrt();
    let sign = match pt.branch {
        Branch::Regular => -1.0,
        Branch::Singular => 1.0,
    };
    let value = -pt.eps * (-pt.x / 2.0).sqrt() * (1.0 + sign * corr);
    let mut out = PIIAsymptote::new(value, Formula::HmRegion, Envelope::PowerT(-1.0));
    out.regime = Some(classify_regime(pt.t, pt.v, &RegimeParams::default()));
    if growth > pt.t.sqrt() {
        out.warning = Some("e^{sigma t} exceeds sqrt(t); the correction is not subleading".into());
    }
    Ok(out)
}

/// −ε√(−x/2)·(1+εp/√2)/(1−εp/√2), optionally with the 1/(8x³) term.
pub fn u_stokes(pt: &ScalePoint, f3: f64, refined: bool) -> Result<PIIAsymptote> {
    if !(f3 < 7.0 / 6.0) {
        return Err(Error::Regime(format!("f3 must be below 7/6, got {f3}")));
    }
    let lnt = pt.t.ln();
    if pt.v < SEPARATRIX_SLOPE * pt.t - f3 * lnt - 1e-9 * pt.t {
        return Err(Error::Regime(format!(
            "v = {} lies below the line v = (2sqrt2/3)t - {f3} ln t",
            pt.v
        )));
    }
    let p = StokesCorrection::new(pt).p_over;
    if p >= 1.0 {
        return Err(Error::Divergence(format!("Mobius factor has a pole (p = {p})")));
    }
    let mut bracket = (1.0 + p) / (1.0 - p);
    if refined {
        bracket += 1.0 / (8.0 * pt.x.powi(3));
    }
    let value = -pt.eps * (-pt.x / 2.0).sqrt() * bracket;
    let exponent = -(7.0 / 6.0 - f3).min(2.0 / 3.0);
    let mut out = PIIAsymptote::new(value, Formula::Stokes, Envelope::PowerT(exponent));
    out.regime = Some(classify_regime(pt.t, pt.v, &RegimeParams::default()));
    Ok(out)
}

/// −ε√(−x/2)·(1 + 1/(8x³)) for |s₁| = 1.
pub fn u_hm_fixed(x: f64, eps: f64) -> Result<PIIAsymptote> {
    if !(x <= -2.0) {
        return Err(Error::Domain(format!("refined HM asymptotics need x <= -2, got {x}")));
    }
    let value = -eps * (-x / 2.0).sqrt() * (1.0 + 1.0 / (8.0 * x * x * x));
    Ok(PIIAsymptote::new(value, Formula::HmFixed, Envelope::PowerAbsX(-4.5)))
}

/// Cosine asymptotics of the decaying family at fixed γ ∈ (0,1).
pub fn u_as_fixed(x: f64, gamma: f64) -> Result<PIIAsymptote> {
    if !(x <= -4.0) {
        return Err(Error::Domain(format!("cosine asymptotics need x <= -4, got {x}")));
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma}")));
    }
    let ph = PhaseData::for_real_family(gamma)?;
    let value = (-x).powf(-0.25) * (-2.0 * ph.beta).sqrt() * ph.phase(x).cos();
    Ok(PIIAsymptote::new(value, Formula::AsFixed, Envelope::PowerAbsX(-0.7)))
}

const SINE_POLE_TOL: f64 = 1e-8;

/// √(−x)/sin((2/3)t + β̂ ln(8t) + φ̂) at fixed |s₁| ∈ (1, √2).
pub fn u_kapaev_fixed(x: f64, s1abs: f64) -> Result<PIIAsymptote> {
    if !(x <= -4.0) {
        return Err(Error::Domain(format!("cosecant asymptotics need x <= -4, got {x}")));
    }
    if !(s1abs > 1.0 && s1abs < std::f64::consts::SQRT_2) {
        return Err(Error::Domain(format!("|s1| must lie in (1, sqrt 2), got {s1abs}")));
    }
    let ph = PhaseData::for_real_family(s1abs * s1abs)?;
    let phase = ph.phase(x);
    let dist = (phase - (phase / PI).round() * PI).abs();
    let s = phase.sin();
    if s.abs() < SINE_POLE_TOL {
        return Err(Error::Pole { what: "zero of the sine denominator".into(), distance: dist });
    }
    let mut out = PIIAsymptote::new((-x).sqrt() / s, Formula::KapaevFixed, Envelope::PowerAbsX(-1.0));
    out.pole_distance = Some(dist);
    Ok(out)
}

/// x³/12 − (1/8)ln|x| + ln c₀.
pub fn det_tw_tail(x: f64) -> Result<f64> {
    if !(x <= -3.0) {
        return Err(Error::Domain(format!("tail asymptotics need x <= -3, got {x}")));
    }
    Ok(x.powi(3) / 12.0 - 0.125 * (-x).ln() + tw_constant().ln())
}

/// Log-determinant near the separating line, with b(γ) replaced by c₀.
pub fn det_transition(pt: &ScalePoint, f3: f64) -> Result<f64> {
    if pt.branch != Branch::Regular {
        return Err(Error::Regime("determinant transition needs the regular branch".into()));
    }
    if !(f3 < 7.0 / 6.0) || pt.v < SEPARATRIX_SLOPE * pt.t - f3 * pt.t.ln() - 1e-9 * pt.t {
        return Err(Error::Regime(format!(
            "need f3 < 7/6 and v >= (2sqrt2/3)t - f3 ln t (f3 = {f3}, v = {})",
            pt.v
        )));
    }
    let extra = (pt.sigma * pt.t).exp() / (2f64.powf(2.25) * PI.sqrt() * pt.t.sqrt());
    Ok(pt.x.powi(3) / 12.0 - 0.125 * (-pt.x).ln() + tw_constant().ln() + extra.ln_1p())
}

/// (√π/j!)·2^{(7/2)j+9/4}·t^{j+1/2}·e^{−(2√2/3)t}, the predicted 1 − λ_j.
pub fn eigen_gap(j: u32, t: f64) -> Result<f64> {
    if j > 4 || !(t >= 4.0) {
        return Err(Error::Domain(format!("eigen_gap needs j <= 4 and t >= 4 (j = {j}, t = {t})")));
    }
    let jf = j as f64;
    let fact: f64 = (1..=j).map(|i| i as f64).product();
    Ok(PI.sqrt() / fact
        * 2f64.powf(3.5 * jf + 2.25)
        * t.powf(jf + 0.5)
        * (-SEPARATRIX_SLOPE * t).exp())
}

/// Leading term of the one-sided bound 1 − λ₀ ≥ √π·2^{9/4}·√t·e^{−(2√2/3)t}(1 + o(1)).
pub fn eigen_gap_lower_bound(t: f64) -> f64 {
    PI.sqrt() * 2f64.powf(2.25) * t.sqrt() * (-SEPARATRIX_SLOPE * t).exp()
}

/// Routes a point to the evaluator its regime calls for.
pub fn u_dispatch(pt: &ScalePoint, params: &RegimeParams, constant: HmConstant) -> Result<PIIAsymptote> {
    params.validate()?;
    let label = classify_regime(pt.t, pt.v, params);
    let boutroux = |pt: &ScalePoint| match pt.branch {
        Branch::Regular => u_boutroux_regular(pt),
        Branch::Singular => u_boutroux_singular(pt),
    };
    let mut out = match label.tag {
        RegimeTag::AboveLine => u_hm_fixed(pt.x, pt.eps)?,
        RegimeTag::Boutroux => boutroux(pt)?,
        RegimeTag::HastingsMcLeod => u_hm_region(pt, constant)?,
        RegimeTag::StokesRegion { depth, .. } => {
            if pt.branch == Branch::Regular && depth < 7.0 / 6.0 {
                u_stokes(pt, depth, false)?
            } else {
                boutroux(pt)?
            }
        }
    };
    out.regime = Some(label);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scaling::scale_from_x_gamma;
    use crate::specfun::{ellip_k, jacobi_cd, jacobi_dc};
    use proptest::prelude::*;

    fn tv(t: f64, v: f64, eps: f64, branch: Branch) -> ScalePoint {
        ScalePoint::from_t_v(t, v, eps, branch).unwrap()
    }

    #[test]
    fn boutroux_regular_matches_direct_jacobi_evaluation() {
        let pt = tv(30.0, 15.0, 1.0, Branch::Regular);
        let u = u_boutroux_regular(&pt).unwrap();
        let k = solve_modulus(0.5).unwrap();
        let md = modulus_data(k).unwrap();
        let lam = (1.0 - k) / (1.0 + k);
        let z = 2.0 * pt.t * md.v * ellip_k(lam).unwrap();
        let direct = -(-pt.x / 2.0).sqrt() * (1.0 - k) / (1.0 + k * k).sqrt() * jacobi_cd(z, lam).unwrap();
        assert!((u.value - direct).abs() < 1e-11);
        assert_eq!(u.envelope, Envelope::PowerT(-1.0 / 15.0));
        assert_eq!(u.regime.unwrap().tag, RegimeTag::Boutroux);
    }

    #[test]
    fn boutroux_value_at_full_period_points() {
        // tV ∈ 2Z puts the cd argument at a multiple of 4K(λ)
        let kappa = 0.5;
        let k = solve_modulus(kappa).unwrap();
        let md = modulus_data(k).unwrap();
        for n in [-4.0, -2.0] {
            let t = n / md.v;
            let pt = tv(t, kappa * t, -1.0, Branch::Regular);
            let u = u_boutroux_regular(&pt).unwrap();
            let expect = (-pt.x / 2.0).sqrt() * (1.0 - k) / (1.0 + k * k).sqrt();
            assert!((u.value - expect).abs() < 1e-11 * expect.abs());
        }
        // odd tV is a half period, where cd = −1
        let t = -3.0 / md.v;
        let pt = tv(t, kappa * t, -1.0, Branch::Regular);
        let expect = -(-pt.x / 2.0).sqrt() * (1.0 - k) / (1.0 + k * k).sqrt();
        assert!((u_boutroux_regular(&pt).unwrap().value - expect).abs() < 1e-11 * expect.abs());
    }

    #[test]
    fn singular_times_regular_is_amplitude_product() {
        for (t, v) in [(30.0, 15.0), (12.0, 3.0), (50.0, 40.0)] {
            let r = u_boutroux_regular(&tv(t, v, 1.0, Branch::Regular)).unwrap();
            let Ok(s) = u_boutroux_singular(&tv(t, v, 1.0, Branch::Singular)) else { continue };
            let k = solve_modulus(v / t).unwrap();
            let x = -t.powf(2.0 / 3.0);
            let expect = (-x / 2.0) * (1.0 - k * k) / (1.0 + k * k);
            assert!((r.value * s.value - expect).abs() < 1e-12 * expect);
        }
    }

    #[test]
    fn singular_pole_distance_is_reported() {
        let pt = tv(30.0, 15.0, 1.0, Branch::Singular);
        let s = u_boutroux_singular(&pt).unwrap();
        let k = solve_modulus(0.5).unwrap();
        let two_tv = 2.0 * 30.0 * modulus_data(k).unwrap().v;
        assert!((s.pole_distance.unwrap() - exceptional_distance(two_tv)).abs() < 1e-15);
        assert!(s.value.is_finite());
        // dc of the direct Jacobi evaluation agrees
        let lam = (1.0 - k) / (1.0 + k);
        let dc = jacobi_dc(two_tv * ellip_k(lam).unwrap(), lam).unwrap();
        let x = pt.x;
        let direct = -(-x / 2.0).sqrt() * (1.0 + k) / (1.0 + k * k).sqrt() * dc;
        assert!((s.value - direct).abs() < 1e-10 * direct.abs());
    }

    #[test]
    fn singular_rejects_exceptional_points() {
        let kappa = 0.4;
        let v_freq = modulus_data(solve_modulus(kappa).unwrap()).unwrap().v;
        // 2tV = −7 exactly
        let t = -3.5 / v_freq;
        let err = u_boutroux_singular(&tv(t, kappa * t, 1.0, Branch::Singular)).unwrap_err();
        assert!(matches!(err, Error::Pole { .. }));
        assert_eq!(exceptional_distance(0.2), 0.8);
        assert_eq!(exceptional_distance(-2.25), 0.25);
    }

    #[test]
    fn wrong_branch_or_range_is_a_regime_error() {
        assert!(matches!(
            u_boutroux_regular(&tv(10.0, 9.5, 1.0, Branch::Regular)),
            Err(Error::Regime(_))
        ));
        assert!(matches!(
            u_boutroux_singular(&tv(10.0, 5.0, 1.0, Branch::Regular)),
            Err(Error::Regime(_))
        ));
    }

    #[test]
    fn hm_region_limits_and_constants() {
        let pt = tv(8.0, 500.0, 1.0, Branch::Regular);
        let u = u_hm_region(&pt, HmConstant::InverseTwoPi).unwrap();
        assert_eq!(u.value, -(-pt.x / 2.0).sqrt());
        // on the line at t = 8 the correction is (1/2π)(8√2)^{−1/2}
        let on = tv(8.0, SEPARATRIX_SLOPE * 8.0, -1.0, Branch::Regular);
        let u = u_hm_region(&on, HmConstant::InverseTwoPi).unwrap();
        let lead = (-on.x / 2.0).sqrt();
        let corr = 1.0 - u.value / lead;
        let expect = (8.0 * std::f64::consts::SQRT_2).powf(-0.5) / (2.0 * PI);
        assert!((corr - expect).abs() < 1e-14);
        // σt = 1 at t = 16: the two corrections differ by √π
        let p = tv(16.0, SEPARATRIX_SLOPE * 16.0 - 1.0, -1.0, Branch::Regular);
        let c14 = 1.0 - u_hm_region(&p, HmConstant::InverseTwoPi).unwrap().value / (-p.x / 2.0).sqrt();
        let cst = 1.0 - u_hm_region(&p, HmConstant::StokesConsistent).unwrap().value / (-p.x / 2.0).sqrt();
        assert!((cst / c14 - PI.sqrt()).abs() < 1e-12);
        let s = u_hm_region(&tv(8.0, SEPARATRIX_SLOPE * 8.0, -1.0, Branch::Singular), HmConstant::default())
            .unwrap();
        assert!(s.value > lead);
    }

    #[test]
    fn hm_region_warns_when_correction_dominates() {
        let pt = tv(100.0, SEPARATRIX_SLOPE * 100.0 - 10.0, -1.0, Branch::Regular);
        assert!(u_hm_region(&pt, HmConstant::default()).unwrap().warning.is_some());
    }

    #[test]
    fn stokes_correction_forms_agree() {
        for (t, st) in [(100.0, 0.0), (16.0, 1.0), (1e4, -3.0)] {
            let pt = tv(t, SEPARATRIX_SLOPE * t - st, -1.0, Branch::Regular);
            let a = StokesCorrection::new(&pt).p_over;
            let b = StokesCorrection::alternate_form(&pt);
            assert!((a - b).abs() < 1e-14 * a.abs().max(1e-300));
        }
        let pt = tv(100.0, SEPARATRIX_SLOPE * 100.0, -1.0, Branch::Regular);
        let p = StokesCorrection::new(&pt).p_over;
        assert!((p + 1.0 / (2f64.powf(2.25) * PI.sqrt() * 10.0)).abs() < 1e-15);
        assert!((p + 0.011_861).abs() < 1e-6);
    }

    #[test]
    fn stokes_restores_hm_below_first_line() {
        let t = 1e6;
        let f3 = 0.0;
        let pt = tv(t, SEPARATRIX_SLOPE * t - f3 * t.ln(), -1.0, Branch::Regular);
        let u = u_stokes(&pt, f3, false).unwrap();
        let lead = (-pt.x / 2.0).sqrt();
        assert!((u.value / lead - 1.0).abs() < 2e-3);
        assert!(u.value < lead);
        assert_eq!(u.envelope, Envelope::PowerT(-2.0 / 3.0));
        let r = u_stokes(&pt, f3, true).unwrap();
        assert!((r.value - u.value - lead / (8.0 * pt.x.powi(3))).abs() < 1e-12);
        assert!(matches!(u_stokes(&pt, 1.2, false), Err(Error::Regime(_))));
        let below = tv(t, SEPARATRIX_SLOPE * t - 2.0 * t.ln(), -1.0, Branch::Regular);
        assert!(matches!(u_stokes(&below, 1.0, false), Err(Error::Regime(_))));
    }

    #[test]
    fn stokes_and_hm_region_differ_at_second_order() {
        for t in [1e2, 1e3, 1e4] {
            let pt = tv(t, SEPARATRIX_SLOPE * t - 0.5 * t.ln(), -1.0, Branch::Regular);
            let p = StokesCorrection::new(&pt).p_over;
            let s = u_stokes(&pt, 0.5, false).unwrap().value;
            let h = u_hm_region(&pt, HmConstant::StokesConsistent).unwrap().value;
            let lead = (-pt.x / 2.0).sqrt();
            let rel = ((s - h) / lead).abs();
            // (1+p)/(1−p) = 1 + 2p + 2p² + …
            assert!((rel - 2.0 * p * p).abs() < 3.0 * p.abs().powi(3), "t={t}");
        }
    }

    #[test]
    fn hm_fixed_values() {
        let u = u_hm_fixed(-2.0, -1.0).unwrap();
        assert!((u.value - 1.0 * (1.0 - 1.0 / 64.0)).abs() < 1e-15);
        let far = u_hm_fixed(-1e6, 1.0).unwrap().value;
        assert!((far / -(5e5f64).sqrt() - 1.0).abs() < 1e-15);
        assert!(u_hm_fixed(-1.0, 1.0).is_err());
    }

    #[test]
    fn phase_forms_agree() {
        for i in 1..=9 {
            let g = 0.1 * i as f64;
            let s1 = Complex64::new(0.0, -g.sqrt());
            let a = PhaseData::new(s1).unwrap();
            let b = PhaseData::for_real_family(g).unwrap();
            assert!((a.phi - b.phi).abs() < 1e-12);
            assert!((a.beta - b.beta).abs() < 1e-15);
            let g = 1.0 + 0.1 * i as f64;
            let s1 = Complex64::new(0.0, -g.sqrt());
            let a = PhaseData::new(s1).unwrap();
            let b = PhaseData::for_real_family(g).unwrap();
            assert!((a.phi - b.phi).abs() < 1e-12);
        }
    }

    #[test]
    fn as_amplitude_squared() {
        let g = 0.5f64;
        let beta = (1.0 - g).ln() / (2.0 * PI);
        assert!((-2.0 * beta - -(1.0 - g).ln() / PI).abs() < 1e-15);
        // the amplitude envelope bounds the value
        for x in [-4.0, -7.5, -13.0] {
            let u = u_as_fixed(x, g).unwrap().value;
            assert!(u.abs() <= (-x).powf(-0.25) * (-2.0 * beta).sqrt() + 1e-15);
        }
        assert!(u_as_fixed(-3.0, 0.5).is_err());
    }

    #[test]
    fn kapaev_poles_follow_the_sine_zeros() {
        let s1abs = 1.2f64;
        let ph = PhaseData::for_real_family(s1abs * s1abs).unwrap();
        // locate a zero of the phase − nπ by bisection in x
        let f = |x: f64| ph.phase(x) - 12.0 * PI;
        let (mut a, mut b) = (-20.0, -4.0);
        assert!(f(a) > 0.0 && f(b) < 0.0);
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if f(m) > 0.0 {
                a = m
            } else {
                b = m
            }
        }
        assert!(matches!(u_kapaev_fixed(0.5 * (a + b), s1abs), Err(Error::Pole { .. })));
        let near = u_kapaev_fixed(0.5 * (a + b) + 1e-3, s1abs).unwrap();
        assert!(near.value.abs() > 100.0);
        assert!(near.pole_distance.unwrap() < 0.1);
    }

    #[test]
    fn tail_formula() {
        let x = -6.0f64;
        let expect = -18.0 - 0.125 * 6f64.ln() + 2f64.ln() / 24.0 - 0.165_421_143_700_450_93;
        assert!((det_tw_tail(x).unwrap() - expect).abs() < 1e-13);
        let h = 1e-5;
        let d = (det_tw_tail(x + h).unwrap() - det_tw_tail(x - h).unwrap()) / (2.0 * h);
        assert!((d - (x * x / 4.0 - 1.0 / (8.0 * x))).abs() < 1e-7);
        assert!(det_tw_tail(-2.0).is_err());
    }

    #[test]
    fn transition_factor() {
        let t = 16.0;
        let on = tv(t, SEPARATRIX_SLOPE * t, -1.0, Branch::Regular);
        let f = det_transition(&on, 1.0).unwrap() - det_tw_tail(on.x).unwrap();
        let expect = (1.0 + 1.0 / (2f64.powf(2.25) * PI.sqrt() * 4.0)).ln();
        assert!((f - expect).abs() < 1e-14);
        let above = tv(t, SEPARATRIX_SLOPE * t + 60.0, -1.0, Branch::Regular);
        let f = det_transition(&above, 1.0).unwrap() - det_tw_tail(above.x).unwrap();
        assert!(f.abs() < 1e-20);
        // on the line with coefficient 1/2 the extra term stays of order one
        for t in [1e2, 1e3, 1e4] {
            let p = tv(t, SEPARATRIX_SLOPE * t - 0.5 * t.ln(), -1.0, Branch::Regular);
            let extra = (det_transition(&p, 1.0).unwrap() - det_tw_tail(p.x).unwrap()).exp_m1();
            assert!((extra - 1.0 / (2f64.powf(2.25) * PI.sqrt())).abs() < 1e-8, "{t} {extra}");
        }
    }

    #[test]
    fn gap_formula() {
        let t = 10.0;
        let g0 = eigen_gap(0, t).unwrap();
        assert!((g0 - eigen_gap_lower_bound(t)).abs() < 1e-30);
        assert!((g0 / (t.sqrt() * (-SEPARATRIX_SLOPE * t).exp()) - PI.sqrt() * 2f64.powf(2.25)).abs() < 1e-12);
        for j in 0..4 {
            let r = eigen_gap(j + 1, t).unwrap() / eigen_gap(j, t).unwrap();
            assert!((r - 2f64.powf(3.5) * t / (j + 1) as f64).abs() < 1e-11 * r);
        }
        assert!(eigen_gap(5, t).is_err());
        assert!(eigen_gap(0, 3.0).is_err());
    }

    #[test]
    fn dispatch_routes_by_regime() {
        let p = RegimeParams::default();
        let c = HmConstant::default();
        let b = u_dispatch(&tv(100.0, 40.0, -1.0, Branch::Regular), &p, c).unwrap();
        assert_eq!(b.formula, Formula::BoutrouxRegular);
        let a = u_dispatch(&tv(10.0, SEPARATRIX_SLOPE * 10.0 + 5.0, -1.0, Branch::Regular), &p, c).unwrap();
        assert_eq!(a.formula, Formula::HmFixed);
        assert_eq!(a.regime.unwrap().tag, RegimeTag::AboveLine);
        let t = 100.0;
        let pt = tv(t, SEPARATRIX_SLOPE * t - t.ln(), -1.0, Branch::Regular);
        let s = u_dispatch(&pt, &p, c).unwrap();
        assert_eq!(s.formula, Formula::Stokes);
        let direct = u_stokes(&pt, 1.0, false).unwrap();
        assert!((s.value - direct.value).abs() < 1e-14);
        let h = u_dispatch(&tv(t, SEPARATRIX_SLOPE * t - 0.5, -1.0, Branch::Regular), &p, c).unwrap();
        assert_eq!(h.formula, Formula::HmRegion);
        let deep = tv(t, SEPARATRIX_SLOPE * t - 2.0 * t.ln(), -1.0, Branch::Regular);
        assert_eq!(u_dispatch(&deep, &p, c).unwrap().formula, Formula::BoutrouxRegular);
    }

    #[test]
    fn cosine_amplitude_matches_small_kappa_envelope() {
        // as κ → 0 the elliptic amplitude tends to the cosine amplitude (−x)^{−1/4}√(−2β)
        for (x, g) in [(-20.0f64, 0.5), (-40.0, 0.3)] {
            let pt = scale_from_x_gamma(x, g, -1.0).unwrap();
            let k = solve_modulus(pt.kappa).unwrap();
            let amp = (-x / 2.0).sqrt() * (1.0 - k) / (1.0 + k * k).sqrt();
            let beta = PhaseData::for_real_family(g).unwrap().beta;
            let cos_amp = (-x).powf(-0.25) * (-2.0 * beta).sqrt();
            assert!((amp / cos_amp - 1.0).abs() < 0.05, "{x} {amp} {cos_amp}");
        }
    }

    proptest! {
        #[test]
        fn mobius_factor_shrinks_amplitude(t in 10.0f64..1e5, d in 0.0f64..0.5) {
            let pt = tv(t, SEPARATRIX_SLOPE * t - d * t.ln(), -1.0, Branch::Regular);
            let u = u_stokes(&pt, d, false).unwrap();
            let lead = (-pt.x / 2.0).sqrt();
            prop_assert!(u.value > 0.0 && u.value < lead);
            let p = StokesCorrection::new(&pt).p_over;
            prop_assert!(p < 0.0 && p > -1.0);
        }

        #[test]
        fn boutroux_regular_bounded_by_amplitudes(t in 5.0f64..200.0, kappa in 0.05f64..0.9) {
            let pt = tv(t, kappa * t, -1.0, Branch::Regular);
            let u = u_boutroux_regular(&pt).unwrap().value;
            let k = solve_modulus(kappa).unwrap();
            let amp = (-pt.x / 2.0).sqrt() * (1.0 - k) / (1.0 + k * k).sqrt();
            prop_assert!(u.abs() <= amp * (1.0 + 1e-12));
        }
    }
}
