//! Backward integration of u″ = xu + 2u³ from Airy data, and the determinant
//! quantities recovered from it or used to recover it.

use crate::specfun::airy_pair;
use crate::{Error, Result};

use super::dop853::{integrate, Outcome};
use super::nystrom::{doubled_grid, log_det_cholesky};
use super::{fredholm_det, u_resolvent, Thinning};

pub const ODE_START: f64 = 8.0;
pub const ODE_MIN_X: f64 = -14.0;
pub const BLOWUP_LEVEL: f64 = 1e6;

/// State after an accepted step; the integrals run from x to the starting point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSample {
    pub x: f64,
    pub u: f64,
    pub up: f64,
    pub int_u2: f64,
    pub int_yu2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeTrajectory {
    pub gamma: f64,
    pub tol: f64,
    pub samples: Vec<OdeSample>,
    pub blowup: Option<f64>,
}

impl OdeTrajectory {
    pub fn last(&self) -> &OdeSample {
        self.samples.last().expect("trajectory always holds the initial point")
    }

    /// γ∫_{x_start}^∞ Ai² and γ∫_{x_start}^∞ yAi².
    pub fn tails(&self) -> Result<(f64, f64)> {
        let (a, ap) = airy_pair(ODE_START)?;
        let x = ODE_START;
        let t1 = ap * ap - x * a * a;
        let t2 = -(x * x * a * a - x * ap * ap + a * ap) / 3.0;
        Ok((self.gamma * t1, self.gamma * t2))
    }

    /// max over samples of |∫ₓ^∞u² − ((u′)² − xu² − u⁴)|.
    pub fn identity_residual(&self) -> Result<f64> {
        let (t1, _) = self.tails()?;
        Ok(self
            .samples
            .iter()
            .map(|s| {
                let rhs = s.up * s.up - s.x * s.u * s.u - s.u.powi(4);
                (s.int_u2 + t1 - rhs).abs()
            })
            .fold(0.0, f64::max))
    }
}

/// Integrates from x = 8 with u = √γAi, u′ = √γAi′ down to `x_target`.
///
/// Trajectories on the singular branch stop once |u| exceeds 1e6; the location is
/// recorded in `blowup`.
pub fn ode_solve_pii(gamma: f64, x_target: f64, tol: f64) -> Result<OdeTrajectory> {
    if !(gamma > 0.0 && gamma < 1.99) {
        return Err(Error::Domain(format!("gamma must lie in (0, 1.99), got {gamma}")));
    }
    if !(ODE_MIN_X..=ODE_START).contains(&x_target) {
        return Err(Error::Domain(format!("x_target must lie in [{ODE_MIN_X}, {ODE_START}], got {x_target}")));
    }
    if !(tol >= 1e-13) {
        return Err(Error::Domain(format!("tol must be at least 1e-13, got {tol}")));
    }
    let (a, ap) = airy_pair(ODE_START)?;
    let sg = gamma.sqrt();
    let mut samples = Vec::new();
    let outcome = integrate(
        |x, y, d| {
            let u2 = y[0] * y[0];
            d[0] = y[1];
            d[1] = x * y[0] + 2.0 * u2 * y[0];
            d[2] = -u2;
            d[3] = -x * u2;
        },
        ODE_START,
        &[sg * a, sg * ap, 0.0, 0.0],
        x_target,
        tol,
        tol * (sg * a).min(1.0),
        |x, y| samples.push(OdeSample { x, u: y[0], up: y[1], int_u2: y[2], int_yu2: y[3] }),
        |y| y[0].abs() > BLOWUP_LEVEL,
    )?;
    let blowup = match outcome {
        Outcome::Stopped(x) => Some(x),
        Outcome::Reached => None,
    };
    Ok(OdeTrajectory { gamma, tol, samples, blowup })
}

/// −∫ₓ^∞(y − x)u²dy along the trajectory plus the Airy tail beyond x = 8.
pub fn det_from_ode(x: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::Domain(format!("the Airy tail estimate needs gamma in (0,1), got {gamma}")));
    }
    let traj = ode_solve_pii(gamma, x, 1e-13)?;
    let (t1, t2) = traj.tails()?;
    let s = traj.last();
    Ok(-((s.int_yu2 + t2) - x * (s.int_u2 + t1)))
}

/// u recovered from the second x-derivative of log det, with its Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UFromDet {
    pub value: f64,
    pub u_squared: f64,
    pub error_estimate: f64,
}

/// Checks that the determinant at x is stable under doubling, up to its rounding floor.
fn check_converged(x: f64, thinning: Thinning, n: usize) -> Result<()> {
    let d = fredholm_det(x, thinning, n)?;
    if !d.log_det.is_finite() {
        return Err(Error::Domain(format!("I - gamma K is singular at x = {x}")));
    }
    if !d.converged && d.delta_last_doubling > d.roundoff_floor {
        return Err(Error::NonConvergence(format!(
            "determinant at x = {x} moved by {:.3e} under doubling",
            d.delta_last_doubling
        )));
    }
    Ok(())
}

fn stencil_log_det(x: f64, thinning: Thinning, n: usize) -> Result<f64> {
    log_det_cholesky(&doubled_grid(x, n)?, thinning)
}

fn stencil_second(x: f64, h: f64, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let (m2, m1, c, p1, p2) = (f(x - 2.0 * h)?, f(x - h)?, f(x)?, f(x + h)?, f(x + 2.0 * h)?);
    Ok((-p2 + 16.0 * p1 - 30.0 * c + 16.0 * m1 - m2) / (12.0 * h * h))
}

fn stencil_first(x: f64, h: f64, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let (m2, m1, p1, p2) = (f(x - 2.0 * h)?, f(x - h)?, f(x + h)?, f(x + 2.0 * h)?);
    Ok((-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h))
}

/// u² = −∂ₓ² log det, by five-point differences at h and h/2 and one Richardson step.
///
/// Stencil determinants come from the Cholesky factor on the doubled grid; convergence
/// under doubling is checked at the centre and the outer stencil points.
///
/// The sign is that of the resolvent form √γ((I − γK)^{-1}Ai)(x), which is positive
/// wherever u follows the decaying Airy branch.
pub fn u_from_det(x: f64, thinning: Thinning, h: f64, n: usize) -> Result<UFromDet> {
    thinning.validate()?;
    let g = thinning.gamma();
    if g == 0.0 {
        return Ok(UFromDet { value: 0.0, u_squared: 0.0, error_estimate: 0.0 });
    }
    if g > 1.0 {
        return Err(Error::Domain(format!("gamma must lie in (0, 1], got {g}")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {h}")));
    }
    for y in [x - 2.0 * h, x, x + 2.0 * h] {
        check_converged(y, thinning, n)?;
    }
    let f = |y: f64| stencil_log_det(y, thinning, n);
    let coarse = stencil_second(x, h, &f)?;
    let fine = stencil_second(x, 0.5 * h, &f)?;
    let d2 = fine + (fine - coarse) / 15.0;
    let error_estimate = ((fine - coarse) / 15.0).abs();
    let u_squared = -d2;
    if u_squared < -10.0 * error_estimate.max(1e-12) {
        return Err(Error::NonConvergence(format!(
            "second difference gives u^2 = {u_squared:.3e}; refine nodes or step"
        )));
    }
    let sign = u_resolvent(x, thinning, n)?.signum();
    Ok(UFromDet { value: sign * u_squared.max(0.0).sqrt(), u_squared, error_estimate })
}

/// ∂ₓ log det by the five-point first difference with one Richardson step.
pub fn dlogdet_from_det(x: f64, thinning: Thinning, h: f64, n: usize) -> Result<f64> {
    thinning.validate()?;
    check_converged(x, thinning, n)?;
    let f = |y: f64| stencil_log_det(y, thinning, n);
    let coarse = stencil_first(x, h, &f)?;
    let fine = stencil_first(x, 0.5 * h, &f)?;
    Ok(fine + (fine - coarse) / 15.0)
}
