//! Independent numerical ground truth: direct integration of Painlevé II and the
//! Nyström discretisation of the Airy-kernel operator.

pub mod dop853;
mod nystrom;
mod pii_ode;

pub use nystrom::{
    airy_kernel, build_grid, fredholm_det, gap_count_prob, gap_probs_from_eigs, kernel_spectrum,
    log_det_cholesky, log_det_from_eigs, nystrom_eigs, nystrom_matrix, roundoff_floor, u_resolvent, DetResult, QuadratureGrid,
    SpectrumResult, DET_TOL, MAX_LEFT, MAX_NODES, MIN_NODES, SPECTRUM_TOL,
};
pub use pii_ode::{
    det_from_ode, dlogdet_from_det, ode_solve_pii, u_from_det, OdeSample, OdeTrajectory,
    UFromDet, BLOWUP_LEVEL, ODE_MIN_X, ODE_START,
};

use crate::{Error, Result};

/// Environment variable overriding the default Nyström node count.
pub const NODES_ENV: &str = "PII_DEFAULT_NODES";
pub const DEFAULT_NODES: usize = 60;

/// Node count from `PII_DEFAULT_NODES`, or 60.
pub fn default_nodes() -> usize {
    std::env::var(NODES_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|n| (MIN_NODES..=MAX_NODES).contains(n))
        .unwrap_or(DEFAULT_NODES)
}

/// The thinning parameter γ, or v with γ = 1 − e^{−v} for γ close to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Thinning {
    Gamma(f64),
    V(f64),
}

impl Thinning {
    pub fn gamma(&self) -> f64 {
        match *self {
            Thinning::Gamma(g) => g,
            Thinning::V(v) => -(-v).exp_m1(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Thinning::Gamma(g) if g >= 0.0 && g.is_finite() => Ok(()),
            Thinning::V(v) if v > 0.0 => Ok(()),
            Thinning::Gamma(g) => Err(Error::Domain(format!("gamma must be nonnegative, got {g}"))),
            Thinning::V(v) => Err(Error::Domain(format!("v must be positive, got {v}"))),
        }
    }
}
