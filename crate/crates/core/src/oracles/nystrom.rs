//! Gauss–Legendre Nyström discretisation of the Airy kernel on L²(x, ∞).

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::quad::gauss_legendre;
use crate::specfun::{airy_pair, AIRY_MAX_X, AIRY_MIN_X};
use crate::{Error, Result};

use super::Thinning;

pub const MIN_NODES: usize = 20;
pub const MAX_NODES: usize = 400;
/// Largest left endpoint: the truncation point x + 40 must stay inside the Airy range.
pub const MAX_LEFT: f64 = AIRY_MAX_X - 40.0;

/// (Ai(λ)Ai′(μ) − Ai′(λ)Ai(μ))/(λ − μ), with the diagonal limit Ai′(λ)² − λAi(λ)².
pub fn airy_kernel(lam: f64, mu: f64) -> Result<f64> {
    let a = airy_pair(lam)?;
    let b = airy_pair(mu)?;
    Ok(kernel_from_values(lam, a, mu, b))
}

fn kernel_from_values(lam: f64, (a, ap): (f64, f64), mu: f64, (b, bp): (f64, f64)) -> f64 {
    if (lam - mu).abs() < 1e-7 {
        let m = 0.5 * (lam + mu);
        let ai = 0.5 * (a + b);
        let aip = 0.5 * (ap + bp);
        aip * aip - m * ai * ai
    } else {
        (a * bp - ap * b) / (lam - mu)
    }
}

/// Quadrature nodes on (x_left, x_right).
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub x_left: f64,
    pub x_right: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub n: usize,
}

impl QuadratureGrid {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }
}

/// Gauss–Legendre rule mapped onto (x, max(x + 40, 12)).
pub fn build_grid(x: f64, n: usize) -> Result<QuadratureGrid> {
    if !(MIN_NODES..=MAX_NODES).contains(&n) {
        return Err(Error::Range(format!("node count must lie in [{MIN_NODES}, {MAX_NODES}], got {n}")));
    }
    grid_unchecked(x, n)
}

fn grid_unchecked(x: f64, n: usize) -> Result<QuadratureGrid> {
    if !(AIRY_MIN_X..=MAX_LEFT).contains(&x) {
        return Err(Error::Range(format!("x must lie in [{AIRY_MIN_X}, {MAX_LEFT}], got {x}")));
    }
    let x_right = (x + 40.0).max(12.0);
    let (t, w) = gauss_legendre(n);
    let half = 0.5 * (x_right - x);
    let mid = 0.5 * (x_right + x);
    Ok(QuadratureGrid {
        x_left: x,
        x_right,
        nodes: t.iter().map(|ti| mid + half * ti).collect(),
        weights: w.iter().map(|wi| half * wi).collect(),
        n,
    })
}

const FLUSH: f64 = 1e-60;

/// W^{1/2} K W^{1/2} on the grid.
pub fn nystrom_matrix(grid: &QuadratureGrid) -> Result<DMatrix<f64>> {
    let vals = grid.nodes.iter().map(|&l| airy_pair(l)).collect::<Result<Vec<_>>>()?;
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let n = grid.n;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let k = kernel_from_values(grid.nodes[i], vals[i], grid.nodes[j], vals[j]);
            let mut e = sw[i] * k * sw[j];
            // the eigensolver's Householder norms underflow on entries this small
            if e.abs() < FLUSH {
                e = 0.0;
            }
            m[(i, j)] = e;
            m[(j, i)] = e;
        }
    }
    Ok(m)
}

/// Eigenvalues of the symmetrised Nyström matrix in descending order.
pub fn nystrom_eigs(grid: &QuadratureGrid) -> Result<Vec<f64>> {
    let m = nystrom_matrix(grid)?;
    let mut eigs: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    if eigs.iter().any(|e| !e.is_finite()) {
        return Err(Error::NonConvergence("symmetric eigensolver returned non-finite values".into()));
    }
    eigs.sort_by(|a, b| b.total_cmp(a));
    Ok(eigs)
}

/// Σ ln(1 − γμᵢ), with 1 − γμ formed as (1 − μ) + e^{−v}μ when γ is given through v.
pub fn log_det_from_eigs(eigs: &[f64], thinning: Thinning) -> f64 {
    eigs.iter()
        .map(|&mu| match thinning {
            Thinning::Gamma(g) => (-g * mu).ln_1p(),
            Thinning::V(v) => ((1.0 - mu) + (-v).exp() * mu).ln(),
        })
        .sum()
}

/// Σ δ·γ/(1 − γμᵢ) with δ = 8·√n·eps, the size of log-det changes that eigenvalue
/// rounding alone can produce.
pub fn roundoff_floor(eigs: &[f64], thinning: Thinning) -> f64 {
    let g = thinning.gamma();
    let delta = 8.0 * (eigs.len() as f64).sqrt() * f64::EPSILON;
    eigs.iter()
        .map(|&mu| {
            let one_minus = match thinning {
                Thinning::Gamma(g) => 1.0 - g * mu,
                Thinning::V(v) => (1.0 - mu) + (-v).exp() * mu,
            };
            delta * g / one_minus.abs().max(delta)
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetResult {
    pub log_det: f64,
    pub n_used: usize,
    pub converged: bool,
    pub delta_last_doubling: f64,
    /// First-order effect on log det of eigenvalue errors at the solver's working accuracy.
    pub roundoff_floor: f64,
    /// Most negative eigenvalue, if any fell below −1e−10.
    pub negative_anomaly: Option<f64>,
}

/// Relative doubling tolerance for determinant convergence.
pub const DET_TOL: f64 = 1e-10;

/// log det(I − γK_Ai) on L²(x, ∞), assessed by one doubling of the node count.
pub fn fredholm_det(x: f64, thinning: Thinning, n: usize) -> Result<DetResult> {
    thinning.validate()?;
    let coarse = nystrom_eigs(&build_grid(x, n)?)?;
    let fine = nystrom_eigs(&grid_unchecked(x, 2 * n)?)?;
    let a = log_det_from_eigs(&coarse, thinning);
    let b = log_det_from_eigs(&fine, thinning);
    let delta = (a - b).abs();
    let lowest = fine.last().copied().unwrap_or(0.0).min(coarse.last().copied().unwrap_or(0.0));
    Ok(DetResult {
        log_det: b,
        n_used: 2 * n,
        converged: delta < DET_TOL * (1.0 + b.abs()),
        delta_last_doubling: delta,
        roundoff_floor: roundoff_floor(&fine, thinning),
        negative_anomaly: (lowest < -1e-10).then_some(lowest),
    })
}

/// log det(I − γW^{1/2}KW^{1/2}) from the Cholesky pivots.
///
/// This varies more smoothly with x than the eigenvalue sum when 1 − λ₀ is tiny, which
/// is what finite differences in x need.
pub fn log_det_cholesky(grid: &QuadratureGrid, thinning: Thinning) -> Result<f64> {
    thinning.validate()?;
    let a = nystrom_matrix(grid)?;
    let m = match thinning {
        Thinning::Gamma(g) => DMatrix::identity(grid.n, grid.n) - a * g,
        Thinning::V(v) => DMatrix::identity(grid.n, grid.n) - &a + a * (-v).exp(),
    };
    let l = m
        .cholesky()
        .ok_or_else(|| Error::Domain("I - gamma K is not positive definite on the grid".into()))?
        .l();
    Ok((0..grid.n).map(|i| 2.0 * l[(i, i)].ln()).sum())
}

/// The doubled grid used for a node count n.
pub(crate) fn doubled_grid(x: f64, n: usize) -> Result<QuadratureGrid> {
    build_grid(x, n)?;
    grid_unchecked(x, 2 * n)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigs: Vec<f64>,
    pub n_reliable: usize,
    pub n_used: usize,
}

/// Stability threshold for calling an eigenvalue reliable.
pub const SPECTRUM_TOL: f64 = 1e-9;

/// Spectrum of the Airy kernel on L²(x, ∞) from the doubled grid.
///
/// The leading eigenvalues whose relative change under doubling stays below 1e−9 are
/// counted as reliable.
pub fn kernel_spectrum(x: f64, n: usize) -> Result<SpectrumResult> {
    let coarse = nystrom_eigs(&build_grid(x, n)?)?;
    let fine = nystrom_eigs(&grid_unchecked(x, 2 * n)?)?;
    let n_reliable = coarse
        .iter()
        .zip(&fine)
        .take_while(|(a, b)| **b > 0.0 && (*a - *b).abs() <= SPECTRUM_TOL * **b)
        .count();
    if n_reliable > 0 && fine[0] >= 1.0 {
        return Err(Error::NonConvergence(format!("top eigenvalue {} is not below 1", fine[0])));
    }
    Ok(SpectrumResult { eigs: fine, n_reliable, n_used: 2 * n })
}

/// E_k(x): probability of exactly k eigenvalues in (x, ∞), from e_k(μ/(1 − μ))·det(I − K).
pub fn gap_count_prob(x: f64, kcount: usize, n: usize) -> Result<f64> {
    if kcount > 3 {
        return Err(Error::Domain(format!("kcount must be at most 3, got {kcount}")));
    }
    let spec = kernel_spectrum(x, n)?;
    if spec.n_reliable < kcount + 3 {
        return Err(Error::NonConvergence(format!(
            "only {} reliable eigenvalues, need {}",
            spec.n_reliable,
            kcount + 3
        )));
    }
    Ok(gap_probs_from_eigs(&spec.eigs, kcount)[kcount])
}

/// E_0..E_kmax from a spectrum.
pub fn gap_probs_from_eigs(eigs: &[f64], kmax: usize) -> Vec<f64> {
    let log_det: f64 = eigs.iter().map(|&m| (-m).ln_1p()).sum();
    let det = log_det.exp();
    // elementary symmetric polynomials e_0..e_kmax by the usual recurrence
    let mut e = vec![0.0; kmax + 1];
    e[0] = 1.0;
    for &mu in eigs {
        let rho = mu / (1.0 - mu);
        for j in (1..=kmax).rev() {
            e[j] += rho * e[j - 1];
        }
    }
    e.iter().map(|ej| det * ej).collect()
}

/// √γ·((I − γK)^{-1}Ai)(x), the resolvent form of u, by Nyström interpolation.
pub fn u_resolvent(x: f64, thinning: Thinning, n: usize) -> Result<f64> {
    thinning.validate()?;
    let g = thinning.gamma();
    let grid = build_grid(x, n)?;
    let vals = grid.nodes.iter().map(|&l| airy_pair(l)).collect::<Result<Vec<_>>>()?;
    let sw: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let a = nystrom_matrix(&grid)?;
    let sys = DMatrix::identity(grid.n, grid.n) - a * g;
    let rhs = DVector::from_iterator(grid.n, vals.iter().zip(&sw).map(|(v, s)| s * v.0));
    let sol = sys
        .cholesky()
        .ok_or_else(|| Error::NonConvergence("I − γK is not positive definite on the grid".into()))?
        .solve(&rhs);
    let at_x = airy_pair(x)?;
    let mut q = at_x.0;
    for i in 0..grid.n {
        q += g * sw[i] * kernel_from_values(x, at_x, grid.nodes[i], vals[i]) * sol[i];
    }
    Ok(g.sqrt() * q)
}
