//! Coordinate resolution: (x | t) together with (γ | v) and a branch.

use pii_transitions::scaling::{scale_from_x_gamma, Branch, ScalePoint, SEPARATRIX_SLOPE};
use pii_transitions::{Error, Result};

/// ε for the real decaying family s₁ = −i√γ.
pub const EPS: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub t: f64,
    pub v: f64,
    pub gamma: f64,
    pub branch: Branch,
    /// `None` for γ = 1, where v is infinite.
    pub scale: Option<ScalePoint>,
}

impl Point {
    pub fn kappa(&self) -> f64 {
        self.scale.map_or(f64::INFINITY, |p| p.kappa)
    }

    pub fn sigma(&self) -> f64 {
        self.scale.map_or(f64::NEG_INFINITY, |p| p.sigma)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Position {
    X(f64),
    T(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parameter {
    Gamma(f64),
    V(f64),
}

fn position_x(pos: Position) -> Result<f64> {
    match pos {
        Position::X(x) if x < 0.0 && x.is_finite() => Ok(x),
        Position::X(x) => Err(Error::Domain(format!("x must be negative, got {x}"))),
        Position::T(t) if t > 0.0 && t.is_finite() => Ok(-t.powf(2.0 / 3.0)),
        Position::T(t) => Err(Error::Domain(format!("t must be positive, got {t}"))),
    }
}

/// Builds a point; an explicit `branch` must agree with the one γ implies.
pub fn resolve(pos: Position, param: Parameter, branch: Option<Branch>) -> Result<Point> {
    let x = position_x(pos)?;
    let t = match pos {
        Position::T(t) => t,
        Position::X(x) => (-x).powf(1.5),
    };
    match param {
        Parameter::Gamma(1.0) => {
            if branch.is_some_and(|b| b != Branch::Regular) {
                return Err(Error::Domain("gamma = 1 lies on the regular side".into()));
            }
            Ok(Point { x, t, v: f64::INFINITY, gamma: 1.0, branch: Branch::Regular, scale: None })
        }
        Parameter::Gamma(g) => {
            let p0 = scale_from_x_gamma(x, g, EPS)?;
            if branch.is_some_and(|b| b != p0.branch) {
                return Err(Error::Domain(format!(
                    "gamma = {g} implies the {} branch",
                    branch_name(p0.branch)
                )));
            }
            let mut p = ScalePoint::from_t_v(t, p0.v, EPS, p0.branch)?;
            p.x = x;
            Ok(Point { x, t, v: p.v, gamma: g, branch: p.branch, scale: Some(p) })
        }
        Parameter::V(v) => {
            let branch = branch.unwrap_or(Branch::Regular);
            let mut p = ScalePoint::from_t_v(t, v, EPS, branch)?;
            p.x = x;
            let gamma = p.s1_abs_sq();
            Ok(Point { x, t, v, gamma, branch, scale: Some(p) })
        }
    }
}

pub fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Regular => "regular",
        Branch::Singular => "singular",
    }
}

/// v − (2√2/3)t, the signed distance to the separating line.
pub fn line_distance(p: &Point) -> f64 {
    p.v - SEPARATRIX_SLOPE * p.t
}

/// Parses `A` or `A:B:N` (N points from A to B inclusive).
pub fn parse_range(s: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("bad number '{p}': {e}"));
    match parts.as_slice() {
        [a] => Ok(vec![num(a)?]),
        [a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|e| format!("bad count '{n}': {e}"))?;
            if n == 0 {
                return Err("a range needs at least one point".into());
            }
            if n == 1 {
                return Ok(vec![a]);
            }
            let step = (b - a) / (n - 1) as f64;
            Ok((0..n).map(|i| if i == n - 1 { b } else { a + step * i as f64 }).collect())
        }
        _ => Err(format!("expected A or A:B:N, got '{s}'")),
    }
}
