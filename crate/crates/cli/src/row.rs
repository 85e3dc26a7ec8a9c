//! Comparison rows: asymptotic evaluations next to an optional oracle value.

use pii_transitions::asymptotics::{
    det_transition, det_tw_tail, u_as_fixed, u_boutroux_regular, u_boutroux_singular, u_dispatch,
    u_hm_fixed, u_hm_region, u_kapaev_fixed, u_stokes, HmConstant, PIIAsymptote,
};
use pii_transitions::oracles::{fredholm_det, ode_solve_pii, u_from_det, Thinning, ODE_MIN_X};
use pii_transitions::scaling::{
    classify_regime, modulus_data, solve_modulus, Branch, RegimeParams, RegimeTag, ScalePoint,
    SEPARATRIX_SLOPE,
};
use pii_transitions::{Error, Result};
use serde::Serialize;

use crate::point::{branch_name, line_distance, Parameter, Point, Position, EPS};

/// Column order shared by the CSV and JSON outputs.
pub const COLUMNS: [&str; 24] = [
    "x",
    "t",
    "v",
    "kappa",
    "sigma",
    "gamma",
    "branch",
    "regime",
    "quantity",
    "formula",
    "dispatch",
    "value",
    "envelope",
    "envelope_exponent",
    "pole_distance",
    "elliptic_k",
    "elliptic_v",
    "oracle",
    "oracle_value",
    "abs_diff",
    "rel_diff",
    "neighbor_formula",
    "neighbor_value",
    "note",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub x: f64,
    pub t: f64,
    pub v: f64,
    pub kappa: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub branch: &'static str,
    pub regime: Option<&'static str>,
    /// `u` or `log_det`
    pub quantity: &'static str,
    pub formula: Option<&'static str>,
    pub dispatch: bool,
    pub value: Option<f64>,
    pub envelope: Option<String>,
    pub envelope_exponent: Option<f64>,
    pub pole_distance: Option<f64>,
    pub elliptic_k: Option<f64>,
    pub elliptic_v: Option<f64>,
    pub oracle: Option<&'static str>,
    pub oracle_value: Option<f64>,
    pub abs_diff: Option<f64>,
    pub rel_diff: Option<f64>,
    pub neighbor_formula: Option<&'static str>,
    pub neighbor_value: Option<f64>,
    /// Warnings and per-row errors, `;`-separated.
    pub note: Option<String>,
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

impl ComparisonRow {
    fn blank(x: f64, t: f64, v: f64, gamma: f64, branch: Branch, quantity: &'static str) -> Self {
        let kappa = v / t;
        Self {
            x,
            t,
            v,
            kappa,
            sigma: SEPARATRIX_SLOPE - kappa,
            gamma,
            branch: branch_name(branch),
            regime: None,
            quantity,
            formula: None,
            dispatch: false,
            value: None,
            envelope: None,
            envelope_exponent: None,
            pole_distance: None,
            elliptic_k: None,
            elliptic_v: None,
            oracle: None,
            oracle_value: None,
            abs_diff: None,
            rel_diff: None,
            neighbor_formula: None,
            neighbor_value: None,
            note: None,
        }
    }

    fn at(p: &Point, params: &RegimeParams, quantity: &'static str) -> Self {
        let mut row = Self::blank(p.x, p.t, p.v, p.gamma, p.branch, quantity);
        row.kappa = p.kappa();
        row.sigma = p.sigma();
        row.regime = Some(regime_name(p, params));
        if row.kappa < SEPARATRIX_SLOPE {
            if let Ok(k) = solve_modulus(row.kappa) {
                row.elliptic_k = Some(k);
                row.elliptic_v = modulus_data(k).ok().map(|m| m.v);
            }
        }
        row
    }

    fn with_asymptote(mut self, a: &PIIAsymptote) -> Self {
        self.formula = Some(a.formula.name());
        self.value = Some(a.value);
        self.envelope = Some(a.envelope.describe());
        self.envelope_exponent = a.envelope.exponent();
        self.pole_distance = a.pole_distance;
        if let Some(w) = &a.warning {
            self.add_note(w);
        }
        self
    }

    fn add_note(&mut self, msg: &str) {
        self.note = Some(match self.note.take() {
            Some(n) => format!("{n}; {msg}"),
            None => msg.to_string(),
        });
    }

    fn attach_oracle(&mut self, oracle: &std::result::Result<OracleValue, Error>) {
        match oracle {
            Ok(o) => {
                self.oracle = Some(o.method);
                self.oracle_value = Some(o.value);
                if let Some(a) = self.value {
                    let d = (a - o.value).abs();
                    self.abs_diff = Some(d);
                    self.rel_diff = Some(d / o.value.abs());
                }
            }
            Err(e) => self.add_note(&format!("oracle: {e}")),
        }
    }

    /// Fields in `COLUMNS` order, floats with 17 significant digits.
    pub fn csv_record(&self) -> Vec<String> {
        let s = |v: Option<&str>| v.unwrap_or_default().to_string();
        vec![
            fmt(self.x),
            fmt(self.t),
            fmt(self.v),
            fmt(self.kappa),
            fmt(self.sigma),
            fmt(self.gamma),
            self.branch.to_string(),
            s(self.regime),
            self.quantity.to_string(),
            s(self.formula),
            self.dispatch.to_string(),
            opt(self.value),
            s(self.envelope.as_deref()),
            opt(self.envelope_exponent),
            opt(self.pole_distance),
            opt(self.elliptic_k),
            opt(self.elliptic_v),
            s(self.oracle),
            opt(self.oracle_value),
            opt(self.abs_diff),
            opt(self.rel_diff),
            s(self.neighbor_formula),
            opt(self.neighbor_value),
            s(self.note.as_deref()),
        ]
    }
}

fn regime_name(p: &Point, params: &RegimeParams) -> &'static str {
    match p.scale {
        Some(s) => classify_regime(s.t, s.v, params).tag.name(),
        None => RegimeTag::AboveLine.name(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub params: RegimeParams,
    pub constant: HmConstant,
    /// Stokes depth for the Stokes and determinant formulas; the point's own depth if unset.
    pub f3: Option<f64>,
    pub oracle: bool,
    pub nodes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleValue {
    pub method: &'static str,
    pub value: f64,
}

fn thinning(p: &Point) -> Thinning {
    if p.scale.is_none() {
        Thinning::Gamma(1.0)
    } else {
        Thinning::V(p.v)
    }
}

/// Largest accepted ratio of the Richardson error estimate to u².
pub const NYSTROM_U_TOL: f64 = 1e-3;

/// ODE for the singular branch and for moderate v with x ≥ −14; Nyström otherwise.
pub fn oracle_u(p: &Point, nodes: usize) -> Result<OracleValue> {
    let use_ode = p.branch == Branch::Singular || (p.x >= ODE_MIN_X && p.v <= 20.0);
    if use_ode {
        let traj = ode_solve_pii(p.gamma, p.x, 1e-12)?;
        if let Some(xb) = traj.blowup {
            return Err(Error::Divergence(format!("ODE solution blows up at x = {xb:.6}")));
        }
        Ok(OracleValue { method: "ode", value: traj.last().u })
    } else {
        let r = u_from_det(p.x, thinning(p), 5e-3, nodes)?;
        if r.error_estimate > NYSTROM_U_TOL * r.u_squared.abs().max(1e-12) {
            return Err(Error::NonConvergence(format!(
                "second-difference error {:.3e} against u^2 = {:.3e}; raise --nodes",
                r.error_estimate, r.u_squared
            )));
        }
        Ok(OracleValue { method: "nystrom", value: r.value })
    }
}

pub fn oracle_log_det(p: &Point, nodes: usize) -> Result<OracleValue> {
    if p.branch != Branch::Regular {
        return Err(Error::Domain("the determinant oracle needs gamma <= 1".into()));
    }
    let d = fredholm_det(p.x, thinning(p), nodes)?;
    if !d.converged && d.delta_last_doubling > d.roundoff_floor {
        return Err(Error::NonConvergence(format!(
            "log det moved by {:.3e} under doubling",
            d.delta_last_doubling
        )));
    }
    Ok(OracleValue { method: "nystrom", value: d.log_det })
}

fn stokes_depth(s: &ScalePoint) -> Option<f64> {
    (s.t > 1.0).then(|| (SEPARATRIX_SLOPE * s.t - s.v) / s.t.ln())
}

fn dispatched(p: &Point, opts: &EvalOptions) -> Result<PIIAsymptote> {
    match &p.scale {
        Some(s) => u_dispatch(s, &opts.params, opts.constant),
        None => u_hm_fixed(p.x, EPS),
    }
}

/// Every formula that evaluates at `p`, with the dispatch choice marked.
///
/// Returns the rows together with the first oracle error, if any.
pub fn eval_rows(p: &Point, opts: &EvalOptions) -> Result<(Vec<ComparisonRow>, Option<Error>)> {
    opts.params.validate()?;
    let chosen = dispatched(p, opts)?;
    let mut u_rows = vec![ComparisonRow::at(p, &opts.params, "u").with_asymptote(&chosen)];
    u_rows[0].dispatch = true;
    if let Some(s) = &p.scale {
        let f3 = opts.f3.or_else(|| stokes_depth(s));
        let candidates: Vec<Result<PIIAsymptote>> = match p.branch {
            Branch::Regular => vec![
                u_boutroux_regular(s),
                u_hm_region(s, opts.constant),
                f3.map_or_else(|| Err(Error::Regime("no depth".into())), |f| u_stokes(s, f, false)),
                u_as_fixed(p.x, p.gamma),
            ],
            Branch::Singular => vec![
                u_boutroux_singular(s),
                u_hm_region(s, opts.constant),
                u_kapaev_fixed(p.x, p.gamma.sqrt()),
            ],
        };
        // a warning here means the formula is outside its own regime
        for a in candidates.into_iter().flatten() {
            if a.formula != chosen.formula && a.warning.is_none() {
                u_rows.push(ComparisonRow::at(p, &opts.params, "u").with_asymptote(&a));
            }
        }
    }

    let log_det = match &p.scale {
        Some(s) if p.branch == Branch::Regular => opts
            .f3
            .or_else(|| stokes_depth(s))
            .and_then(|f| det_transition(s, f).ok())
            .map(|v| ("det-transition", v)),
        Some(_) => None,
        None => det_tw_tail(p.x).ok().map(|v| ("det-tw-tail", v)),
    };
    let mut det_rows = Vec::new();
    if let Some((name, value)) = log_det {
        let mut row = ComparisonRow::at(p, &opts.params, "log_det");
        row.formula = Some(name);
        row.value = Some(value);
        row.dispatch = true;
        det_rows.push(row);
    }

    let mut first_err = None;
    if opts.oracle {
        let ou = oracle_u(p, opts.nodes);
        u_rows.iter_mut().for_each(|r| r.attach_oracle(&ou));
        first_err = ou.err();
        if !det_rows.is_empty() {
            let od = oracle_log_det(p, opts.nodes);
            det_rows.iter_mut().for_each(|r| r.attach_oracle(&od));
            first_err = first_err.or(od.err());
        }
    }
    u_rows.extend(det_rows);
    Ok((u_rows, first_err))
}

/// |σ| ≤ 1/t: a sweep row this close to the separating line also carries the formula
/// from the other side.
fn near_line(p: &Point) -> bool {
    line_distance(p).abs() <= 1.0
}

/// One sweep row: the dispatch formula, never an `Err`.
pub fn sweep_row(pos: Position, param: Parameter, branch: Option<Branch>, opts: &EvalOptions) -> ComparisonRow {
    let p = match crate::point::resolve(pos, param, branch) {
        Ok(p) => p,
        Err(e) => return failed_row(pos, param, branch, &e),
    };
    let mut row = match dispatched(&p, opts) {
        Ok(a) => {
            let mut r = ComparisonRow::at(&p, &opts.params, "u").with_asymptote(&a);
            r.dispatch = true;
            r
        }
        Err(e) => {
            let mut r = ComparisonRow::at(&p, &opts.params, "u");
            r.add_note(&e.to_string());
            r
        }
    };
    if let (Some(s), true) = (&p.scale, near_line(&p)) {
        let above = row.regime == Some(RegimeTag::AboveLine.name());
        let neighbor = if above {
            u_hm_region(s, opts.constant)
        } else {
            u_hm_fixed(p.x, EPS)
        };
        if let Ok(a) = neighbor {
            row.neighbor_formula = Some(a.formula.name());
            row.neighbor_value = Some(a.value);
        }
    }
    if opts.oracle {
        row.attach_oracle(&oracle_u(&p, opts.nodes));
    }
    row
}

fn failed_row(pos: Position, param: Parameter, branch: Option<Branch>, e: &Error) -> ComparisonRow {
    let (x, t) = match pos {
        Position::X(x) => (x, (-x).powf(1.5)),
        Position::T(t) => (-t.powf(2.0 / 3.0), t),
    };
    let (v, gamma) = match param {
        Parameter::Gamma(g) => (f64::NAN, g),
        Parameter::V(v) => (v, f64::NAN),
    };
    let mut row = ComparisonRow::blank(x, t, v, gamma, branch.unwrap_or(Branch::Regular), "u");
    row.add_note(&e.to_string());
    row
}
