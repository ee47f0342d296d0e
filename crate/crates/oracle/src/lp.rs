//! Global optimum over policies whose stops sit on a time grid.

use persuasion::policy::{InformationPolicy, StoppingCdf};
use persuasion::{Params, Quality};
use serde::{Deserialize, Serialize};

use crate::simplex::{maximize, LinearProgram, Relation};
use crate::OracleError;

/// Uniform grid on `[0, horizon]` with `0, t*, tau(mu0), tau(1)` added.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub n: usize,
    /// Defaults to `tau(1)`.
    pub horizon: Option<f64>,
    /// Further times to include, e.g. a candidate policy's stopping times.
    pub extra: Vec<f64>,
}

impl GridSpec {
    pub fn new(n: usize) -> Self {
        GridSpec { n, horizon: None, extra: Vec::new() }
    }

    pub fn points(&self, params: &Params) -> Vec<f64> {
        let t1 = params.stop_time(1.0);
        let h = self.horizon.unwrap_or(t1);
        let mut pts: Vec<f64> = (0..=self.n).map(|i| h * i as f64 / self.n as f64).collect();
        pts.extend([0.0, params.peak_time(), params.stop_time(params.mu0), t1]);
        pts.extend(self.extra.iter().copied());
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        pts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOptions {
    /// Forbid high-type stops before the principal's preferred time.
    pub pin_high_before_peak: bool,
    /// Drop to check that removing constraints never lowers the value.
    pub stopping_constraints: bool,
}

impl Default for LpOptions {
    fn default() -> Self {
        LpOptions { pin_high_before_peak: false, stopping_constraints: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpOracleResult {
    pub value: f64,
    pub grid: Vec<f64>,
    pub high: Vec<f64>,
    pub low: Vec<f64>,
    pub pivots: usize,
}

impl LpOracleResult {
    pub fn policy(&self) -> InformationPolicy {
        let atoms = |m: &[f64]| {
            StoppingCdf::from_atoms(
                self.grid.iter().zip(m).filter(|(_, &x)| x > 1e-13).map(|(&t, &x)| (t, x)).collect(),
            )
        };
        InformationPolicy { high: atoms(&self.high), low: atoms(&self.low) }
    }
}

pub fn lp_oracle(params: &Params, grid: &GridSpec) -> Result<LpOracleResult, OracleError> {
    lp_oracle_with(params, grid, LpOptions::default())
}

pub fn lp_oracle_with(params: &Params, grid: &GridSpec, opts: LpOptions) -> Result<LpOracleResult, OracleError> {
    if grid.n > 400 {
        return Err(OracleError::GridTooLarge(grid.n));
    }
    params.validate()?;
    let ts = grid.points(params);
    let k = ts.len();
    let mu0 = params.mu0;
    let vh: Vec<f64> = ts.iter().map(|&t| params.agent_value(Quality::High, t)).collect();
    let vl: Vec<f64> = ts.iter().map(|&t| params.agent_value(Quality::Low, t)).collect();
    let mut lp = LinearProgram::default();
    lp.objective = ts.iter().map(|&t| mu0 * params.principal_value(t)).collect();
    lp.objective.extend(ts.iter().map(|&t| (1.0 - mu0) * params.principal_value(t)));

    let mut ones_h = vec![0.0; 2 * k];
    let mut ones_l = vec![0.0; 2 * k];
    for i in 0..k {
        ones_h[i] = 1.0;
        ones_l[k + i] = 1.0;
    }
    lp.rows.push((ones_h, Relation::Eq, 1.0));
    lp.rows.push((ones_l, Relation::Eq, 1.0));

    // continuation at each grid time, counting only mass that stops later
    for j in 0..k {
        let mut row = vec![0.0; 2 * k];
        for i in j..k {
            row[i] = mu0 * (vh[i] - vh[j]);
            row[k + i] = (1.0 - mu0) * (vl[i] - vl[j]);
        }
        lp.rows.push((row, Relation::Ge, 0.0));
    }
    if opts.stopping_constraints {
        for (i, &t) in ts.iter().enumerate() {
            let h = params.agent_slope(Quality::High, t);
            let l = params.agent_slope(Quality::Low, t);
            if h <= 0.0 && l <= 0.0 {
                continue;
            }
            let mut row = vec![0.0; 2 * k];
            row[i] = mu0 * h;
            row[k + i] = (1.0 - mu0) * l;
            lp.rows.push((row, Relation::Le, 0.0));
        }
    }
    if opts.pin_high_before_peak {
        let peak = params.peak_time();
        for (i, &t) in ts.iter().enumerate() {
            if t < peak - 1e-12 {
                let mut row = vec![0.0; 2 * k];
                row[i] = 1.0;
                lp.rows.push((row, Relation::Le, 0.0));
            }
        }
    }
    let sol = maximize(&lp)?;
    Ok(LpOracleResult {
        value: sol.value,
        high: sol.x[..k].to_vec(),
        low: sol.x[k..].to_vec(),
        grid: ts,
        pivots: sol.pivots,
    })
}
