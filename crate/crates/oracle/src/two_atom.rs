//! Exhaustive scan over two-point policies on a time grid.

use persuasion::dynamic::{evaluate, interior_shares};
use persuasion::policy::InformationPolicy;
use persuasion::{Params, Quality};
use serde::{Deserialize, Serialize};

use crate::lp::GridSpec;
use crate::OracleError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoAtomResult {
    pub x_a: f64,
    pub x_b: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub payoff: f64,
    /// Grid spacing in `t_a` and `t_b`.
    pub cell: (f64, f64),
}

struct Cand {
    x_a: f64,
    x_b: f64,
    t_a: f64,
    t_b: f64,
    payoff: f64,
}

/// Scan `t_a` over `[t*, tau(1)]` and `t_b` over `[tau(mu0), t*]` with
/// `grid.n + 1` points each. Shares come from the binding system or from
/// the corners; every candidate is screened cheaply and the best survivors
/// go through the full obedience check.
pub fn two_atom_oracle(params: &Params, grid: &GridSpec) -> Result<TwoAtomResult, OracleError> {
    if grid.n > 400 {
        return Err(OracleError::GridTooLarge(grid.n));
    }
    params.validate()?;
    let mu0 = params.mu0;
    let n = grid.n.max(1);
    let ts = params.peak_time();
    let (a_lo, a_hi) = (ts, params.stop_time(1.0));
    let (b_lo, b_hi) = (params.stop_time(mu0).min(ts), ts);
    let v0 = params.reservation_value();
    let mut cands: Vec<Cand> = Vec::new();
    // no disclosure is always admissible
    let t0 = params.stop_time(mu0);
    cands.push(Cand { x_a: 1.0, x_b: 0.0, t_a: t0, t_b: t0.min(ts), payoff: evaluate(params, 1.0, 0.0, t0, t0.min(ts)).0 });
    for i in 0..=n {
        let t_a = a_lo + (a_hi - a_lo) * i as f64 / n as f64;
        let h = params.agent_slope(Quality::High, t_a);
        let l = params.agent_slope(Quality::Low, t_a);
        for j in 0..=n {
            let t_b = b_lo + (b_hi - b_lo) * j as f64 / n as f64;
            let mut shares = vec![(0.0, 1.0)];
            if let Ok(s) = interior_shares(params, t_a, t_b) {
                shares.push(s);
            }
            if l < 0.0 && h > 0.0 {
                shares.push((1.0, 1.0 + mu0 * h / ((1.0 - mu0) * l)));
                shares.push((-(1.0 - mu0) / mu0 * l / h, 0.0));
            }
            for (x_a, x_b) in shares {
                if !(0.0..=1.0).contains(&x_a) || !(0.0..=1.0).contains(&x_b) {
                    continue;
                }
                let (w, v) = evaluate(params, x_a, x_b, t_a, t_b);
                if v < v0 - 1e-12 {
                    continue;
                }
                let e = (mu0 * x_a * h + (1.0 - mu0) * (1.0 - x_b) * l) / (h - l);
                if e > 1e-9 {
                    continue;
                }
                cands.push(Cand { x_a, x_b, t_a, t_b, payoff: w });
            }
        }
    }
    cands.sort_by(|a, b| b.payoff.total_cmp(&a.payoff));
    for c in cands {
        let Ok(p) = InformationPolicy::two_point(params, c.x_a, c.x_b, c.t_a, c.t_b) else { continue };
        if p.check(params, 256).holds(1e-9, 1e-9) {
            return Ok(TwoAtomResult {
                x_a: c.x_a,
                x_b: c.x_b,
                t_a: c.t_a,
                t_b: c.t_b,
                payoff: c.payoff,
                cell: ((a_hi - a_lo) / n as f64, (b_hi - b_lo) / n as f64),
            });
        }
    }
    Err(OracleError::Infeasible)
}
