//! Optimal commitment policy when both parties discount at the same rate.
//!
//! The optimum has at most two stopping times before the high type's own
//! stopping time: an early "accelerator" `t_b <= t*` that releases some low
//! types, and a "brake" `t_a >= t*` where the remaining low types stop
//! together with a share of high types. Four regimes cover the prior range;
//! the solver builds each candidate, keeps the feasible ones and returns the
//! best.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{last_nonnegative, nelder_mead, scan_max};
use crate::params::Quality;
use crate::policy::{ConstraintReport, InformationPolicy};
use crate::statics::concavify_bounds;
use crate::Params;

const SHARE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// Prior at or above the alignment belief: only the time-zero signal.
    Static,
    /// Both shares strictly inside (0, 1).
    Interior,
    /// Every low type is released at `t_b`.
    FullBadNews,
    /// Every high type is held back to `t_a`.
    BrakeOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoPointPolicy {
    pub x_a: f64,
    pub x_b: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub regime: Regime,
    pub payoff: f64,
    pub agent_value: f64,
    /// Agent value minus the no-information value at the prior.
    pub participation_slack: f64,
    pub report: Option<ConstraintReport>,
}

/// Equivalent milestone contract: reaching `t*` is rewarded by continuing
/// with probability `pi_high`/`pi_low` and a promised continuation value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MilestoneCommitment {
    pub pi_high: f64,
    pub pi_low: f64,
    pub promised_value: f64,
}

impl TwoPointPolicy {
    fn build(params: &Params, x_a: f64, x_b: f64, t_a: f64, t_b: f64, regime: Regime) -> Self {
        let (payoff, agent_value) = evaluate(params, x_a, x_b, t_a, t_b);
        TwoPointPolicy {
            x_a,
            x_b,
            t_a,
            t_b,
            regime,
            payoff,
            agent_value,
            participation_slack: agent_value - params.reservation_value(),
            report: None,
        }
    }

    pub fn policy(&self, params: &Params) -> Result<InformationPolicy> {
        InformationPolicy::two_point(params, self.x_a, self.x_b, self.t_a, self.t_b)
    }

    pub fn commitment(&self, params: &Params) -> MilestoneCommitment {
        let mu0 = params.mu0;
        let released = if self.t_b < params.peak_time() { self.x_b } else { 0.0 };
        let pi_low = 1.0 - released;
        let t1 = params.stop_time(1.0);
        let high = self.x_a * params.agent_value(Quality::High, self.t_a)
            + (1.0 - self.x_a) * params.agent_value(Quality::High, t1);
        let low_mass = (1.0 - mu0) * pi_low;
        let low = if self.t_b < params.peak_time() {
            (1.0 - self.x_b) * params.agent_value(Quality::Low, self.t_a)
        } else {
            self.x_b * params.agent_value(Quality::Low, self.t_b)
                + (1.0 - self.x_b) * params.agent_value(Quality::Low, self.t_a)
        };
        MilestoneCommitment {
            pi_high: 1.0,
            pi_low,
            promised_value: (mu0 * high + (1.0 - mu0) * low) / (mu0 + low_mass),
        }
    }
}

/// Principal and agent time-zero values of a two-point policy.
pub fn evaluate(params: &Params, x_a: f64, x_b: f64, t_a: f64, t_b: f64) -> (f64, f64) {
    let mu0 = params.mu0;
    let t1 = params.stop_time(1.0);
    let w = |t| params.principal_value(t);
    let vh = |t| params.agent_value(Quality::High, t);
    let vl = |t| params.agent_value(Quality::Low, t);
    let principal = mu0 * (x_a * w(t_a) + (1.0 - x_a) * w(t1))
        + (1.0 - mu0) * (x_b * w(t_b) + (1.0 - x_b) * w(t_a));
    let agent = mu0 * (x_a * vh(t_a) + (1.0 - x_a) * vh(t1))
        + (1.0 - mu0) * (x_b * vl(t_b) + (1.0 - x_b) * vl(t_a));
    (principal, agent)
}

/// Residual of the brake indifference condition: zero when the agent told
/// to stop at `t_a` is exactly at its stopping threshold.
pub fn brake_residual(params: &Params, x_a: f64, x_b: f64, t_a: f64) -> f64 {
    let mu0 = params.mu0;
    x_a + (1.0 - mu0) / mu0 * params.agent_slope(Quality::Low, t_a)
        / params.agent_slope(Quality::High, t_a)
        * (1.0 - x_b)
}

/// Shares making both the brake indifference and participation bind at
/// `(t_a, t_b)`. Linear in the unconditional masses.
pub fn interior_shares(params: &Params, t_a: f64, t_b: f64) -> Result<(f64, f64)> {
    let mu0 = params.mu0;
    let a = 1.0 - mu0;
    let v0 = params.reservation_value();
    let v1 = params.agent_value(Quality::High, params.stop_time(1.0));
    let h = params.agent_slope(Quality::High, t_a);
    let l = params.agent_slope(Quality::Low, t_a);
    let vha = params.agent_value(Quality::High, t_a);
    let vla = params.agent_value(Quality::Low, t_a);
    let vlb = params.agent_value(Quality::Low, t_b);
    let det = h * (vlb - vla) + l * (vha - v1);
    if det.abs() < 1e-14 {
        return Err(Error::Domain(format!("singular share system at ({t_a}, {t_b})")));
    }
    let d = v0 - mu0 * v1 - a * vla;
    let big_xa = l * (v0 - mu0 * v1 - a * vlb) / det;
    let big_xb = (h * d + a * l * (vha - v1)) / det;
    Ok((big_xa / mu0, big_xb / a))
}

fn in_unit(x: f64) -> bool {
    (-SHARE_TOL..=1.0 + SHARE_TOL).contains(&x)
}

fn interior_objective(params: &Params, t_a: f64, t_b: f64) -> Option<(f64, f64, f64)> {
    let (xa, xb) = interior_shares(params, t_a, t_b).ok()?;
    if !(-0.5..=1.5).contains(&xa) || !(-0.5..=1.5).contains(&xb) {
        return None;
    }
    Some((evaluate(params, xa, xb, t_a, t_b).0, xa, xb))
}

fn newton_polish(params: &Params, mut x: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> [f64; 2] {
    let f = |a: f64, b: f64| interior_objective(params, a, b).map(|v| v.0);
    let h = 1e-5;
    for _ in 0..30 {
        let (a, b) = (x[0], x[1]);
        let (Some(f0), Some(fa1), Some(fa0), Some(fb1), Some(fb0)) =
            (f(a, b), f(a + h, b), f(a - h, b), f(a, b + h), f(a, b - h))
        else {
            break;
        };
        let (Some(fpp), Some(fpm), Some(fmp), Some(fmm)) =
            (f(a + h, b + h), f(a + h, b - h), f(a - h, b + h), f(a - h, b - h))
        else {
            break;
        };
        let ga = (fa1 - fa0) / (2.0 * h);
        let gb = (fb1 - fb0) / (2.0 * h);
        let haa = (fa1 - 2.0 * f0 + fa0) / (h * h);
        let hbb = (fb1 - 2.0 * f0 + fb0) / (h * h);
        let hab = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
        let det = haa * hbb - hab * hab;
        // only trust Newton at a local maximum
        if !(haa < 0.0 && det > 0.0) {
            break;
        }
        let da = -(hbb * ga - hab * gb) / det;
        let db = -(haa * gb - hab * ga) / det;
        let na = (a + da).clamp(lo[0], hi[0]);
        let nb = (b + db).clamp(lo[1], hi[1]);
        match f(na, nb) {
            Some(v) if v >= f0 - 1e-13 => x = [na, nb],
            _ => break,
        }
        if da.abs() + db.abs() < 1e-12 {
            break;
        }
    }
    x
}

/// Interior-regime candidate. Fails with `RegimeMismatch` when the best
/// stationary point has a share outside `[0, 1]`.
pub fn solve_interior(params: &Params) -> Result<TwoPointPolicy> {
    let (t_a, t_b) = interior_times(params)?;
    let (xa, xb) = interior_shares(params, t_a, t_b)?;
    if !(in_unit(xa) && in_unit(xb)) {
        return Err(Error::RegimeMismatch(format!("interior shares ({xa}, {xb})")));
    }
    Ok(TwoPointPolicy::build(params, xa.clamp(0.0, 1.0), xb.clamp(0.0, 1.0), t_a, t_b, Regime::Interior))
}

/// Maximiser of the interior objective over the admissible box, with the
/// shares left free in a neighbourhood of `[0, 1]`.
pub fn interior_times(params: &Params) -> Result<(f64, f64)> {
    let ts = params.peak_time();
    let lo = [ts, params.stop_time(params.mu0)];
    let hi = [params.stop_time(1.0), ts];
    if lo[1] > hi[1] {
        return Err(Error::Infeasible("prior already beyond the alignment belief".into()));
    }
    let mut starts = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            starts.push([
                lo[0] + (hi[0] - lo[0]) * i as f64 / 4.0,
                lo[1] + (hi[1] - lo[1]) * j as f64 / 4.0,
            ]);
        }
    }
    // best admissible point of a coarse grid as an extra start
    let n = 24;
    let mut coarse: Option<([f64; 2], f64)> = None;
    for i in 0..=n {
        for j in 0..=n {
            let a = lo[0] + (hi[0] - lo[0]) * i as f64 / n as f64;
            let b = lo[1] + (hi[1] - lo[1]) * j as f64 / n as f64;
            if let Some((v, xa, xb)) = interior_objective(params, a, b) {
                if in_unit(xa) && in_unit(xb) && coarse.map_or(true, |c| v > c.1) {
                    coarse = Some(([a, b], v));
                }
            }
        }
    }
    if let Some((x, _)) = coarse {
        starts.push(x);
    }
    let mut best: Option<([f64; 2], f64)> = None;
    for s in starts {
        if interior_objective(params, s[0], s[1]).is_none() {
            continue;
        }
        let (x, _) = nelder_mead(
            |x| interior_objective(params, x[0], x[1]).map_or(1e9, |v| -v.0),
            &s,
            &lo,
            &hi,
            0.05,
            1e-14,
            2000,
        );
        let x = newton_polish(params, [x[0], x[1]], lo, hi);
        if let Some((v, xa, xb)) = interior_objective(params, x[0], x[1]) {
            let better = best.map_or(true, |b| v > b.1 + 1e-13);
            if in_unit(xa) && in_unit(xb) && better {
                best = Some((x, v));
            }
        }
    }
    match best {
        Some((x, _)) => Ok((x[0], x[1])),
        None => Err(Error::RegimeMismatch("no admissible interior point".into())),
    }
}

/// Release every low type at the latest `t_b` the agent still accepts.
pub fn solve_full_bad_news(params: &Params) -> Result<TwoPointPolicy> {
    let mu0 = params.mu0;
    let t1 = params.stop_time(1.0);
    let rhs = (params.reservation_value() - mu0 * params.agent_value(Quality::High, t1)) / (1.0 - mu0);
    let t_b = last_nonnegative(
        |t| params.agent_value(Quality::Low, t) - rhs,
        params.stop_time(mu0),
        params.peak_time(),
    )
    .ok_or_else(|| Error::Infeasible("low types cannot be compensated".into()))?;
    Ok(TwoPointPolicy::build(params, 0.0, 1.0, t1, t_b, Regime::FullBadNews))
}

// latest accelerator time when the brake sits at tau(mu_b)
fn brake_accelerator(params: &Params, mu_b: f64) -> Option<f64> {
    let q = params.mu0 / mu_b;
    let rhs = (params.reservation_value() - q * params.no_info_value(0.0, mu_b)) / (1.0 - q);
    last_nonnegative(
        |t| params.agent_value(Quality::Low, t) - rhs,
        params.stop_time(params.mu0),
        params.peak_time(),
    )
}

/// Value of the brake-only policy whose brake leaves posterior `mu_b`.
pub fn brake_only_value(params: &Params, mu_b: f64) -> Option<f64> {
    let q = params.mu0 / mu_b;
    if q >= 1.0 {
        return None;
    }
    let t_b = brake_accelerator(params, mu_b)?;
    Some(q * params.principal_value(params.stop_time(mu_b)) + (1.0 - q) * params.principal_value(t_b))
}

/// Hold every high type to `t_a = tau(mu_b)` and release low types early,
/// optimising the brake posterior `mu_b`.
pub fn solve_brake_only(params: &Params) -> Result<TwoPointPolicy> {
    let mu0 = params.mu0;
    let lo = params.alignment_belief()?.max(mu0) + 1e-12;
    let (mu_b, v) = scan_max(|m| brake_only_value(params, m).unwrap_or(f64::NEG_INFINITY), lo, 1.0, 200, 1e-13);
    if !v.is_finite() {
        return Err(Error::Infeasible("no admissible brake posterior".into()));
    }
    // a brake that reveals the high type fully releases every low type
    // early, which is the full-bad-news policy
    if 1.0 - mu_b < 1e-6 {
        return Err(Error::RegimeMismatch("brake posterior at one".into()));
    }
    let t_b = brake_accelerator(params, mu_b).expect("checked by the scan");
    let x_b = 1.0 - mu0 / (1.0 - mu0) * (1.0 - mu_b) / mu_b;
    Ok(TwoPointPolicy::build(params, 1.0, x_b, params.stop_time(mu_b), t_b, Regime::BrakeOnly))
}

/// Static optimum written as a two-point policy. Only meaningful at or
/// above the alignment belief.
pub fn solve_static(params: &Params) -> Result<TwoPointPolicy> {
    let mu0 = params.mu0;
    let ts = params.peak_time();
    let b = concavify_bounds(params)?;
    if mu0 <= b.mu_h {
        return Ok(TwoPointPolicy::build(params, 1.0, 0.0, params.stop_time(mu0), ts, Regime::Static));
    }
    let x_a = b.mu_h * (1.0 - mu0) / (mu0 * (1.0 - b.mu_h));
    Ok(TwoPointPolicy::build(params, x_a, 0.0, params.stop_time(b.mu_h), ts, Regime::Static))
}

/// Best feasible two-point policy without requiring equal discount rates.
pub fn best_two_point(params: &Params) -> Result<TwoPointPolicy> {
    params.validate()?;
    let mu_star = params.alignment_belief()?;
    let mut chosen = if params.mu0 >= mu_star {
        solve_static(params)?
    } else {
        let cands: Vec<TwoPointPolicy> = [
            solve_full_bad_news(params),
            solve_interior(params),
            solve_brake_only(params),
        ]
        .into_iter()
        .filter_map(|c| c.ok())
        .filter(|c| c.participation_slack >= -1e-8)
        .collect();
        let mut best: Option<TwoPointPolicy> = None;
        for c in cands {
            best = match best {
                None => Some(c),
                Some(b) if c.payoff > b.payoff + 1e-12 => Some(c),
                Some(b) if (c.payoff - b.payoff).abs() <= 1e-12 && c.t_b < b.t_b => Some(c),
                keep => keep,
            };
        }
        best.ok_or_else(|| Error::Infeasible("no regime candidate is feasible".into()))?
    };
    let report = chosen.policy(params)?.check(params, 512);
    if !report.holds(1e-8, 1e-9) {
        return Err(Error::Tolerance(format!(
            "{:?} candidate fails obedience: continuation {:.3e}, stopping {:.3e}",
            chosen.regime, report.continuation_min_slack, report.stopping_max_violation
        )));
    }
    chosen.report = Some(report);
    Ok(chosen)
}

/// Optimal commitment policy. Requires `r_A == r_P`.
pub fn solve_dynamic(params: &Params) -> Result<TwoPointPolicy> {
    if !params.equal_rates() {
        return Err(Error::UnequalRates { r_a: params.r_a, r_p: params.r_p });
    }
    best_two_point(params)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeThresholds {
    /// Below: full bad news. Above: interior.
    pub mu_l: f64,
    /// Above: brake only.
    pub mu_h: f64,
    pub t_a: f64,
    pub t_b: f64,
}

/// Prior cutoffs between the regimes below the alignment belief.
///
/// The interior stopping times do not depend on the prior, so the cutoffs
/// are where the interior shares reach one along the prior with the times
/// held fixed.
pub fn regime_thresholds(params: &Params) -> Result<RegimeThresholds> {
    if !params.equal_rates() {
        return Err(Error::UnequalRates { r_a: params.r_a, r_p: params.r_p });
    }
    params.validate()?;
    let mu_star = params.alignment_belief()?;
    let mu_bar0 = crate::statics::shape_thresholds(params)?.mu_bar0;
    let found = (1..40).find_map(|k| {
        let m = mu_bar0 + (mu_star - mu_bar0) * k as f64 / 40.0;
        let p = params.with_prior(m);
        solve_interior(&p).ok().map(|s| (m, s))
    });
    let (m_in, sol) = found.ok_or_else(|| Error::Infeasible("interior regime is empty".into()))?;
    let (t_a, t_b) = (sol.t_a, sol.t_b);
    let share = |m: f64, high: bool| {
        let (xa, xb) = interior_shares(&params.with_prior(m), t_a, t_b).unwrap_or((f64::NAN, f64::NAN));
        if high { xa - 1.0 } else { xb - 1.0 }
    };
    let mu_l = crate::numerics::bisect(|m| share(m, false), mu_bar0 + 1e-9, m_in, 1e-13, 200)?;
    let mu_h = crate::numerics::bisect(|m| share(m, true), m_in, mu_star - 1e-12, 1e-13, 200)?;
    Ok(RegimeThresholds { mu_l, mu_h, t_a, t_b })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub mu0: f64,
    pub regime: Option<Regime>,
    pub payoff: f64,
    pub x_a: f64,
    pub x_b: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub no_info: f64,
    pub error: Option<String>,
}

/// Solve over a grid of priors in parallel. Row order follows `priors`.
pub fn comparative_sweep(params: &Params, priors: &[f64]) -> Vec<SweepRow> {
    priors
        .par_iter()
        .map(|&m| {
            let p = params.with_prior(m);
            let no_info = crate::statics::no_info_principal(&p, m);
            match solve_dynamic(&p) {
                Ok(s) => SweepRow {
                    mu0: m,
                    regime: Some(s.regime),
                    payoff: s.payoff,
                    x_a: s.x_a,
                    x_b: s.x_b,
                    t_a: s.t_a,
                    t_b: s.t_b,
                    no_info,
                    error: None,
                },
                Err(e) => SweepRow {
                    mu0: m,
                    regime: None,
                    payoff: f64::NAN,
                    x_a: f64::NAN,
                    x_b: f64::NAN,
                    t_a: f64::NAN,
                    t_b: f64::NAN,
                    no_info,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("mu0,regime,payoff,x_a,x_b,t_a,t_b,no_info\n");
    for r in rows {
        let regime = r.regime.map_or("error".to_string(), |g| format!("{g:?}"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.mu0, regime, r.payoff, r.x_a, r.x_b, r.t_a, r.t_b, r.no_info
        ));
    }
    out
}
