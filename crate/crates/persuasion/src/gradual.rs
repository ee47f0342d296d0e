//! Unequal discounting. Where the principal is less risk averse over
//! stopping times than the low type, the optimal accelerator can spread
//! low-type stops over an interval instead of using a single atom.

use serde::{Deserialize, Serialize};

use crate::dynamic::{best_two_point, TwoPointPolicy};
use crate::error::{Error, Result};
use crate::model::Party;
use crate::numerics::{adaptive_simpson, bisect, last_nonnegative, scan_max};
use crate::params::Quality;
use crate::policy::{ConstraintReport, Density, InformationPolicy, Segment, StoppingCdf};
use crate::Params;

/// `R(v_L, t) - R(w, t)`. Positive where gradual release can pay.
pub fn risk_gap(params: &Params, t: f64) -> Result<f64> {
    Ok(params.arrow_pratt(Party::AgentLow, t)? - params.arrow_pratt(Party::Principal, t)?)
}

/// `(t, gap)` on `n` points of `[tau(mu0), t*)`.
pub fn risk_dominance_scan(params: &Params, n: usize) -> Vec<(f64, f64)> {
    let (lo, hi) = (params.stop_time(params.mu0), params.peak_time());
    (0..n)
        .filter_map(|i| {
            let t = lo + (hi - lo) * i as f64 / n as f64;
            risk_gap(params, t).ok().map(|g| (t, g))
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradualInterval {
    pub start: f64,
    pub end: f64,
    pub nonempty: bool,
}

impl GradualInterval {
    pub fn contains(&self, t: f64) -> bool {
        self.nonempty && t >= self.start && t <= self.end
    }
}

/// Part of `[tau(mu0), t*)` where the low type is the more risk averse
/// party. Assumes the set is an interval, which holds because the
/// principal's coefficient blows up at `t*`.
pub fn gradual_interval(params: &Params) -> GradualInterval {
    let scan = risk_dominance_scan(params, 1024);
    let first = scan.iter().position(|p| p.1 > 0.0);
    let last = scan.iter().rposition(|p| p.1 > 0.0);
    let (Some(i), Some(j)) = (first, last) else {
        let t = params.stop_time(params.mu0);
        return GradualInterval { start: t, end: t, nonempty: false };
    };
    let gap = |t: f64| risk_gap(params, t).unwrap_or(f64::NEG_INFINITY);
    let start = if i == 0 {
        scan[0].0
    } else {
        bisect(gap, scan[i - 1].0, scan[i].0, 1e-13, 200).unwrap_or(scan[i].0)
    };
    let end = if j + 1 < scan.len() {
        bisect(gap, scan[j].0, scan[j + 1].0, 1e-13, 200).unwrap_or(scan[j].0)
    } else {
        let hi = params.peak_time() * (1.0 - 1e-9);
        if gap(hi) > 0.0 { hi } else { bisect(gap, scan[j].0, hi, 1e-13, 200).unwrap_or(scan[j].0) }
    };
    GradualInterval { start, end, nonempty: end > start }
}

/// Low-type cdf that keeps the agent indifferent to stopping.
pub fn fl_star(params: &Params, t: f64) -> f64 {
    params.indifference_cdf(params.mu0, t)
}

/// Low-type release schedule before the peak: an atom, a gradual span
/// along [`fl_star`], and a second atom.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridAccelerator {
    pub s1: f64,
    pub mass1: f64,
    pub span_start: f64,
    pub span_end: f64,
    pub s2: f64,
    pub mass2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HybridSolution {
    pub accelerator: HybridAccelerator,
    /// High-type share stopped at the brake time.
    pub x_a: f64,
    pub t_a: f64,
    pub payoff: f64,
    /// Best policy with single-atom accelerator, for comparison.
    pub two_point_payoff: f64,
    pub interval: GradualInterval,
    /// The part after the gradual span is solved as a two-point problem.
    /// Optimality of that shape is taken as given here.
    pub brake_structure_assumed: bool,
    pub policy: InformationPolicy,
    pub report: ConstraintReport,
}

struct Tail {
    mass: f64,
    sol: TwoPointPolicy,
}

// once the span ends at s, the survivors face a two-point problem at the
// threshold belief of s
fn tail(params: &Params, s: f64) -> Option<Tail> {
    let nu = params.threshold_belief(s).ok()?;
    let f = fl_star(params, s).max(0.0);
    let mass = params.mu0 + (1.0 - params.mu0) * (1.0 - f);
    let sol = best_tail(&params.with_prior(nu)).ok()?;
    Some(Tail { mass, sol })
}

fn best_tail(p: &Params) -> Result<TwoPointPolicy> {
    let mut out = best_two_point(p)?;
    out.report = None;
    Ok(out)
}

// latest first atom that keeps the agent willing to start
fn first_atom(params: &Params, s_lo: f64) -> f64 {
    let mu0 = params.mu0;
    let f_lo = fl_star(params, s_lo).max(0.0);
    if f_lo <= 0.0 {
        return s_lo;
    }
    let g = mu0 * params.agent_value(Quality::High, s_lo)
        + (1.0 - mu0) * (1.0 - f_lo) * params.agent_value(Quality::Low, s_lo);
    let v0 = params.reservation_value();
    last_nonnegative(
        |s| (1.0 - mu0) * f_lo * params.agent_value(Quality::Low, s) + g - v0,
        params.stop_time(mu0),
        s_lo,
    )
    .unwrap_or(params.stop_time(mu0))
}

// principal value of the part before the tail
fn head_value(params: &Params, s_lo: f64, s_hi: f64) -> f64 {
    let mu0 = params.mu0;
    let f_lo = fl_star(params, s_lo).max(0.0);
    let atom = f_lo * params.principal_value(first_atom(params, s_lo));
    let span = adaptive_simpson(
        |s| params.principal_value(s) * params.indifference_density(mu0, s),
        s_lo,
        s_hi,
        1e-12,
    );
    (1.0 - mu0) * (atom + span)
}

fn best_head(params: &Params, lo: f64, s_hi: f64) -> (f64, f64) {
    if s_hi <= lo {
        return (lo, head_value(params, lo, lo));
    }
    scan_max(|s| head_value(params, s, s_hi), lo, s_hi, 24, 1e-10)
}

fn assemble(params: &Params, s_lo: f64, s_hi: f64, t: &TwoPointPolicy) -> (HybridAccelerator, InformationPolicy) {
    let mu0 = params.mu0;
    let f_lo = fl_star(params, s_lo).max(0.0);
    let f_hi = fl_star(params, s_hi).max(0.0);
    let s1 = first_atom(params, s_lo);
    let rest = 1.0 - f_hi;
    let mut low = StoppingCdf::from_atoms(vec![
        (s1, f_lo),
        (t.t_b, rest * t.x_b),
        (t.t_a, rest * (1.0 - t.x_b)),
    ]);
    if s_hi > s_lo {
        low.segments.push(Segment { start: s_lo, end: s_hi, density: Density::Indifference { mu0 } });
    }
    let high = StoppingCdf::from_atoms(vec![(t.t_a, t.x_a), (params.stop_time(1.0), 1.0 - t.x_a)]);
    let acc = HybridAccelerator {
        s1,
        mass1: f_lo,
        span_start: s_lo,
        span_end: s_hi,
        s2: t.t_b,
        mass2: rest * t.x_b,
    };
    (acc, InformationPolicy { high, low })
}

/// Best policy with a hybrid accelerator. Falls back to the two-point
/// policy when the gradual interval is empty or does not help.
pub fn solve_hybrid(params: &Params) -> Result<HybridSolution> {
    params.validate()?;
    if params.mu0 >= params.alignment_belief()? {
        return Err(Error::Domain("prior at or above the alignment belief".into()));
    }
    let interval = gradual_interval(params);
    let base = best_tail(params)?;
    let mut best = (base.payoff, params.stop_time(params.mu0), params.stop_time(params.mu0), base.clone());
    if interval.nonempty {
        let (lo, hi) = (interval.start, interval.end);
        let total = |s_hi: f64| -> f64 {
            let Some(t) = tail(params, s_hi) else { return f64::NEG_INFINITY };
            best_head(params, lo, s_hi).1 + t.mass * t.sol.payoff
        };
        let (s_hi, v) = scan_max(total, lo, hi, 48, 1e-9);
        if v > best.0 {
            let t = tail(params, s_hi).expect("evaluated during the scan");
            let (s_lo, _) = best_head(params, lo, s_hi);
            best = (v, s_lo, s_hi, t.sol);
        }
    }
    let (_, s_lo, s_hi, t) = best;
    let (acc, policy) = assemble(params, s_lo, s_hi, &t);
    policy.validate(params)?;
    let payoff = policy.principal_value(params);
    let report = policy.check(params, 512);
    if !report.holds(1e-8, 1e-9) {
        return Err(Error::Tolerance(format!(
            "hybrid policy fails obedience: continuation {:.3e}, stopping {:.3e}",
            report.continuation_min_slack, report.stopping_max_violation
        )));
    }
    Ok(HybridSolution {
        accelerator: acc,
        x_a: t.x_a,
        t_a: t.t_a,
        payoff,
        two_point_payoff: base.payoff,
        interval,
        brake_structure_assumed: true,
        policy,
        report,
    })
}
