//! Equilibrium without commitment. The principal releases the high type
//! only at its own preferred time and feeds low-type stops at the rate
//! that keeps the agent indifferent in between.

use serde::{Deserialize, Serialize};

use crate::dynamic::{solve_dynamic, solve_static};
use crate::error::Result;
use crate::policy::{Density, InformationPolicy, Segment, StoppingCdf};
use crate::Params;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpeSolution {
    pub policy: InformationPolicy,
    pub payoff: f64,
    /// Prior at or above the alignment belief: the static optimum is
    /// already an equilibrium.
    pub is_static: bool,
}

pub fn mpe_policy(params: &Params) -> Result<MpeSolution> {
    params.validate()?;
    if params.mu0 >= params.alignment_belief()? {
        let s = solve_static(params)?;
        let policy = s.policy(params)?;
        return Ok(MpeSolution { payoff: policy.principal_value(params), policy, is_static: true });
    }
    let mu0 = params.mu0;
    let t0 = params.stop_time(mu0);
    let ts = params.peak_time();
    let f0 = params.indifference_cdf(mu0, t0).max(0.0);
    let f_end = params.indifference_cdf(mu0, ts);
    let mut low = StoppingCdf::from_atoms(vec![(t0, f0), (ts, 1.0 - f_end)]);
    low.segments.push(Segment { start: t0, end: ts, density: Density::Indifference { mu0 } });
    let policy = InformationPolicy { high: StoppingCdf::atom(ts), low };
    policy.validate(params)?;
    Ok(MpeSolution { payoff: policy.principal_value(params), policy, is_static: false })
}

/// Value of commitment: optimal commitment payoff minus equilibrium payoff.
pub fn commitment_gap(params: &Params) -> Result<f64> {
    Ok(solve_dynamic(params)?.payoff - mpe_policy(params)?.payoff)
}
