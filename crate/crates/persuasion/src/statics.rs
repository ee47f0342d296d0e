//! One-shot disclosure at time zero: the principal's value of no further
//! information as a function of the agent's belief, and its concave
//! envelope.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect, concave_envelope};
use crate::Params;

/// Principal's payoff when the agent stops at its preferred time under
/// belief `mu`.
pub fn no_info_principal(params: &Params, mu: f64) -> f64 {
    params.principal_value(params.stop_time(mu))
}

/// Derivative of [`no_info_principal`] in `mu`. Zero where the agent quits
/// at once.
pub fn no_info_principal_slope(params: &Params, mu: f64) -> f64 {
    if params.stop_time(mu) <= 0.0 {
        return 0.0;
    }
    let y = params.mean_payoff(mu);
    let dtau = (params.y_h - params.y_l) / (params.lambda * y - (params.lambda + params.r_a) * params.z);
    params.principal_slope(params.stop_time(mu)) * dtau
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeThresholds {
    /// Below this belief the agent quits immediately.
    pub mu_bar0: f64,
    /// Belief at which the agent's and principal's stopping times coincide.
    pub mu_star: f64,
    /// Where the no-information value turns from concave to convex.
    pub mu2: f64,
    /// True if the peak sits at time zero so the shape is degenerate.
    pub degenerate: bool,
}

pub fn shape_thresholds(params: &Params) -> Result<ShapeThresholds> {
    let (l, r_a) = (params.lambda, params.r_a);
    let y0 = (1.0 + r_a / (params.p0 * l)) * params.z;
    let mu_bar0 = ((y0 - params.y_l) / (params.y_h - params.y_l)).clamp(0.0, 1.0);
    let mu_star = params.alignment_belief()?;
    let mu2 = if params.equal_rates() {
        let r = params.r_p;
        let y2 = params.z / params.big_z * ((2.0 * l + r) * params.big_y - (l + r) * params.big_z) / (l + r);
        ((y2 - params.y_l) / (params.y_h - params.y_l)).clamp(0.0, 1.0)
    } else {
        numeric_inflection(params, mu_star)
    };
    Ok(ShapeThresholds { mu_bar0, mu_star, mu2, degenerate: params.peak_time() <= 0.0 })
}

// first sign change of the second derivative above mu_star
fn numeric_inflection(params: &Params, mu_star: f64) -> f64 {
    let h = 1e-5;
    let d2 = |m: f64| no_info_principal_slope(params, m + h) - no_info_principal_slope(params, m - h);
    let n = 400;
    let lo = mu_star + 1e-6;
    let hi = 1.0 - 2.0 * h;
    let mut prev = lo;
    for i in 1..=n {
        let m = lo + (hi - lo) * i as f64 / n as f64;
        if d2(prev) < 0.0 && d2(m) >= 0.0 {
            return bisect(d2, prev, m, 1e-10, 200).unwrap_or(m);
        }
        prev = m;
    }
    1.0
}

/// Beliefs where the concave envelope of the no-information value leaves
/// its graph.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcavifyBounds {
    pub mu_l: f64,
    pub mu_h: f64,
    /// Set when no right tangency exists, so beliefs above `mu_h = 1` never
    /// benefit from disclosure.
    pub mu_h_is_one: bool,
}

pub fn concavify_bounds(params: &Params) -> Result<ConcavifyBounds> {
    let th = shape_thresholds(params)?;
    let w = |m: f64| no_info_principal(params, m);
    let dw = |m: f64| no_info_principal_slope(params, m);
    let (w0, w1) = (w(0.0), w(1.0));

    let left = |m: f64| (w(m) - w0) / m - dw(m);
    let lo = th.mu_bar0 + 1e-12;
    let mu_l = if th.mu_star <= lo || left(lo.max(1e-12)) >= 0.0 {
        0.0
    } else {
        bisect(left, lo, th.mu_star, 1e-13, 200)?
    };

    let right = |m: f64| (w1 - w(m)) / (1.0 - m) - dw(m);
    let top = th.mu2.min(1.0 - 1e-9);
    let (mu_h, is_one) = if top <= th.mu_star || right(top) <= 0.0 {
        (1.0, true)
    } else {
        (bisect(right, th.mu_star, top, 1e-13, 200)?, false)
    };
    Ok(ConcavifyBounds { mu_l, mu_h, mu_h_is_one: is_one })
}

/// Optimal time-zero signal: at most two posteriors with their weights.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticSignal {
    pub posteriors: Vec<f64>,
    pub weights: Vec<f64>,
    pub value: f64,
}

pub fn optimal_static_signal(params: &Params) -> Result<StaticSignal> {
    let b = concavify_bounds(params)?;
    let mu0 = params.mu0;
    let split = |lo: f64, hi: f64| {
        let wl = (hi - mu0) / (hi - lo);
        let value = wl * no_info_principal(params, lo) + (1.0 - wl) * no_info_principal(params, hi);
        StaticSignal { posteriors: vec![lo, hi], weights: vec![wl, 1.0 - wl], value }
    };
    Ok(if mu0 < b.mu_l {
        split(0.0, b.mu_l)
    } else if mu0 > b.mu_h {
        split(b.mu_h, 1.0)
    } else {
        StaticSignal {
            posteriors: vec![mu0],
            weights: vec![1.0],
            value: no_info_principal(params, mu0),
        }
    })
}

/// Concave envelope of the no-information value at belief `mu`.
pub fn concavified_value(params: &Params, mu: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::Domain(format!("belief {mu} outside [0, 1]")));
    }
    optimal_static_signal(&params.with_prior(mu)).map(|s| s.value)
}

pub fn persuasion_gain(params: &Params, mu: f64) -> Result<f64> {
    Ok(concavified_value(params, mu)? - no_info_principal(params, mu))
}

/// Envelope computed from samples instead of tangency conditions. Useful as
/// a cross-check.
pub fn sampled_envelope(params: &Params, n: usize) -> (Vec<f64>, Vec<f64>) {
    let xs: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let ys: Vec<f64> = xs.iter().map(|&m| no_info_principal(params, m)).collect();
    let env = concave_envelope(&xs, &ys);
    (xs, env)
}

/// `mu, W_NI, envelope` rows for plotting.
pub fn value_curve_csv(params: &Params, n: usize) -> Result<String> {
    let mut out = String::from("mu,no_info,concavified\n");
    for i in 0..=n {
        let m = i as f64 / n as f64;
        out.push_str(&format!("{m},{},{}\n", no_info_principal(params, m), concavified_value(params, m)?));
    }
    Ok(out)
}
