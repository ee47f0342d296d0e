//! Continuum of quality states on a grid.
//!
//! Before the peak the lowest states are released on a schedule that blends
//! the principal's and each state's preferred time with weight `kappa`.
//! After the peak the top states learn their quality and stop at their own
//! time, and a middle pool stops together. `kappa` makes the agent exactly
//! indifferent at the prior's stopping time.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{bisect, nelder_mead};
use crate::Params;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDistribution {
    /// Quality index, strictly increasing.
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
    /// Agent's breakthrough payoff at each grid point, increasing.
    pub payoff_map: Vec<f64>,
}

impl StateDistribution {
    /// Uniform weights on `n` points of `[0, 1]` with payoffs spanning
    /// `[y_L, y_H]`.
    pub fn uniform(params: &Params, n: usize) -> Self {
        let n = n.max(2);
        let grid: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let payoff_map = grid.iter().map(|&t| params.y_l + t * (params.y_h - params.y_l)).collect();
        StateDistribution { grid, weights: vec![1.0 / n as f64; n], payoff_map }
    }

    /// All mass on the two end points, mirroring the binary model.
    pub fn two_atom(params: &Params, n: usize) -> Self {
        let mut d = Self::uniform(params, n);
        let k = d.weights.len();
        d.weights.iter_mut().for_each(|w| *w = 0.0);
        d.weights[0] = 1.0 - params.mu0;
        d.weights[k - 1] = params.mu0;
        d
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        let n = self.grid.len();
        if n < 2 || self.weights.len() != n || self.payoff_map.len() != n {
            return Err(Error::InvalidParams("grid, weights and payoff_map need equal length >= 2".into()));
        }
        if self.grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParams("grid must be strictly increasing".into()));
        }
        if self.payoff_map.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidParams("payoff_map must be increasing".into()));
        }
        if self.weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParams("negative weight".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParams(format!("weights sum to {total}")));
        }
        let star = params.z * params.big_y / params.big_z;
        if !(self.payoff_map[0] < star && star < self.payoff_map[n - 1]) {
            return Err(Error::AssumptionViolated("peak payoff zY/Z not inside the payoff range".into()));
        }
        Ok(())
    }

    pub fn mean_payoff(&self) -> f64 {
        self.weights.iter().zip(&self.payoff_map).map(|(w, y)| w * y).sum()
    }

    /// Quality index whose payoff is `y`, by linear interpolation.
    pub fn theta_of(&self, y: f64) -> f64 {
        let ys = &self.payoff_map;
        let k = ys.partition_point(|&v| v < y).clamp(1, ys.len() - 1);
        let (y0, y1) = (ys[k - 1], ys[k]);
        let w = if y1 > y0 { ((y - y0) / (y1 - y0)).clamp(0.0, 1.0) } else { 0.0 };
        self.grid[k - 1] + w * (self.grid[k] - self.grid[k - 1])
    }
}

/// Blended stopping time before flooring. `-inf` when the log argument is
/// not positive.
pub fn t_unfloored(params: &Params, y: f64, kappa: f64) -> f64 {
    let (l, r) = (params.lambda, params.r_a);
    let num = (l * params.big_y - (l + r) * params.big_z) + kappa * (l * y - (l + r) * params.z);
    let arg = params.p0 / (1.0 - params.p0) * num / (r * (params.big_z + kappa * params.z));
    if arg <= 0.0 {
        f64::NEG_INFINITY
    } else {
        arg.ln() / l
    }
}

/// Stopping time of a pre-peak state with payoff `y`.
pub fn t_schedule(params: &Params, y: f64, kappa: f64, floor: f64) -> f64 {
    t_unfloored(params, y, kappa).max(floor)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContinuousPolicy {
    /// Stopping time per grid point.
    pub schedule: Vec<f64>,
    /// State where the blended schedule meets the floor, if `kappa > 0`.
    pub theta0: Option<f64>,
    pub theta_hat_l: f64,
    pub theta_hat_h: f64,
    pub theta_star: f64,
    pub kappa: f64,
    pub pool_stop: f64,
    pub payoff: f64,
    /// Mass released before the peak and mass told its quality after it.
    pub pre_mass: f64,
    pub top_mass: f64,
    /// Agent value minus no-information value, in time-zero units.
    pub binding_residual: f64,
    /// Pool stops less than 1e-6 after the peak.
    pub pool_margin_flag: bool,
    pub no_disclosure_payoff: f64,
    /// Every `(state, mass, time)` piece with positive mass. Boundary
    /// states can be split between two groups.
    pub stops: Vec<StopPart>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StopPart {
    pub state: usize,
    pub mass: f64,
    pub time: f64,
}

struct Split {
    pre: Vec<f64>,
    top: Vec<f64>,
    pool_mass: f64,
    pool_y: f64,
}

fn split(g: &StateDistribution, q_low: f64, q_high: f64) -> Split {
    let n = g.weights.len();
    let mut pre = vec![0.0; n];
    let mut top = vec![0.0; n];
    let mut left = q_low;
    for i in 0..n {
        let take = left.min(g.weights[i]);
        pre[i] = take;
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    let mut left = q_high;
    for i in (0..n).rev() {
        let take = left.min(g.weights[i] - pre[i]);
        top[i] = take;
        left -= take;
        if left <= 0.0 {
            break;
        }
    }
    let mut pool_mass = 0.0;
    let mut pool_sum = 0.0;
    for i in 0..n {
        let m = g.weights[i] - pre[i] - top[i];
        pool_mass += m;
        pool_sum += m * g.payoff_map[i];
    }
    let pool_y = if pool_mass > 1e-15 { pool_sum / pool_mass } else { f64::NAN };
    Split { pre, top, pool_mass, pool_y }
}

struct Eval {
    payoff: f64,
    kappa: f64,
    residual: f64,
    pool_stop: f64,
}

fn agent_total(params: &Params, g: &StateDistribution, s: &Split, kappa: f64, floor: f64, pool_stop: f64) -> f64 {
    let mut v = 0.0;
    for i in 0..g.weights.len() {
        let y = g.payoff_map[i];
        if s.pre[i] > 0.0 {
            v += s.pre[i] * params.agent_value_y(y, t_schedule(params, y, kappa, floor));
        }
        if s.top[i] > 0.0 {
            v += s.top[i] * params.agent_value_y(y, params.stop_time_y(y));
        }
    }
    if s.pool_mass > 0.0 {
        v += s.pool_mass * params.agent_value_y(s.pool_y, pool_stop);
    }
    v
}

fn evaluate_split(params: &Params, g: &StateDistribution, q_low: f64, q_high: f64) -> Option<Eval> {
    let s = split(g, q_low, q_high);
    let y0 = g.mean_payoff();
    let floor = params.stop_time_y(y0);
    let target = params.agent_value_y(y0, floor);
    let pool_stop = if s.pool_mass > 0.0 { params.stop_time_y(s.pool_y) } else { 0.0 };
    let res = |k: f64| agent_total(params, g, &s, k, floor, pool_stop) - target;
    let kappa = if q_low <= 0.0 || res(0.0) >= 0.0 {
        0.0
    } else {
        // the residual rises with kappa; scan in log space, then bisect
        let ks: Vec<f64> = (0..=48).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / 48.0)).collect();
        let i = ks.iter().position(|&k| res(k) >= 0.0)?;
        if i == 0 {
            ks[0]
        } else {
            let lk = bisect(|x: f64| res(x.exp()), ks[i - 1].ln(), ks[i].ln(), 1e-14, 200).ok()?;
            let k = lk.exp();
            // stay on the feasible side of the root
            if res(k) >= 0.0 { k } else { ks[i] }
        }
    };
    let residual = res(kappa);
    if residual < -1e-9 {
        return None;
    }
    let mut w = 0.0;
    for i in 0..g.weights.len() {
        let y = g.payoff_map[i];
        if s.pre[i] > 0.0 {
            w += s.pre[i] * params.principal_value(t_schedule(params, y, kappa, floor));
        }
        if s.top[i] > 0.0 {
            w += s.top[i] * params.principal_value(params.stop_time_y(y));
        }
    }
    if s.pool_mass > 0.0 {
        w += s.pool_mass * params.principal_value(pool_stop);
    }
    Some(Eval { payoff: w, kappa, residual, pool_stop })
}

pub fn solve_continuous(params: &Params, g0: &StateDistribution) -> Result<ContinuousPolicy> {
    if !params.equal_rates() {
        return Err(Error::UnequalRates { r_a: params.r_a, r_p: params.r_p });
    }
    params.check_ranges()?;
    g0.validate(params)?;
    let star = params.z * params.big_y / params.big_z;
    let n = g0.weights.len();
    let m_low: f64 = (0..n).filter(|&i| g0.payoff_map[i] < star).map(|i| g0.weights[i]).sum();
    let m_high: f64 = (0..n).filter(|&i| g0.payoff_map[i] > star).map(|i| g0.weights[i]).sum();
    let obj = |a: f64, b: f64| evaluate_split(params, g0, a * m_low, b * m_high).map(|e| e.payoff);

    let k = 32;
    let mut coarse: Vec<([f64; 2], f64)> = Vec::new();
    for i in 0..=k {
        for j in 0..=k {
            let (a, b) = (i as f64 / k as f64, j as f64 / k as f64);
            if let Some(v) = obj(a, b) {
                coarse.push(([a, b], v));
            }
        }
    }
    if coarse.is_empty() {
        return Err(Error::Infeasible("no split satisfies the participation constraint".into()));
    }
    coarse.sort_by(|x, y| y.1.total_cmp(&x.1));
    let mut best = coarse[0];
    for c in coarse.iter().take(4) {
        let (x, f) = nelder_mead(
            |x| obj(x[0], x[1]).map_or(1e9, |v| -v),
            &c.0,
            &[0.0, 0.0],
            &[1.0, 1.0],
            0.02,
            1e-15,
            600,
        );
        if -f > best.1 {
            best = ([x[0], x[1]], -f);
        }
    }
    let (q_low, q_high) = (best.0[0] * m_low, best.0[1] * m_high);
    let e = evaluate_split(params, g0, q_low, q_high).expect("feasible by construction");
    let s = split(g0, q_low, q_high);
    let y0 = g0.mean_payoff();
    let floor = params.stop_time_y(y0);
    let pool_lo = first_pool(&s, g0);
    let pool_hi = last_pool(&s, g0);
    let pre_time = |y: f64| t_schedule(params, y, e.kappa, floor);
    let schedule: Vec<f64> = (0..n)
        .map(|i| {
            let y = g0.payoff_map[i];
            let pooled = g0.weights[i] - s.pre[i] - s.top[i] > 0.0;
            if s.pre[i] > 0.0 || (!pooled && s.top[i] == 0.0 && i < pool_lo) {
                pre_time(y)
            } else if s.top[i] > 0.0 || (!pooled && i > pool_hi) {
                params.stop_time_y(y)
            } else {
                e.pool_stop
            }
        })
        .collect();
    let mut stops = Vec::new();
    for i in 0..n {
        let y = g0.payoff_map[i];
        let pooled = g0.weights[i] - s.pre[i] - s.top[i];
        for (m, t) in [(s.pre[i], pre_time(y)), (s.top[i], params.stop_time_y(y)), (pooled, e.pool_stop)] {
            if m > 0.0 {
                stops.push(StopPart { state: i, mass: m, time: t });
            }
        }
    }
    let theta_hat_l = boundary_theta(g0, &s.pre, false);
    let theta_hat_h = boundary_theta(g0, &s.top, true);
    let theta0 = (e.kappa > 0.0).then(|| {
        let (l, r) = (params.lambda, params.r_a);
        let a = (1.0 - params.p0) / params.p0 * (l * floor).exp() * r * (params.big_z + e.kappa * params.z);
        let y = ((a - (l * params.big_y - (l + r) * params.big_z)) / e.kappa + (l + r) * params.z) / l;
        g0.theta_of(y)
    });
    let gamma0 = params.gamma(0.0, floor);
    Ok(ContinuousPolicy {
        schedule,
        theta0,
        theta_hat_l,
        theta_hat_h,
        theta_star: g0.theta_of(star),
        kappa: e.kappa,
        pool_stop: e.pool_stop,
        payoff: e.payoff,
        pre_mass: q_low,
        top_mass: q_high,
        binding_residual: e.residual / gamma0,
        pool_margin_flag: s.pool_mass > 0.0 && e.pool_stop - params.peak_time() < 1e-6,
        no_disclosure_payoff: params.principal_value(floor),
        stops,
    })
}

fn first_pool(s: &Split, g: &StateDistribution) -> usize {
    (0..g.weights.len()).find(|&i| g.weights[i] - s.pre[i] - s.top[i] > 0.0).unwrap_or(g.weights.len())
}

fn last_pool(s: &Split, g: &StateDistribution) -> usize {
    (0..g.weights.len()).rev().find(|&i| g.weights[i] - s.pre[i] - s.top[i] > 0.0).unwrap_or(0)
}

// grid position of the edge of a released group
fn boundary_theta(g: &StateDistribution, part: &[f64], from_top: bool) -> f64 {
    let n = g.grid.len();
    if from_top {
        match (0..n).find(|&i| part[i] > 0.0) {
            Some(i) => g.grid[i],
            None => g.grid[n - 1],
        }
    } else {
        match (0..n).rev().find(|&i| part[i] > 0.0) {
            Some(i) => g.grid[i],
            None => g.grid[0],
        }
    }
}

/// Pool the states below a cutoff `theta2` at their conditional mean
/// `theta1` and reveal the rest, choosing the cutoff that maximises the
/// weighted value of `W + kappa V` at the peak.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DissuasionCutoffs {
    pub theta1: f64,
    pub theta2: f64,
    /// Pool mean payoff.
    pub pool_payoff: f64,
    pub full_pooling: bool,
    pub full_disclosure: bool,
}

/// Lagrangian value at the peak of stopping at the preferred time of a
/// posterior with mean payoff `y`.
pub fn peak_lagrangian(params: &Params, y: f64, kappa: f64) -> f64 {
    let s = params.stop_time_y(y).max(params.peak_time());
    params.principal_value(s) + kappa * params.agent_value_y(y, s)
}

pub fn dissuasion_cutoffs(params: &Params, posterior: &StateDistribution, kappa: f64) -> Result<DissuasionCutoffs> {
    let n = posterior.weights.len();
    if n == 0 {
        return Err(Error::InvalidParams("empty posterior".into()));
    }
    let u = |y: f64| peak_lagrangian(params, y, kappa);
    // suffix sums of revealed value, prefix sums of pooled mass and payoff
    let mut tail = vec![0.0; n + 1];
    for i in (0..n).rev() {
        tail[i] = tail[i + 1] + posterior.weights[i] * u(posterior.payoff_map[i]);
    }
    let mut best = (0usize, tail[0], f64::NAN);
    let (mut mass, mut sum) = (0.0, 0.0);
    for k in 1..=n {
        mass += posterior.weights[k - 1];
        sum += posterior.weights[k - 1] * posterior.payoff_map[k - 1];
        if mass <= 0.0 {
            continue;
        }
        let v = mass * u(sum / mass) + tail[k];
        if v > best.1 + 1e-15 {
            best = (k, v, sum / mass);
        }
    }
    let (k, _, pool_y) = best;
    let support: Vec<usize> = (0..n).filter(|&i| posterior.weights[i] > 0.0).collect();
    let full_pooling = support.last().map_or(true, |&last| k > last);
    let full_disclosure = k == 0 || support.iter().filter(|&&i| i < k).count() <= 1;
    let theta2 = if k < n { posterior.grid[k] } else { posterior.grid[n - 1] };
    let theta1 = if pool_y.is_nan() { posterior.grid[0] } else { posterior.theta_of(pool_y) };
    Ok(DissuasionCutoffs { theta1, theta2, pool_payoff: pool_y, full_pooling, full_disclosure })
}

/// `(theta, T_NI, T*)` rows.
pub fn schedule_csv(params: &Params, g: &StateDistribution, policy: &ContinuousPolicy) -> String {
    let mut out = String::from("theta,t_ni,t_star\n");
    for i in 0..g.grid.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            g.grid[i],
            params.stop_time_y(g.payoff_map[i]),
            policy.schedule[i]
        ));
    }
    out
}

/// Obedience of the plan: smallest continuation value (per unit of
/// surviving discount) over the stop times and a grid, and largest
/// stopping excess over the stop groups.
pub fn check_schedule(params: &Params, g: &StateDistribution, policy: &ContinuousPolicy) -> (f64, f64) {
    let parts = &policy.stops;
    let horizon = parts.iter().map(|p| p.time).fold(0.0, f64::max);
    let mut times: Vec<f64> = parts.iter().map(|p| p.time).collect();
    times.extend((0..=256).map(|i| horizon * i as f64 / 256.0));
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut min_k = f64::INFINITY;
    for &t in &times {
        let mut k = 0.0;
        let mut alive = 0.0;
        for p in parts.iter().filter(|p| p.time >= t) {
            alive += p.mass;
            let y = g.payoff_map[p.state];
            k += p.mass * (params.agent_value_y(y, p.time) - params.agent_value_y(y, t));
        }
        if alive > 1e-9 {
            min_k = min_k.min(k / params.gamma(0.0, t));
        }
    }
    let mut max_e = f64::NEG_INFINITY;
    for p in parts {
        let (mut m, mut sy) = (0.0, 0.0);
        for q in parts.iter().filter(|q| (q.time - p.time).abs() <= 1e-12) {
            m += q.mass;
            sy += q.mass * g.payoff_map[q.state];
        }
        let t = p.time;
        let scale = params.lambda * params.p0 * (-(params.lambda + params.r_a) * t).exp();
        max_e = max_e.max(params.agent_slope_y(sy / m, t) / scale);
    }
    (min_k, max_e)
}
