//! Disclosure policies as per-state stopping distributions, and the
//! obedience checks an implementable policy has to pass.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::adaptive_simpson;
use crate::params::Quality;
use crate::Params;

const TIME_EPS: f64 = 1e-12;
const MASS_TOL: f64 = 1e-9;
/// Below this surviving mass the continuation constraint is vacuous.
pub const SURVIVAL_FLOOR: f64 = 1e-9;

/// Absolutely continuous piece of a stopping distribution.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Density {
    /// Low-type schedule that holds the surviving agent at the stopping
    /// threshold; see [`Params::indifference_cdf`].
    Indifference { mu0: f64 },
    /// Piecewise linear density on sorted knots.
    Tabulated { ts: Vec<f64>, f: Vec<f64> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub start: f64,
    pub end: f64,
    pub density: Density,
}

impl Segment {
    pub fn density_at(&self, params: &Params, t: f64) -> f64 {
        if t < self.start || t > self.end {
            return 0.0;
        }
        match &self.density {
            Density::Indifference { mu0 } => params.indifference_density(*mu0, t),
            Density::Tabulated { ts, f } => {
                let k = ts.partition_point(|&x| x <= t).clamp(1, ts.len() - 1);
                let w = (t - ts[k - 1]) / (ts[k] - ts[k - 1]);
                f[k - 1] + w * (f[k] - f[k - 1])
            }
        }
    }

    /// Mass on `[start, min(t, end)]`.
    pub fn mass_until(&self, params: &Params, t: f64) -> f64 {
        if t <= self.start {
            return 0.0;
        }
        let hi = t.min(self.end);
        match &self.density {
            Density::Indifference { mu0 } => {
                params.indifference_cdf(*mu0, hi) - params.indifference_cdf(*mu0, self.start)
            }
            Density::Tabulated { ts, f } => {
                let mut acc = 0.0;
                for k in 1..ts.len() {
                    let (a, b) = (ts[k - 1], ts[k].min(hi));
                    if b <= a {
                        break;
                    }
                    let fb = self.density_at(params, b);
                    acc += 0.5 * (f[k - 1] + fb) * (b - a);
                }
                acc
            }
        }
    }

    pub fn mass(&self, params: &Params) -> f64 {
        self.mass_until(params, self.end)
    }
}

/// Stopping time distribution of one quality state: atoms plus density
/// segments.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct StoppingCdf {
    /// `(time, mass)` sorted by time.
    pub atoms: Vec<(f64, f64)>,
    pub segments: Vec<Segment>,
}

impl StoppingCdf {
    pub fn atom(t: f64) -> Self {
        StoppingCdf { atoms: vec![(t, 1.0)], segments: vec![] }
    }

    /// Build from unsorted atoms, merging coincident times and dropping
    /// zero masses.
    pub fn from_atoms(mut atoms: Vec<(f64, f64)>) -> Self {
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
        for (t, m) in atoms {
            if m == 0.0 {
                continue;
            }
            match out.last_mut() {
                Some(last) if (t - last.0).abs() <= TIME_EPS => last.1 += m,
                _ => out.push((t, m)),
            }
        }
        StoppingCdf { atoms: out, segments: vec![] }
    }

    pub fn total_mass(&self, params: &Params) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>()
            + self.segments.iter().map(|s| s.mass(params)).sum::<f64>()
    }

    /// Right-continuous cdf.
    pub fn cdf(&self, params: &Params, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 <= t).map(|a| a.1).sum::<f64>()
            + self.segments.iter().map(|s| s.mass_until(params, t)).sum::<f64>()
    }

    /// Mass stopping strictly before `t`.
    pub fn cdf_left(&self, params: &Params, t: f64) -> f64 {
        self.atoms.iter().filter(|a| a.0 < t).map(|a| a.1).sum::<f64>()
            + self.segments.iter().map(|s| s.mass_until(params, t)).sum::<f64>()
    }

    pub fn atom_at(&self, t: f64) -> f64 {
        self.atoms.iter().filter(|a| (a.0 - t).abs() <= TIME_EPS).map(|a| a.1).sum()
    }

    pub fn density_at(&self, params: &Params, t: f64) -> f64 {
        self.segments.iter().map(|s| s.density_at(params, t)).sum()
    }

    /// Last time at which mass stops.
    pub fn support_end(&self) -> f64 {
        let a = self.atoms.iter().map(|a| a.0).fold(0.0, f64::max);
        self.segments.iter().map(|s| s.end).fold(a, f64::max)
    }

    /// `E[g(S) ; S >= from]`.
    pub fn expect_from<G: FnMut(f64) -> f64>(&self, params: &Params, from: f64, mut g: G) -> f64 {
        let mut acc = 0.0;
        for &(t, m) in &self.atoms {
            if t >= from - TIME_EPS {
                acc += m * g(t);
            }
        }
        for s in &self.segments {
            let a = s.start.max(from);
            if s.end > a {
                acc += adaptive_simpson(|x| g(x) * s.density_at(params, x), a, s.end, 1e-12);
            }
        }
        acc
    }

    pub fn expect<G: FnMut(f64) -> f64>(&self, params: &Params, g: G) -> f64 {
        self.expect_from(params, f64::NEG_INFINITY, g)
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        for w in self.atoms.windows(2) {
            if w[1].0 < w[0].0 {
                return Err(Error::InvalidParams("atoms not sorted by time".into()));
            }
        }
        for &(t, m) in &self.atoms {
            if !(t.is_finite() && t >= 0.0) || m < -MASS_TOL || !m.is_finite() {
                return Err(Error::InvalidParams(format!("bad atom ({t}, {m})")));
            }
            for s in &self.segments {
                if t > s.start + TIME_EPS && t < s.end - TIME_EPS {
                    return Err(Error::InvalidParams(format!("atom at {t} inside a density segment")));
                }
            }
        }
        for s in &self.segments {
            if !(s.start >= 0.0 && s.end >= s.start) {
                return Err(Error::InvalidParams("segment bounds out of order".into()));
            }
            if s.mass(params) < -MASS_TOL {
                return Err(Error::InvalidParams("segment with negative mass".into()));
            }
        }
        let total = self.total_mass(params);
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidParams(format!("total mass {total} differs from 1")));
        }
        Ok(())
    }
}

/// Stopping distributions of the two quality states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InformationPolicy {
    pub high: StoppingCdf,
    pub low: StoppingCdf,
}

/// Outcome of [`InformationPolicy::check`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// Smallest continuation value over the checked times.
    pub continuation_min_slack: f64,
    pub continuation_argmin: f64,
    /// Largest excess of the stop-time posterior over the threshold belief,
    /// scaled by the stopping mass. Non-positive when every stop is obeyed.
    pub stopping_max_violation: f64,
    pub points_checked: usize,
    /// Checked times where the continuation constraint binds.
    pub binding: Vec<f64>,
    /// Stopping times at which the agent is exactly indifferent.
    pub indifferent_stops: Vec<f64>,
}

impl ConstraintReport {
    pub fn holds(&self, continuation_tol: f64, stopping_tol: f64) -> bool {
        self.continuation_min_slack >= -continuation_tol
            && self.stopping_max_violation <= stopping_tol
    }
}

impl InformationPolicy {
    pub fn cdf(&self, q: Quality) -> &StoppingCdf {
        match q {
            Quality::High => &self.high,
            Quality::Low => &self.low,
        }
    }

    /// Never say anything; both types stop at their preferred time under the
    /// prior.
    pub fn no_disclosure(params: &Params) -> Self {
        let t = params.stop_time(params.mu0);
        InformationPolicy { high: StoppingCdf::atom(t), low: StoppingCdf::atom(t) }
    }

    /// High type stops at `t_a` w.p. `x_a` and otherwise at its own
    /// preferred time. Low type stops at `t_b` w.p. `x_b` and otherwise at
    /// `t_a`.
    pub fn two_point(params: &Params, x_a: f64, x_b: f64, t_a: f64, t_b: f64) -> Result<Self> {
        for (name, x) in [("x_a", x_a), ("x_b", x_b)] {
            if !(-1e-12..=1.0 + 1e-12).contains(&x) {
                return Err(Error::InvalidParams(format!("{name} = {x} outside [0, 1]")));
            }
        }
        let (x_a, x_b) = (x_a.clamp(0.0, 1.0), x_b.clamp(0.0, 1.0));
        let t_hi = params.stop_time(1.0);
        if t_b < 0.0 || t_b > t_a + 1e-12 || t_a > t_hi + 1e-12 {
            return Err(Error::InvalidParams(format!(
                "need 0 <= t_b <= t_a <= tau(1); got t_b = {t_b}, t_a = {t_a}"
            )));
        }
        Ok(InformationPolicy {
            high: StoppingCdf::from_atoms(vec![(t_a, x_a), (t_hi, 1.0 - x_a)]),
            low: StoppingCdf::from_atoms(vec![(t_b, x_b), (t_a, 1.0 - x_b)]),
        })
    }

    pub fn validate(&self, params: &Params) -> Result<()> {
        self.high.validate(params)?;
        self.low.validate(params)
    }

    pub fn principal_value(&self, params: &Params) -> f64 {
        let w = |s: f64| params.principal_value(s);
        params.mu0 * self.high.expect(params, w) + (1.0 - params.mu0) * self.low.expect(params, w)
    }

    /// Agent's time-zero gain over quitting immediately.
    pub fn agent_value(&self, params: &Params) -> f64 {
        params.mu0 * self.high.expect(params, |s| params.agent_value(Quality::High, s))
            + (1.0 - params.mu0) * self.low.expect(params, |s| params.agent_value(Quality::Low, s))
    }

    /// Probability, at time zero, that the agent has not been told to stop
    /// before `t`.
    pub fn surviving_mass(&self, params: &Params, t: f64) -> f64 {
        params.mu0 * (1.0 - self.high.cdf_left(params, t))
            + (1.0 - params.mu0) * (1.0 - self.low.cdf_left(params, t))
    }

    /// Quality belief of an agent still working at `t`.
    pub fn posterior(&self, params: &Params, t: f64) -> Result<f64> {
        let s = self.surviving_mass(params, t);
        if s <= SURVIVAL_FLOOR {
            return Err(Error::Domain(format!("no mass survives to t = {t}")));
        }
        Ok(params.mu0 * (1.0 - self.high.cdf_left(params, t)) / s)
    }

    /// Gain at `t` from obeying the policy over stopping at `t`, weighted by
    /// the time-zero probability of reaching `t`. Dividing by
    /// [`Self::surviving_mass`] gives the conditional version.
    pub fn continuation_value(&self, params: &Params, t: f64) -> Result<f64> {
        if self.surviving_mass(params, t) <= SURVIVAL_FLOOR {
            return Err(Error::Domain(format!("no mass survives to t = {t}")));
        }
        Ok(self.continuation_unchecked(params, t))
    }

    fn continuation_unchecked(&self, params: &Params, t: f64) -> f64 {
        let h = self
            .high
            .expect_from(params, t, |s| params.agent_value_between(Quality::High, t, s));
        let l = self
            .low
            .expect_from(params, t, |s| params.agent_value_between(Quality::Low, t, s));
        params.mu0 * h + (1.0 - params.mu0) * l
    }

    /// Stopping-constraint excess at time `t` given masses (or densities)
    /// stopping there. Scaled so that the check needs no division by a
    /// posterior.
    fn stop_excess(params: &Params, t: f64, d_high: f64, d_low: f64) -> f64 {
        let h = params.agent_slope(Quality::High, t);
        let l = params.agent_slope(Quality::Low, t);
        (params.mu0 * d_high * h + (1.0 - params.mu0) * d_low * l) / (h - l)
    }

    fn event_times(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self.high.atoms.iter().chain(&self.low.atoms).map(|a| a.0).collect();
        for s in self.high.segments.iter().chain(&self.low.segments) {
            ts.push(s.start);
            ts.push(s.end);
        }
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() <= TIME_EPS);
        ts
    }

    fn in_segment(&self, t: f64) -> bool {
        self.high
            .segments
            .iter()
            .chain(&self.low.segments)
            .any(|s| t > s.start && t < s.end)
    }

    /// Check obedience: continuation on a grid of `grid_n` points over
    /// `[0, tau(1)]` plus atoms and the worst point of every quiet window,
    /// and stopping at every atom and on a grid inside density segments.
    pub fn check(&self, params: &Params, grid_n: usize) -> ConstraintReport {
        let events = self.event_times();
        let horizon = params.stop_time(1.0).max(self.high.support_end()).max(self.low.support_end());
        let mut points: Vec<f64> = events.clone();
        let n = grid_n.max(1);
        points.extend((0..=n).map(|i| horizon * i as f64 / n as f64));
        // in a window with no stopping the belief is frozen and the
        // continuation value is smallest at that belief's preferred time
        let mut bounds = vec![0.0];
        bounds.extend(events.iter().copied());
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b <= a || self.in_segment(0.5 * (a + b)) {
                continue;
            }
            let mid = 0.5 * (a + b);
            if let Ok(nu) = self.posterior(params, mid) {
                let c = params.stop_time(nu);
                if c > a && c < b {
                    points.push(c);
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() <= TIME_EPS);

        let mut min_slack = f64::INFINITY;
        let mut argmin = 0.0;
        let mut binding = Vec::new();
        let mut checked = 0;
        for &t in &points {
            if self.surviving_mass(params, t) <= SURVIVAL_FLOOR {
                continue;
            }
            checked += 1;
            let k = self.continuation_unchecked(params, t);
            if k < min_slack {
                min_slack = k;
                argmin = t;
            }
            if k.abs() <= 1e-8 {
                binding.push(t);
            }
        }
        if checked == 0 {
            min_slack = 0.0;
        }

        let mut max_excess = f64::NEG_INFINITY;
        let mut indifferent = Vec::new();
        for &t in &events {
            let (dh, dl) = (self.high.atom_at(t), self.low.atom_at(t));
            if dh == 0.0 && dl == 0.0 {
                continue;
            }
            let e = Self::stop_excess(params, t, dh, dl);
            max_excess = max_excess.max(e);
            if e.abs() <= 1e-9 && dh > 0.0 && dl > 0.0 {
                indifferent.push(t);
            }
        }
        for s in self.high.segments.iter().chain(&self.low.segments) {
            for i in 0..=64 {
                let t = s.start + (s.end - s.start) * i as f64 / 64.0;
                let e = Self::stop_excess(
                    params,
                    t,
                    self.high.density_at(params, t),
                    self.low.density_at(params, t),
                );
                max_excess = max_excess.max(e);
            }
        }
        if !max_excess.is_finite() {
            max_excess = 0.0;
        }
        ConstraintReport {
            continuation_min_slack: min_slack,
            continuation_argmin: argmin,
            stopping_max_violation: max_excess,
            points_checked: checked,
            binding,
            indifferent_stops: indifferent,
        }
    }

    /// `(t, F_H(t), F_L(t))` on `n + 1` points up to the last support time.
    pub fn cdf_table(&self, params: &Params, n: usize) -> Vec<(f64, f64, f64)> {
        let end = self.high.support_end().max(self.low.support_end()) * 1.05 + 1e-9;
        (0..=n)
            .map(|i| {
                let t = end * i as f64 / n as f64;
                (t, self.high.cdf(params, t), self.low.cdf(params, t))
            })
            .collect()
    }

    pub fn cdf_csv(&self, params: &Params, n: usize) -> String {
        let mut out = String::from("t,F_H,F_L\n");
        for (t, h, l) in self.cdf_table(params, n) {
            out.push_str(&format!("{t},{h},{l}\n"));
        }
        out
    }
}
