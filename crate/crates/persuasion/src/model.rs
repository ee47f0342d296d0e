//! Closed forms of the experimentation model.
//!
//! Payoffs are stated relative to stopping immediately, so `agent_value(q, 0)`
//! is zero. The pair `(t, s)` always means "evaluated at `t`, stop at `s`".

use crate::error::{Error, Result};
use crate::numerics::bisect;
use crate::params::{ModelParams, Quality};
use crate::scalar::Scalar;

/// Whose risk attitude [`ModelParams::arrow_pratt`] measures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Principal,
    AgentLow,
}

impl<T: Scalar> ModelParams<T> {
    /// Posterior that the project is feasible after `t` without success.
    pub fn feasible_belief(&self, t: T) -> T {
        let e = self.p0 * (-self.lambda * t).exp();
        e / (e + T::one() - self.p0)
    }

    /// Agent's breakthrough payoff averaged at quality belief `mu`.
    pub fn mean_payoff(&self, mu: T) -> T {
        mu * self.y_h + (T::one() - mu) * self.y_l
    }

    fn value_between(&self, prize: T, outside: T, r: T, t: T, s: T) -> T {
        let p = self.feasible_belief(t);
        let d = s - t;
        let lr = self.lambda + r;
        p * (T::one() - (-lr * d).exp()) * self.lambda * prize / lr
            + ((T::one() - p + p * (-self.lambda * d).exp()) * (-r * d).exp() - T::one()) * outside
    }

    fn slope(&self, prize: T, outside: T, r: T, t: T) -> T {
        let lr = self.lambda + r;
        (-lr * t).exp() * self.p0 * (self.lambda * prize - lr * outside)
            - (T::one() - self.p0) * r * outside * (-r * t).exp()
    }

    /// Agent gain at `t` from experimenting until `s` with prize `y`.
    pub fn agent_value_between_y(&self, y: T, t: T, s: T) -> T {
        self.value_between(y, self.z, self.r_a, t, s)
    }

    pub fn agent_value_between(&self, q: Quality, t: T, s: T) -> T {
        self.agent_value_between_y(self.payoff(q), t, s)
    }

    pub fn agent_value_y(&self, y: T, s: T) -> T {
        self.agent_value_between_y(y, T::zero(), s)
    }

    pub fn agent_value(&self, q: Quality, s: T) -> T {
        self.agent_value_y(self.payoff(q), s)
    }

    /// Principal's expected payoff at `t` from the agent stopping at `s`.
    ///
    /// Unlike the agent value this includes the outside option, so
    /// `principal_value(0) == Z`.
    pub fn principal_value_between(&self, t: T, s: T) -> T {
        self.value_between(self.big_y, self.big_z, self.r_p, t, s) + self.big_z
    }

    pub fn principal_value(&self, s: T) -> T {
        self.principal_value_between(T::zero(), s)
    }

    /// d/ds of `agent_value_y(y, s)`.
    pub fn agent_slope_y(&self, y: T, t: T) -> T {
        self.slope(y, self.z, self.r_a, t)
    }

    pub fn agent_slope(&self, q: Quality, t: T) -> T {
        self.agent_slope_y(self.payoff(q), t)
    }

    pub fn principal_slope(&self, t: T) -> T {
        self.slope(self.big_y, self.big_z, self.r_p, t)
    }

    pub fn agent_log_arg(&self, y: T) -> T {
        let lr = self.lambda + self.r_a;
        self.p0 / (T::one() - self.p0) * (self.lambda * y - lr * self.z) / (self.r_a * self.z)
    }

    pub fn principal_log_arg(&self) -> T {
        let lr = self.lambda + self.r_p;
        self.p0 / (T::one() - self.p0) * (self.lambda * self.big_y - lr * self.big_z)
            / (self.r_p * self.big_z)
    }

    fn log_time(&self, arg: T) -> T {
        if arg <= T::one() {
            T::zero()
        } else {
            arg.ln() / self.lambda
        }
    }

    /// Agent's preferred stopping time when the prize is `y`.
    pub fn stop_time_y(&self, y: T) -> T {
        self.log_time(self.agent_log_arg(y))
    }

    /// Agent's preferred stopping time at quality belief `mu`.
    pub fn stop_time(&self, mu: T) -> T {
        self.stop_time_y(self.mean_payoff(mu))
    }

    /// Principal's preferred stopping time.
    pub fn peak_time(&self) -> T {
        self.log_time(self.principal_log_arg())
    }

    /// Belief at which the agent's preferred stopping time equals the
    /// principal's.
    pub fn alignment_belief(&self) -> Result<T> {
        let ts = self.peak_time();
        let f = |mu: T| self.stop_time(mu) - ts;
        if f(T::one()) <= T::zero() {
            return Err(Error::Domain("agent stops before the peak even at mu = 1".into()));
        }
        if f(T::zero()) > T::zero() {
            return Ok(T::zero());
        }
        bisect(f, T::zero(), T::one(), T::lit(1e-12), 200)
    }

    /// Discount and survival factor from `t` to `s` in agent units.
    pub fn gamma(&self, t: T, s: T) -> T {
        self.feasible_belief(t) / self.feasible_belief(s)
            * (-(self.lambda + self.r_a) * (s - t)).exp()
    }

    /// Quality belief below which the agent wants to stop at `t`.
    ///
    /// Zero when even the low type wants to continue at `t`.
    pub fn threshold_belief(&self, t: T) -> Result<T> {
        let h = self.agent_slope(Quality::High, t);
        let l = self.agent_slope(Quality::Low, t);
        if h <= T::zero() {
            return Err(Error::Domain(format!("the high type no longer gains at t = {t}")));
        }
        if l >= T::zero() {
            return Ok(T::zero());
        }
        Ok(-l / (h - l))
    }

    /// Low-type mass that can be released at `t` per unit of high-type mass.
    pub fn dissuasion_ratio(&self, t: T) -> T {
        -(self.mu0 / (T::one() - self.mu0)) * self.agent_slope(Quality::High, t)
            / self.agent_slope(Quality::Low, t)
    }

    /// Arrow-Pratt coefficient `-u''/u'` of the value of stopping at `t`.
    pub fn arrow_pratt(&self, who: Party, t: T) -> Result<T> {
        let (prize, outside, r) = match who {
            Party::Principal => (self.big_y, self.big_z, self.r_p),
            Party::AgentLow => (self.y_l, self.z, self.r_a),
        };
        let lr = self.lambda + r;
        let a = self.lambda * prize - lr * outside;
        let b = (T::one() - self.p0) * outside * (self.lambda * t).exp();
        let den = self.p0 * a - r * b;
        if den.abs() <= T::lit(1e-14) * (self.p0 * a).abs().max(r * b) {
            return Err(Error::Domain(format!("slope vanishes at t = {t}")));
        }
        Ok((self.p0 * lr * a - r * r * b) / den)
    }

    pub fn prefers_longer(&self, mu: T) -> bool {
        self.stop_time(mu) > self.peak_time()
    }

    /// Agent's value at `t` without further information and belief `mu`.
    pub fn no_info_value(&self, t: T, mu: T) -> T {
        let s = t.max(self.stop_time(mu));
        mu * self.agent_value_between(Quality::High, t, s)
            + (T::one() - mu) * self.agent_value_between(Quality::Low, t, s)
    }

    /// Time-zero agent value of no disclosure at the prior.
    pub fn reservation_value(&self) -> T {
        self.no_info_value(T::zero(), self.mu0)
    }
}

impl<T: Scalar> ModelParams<T> {
    /// Low-type stopping cdf that keeps the surviving agent exactly at the
    /// stopping threshold, for quality prior `mu0`.
    ///
    /// Equals `1 - mu0/(1-mu0) * |v'_H / v'_L|`. Meaningful where the low
    /// type already wants to stop and the high type does not.
    pub fn indifference_cdf(&self, mu0: T, t: T) -> T {
        let (num, den) = self.indifference_parts(t);
        T::one() + mu0 / (T::one() - mu0) * num / den
    }

    /// Derivative of [`Self::indifference_cdf`] in `t`.
    pub fn indifference_density(&self, mu0: T, t: T) -> T {
        let lr = self.lambda + self.r_a;
        let a_h = self.lambda * self.y_h - lr * self.z;
        let a_l = self.lambda * self.y_l - lr * self.z;
        let b = (T::one() - self.p0) * self.r_a * self.z;
        let u = (-self.lambda * t).exp();
        let den = self.p0 * a_l * u - b;
        mu0 / (T::one() - mu0) * self.lambda * u * self.p0 * b * (a_h - a_l) / (den * den)
    }

    // v'_H / v'_L with the common factor exp(-r t) removed
    fn indifference_parts(&self, t: T) -> (T, T) {
        let lr = self.lambda + self.r_a;
        let a_h = self.lambda * self.y_h - lr * self.z;
        let a_l = self.lambda * self.y_l - lr * self.z;
        let b = (T::one() - self.p0) * self.r_a * self.z;
        let u = (-self.lambda * t).exp();
        (self.p0 * a_h * u - b, self.p0 * a_l * u - b)
    }
}
