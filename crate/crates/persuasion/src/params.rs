use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Quality state observed by the principal only.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quality {
    High,
    Low,
}

/// Primitives of the experimentation game.
///
/// Field names in JSON follow the usual notation (`r_P`, `y_H`, `Y`, ...).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams<T> {
    /// Prior that the project is feasible.
    pub p0: T,
    /// Breakthrough rate of a feasible project.
    pub lambda: T,
    #[serde(rename = "r_P")]
    pub r_p: T,
    #[serde(rename = "r_A")]
    pub r_a: T,
    #[serde(rename = "y_L")]
    pub y_l: T,
    #[serde(rename = "y_H")]
    pub y_h: T,
    /// Agent's flow-equivalent outside option.
    pub z: T,
    #[serde(rename = "Y")]
    pub big_y: T,
    #[serde(rename = "Z")]
    pub big_z: T,
    /// Prior that quality is high.
    pub mu0: T,
}

impl ModelParams<f64> {
    /// Reference parameter set used throughout the tests and as the CLI default.
    pub fn baseline() -> Self {
        ModelParams {
            p0: 0.5,
            lambda: 1.0,
            r_p: 0.1,
            r_a: 0.1,
            y_l: 0.5,
            y_h: 3.0,
            z: 1.0,
            big_y: 2.0,
            big_z: 1.0,
            mu0: 0.5,
        }
    }
}

impl<T: Scalar> ModelParams<T> {
    pub fn with_prior(mut self, mu0: T) -> Self {
        self.mu0 = mu0;
        self
    }

    pub fn payoff(&self, q: Quality) -> T {
        match q {
            Quality::High => self.y_h,
            Quality::Low => self.y_l,
        }
    }

    pub fn equal_rates(&self) -> bool {
        let scale = self.r_a.abs().max(self.r_p.abs());
        (self.r_a - self.r_p).abs() <= T::lit(1e-12) * scale
    }

    /// Range and sign checks only.
    pub fn check_ranges(&self) -> Result<()> {
        let fields = [
            ("p0", self.p0),
            ("lambda", self.lambda),
            ("r_P", self.r_p),
            ("r_A", self.r_a),
            ("y_L", self.y_l),
            ("y_H", self.y_h),
            ("z", self.z),
            ("Y", self.big_y),
            ("Z", self.big_z),
            ("mu0", self.mu0),
        ];
        for (name, v) in fields {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} is not finite")));
            }
            if v <= T::zero() {
                return Err(Error::InvalidParams(format!("{name} = {v} must be positive")));
            }
        }
        for (name, v) in [("p0", self.p0), ("mu0", self.mu0)] {
            if v >= T::one() {
                return Err(Error::InvalidParams(format!("{name} = {v} must lie in (0, 1)")));
            }
        }
        if self.y_h <= self.y_l {
            return Err(Error::InvalidParams(format!(
                "y_H = {} must exceed y_L = {}",
                self.y_h, self.y_l
            )));
        }
        Ok(())
    }

    /// Ordering of stopping times: the low type quits before the principal's
    /// ideal time, which comes before the high type's.
    ///
    /// Compared on the log arguments so that it does not depend on clipping
    /// at zero. With equal discount rates this is `y_L/z < Y/Z < y_H/z`.
    pub fn assumption_holds(&self) -> bool {
        let lo = self.agent_log_arg(self.y_l);
        let mid = self.principal_log_arg();
        let hi = self.agent_log_arg(self.y_h);
        lo < mid && mid < hi
    }

    pub fn validate(&self) -> Result<()> {
        self.check_ranges()?;
        if !self.assumption_holds() {
            return Err(Error::AssumptionViolated(format!(
                "y_L/z = {}, Y/Z = {}, y_H/z = {}",
                self.y_l / self.z,
                self.big_y / self.big_z,
                self.y_h / self.z
            )));
        }
        Ok(())
    }
}
