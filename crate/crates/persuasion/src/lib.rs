//! Information design for a principal who can only tell an agent whether the
//! project they are working on is good.
//!
//! An agent experiments on a risky project that succeeds at Poisson rate
//! `lambda` if feasible. Success pays `y_H` or `y_L` to the agent depending on
//! a quality state only the principal sees, and `Y` to the principal. The
//! principal commits to a disclosure policy. Because the only lever is the
//! timing of a "stop" recommendation, a policy reduces to a pair of stopping
//! time distributions, one per quality state.
//!
//! Closed forms live in [`model`]. The policy representation and the
//! obedience checks are in [`policy`]. Solvers: [`statics`], [`dynamic`],
//! [`gradual`], [`mpe`] and [`continuous`].

pub mod continuous;
pub mod dynamic;
pub mod error;
pub mod gradual;
pub mod model;
pub mod mpe;
pub mod numerics;
pub mod params;
pub mod policy;
pub mod scalar;
pub mod statics;

pub use error::{Error, Result};
pub use params::{ModelParams, Quality};
pub use scalar::Scalar;

/// Double precision parameters, the form every solver takes.
pub type Params = ModelParams<f64>;
