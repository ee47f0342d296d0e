//! Checks that do not share code paths with the solvers they test: a
//! discretised linear program over stopping masses, an exhaustive two-atom
//! grid scan and a path simulator.

pub mod lp;
pub mod sim;
pub mod simplex;
pub mod two_atom;

pub use lp::{lp_oracle, lp_oracle_with, GridSpec, LpOptions, LpOracleResult};
pub use sim::{monte_carlo, SimulationResult};
pub use two_atom::{two_atom_oracle, TwoAtomResult};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("grid too large for the dense solver: n = {0} > 400")]
    GridTooLarge(usize),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("simplex exceeded {0} pivots")]
    PivotLimit(usize),
    #[error(transparent)]
    Model(#[from] persuasion::Error),
}
