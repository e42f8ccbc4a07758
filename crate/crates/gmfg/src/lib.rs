//! Solver toolkit for discrete-time graphon mean field games.
//!
//! A graphon mean field game couples a continuum of agents, indexed by
//! `α ∈ [0,1]`, through a graphon kernel `W`: each agent's transition and
//! reward depend on the `W`-weighted aggregate of neighbor state
//! distributions. This crate computes approximate equilibria of such games
//! by discretizing the agent continuum into equivalence classes and running
//! a Boltzmann-regularized fixed-point iteration (dynamic programming for
//! the best response, exact forward evolution for the induced mean field).
//! It also verifies solutions against finite-agent simulations on sampled
//! W-random graphs and against a sequential Monte Carlo estimator of the
//! neighborhood mean fields.
//!
//! The heavy inner loops (per-class dynamic programming, Monte Carlo
//! episodes and particle trajectories) are data parallel over rayon when
//! the `parallel` feature is enabled (the default); disabling it yields a
//! dependency-free sequential build with bit-identical results.

pub mod env;
pub mod graphon;
pub mod io;
pub mod meanfield;
pub mod nagent;
pub mod rng;
pub mod smc;
pub mod solver;

pub use env::{investment_graphon_model, model_by_name, sis_graphon_model, GameModel, NeighborhoodMeanField};
pub use graphon::{step_graphon_from_graph, Graphon, SampledGraph, StepGraphon};
pub use meanfield::{
    forward_simulate, forward_simulate_seq, lift_policy_gamma_n, neighborhood_mf, ClassGrid,
    GridScheme, LiftedPolicy, MeanFieldEnsemble, PolicyEnsemble,
};
pub use nagent::{
    deviation_experiment, mean_field_objective, simulate_episodes, DeviationRow, DeviationTable,
    EpisodeBatch,
};
pub use smc::{smc_estimate, ParticleCloud, SmcEstimate};
pub use solver::{
    backwards_induction, boltzmann_policy, exploitability, fixed_point_solve, policy_evaluation,
    temperature_sweep, QEnsemble, SolveOptions, SolveReport, SweepRow,
};

/// Errors surfaced by fallible constructors and (de)serialization.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("probability {0} outside [0,1]")]
    InvalidProbability(f64),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
