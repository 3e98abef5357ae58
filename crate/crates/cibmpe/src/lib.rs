//! Exact equilibrium computation for finite-horizon stochastic games
//! between two controllers with asymmetric information.
//!
//! The library converts such a game into an equivalent game between
//! "virtual players" that share a common-information belief over the
//! state and both private informations, verifies that this belief is
//! independent of past control strategies, and then runs backward
//! induction over the reachable beliefs, solving a one-stage Bayesian
//! game at every belief. All arithmetic is exact (`BigRational`).
//!
//! # Modules
//!
//! - `game` — label sets, kernels, costs, validation
//! - `info` — private/common information structures and their builders
//! - `belief` — common-information beliefs, exact updates, reachability
//! - `independence` — the strategy-independence checker
//! - `stage_game` — one-stage Bayesian games and their equilibria
//! - `solve` — backward-induction drivers (pure, behavioral, team)
//! - `verify` — independent oracles: joint cost, best response, audits
//! - `spec_file` — the JSON game/profile file formats
//! - `cli` — command implementations behind the `cibmpe` binary

pub mod belief;
pub mod cli;
pub mod error;
pub mod game;
pub mod independence;
pub mod info;
pub mod rational;
pub mod report;
pub mod solve;
pub mod spec_file;
pub mod stage_game;
pub mod verify;

#[cfg(test)]
pub(crate) mod testgames;

pub use belief::{
    belief_update_general, belief_update_strategy_free, enumerate_reachable_beliefs,
    increment_distribution, initial_belief, joint_forward_distribution, Belief, BeliefGraph,
    EnumerationMode, EnumerationOptions, Prescription,
};
pub use error::{Error, Result};
pub use game::{validate_game_spec, GameSpec, Labels, ValidatedGame};
pub use info::{build_information_structure, InformationStructure, StructureKind};
pub use rational::Rational;
