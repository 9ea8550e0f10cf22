//! Finite extensive-form games with perfect recall: behavioral strategies,
//! belief systems, equilibrium verification, and differentiable
//! path-following solvers for Nash and subgame-perfect equilibria.
//!
//! The library is organized around a validated [`game::Game`] tree:
//!
//! - [`format`] — the JSON game file format, parsing and serialization
//! - [`reach`] — probability kernels over histories and infosets
//! - [`payoff`] — expected, infoset-restricted, and belief-conditional payoffs
//! - [`belief`] — self-independent and subgame-relative belief systems
//! - [`verify`] — equilibrium certification and a brute-force oracle
//! - [`homotopy`] — the two path-following solvers and the tracer
//! - [`generate`] — seeded random game families for benchmarking
//! - [`bench`] — the benchmark harness behind the `bench` command
//!
//! See the `examples/` directory for one runnable program per capability.

pub mod belief;
pub mod bench;
pub mod cli;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod game;
pub mod generate;
pub mod homotopy;
pub mod payoff;
pub mod profile;
pub mod reach;
pub mod verify;

pub use error::{GameError, SolveError};
pub use game::{Game, Infoset, InfosetId, Node, NodeId, NodeKind, Player, SubgameIndex};
pub use profile::{Assessment, BehaviorProfile, BeliefSystem};

/// Which equilibrium refinement a solver or checker targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Refinement {
    /// Nash equilibrium in behavioral strategies.
    Nash,
    /// Subgame perfect equilibrium in behavioral strategies.
    Sgpe,
}

impl std::fmt::Display for Refinement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Refinement::Nash => write!(f, "nash"),
            Refinement::Sgpe => write!(f, "sgpe"),
        }
    }
}
