//! Game generative networks over signed graphs.
//!
//! The crate simulates games on signed social networks, turns the gap between
//! an observed outcome and a selfish-agent model into a directed signed
//! network, and infers hidden relationship signs from that network with a
//! truncated exponential kernel.
//!
//! Modules, bottom up:
//!
//! * [`graph`]: signed sparse graphs, edge-list ingestion, sampling, stats.
//! * [`games`]: finite normal-form games, best responses, pure Nash profiles.
//! * [`team_game`]: the team-formation potential game and its better-response
//!   simulation.
//! * [`ggn`]: deviation-network construction and skeleton filtering.
//! * [`inference`]: truncated exponential kernels and sign prediction.
//! * [`eval`]: metrics and the end-to-end experiment pipeline.
//! * [`demo`]: the two worked examples (prisoners' dilemma, karate club).

pub mod demo;
pub mod error;
pub mod eval;
pub mod games;
pub mod ggn;
pub mod graph;
pub mod inference;
pub mod team_game;

pub use error::{Error, Result};
pub use graph::{NodeId, SignedGraph};
