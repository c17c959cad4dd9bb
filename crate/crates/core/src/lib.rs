//! Layered latent-space roadmaps for heterogeneous agent teams.
//!
//! A dataset of observation pairs becomes a roadmap in three layers: the LSR
//! holds single observed actions, the P-LSR adds edges whose actions can run
//! concurrently, and the C-LSR keeps the edges a given team can execute, each
//! with an optimal action-to-agent assignment and a cost. Planning is a
//! shortest-path query on the C-LSR; when it fails, [`suggest`] explains which
//! capabilities are missing.

pub mod abstraction;
pub mod assignment;
pub mod clsr;
pub mod dataset;
pub mod domains;
pub mod dot;
pub mod error;
pub mod eval;
pub mod lsr;
pub mod model;
pub mod par;
pub mod pipeline;
pub mod planner;
pub mod plsr;
pub mod roadmap;
pub mod suggest;

pub use abstraction::{CanonicalJson, StateAbstraction, StateKey};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use model::{ActionSpec, AgentSpec, CostWeights, Observation, Pose, TransitionTuple};
pub use planner::{ParallelPlan, PlanOutcome, Planner};
pub use roadmap::{Layer, NodeId, Roadmap};
