//! Deterministic simulator of distributed SDN controller synchronization,
//! plus a deep-RL scheduler that learns which state items to broadcast under
//! a per-slot budget.
//!
//! The simulator models a network of domains whose controllers hold possibly
//! stale copies of inter-domain gateway delays and service server delays.
//! Each time slot, a scheduler picks which items to broadcast to all
//! controllers, controllers re-route service requests from their views, and
//! the true latencies of the chosen paths are recorded. The learned scheduler
//! is a branching dueling double-Q network trained from replayed experience;
//! full-sync, no-sync, greedy min-max, and random (anti-entropy style)
//! policies serve as references.
//!
//! Modules follow the pipeline: [`topology`] builds the world and indexes its
//! synchronizable items, [`dynamics`] evolves ground truth, [`views`] track
//! what controllers believe, [`pathing`] routes requests, [`env`] ties a time
//! slot together, [`nn`] and [`agent`] learn the schedule, [`baselines`]
//! provide the references, and [`config`]/[`harness`] run experiments.

pub mod agent;
pub mod baselines;
pub mod config;
pub mod dynamics;
pub mod env;
pub mod error;
pub mod harness;
pub mod nn;
pub mod pathing;
pub mod seeds;
pub mod topology;
pub mod views;

pub use agent::{AgentConfig, EpsilonSchedule, ReplayMemory, Trainer, Transition};
pub use baselines::PolicyKind;
pub use config::{parse_config, ConfigError, ScenarioConfig};
pub use dynamics::{DynamicsConfig, ServiceRequest, TrueNetworkState, ValueDistribution};
pub use env::{discounted_return, EpisodeConfig, ServiceSpec, SlotOutcome, SyncEnv};
pub use error::{Error, Result};
pub use nn::{BranchingNet, ForwardOutput, NetShape};
pub use pathing::{DomainAdjacency, ServicePath};
pub use seeds::SimRng;
pub use topology::{BisEntry, BisRegistry, DomainGraph, ServicePlacement, TopologySpec};
pub use views::{ActionVector, ControllerView, StalenessVector};
