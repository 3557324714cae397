//! Deterministic discrete-time simulator for energy-driven dynamic clustering
//! in wireless sensor networks, with a static-cluster baseline for comparison.
//!
//! A run is a pure function of its [`SimConfig`] and seed: node placement
//! and node activity come from separate streams of a seeded ChaCha generator.

pub mod batch;
pub mod cluster;
pub mod config;
pub mod dcp;
pub mod energy;
pub mod leach;
pub mod metrics;
pub mod report;
pub mod topology;

pub use batch::run_batch;
pub use cluster::{Cluster, ClusterAssignment, ClusterId, Node, NodeId};
pub use config::{load_config, ConfigError, Overrides, ProtocolSelection, SimConfig};
pub use dcp::{run_dcp, ActivitySource, BernoulliActivity, ProtocolState};
pub use energy::{EnergySchedule, RadioModel};
pub use leach::{run_leach, LeachConfig};
pub use metrics::{Protocol, RoundRecord, SimulationResult};
pub use report::{compare_report, Report};
pub use topology::{generate_topology, Position, Topology};
