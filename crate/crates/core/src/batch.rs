//! Batch execution over seeds and protocols.

use rayon::prelude::*;

use crate::config::SimConfig;
use crate::dcp::run_dcp;
use crate::leach::run_leach;
use crate::metrics::{Protocol, SimulationResult};
use crate::topology::{generate_topology, Topology, TopologyError};

/// Runs a single protocol on an already generated topology.
pub fn run_one(config: &SimConfig, protocol: Protocol, topology: &Topology, seed: u64) -> SimulationResult {
    match protocol {
        Protocol::Dcp => run_dcp(config, topology, seed),
        Protocol::Leach => run_leach(config, &config.leach, topology, seed),
    }
}

/// Runs every (protocol, seed) pair. Both protocols see the same topology for
/// a given seed. Pairs run in parallel; the output is sorted by protocol and
/// then seed, so it does not depend on scheduling.
pub fn run_batch(
    config: &SimConfig,
    seeds: &[u64],
    protocols: &[Protocol],
) -> Result<Vec<SimulationResult>, TopologyError> {
    let mut seeds = seeds.to_vec();
    seeds.sort_unstable();
    seeds.dedup();
    let mut protocols = protocols.to_vec();
    protocols.sort_unstable();
    protocols.dedup();

    let topologies = seeds
        .par_iter()
        .map(|&seed| generate_topology(config, seed))
        .collect::<Result<Vec<_>, _>>()?;

    let jobs: Vec<(Protocol, usize)> = protocols
        .iter()
        .flat_map(|&p| (0..seeds.len()).map(move |i| (p, i)))
        .collect();

    Ok(jobs
        .par_iter()
        .map(|&(protocol, i)| run_one(config, protocol, &topologies[i], seeds[i]))
        .collect())
}
