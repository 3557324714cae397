//! Static-cluster baseline.
//!
//! This is not canonical LEACH with probabilistic head rotation. It models
//! the static variant the DCP comparison is drawn against: heads are elected
//! once at tick 0, clusters never change, and there is no sleep state, so
//! every non-head pays the active rate on every tick and its data reaches the
//! base station on the same tick.

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterAssignment, ClusterId, Node, NodeId};
use crate::config::SimConfig;
use crate::energy::e_total_all;
use crate::metrics::{record_tick, Accounting, Protocol, SimulationResult, TickSnapshot};
use crate::topology::Topology;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeachConfig {
    /// Fraction of nodes elected as heads, in (0, 1).
    pub head_fraction: f64,
}

impl Default for LeachConfig {
    fn default() -> Self {
        Self { head_fraction: 0.05 }
    }
}

impl LeachConfig {
    /// `ceil(p * n)`, clamped to `1..=n`.
    pub fn head_count(&self, n: usize) -> usize {
        // 1e-9 absorbs representation error such as 0.05 * 100 = 5.000000000000001
        let raw = (self.head_fraction * n as f64 - 1e-9).ceil();
        (raw.max(1.0) as usize).min(n)
    }
}

/// Elects the `head_count` richest nodes (lowest id on ties) and attaches
/// every other node to its nearest head, lowest cluster id on ties.
pub fn form_static_clusters(nodes: &mut [Node], topology: &Topology, head_count: usize) -> ClusterAssignment {
    let mut order: Vec<usize> = (0..nodes.len()).collect();
    order.sort_by(|&a, &b| nodes[b].energy.cmp(&nodes[a].energy).then(a.cmp(&b)));
    let heads = &order[..head_count];
    for (c, &h) in heads.iter().enumerate() {
        nodes[h].ss_flag = true;
        nodes[h].cluster_no = Some(ClusterId(c + 1));
    }
    for (i, node) in nodes.iter_mut().enumerate() {
        if node.ss_flag {
            continue;
        }
        let mut best = 0;
        for (c, &h) in heads.iter().enumerate().skip(1) {
            if topology.distance(i, h) < topology.distance(i, heads[best]) {
                best = c;
            }
        }
        node.cluster_no = Some(ClusterId(best + 1));
    }
    ClusterAssignment::from_nodes(nodes)
}

/// Runs the static baseline from uniform initial energy.
pub fn run_leach(config: &SimConfig, leach: &LeachConfig, topology: &Topology, seed: u64) -> SimulationResult {
    let energies = vec![config.initial_units(); topology.node_count()];
    run_leach_with(config, leach, topology, &energies, seed)
}

pub fn run_leach_with(
    config: &SimConfig,
    leach: &LeachConfig,
    topology: &Topology,
    energies: &[i64],
    seed: u64,
) -> SimulationResult {
    assert_eq!(energies.len(), topology.node_count(), "one energy per node");
    let mut nodes: Vec<Node> = energies
        .iter()
        .enumerate()
        .map(|(i, &e)| Node::new(NodeId::from_index(i), e))
        .collect();
    let mut accounting = Accounting::new(&nodes);
    let head_count = leach.head_count(nodes.len());
    let assignment = form_static_clusters(&mut nodes, topology, head_count);
    let subsink = assignment.subsink();
    let cluster_count = assignment.len();
    let e_radio = e_total_all(&config.radio, &assignment, topology);
    let schedule = config.schedule;
    let horizon_reached = |tick: u64| config.horizon.is_some_and(|h| tick >= h);

    let mut records = vec![record_tick(
        TickSnapshot { tick: 0, nodes: &nodes, cluster_count, e_total_radio: e_radio },
        &accounting,
    )];
    let mut tick = 0u64;

    let died = 'run: loop {
        if horizon_reached(tick) {
            break false;
        }
        for head in &subsink {
            let node = &mut nodes[head.index()];
            if node.energy <= 0 {
                break 'run true;
            }
            accounting.energy.charge(node, schedule.head_cost_per_cycle);
        }
        for _ in 0..config.refresh_time {
            if horizon_reached(tick) {
                break 'run false;
            }
            let t = tick + 1;
            let mut delivered = 0;
            for node in &mut nodes {
                if node.energy <= 0 {
                    break 'run true;
                }
                if !node.ss_flag {
                    accounting.energy.charge(node, schedule.active_cost_per_tick);
                    delivered += 1;
                }
            }
            accounting.delay.deliver_many(t, t, delivered);
            tick = t;
            records.push(record_tick(
                TickSnapshot { tick, nodes: &nodes, cluster_count, e_total_radio: e_radio },
                &accounting,
            ));
        }
    };

    SimulationResult {
        protocol: Protocol::Leach,
        seed,
        records,
        lifetime: tick,
        died,
        final_nodes: nodes,
    }
}
