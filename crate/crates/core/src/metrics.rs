//! Distance and energy diagnostics, the per-tick record stream, and the
//! accounting that backs it.

use std::fmt;
use std::io;

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterAssignment, ClusterId, Node, UnknownCluster};
use crate::topology::Topology;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    Dcp,
    Leach,
}

impl Protocol {
    pub fn label(self) -> &'static str {
        match self {
            Protocol::Dcp => "dcp",
            Protocol::Leach => "leach",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// One row of the per-tick metric stream.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub tick: u64,
    pub cumulative_dissipated: i64,
    pub remaining_total: i64,
    pub alive_count: usize,
    pub cluster_count: usize,
    /// Cumulative mean delivery delay in ticks; `None` until the first delivery.
    pub mean_delay: Option<f64>,
    /// Radio-model aggregation energy of the current clustering, in Joules.
    pub e_total_radio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub protocol: Protocol,
    pub seed: u64,
    pub records: Vec<RoundRecord>,
    /// Last fully completed tick: the tick of network death, or the horizon.
    pub lifetime: u64,
    /// False when the run stopped at the horizon with every node alive.
    pub died: bool,
    pub final_nodes: Vec<Node>,
}

impl SimulationResult {
    pub fn final_mean_delay(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.mean_delay)
    }

    pub fn final_dissipated(&self) -> i64 {
        self.records.last().map_or(0, |r| r.cumulative_dissipated)
    }
}

/// Sum of every node's distance to the base station.
pub fn d_b(topology: &Topology) -> f64 {
    topology.dist_to_bs_all().iter().sum()
}

/// Sum of member-to-head distances of one cluster (the head-to-BS leg is not included).
pub fn d_c(
    assignment: &ClusterAssignment,
    topology: &Topology,
    cluster_id: ClusterId,
) -> Result<f64, UnknownCluster> {
    let cluster = assignment
        .cluster(cluster_id)
        .ok_or(UnknownCluster(cluster_id.0))?;
    let head = cluster.head.index();
    Ok(cluster
        .members
        .iter()
        .map(|m| topology.distance(m.index(), head))
        .sum())
}

/// Two-leg path length over all clusters: member to head, plus each head to
/// the base station once.
pub fn t_dist(assignment: &ClusterAssignment, topology: &Topology) -> f64 {
    assignment
        .clusters()
        .iter()
        .map(|c| {
            let head = c.head.index();
            let intra: f64 = c
                .members
                .iter()
                .map(|m| topology.distance(m.index(), head))
                .sum();
            intra + topology.dist_to_bs(head)
        })
        .sum()
}

/// Mean of `delivered - generated + 1` over all deliveries, or `None` if empty.
pub fn mean_delay(deliveries: &[(u64, u64)]) -> Option<f64> {
    let mut stats = DelayStats::default();
    for &(generated, delivered) in deliveries {
        stats.deliver(generated, delivered);
    }
    stats.mean()
}

/// Running delay totals. Integer sums keep the mean exact and order-independent.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DelayStats {
    total: u64,
    count: u64,
}

impl DelayStats {
    pub fn deliver(&mut self, generated: u64, delivered: u64) {
        assert!(delivered >= generated, "datum delivered before it was generated");
        self.total += delivered - generated + 1;
        self.count += 1;
    }

    /// Delivers `count` data items generated at the same tick.
    pub fn deliver_many(&mut self, generated: u64, delivered: u64, count: u64) {
        assert!(delivered >= generated, "datum delivered before it was generated");
        self.total += (delivered - generated + 1) * count;
        self.count += count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> Option<f64> {
        (self.count > 0).then(|| self.total as f64 / self.count as f64)
    }
}

/// Integer energy ledger. Every decrement goes through [`EnergyLedger::charge`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnergyLedger {
    initial_total: i64,
    dissipated: i64,
}

impl EnergyLedger {
    pub fn new(nodes: &[Node]) -> Self {
        Self {
            initial_total: nodes.iter().map(|n| n.energy).sum(),
            dissipated: 0,
        }
    }

    pub fn charge(&mut self, node: &mut Node, amount: i64) {
        node.energy -= amount;
        self.dissipated += amount;
    }

    pub fn initial_total(&self) -> i64 {
        self.initial_total
    }

    pub fn dissipated(&self) -> i64 {
        self.dissipated
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Accounting {
    pub energy: EnergyLedger,
    pub delay: DelayStats,
}

impl Accounting {
    pub fn new(nodes: &[Node]) -> Self {
        Self {
            energy: EnergyLedger::new(nodes),
            delay: DelayStats::default(),
        }
    }
}

/// State visible to [`record_tick`] at the end of a tick.
#[derive(Clone, Copy, Debug)]
pub struct TickSnapshot<'a> {
    pub tick: u64,
    pub nodes: &'a [Node],
    pub cluster_count: usize,
    pub e_total_radio: f64,
}

/// Builds the record for a completed tick.
///
/// Panics if the remaining energy and the ledger disagree; that can only
/// happen if a decrement bypassed the ledger.
pub fn record_tick(snapshot: TickSnapshot<'_>, accounting: &Accounting) -> RoundRecord {
    let remaining_total: i64 = snapshot.nodes.iter().map(|n| n.energy).sum();
    let dissipated = accounting.energy.dissipated();
    assert_eq!(
        dissipated + remaining_total,
        accounting.energy.initial_total(),
        "energy conservation violated at tick {}",
        snapshot.tick
    );
    RoundRecord {
        tick: snapshot.tick,
        cumulative_dissipated: dissipated,
        remaining_total,
        alive_count: snapshot.nodes.iter().filter(|n| n.is_alive()).count(),
        cluster_count: snapshot.cluster_count,
        mean_delay: accounting.delay.mean(),
        e_total_radio: snapshot.e_total_radio,
    }
}

pub const RUNS_CSV_HEADER: [&str; 9] = [
    "tick",
    "protocol",
    "seed",
    "cumulative_dissipated",
    "remaining_total",
    "alive_count",
    "cluster_count",
    "mean_delay",
    "e_total_radio",
];

/// Writes every record of every result as `runs.csv`, in the given order.
pub fn write_runs_csv<W: io::Write>(results: &[SimulationResult], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(RUNS_CSV_HEADER)?;
    for result in results {
        let protocol = result.protocol.label();
        let seed = result.seed.to_string();
        for r in &result.records {
            writer.write_record([
                r.tick.to_string().as_str(),
                protocol,
                &seed,
                &r.cumulative_dissipated.to_string(),
                &r.remaining_total.to_string(),
                &r.alive_count.to_string(),
                &r.cluster_count.to_string(),
                &r.mean_delay.map(|d| d.to_string()).unwrap_or_default(),
                &r.e_total_radio.to_string(),
            ])?;
        }
    }
    writer.flush()?;
    Ok(())
}
