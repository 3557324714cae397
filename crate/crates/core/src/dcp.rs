//! The dynamic clustering protocol.
//!
//! Each refresh cycle charges every head a fixed cost, then runs
//! `refresh_time` ticks in which non-heads either forward data (active) or
//! sleep (idle), and finally dissolves all clusters and re-elects heads from
//! the residual energies. The first node found with energy `<= 0` at a check
//! point ends the network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::{ClusterAssignment, ClusterId, Node, NodeId};
use crate::config::SimConfig;
use crate::energy::e_total_all;
use crate::metrics::{record_tick, Accounting, Protocol, RoundRecord, SimulationResult, TickSnapshot};
use crate::topology::Topology;

/// Decides which non-head nodes have data on a given tick.
pub trait ActivitySource {
    fn is_active(&mut self, tick: u64, node: NodeId) -> bool;
}

/// Independent Bernoulli(`p`) draws per node per tick from a seeded stream.
#[derive(Clone, Debug)]
pub struct BernoulliActivity {
    rng: ChaCha8Rng,
    p: f64,
}

impl BernoulliActivity {
    /// The activity stream is stream 1 of the ChaCha generator keyed by
    /// `seed`; stream 0 is used for placement.
    pub fn new(seed: u64, p: f64) -> Self {
        assert!((0.0..=1.0).contains(&p), "p_active must lie in [0, 1]");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(1);
        Self { rng, p }
    }
}

impl ActivitySource for BernoulliActivity {
    fn is_active(&mut self, _tick: u64, _node: NodeId) -> bool {
        self.rng.gen_bool(self.p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolState {
    pub nodes: Vec<Node>,
    pub assignment: ClusterAssignment,
    /// Last fully completed tick.
    pub tick: u64,
    /// Number of completed refresh cycles.
    pub cycle: u64,
    pub alive: bool,
}

impl ProtocolState {
    /// Fresh, unclustered state with the given per-node energies (node `i + 1`
    /// gets `energies[i]`).
    pub fn new(energies: &[i64]) -> Self {
        Self {
            nodes: energies
                .iter()
                .enumerate()
                .map(|(i, &e)| Node::new(NodeId::from_index(i), e))
                .collect(),
            assignment: ClusterAssignment::default(),
            tick: 0,
            cycle: 0,
            alive: true,
        }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn energies(&self) -> Vec<i64> {
        self.nodes.iter().map(|n| n.energy).collect()
    }

    /// Clears cluster membership, head flags and activity; energy is kept.
    pub fn initialise(&mut self) {
        for node in &mut self.nodes {
            node.cluster_no = None;
            node.ss_flag = false;
            node.active = false;
        }
        self.assignment = ClusterAssignment::default();
    }
}

/// The highest-energy node not yet in any cluster, lowest id on ties.
pub fn energy_max(nodes: &[Node]) -> Option<NodeId> {
    let mut best: Option<&Node> = None;
    for node in nodes.iter().filter(|n| n.cluster_no.is_none()) {
        if best.is_none_or(|b| node.energy > b.energy) {
            best = Some(node);
        }
    }
    best.map(|n| n.id)
}

/// Greedy cluster formation: the richest unassigned node becomes a head and
/// absorbs every unassigned node within `range`, until none are left.
///
/// Expects a state fresh from [`ProtocolState::initialise`].
pub fn make_cluster(state: &mut ProtocolState, topology: &Topology, range: f64) {
    debug_assert!(state.nodes.iter().all(|n| n.cluster_no.is_none() && !n.ss_flag));
    let n = state.nodes.len();
    let mut cluster_id = 0;
    for _ in 0..n {
        let Some(head) = energy_max(&state.nodes) else {
            break;
        };
        let h = head.index();
        cluster_id += 1;
        let cid = ClusterId(cluster_id);
        state.nodes[h].ss_flag = true;
        state.nodes[h].cluster_no = Some(cid);
        for j in 0..n {
            if state.nodes[j].cluster_no.is_none() && topology.distance(h, j) <= range {
                state.nodes[j].cluster_no = Some(cid);
            }
        }
    }
    state.assignment = ClusterAssignment::from_nodes(&state.nodes);
}

/// Marks each live non-head node active or inactive for `tick`. Heads are
/// never marked.
pub fn status_update(state: &mut ProtocolState, tick: u64, activity: &mut dyn ActivitySource) {
    for node in &mut state.nodes {
        node.active = !node.ss_flag && node.is_alive() && activity.is_active(tick, node.id);
    }
}

/// Protocol parameters drawn from a [`SimConfig`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DcpParams {
    pub range: f64,
    pub refresh_time: u64,
    pub head_cost: i64,
    pub active_cost: i64,
    pub idle_cost: i64,
    pub horizon: Option<u64>,
}

impl From<&SimConfig> for DcpParams {
    fn from(c: &SimConfig) -> Self {
        Self {
            range: c.range,
            refresh_time: c.refresh_time,
            head_cost: c.schedule.head_cost_per_cycle,
            active_cost: c.schedule.active_cost_per_tick,
            idle_cost: c.schedule.idle_cost_per_tick,
            horizon: c.horizon,
        }
    }
}

/// How a cycle ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CycleStatus {
    /// Every tick completed; the network is still up.
    Survived,
    /// A node was found with energy `<= 0`.
    Dead,
    /// The tick horizon was reached.
    Horizon,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CycleOutcome {
    pub records: Vec<RoundRecord>,
    pub status: CycleStatus,
}

/// Head charging and the active/sleep ticks of one cycle, without the
/// re-clustering step. Data generated during the cycle is delivered to the
/// base station on the cycle's last tick.
pub fn run_cycle_ticks(
    state: &mut ProtocolState,
    topology: &Topology,
    config: &SimConfig,
    activity: &mut dyn ActivitySource,
    accounting: &mut Accounting,
) -> CycleOutcome {
    let params = DcpParams::from(config);
    let horizon_reached = |tick: u64| params.horizon.is_some_and(|h| tick >= h);
    let mut records = Vec::with_capacity(params.refresh_time as usize);
    let done = |records, status| CycleOutcome { records, status };

    if horizon_reached(state.tick) {
        return done(records, CycleStatus::Horizon);
    }

    for head in state.assignment.subsink() {
        let node = &mut state.nodes[head.index()];
        if node.energy <= 0 {
            state.alive = false;
            return done(records, CycleStatus::Dead);
        }
        accounting.energy.charge(node, params.head_cost);
    }

    let cluster_count = state.assignment.len();
    let e_radio = e_total_all(&config.radio, &state.assignment, topology);
    // (generated tick, count) awaiting the end-of-cycle flush
    let mut pending: Vec<(u64, u64)> = Vec::with_capacity(params.refresh_time as usize);

    for step in 1..=params.refresh_time {
        if horizon_reached(state.tick) {
            return done(records, CycleStatus::Horizon);
        }
        let tick = state.tick + 1;
        status_update(state, tick, activity);
        let mut generated = 0;
        for node in &mut state.nodes {
            if node.energy <= 0 {
                state.alive = false;
                return done(records, CycleStatus::Dead);
            }
            if !node.ss_flag {
                if node.active {
                    accounting.energy.charge(node, params.active_cost);
                    node.active = false;
                    generated += 1;
                } else {
                    accounting.energy.charge(node, params.idle_cost);
                }
            }
        }
        pending.push((tick, generated));
        if step == params.refresh_time {
            for (generated_at, count) in pending.drain(..) {
                accounting.delay.deliver_many(generated_at, tick, count);
            }
        }
        state.tick = tick;
        records.push(record_tick(
            TickSnapshot {
                tick,
                nodes: &state.nodes,
                cluster_count,
                e_total_radio: e_radio,
            },
            accounting,
        ));
    }
    done(records, CycleStatus::Survived)
}

/// Dissolves every cluster and re-forms them from the current residual energies.
pub fn refresh(state: &mut ProtocolState, topology: &Topology, range: f64) {
    state.initialise();
    make_cluster(state, topology, range);
    state.cycle += 1;
}

/// One full refresh cycle: head charging, `refresh_time` ticks, and
/// re-clustering if the network survived.
pub fn dcp_cycle(
    state: &mut ProtocolState,
    topology: &Topology,
    config: &SimConfig,
    activity: &mut dyn ActivitySource,
    accounting: &mut Accounting,
) -> CycleOutcome {
    let outcome = run_cycle_ticks(state, topology, config, activity, accounting);
    if outcome.status == CycleStatus::Survived {
        refresh(state, topology, config.range);
    }
    outcome
}

/// Runs DCP from explicit initial energies with an arbitrary activity source.
pub fn run_dcp_with(
    config: &SimConfig,
    topology: &Topology,
    energies: &[i64],
    activity: &mut dyn ActivitySource,
    seed: u64,
) -> SimulationResult {
    assert_eq!(energies.len(), topology.node_count(), "one energy per node");
    let mut state = ProtocolState::new(energies);
    let mut accounting = Accounting::new(&state.nodes);
    make_cluster(&mut state, topology, config.range);

    let mut records = vec![record_tick(
        TickSnapshot {
            tick: 0,
            nodes: &state.nodes,
            cluster_count: state.assignment.len(),
            e_total_radio: e_total_all(&config.radio, &state.assignment, topology),
        },
        &accounting,
    )];

    let died = loop {
        let outcome = dcp_cycle(&mut state, topology, config, activity, &mut accounting);
        records.extend(outcome.records);
        match outcome.status {
            CycleStatus::Survived => continue,
            CycleStatus::Dead => break true,
            CycleStatus::Horizon => break false,
        }
    };

    SimulationResult {
        protocol: Protocol::Dcp,
        seed,
        records,
        lifetime: state.tick,
        died,
        final_nodes: state.nodes,
    }
}

/// Runs DCP with uniform initial energy and seeded Bernoulli activity.
pub fn run_dcp(config: &SimConfig, topology: &Topology, seed: u64) -> SimulationResult {
    let energies = vec![config.initial_units(); topology.node_count()];
    let mut activity = BernoulliActivity::new(seed, config.p_active);
    run_dcp_with(config, topology, &energies, &mut activity, seed)
}
