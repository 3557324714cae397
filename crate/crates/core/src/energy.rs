//! Energy bookkeeping.
//!
//! Two accountings live side by side. [`EnergySchedule`] is the integer
//! per-tick decrement schedule that drives the protocol state machines.
//! [`RadioModel`] is a first-order radio model (electronics cost plus a
//! distance-squared amplifier cost) used only for the per-cluster aggregation
//! energy diagnostic, [`e_total`].

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusterAssignment, ClusterId, UnknownCluster};
use crate::topology::Topology;

/// Integer decrement schedule, in energy units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySchedule {
    /// Charged to every head once per refresh cycle.
    pub head_cost_per_cycle: i64,
    /// Charged to a non-head on a tick where it forwards data.
    pub active_cost_per_tick: i64,
    /// Charged to a non-head on a tick where it sleeps.
    pub idle_cost_per_tick: i64,
    /// Conversion from Joules to schedule units.
    pub units_per_joule: f64,
}

impl Default for EnergySchedule {
    fn default() -> Self {
        Self {
            head_cost_per_cycle: 10,
            active_cost_per_tick: 2,
            idle_cost_per_tick: 1,
            units_per_joule: 1000.0,
        }
    }
}

impl EnergySchedule {
    pub fn is_ordered(&self) -> bool {
        self.head_cost_per_cycle >= self.active_cost_per_tick
            && self.active_cost_per_tick >= self.idle_cost_per_tick
            && self.idle_cost_per_tick >= 0
    }

    /// Initial per-node energy in schedule units, rounded to the nearest unit.
    pub fn joules_to_units(&self, joules: f64) -> i64 {
        (joules * self.units_per_joule).round() as i64
    }
}

/// First-order radio model parameters (Joules, bits, meters).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadioModel {
    /// Electronics energy per bit, paid on both transmit and receive.
    pub e_elec: f64,
    /// Amplifier energy per bit per square meter.
    pub e_amp: f64,
    pub message_bits: f64,
}

impl Default for RadioModel {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            e_amp: 100e-12,
            message_bits: 2000.0,
        }
    }
}

impl RadioModel {
    pub fn is_valid(&self) -> bool {
        self.e_elec >= 0.0 && self.e_amp >= 0.0 && self.message_bits >= 0.0
    }
}

/// Energy to transmit one message over `dist` meters.
pub fn tx_energy(model: &RadioModel, dist: f64) -> f64 {
    model.e_elec * model.message_bits + model.e_amp * model.message_bits * dist * dist
}

/// Energy to receive one message.
pub fn rx_energy(model: &RadioModel) -> f64 {
    model.e_elec * model.message_bits
}

/// Aggregation energy for one cluster: every member transmits to the head and
/// the head receives it, then the head sends one aggregate to the base station.
pub fn e_total(
    model: &RadioModel,
    assignment: &ClusterAssignment,
    topology: &Topology,
    cluster_id: ClusterId,
) -> Result<f64, UnknownCluster> {
    let cluster = assignment
        .cluster(cluster_id)
        .ok_or(UnknownCluster(cluster_id.0))?;
    let head = cluster.head.index();
    let rx = rx_energy(model);
    let intra: f64 = cluster
        .members
        .iter()
        .map(|m| tx_energy(model, topology.distance(m.index(), head)) + rx)
        .sum();
    Ok(intra + tx_energy(model, topology.dist_to_bs(head)))
}

/// Sum of [`e_total`] over every cluster in the assignment.
pub fn e_total_all(model: &RadioModel, assignment: &ClusterAssignment, topology: &Topology) -> f64 {
    assignment
        .clusters()
        .iter()
        .map(|c| e_total(model, assignment, topology, c.id).expect("cluster from its own assignment"))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{Node, NodeId};
    use crate::topology::Position;
    use proptest::prelude::*;

    fn assignment(heads_members: &[(usize, &[usize])], n: usize) -> ClusterAssignment {
        let mut nodes: Vec<Node> = (0..n).map(|i| Node::new(NodeId::from_index(i), 1)).collect();
        for (c, (head, members)) in heads_members.iter().enumerate() {
            nodes[head - 1].cluster_no = Some(ClusterId(c + 1));
            nodes[head - 1].ss_flag = true;
            for m in *members {
                nodes[m - 1].cluster_no = Some(ClusterId(c + 1));
            }
        }
        ClusterAssignment::from_nodes(&nodes)
    }

    #[test]
    fn tx_at_zero_distance_is_electronics_only() {
        let m = RadioModel::default();
        assert_eq!(tx_energy(&m, 0.0), m.e_elec * m.message_bits);
        assert_eq!(tx_energy(&m, 0.0), rx_energy(&m));
    }

    #[test]
    fn pure_square_term() {
        let m = RadioModel { e_elec: 0.0, e_amp: 1.0, message_bits: 1.0 };
        assert_eq!(tx_energy(&m, 3.0), 9.0);
    }

    #[test]
    fn conventional_constants_at_100m() {
        // 50e-9 * 2000 = 1e-4 (electronics); 100e-12 * 2000 * 100^2 = 2e-3 (amplifier).
        let expect = 1.0e-4 + 2.0e-3;
        let got = tx_energy(&RadioModel::default(), 100.0);
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn rx_cases() {
        let empty = RadioModel { message_bits: 0.0, ..RadioModel::default() };
        assert_eq!(rx_energy(&empty), 0.0);
        let unit = RadioModel { e_elec: 1.0, e_amp: 0.0, message_bits: 7.0 };
        assert_eq!(rx_energy(&unit), 7.0);
    }

    #[test]
    fn lone_head_at_base_station() {
        let topo = Topology::from_positions(vec![Position::new(5.0, 5.0)], Position::new(5.0, 5.0));
        let a = assignment(&[(1, &[])], 1);
        let m = RadioModel::default();
        assert_eq!(e_total(&m, &a, &topo, ClusterId(1)).unwrap(), tx_energy(&m, 0.0));
    }

    #[test]
    fn single_member_cluster() {
        let topo = Topology::from_positions(
            vec![Position::new(0.0, 0.0), Position::new(0.0, 7.0)],
            Position::new(30.0, 40.0),
        );
        let a = assignment(&[(1, &[2])], 2);
        let m = RadioModel::default();
        let expect = tx_energy(&m, 7.0) + rx_energy(&m) + tx_energy(&m, 50.0);
        assert_eq!(e_total(&m, &a, &topo, ClusterId(1)).unwrap(), expect);
    }

    #[test]
    fn four_node_cluster_term_by_term() {
        let pos = [(10.0, 10.0), (13.0, 14.0), (4.0, 2.0), (10.0, 30.0)];
        let bs = (60.0, 10.0);
        let topo = Topology::from_positions(
            pos.iter().map(|&(x, y)| Position::new(x, y)).collect(),
            Position::new(bs.0, bs.1),
        );
        let a = assignment(&[(1, &[2, 3, 4])], 4);
        let (e_elec, e_amp, k) = (50e-9, 100e-12, 2000.0);
        let m = RadioModel { e_elec, e_amp, message_bits: k };
        // member distances: 5, 10, 20; head to BS: 50
        let mut expect = 0.0;
        for d in [5.0f64, 10.0, 20.0] {
            expect += e_elec * k + e_amp * k * d * d;
            expect += e_elec * k;
        }
        expect += e_elec * k + e_amp * k * 2500.0;
        let got = e_total(&m, &a, &topo, ClusterId(1)).unwrap();
        assert!((got - expect).abs() <= 1e-12 * expect);
    }

    #[test]
    fn unknown_cluster_is_an_error() {
        let topo = Topology::from_positions(vec![Position::new(0.0, 0.0)], Position::new(0.0, 0.0));
        let a = assignment(&[(1, &[])], 1);
        assert_eq!(
            e_total(&RadioModel::default(), &a, &topo, ClusterId(2)),
            Err(UnknownCluster(2))
        );
    }

    #[test]
    fn schedule_defaults() {
        let s = EnergySchedule::default();
        assert!(s.is_ordered());
        assert_eq!(s.joules_to_units(0.5), 500);
    }

    proptest! {
        #[test]
        fn tx_dominates_rx(d in 0.0f64..5000.0, e_elec in 0.0f64..1e-6, e_amp in 0.0f64..1e-9, k in 0.0f64..1e5) {
            let m = RadioModel { e_elec, e_amp, message_bits: k };
            prop_assert!(tx_energy(&m, d) >= rx_energy(&m));
        }

        #[test]
        fn tx_monotone_in_distance(a in 0.0f64..5000.0, b in 0.0f64..5000.0) {
            let m = RadioModel::default();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(tx_energy(&m, lo) <= tx_energy(&m, hi));
        }

        #[test]
        fn e_total_is_additive_over_member_split(
            coords in proptest::collection::vec((0.0f64..500.0, 0.0f64..500.0), 2..10),
            split in any::<u64>(),
        ) {
            let n = coords.len();
            let topo = Topology::from_positions(
                coords.iter().map(|&(x, y)| Position::new(x, y)).collect(),
                Position::new(250.0, 250.0),
            );
            let members: Vec<usize> = (2..=n).collect();
            let whole = assignment(&[(1, &members)], n);
            let m = RadioModel::default();
            let total = e_total(&m, &whole, &topo, ClusterId(1)).unwrap();

            let (left, right): (Vec<usize>, Vec<usize>) =
                members.iter().partition(|&&id| split >> (id % 64) & 1 == 1);
            let head_only = tx_energy(&m, topo.dist_to_bs(0));
            let part = |ids: &[usize]| {
                e_total(&m, &assignment(&[(1, ids)], n), &topo, ClusterId(1)).unwrap() - head_only
            };
            let recombined = part(&left) + part(&right) + head_only;
            prop_assert!((total - recombined).abs() <= 1e-12 * total.max(1e-30));
        }
    }
}
