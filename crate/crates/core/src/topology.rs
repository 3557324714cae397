//! Node placement, base station location and the all-pairs distance matrix.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::SimConfig;

/// A point in the simulation area, in meters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: &Position) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("node_count must be at least 1")]
    NoNodes,
    #[error("area dimensions must be positive, got {width}x{height}")]
    BadArea { width: f64, height: f64 },
    #[error("position of node {id} ({x}, {y}) lies outside the {width}x{height} area")]
    OutOfArea {
        id: usize,
        x: f64,
        y: f64,
        width: f64,
        height: f64,
    },
    #[error("failed to read positions file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed positions file: {0}")]
    Csv(#[from] csv::Error),
    #[error("positions file ids must be exactly 1..={expected}; {reason}")]
    BadIds { expected: usize, reason: String },
}

/// Static node layout plus precomputed distances.
///
/// Node `i` (0-based index) is the node with id `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Topology {
    positions: Vec<Position>,
    base_station: Position,
    distance: Vec<f64>,
    dist_to_bs: Vec<f64>,
}

impl Topology {
    /// Builds a topology from explicit positions and fills in every distance.
    pub fn from_positions(positions: Vec<Position>, base_station: Position) -> Self {
        let mut topology = Self {
            positions,
            base_station,
            distance: Vec::new(),
            dist_to_bs: Vec::new(),
        };
        topology.cal_distance();
        topology
    }

    /// Recomputes the distance matrix and the node-to-base-station distances.
    ///
    /// Each pair is computed once and mirrored so the matrix is exactly symmetric.
    pub fn cal_distance(&mut self) {
        let n = self.positions.len();
        self.distance = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = self.positions[i].distance_to(&self.positions[j]);
                self.distance[i * n + j] = d;
                self.distance[j * n + i] = d;
            }
        }
        self.dist_to_bs = self
            .positions
            .iter()
            .map(|p| p.distance_to(&self.base_station))
            .collect();
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn base_station(&self) -> Position {
        self.base_station
    }

    /// Distance between the nodes at 0-based indices `i` and `j`.
    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.distance[i * self.positions.len() + j]
    }

    /// Distance from the node at 0-based index `i` to the base station.
    #[inline]
    pub fn dist_to_bs(&self, i: usize) -> f64 {
        self.dist_to_bs[i]
    }

    pub fn dist_to_bs_all(&self) -> &[f64] {
        &self.dist_to_bs
    }
}

/// Places nodes for one run.
///
/// Explicit positions in the config take precedence over random placement.
/// Otherwise `node_count` positions are drawn uniformly over the area from a
/// ChaCha stream keyed by `seed`, so equal inputs give bit-identical output.
pub fn generate_topology(config: &SimConfig, seed: u64) -> Result<Topology, TopologyError> {
    let (width, height) = (config.area_width, config.area_height);
    if !(width > 0.0 && height > 0.0) {
        return Err(TopologyError::BadArea { width, height });
    }
    let base_station = config.base_station();

    let positions = match &config.positions {
        Some(fixed) => {
            if fixed.is_empty() {
                return Err(TopologyError::NoNodes);
            }
            for (i, p) in fixed.iter().enumerate() {
                if !(0.0..=width).contains(&p.x) || !(0.0..=height).contains(&p.y) {
                    return Err(TopologyError::OutOfArea {
                        id: i + 1,
                        x: p.x,
                        y: p.y,
                        width,
                        height,
                    });
                }
            }
            fixed.clone()
        }
        None => {
            if config.node_count == 0 {
                return Err(TopologyError::NoNodes);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..config.node_count)
                .map(|_| Position::new(rng.gen_range(0.0..=width), rng.gen_range(0.0..=height)))
                .collect()
        }
    };

    Ok(Topology::from_positions(positions, base_station))
}

#[derive(Deserialize)]
struct PositionRow {
    id: usize,
    x: f64,
    y: f64,
}

/// Reads an `id,x,y` CSV (with header) whose ids are a permutation of `1..=N`.
pub fn read_positions(path: &Path) -> Result<Vec<Position>, TopologyError> {
    let text = fs::read_to_string(path)?;
    parse_positions(&text)
}

pub fn parse_positions(text: &str) -> Result<Vec<Position>, TopologyError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<PositionRow> = reader.deserialize().collect::<Result<_, _>>()?;
    let expected = rows.len();
    if expected == 0 {
        return Err(TopologyError::NoNodes);
    }
    rows.sort_by_key(|r| r.id);
    for (i, row) in rows.iter().enumerate() {
        if row.id != i + 1 {
            return Err(TopologyError::BadIds {
                expected,
                reason: format!("found id {} where {} was expected", row.id, i + 1),
            });
        }
    }
    Ok(rows.into_iter().map(|r| Position::new(r.x, r.y)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config_with(node_count: usize, w: f64, h: f64) -> SimConfig {
        SimConfig {
            node_count,
            area_width: w,
            area_height: h,
            ..SimConfig::default()
        }
    }

    #[test]
    fn table_defaults_place_450_nodes_inside_the_area() {
        let topo = generate_topology(&SimConfig::default(), 7).unwrap();
        assert_eq!(topo.node_count(), 450);
        for p in topo.positions() {
            assert!((0.0..=1000.0).contains(&p.x) && (0.0..=1000.0).contains(&p.y));
        }
        assert_eq!(topo.base_station(), Position::new(500.0, 500.0));
    }

    #[test]
    fn single_node_has_zero_matrix() {
        let topo = generate_topology(&config_with(1, 10.0, 10.0), 3).unwrap();
        assert_eq!(topo.node_count(), 1);
        assert_eq!(topo.distance(0, 0), 0.0);
    }

    #[test]
    fn injected_positions_override_random_placement() {
        let mut config = config_with(5, 100.0, 100.0);
        config.positions = Some(vec![
            Position::new(0.0, 0.0),
            Position::new(5.0, 0.0),
            Position::new(9.0, 9.0),
            Position::new(1.0, 50.0),
            Position::new(70.0, 2.0),
        ]);
        let topo = generate_topology(&config, 99).unwrap();
        assert_eq!(topo.distance(0, 1), 5.0);
    }

    #[test]
    fn three_four_five() {
        let topo = Topology::from_positions(
            vec![Position::new(0.0, 0.0), Position::new(3.0, 4.0)],
            Position::new(0.0, 0.0),
        );
        assert_eq!(topo.distance(0, 1), 5.0);
        assert_eq!(topo.dist_to_bs(0), 0.0);
        assert_eq!(topo.dist_to_bs(1), 5.0);
    }

    #[test]
    fn matrix_matches_per_pair_recomputation() {
        let topo = generate_topology(&config_with(8, 200.0, 120.0), 11).unwrap();
        let pos = topo.positions();
        for i in 0..8 {
            for j in 0..8 {
                let dx = pos[i].x - pos[j].x;
                let dy = pos[i].y - pos[j].y;
                let expect = (dx * dx + dy * dy).sqrt();
                let got = topo.distance(i, j);
                assert!((got - expect).abs() <= 1e-12 * expect.max(1.0), "{i},{j}");
            }
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            generate_topology(&config_with(0, 10.0, 10.0), 1),
            Err(TopologyError::NoNodes)
        ));
        assert!(matches!(
            generate_topology(&config_with(3, 0.0, 10.0), 1),
            Err(TopologyError::BadArea { .. })
        ));
        let mut config = config_with(1, 10.0, 10.0);
        config.positions = Some(vec![Position::new(11.0, 1.0)]);
        assert!(matches!(
            generate_topology(&config, 1),
            Err(TopologyError::OutOfArea { id: 1, .. })
        ));
    }

    #[test]
    fn positions_csv_is_sorted_by_id() {
        let parsed = parse_positions("id,x,y\n2, 5, 0\n1,0,0\n").unwrap();
        assert_eq!(parsed, vec![Position::new(0.0, 0.0), Position::new(5.0, 0.0)]);
        assert!(matches!(
            parse_positions("id,x,y\n1,0,0\n3,1,1\n"),
            Err(TopologyError::BadIds { .. })
        ));
        assert!(parse_positions("id,x,y\n1,zero,0\n").is_err());
    }

    proptest! {
        #[test]
        fn symmetric_zero_diagonal_and_triangle(seed in any::<u64>(), n in 1usize..24) {
            let topo = generate_topology(&config_with(n, 300.0, 200.0), seed).unwrap();
            for i in 0..n {
                prop_assert_eq!(topo.distance(i, i), 0.0);
                for j in 0..n {
                    prop_assert_eq!(topo.distance(i, j), topo.distance(j, i));
                    for k in 0..n {
                        prop_assert!(topo.distance(i, k) <= topo.distance(i, j) + topo.distance(j, k) + 1e-9);
                    }
                }
            }
        }

        #[test]
        fn same_seed_same_topology(seed in any::<u64>()) {
            let config = config_with(30, 1000.0, 1000.0);
            prop_assert_eq!(generate_topology(&config, seed).unwrap(), generate_topology(&config, seed).unwrap());
        }
    }
}
