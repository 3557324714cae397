//! Node state and cluster partitions shared by both protocols.

use std::fmt;

use thiserror::Error;

/// 1-based node identifier.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    /// Builds the id for a 0-based index.
    pub fn from_index(index: usize) -> Self {
        NodeId(index + 1)
    }

    pub fn index(self) -> usize {
        self.0 - 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// 1-based cluster identifier. "Unassigned" is `None` on [`Node::cluster_no`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClusterId(pub usize);

#[derive(Debug, Error, PartialEq, Eq)]
#[error("unknown cluster id {0}")]
pub struct UnknownCluster(pub usize);

/// Per-sensor state. Energy is in integer schedule units and may go negative
/// on the tick that exhausts it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: NodeId,
    pub energy: i64,
    pub cluster_no: Option<ClusterId>,
    /// True iff this node is a cluster head (subsink).
    pub ss_flag: bool,
    /// True iff the node has data pending this tick.
    pub active: bool,
}

impl Node {
    pub fn new(id: NodeId, energy: i64) -> Self {
        Self {
            id,
            energy,
            cluster_no: None,
            ss_flag: false,
            active: false,
        }
    }

    pub fn is_alive(&self) -> bool {
        self.energy > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cluster {
    pub id: ClusterId,
    pub head: NodeId,
    /// Members other than the head, in ascending id order.
    pub members: Vec<NodeId>,
}

/// A partition of the node set into clusters, one head each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClusterAssignment {
    /// Indexed by `ClusterId.0 - 1`.
    clusters: Vec<Cluster>,
}

impl ClusterAssignment {
    /// Rebuilds the assignment from node flags. Cluster ids must be dense
    /// `1..=k` and each must have exactly one head.
    pub fn from_nodes(nodes: &[Node]) -> Self {
        let k = nodes
            .iter()
            .filter_map(|n| n.cluster_no)
            .map(|c| c.0)
            .max()
            .unwrap_or(0);
        let mut heads: Vec<Option<NodeId>> = vec![None; k];
        let mut members: Vec<Vec<NodeId>> = vec![Vec::new(); k];
        for node in nodes {
            let Some(cid) = node.cluster_no else { continue };
            if node.ss_flag {
                assert!(heads[cid.0 - 1].is_none(), "cluster {} has two heads", cid.0);
                heads[cid.0 - 1] = Some(node.id);
            } else {
                members[cid.0 - 1].push(node.id);
            }
        }
        let clusters = heads
            .into_iter()
            .zip(members)
            .enumerate()
            .map(|(i, (head, members))| Cluster {
                id: ClusterId(i + 1),
                head: head.unwrap_or_else(|| panic!("cluster {} has no head", i + 1)),
                members,
            })
            .collect();
        Self { clusters }
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn cluster(&self, id: ClusterId) -> Option<&Cluster> {
        id.0.checked_sub(1).and_then(|i| self.clusters.get(i))
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    /// Head ids in election order.
    pub fn subsink(&self) -> Vec<NodeId> {
        self.clusters.iter().map(|c| c.head).collect()
    }
}
