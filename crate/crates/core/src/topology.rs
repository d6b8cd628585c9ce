//! Unit-disk connectivity, hop-count time zones and the upstream routing tree.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::types::NodeId;

/// Neighbor lists indexed by node, each sorted ascending.
pub type Adjacency = Vec<Vec<NodeId>>;

/// What to do with nodes that have no path to the gateway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnreachablePolicy {
    #[default]
    Error,
    Exclude,
}

/// Edge `(u, v)` iff `u != v` and their distance is at most `range_cm`.
///
/// Nodes are bucketed into square cells of side `range_cm`, so only the 3x3
/// block of cells around each node needs checking.
pub fn connectivity(deployment: &Deployment, range_cm: f64) -> Result<Adjacency> {
    if !(range_cm > 0.0 && range_cm.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "communication range must be positive, got {range_cm}"
        )));
    }
    let cell_of = |x: f64| (x / range_cm).floor() as i64;
    let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, p) in deployment.positions.iter().enumerate() {
        cells
            .entry((cell_of(p.x_cm), cell_of(p.y_cm)))
            .or_default()
            .push(i);
    }
    let mut adjacency: Adjacency = vec![Vec::new(); deployment.len()];
    for (i, p) in deployment.positions.iter().enumerate() {
        let (cx, cy) = (cell_of(p.x_cm), cell_of(p.y_cm));
        for dx in -1..=1 {
            for dy in -1..=1 {
                let Some(bucket) = cells.get(&(cx + dx, cy + dy)) else {
                    continue;
                };
                for &j in bucket {
                    if j != i && p.distance(&deployment.positions[j]) <= range_cm {
                        adjacency[i].push(NodeId::from(j));
                    }
                }
            }
        }
        adjacency[i].sort_unstable();
    }
    Ok(adjacency)
}

/// Breadth-first hop distance from `gateway`; `None` marks unreachable nodes.
pub fn assign_zones(adjacency: &Adjacency, gateway: NodeId) -> Result<Vec<Option<u32>>> {
    if gateway.index() >= adjacency.len() {
        return Err(Error::InvalidArgument(format!(
            "gateway {gateway} not in a graph of {} nodes",
            adjacency.len()
        )));
    }
    let mut zone = vec![None; adjacency.len()];
    zone[gateway.index()] = Some(0);
    let mut queue = VecDeque::from([gateway]);
    while let Some(u) = queue.pop_front() {
        let next = zone[u.index()].expect("queued nodes are labelled") + 1;
        for &v in &adjacency[u.index()] {
            if zone[v.index()].is_none() {
                zone[v.index()] = Some(next);
                queue.push_back(v);
            }
        }
    }
    Ok(zone)
}

/// Parent of each reachable non-gateway node: its lowest-id neighbor one zone
/// closer to the gateway.
pub fn build_routing(adjacency: &Adjacency, zones: &[Option<u32>]) -> Result<Vec<Option<NodeId>>> {
    let mut parent = vec![None; zones.len()];
    for (i, z) in zones.iter().enumerate() {
        let Some(z) = *z else { continue };
        if z == 0 {
            continue;
        }
        let p = adjacency[i]
            .iter()
            .copied()
            .find(|v| zones[v.index()] == Some(z - 1))
            .ok_or(Error::Routing(NodeId::from(i)))?;
        parent[i] = Some(p);
    }
    Ok(parent)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    adjacency: Adjacency,
    zone: Vec<Option<u32>>,
    parent: Vec<Option<NodeId>>,
    comm_range_cm: f64,
    excluded: Vec<NodeId>,
}

impl Topology {
    pub fn build(deployment: &Deployment, range_cm: f64, policy: UnreachablePolicy) -> Result<Self> {
        let adjacency = connectivity(deployment, range_cm)?;
        Self::from_adjacency(adjacency, range_cm, policy)
    }

    /// Builds zones and routing over an explicit graph with node 0 as gateway.
    pub fn from_adjacency(
        adjacency: Adjacency,
        comm_range_cm: f64,
        policy: UnreachablePolicy,
    ) -> Result<Self> {
        let zone = assign_zones(&adjacency, NodeId::GATEWAY)?;
        let excluded: Vec<NodeId> = zone
            .iter()
            .enumerate()
            .filter(|(_, z)| z.is_none())
            .map(|(i, _)| NodeId::from(i))
            .collect();
        if !excluded.is_empty() && policy == UnreachablePolicy::Error {
            return Err(Error::DisconnectedTopology {
                unreachable: excluded,
            });
        }
        let parent = build_routing(&adjacency, &zone)?;
        Ok(Topology {
            adjacency,
            zone,
            parent,
            comm_range_cm,
            excluded,
        })
    }

    /// Number of node slots, including excluded ones.
    pub fn len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adjacency.is_empty()
    }

    pub fn neighbors(&self, id: NodeId) -> &[NodeId] {
        &self.adjacency[id.index()]
    }

    pub fn adjacency(&self) -> &Adjacency {
        &self.adjacency
    }

    pub fn zone(&self, id: NodeId) -> Option<u32> {
        self.zone[id.index()]
    }

    pub fn zones(&self) -> &[Option<u32>] {
        &self.zone
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.parent[id.index()]
    }

    pub fn comm_range_cm(&self) -> f64 {
        self.comm_range_cm
    }

    pub fn excluded(&self) -> &[NodeId] {
        &self.excluded
    }

    pub fn is_active(&self, id: NodeId) -> bool {
        self.zone[id.index()].is_some()
    }

    /// Reachable nodes in id order.
    pub fn active_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.len()).map(NodeId::from).filter(|&n| self.is_active(n))
    }

    pub fn depth(&self) -> u32 {
        self.zone.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn are_neighbors(&self, a: NodeId, b: NodeId) -> bool {
        self.adjacency[a.index()].binary_search(&b).is_ok()
    }

    /// Plain-text dump: the edge list, then an `id zone parent` table.
    pub fn dump(&self) -> String {
        let mut out = String::from("# edges: u v\n");
        for (u, nbrs) in self.adjacency.iter().enumerate() {
            for v in nbrs.iter().filter(|v| v.index() > u) {
                let _ = writeln!(out, "{u} {v}");
            }
        }
        out.push_str("# nodes: id zone parent\n");
        for (i, z) in self.zone.iter().enumerate() {
            let zone = z.map_or("-".to_string(), |z| z.to_string());
            let parent = self.parent[i].map_or("-".to_string(), |p| p.to_string());
            let _ = writeln!(out, "{i} {zone} {parent}");
        }
        out
    }
}
