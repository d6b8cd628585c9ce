#![allow(dead_code)]

use wsn_sched_core::topology::Adjacency;
use wsn_sched_core::*;

pub fn ids(v: &[u32]) -> Vec<NodeId> {
    v.iter().map(|&i| NodeId(i)).collect()
}

/// Undirected graph on `n` nodes from an edge list.
pub fn graph(n: usize, edges: &[(u32, u32)]) -> Adjacency {
    let mut adj: Adjacency = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a as usize].push(NodeId(b));
        adj[b as usize].push(NodeId(a));
    }
    for v in &mut adj {
        v.sort();
        v.dedup();
    }
    adj
}

/// Path 0 - 1 - ... - (n-1); node i sits in zone i.
pub fn line(n: usize) -> Topology {
    let edges: Vec<(u32, u32)> = (1..n as u32).map(|i| (i - 1, i)).collect();
    Topology::from_adjacency(graph(n, &edges), 100.0, UnreachablePolicy::Error).unwrap()
}

pub fn profile(name: &str) -> ChipsetProfile {
    find_profile(&default_profiles(), name).unwrap().clone()
}

pub fn quiet(topology: Topology, kind: TableKind) -> Scenario {
    let mut sc = Scenario::new(topology, build_table(kind), profile("TR1001"), 1);
    sc.traffic.report_interval_s = None;
    sc
}

pub fn grid_topology() -> Topology {
    let d = deploy_grid(50, Area::default()).unwrap();
    Topology::build(&d, 150.0, UnreachablePolicy::Error).unwrap()
}
