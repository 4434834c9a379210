//! Directed road network with travel-time edge costs, node merging for raw
//! segment input, and deterministic shortest-path queries.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Node identifier within a network.
pub type NodeId = u32;

#[derive(Debug, Error)]
pub enum NetworkError {
    #[error("no road segments given")]
    NoSegments,
    #[error("merge tolerance must be >= 0, got {0}")]
    NegativeTolerance(f64),
    #[error("no depot flagged")]
    NoDepot,
    #[error("more than one depot flagged")]
    MultipleDepots,
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("edge ({from}, {to}) refers to unknown node")]
    UnknownEndpoint { from: NodeId, to: NodeId },
    #[error("edge ({from}, {to}): length must be > 0, got {length}")]
    NonPositiveLength { from: NodeId, to: NodeId, length: f64 },
    #[error("edge ({from}, {to}): speed limit must be > 0, got {speed}")]
    NonPositiveSpeed { from: NodeId, to: NodeId, speed: f64 },
    #[error("parallel edge ({from}, {to})")]
    DuplicateEdge { from: NodeId, to: NodeId },
    #[error("self-loop edge at node {0} (merge tolerance too large?)")]
    SelfLoop(NodeId),
    #[error("network is not strongly connected: node {0} cannot reach or be reached from the depot")]
    NotStronglyConnected(NodeId),
    #[error("unknown node id {0}")]
    UnknownNode(NodeId),
    #[error("no edge between consecutive path nodes {from} and {to}")]
    MissingEdge { from: NodeId, to: NodeId },
    #[error("path must contain at least one node")]
    EmptyPath,
}

/// Planar position in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Road segment shape; arcs carry a lower speed limit in the simulator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Straight,
    Arc,
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub position: Point,
    pub is_depot: bool,
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub length_m: f64,
    pub speed_limit_mps: f64,
    pub geometry: Geometry,
    cost_s: f64,
}

impl Edge {
    pub fn new(
        from: NodeId,
        to: NodeId,
        length_m: f64,
        speed_limit_mps: f64,
        geometry: Geometry,
    ) -> Result<Self, NetworkError> {
        if length_m <= 0.0 || !length_m.is_finite() {
            return Err(NetworkError::NonPositiveLength { from, to, length: length_m });
        }
        if speed_limit_mps <= 0.0 || !speed_limit_mps.is_finite() {
            return Err(NetworkError::NonPositiveSpeed { from, to, speed: speed_limit_mps });
        }
        Ok(Edge {
            from,
            to,
            length_m,
            speed_limit_mps,
            geometry,
            cost_s: length_m / speed_limit_mps,
        })
    }

    /// Travel time in seconds, fixed at construction.
    pub fn cost_s(&self) -> f64 {
        self.cost_s
    }
}

/// Which end of a raw segment carries the depot flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentEnd {
    Start,
    End,
}

/// Raw one-way road segment, before endpoint merging.
#[derive(Debug, Clone)]
pub struct RoadSegment {
    pub start: Point,
    pub end: Point,
    pub length_m: f64,
    pub speed_limit_mps: f64,
    pub geometry: Geometry,
    pub depot: Option<SegmentEnd>,
}

/// Shortest-path result: node sequence plus its summed edge cost in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub nodes: Vec<NodeId>,
    pub cost: f64,
}

/// Immutable directed road graph. All queries are read-only.
#[derive(Debug, Clone)]
pub struct RoadNetwork {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    depot: NodeId,
    index: HashMap<NodeId, usize>,
    edge_index: HashMap<(NodeId, NodeId), usize>,
    // outgoing edge indices per node slot, sorted by target id
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl RoadNetwork {
    pub fn new(mut nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, NetworkError> {
        nodes.sort_by_key(|n| n.id);
        let mut index = HashMap::with_capacity(nodes.len());
        for (slot, node) in nodes.iter().enumerate() {
            if index.insert(node.id, slot).is_some() {
                return Err(NetworkError::DuplicateNode(node.id));
            }
        }
        let depot = {
            let mut depots = nodes.iter().filter(|n| n.is_depot);
            let first = depots.next().ok_or(NetworkError::NoDepot)?;
            if depots.next().is_some() {
                return Err(NetworkError::MultipleDepots);
            }
            first.id
        };

        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); nodes.len()];
        let mut in_edges = vec![Vec::new(); nodes.len()];
        for (i, edge) in edges.iter().enumerate() {
            let (Some(&from), Some(&to)) = (index.get(&edge.from), index.get(&edge.to)) else {
                return Err(NetworkError::UnknownEndpoint { from: edge.from, to: edge.to });
            };
            if edge.from == edge.to {
                return Err(NetworkError::SelfLoop(edge.from));
            }
            if edge_index.insert((edge.from, edge.to), i).is_some() {
                return Err(NetworkError::DuplicateEdge { from: edge.from, to: edge.to });
            }
            out_edges[from].push(i);
            in_edges[to].push(i);
        }
        for list in &mut out_edges {
            list.sort_by_key(|&i| edges[i].to);
        }
        for list in &mut in_edges {
            list.sort_by_key(|&i| edges[i].from);
        }

        let net = RoadNetwork { nodes, edges, depot, index, edge_index, out_edges, in_edges };
        net.check_strong_connectivity()?;
        Ok(net)
    }

    /// Round trips require every node to reach and be reached from the depot.
    fn check_strong_connectivity(&self) -> Result<(), NetworkError> {
        let depot_slot = self.index[&self.depot];
        let forward = self.reachable(depot_slot, &self.out_edges, |e| self.index[&e.to]);
        let backward = self.reachable(depot_slot, &self.in_edges, |e| self.index[&e.from]);
        for (slot, node) in self.nodes.iter().enumerate() {
            if !forward[slot] || !backward[slot] {
                return Err(NetworkError::NotStronglyConnected(node.id));
            }
        }
        Ok(())
    }

    fn reachable(
        &self,
        start: usize,
        adjacency: &[Vec<usize>],
        target: impl Fn(&Edge) -> usize,
    ) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(slot) = stack.pop() {
            for &e in &adjacency[slot] {
                let next = target(&self.edges[e]);
                if !seen[next] {
                    seen[next] = true;
                    stack.push(next);
                }
            }
        }
        seen
    }

    pub fn depot(&self) -> NodeId {
        self.depot
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.index.get(&id).map(|&slot| &self.nodes[slot])
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn edge_between(&self, from: NodeId, to: NodeId) -> Option<&Edge> {
        self.edge_index.get(&(from, to)).map(|&i| &self.edges[i])
    }

    fn slot(&self, id: NodeId) -> Result<usize, NetworkError> {
        self.index.get(&id).copied().ok_or(NetworkError::UnknownNode(id))
    }

    /// Minimum-cost travel times from every node to `target` (Dijkstra on the
    /// reversed graph). Every entry is finite thanks to strong connectivity.
    fn costs_to(&self, target: usize) -> Vec<f64> {
        use std::cmp::Ordering;
        use std::collections::BinaryHeap;

        #[derive(PartialEq)]
        struct Entry {
            cost: f64,
            slot: usize,
        }
        impl Eq for Entry {}
        impl Ord for Entry {
            fn cmp(&self, other: &Self) -> Ordering {
                // reversed for a min-heap; costs are finite, ties by slot for determinism
                other
                    .cost
                    .partial_cmp(&self.cost)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| other.slot.cmp(&self.slot))
            }
        }
        impl PartialOrd for Entry {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let mut dist = vec![f64::INFINITY; self.nodes.len()];
        let mut heap = BinaryHeap::new();
        dist[target] = 0.0;
        heap.push(Entry { cost: 0.0, slot: target });
        while let Some(Entry { cost, slot }) = heap.pop() {
            if cost > dist[slot] {
                continue;
            }
            for &e in &self.in_edges[slot] {
                let edge = &self.edges[e];
                let prev = self.index[&edge.from];
                let next_cost = dist[slot] + edge.cost_s;
                if next_cost < dist[prev] {
                    dist[prev] = next_cost;
                    heap.push(Entry { cost: next_cost, slot: prev });
                }
            }
        }
        dist
    }

    /// Minimum-cost path from `from` to `to`. Among equal-cost paths the
    /// lexicographically smallest node-id sequence is returned.
    pub fn shortest_path(&self, from: NodeId, to: NodeId) -> Result<Path, NetworkError> {
        let from_slot = self.slot(from)?;
        let to_slot = self.slot(to)?;
        if from == to {
            return Ok(Path { nodes: vec![from], cost: 0.0 });
        }
        let dist = self.costs_to(to_slot);
        debug_assert!(dist[from_slot].is_finite());

        // Walk forward, always taking the smallest next id that stays on a
        // minimum-cost route. Each final label equals `dist[w] + cost` exactly
        // for the relaxation that produced it, so the bitwise comparison below
        // always finds a successor.
        let mut nodes = vec![from];
        let mut current = from_slot;
        while current != to_slot {
            let mut next = None;
            for &e in &self.out_edges[current] {
                let edge = &self.edges[e];
                let w = self.index[&edge.to];
                #[allow(clippy::float_cmp)]
                if dist[w] + edge.cost_s == dist[current] {
                    next = Some(w);
                    break; // out_edges sorted by target id
                }
            }
            current = next.expect("strongly connected network always has a successor");
            nodes.push(self.nodes[current].id);
        }
        let cost = self.path_cost(&nodes)?;
        Ok(Path { nodes, cost })
    }

    /// Total cost of a node sequence, summed edge by edge in order.
    pub fn path_cost(&self, nodes: &[NodeId]) -> Result<f64, NetworkError> {
        if nodes.is_empty() {
            return Err(NetworkError::EmptyPath);
        }
        self.slot(nodes[0])?;
        let mut cost = 0.0;
        for pair in nodes.windows(2) {
            let edge = self
                .edge_between(pair[0], pair[1])
                .ok_or(NetworkError::MissingEdge { from: pair[0], to: pair[1] })?;
            cost += edge.cost_s;
        }
        Ok(cost)
    }
}

/// Build a network from raw segments, unifying endpoints that lie within
/// `merge_tolerance` of each other (transitive closure, union-find). Merged
/// node positions are the centroid of their member endpoints.
pub fn build_network(
    segments: &[RoadSegment],
    merge_tolerance: f64,
) -> Result<RoadNetwork, NetworkError> {
    let (nodes, edges) = merge_segments(segments, merge_tolerance)?;
    RoadNetwork::new(nodes, edges)
}

/// The merging step of [`build_network`], before graph validation.
fn merge_segments(
    segments: &[RoadSegment],
    merge_tolerance: f64,
) -> Result<(Vec<Node>, Vec<Edge>), NetworkError> {
    if segments.is_empty() {
        return Err(NetworkError::NoSegments);
    }
    if merge_tolerance < 0.0 || !merge_tolerance.is_finite() {
        return Err(NetworkError::NegativeTolerance(merge_tolerance));
    }

    // Two endpoints per segment: index 2i = start, 2i + 1 = end.
    let points: Vec<Point> = segments
        .iter()
        .flat_map(|s| [s.start, s.end])
        .collect();

    let mut uf = UnionFind::new(points.len());
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].distance(&points[j]) <= merge_tolerance {
                uf.union(i, j);
            }
        }
    }

    // Assign node ids in order of first endpoint appearance.
    let mut group_of_root: HashMap<usize, NodeId> = HashMap::new();
    let mut group_points: Vec<Vec<Point>> = Vec::new();
    let mut endpoint_node: Vec<NodeId> = Vec::with_capacity(points.len());
    for (i, point) in points.iter().enumerate() {
        let root = uf.find(i);
        let id = *group_of_root.entry(root).or_insert_with(|| {
            group_points.push(Vec::new());
            (group_points.len() - 1) as NodeId
        });
        group_points[id as usize].push(*point);
        endpoint_node.push(id);
    }

    let mut depot_node = None;
    let mut depot_flags = 0usize;
    for (i, segment) in segments.iter().enumerate() {
        if let Some(end) = segment.depot {
            depot_flags += 1;
            let endpoint = match end {
                SegmentEnd::Start => 2 * i,
                SegmentEnd::End => 2 * i + 1,
            };
            depot_node = Some(endpoint_node[endpoint]);
        }
    }
    match depot_flags {
        0 => return Err(NetworkError::NoDepot),
        1 => {}
        _ => return Err(NetworkError::MultipleDepots),
    }
    let depot_node = depot_node.unwrap();

    let nodes: Vec<Node> = group_points
        .iter()
        .enumerate()
        .map(|(id, members)| {
            let n = members.len() as f64;
            let x = members.iter().map(|p| p.x).sum::<f64>() / n;
            let y = members.iter().map(|p| p.y).sum::<f64>() / n;
            Node {
                id: id as NodeId,
                position: Point::new(x, y),
                is_depot: id as NodeId == depot_node,
            }
        })
        .collect();

    let mut edges = Vec::with_capacity(segments.len());
    for (i, segment) in segments.iter().enumerate() {
        edges.push(Edge::new(
            endpoint_node[2 * i],
            endpoint_node[2 * i + 1],
            segment.length_m,
            segment.speed_limit_mps,
            segment.geometry,
        )?);
    }

    Ok((nodes, edges))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // attach the larger root under the smaller so ids stay stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

#[cfg(test)]
fn seg(
    start: (f64, f64),
    end: (f64, f64),
    length: f64,
    speed: f64,
    geometry: Geometry,
    depot: Option<SegmentEnd>,
) -> RoadSegment {
    RoadSegment {
        start: Point::new(start.0, start.1),
        end: Point::new(end.0, end.1),
        length_m: length,
        speed_limit_mps: speed,
        geometry,
        depot,
    }
}

/// 12 raw segments with three near-coincident junction clusters (J1, J2, J3)
/// and two exact-coincident inner nodes (A, B). Hand enumeration at tolerance
/// 0.05 gives 5 nodes and 12 edges; J1 = node 0 is the depot.
#[cfg(test)]
pub(crate) fn twelve_segment_fixture() -> Vec<RoadSegment> {
    vec![
        seg((0.0, 0.0), (10.0, 0.0), 10.0, 0.5, Geometry::Straight, Some(SegmentEnd::Start)),
        seg((10.0, 0.02), (0.0, 0.02), 10.0, 0.5, Geometry::Straight, None),
        seg((10.02, 0.0), (5.0, 8.0), 9.4, 0.5, Geometry::Straight, None),
        seg((5.0, 8.02), (10.0, 0.04), 9.4, 0.5, Geometry::Straight, None),
        seg((4.98, 8.0), (0.02, 0.0), 9.4, 0.5, Geometry::Straight, None),
        seg((0.0, 0.04), (5.02, 8.0), 9.4, 0.5, Geometry::Straight, None),
        seg((0.0, 0.06), (2.0, 4.0), 4.5, 0.5, Geometry::Straight, None),
        seg((2.0, 4.0), (5.0, 7.98), 5.0, 0.25, Geometry::Arc, None),
        seg((5.04, 8.0), (2.0, 4.0), 5.0, 0.25, Geometry::Arc, None),
        seg((2.0, 4.0), (0.02, 0.06), 4.5, 0.5, Geometry::Straight, None),
        seg((10.0, 0.06), (7.0, 4.0), 5.0, 0.25, Geometry::Arc, None),
        seg((7.0, 4.0), (10.04, 0.04), 5.0, 0.25, Geometry::Arc, None),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_segments_sharing_an_endpoint_merge() {
        // merging alone yields a 3-node chain with 2 edges; a chain cannot be
        // strongly connected, so the full build reports that separately
        let segments = vec![
            seg((0.0, 0.0), (10.0, 0.0), 10.0, 0.5, Geometry::Straight, Some(SegmentEnd::Start)),
            seg((10.0, 0.03), (20.0, 0.0), 10.0, 0.5, Geometry::Straight, None),
        ];
        let (nodes, edges) = merge_segments(&segments, 0.05).unwrap();
        assert_eq!(nodes.len(), 3);
        assert_eq!(edges.len(), 2);
        assert!(matches!(
            build_network(&segments, 0.05),
            Err(NetworkError::NotStronglyConnected(_))
        ));
    }

    #[test]
    fn zero_tolerance_merges_only_exact_coincidence() {
        let mk = |gap: f64| {
            vec![
                seg((0.0, 0.0), (5.0, 0.0), 5.0, 0.5, Geometry::Straight, Some(SegmentEnd::Start)),
                seg((5.0, gap), (0.0, 0.0), 5.0, 0.5, Geometry::Straight, None),
            ]
        };
        let (nodes, _) = merge_segments(&mk(0.0), 0.0).unwrap();
        assert_eq!(nodes.len(), 2);
        // the 1 mm pair stays distinct while the exact (0, 0) pair merges
        let (nodes, _) = merge_segments(&mk(0.001), 0.0).unwrap();
        assert_eq!(nodes.len(), 3);
        assert!(matches!(
            build_network(&mk(0.001), 0.0),
            Err(NetworkError::NotStronglyConnected(_))
        ));
        assert!(matches!(
            merge_segments(&mk(0.0), -0.1),
            Err(NetworkError::NegativeTolerance(_))
        ));
    }

    #[test]
    fn twelve_segment_fixture_topology_matches_hand_enumeration() {
        let net = build_network(&twelve_segment_fixture(), 0.05).unwrap();
        assert_eq!(net.nodes().len(), 5);
        assert_eq!(net.edges().len(), 12);
        assert_eq!(net.depot(), 0);

        // Centroids of the hand-listed endpoint groups.
        let j1 = net.node(0).unwrap().position;
        assert_relative_eq!(j1.x, 0.04 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(j1.y, 0.18 / 6.0, max_relative = 1e-12);
        let j2 = net.node(1).unwrap().position;
        assert_relative_eq!(j2.x, 60.06 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(j2.y, 0.16 / 6.0, max_relative = 1e-12);
        let j3 = net.node(2).unwrap().position;
        assert_relative_eq!(j3.x, 30.04 / 6.0, max_relative = 1e-12);
        assert_relative_eq!(j3.y, 8.0, max_relative = 1e-12);
        let a = net.node(3).unwrap().position;
        assert_eq!((a.x, a.y), (2.0, 4.0));
        let b = net.node(4).unwrap().position;
        assert_eq!((b.x, b.y), (7.0, 4.0));

        // Transitive closure: (0, 0) and (0, 0.06) are 0.06 apart (beyond the
        // 0.05 tolerance) yet merged through the chain of closer endpoints.
        assert_eq!(net.edge_between(0, 3).map(|e| e.cost_s()), Some(9.0));
    }

    #[test]
    fn build_rejects_bad_segments() {
        let base = twelve_segment_fixture();
        assert!(matches!(build_network(&[], 0.05), Err(NetworkError::NoSegments)));

        let mut no_depot = base.clone();
        no_depot[0].depot = None;
        assert!(matches!(build_network(&no_depot, 0.05), Err(NetworkError::NoDepot)));

        let mut bad_length = base.clone();
        bad_length[3].length_m = 0.0;
        assert!(matches!(
            build_network(&bad_length, 0.05),
            Err(NetworkError::NonPositiveLength { .. })
        ));

        let mut bad_speed = base.clone();
        bad_speed[3].speed_limit_mps = -1.0;
        assert!(matches!(
            build_network(&bad_speed, 0.05),
            Err(NetworkError::NonPositiveSpeed { .. })
        ));

        // dropping the only edge back from B leaves B unable to reach the depot
        let mut disconnected = base;
        disconnected.truncate(11);
        assert!(matches!(
            build_network(&disconnected, 0.05),
            Err(NetworkError::NotStronglyConnected(4))
        ));
    }

    fn triangle() -> RoadNetwork {
        // direct edge 0 -> 2 costs 3, the two-hop route via 1 costs 2
        let nodes = vec![
            Node { id: 0, position: Point::new(0.0, 0.0), is_depot: true },
            Node { id: 1, position: Point::new(1.0, 0.0), is_depot: false },
            Node { id: 2, position: Point::new(2.0, 0.0), is_depot: false },
        ];
        let edges = vec![
            Edge::new(0, 1, 1.0, 1.0, Geometry::Straight).unwrap(),
            Edge::new(1, 2, 1.0, 1.0, Geometry::Straight).unwrap(),
            Edge::new(0, 2, 3.0, 1.0, Geometry::Straight).unwrap(),
            Edge::new(2, 0, 1.0, 1.0, Geometry::Straight).unwrap(),
        ];
        RoadNetwork::new(nodes, edges).unwrap()
    }

    #[test]
    fn shortest_path_identity_is_zero_cost() {
        let net = triangle();
        let path = net.shortest_path(0, 0).unwrap();
        assert_eq!(path.nodes, vec![0]);
        assert_eq!(path.cost, 0.0);
    }

    #[test]
    fn shortest_path_prefers_cheaper_two_hop_route() {
        let net = triangle();
        let path = net.shortest_path(0, 2).unwrap();
        assert_eq!(path.nodes, vec![0, 1, 2]);
        assert_eq!(path.cost, 2.0);
    }

    #[test]
    fn shortest_path_breaks_cost_ties_lexicographically() {
        // two equal-cost routes 0 -> 1 -> 3 and 0 -> 2 -> 3
        let nodes = (0..4)
            .map(|id| Node {
                id,
                position: Point::new(id as f64, 0.0),
                is_depot: id == 0,
            })
            .collect();
        let mk = |f, t| Edge::new(f, t, 1.0, 1.0, Geometry::Straight).unwrap();
        let edges = vec![mk(0, 1), mk(0, 2), mk(1, 3), mk(2, 3), mk(3, 0)];
        let net = RoadNetwork::new(nodes, edges).unwrap();
        let path = net.shortest_path(0, 3).unwrap();
        assert_eq!(path.nodes, vec![0, 1, 3]);
    }

    #[test]
    fn shortest_path_rejects_unknown_nodes() {
        let net = triangle();
        assert!(matches!(net.shortest_path(0, 9), Err(NetworkError::UnknownNode(9))));
    }

    #[test]
    fn path_cost_cases() {
        let net = build_network(&twelve_segment_fixture(), 0.05).unwrap();
        // single edge: 10 m at 0.5 m/s
        assert_eq!(net.path_cost(&[0, 1]).unwrap(), 20.0);
        // one-node sequence is an empty sum
        assert_eq!(net.path_cost(&[2]).unwrap(), 0.0);
        // 4-node tour: J1 -> A (9 s), A -> J3 (20 s), J3 -> J1 (18.8 s)
        assert_relative_eq!(net.path_cost(&[0, 3, 2, 0]).unwrap(), 47.8, max_relative = 1e-12);
        assert!(matches!(
            net.path_cost(&[3, 4]),
            Err(NetworkError::MissingEdge { from: 3, to: 4 })
        ));
        assert!(matches!(net.path_cost(&[]), Err(NetworkError::EmptyPath)));
    }

    #[test]
    fn duplicate_and_self_loop_edges_are_rejected() {
        let nodes = vec![
            Node { id: 0, position: Point::new(0.0, 0.0), is_depot: true },
            Node { id: 1, position: Point::new(1.0, 0.0), is_depot: false },
        ];
        let mk = |f, t| Edge::new(f, t, 1.0, 1.0, Geometry::Straight).unwrap();
        assert!(matches!(
            RoadNetwork::new(nodes.clone(), vec![mk(0, 1), mk(1, 0), mk(0, 1)]),
            Err(NetworkError::DuplicateEdge { from: 0, to: 1 })
        ));
        assert!(matches!(
            RoadNetwork::new(nodes, vec![mk(0, 1), mk(1, 0), mk(1, 1)]),
            Err(NetworkError::SelfLoop(1))
        ));
    }
}
