//! Built-in demo network: a 6x5 street grid with arc corner bypasses and two
//! one-way straight bypass spurs, 40 nodes and 122 directed edges in total.
//! The same map ships as `fixtures/network.toml`.
//!
//! Grid node ids are `row * 5 + col` (rows 0..6 south to north, cols 0..5 west
//! to east) at 2 m spacing; the depot is node 12 at (4, 4). Straight segments
//! are limited to 0.5 m/s and arcs to 0.25 m/s, so a grid hop costs 4 s and an
//! arc hop 6.4 s.

use crate::network::{Edge, Geometry, Node, NodeId, Point, RoadNetwork};

const ROWS: u32 = 6;
const COLS: u32 = 5;

pub const DEMO_DEPOT: NodeId = 12;

/// Delivery nodes of the 6-package demo scenario (`fixtures/scenario.toml`).
pub const DEMO_DELIVERIES: [NodeId; 6] = [0, 4, 25, 29, 16, 33];

pub fn demo_network() -> RoadNetwork {
    let mut nodes = Vec::new();
    for r in 0..ROWS {
        for c in 0..COLS {
            let id = r * COLS + c;
            nodes.push(Node {
                id,
                position: Point::new(2.0 * c as f64, 2.0 * r as f64),
                is_depot: id == DEMO_DEPOT,
            });
        }
    }
    // arc corner bypass nodes, then the one-way spur nodes
    let extra = [
        (30, 0.6, 0.6),
        (31, 7.4, 9.4),
        (32, 0.6, 9.4),
        (33, 7.4, 0.6),
        (34, 10.0, 2.0),
        (35, 10.0, 5.0),
        (36, 10.0, 8.0),
        (37, -2.0, 2.0),
        (38, -2.0, 5.0),
        (39, -2.0, 8.0),
    ];
    for (id, x, y) in extra {
        nodes.push(Node { id, position: Point::new(x, y), is_depot: false });
    }

    let mut edges = Vec::new();
    let both = |edges: &mut Vec<Edge>, a: NodeId, b: NodeId, len: f64, v: f64, geo: Geometry| {
        edges.push(Edge::new(a, b, len, v, geo).unwrap());
        edges.push(Edge::new(b, a, len, v, geo).unwrap());
    };
    for r in 0..ROWS {
        for c in 0..COLS {
            let id = r * COLS + c;
            if c + 1 < COLS {
                both(&mut edges, id, id + 1, 2.0, 0.5, Geometry::Straight);
            }
            if r + 1 < ROWS {
                both(&mut edges, id, id + COLS, 2.0, 0.5, Geometry::Straight);
            }
        }
    }
    // corner bypasses: (entry, arc node, exit), both directions
    for (a, mid, b) in [(1, 30, 5), (28, 31, 24), (20, 32, 26), (3, 33, 9)] {
        both(&mut edges, a, mid, 1.6, 0.25, Geometry::Arc);
        both(&mut edges, mid, b, 1.6, 0.25, Geometry::Arc);
    }
    // one-way spurs: east side northbound, west side southbound
    for (a, b, len) in [(9, 34, 2.0), (34, 35, 3.0), (35, 36, 3.0), (36, 24, 2.0)] {
        edges.push(Edge::new(a, b, len, 0.5, Geometry::Straight).unwrap());
    }
    for (a, b, len) in [(20, 39, 2.0), (39, 38, 3.0), (38, 37, 3.0), (37, 5, 2.0)] {
        edges.push(Edge::new(a, b, len, 0.5, Geometry::Straight).unwrap());
    }

    RoadNetwork::new(nodes, edges).expect("demo network is valid")
}
