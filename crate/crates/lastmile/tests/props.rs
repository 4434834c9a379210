//! Property tests over randomly generated networks, point sets, and
//! delivery assignments.

use lastmile::clustering::{build_tree, DeliverySet};
use lastmile::network::{Edge, Geometry, Node, NodeId, Point, RoadNetwork};
use lastmile::routing::{exact_route, greedy_route, DEFAULT_EXACT_CAP};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random strongly connected network: a spanning cycle over shuffled nodes
/// plus extra edges, derived deterministically from one seed.
fn seeded_graph(seed: u64, max_nodes: u32) -> RoadNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_nodes);
    let nodes: Vec<Node> = (0..n)
        .map(|id| Node {
            id,
            position: Point::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)),
            is_depot: id == 0,
        })
        .collect();
    let mut order: Vec<NodeId> = (0..n).collect();
    for i in (1..order.len()).rev() {
        order.swap(i, rng.gen_range(0..=i));
    }
    let mut pairs: Vec<(NodeId, NodeId)> = Vec::new();
    for i in 0..order.len() {
        pairs.push((order[i], order[(i + 1) % order.len()]));
    }
    for _ in 0..rng.gen_range(0..=2 * n) {
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a != b && !pairs.contains(&(a, b)) {
            pairs.push((a, b));
        }
    }
    let edges = pairs
        .into_iter()
        .map(|(a, b)| {
            let length = rng.gen_range(1..=40) as f64 / 4.0;
            let speed = [0.25, 0.5, 1.0][rng.gen_range(0..3)];
            let geometry = if speed == 0.25 { Geometry::Arc } else { Geometry::Straight };
            Edge::new(a, b, length, speed, geometry).unwrap()
        })
        .collect();
    RoadNetwork::new(nodes, edges).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shortest_path_costs_satisfy_the_triangle_inequality(seed in any::<u64>()) {
        let net = seeded_graph(seed, 8);
        let ids: Vec<NodeId> = net.nodes().iter().map(|n| n.id).collect();
        for &a in &ids {
            for &b in &ids {
                for &c in &ids {
                    let ac = net.shortest_path(a, c).unwrap().cost;
                    let ab = net.shortest_path(a, b).unwrap().cost;
                    let bc = net.shortest_path(b, c).unwrap().cost;
                    prop_assert!(ac <= ab + bc + 1e-9 * (ab + bc).max(1.0));
                }
            }
        }
    }

    #[test]
    fn shortest_paths_are_valid_and_zero_cost_only_when_trivial(seed in any::<u64>()) {
        let net = seeded_graph(seed, 8);
        let ids: Vec<NodeId> = net.nodes().iter().map(|n| n.id).collect();
        for &a in &ids {
            for &b in &ids {
                let path = net.shortest_path(a, b).unwrap();
                // consecutive pairs are edges and the cost is their sum
                prop_assert_eq!(net.path_cost(&path.nodes).unwrap(), path.cost);
                prop_assert_eq!(path.nodes.first(), Some(&a));
                prop_assert_eq!(path.nodes.last(), Some(&b));
                if a == b {
                    prop_assert_eq!(path.cost, 0.0);
                    prop_assert_eq!(path.nodes.len(), 1);
                } else {
                    prop_assert!(path.cost > 0.0);
                }
            }
        }
    }

    #[test]
    fn greedy_routes_are_structurally_sound_and_never_beat_exact(seed in any::<u64>()) {
        let net = seeded_graph(seed, 8);
        let candidates: Vec<NodeId> = net
            .nodes()
            .iter()
            .map(|n| n.id)
            .filter(|&id| id != net.depot())
            .collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(3));
        let m = rng.gen_range(1..=candidates.len().min(5));
        let mut picks = candidates.clone();
        for i in 0..m {
            let j = rng.gen_range(i..picks.len());
            picks.swap(i, j);
        }
        picks.truncate(m);

        let set = DeliverySet::new(&net, &picks).unwrap();
        let assigned: Vec<usize> = (1..=m).collect();
        let greedy = greedy_route(&net, &set, &assigned, 1).unwrap();
        let exact = exact_route(&net, &set, &assigned, 1, DEFAULT_EXACT_CAP).unwrap();
        greedy.validate(&net, &set).unwrap();
        exact.validate(&net, &set).unwrap();
        prop_assert!(exact.round_trip_time <= greedy.round_trip_time);
        // planned delivery times never exceed the round trip
        for route in [&greedy, &exact] {
            for &t in route.delivery_times.values() {
                prop_assert!(t >= 0.0 && t <= route.round_trip_time);
            }
        }
    }

    #[test]
    fn cluster_cuts_partition_and_nest(points in prop::collection::vec((-50.0..50.0f64, -50.0..50.0f64), 1..12)) {
        let mut nodes = vec![Node { id: 0, position: Point::new(1e3, 1e3), is_depot: true }];
        for (i, (x, y)) in points.iter().enumerate() {
            nodes.push(Node { id: i as NodeId + 1, position: Point::new(*x, *y), is_depot: false });
        }
        let mut edges = Vec::new();
        for i in 1..nodes.len() as NodeId {
            edges.push(Edge::new(i - 1, i, 1.0, 1.0, Geometry::Straight).unwrap());
            edges.push(Edge::new(i, i - 1, 1.0, 1.0, Geometry::Straight).unwrap());
        }
        let net = RoadNetwork::new(nodes, edges).unwrap();
        let ids: Vec<NodeId> = (1..=points.len() as NodeId).collect();
        let set = DeliverySet::new(&net, &ids).unwrap();
        let tree = build_tree(&set);
        let m = points.len();

        for w in tree.merges().windows(2) {
            prop_assert!(w[1].distance >= w[0].distance);
        }
        for k in 1..=m {
            let cut = tree.cut(k).unwrap();
            prop_assert_eq!(cut.len(), k);
            let mut all: Vec<usize> = cut.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (1..=m).collect::<Vec<_>>());
            if k < m {
                let fine = tree.cut(k + 1).unwrap();
                for cluster in &fine {
                    prop_assert!(cut.iter().any(|sup| cluster.iter().all(|p| sup.contains(p))));
                }
            }
        }
    }
}
