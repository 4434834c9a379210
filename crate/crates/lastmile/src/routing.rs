//! Per-vehicle route construction: the greedy nearest-delivery search used by
//! the optimizer, and a brute-force TSP oracle for small instances.

use std::collections::{BTreeMap, HashMap, HashSet};

use itertools::Itertools;
use thiserror::Error;

use crate::clustering::DeliverySet;
use crate::network::{NetworkError, NodeId, Path, RoadNetwork};

/// Brute force enumerates every visiting order; 9 stops is the default limit.
pub const DEFAULT_EXACT_CAP: usize = 9;

#[derive(Debug, Error)]
pub enum RoutingError {
    #[error("vehicle has no assigned deliveries")]
    EmptyAssignment,
    #[error("package index {0} is not part of the delivery set")]
    UnknownPackage(usize),
    #[error("package index {0} assigned twice")]
    DuplicatePackage(usize),
    #[error("{n} deliveries exceed the exact-route cap of {cap}")]
    ExactCapExceeded { n: usize, cap: usize },
    #[error("partition does not cover packages 1..={expected}: {detail}")]
    InvalidPartition { expected: usize, detail: String },
    #[error("partition has {clusters} clusters but only {vehicles} vehicles")]
    TooFewVehicles { clusters: usize, vehicles: usize },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Binary vehicle-to-package assignment. Every package column sums to one;
/// vehicles without work have all-zero rows.
#[derive(Debug, Clone)]
pub struct AssignmentMatrix {
    n_vehicles: usize,
    n_packages: usize,
    entries: Vec<bool>,
}

impl AssignmentMatrix {
    /// Vehicle `i` (1-based) receives cluster `i` of the partition. The
    /// partition must split packages 1..=M into disjoint, nonempty clusters.
    pub fn from_partition(
        partition: &[Vec<usize>],
        n_vehicles: usize,
    ) -> Result<Self, RoutingError> {
        if partition.len() > n_vehicles {
            return Err(RoutingError::TooFewVehicles {
                clusters: partition.len(),
                vehicles: n_vehicles,
            });
        }
        let n_packages: usize = partition.iter().map(|c| c.len()).sum();
        let mut entries = vec![false; n_vehicles * n_packages];
        let mut seen = vec![false; n_packages];
        for (row, cluster) in partition.iter().enumerate() {
            if cluster.is_empty() {
                return Err(RoutingError::InvalidPartition {
                    expected: n_packages,
                    detail: format!("cluster {} is empty", row + 1),
                });
            }
            for &package in cluster {
                if package == 0 || package > n_packages {
                    return Err(RoutingError::InvalidPartition {
                        expected: n_packages,
                        detail: format!("package index {package} out of range"),
                    });
                }
                if seen[package - 1] {
                    return Err(RoutingError::InvalidPartition {
                        expected: n_packages,
                        detail: format!("package {package} appears twice"),
                    });
                }
                seen[package - 1] = true;
                entries[row * n_packages + (package - 1)] = true;
            }
        }
        let matrix = AssignmentMatrix { n_vehicles, n_packages, entries };
        debug_assert!((1..=n_packages).all(|j| matrix.column_sum(j) == 1));
        Ok(matrix)
    }

    pub fn n_vehicles(&self) -> usize {
        self.n_vehicles
    }

    pub fn n_packages(&self) -> usize {
        self.n_packages
    }

    /// a_ij for vehicle i and package j, both 1-based.
    pub fn is_assigned(&self, vehicle: usize, package: usize) -> bool {
        self.entries[(vehicle - 1) * self.n_packages + (package - 1)]
    }

    pub fn column_sum(&self, package: usize) -> usize {
        (1..=self.n_vehicles)
            .filter(|&i| self.is_assigned(i, package))
            .count()
    }

    /// Sorted package indices assigned to a vehicle.
    pub fn packages_for(&self, vehicle: usize) -> Vec<usize> {
        (1..=self.n_packages)
            .filter(|&j| self.is_assigned(vehicle, j))
            .collect()
    }
}

/// Build the assignment matrix for a cluster partition, one vehicle per cluster.
pub fn assignment_from_clusters(partition: &[Vec<usize>]) -> Result<AssignmentMatrix, RoutingError> {
    AssignmentMatrix::from_partition(partition, partition.len())
}

/// One vehicle's depot-to-depot delivery plan.
#[derive(Debug, Clone, PartialEq)]
pub struct Route {
    /// 1-based vehicle index
    pub vehicle: usize,
    /// delivery order as package indices
    pub deliveries: Vec<usize>,
    /// full node path, starting and ending at the depot
    pub path: Vec<NodeId>,
    /// seconds for the full round trip, dwell-free
    pub round_trip_time: f64,
    /// planned delivery time per package: cost of the path prefix up to the
    /// first visit of the package's node
    pub delivery_times: BTreeMap<usize, f64>,
}

impl Route {
    /// Structural checks: depot endpoints, delivery subsequence, first-visit
    /// delivery times, and exact cost consistency with the network.
    pub fn validate(&self, net: &RoadNetwork, deliveries: &DeliverySet) -> Result<(), RoutingError> {
        let depot = net.depot();
        assert!(!self.path.is_empty(), "route path is empty");
        assert_eq!(self.path[0], depot, "route must start at the depot");
        assert_eq!(*self.path.last().unwrap(), depot, "route must end at the depot");
        let total = net.path_cost(&self.path)?;
        #[allow(clippy::float_cmp)]
        {
            assert_eq!(self.round_trip_time, total, "round trip time mismatch");
        }

        let first_visit = first_visit_times(net, &self.path)?;
        assert_eq!(
            self.deliveries.iter().copied().collect::<HashSet<_>>(),
            self.delivery_times.keys().copied().collect::<HashSet<_>>(),
            "delivery order and delivery times disagree"
        );
        let mut cursor = 0usize;
        for &package in &self.deliveries {
            let node = deliveries
                .node_of(package)
                .ok_or(RoutingError::UnknownPackage(package))?;
            // S_i is a subsequence of P_i
            let pos = self.path[cursor..]
                .iter()
                .position(|&p| p == node)
                .map(|offset| cursor + offset)
                .expect("delivery node missing from path");
            cursor = pos;
            #[allow(clippy::float_cmp)]
            {
                assert_eq!(self.delivery_times[&package], first_visit[&node]);
            }
            assert!(self.delivery_times[&package] <= self.round_trip_time);
        }
        Ok(())
    }
}

/// Query counts for the complexity contract of the greedy search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteStats {
    pub shortest_path_queries: usize,
}

/// Cost of the path prefix up to the first visit of each node, summed with
/// the same left-to-right fold as `path_cost`.
fn first_visit_times(net: &RoadNetwork, path: &[NodeId]) -> Result<HashMap<NodeId, f64>, NetworkError> {
    let mut times = HashMap::new();
    let mut cum = 0.0f64;
    times.insert(path[0], 0.0);
    for pair in path.windows(2) {
        let edge = net
            .edge_between(pair[0], pair[1])
            .ok_or(NetworkError::MissingEdge { from: pair[0], to: pair[1] })?;
        cum += edge.cost_s();
        times.entry(pair[1]).or_insert(cum);
    }
    Ok(times)
}

fn splice(legs: &[Path]) -> Vec<NodeId> {
    let mut path = Vec::new();
    for leg in legs {
        let skip = usize::from(!path.is_empty());
        path.extend_from_slice(&leg.nodes[skip..]);
    }
    path
}

fn assemble_route(
    net: &RoadNetwork,
    deliveries: &DeliverySet,
    vehicle: usize,
    order: Vec<usize>,
    legs: &[Path],
) -> Result<Route, RoutingError> {
    let path = splice(legs);
    let round_trip_time = net.path_cost(&path)?;
    let first_visit = first_visit_times(net, &path)?;
    let mut delivery_times = BTreeMap::new();
    for &package in &order {
        let node = deliveries
            .node_of(package)
            .ok_or(RoutingError::UnknownPackage(package))?;
        delivery_times.insert(package, first_visit[&node]);
    }
    Ok(Route { vehicle, deliveries: order, path, round_trip_time, delivery_times })
}

fn check_assigned(deliveries: &DeliverySet, assigned: &[usize]) -> Result<Vec<usize>, RoutingError> {
    if assigned.is_empty() {
        return Err(RoutingError::EmptyAssignment);
    }
    let mut sorted = assigned.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(RoutingError::DuplicatePackage(pair[0]));
        }
    }
    for &package in &sorted {
        if deliveries.node_of(package).is_none() {
            return Err(RoutingError::UnknownPackage(package));
        }
    }
    Ok(sorted)
}

/// Greedy nearest-delivery route: repeatedly appends the unvisited assigned
/// delivery with the cheapest shortest path from the current location,
/// breaking cost ties toward the lower package index, then returns to the
/// depot. Performs exactly n(n+1)/2 + 1 shortest-path queries for n stops.
pub fn greedy_route(
    net: &RoadNetwork,
    deliveries: &DeliverySet,
    assigned: &[usize],
    vehicle: usize,
) -> Result<Route, RoutingError> {
    greedy_route_with_stats(net, deliveries, assigned, vehicle).map(|(route, _)| route)
}

pub fn greedy_route_with_stats(
    net: &RoadNetwork,
    deliveries: &DeliverySet,
    assigned: &[usize],
    vehicle: usize,
) -> Result<(Route, RouteStats), RoutingError> {
    let mut unvisited = check_assigned(deliveries, assigned)?;
    let depot = net.depot();
    let mut current = depot;
    let mut legs = Vec::with_capacity(unvisited.len() + 1);
    let mut order = Vec::with_capacity(unvisited.len());
    let mut queries = 0usize;

    while !unvisited.is_empty() {
        let mut best: Option<(f64, usize, Path)> = None;
        // ascending package order + strict improvement = lower index wins ties
        for &package in &unvisited {
            let node = deliveries.node_of(package).expect("validated above");
            let leg = net.shortest_path(current, node)?;
            queries += 1;
            if best.as_ref().is_none_or(|(cost, _, _)| leg.cost < *cost) {
                best = Some((leg.cost, package, leg));
            }
        }
        let (_, package, leg) = best.expect("unvisited is nonempty");
        current = *leg.nodes.last().unwrap();
        legs.push(leg);
        order.push(package);
        unvisited.retain(|&p| p != package);
    }
    legs.push(net.shortest_path(current, depot)?);
    queries += 1;

    let route = assemble_route(net, deliveries, vehicle, order, &legs)?;
    Ok((route, RouteStats { shortest_path_queries: queries }))
}

/// Exact TSP oracle: evaluates every visiting order over shortest-path legs
/// and returns the cheapest, breaking cost ties toward the lexicographically
/// smallest delivery-index sequence. Errors when `assigned` exceeds `cap`.
pub fn exact_route(
    net: &RoadNetwork,
    deliveries: &DeliverySet,
    assigned: &[usize],
    vehicle: usize,
    cap: usize,
) -> Result<Route, RoutingError> {
    let stops = check_assigned(deliveries, assigned)?;
    let n = stops.len();
    if n > cap {
        return Err(RoutingError::ExactCapExceeded { n, cap });
    }

    // Leg index 0 is the depot, 1..=n the sorted stops.
    let depot = net.depot();
    let node_at = |i: usize| -> NodeId {
        if i == 0 {
            depot
        } else {
            deliveries.node_of(stops[i - 1]).expect("validated above")
        }
    };
    let mut legs: Vec<Vec<Option<Path>>> = vec![vec![None; n + 1]; n + 1];
    let mut leg_costs: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); n + 1]; n + 1];
    for a in 0..=n {
        for b in 0..=n {
            if a == b || (a != 0 && b != 0 && a == b) {
                continue;
            }
            let path = net.shortest_path(node_at(a), node_at(b))?;
            leg_costs[a][b] = path
                .nodes
                .windows(2)
                .map(|w| net.edge_between(w[0], w[1]).unwrap().cost_s())
                .collect();
            legs[a][b] = Some(path);
        }
    }

    // The cost of an order is folded left to right over the concatenated leg
    // edge costs, matching `path_cost` on the spliced path bit for bit.
    let mut best: Option<(f64, Vec<usize>)> = None;
    for perm in (1..=n).permutations(n) {
        let mut cost = 0.0f64;
        let mut prev = 0usize;
        for &stop in &perm {
            for &c in &leg_costs[prev][stop] {
                cost += c;
            }
            prev = stop;
        }
        for &c in &leg_costs[prev][0] {
            cost += c;
        }
        // permutations arrive in lexicographic order, so strict improvement
        // keeps the smallest sequence among cost ties
        if best.as_ref().is_none_or(|(b, _)| cost < *b) {
            best = Some((cost, perm));
        }
    }
    let (_, perm) = best.expect("at least one permutation");

    let mut chosen = Vec::with_capacity(n + 1);
    let mut prev = 0usize;
    for &stop in &perm {
        chosen.push(legs[prev][stop].clone().unwrap());
        prev = stop;
    }
    chosen.push(legs[prev][0].clone().unwrap());
    let order: Vec<usize> = perm.iter().map(|&i| stops[i - 1]).collect();
    assemble_route(net, deliveries, vehicle, order, &chosen)
}
