//! Fleet sizing: sweep vehicle counts, score each against the weighted
//! satisfaction/operating objective, and flag the Pareto-efficient sizes.

use std::time::Instant;

use thiserror::Error;

use crate::clustering::{build_tree, ClusteringError, ClusterTree, DeliverySet};
use crate::routing::{
    exact_route, greedy_route, greedy_route_with_stats, AssignmentMatrix, Route, RoutingError,
};
use crate::network::RoadNetwork;

#[derive(Debug, Error)]
pub enum FleetError {
    #[error("alpha must lie in [0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("at least one vehicle is required")]
    NoVehicles,
    #[error("partition has {got} clusters, expected {expected}")]
    PartitionSize { got: usize, expected: usize },
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
    #[error(transparent)]
    Routing(#[from] RoutingError),
}

/// Costs of serving a scenario with a fixed number of vehicles.
///
/// `j_s` is the mean package delivery time and `j_c` the summed round-trip
/// time of the active vehicles. The normalized fields and `total` are filled
/// in by [`sweep`]; [`evaluate`] leaves them at zero.
#[derive(Debug, Clone)]
pub struct FleetEvaluation {
    pub k: usize,
    pub routes: Vec<Route>,
    pub j_s: f64,
    pub j_c: f64,
    pub j_s_norm: f64,
    pub j_c_norm: f64,
    pub total: f64,
    pub pareto: bool,
}

/// Evaluations for every fleet size 1..=min(N, M) plus the selected optimum.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub alpha: f64,
    pub evaluations: Vec<FleetEvaluation>,
    pub best_k: usize,
    /// the merge hierarchy behind every cut, kept for the results document
    pub tree: ClusterTree,
}

/// Route one cluster per vehicle greedily and aggregate the raw costs.
pub fn evaluate(
    net: &RoadNetwork,
    deliveries: &DeliverySet,
    partition: &[Vec<usize>],
    k: usize,
) -> Result<FleetEvaluation, FleetError> {
    if partition.len() != k {
        return Err(FleetError::PartitionSize { got: partition.len(), expected: k });
    }
    let assignment = AssignmentMatrix::from_partition(partition, k)?;
    let mut routes = Vec::with_capacity(k);
    for vehicle in 1..=k {
        let assigned = assignment.packages_for(vehicle);
        routes.push(greedy_route(net, deliveries, &assigned, vehicle)?);
    }

    let m = deliveries.len() as f64;
    let mut j_s = 0.0;
    for package in 1..=deliveries.len() {
        let t = routes
            .iter()
            .find_map(|r| r.delivery_times.get(&package))
            .expect("partition covers every package");
        j_s += t / m;
    }
    let j_c = routes.iter().map(|r| r.round_trip_time).sum();

    Ok(FleetEvaluation { k, routes, j_s, j_c, j_s_norm: 0.0, j_c_norm: 0.0, total: 0.0, pareto: false })
}

/// Build the cluster tree once, evaluate every cut k = 1..=min(N, M),
/// normalize each cost component by its maximum across the sweep, and pick
/// the fleet size minimizing `alpha * J_s_norm + (1 - alpha) * J_c_norm`
/// (ties go to the smaller fleet).
pub fn sweep(
    net: &RoadNetwork,
    deliveries: &DeliverySet,
    n_vehicles: usize,
    alpha: f64,
) -> Result<SweepResult, FleetError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(FleetError::InvalidAlpha(alpha));
    }
    if n_vehicles == 0 {
        return Err(FleetError::NoVehicles);
    }
    let tree = build_tree(deliveries);
    let k_max = n_vehicles.min(deliveries.len());
    let mut evaluations = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let partition = tree.cut(k)?;
        evaluations.push(evaluate(net, deliveries, &partition, k)?);
    }
    normalize(&mut evaluations, alpha);

    let best_k = evaluations
        .iter()
        .fold(None::<(f64, usize)>, |best, e| match best {
            Some((cost, _)) if e.total >= cost => best,
            _ => Some((e.total, e.k)),
        })
        .expect("at least one evaluation")
        .1;

    Ok(SweepResult { alpha, evaluations, best_k, tree })
}

/// Fill in normalized components, totals, and Pareto flags. The maxima are
/// taken over the given evaluations, so x/max reaches exactly 1.0 somewhere.
pub fn normalize(evaluations: &mut [FleetEvaluation], alpha: f64) {
    let max_j_s = evaluations.iter().map(|e| e.j_s).fold(f64::MIN, f64::max);
    let max_j_c = evaluations.iter().map(|e| e.j_c).fold(f64::MIN, f64::max);
    for e in evaluations.iter_mut() {
        e.j_s_norm = e.j_s / max_j_s;
        e.j_c_norm = e.j_c / max_j_c;
        e.total = alpha * e.j_s_norm + (1.0 - alpha) * e.j_c_norm;
    }
    let flags = pareto_frontier(
        &evaluations.iter().map(|e| (e.j_c, e.j_s)).collect::<Vec<_>>(),
    );
    for (e, flag) in evaluations.iter_mut().zip(flags) {
        e.pareto = flag;
    }
}

/// Non-dominated flags for (J_c, J_s) points: a point is flagged unless some
/// other point is no worse in both components and better in one. Sort-scan,
/// O(n log n); exact duplicates do not dominate each other.
pub fn pareto_frontier(points: &[(f64, f64)]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .partial_cmp(&points[b])
            .expect("cost components are finite")
    });

    let mut flags = vec![false; points.len()];
    let mut best_prev_js = f64::INFINITY; // min J_s among strictly smaller J_c
    let mut i = 0;
    while i < order.len() {
        // group of equal J_c values
        let jc = points[order[i]].0;
        let mut j = i;
        #[allow(clippy::float_cmp)]
        while j < order.len() && points[order[j]].0 == jc {
            j += 1;
        }
        let group = &order[i..j];
        let group_min_js = group
            .iter()
            .map(|&ix| points[ix].1)
            .fold(f64::INFINITY, f64::min);
        for &ix in group {
            let js = points[ix].1;
            #[allow(clippy::float_cmp)]
            let dominated_within = js > group_min_js;
            let dominated_before = best_prev_js <= js;
            flags[ix] = !(dominated_within || dominated_before);
        }
        best_prev_js = best_prev_js.min(group_min_js);
        i = j;
    }
    flags
}

/// Sweep several scenarios with one shared normalization: both cost
/// components are divided by their maxima over the whole batch, and Pareto
/// flags are computed across every (scenario, k) point, as in a multi-trial
/// frontier plot. Scenarios are evaluated in parallel and merged in order.
pub fn batch_sweep(
    net: &RoadNetwork,
    delivery_sets: &[DeliverySet],
    n_vehicles: usize,
    alpha: f64,
) -> Result<Vec<SweepResult>, FleetError> {
    use rayon::prelude::*;

    if !(0.0..=1.0).contains(&alpha) {
        return Err(FleetError::InvalidAlpha(alpha));
    }
    if n_vehicles == 0 {
        return Err(FleetError::NoVehicles);
    }

    let mut per_scenario: Vec<(ClusterTree, Vec<FleetEvaluation>)> = delivery_sets
        .par_iter()
        .map(|deliveries| {
            let tree = build_tree(deliveries);
            let k_max = n_vehicles.min(deliveries.len());
            let evaluations = (1..=k_max)
                .map(|k| {
                    let partition = tree.cut(k)?;
                    evaluate(net, deliveries, &partition, k)
                })
                .collect::<Result<Vec<_>, FleetError>>()?;
            Ok((tree, evaluations))
        })
        .collect::<Result<Vec<_>, FleetError>>()?;

    let mut flat: Vec<&mut FleetEvaluation> =
        per_scenario.iter_mut().flat_map(|(_, evals)| evals).collect();
    let max_j_s = flat.iter().map(|e| e.j_s).fold(f64::MIN, f64::max);
    let max_j_c = flat.iter().map(|e| e.j_c).fold(f64::MIN, f64::max);
    for e in flat.iter_mut() {
        e.j_s_norm = e.j_s / max_j_s;
        e.j_c_norm = e.j_c / max_j_c;
        e.total = alpha * e.j_s_norm + (1.0 - alpha) * e.j_c_norm;
    }
    let flags = pareto_frontier(&flat.iter().map(|e| (e.j_c, e.j_s)).collect::<Vec<_>>());
    for (e, flag) in flat.iter_mut().zip(flags) {
        e.pareto = flag;
    }

    Ok(per_scenario
        .into_iter()
        .map(|(tree, evaluations)| {
            let best_k = evaluations
                .iter()
                .fold(None::<(f64, usize)>, |best, e| match best {
                    Some((cost, _)) if e.total >= cost => best,
                    _ => Some((e.total, e.k)),
                })
                .expect("every scenario has at least one evaluation")
                .1;
            SweepResult { alpha, evaluations, best_k, tree }
        })
        .collect())
}

/// One randomized single-vehicle comparison between greedy and exact routing.
#[derive(Debug, Clone)]
pub struct GapRecord {
    pub scenario: usize,
    pub m: usize,
    pub t_greedy: f64,
    pub t_exact: f64,
    /// percent extra travel time of greedy over exact
    pub gap_pct: f64,
    pub greedy_seconds: f64,
    pub exact_seconds: f64,
    pub greedy_queries: usize,
}

/// Route each delivery set with a single vehicle via both methods and record
/// the optimality gap and wall-clock timings.
pub fn gap_study(
    net: &RoadNetwork,
    delivery_sets: &[DeliverySet],
    cap: usize,
) -> Result<Vec<GapRecord>, FleetError> {
    let mut records = Vec::with_capacity(delivery_sets.len());
    for (scenario, deliveries) in delivery_sets.iter().enumerate() {
        let assigned: Vec<usize> = (1..=deliveries.len()).collect();

        let started = Instant::now();
        let (greedy, stats) = greedy_route_with_stats(net, deliveries, &assigned, 1)?;
        let greedy_seconds = started.elapsed().as_secs_f64();

        let started = Instant::now();
        let exact = exact_route(net, deliveries, &assigned, 1, cap)?;
        let exact_seconds = started.elapsed().as_secs_f64();

        records.push(GapRecord {
            scenario,
            m: deliveries.len(),
            t_greedy: greedy.round_trip_time,
            t_exact: exact.round_trip_time,
            gap_pct: (greedy.round_trip_time - exact.round_trip_time) / exact.round_trip_time
                * 100.0,
            greedy_seconds,
            exact_seconds,
            greedy_queries: stats.shortest_path_queries,
        });
    }
    Ok(records)
}

#[cfg(test)]
pub(crate) mod oracle {
    /// Quadratic pairwise-dominance reference for the Pareto flags.
    pub fn pareto_by_pairwise_dominance(points: &[(f64, f64)]) -> Vec<bool> {
        points
            .iter()
            .map(|&(jc, js)| {
                !points.iter().any(|&(oc, os)| {
                    oc <= jc && os <= js && (oc < jc || os < js)
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clustering::build_tree;
    use crate::fixture::demo_network;
    use crate::network::NodeId;
    use approx::assert_relative_eq;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hand_traced_set(net: &RoadNetwork) -> DeliverySet {
        DeliverySet::new(net, &[3, 13, 21, 29]).unwrap()
    }

    #[test]
    fn evaluate_collapses_for_one_vehicle() {
        let net = demo_network();
        let set = hand_traced_set(&net);
        let eval = evaluate(&net, &set, &[vec![1, 2, 3, 4]], 1).unwrap();
        // from the hand-traced greedy route: T = 72, t = 12, 4, 36, 52
        assert_eq!(eval.j_c, 72.0);
        assert_relative_eq!(eval.j_s, 26.0, max_relative = 1e-12);
    }

    #[test]
    fn evaluate_singletons_sum_out_and_back_trips() {
        let net = demo_network();
        let set = hand_traced_set(&net);
        let partition: Vec<Vec<usize>> = (1..=4).map(|j| vec![j]).collect();
        let eval = evaluate(&net, &set, &partition, 4).unwrap();
        // one-way costs 12, 4, 12, 20; round trips double them
        assert_relative_eq!(eval.j_c, 2.0 * (12.0 + 4.0 + 12.0 + 20.0), max_relative = 1e-12);
        assert_relative_eq!(eval.j_s, (12.0 + 4.0 + 12.0 + 20.0) / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn evaluate_two_clusters_matches_hand_computation() {
        let net = demo_network();
        let set = hand_traced_set(&net);
        // complete linkage on positions puts {1, 2} and {3, 4} together
        let tree = build_tree(&set);
        let partition = tree.cut(2).unwrap();
        assert_eq!(partition, vec![vec![1, 2], vec![3, 4]]);
        let eval = evaluate(&net, &set, &partition, 2).unwrap();
        // hand-traced: T1 = 24 (t2 = 4, t1 = 12), T2 = 48 (t3 = 12, t4 = 28)
        assert_eq!(eval.j_c, 72.0);
        assert_relative_eq!(eval.j_s, (12.0 + 4.0 + 12.0 + 28.0) / 4.0, max_relative = 1e-12);
    }

    #[test]
    fn sweep_normalizes_and_rejects_bad_inputs() {
        let net = demo_network();
        let set = hand_traced_set(&net);
        let result = sweep(&net, &set, 6, 0.5).unwrap();
        // k is capped at min(N, M) = 4
        assert_eq!(result.evaluations.len(), 4);
        let max_s = result.evaluations.iter().map(|e| e.j_s_norm).fold(0.0, f64::max);
        let max_c = result.evaluations.iter().map(|e| e.j_c_norm).fold(0.0, f64::max);
        assert_eq!(max_s, 1.0);
        assert_eq!(max_c, 1.0);
        for e in &result.evaluations {
            assert!((0.0..=1.0).contains(&e.j_s_norm));
            assert!((0.0..=1.0).contains(&e.j_c_norm));
        }
        assert!(matches!(sweep(&net, &set, 6, 1.5), Err(FleetError::InvalidAlpha(_))));
        assert!(matches!(sweep(&net, &set, 0, 0.5), Err(FleetError::NoVehicles)));
    }

    #[test]
    fn alpha_extremes_reduce_to_single_component_argmin() {
        let net = demo_network();
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let candidates: Vec<NodeId> = net
            .nodes()
            .iter()
            .map(|n| n.id)
            .filter(|&id| id != net.depot())
            .collect();
        for _ in 0..10 {
            let picks: Vec<NodeId> = candidates.choose_multiple(&mut rng, 6).copied().collect();
            let set = DeliverySet::new(&net, &picks).unwrap();
            let by_cost = sweep(&net, &set, 6, 0.0).unwrap();
            let argmin_jc = by_cost
                .evaluations
                .iter()
                .fold(None::<(f64, usize)>, |best, e| match best {
                    Some((c, _)) if e.j_c >= c => best,
                    _ => Some((e.j_c, e.k)),
                })
                .unwrap()
                .1;
            assert_eq!(by_cost.best_k, argmin_jc);

            let by_satisfaction = sweep(&net, &set, 6, 1.0).unwrap();
            let argmin_js = by_satisfaction
                .evaluations
                .iter()
                .fold(None::<(f64, usize)>, |best, e| match best {
                    Some((c, _)) if e.j_s >= c => best,
                    _ => Some((e.j_s, e.k)),
                })
                .unwrap()
                .1;
            assert_eq!(by_satisfaction.best_k, argmin_js);
        }
    }

    #[test]
    fn total_is_linear_in_alpha() {
        let net = demo_network();
        let set = hand_traced_set(&net);
        // d(total)/d(alpha) = j_s_norm - j_c_norm, checked by finite difference
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let sweeps: Vec<SweepResult> =
            grid.iter().map(|&a| sweep(&net, &set, 4, a).unwrap()).collect();
        for pair in sweeps.windows(2) {
            for (lo, hi) in pair[0].evaluations.iter().zip(&pair[1].evaluations) {
                let slope = (hi.total - lo.total) / 0.1;
                assert_relative_eq!(slope, lo.j_s_norm - lo.j_c_norm, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn pareto_frontier_simple_cases() {
        assert_eq!(pareto_frontier(&[(3.0, 4.0)]), vec![true]);
        // second point dominates the first in both components
        assert_eq!(pareto_frontier(&[(3.0, 4.0), (2.0, 1.0)]), vec![false, true]);
        // exact duplicates do not dominate each other
        assert_eq!(pareto_frontier(&[(1.0, 2.0), (1.0, 2.0)]), vec![true, true]);
        // equal J_c, different J_s: only the smaller J_s survives
        assert_eq!(pareto_frontier(&[(1.0, 2.0), (1.0, 3.0)]), vec![true, false]);
        // classic staircase
        assert_eq!(
            pareto_frontier(&[(1.0, 5.0), (2.0, 3.0), (3.0, 1.0), (2.5, 4.0)]),
            vec![true, true, true, false]
        );
    }

    #[test]
    fn pareto_frontier_matches_pairwise_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12);
            let points: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    // coarse grid provokes ties and duplicates
                    (rng.gen_range(0..6) as f64, rng.gen_range(0..6) as f64)
                })
                .collect();
            assert_eq!(
                pareto_frontier(&points),
                oracle::pareto_by_pairwise_dominance(&points),
                "points: {points:?}"
            );
        }
    }

    #[test]
    fn pareto_flags_are_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let n = rng.gen_range(1..=10);
            let points: Vec<(f64, f64)> = (0..n)
                .map(|_| (rng.gen_range(1.0..100.0), rng.gen_range(1.0..100.0)))
                .collect();
            let scaled: Vec<(f64, f64)> =
                points.iter().map(|&(c, s)| (c / 17.0, s / 3.0)).collect();
            assert_eq!(pareto_frontier(&points), pareto_frontier(&scaled));
        }
    }

    #[test]
    fn gap_study_reports_nonnegative_gaps() {
        let net = demo_network();
        let sets: Vec<DeliverySet> = vec![
            DeliverySet::new(&net, &[3, 13, 21, 29]).unwrap(),
            DeliverySet::new(&net, &[7]).unwrap(),
        ];
        let records = gap_study(&net, &sets, 9).unwrap();
        assert_eq!(records.len(), 2);
        for r in &records {
            assert!(r.gap_pct >= 0.0);
        }
        // a single package has one permutation, so the gap is exactly zero
        assert_eq!(records[1].gap_pct, 0.0);
        assert_eq!(records[1].greedy_queries, 2);
    }
}
