//! Complete-linkage agglomerative hierarchy over delivery-location positions.
//!
//! Clustering works on planar positions, not graph travel times: vehicles are
//! grouped by where packages sit in the plane, then routed on the graph.

use std::collections::HashSet;

use thiserror::Error;

use crate::network::{NodeId, Point, RoadNetwork};

#[derive(Debug, Error)]
pub enum ClusteringError {
    #[error("delivery list is empty")]
    Empty,
    #[error("delivery node {0} does not exist in the network")]
    UnknownNode(NodeId),
    #[error("delivery entry {index} uses the depot node {node}")]
    DepotDelivery { index: usize, node: NodeId },
    #[error("delivery entry {index} repeats node {node}")]
    DuplicateNode { index: usize, node: NodeId },
    #[error("cluster count {k} out of range 1..={max}")]
    CutOutOfRange { k: usize, max: usize },
}

/// One delivery location. Packages are indexed 1..=M in scenario order.
#[derive(Debug, Clone)]
pub struct Delivery {
    pub package: usize,
    pub node: NodeId,
    pub position: Point,
}

/// Ordered delivery locations; package index j maps bijectively to a node.
#[derive(Debug, Clone)]
pub struct DeliverySet {
    locations: Vec<Delivery>,
}

impl DeliverySet {
    /// Validates that delivery nodes exist, are distinct, and exclude the depot.
    pub fn new(net: &RoadNetwork, delivery_nodes: &[NodeId]) -> Result<Self, ClusteringError> {
        if delivery_nodes.is_empty() {
            return Err(ClusteringError::Empty);
        }
        let mut seen = HashSet::new();
        let mut locations = Vec::with_capacity(delivery_nodes.len());
        for (i, &node) in delivery_nodes.iter().enumerate() {
            let entry = net.node(node).ok_or(ClusteringError::UnknownNode(node))?;
            if entry.is_depot {
                return Err(ClusteringError::DepotDelivery { index: i + 1, node });
            }
            if !seen.insert(node) {
                return Err(ClusteringError::DuplicateNode { index: i + 1, node });
            }
            locations.push(Delivery { package: i + 1, node, position: entry.position });
        }
        Ok(DeliverySet { locations })
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[Delivery] {
        &self.locations
    }

    /// Node of package j (1-based).
    pub fn node_of(&self, package: usize) -> Option<NodeId> {
        self.locations.get(package.checked_sub(1)?).map(|d| d.node)
    }

    pub fn position_of(&self, package: usize) -> Option<Point> {
        self.locations.get(package.checked_sub(1)?).map(|d| d.position)
    }
}

/// One agglomeration step. Children refer to clusters: ids `0..M` are leaves,
/// id `M + r` is the cluster formed by merge `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
}

/// Full merge hierarchy; cutting after `M - k` merges yields k clusters.
#[derive(Debug, Clone)]
pub struct ClusterTree {
    leaf_count: usize,
    merges: Vec<Merge>,
}

impl ClusterTree {
    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Partition into k clusters of package indices (1-based). Members are
    /// sorted and clusters ordered by their smallest package index.
    pub fn cut(&self, k: usize) -> Result<Vec<Vec<usize>>, ClusteringError> {
        let m = self.leaf_count;
        if k == 0 || k > m {
            return Err(ClusteringError::CutOutOfRange { k, max: m });
        }

        // Representative leaf per cluster id, then union the first M - k merges.
        let mut rep = Vec::with_capacity(m + self.merges.len());
        rep.extend(0..m);
        for merge in &self.merges {
            let r = rep[merge.left];
            rep.push(r);
        }
        let mut parent: Vec<usize> = (0..m).collect();
        fn find(parent: &mut Vec<usize>, i: usize) -> usize {
            if parent[i] != i {
                let root = find(parent, parent[i]);
                parent[i] = root;
            }
            parent[i]
        }
        for merge in self.merges.iter().take(m - k) {
            let (a, b) = (rep[merge.left], rep[merge.right]);
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[rb] = ra;
            }
        }

        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut cluster_of_root = std::collections::HashMap::new();
        for leaf in 0..m {
            let root = find(&mut parent, leaf);
            let slot = *cluster_of_root.entry(root).or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[slot].push(leaf + 1);
        }
        // leaves were scanned in order, so members are sorted and clusters
        // already appear by smallest contained index
        debug_assert!(clusters.iter().all(|c| c.windows(2).all(|w| w[0] < w[1])));
        debug_assert_eq!(clusters.len(), k);
        Ok(clusters)
    }
}

/// Lexicographic key for deterministic tie-breaking between cluster pairs:
/// the two sorted member lists, smaller list first.
fn pair_key<'a>(a: &'a [usize], b: &'a [usize]) -> (&'a [usize], &'a [usize]) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn pair_key_less(a: (&[usize], &[usize]), b: (&[usize], &[usize])) -> bool {
    a < b
}

/// Complete-linkage clustering: each step merges the active cluster pair with
/// the smallest maximum inter-member distance, preferring on ties the pair
/// with the lexicographically smallest sorted member-index lists.
///
/// Inter-cluster distances are maintained with the max-update rule, and each
/// cluster caches its current best partner, giving the usual ~O(M^2) behavior.
pub fn build_tree(deliveries: &DeliverySet) -> ClusterTree {
    let m = deliveries.len();
    let points: Vec<Point> = deliveries.locations().iter().map(|d| d.position).collect();

    if m == 1 {
        return ClusterTree { leaf_count: 1, merges: Vec::new() };
    }

    // Slot-indexed state; a merge keeps the lower slot of the pair.
    let mut dist = vec![0.0f64; m * m];
    for i in 0..m {
        for j in i + 1..m {
            let d = points[i].distance(&points[j]);
            dist[i * m + j] = d;
            dist[j * m + i] = d;
        }
    }
    let mut members: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
    let mut cluster_id: Vec<usize> = (0..m).collect();
    let mut active: Vec<bool> = vec![true; m];

    // best partner per slot: (distance, partner slot)
    let mut nearest: Vec<Option<(f64, usize)>> = vec![None; m];
    let best_partner = |slot: usize,
                        dist: &[f64],
                        members: &[Vec<usize>],
                        active: &[bool]|
     -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        for other in 0..m {
            if other == slot || !active[other] {
                continue;
            }
            let d = dist[slot * m + other];
            let better = match best {
                None => true,
                Some((bd, bo)) => {
                    d < bd
                        || (d == bd
                            && pair_key_less(
                                pair_key(&members[slot], &members[other]),
                                pair_key(&members[slot], &members[bo]),
                            ))
                }
            };
            if better {
                best = Some((d, other));
            }
        }
        best
    };
    for (slot, entry) in nearest.iter_mut().enumerate() {
        *entry = best_partner(slot, &dist, &members, &active);
    }

    let mut merges = Vec::with_capacity(m - 1);
    for _ in 0..m - 1 {
        // global minimum over cached partners, ties by pair key
        let mut chosen: Option<(f64, usize, usize)> = None;
        for slot in 0..m {
            if !active[slot] {
                continue;
            }
            let (d, partner) = nearest[slot].expect("active slot has a partner");
            let better = match chosen {
                None => true,
                Some((cd, ca, cb)) => {
                    d < cd
                        || (d == cd
                            && pair_key_less(
                                pair_key(&members[slot], &members[partner]),
                                pair_key(&members[ca], &members[cb]),
                            ))
                }
            };
            if better {
                chosen = Some((d, slot, partner));
            }
        }
        let (d, a, b) = chosen.expect("at least two active clusters");
        let (keep, drop) = if a < b { (a, b) } else { (b, a) };

        merges.push(Merge {
            left: cluster_id[keep],
            right: cluster_id[drop],
            distance: d,
        });
        cluster_id[keep] = m + merges.len() - 1;
        active[drop] = false;

        // complete linkage: distance to the merged cluster is the max of the
        // distances to its parts
        for other in 0..m {
            if other == keep || !active[other] {
                continue;
            }
            let merged = dist[keep * m + other].max(dist[drop * m + other]);
            dist[keep * m + other] = merged;
            dist[other * m + keep] = merged;
        }
        let mut merged_members = members[keep].clone();
        merged_members.extend_from_slice(&members[drop]);
        merged_members.sort_unstable();
        members[keep] = merged_members;
        members[drop].clear();

        for slot in 0..m {
            if !active[slot] || slot == keep {
                continue;
            }
            let stale = matches!(nearest[slot], Some((_, p)) if p == keep || p == drop);
            if stale {
                nearest[slot] = best_partner(slot, &dist, &members, &active);
            } else if let Some((bd, bo)) = nearest[slot] {
                // the merged cluster can tie the cached distance with a
                // smaller pair key even though it cannot beat it
                let d_new = dist[slot * m + keep];
                if d_new < bd
                    || (d_new == bd
                        && pair_key_less(
                            pair_key(&members[slot], &members[keep]),
                            pair_key(&members[slot], &members[bo]),
                        ))
                {
                    nearest[slot] = Some((d_new, keep));
                }
            }
        }
        nearest[keep] = best_partner(keep, &dist, &members, &active);
    }

    ClusterTree { leaf_count: m, merges }
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Naive complete-linkage reference: recomputes every inter-cluster
    //! maximum pairwise distance from scratch at each step.

    use super::*;

    /// Merge sequence as (left members, right members, distance), with the
    /// lexicographically smaller member list first.
    pub fn naive_complete_linkage(points: &[Point]) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
        let mut clusters: Vec<Vec<usize>> = (0..points.len()).map(|i| vec![i]).collect();
        let mut merges = Vec::new();
        while clusters.len() > 1 {
            let mut best: Option<(f64, usize, usize)> = None;
            for i in 0..clusters.len() {
                for j in i + 1..clusters.len() {
                    let mut d = 0.0f64;
                    for &a in &clusters[i] {
                        for &b in &clusters[j] {
                            d = d.max(points[a].distance(&points[b]));
                        }
                    }
                    let better = match best {
                        None => true,
                        Some((bd, bi, bj)) => {
                            d < bd
                                || (d == bd
                                    && pair_key(&clusters[i], &clusters[j])
                                        < pair_key(&clusters[bi], &clusters[bj]))
                        }
                    };
                    if better {
                        best = Some((d, i, j));
                    }
                }
            }
            let (d, i, j) = best.unwrap();
            let (first, second) = {
                let (a, b) = pair_key(&clusters[i], &clusters[j]);
                (a.to_vec(), b.to_vec())
            };
            merges.push((first, second, d));
            let absorbed = clusters.remove(j);
            clusters[i].extend(absorbed);
            clusters[i].sort_unstable();
        }
        merges
    }

    /// Expand a tree's merges into the oracle's canonical member-list form.
    pub fn canonical_merges(tree: &ClusterTree) -> Vec<(Vec<usize>, Vec<usize>, f64)> {
        let m = tree.leaf_count();
        let mut members: Vec<Vec<usize>> = (0..m).map(|i| vec![i]).collect();
        let mut out = Vec::new();
        for merge in tree.merges() {
            let left = members[merge.left].clone();
            let right = members[merge.right].clone();
            let (a, b) = {
                let (a, b) = pair_key(&left, &right);
                (a.to_vec(), b.to_vec())
            };
            out.push((a, b, merge.distance));
            let mut joined = left;
            joined.extend(right);
            joined.sort_unstable();
            members.push(joined);
        }
        out
    }
}

#[cfg(test)]
pub(crate) fn planar_set(points: &[Point]) -> DeliverySet {
    DeliverySet {
        locations: points
            .iter()
            .enumerate()
            .map(|(i, &position)| Delivery {
                package: i + 1,
                node: (i + 1) as NodeId,
                position,
            })
            .collect(),
    }
}
