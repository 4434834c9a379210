//! File handling for networks, scenarios, and IDM parameters, plus seeded
//! random scenario generation. All files share one TOML dialect; the exact
//! schemas are documented in the README.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::{ClusteringError, DeliverySet};
use crate::microsim::IdmParams;
use crate::network::{
    build_network, Edge, Geometry, NetworkError, Node, NodeId, Point, RoadNetwork, RoadSegment,
    SegmentEnd,
};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: network file must list either nodes and edges or raw segments, not both")]
    MixedNetworkForms { path: PathBuf },
    #[error("alpha must lie in [0, 1], got {0}")]
    AlphaOutOfRange(f64),
    #[error("scenario must provide at least one vehicle")]
    NoVehicles,
    #[error("scenario must list at least one delivery")]
    NoDeliveries,
    #[error("cannot draw {requested} distinct delivery nodes from {available} non-depot nodes")]
    TooManyDeliveries { requested: usize, available: usize },
    #[error(transparent)]
    Delivery(#[from] ClusteringError),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

fn read(path: &Path) -> Result<String, ScenarioError> {
    std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Write a file atomically: the content lands under a temporary name in the
/// same directory and is renamed into place, so readers never see a partial
/// document.
pub fn write_atomic(path: &Path, content: &str) -> Result<(), ScenarioError> {
    let wrap = |source: std::io::Error| ScenarioError::Write {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, content).map_err(wrap)?;
    std::fs::rename(&tmp, path).map_err(wrap)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    #[serde(default)]
    merge_tolerance: Option<f64>,
    #[serde(default, rename = "node")]
    nodes: Vec<NodeRecord>,
    #[serde(default, rename = "edge")]
    edges: Vec<EdgeRecord>,
    #[serde(default, rename = "segment")]
    segments: Vec<SegmentRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    id: NodeId,
    x: f64,
    y: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    depot: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeRecord {
    from: NodeId,
    to: NodeId,
    length: f64,
    speed_limit: f64,
    geometry: Geometry,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SegmentRecord {
    start: [f64; 2],
    end: [f64; 2],
    length: f64,
    speed_limit: f64,
    geometry: Geometry,
    #[serde(default)]
    depot: Option<SegmentEnd>,
}

/// Load a network file: either explicit `[[node]]`/`[[edge]]` lists or raw
/// `[[segment]]` entries merged under `merge_tolerance`.
pub fn load_network(path: &Path) -> Result<RoadNetwork, ScenarioError> {
    let text = read(path)?;
    let file: NetworkFile = toml::from_str(&text).map_err(|e| ScenarioError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;

    let explicit = !file.nodes.is_empty() || !file.edges.is_empty();
    let raw = !file.segments.is_empty();
    if explicit && raw {
        return Err(ScenarioError::MixedNetworkForms { path: path.to_path_buf() });
    }

    if raw {
        let segments: Vec<RoadSegment> = file
            .segments
            .into_iter()
            .map(|s| RoadSegment {
                start: Point::new(s.start[0], s.start[1]),
                end: Point::new(s.end[0], s.end[1]),
                length_m: s.length,
                speed_limit_mps: s.speed_limit,
                geometry: s.geometry,
                depot: s.depot,
            })
            .collect();
        return Ok(build_network(&segments, file.merge_tolerance.unwrap_or(0.0))?);
    }

    let nodes: Vec<Node> = file
        .nodes
        .into_iter()
        .map(|n| Node {
            id: n.id,
            position: Point::new(n.x, n.y),
            is_depot: n.depot,
        })
        .collect();
    let edges = file
        .edges
        .into_iter()
        .map(|e| Edge::new(e.from, e.to, e.length, e.speed_limit, e.geometry))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(RoadNetwork::new(nodes, edges)?)
}

/// Serialize a network to the explicit node/edge file form.
pub fn network_to_toml(net: &RoadNetwork) -> String {
    #[derive(Serialize)]
    struct Out {
        node: Vec<NodeRecord>,
        edge: Vec<EdgeRecord>,
    }
    let out = Out {
        node: net
            .nodes()
            .iter()
            .map(|n| NodeRecord {
                id: n.id,
                x: n.position.x,
                y: n.position.y,
                depot: n.is_depot,
            })
            .collect(),
        edge: net
            .edges()
            .iter()
            .map(|e| EdgeRecord {
                from: e.from,
                to: e.to,
                length: e.length_m,
                speed_limit: e.speed_limit_mps,
                geometry: e.geometry,
            })
            .collect(),
    };
    toml::to_string(&out).expect("network serialization cannot fail")
}

/// A delivery problem: which nodes receive packages, how many vehicles are
/// available, and the cost trade-off weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    /// optional path of the network this scenario was written for
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub network: Option<String>,
    /// delivery node ids; package j is the j-th entry (1-based)
    pub deliveries: Vec<NodeId>,
    /// available vehicles N
    pub vehicles: usize,
    /// satisfaction weight in [0, 1]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Scenario {
    pub fn parse(text: &str, origin: &Path) -> Result<Self, ScenarioError> {
        let scenario: Scenario = toml::from_str(text).map_err(|e| ScenarioError::Parse {
            path: origin.to_path_buf(),
            message: e.to_string(),
        })?;
        scenario.check_structure()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::parse(&read(path)?, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serialization cannot fail")
    }

    pub fn save(&self, path: &Path) -> Result<(), ScenarioError> {
        write_atomic(path, &self.to_toml())
    }

    fn check_structure(&self) -> Result<(), ScenarioError> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(ScenarioError::AlphaOutOfRange(self.alpha));
        }
        if self.vehicles == 0 {
            return Err(ScenarioError::NoVehicles);
        }
        if self.deliveries.is_empty() {
            return Err(ScenarioError::NoDeliveries);
        }
        Ok(())
    }

    /// Resolve and validate the deliveries against a loaded network.
    pub fn delivery_set(&self, net: &RoadNetwork) -> Result<DeliverySet, ScenarioError> {
        Ok(DeliverySet::new(net, &self.deliveries)?)
    }
}

/// Load a scenario file and validate it against the network in one step.
pub fn load_scenario(path: &Path, net: &RoadNetwork) -> Result<(Scenario, DeliverySet), ScenarioError> {
    let scenario = Scenario::load(path)?;
    let deliveries = scenario.delivery_set(net)?;
    Ok((scenario, deliveries))
}

/// Draw `count` scenarios of `m` distinct delivery nodes, uniformly without
/// replacement from the non-depot nodes. The generator is a seeded ChaCha8
/// stream, so equal seeds reproduce equal scenario lists.
pub fn gen_scenarios(
    net: &RoadNetwork,
    m: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<Scenario>, ScenarioError> {
    if m == 0 {
        return Err(ScenarioError::NoDeliveries);
    }
    let candidates: Vec<NodeId> = net
        .nodes()
        .iter()
        .map(|n| n.id)
        .filter(|&id| id != net.depot())
        .collect();
    if m > candidates.len() {
        return Err(ScenarioError::TooManyDeliveries {
            requested: m,
            available: candidates.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut scenarios = Vec::with_capacity(count);
    for _ in 0..count {
        // partial Fisher-Yates: the first m slots become the draw, in order
        let mut pool = candidates.clone();
        for i in 0..m {
            let j = rng.gen_range(i..pool.len());
            pool.swap(i, j);
        }
        pool.truncate(m);
        scenarios.push(Scenario {
            network: None,
            deliveries: pool,
            vehicles: m,
            alpha: 0.5,
            seed: Some(seed),
        });
    }
    Ok(scenarios)
}

/// Load IDM parameters from a TOML file; omitted fields keep their defaults.
pub fn load_idm_params(path: &Path) -> Result<IdmParams, ScenarioError> {
    let text = read(path)?;
    let params: IdmParams = toml::from_str(&text).map_err(|e| ScenarioError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(params)
}
