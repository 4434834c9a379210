//! Results document: everything one run produced, serialized as TOML with a
//! deterministic field order so equal inputs yield byte-identical files.

use serde::Serialize;

use crate::clustering::DeliverySet;
use crate::fleet::{FleetEvaluation, GapRecord, SweepResult};
use crate::microsim::{IdmParams, IdmVariant, SimConfig, SimResult};
use crate::network::NodeId;
use crate::routing::Route;
use crate::scenario::Scenario;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct ResultsDocument {
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepDoc>,
    #[serde(rename = "simulation", skip_serializing_if = "Vec::is_empty")]
    pub simulations: Vec<SimulationDoc>,
    #[serde(rename = "gap", skip_serializing_if = "Vec::is_empty")]
    pub gap_records: Vec<GapDoc>,
}

impl ResultsDocument {
    pub fn new(seed: Option<u64>, scenario: Option<Scenario>) -> Self {
        ResultsDocument {
            version: TOOL_VERSION.to_string(),
            seed,
            scenario,
            sweep: None,
            simulations: Vec::new(),
            gap_records: Vec::new(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("results serialization cannot fail")
    }
}

#[derive(Debug, Serialize)]
pub struct SweepDoc {
    pub alpha: f64,
    pub best_k: usize,
    #[serde(rename = "evaluation")]
    pub evaluations: Vec<EvaluationDoc>,
    /// the clustering hierarchy behind the cuts, for debugging
    #[serde(rename = "merge")]
    pub merges: Vec<MergeDoc>,
}

/// One clustering merge: children are cluster ids, leaves 0..M and merge r
/// creating id M + r; the distance is the complete-linkage separation.
#[derive(Debug, Serialize)]
pub struct MergeDoc {
    pub left: usize,
    pub right: usize,
    pub distance: f64,
}

impl SweepDoc {
    pub fn new(result: &SweepResult, deliveries: &DeliverySet) -> Self {
        SweepDoc {
            alpha: result.alpha,
            best_k: result.best_k,
            evaluations: result
                .evaluations
                .iter()
                .map(|e| EvaluationDoc::new(e, deliveries))
                .collect(),
            merges: result
                .tree
                .merges()
                .iter()
                .map(|m| MergeDoc { left: m.left, right: m.right, distance: m.distance })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EvaluationDoc {
    pub k: usize,
    pub j_s: f64,
    pub j_c: f64,
    pub j_s_norm: f64,
    pub j_c_norm: f64,
    pub total: f64,
    pub pareto: bool,
    #[serde(rename = "route")]
    pub routes: Vec<RouteDoc>,
}

impl EvaluationDoc {
    pub fn new(eval: &FleetEvaluation, deliveries: &DeliverySet) -> Self {
        EvaluationDoc {
            k: eval.k,
            j_s: eval.j_s,
            j_c: eval.j_c,
            j_s_norm: eval.j_s_norm,
            j_c_norm: eval.j_c_norm,
            total: eval.total,
            pareto: eval.pareto,
            routes: eval.routes.iter().map(|r| RouteDoc::new(r, deliveries)).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RouteDoc {
    pub vehicle: usize,
    /// package indices in visit order
    pub deliveries: Vec<usize>,
    pub path: Vec<NodeId>,
    pub round_trip_time: f64,
    #[serde(rename = "delivery")]
    pub delivery_times: Vec<DeliveryTimeDoc>,
}

#[derive(Debug, Serialize)]
pub struct DeliveryTimeDoc {
    pub package: usize,
    pub node: NodeId,
    pub t: f64,
}

impl RouteDoc {
    pub fn new(route: &Route, deliveries: &DeliverySet) -> Self {
        RouteDoc {
            vehicle: route.vehicle,
            deliveries: route.deliveries.clone(),
            path: route.path.clone(),
            round_trip_time: route.round_trip_time,
            delivery_times: route
                .delivery_times
                .iter()
                .map(|(&package, &t)| DeliveryTimeDoc {
                    package,
                    node: deliveries.node_of(package).expect("route package is valid"),
                    t,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SimulationDoc {
    pub k: usize,
    pub dt: f64,
    pub variant: IdmVariant,
    pub dwell: f64,
    #[serde(rename = "vehicle")]
    pub vehicles: Vec<SimVehicleDoc>,
    #[serde(rename = "package")]
    pub packages: Vec<SimPackageDoc>,
}

#[derive(Debug, Serialize)]
pub struct SimVehicleDoc {
    pub vehicle: usize,
    pub planned_s: f64,
    pub measured_s: f64,
}

#[derive(Debug, Serialize)]
pub struct SimPackageDoc {
    pub package: usize,
    pub node: NodeId,
    pub planned_s: f64,
    pub measured_s: f64,
}

impl SimulationDoc {
    pub fn new(
        k: usize,
        routes: &[Route],
        deliveries: &DeliverySet,
        result: &SimResult,
        params: &IdmParams,
        config: &SimConfig,
    ) -> Self {
        let vehicles = routes
            .iter()
            .map(|r| SimVehicleDoc {
                vehicle: r.vehicle,
                planned_s: r.round_trip_time,
                measured_s: result.round_trip_times[&r.vehicle],
            })
            .collect();
        let packages = routes
            .iter()
            .flat_map(|r| r.delivery_times.iter())
            .map(|(&package, &planned)| SimPackageDoc {
                package,
                node: deliveries.node_of(package).expect("route package is valid"),
                planned_s: planned,
                measured_s: result.delivery_times[&package],
            })
            .collect();
        let mut doc = SimulationDoc {
            k,
            dt: config.dt,
            variant: params.variant,
            dwell: params.dwell,
            vehicles,
            packages,
        };
        doc.packages.sort_by_key(|p| p.package);
        doc.vehicles.sort_by_key(|v| v.vehicle);
        doc
    }
}

#[derive(Debug, Serialize)]
pub struct GapDoc {
    pub scenario: usize,
    pub m: usize,
    pub t_greedy: f64,
    pub t_exact: f64,
    pub gap_pct: f64,
    /// wall-clock timings vary run to run and are excluded from the
    /// determinism contract
    pub greedy_seconds: f64,
    pub exact_seconds: f64,
}

impl From<&GapRecord> for GapDoc {
    fn from(r: &GapRecord) -> Self {
        GapDoc {
            scenario: r.scenario,
            m: r.m,
            t_greedy: r.t_greedy,
            t_exact: r.t_exact,
            gap_pct: r.gap_pct,
            greedy_seconds: r.greedy_seconds,
            exact_seconds: r.exact_seconds,
        }
    }
}

/// One row per scenario and fleet size, for the batch CSV export.
#[derive(Debug, Serialize)]
pub struct BatchRecord {
    pub scenario: usize,
    pub k: usize,
    pub j_s: f64,
    pub j_c: f64,
    pub j_s_norm: f64,
    pub j_c_norm: f64,
    pub total: f64,
    pub pareto: bool,
    pub best_k: usize,
}

/// Flatten batch sweeps into CSV rows ordered by (scenario, k).
pub fn batch_records(sweeps: &[SweepResult]) -> Vec<BatchRecord> {
    sweeps
        .iter()
        .enumerate()
        .flat_map(|(scenario, sweep)| {
            sweep.evaluations.iter().map(move |e| BatchRecord {
                scenario,
                k: e.k,
                j_s: e.j_s,
                j_c: e.j_c,
                j_s_norm: e.j_s_norm,
                j_c_norm: e.j_c_norm,
                total: e.total,
                pareto: e.pareto,
                best_k: sweep.best_k,
            })
        })
        .collect()
}

/// Render batch records as CSV.
pub fn batch_csv(records: &[BatchRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for record in records {
        writer.serialize(record).expect("csv serialization cannot fail");
    }
    String::from_utf8(writer.into_inner().expect("csv flush cannot fail"))
        .expect("csv output is utf-8")
}
