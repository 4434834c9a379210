//! Last-mile delivery fleet optimizer.
//!
//! Assigns up to N vehicles to M packages on a directed road network via
//! complete-linkage clustering, builds each vehicle's delivery route with a
//! greedy nearest-delivery search (with an exact TSP oracle for small
//! instances), sweeps fleet sizes against a weighted satisfaction/operating
//! cost objective, and validates planned costs with an Intelligent Driver
//! Model microsimulation.

pub mod clustering;
pub mod fixture;
pub mod fleet;
pub mod microsim;
pub mod network;
pub mod results;
pub mod routing;
pub mod scenario;

pub use clustering::{build_tree, ClusteringError, ClusterTree, Delivery, DeliverySet, Merge};
pub use fleet::{
    batch_sweep, evaluate, gap_study, pareto_frontier, sweep, FleetError, FleetEvaluation,
    GapRecord, SweepResult,
};
pub use microsim::{
    idm_accel, simulate, IdmParams, IdmVariant, SimConfig, SimError, SimResult, TrajectorySample,
};
pub use network::{
    build_network, Edge, Geometry, NetworkError, Node, NodeId, Path, Point, RoadNetwork,
    RoadSegment, SegmentEnd,
};
pub use results::ResultsDocument;
pub use routing::{
    assignment_from_clusters, exact_route, greedy_route, greedy_route_with_stats,
    AssignmentMatrix, Route, RouteStats, RoutingError, DEFAULT_EXACT_CAP,
};
pub use scenario::{gen_scenarios, load_network, load_scenario, Scenario, ScenarioError};
