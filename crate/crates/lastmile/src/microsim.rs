//! Time-stepped car-following simulation of planned routes under the
//! Intelligent Driver Model, with per-segment speed limits and a fixed dwell
//! stop at every delivery node. Measured times are compared against the
//! planner's dwell-free costs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clustering::DeliverySet;
use crate::network::{Geometry, NetworkError, NodeId, RoadNetwork};
use crate::routing::Route;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("IDM parameter {name} must be positive, got {value}")]
    NonPositiveParam { name: &'static str, value: f64 },
    #[error("straight-segment limit {v_s} must exceed arc limit {v_a}")]
    SpeedOrdering { v_s: f64, v_a: f64 },
    #[error("time step must be positive, got {0}")]
    InvalidDt(f64),
    #[error("no routes to simulate")]
    NoRoutes,
    #[error("route of vehicle {vehicle} is empty")]
    EmptyRoute { vehicle: usize },
    #[error("package {0} is not part of the delivery set")]
    UnknownPackage(usize),
    #[error("simulation exceeded the {limit} s runtime guard; model is not terminating")]
    TimeGuard { limit: f64 },
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// Which acceleration law to integrate.
///
/// `GapRate` uses the exponent `delta` for the speed-ratio term and scales
/// the interaction by `delta` times the gap rate; `Standard` is canonical
/// IDM with exponent 4 and the closing-speed term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IdmVariant {
    #[default]
    GapRate,
    Standard,
}

/// Car-following parameters. Defaults reproduce the 1:25-scale testbed
/// configuration: theta = 1 s, delta = 0.06, a_max = 5 m/s^2, a_min = 25
/// m/s^2, v_s = 0.5 m/s, v_a = 0.25 m/s, 3 s dwell, with s0 = 0.1 m as the
/// minimum bumper-to-bumper gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IdmParams {
    /// desired time headway, seconds
    pub theta: f64,
    /// speed-ratio exponent, also the gap-rate coupling factor
    pub delta: f64,
    /// maximum acceleration, m/s^2
    pub a_max: f64,
    /// comfortable braking (positive), m/s^2
    pub a_min: f64,
    /// minimum gap, meters
    pub s0: f64,
    /// straight-segment speed limit, m/s
    pub v_s: f64,
    /// arc-segment speed limit, m/s
    pub v_a: f64,
    /// stop duration per delivery, seconds
    pub dwell: f64,
    pub variant: IdmVariant,
}

impl Default for IdmParams {
    fn default() -> Self {
        IdmParams {
            theta: 1.0,
            delta: 0.06,
            a_max: 5.0,
            a_min: 25.0,
            s0: 0.1,
            v_s: 0.5,
            v_a: 0.25,
            dwell: 3.0,
            variant: IdmVariant::GapRate,
        }
    }
}

impl IdmParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            ("theta", self.theta),
            ("delta", self.delta),
            ("a_max", self.a_max),
            ("a_min", self.a_min),
            ("s0", self.s0),
            ("v_s", self.v_s),
            ("v_a", self.v_a),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(SimError::NonPositiveParam { name, value });
            }
        }
        if self.dwell < 0.0 || !self.dwell.is_finite() {
            return Err(SimError::NonPositiveParam { name: "dwell", value: self.dwell });
        }
        if self.v_s <= self.v_a {
            return Err(SimError::SpeedOrdering { v_s: self.v_s, v_a: self.v_a });
        }
        Ok(())
    }

    /// Free speed on an edge: the segment-geometry limit, never above the
    /// edge's own posted limit so the simulator cannot beat the planner.
    pub fn segment_limit(&self, geometry: Geometry, posted_mps: f64) -> f64 {
        let geometric = match geometry {
            Geometry::Straight => self.v_s,
            Geometry::Arc => self.v_a,
        };
        geometric.min(posted_mps)
    }
}

/// IDM acceleration. `gap` is the bumper distance to the leader (`None` for
/// free-road driving) and `approach_rate` the gap rate, leader speed minus
/// follower speed.
pub fn idm_accel(v: f64, v0: f64, gap: Option<f64>, approach_rate: f64, p: &IdmParams) -> f64 {
    let free_term = match p.variant {
        IdmVariant::GapRate => (v / v0).powf(p.delta),
        IdmVariant::Standard => (v / v0).powi(4),
    };
    let interaction = match gap {
        None => 0.0,
        Some(s) => {
            let coupling = 2.0 * (p.a_max * p.a_min).sqrt();
            let s_star = match p.variant {
                IdmVariant::GapRate => {
                    p.s0 + v * p.theta + v * p.delta * approach_rate / coupling
                }
                // canonical form over the closing speed
                IdmVariant::Standard => p.s0 + v * p.theta + v * (-approach_rate) / coupling,
            };
            (s_star / s).powi(2)
        }
    };
    p.a_max * (1.0 - free_term - interaction)
}

#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// integration step, seconds
    pub dt: f64,
    /// keep every n-th step in the trajectory log; 0 disables logging
    pub log_every: usize,
    /// runtime guard; derived from the planned horizon when `None`
    pub max_time: Option<f64>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { dt: 0.02, log_every: 0, max_time: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub vehicle: usize,
    pub edge_from: NodeId,
    pub edge_to: NodeId,
    /// arc length along the vehicle's own path, meters
    pub position_m: f64,
    pub speed_mps: f64,
}

/// Measured outcomes of one simulation run.
#[derive(Debug, Clone)]
pub struct SimResult {
    /// package -> first arrival at its delivery node, seconds from start
    pub delivery_times: BTreeMap<usize, f64>,
    /// vehicle -> time of arrival at the end of its path, seconds
    pub round_trip_times: BTreeMap<usize, f64>,
    pub trajectory: Vec<TrajectorySample>,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    start_s: f64,
    end_s: f64,
    from: NodeId,
    to: NodeId,
    limit: f64,
}

#[derive(Debug, Clone, Copy)]
struct DeliveryStop {
    position_s: f64,
    package: usize,
}

#[derive(Debug)]
enum Status {
    Driving,
    Dwelling { steps_left: u64 },
    Done,
}

struct VehicleSim {
    vehicle: usize,
    segments: Vec<Segment>,
    stops: Vec<DeliveryStop>,
    next_stop: usize,
    total_length: f64,
    seg_ix: usize,
    x: f64,
    v: f64,
    status: Status,
}

impl VehicleSim {
    fn build(
        net: &RoadNetwork,
        deliveries: &DeliverySet,
        route: &Route,
        params: &IdmParams,
    ) -> Result<Self, SimError> {
        if route.path.is_empty() {
            return Err(SimError::EmptyRoute { vehicle: route.vehicle });
        }
        let mut segments = Vec::with_capacity(route.path.len().saturating_sub(1));
        let mut node_pos = Vec::with_capacity(route.path.len());
        let mut cum = 0.0f64;
        node_pos.push(0.0);
        for pair in route.path.windows(2) {
            let edge = net
                .edge_between(pair[0], pair[1])
                .ok_or(NetworkError::MissingEdge { from: pair[0], to: pair[1] })?;
            let start_s = cum;
            cum += edge.length_m;
            node_pos.push(cum);
            segments.push(Segment {
                start_s,
                end_s: cum,
                from: edge.from,
                to: edge.to,
                limit: params.segment_limit(edge.geometry, edge.speed_limit_mps),
            });
        }

        let mut stops = Vec::with_capacity(route.deliveries.len());
        for &package in &route.deliveries {
            let node = deliveries
                .node_of(package)
                .ok_or(SimError::UnknownPackage(package))?;
            let index = route
                .path
                .iter()
                .position(|&p| p == node)
                .ok_or(SimError::UnknownPackage(package))?;
            stops.push(DeliveryStop { position_s: node_pos[index], package });
        }
        stops.sort_by(|a, b| a.position_s.partial_cmp(&b.position_s).unwrap());

        Ok(VehicleSim {
            vehicle: route.vehicle,
            segments,
            stops,
            next_stop: 0,
            total_length: cum,
            seg_ix: 0,
            x: 0.0,
            v: 0.0,
            status: Status::Driving,
        })
    }

    fn current_segment(&self) -> Option<&Segment> {
        self.segments.get(self.seg_ix)
    }

    /// Advance `seg_ix` to the segment containing `x` (boundaries belong to
    /// the following segment) and clamp speed to its limit.
    fn settle_segment(&mut self) {
        while self.seg_ix + 1 < self.segments.len() && self.x >= self.segments[self.seg_ix].end_s {
            self.seg_ix += 1;
        }
        if let Some(seg) = self.segments.get(self.seg_ix) {
            self.v = self.v.min(seg.limit);
        }
    }
}

/// Integrate all routes from a standing start at the depot until every
/// vehicle has returned. Vehicles interact only through same-edge leader
/// gaps; a degenerate single-node path finishes immediately at time zero.
pub fn simulate(
    net: &RoadNetwork,
    deliveries: &DeliverySet,
    routes: &[Route],
    params: &IdmParams,
    config: &SimConfig,
) -> Result<SimResult, SimError> {
    params.validate()?;
    if !(config.dt > 0.0 && config.dt.is_finite()) {
        return Err(SimError::InvalidDt(config.dt));
    }
    if routes.is_empty() {
        return Err(SimError::NoRoutes);
    }
    let dt = config.dt;
    let dwell_steps = (params.dwell / dt).ceil() as u64;

    let mut vehicles = routes
        .iter()
        .map(|r| VehicleSim::build(net, deliveries, r, params))
        .collect::<Result<Vec<_>, _>>()?;

    let horizon: f64 = routes
        .iter()
        .map(|r| r.round_trip_time + r.deliveries.len() as f64 * params.dwell)
        .fold(0.0, f64::max);
    let max_time = config.max_time.unwrap_or(300.0 + 20.0 * horizon);

    let mut result = SimResult {
        delivery_times: BTreeMap::new(),
        round_trip_times: BTreeMap::new(),
        trajectory: Vec::new(),
    };

    // vehicles with nothing to drive are done at t = 0
    for vehicle in &mut vehicles {
        if vehicle.total_length == 0.0 {
            vehicle.status = Status::Done;
            result.round_trip_times.insert(vehicle.vehicle, 0.0);
        }
    }

    // per-step view of a vehicle as its followers see it
    struct Observed {
        edge: (NodeId, NodeId),
        offset: f64,
        speed: f64,
    }

    let mut t = 0.0f64;
    let mut step: u64 = 0;
    while vehicles.iter().any(|v| !matches!(v.status, Status::Done)) {
        if t > max_time {
            return Err(SimError::TimeGuard { limit: max_time });
        }

        let snapshot: Vec<Option<Observed>> = vehicles
            .iter()
            .map(|veh| match veh.status {
                Status::Done => None,
                _ => veh.current_segment().map(|seg| Observed {
                    edge: (seg.from, seg.to),
                    offset: veh.x - seg.start_s,
                    speed: veh.v,
                }),
            })
            .collect();

        let t_next = t + dt;
        for (ix, veh) in vehicles.iter_mut().enumerate() {
            match veh.status {
                Status::Done => {}
                Status::Dwelling { ref mut steps_left } => {
                    *steps_left -= 1;
                    if *steps_left == 0 {
                        veh.status = Status::Driving;
                    }
                }
                Status::Driving => {
                    let seg = *veh.current_segment().expect("driving vehicle has a segment");
                    let my_offset = veh.x - seg.start_s;
                    // nearest vehicle strictly ahead on the same directed edge
                    let mut leader: Option<(f64, f64)> = None;
                    for (other_ix, other) in snapshot.iter().enumerate() {
                        if other_ix == ix {
                            continue;
                        }
                        let Some(other) = other else { continue };
                        if other.edge == (seg.from, seg.to) && other.offset > my_offset {
                            let gap = other.offset - my_offset;
                            if leader.is_none_or(|(g, _)| gap < g) {
                                leader = Some((gap, other.speed));
                            }
                        }
                    }
                    let (gap, approach_rate) = match leader {
                        Some((gap, leader_v)) => (Some(gap), leader_v - veh.v),
                        None => (None, 0.0),
                    };

                    let a = idm_accel(veh.v, seg.limit, gap, approach_rate, params);
                    veh.v = (veh.v + a * dt).max(0.0);
                    let x_new = veh.x + veh.v * dt;

                    let pending = veh.stops.get(veh.next_stop).copied();
                    if let Some(stop) = pending.filter(|s| x_new >= s.position_s) {
                        // snap to the delivery node and hold
                        veh.x = stop.position_s;
                        veh.v = 0.0;
                        veh.next_stop += 1;
                        result.delivery_times.insert(stop.package, t_next);
                        if dwell_steps == 0 {
                            veh.status = Status::Driving;
                        } else {
                            veh.status = Status::Dwelling { steps_left: dwell_steps };
                        }
                        veh.settle_segment();
                    } else if x_new >= veh.total_length {
                        veh.x = veh.total_length;
                        veh.v = 0.0;
                        veh.status = Status::Done;
                        result.round_trip_times.insert(veh.vehicle, t_next);
                    } else {
                        veh.x = x_new;
                        veh.settle_segment();
                    }
                }
            }
        }

        t = t_next;
        step += 1;
        if config.log_every > 0 && step.is_multiple_of(config.log_every as u64) {
            for veh in &vehicles {
                if matches!(veh.status, Status::Done) {
                    continue;
                }
                let seg = veh.current_segment().expect("active vehicle has a segment");
                result.trajectory.push(TrajectorySample {
                    t,
                    vehicle: veh.vehicle,
                    edge_from: seg.from,
                    edge_to: seg.to,
                    position_m: veh.x,
                    speed_mps: veh.v,
                });
            }
        }
    }

    Ok(result)
}
