//! Static dial-a-ride on top of plan chaining.
//!
//! Requests are cut into time batches, each batch is solved exactly without
//! looking at vehicle positions, and the resulting route plans are joined
//! into vehicle schedules by the chaining solver. A greedy insertion
//! heuristic is provided as the baseline.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chainsolve::ChainError;
use crate::model::{Cost, Duration, LocationId, ModelError, Time, TravelMatrix, Vehicle, VehicleId};

mod batch;
mod group;
mod insertion;
mod metrics;
mod pipeline;
mod validate;

pub use batch::{solve_batch_exact, BatchOptions, BatchResult, DEFAULT_MAX_BATCH};
pub use group::optimal_plan_for_group;
pub use insertion::insertion_heuristic;
pub use metrics::{evaluate_metrics, Metrics};
pub use pipeline::{
    batches, materialize, plans_to_chaining, run_proposed, run_proposed_detailed, ProposedConfig,
    ProposedOutcome,
};
pub use validate::{validate_darp, DarpViolation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RequestId(pub u32);

impl fmt::Display for RequestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "r{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: RequestId,
    pub origin: LocationId,
    pub destination: LocationId,
    /// Desired departure.
    pub t_r: Time,
    pub max_delay: Duration,
}

impl Request {
    /// Allowed service interval for one of the request's stops.
    ///
    /// The pickup may happen up to `max_delay` after `t_r`; the dropoff may
    /// be at most `max_delay` later than a direct ride leaving at `t_r`.
    pub fn window(&self, kind: StopKind, travel: &TravelMatrix) -> (Time, Time) {
        match kind {
            StopKind::Pickup => (self.t_r, self.t_r + self.max_delay),
            StopKind::Dropoff => (
                self.t_r,
                self.t_r + travel.get(self.origin, self.destination) + self.max_delay,
            ),
        }
    }

    pub fn location(&self, kind: StopKind) -> LocationId {
        match kind {
            StopKind::Pickup => self.origin,
            StopKind::Dropoff => self.destination,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Fleet {
    Vehicles { vehicles: Vec<Vehicle> },
    /// One vehicle per route plan, waiting at the plan's first stop.
    Auto,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DarpError {
    #[error("vehicle capacity must be at least 1")]
    ZeroCapacity,
    #[error("request {0} has a negative time or delay")]
    NegativeRequestTime(RequestId),
    #[error("duplicate request id {0}")]
    DuplicateRequest(RequestId),
    #[error("unknown request {0}")]
    UnknownRequest(RequestId),
    #[error("group of {size} requests exceeds capacity {capacity}")]
    GroupTooLarge { size: usize, capacity: u32 },
    #[error("batch of {size} requests exceeds the exact-solver limit of {limit}; use a shorter batch length")]
    BatchTooLarge { size: usize, limit: usize },
    #[error("batch length must be positive")]
    BatchLength,
    #[error("this method needs an explicit fleet")]
    AutoFleet,
    #[error("no vehicle can serve request {0}")]
    FleetExhausted(RequestId),
    #[error("{vehicles} vehicles cannot serve {plans} batch plans: {source}")]
    Chaining { plans: usize, vehicles: usize, source: ChainError },
    #[error("solution fails validation: {0:?}")]
    Invalid(Vec<DarpViolation>),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DarpInstance {
    requests: Vec<Request>,
    travel: TravelMatrix,
    capacity: u32,
    fleet: Fleet,
}

impl DarpInstance {
    pub fn new(
        mut requests: Vec<Request>,
        travel: TravelMatrix,
        capacity: u32,
        mut fleet: Fleet,
    ) -> Result<Self, DarpError> {
        if capacity == 0 {
            return Err(DarpError::ZeroCapacity);
        }
        requests.sort_by_key(|r| r.id);
        for (i, r) in requests.iter().enumerate() {
            if r.t_r < 0 || r.max_delay < 0 {
                return Err(DarpError::NegativeRequestTime(r.id));
            }
            for loc in [r.origin, r.destination] {
                if !travel.contains(loc) {
                    return Err(ModelError::UnknownLocation(loc.0).into());
                }
            }
            if i > 0 && requests[i - 1].id == r.id {
                return Err(DarpError::DuplicateRequest(r.id));
            }
        }
        if let Fleet::Vehicles { vehicles } = &mut fleet {
            vehicles.sort_by_key(|v| v.id);
            for (i, v) in vehicles.iter().enumerate() {
                if v.t_st < 0 {
                    return Err(ModelError::NegativeStartTime(v.id).into());
                }
                if !travel.contains(v.start) {
                    return Err(ModelError::UnknownLocation(v.start.0).into());
                }
                if i > 0 && vehicles[i - 1].id == v.id {
                    return Err(ModelError::DuplicateVehicle(v.id).into());
                }
            }
        }
        Ok(Self { requests, travel, capacity, fleet })
    }

    pub fn requests(&self) -> &[Request] {
        &self.requests
    }

    pub fn travel(&self) -> &TravelMatrix {
        &self.travel
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn fleet(&self) -> &Fleet {
        &self.fleet
    }

    pub fn with_fleet(&self, fleet: Fleet) -> Result<Self, DarpError> {
        Self::new(self.requests.clone(), self.travel.clone(), self.capacity, fleet)
    }

    pub fn request(&self, id: RequestId) -> Result<&Request, DarpError> {
        self.requests
            .binary_search_by_key(&id, |r| r.id)
            .map(|i| &self.requests[i])
            .map_err(|_| DarpError::UnknownRequest(id))
    }

    /// Latest desired departure minus the earliest; 0 when empty.
    pub fn horizon(&self) -> Duration {
        let lo = self.requests.iter().map(|r| r.t_r).min().unwrap_or(0);
        let hi = self.requests.iter().map(|r| r.t_r).max().unwrap_or(0);
        hi - lo
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopKind {
    Pickup,
    Dropoff,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stop {
    pub request: RequestId,
    pub kind: StopKind,
    pub location: LocationId,
    pub time: Time,
}

/// A timed sequence of stops. `onboard[i]` is the load after stop `i`;
/// `driving` sums the travel times between consecutive stops.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoutePlan {
    pub stops: Vec<Stop>,
    pub onboard: Vec<u32>,
    pub driving: Duration,
}

impl RoutePlan {
    pub fn from_stops(stops: Vec<Stop>, travel: &TravelMatrix) -> Self {
        let mut load = 0u32;
        let onboard = stops
            .iter()
            .map(|s| {
                match s.kind {
                    StopKind::Pickup => load += 1,
                    StopKind::Dropoff => load = load.saturating_sub(1),
                }
                load
            })
            .collect();
        let driving = stops.windows(2).map(|w| travel.get(w[0].location, w[1].location)).sum();
        Self { stops, onboard, driving }
    }

    pub fn start(&self) -> Option<Time> {
        self.stops.first().map(|s| s.time)
    }

    pub fn end(&self) -> Option<Time> {
        self.stops.last().map(|s| s.time)
    }

    pub fn span(&self) -> Duration {
        match (self.start(), self.end()) {
            (Some(a), Some(b)) => b - a,
            _ => 0,
        }
    }

    /// The same plan started `delay` ticks later.
    pub fn shifted(&self, delay: Duration) -> Self {
        let mut out = self.clone();
        for s in &mut out.stops {
            s.time += delay;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VehicleRoute {
    pub vehicle: Vehicle,
    pub plan: RoutePlan,
}

impl VehicleRoute {
    /// Empty drive to the first stop.
    pub fn approach(&self, travel: &TravelMatrix) -> Duration {
        self.plan.stops.first().map_or(0, |s| travel.get(self.vehicle.start, s.location))
    }

    pub fn cost(&self, travel: &TravelMatrix) -> Cost {
        self.approach(travel) + self.plan.driving
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DarpSolution {
    pub method: String,
    pub objective: Cost,
    pub routes: Vec<VehicleRoute>,
    /// Pickup time minus desired departure, by request id.
    pub delays: Vec<(RequestId, Duration)>,
}

impl DarpSolution {
    pub fn used_vehicles(&self) -> usize {
        self.routes.iter().filter(|r| !r.plan.stops.is_empty()).count()
    }

    pub fn vehicle_ids(&self) -> Vec<VehicleId> {
        self.routes.iter().map(|r| r.vehicle.id).collect()
    }
}

/// Builds a solution from routes, computing objective and delays.
pub(crate) fn assemble(
    method: String,
    routes: Vec<VehicleRoute>,
    instance: &DarpInstance,
) -> Result<DarpSolution, DarpError> {
    let objective = routes.iter().map(|r| r.cost(instance.travel())).sum();
    let mut delays = Vec::with_capacity(instance.requests().len());
    for route in &routes {
        for s in route.plan.stops.iter().filter(|s| s.kind == StopKind::Pickup) {
            delays.push((s.request, s.time - instance.request(s.request)?.t_r));
        }
    }
    delays.sort();
    Ok(DarpSolution { method, objective, routes, delays })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::tests::loc;

    /// Three points on a line, two ticks apart.
    pub fn line() -> TravelMatrix {
        TravelMatrix::from_grid(&[(0, 0), (2, 0), (4, 0)], 1).unwrap()
    }

    pub fn req(id: u32, from: u32, to: u32, t_r: Time, max_delay: Duration) -> Request {
        Request { id: RequestId(id), origin: loc(from), destination: loc(to), t_r, max_delay }
    }

    pub fn vehicle(id: u32, at: u32, t_st: Time) -> Vehicle {
        Vehicle { id: VehicleId(id), start: loc(at), t_st }
    }

    pub fn instance(requests: Vec<Request>, vehicles: Vec<Vehicle>) -> DarpInstance {
        DarpInstance::new(requests, line(), 4, Fleet::Vehicles { vehicles }).unwrap()
    }

    #[test]
    fn windows() {
        let r = req(1, 0, 2, 10, 5);
        assert_eq!(r.window(StopKind::Pickup, &line()), (10, 15));
        assert_eq!(r.window(StopKind::Dropoff, &line()), (10, 19));
    }

    #[test]
    fn instance_validation() {
        assert_eq!(
            DarpInstance::new(vec![], line(), 0, Fleet::Auto),
            Err(DarpError::ZeroCapacity)
        );
        assert_eq!(
            DarpInstance::new(vec![req(1, 0, 1, 0, -1)], line(), 1, Fleet::Auto),
            Err(DarpError::NegativeRequestTime(RequestId(1)))
        );
        assert_eq!(
            DarpInstance::new(vec![req(1, 0, 1, 0, 0), req(1, 1, 2, 0, 0)], line(), 1, Fleet::Auto),
            Err(DarpError::DuplicateRequest(RequestId(1)))
        );
        assert_eq!(
            DarpInstance::new(vec![req(1, 0, 7, 0, 0)], line(), 1, Fleet::Auto),
            Err(DarpError::Model(ModelError::UnknownLocation(7)))
        );
        let inst = instance(vec![req(2, 0, 1, 9, 0), req(1, 0, 1, 4, 0)], vec![]);
        assert_eq!(inst.requests()[0].id, RequestId(1));
        assert_eq!(inst.horizon(), 5);
        assert!(inst.request(RequestId(3)).is_err());
    }

    #[test]
    fn route_plan_profile() {
        let stops = vec![
            Stop { request: RequestId(1), kind: StopKind::Pickup, location: loc(0), time: 0 },
            Stop { request: RequestId(2), kind: StopKind::Pickup, location: loc(1), time: 2 },
            Stop { request: RequestId(1), kind: StopKind::Dropoff, location: loc(2), time: 4 },
            Stop { request: RequestId(2), kind: StopKind::Dropoff, location: loc(2), time: 4 },
        ];
        let plan = RoutePlan::from_stops(stops, &line());
        assert_eq!(plan.onboard, vec![1, 2, 1, 0]);
        assert_eq!(plan.driving, 4);
        assert_eq!(plan.span(), 4);
        assert_eq!(plan.shifted(3).start(), Some(3));
    }
}
