//! Domain types for plan chaining: plans, vehicles, delayed variants, travel
//! times and the cost policies that price a connection.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A point in time, in integer ticks (one tick is one second).
pub type Time = i64;
/// A non-negative number of ticks.
pub type Duration = i64;
/// Integral connection cost.
pub type Cost = i64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PlanId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VehicleId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LocationId(pub u32);

impl LocationId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for PlanId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.0)
    }
}

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("travel matrix is not square (row {row} has {len} entries, expected {expected})")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("travel matrix entry ({from}, {to}) is negative: {value}")]
    NegativeTravelTime { from: usize, to: usize, value: Duration },
    #[error("travel matrix diagonal entry {0} is not zero")]
    NonZeroDiagonal(usize),
    #[error("grid speed must be positive")]
    NonPositiveSpeed,
    #[error("plan {0}: origin time is after destination time")]
    PlanTimesReversed(PlanId),
    #[error("plan {0}: negative time or delay")]
    NegativePlanTime(PlanId),
    #[error("vehicle {0}: negative start time")]
    NegativeStartTime(VehicleId),
    #[error("duplicate plan id {0}")]
    DuplicatePlan(PlanId),
    #[error("duplicate vehicle id {0}")]
    DuplicateVehicle(VehicleId),
    #[error("location {0} is outside the travel matrix")]
    UnknownLocation(u32),
    #[error("unknown plan {0}")]
    UnknownPlan(PlanId),
    #[error("unknown vehicle {0}")]
    UnknownVehicle(VehicleId),
    #[error("delay {delay} of plan {plan} is outside [0, {max}]")]
    DelayOutOfRange { plan: PlanId, delay: Duration, max: Duration },
    #[error("cannot connect plan {0} to a variant of itself")]
    SamePlan(PlanId),
    #[error("connection from {from} to {to} is not feasible")]
    InfeasibleConnection { from: Origin, to: VariantRef },
    #[error("invalid cost policy: {0}")]
    InvalidPolicy(String),
}

/// Dense, possibly asymmetric travel-time matrix. The triangle inequality is
/// not assumed anywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TravelMatrix {
    size: usize,
    data: Vec<Duration>,
}

impl TravelMatrix {
    pub fn from_rows(rows: Vec<Vec<Duration>>) -> Result<Self, ModelError> {
        let size = rows.len();
        let mut data = Vec::with_capacity(size * size);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != size {
                return Err(ModelError::NotSquare { row: i, len: row.len(), expected: size });
            }
            for (j, &value) in row.iter().enumerate() {
                if value < 0 {
                    return Err(ModelError::NegativeTravelTime { from: i, to: j, value });
                }
                if i == j && value != 0 {
                    return Err(ModelError::NonZeroDiagonal(i));
                }
            }
            data.extend(row);
        }
        Ok(Self { size, data })
    }

    /// Manhattan distance between integer grid points divided by `speed`,
    /// rounded up.
    pub fn from_grid(points: &[(i64, i64)], speed: i64) -> Result<Self, ModelError> {
        if speed <= 0 {
            return Err(ModelError::NonPositiveSpeed);
        }
        let size = points.len();
        let mut data = Vec::with_capacity(size * size);
        for &(ax, ay) in points {
            for &(bx, by) in points {
                let dist = (ax - bx).abs() + (ay - by).abs();
                data.push((dist + speed - 1) / speed);
            }
        }
        Ok(Self { size, data })
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, from: LocationId, to: LocationId) -> Duration {
        self.data[from.index() * self.size + to.index()]
    }

    pub fn rows(&self) -> Vec<Vec<Duration>> {
        self.data.chunks(self.size.max(1)).take(self.size).map(<[_]>::to_vec).collect()
    }

    pub fn contains(&self, loc: LocationId) -> bool {
        loc.index() < self.size
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plan {
    pub id: PlanId,
    pub origin: LocationId,
    pub destination: LocationId,
    pub t_or: Time,
    pub t_de: Time,
    pub d_max: Duration,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vehicle {
    pub id: VehicleId,
    pub start: LocationId,
    pub t_st: Time,
}

/// A plan shifted later by `delay` ticks. Delay zero is the plan itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VariantRef {
    pub plan: PlanId,
    pub delay: Duration,
}

impl VariantRef {
    pub fn base(plan: PlanId) -> Self {
        Self { plan, delay: 0 }
    }

    pub fn new(plan: PlanId, delay: Duration) -> Self {
        Self { plan, delay }
    }
}

impl fmt::Display for VariantRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.plan, self.delay)
    }
}

/// The left end of a connection: a vehicle or a (possibly delayed) plan.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Origin {
    Vehicle(VehicleId),
    Plan(VariantRef),
}

impl Origin {
    pub fn plan(plan: PlanId) -> Self {
        Origin::Plan(VariantRef::base(plan))
    }

    pub fn variant(self) -> Option<VariantRef> {
        match self {
            Origin::Plan(v) => Some(v),
            Origin::Vehicle(_) => None,
        }
    }
}

impl From<VariantRef> for Origin {
    fn from(v: VariantRef) -> Self {
        Origin::Plan(v)
    }
}

impl From<VehicleId> for Origin {
    fn from(v: VehicleId) -> Self {
        Origin::Vehicle(v)
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Vehicle(v) => v.fmt(f),
            Origin::Plan(p) => p.fmt(f),
        }
    }
}

/// Penalty weight per tick of waiting, kept as an exact ratio.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WaitWeight {
    pub num: u32,
    pub den: u32,
}

impl WaitWeight {
    pub fn new(num: u32, den: u32) -> Result<Self, ModelError> {
        if den == 0 {
            return Err(ModelError::InvalidPolicy("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    /// `round(weight * wait)` with halves rounded up.
    pub fn penalty(self, wait: Duration) -> Cost {
        let num = i128::from(self.num) * i128::from(wait);
        let den = i128::from(self.den);
        ((2 * num + den) / (2 * den)) as Cost
    }
}

impl FromStr for WaitWeight {
    type Err = ModelError;

    /// Accepts `3`, `0.25` or `1/4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidPolicy(format!("bad wait weight `{s}`"));
        if let Some((n, d)) = s.split_once('/') {
            let num = n.trim().parse().map_err(|_| bad())?;
            let den = d.trim().parse().map_err(|_| bad())?;
            return WaitWeight::new(num, den);
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 6 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u32.pow(frac.len() as u32);
        let int: u32 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: u32 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let num = int.checked_mul(den).and_then(|v| v.checked_add(frac)).ok_or_else(bad)?;
        WaitWeight::new(num, den)
    }
}

/// How connections are priced.
///
/// Waiting-based policies look at the nominal wait between the undelayed
/// plans, so a connection costs the same whichever delays its endpoints
/// carry. They apply to plan-to-plan connections only; a vehicle idling at
/// its start location before the first plan is never penalized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CostPolicy {
    /// 1 per used vehicle, 0 per plan-to-plan connection.
    FleetSize,
    /// Connection cost equals travel time.
    TravelCost,
    /// Travel time; connections waiting longer than `max_wait` are forbidden.
    TravelCostWaitCapped { max_wait: Duration },
    /// Travel time plus `weight * wait`, rounded half-up.
    TravelCostWaitPenalized { weight: WaitWeight },
}

impl fmt::Display for CostPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostPolicy::FleetSize => write!(f, "fleet"),
            CostPolicy::TravelCost => write!(f, "cost"),
            CostPolicy::TravelCostWaitCapped { max_wait } => write!(f, "cost-waitcap:{max_wait}"),
            CostPolicy::TravelCostWaitPenalized { weight } => {
                write!(f, "cost-waitpen:{}/{}", weight.num, weight.den)
            }
        }
    }
}

impl FromStr for CostPolicy {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.split_once(':') {
            None if s == "fleet" => Ok(CostPolicy::FleetSize),
            None if s == "cost" => Ok(CostPolicy::TravelCost),
            Some(("cost-waitcap", v)) => {
                let max_wait: Duration = v
                    .parse()
                    .map_err(|_| ModelError::InvalidPolicy(format!("bad wait cap `{v}`")))?;
                if max_wait < 0 {
                    return Err(ModelError::InvalidPolicy("negative wait cap".into()));
                }
                Ok(CostPolicy::TravelCostWaitCapped { max_wait })
            }
            Some(("cost-waitpen", v)) => {
                Ok(CostPolicy::TravelCostWaitPenalized { weight: v.parse()? })
            }
            _ => Err(ModelError::InvalidPolicy(format!("unknown policy `{s}`"))),
        }
    }
}

/// Where and when an origin becomes free, plus the plan it stands for.
#[derive(Clone, Copy, Debug)]
struct Departure<'a> {
    location: LocationId,
    ready: Time,
    plan: Option<&'a Plan>,
}

/// Plans, vehicles, travel times and the pricing policy.
///
/// Plans and vehicles are kept sorted by id; the index maps are rebuilt on
/// construction and never mutated.
#[derive(Clone, Debug)]
pub struct ChainingInstance {
    plans: Vec<Plan>,
    vehicles: Vec<Vehicle>,
    travel: TravelMatrix,
    policy: CostPolicy,
    plan_index: HashMap<PlanId, usize>,
    vehicle_index: HashMap<VehicleId, usize>,
}

impl PartialEq for ChainingInstance {
    fn eq(&self, other: &Self) -> bool {
        self.plans == other.plans
            && self.vehicles == other.vehicles
            && self.travel == other.travel
            && self.policy == other.policy
    }
}

impl ChainingInstance {
    pub fn new(
        mut plans: Vec<Plan>,
        mut vehicles: Vec<Vehicle>,
        travel: TravelMatrix,
        policy: CostPolicy,
    ) -> Result<Self, ModelError> {
        plans.sort_by_key(|p| p.id);
        vehicles.sort_by_key(|v| v.id);
        let mut plan_index = HashMap::with_capacity(plans.len());
        for (i, p) in plans.iter().enumerate() {
            if p.t_or < 0 || p.d_max < 0 {
                return Err(ModelError::NegativePlanTime(p.id));
            }
            if p.t_or > p.t_de {
                return Err(ModelError::PlanTimesReversed(p.id));
            }
            for loc in [p.origin, p.destination] {
                if !travel.contains(loc) {
                    return Err(ModelError::UnknownLocation(loc.0));
                }
            }
            if plan_index.insert(p.id, i).is_some() {
                return Err(ModelError::DuplicatePlan(p.id));
            }
        }
        let mut vehicle_index = HashMap::with_capacity(vehicles.len());
        for (i, v) in vehicles.iter().enumerate() {
            if v.t_st < 0 {
                return Err(ModelError::NegativeStartTime(v.id));
            }
            if !travel.contains(v.start) {
                return Err(ModelError::UnknownLocation(v.start.0));
            }
            if vehicle_index.insert(v.id, i).is_some() {
                return Err(ModelError::DuplicateVehicle(v.id));
            }
        }
        match policy {
            CostPolicy::TravelCostWaitCapped { max_wait } if max_wait < 0 => {
                return Err(ModelError::InvalidPolicy("negative wait cap".into()))
            }
            CostPolicy::TravelCostWaitPenalized { weight } if weight.den == 0 => {
                return Err(ModelError::InvalidPolicy("zero denominator".into()))
            }
            _ => {}
        }
        Ok(Self { plans, vehicles, travel, policy, plan_index, vehicle_index })
    }

    pub fn plans(&self) -> &[Plan] {
        &self.plans
    }

    pub fn vehicles(&self) -> &[Vehicle] {
        &self.vehicles
    }

    pub fn travel(&self) -> &TravelMatrix {
        &self.travel
    }

    pub fn policy(&self) -> CostPolicy {
        self.policy
    }

    /// Same plans and vehicles priced by another policy.
    pub fn with_policy(&self, policy: CostPolicy) -> Self {
        Self { policy, ..self.clone() }
    }

    /// Same data without the given vehicles.
    pub fn without_vehicles(&self, drop: &[VehicleId]) -> Self {
        let vehicles = self.vehicles.iter().filter(|v| !drop.contains(&v.id)).copied().collect();
        Self::new(self.plans.clone(), vehicles, self.travel.clone(), self.policy)
            .expect("subset of a valid instance is valid")
    }

    pub fn plan(&self, id: PlanId) -> Result<&Plan, ModelError> {
        self.plan_index.get(&id).map(|&i| &self.plans[i]).ok_or(ModelError::UnknownPlan(id))
    }

    pub fn plan_position(&self, id: PlanId) -> Option<usize> {
        self.plan_index.get(&id).copied()
    }

    pub fn vehicle(&self, id: VehicleId) -> Result<&Vehicle, ModelError> {
        self.vehicle_index
            .get(&id)
            .map(|&i| &self.vehicles[i])
            .ok_or(ModelError::UnknownVehicle(id))
    }

    /// Resolves a variant, checking that its delay is within the plan's budget.
    pub fn variant_plan(&self, v: VariantRef) -> Result<&Plan, ModelError> {
        let plan = self.plan(v.plan)?;
        if v.delay < 0 || v.delay > plan.d_max {
            return Err(ModelError::DelayOutOfRange { plan: v.plan, delay: v.delay, max: plan.d_max });
        }
        Ok(plan)
    }

    fn departure(&self, origin: Origin) -> Result<Departure<'_>, ModelError> {
        match origin {
            Origin::Vehicle(id) => {
                let v = self.vehicle(id)?;
                Ok(Departure { location: v.start, ready: v.t_st, plan: None })
            }
            Origin::Plan(var) => {
                let p = self.variant_plan(var)?;
                Ok(Departure { location: p.destination, ready: p.t_de + var.delay, plan: Some(p) })
            }
        }
    }

    fn check_pair(&self, dep: &Departure<'_>, target: &Plan) -> Result<(), ModelError> {
        match dep.plan {
            Some(p) if p.id == target.id => Err(ModelError::SamePlan(p.id)),
            _ => Ok(()),
        }
    }

    /// Travel time from the origin's end location to the target plan's
    /// origin. Delays never change locations.
    pub fn travel_time(&self, from: Origin, to: VariantRef) -> Result<Duration, ModelError> {
        let dep = self.departure(from)?;
        let target = self.variant_plan(to)?;
        Ok(self.travel.get(dep.location, target.origin))
    }

    /// Zero-slack, zero-travel ties between two plans are only allowed in
    /// increasing `(t_or, id)` order, which keeps the connection graph
    /// acyclic.
    fn tie_allowed(from: &Plan, to: &Plan) -> bool {
        (from.t_or, from.id) < (to.t_or, to.id)
    }

    fn feasible_at(&self, dep: &Departure<'_>, target: &Plan, delay: Duration) -> bool {
        let tt = self.travel.get(dep.location, target.origin);
        let start = target.t_or + delay;
        if dep.ready + tt > start {
            return false;
        }
        match dep.plan {
            Some(from) if tt == 0 && dep.ready == start => Self::tie_allowed(from, target),
            _ => true,
        }
    }

    pub fn connection_feasible(&self, from: Origin, to: VariantRef) -> Result<bool, ModelError> {
        let dep = self.departure(from)?;
        let target = self.variant_plan(to)?;
        self.check_pair(&dep, target)?;
        Ok(self.feasible_at(&dep, target, to.delay))
    }

    /// Smallest non-negative delay of `to` that makes the connection
    /// feasible, ignoring the target's delay budget.
    pub fn min_target_delay(&self, from: Origin, to: PlanId) -> Result<Duration, ModelError> {
        let dep = self.departure(from)?;
        let target = self.plan(to)?;
        self.check_pair(&dep, target)?;
        let tt = self.travel.get(dep.location, target.origin);
        let delay = (tt - (target.t_or - dep.ready)).max(0);
        if self.feasible_at(&dep, target, delay) {
            Ok(delay)
        } else {
            Ok(delay + 1)
        }
    }

    /// Price of a feasible connection; `None` means forbidden by the policy.
    pub fn connection_cost(&self, from: Origin, to: VariantRef) -> Result<Option<Cost>, ModelError> {
        let dep = self.departure(from)?;
        let target = self.variant_plan(to)?;
        self.check_pair(&dep, target)?;
        if !self.feasible_at(&dep, target, to.delay) {
            return Err(ModelError::InfeasibleConnection { from, to });
        }
        let tt = self.travel.get(dep.location, target.origin);
        let nominal_wait = dep.plan.map(|p| (target.t_or - p.t_de - tt).max(0));
        Ok(match (self.policy, nominal_wait) {
            (CostPolicy::FleetSize, w) => Some(if w.is_none() { 1 } else { 0 }),
            (CostPolicy::TravelCost, _) | (_, None) => Some(tt),
            (CostPolicy::TravelCostWaitCapped { max_wait }, Some(w)) => (w <= max_wait).then_some(tt),
            (CostPolicy::TravelCostWaitPenalized { weight }, Some(w)) => Some(tt + weight.penalty(w)),
        })
    }

    /// Actual idle time on a connection at the given delays.
    pub fn wait_time(&self, from: Origin, to: VariantRef) -> Result<Duration, ModelError> {
        let dep = self.departure(from)?;
        let target = self.variant_plan(to)?;
        let tt = self.travel.get(dep.location, target.origin);
        Ok(target.t_or + to.delay - dep.ready - tt)
    }
}
