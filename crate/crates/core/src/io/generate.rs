use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::darp::{Request, RequestId};
use crate::model::{CostPolicy, Duration, LocationId, Plan, PlanId, Time, TravelMatrix, Vehicle, VehicleId};

use super::format::{InstanceFile, TravelSpec, SCHEMA_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FleetMode {
    /// This many vehicles at random locations, free from time 0.
    Fixed(usize),
    /// One vehicle per plan, waiting at its origin from its start time.
    /// Dial-a-ride instances get an on-demand fleet instead.
    Dedicated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeneratorParams {
    pub seed: u64,
    pub locations: usize,
    /// Points are drawn from a `grid x grid` square; one tick per unit.
    pub grid: i64,
    pub horizon: Time,
    pub count: usize,
    /// Inclusive range for plan delay budgets or request maximum delays.
    pub delay: (Duration, Duration),
    /// Inclusive range of extra plan duration beyond the direct drive.
    pub service: (Duration, Duration),
    pub capacity: u32,
    pub fleet: FleetMode,
    pub policy: CostPolicy,
}

impl GeneratorParams {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            locations: 6,
            grid: 6,
            horizon: 60,
            count: 6,
            delay: (0, 10),
            service: (0, 4),
            capacity: 4,
            fleet: FleetMode::Fixed(3),
            policy: CostPolicy::TravelCost,
        }
    }
}

fn points(rng: &mut ChaCha8Rng, p: &GeneratorParams) -> Vec<(i64, i64)> {
    let side = p.grid.max(1);
    (0..p.locations.max(1)).map(|_| (rng.gen_range(0..side), rng.gen_range(0..side))).collect()
}

fn loc(rng: &mut ChaCha8Rng, n: usize) -> LocationId {
    LocationId(rng.gen_range(0..n) as u32)
}

fn fixed_fleet(rng: &mut ChaCha8Rng, n_vehicles: usize, n_locations: usize) -> Vec<Vehicle> {
    (0..n_vehicles)
        .map(|i| Vehicle { id: VehicleId(i as u32 + 1), start: loc(rng, n_locations), t_st: 0 })
        .collect()
}

/// Random plans on a grid: uniform origin, destination and start time;
/// duration is the direct drive plus a random service time.
pub fn generate_chain(params: &GeneratorParams) -> InstanceFile {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let pts = points(&mut rng, params);
    let travel = TravelMatrix::from_grid(&pts, 1).expect("positive speed");
    let n = pts.len();
    let plans: Vec<Plan> = (0..params.count)
        .map(|i| {
            let (origin, destination) = (loc(&mut rng, n), loc(&mut rng, n));
            let t_or = rng.gen_range(0..=params.horizon.max(0));
            let t_de = t_or + travel.get(origin, destination) + rng.gen_range(params.service.0..=params.service.1);
            let d_max = rng.gen_range(params.delay.0..=params.delay.1);
            Plan { id: PlanId(i as u32 + 1), origin, destination, t_or, t_de, d_max }
        })
        .collect();
    let vehicles = match params.fleet {
        FleetMode::Fixed(k) => fixed_fleet(&mut rng, k, n),
        FleetMode::Dedicated => plans
            .iter()
            .map(|p| Vehicle { id: VehicleId(p.id.0), start: p.origin, t_st: p.t_or })
            .collect(),
    };
    InstanceFile {
        schema_version: SCHEMA_VERSION,
        travel: TravelSpec::Grid { points: pts, speed: 1 },
        policy: Some(params.policy),
        capacity: None,
        plans: Some(plans),
        requests: None,
        auto_fleet: false,
        vehicles,
    }
}

/// Random requests on a grid. Desired departures are uniform over
/// `[lead, lead + horizon]`, where `lead` is the longest drive in the
/// network, so every vehicle released at time 0 can reach every pickup.
pub fn generate_darp(params: &GeneratorParams) -> InstanceFile {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let pts = points(&mut rng, params);
    let travel = TravelMatrix::from_grid(&pts, 1).expect("positive speed");
    let n = pts.len();
    let lead = travel.rows().iter().flatten().copied().max().unwrap_or(0);
    let requests = (0..params.count)
        .map(|i| {
            let origin = loc(&mut rng, n);
            let mut destination = loc(&mut rng, n);
            while n > 1 && destination == origin {
                destination = loc(&mut rng, n);
            }
            Request {
                id: RequestId(i as u32 + 1),
                origin,
                destination,
                t_r: lead + rng.gen_range(0..=params.horizon.max(0)),
                max_delay: rng.gen_range(params.delay.0..=params.delay.1),
            }
        })
        .collect();
    let (auto_fleet, vehicles) = match params.fleet {
        FleetMode::Fixed(k) => (false, fixed_fleet(&mut rng, k, n)),
        FleetMode::Dedicated => (true, Vec::new()),
    };
    InstanceFile {
        schema_version: SCHEMA_VERSION,
        travel: TravelSpec::Grid { points: pts, speed: 1 },
        policy: None,
        capacity: Some(params.capacity),
        plans: None,
        requests: Some(requests),
        auto_fleet,
        vehicles,
    }
}
