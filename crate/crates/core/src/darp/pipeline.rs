use std::collections::BTreeMap;
use std::time::Duration as WallDuration;

use rayon::prelude::*;

use crate::chainsolve::{solve_chaining, Chain, ChainSolution};
use crate::model::{ChainingInstance, CostPolicy, Duration, Plan, PlanId, Vehicle, VehicleId};

use super::batch::{solve_batch_exact, BatchOptions, DEFAULT_MAX_BATCH};
use super::{assemble, DarpError, DarpInstance, DarpSolution, Fleet, Request, RoutePlan, VehicleRoute};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProposedConfig {
    pub batch_len: Duration,
    pub max_batch: usize,
    /// Per-batch wall-clock budget.
    pub time_limit: Option<WallDuration>,
    /// Forbid chaining connections that wait longer than this.
    pub wait_cap: Option<Duration>,
}

impl ProposedConfig {
    pub fn new(batch_len: Duration) -> Self {
        Self { batch_len, max_batch: DEFAULT_MAX_BATCH, time_limit: None, wait_cap: None }
    }

    /// One batch covering every request.
    pub fn single_batch(instance: &DarpInstance) -> Self {
        Self::new(instance.horizon() + 1)
    }
}

#[derive(Clone, Debug)]
pub struct ProposedOutcome {
    pub solution: DarpSolution,
    pub plans: Vec<RoutePlan>,
    pub chaining: ChainingInstance,
    pub chains: ChainSolution,
}

/// Requests grouped by `floor((t_r - min t_r) / batch_len)`.
pub fn batches(requests: &[Request], batch_len: Duration) -> Result<Vec<Vec<Request>>, DarpError> {
    if batch_len <= 0 {
        return Err(DarpError::BatchLength);
    }
    let base = requests.iter().map(|r| r.t_r).min().unwrap_or(0);
    let mut out: BTreeMap<i64, Vec<Request>> = BTreeMap::new();
    for r in requests {
        out.entry((r.t_r - base) / batch_len).or_default().push(*r);
    }
    Ok(out.into_values().collect())
}

/// One chaining plan per route plan, ids `1..`. The delay budget is the
/// largest uniform shift that keeps every stop inside its window.
pub fn plans_to_chaining(plans: &[RoutePlan], instance: &DarpInstance) -> Result<Vec<Plan>, DarpError> {
    plans
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.stops.is_empty())
        .map(|(i, p)| {
            let mut d_max = Duration::MAX;
            for s in &p.stops {
                let (_, latest) = instance.request(s.request)?.window(s.kind, instance.travel());
                d_max = d_max.min(latest - s.time);
            }
            let (first, last) = (p.stops[0], p.stops[p.stops.len() - 1]);
            Ok(Plan {
                id: PlanId(i as u32 + 1),
                origin: first.location,
                destination: last.location,
                t_or: first.time,
                t_de: last.time,
                d_max,
            })
        })
        .collect()
}

/// Full-horizon routes: each chained plan shifted by its delay, in order.
pub fn materialize(
    chains: &[Chain],
    plans: &[RoutePlan],
    chaining: &ChainingInstance,
    method: String,
    instance: &DarpInstance,
) -> Result<DarpSolution, DarpError> {
    let mut routes = Vec::with_capacity(chains.len());
    for chain in chains {
        let vehicle = *chaining.vehicle(chain.vehicle)?;
        let stops = chain
            .plans
            .iter()
            .flat_map(|v| plans[v.plan.0 as usize - 1].shifted(v.delay).stops)
            .collect();
        routes.push(VehicleRoute { vehicle, plan: RoutePlan::from_stops(stops, instance.travel()) });
    }
    assemble(method, routes, instance)
}

pub fn run_proposed(instance: &DarpInstance, config: &ProposedConfig) -> Result<DarpSolution, DarpError> {
    run_proposed_detailed(instance, config).map(|o| o.solution)
}

pub fn run_proposed_detailed(
    instance: &DarpInstance,
    config: &ProposedConfig,
) -> Result<ProposedOutcome, DarpError> {
    let opts = BatchOptions {
        capacity: instance.capacity(),
        max_requests: config.max_batch,
        time_limit: config.time_limit,
    };
    let solved = batches(instance.requests(), config.batch_len)?
        .par_iter()
        .map(|b| solve_batch_exact(b, instance.travel(), &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let optimal = solved.iter().all(|b| b.optimal);
    let plans: Vec<RoutePlan> = solved.into_iter().flat_map(|b| b.plans).collect();
    let chain_plans = plans_to_chaining(&plans, instance)?;

    let vehicles: Vec<Vehicle> = match instance.fleet() {
        Fleet::Vehicles { vehicles } => vehicles.clone(),
        Fleet::Auto => chain_plans
            .iter()
            .map(|p| Vehicle { id: VehicleId(p.id.0), start: p.origin, t_st: p.t_or })
            .collect(),
    };
    let policy = match config.wait_cap {
        Some(max_wait) => CostPolicy::TravelCostWaitCapped { max_wait },
        None => CostPolicy::TravelCost,
    };
    let n_vehicles = vehicles.len();
    let chaining = ChainingInstance::new(chain_plans, vehicles, instance.travel().clone(), policy)?;
    let chains = solve_chaining(&chaining).map_err(|source| DarpError::Chaining {
        plans: plans.len(),
        vehicles: n_vehicles,
        source,
    })?;
    let method = if optimal { "proposed" } else { "proposed-lim" };
    let solution = materialize(&chains.chains, &plans, &chaining, method.into(), instance)?;
    Ok(ProposedOutcome { solution, plans, chaining, chains })
}
