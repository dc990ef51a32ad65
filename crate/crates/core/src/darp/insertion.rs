use crate::model::Cost;

use super::group::simulate;
use super::{assemble, DarpError, DarpInstance, DarpSolution, Fleet, Request, RoutePlan, StopKind, VehicleRoute};

/// Greedy baseline: requests in order of desired departure, each inserted
/// where it raises total driving least. Empty vehicles compete like any
/// other; ties go to the lowest vehicle id, then the earliest pickup and
/// dropoff positions.
pub fn insertion_heuristic(instance: &DarpInstance) -> Result<DarpSolution, DarpError> {
    let Fleet::Vehicles { vehicles } = instance.fleet() else {
        return Err(DarpError::AutoFleet);
    };
    let travel = instance.travel();
    let q = instance.capacity();
    let mut orders: Vec<Vec<(&Request, StopKind)>> = vec![Vec::new(); vehicles.len()];
    let mut plans: Vec<Option<RoutePlan>> = vec![None; vehicles.len()];
    let route_cost = |v: usize, plan: &Option<RoutePlan>| -> Cost {
        plan.as_ref().map_or(0, |p| {
            VehicleRoute { vehicle: vehicles[v], plan: p.clone() }.cost(travel)
        })
    };

    let mut requests: Vec<&Request> = instance.requests().iter().collect();
    requests.sort_by_key(|r| (r.t_r, r.id));
    for req in requests {
        let mut best: Option<(Cost, usize, Vec<(&Request, StopKind)>, RoutePlan)> = None;
        for (v, vehicle) in vehicles.iter().enumerate() {
            let current = route_cost(v, &plans[v]);
            let order = &orders[v];
            for i in 0..=order.len() {
                for j in i..=order.len() {
                    let mut cand = order.clone();
                    cand.insert(j, (req, StopKind::Dropoff));
                    cand.insert(i, (req, StopKind::Pickup));
                    let Some(plan) = simulate(&cand, travel, q, Some((vehicle.start, vehicle.t_st))) else {
                        continue;
                    };
                    let delta = route_cost(v, &Some(plan.clone())) - current;
                    if best.as_ref().is_none_or(|b| delta < b.0) {
                        best = Some((delta, v, cand, plan));
                    }
                }
            }
        }
        let Some((_, v, order, plan)) = best else {
            return Err(DarpError::FleetExhausted(req.id));
        };
        orders[v] = order;
        plans[v] = Some(plan);
    }

    let routes = vehicles
        .iter()
        .zip(plans)
        .filter_map(|(v, p)| p.map(|plan| VehicleRoute { vehicle: *v, plan }))
        .collect();
    assemble("ih".into(), routes, instance)
}
