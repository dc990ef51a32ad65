use serde::{Deserialize, Serialize};

use crate::model::{Cost, Duration};

use super::{validate_darp, DarpError, DarpInstance, DarpSolution};

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Metrics {
    pub total_cost: Cost,
    pub used_vehicles: usize,
    /// Vehicle time spent with `i` passengers on board, `i = 0..=capacity`.
    /// A vehicle is active from when it leaves for its first stop until its
    /// last stop.
    pub occupancy: Vec<Duration>,
    /// Number of requests picked up `i` ticks late.
    pub delays: Vec<u64>,
}

impl Metrics {
    pub fn vehicle_time(&self) -> Duration {
        self.occupancy.iter().sum()
    }
}

pub fn evaluate_metrics(solution: &DarpSolution, instance: &DarpInstance) -> Result<Metrics, DarpError> {
    let violations = validate_darp(instance, solution);
    if !violations.is_empty() {
        return Err(DarpError::Invalid(violations));
    }
    let travel = instance.travel();
    let mut occupancy = vec![0; instance.capacity() as usize + 1];
    for route in solution.routes.iter().filter(|r| !r.plan.stops.is_empty()) {
        occupancy[0] += route.approach(travel);
        let stops = &route.plan.stops;
        for (i, w) in stops.windows(2).enumerate() {
            occupancy[route.plan.onboard[i] as usize] += w[1].time - w[0].time;
        }
    }
    let mut delays = Vec::new();
    for &(_, d) in &solution.delays {
        let d = d as usize;
        if delays.len() <= d {
            delays.resize(d + 1, 0);
        }
        delays[d] += 1;
    }
    Ok(Metrics {
        total_cost: solution.objective,
        used_vehicles: solution.used_vehicles(),
        occupancy,
        delays,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::darp::tests::{instance, line, req, vehicle};
    use crate::darp::{insertion_heuristic, DarpViolation, Fleet};

    #[test]
    fn single_direct_ride() {
        let inst = instance(vec![req(1, 0, 2, 0, 5)], vec![vehicle(1, 0, 0)]);
        let m = evaluate_metrics(&insertion_heuristic(&inst).unwrap(), &inst).unwrap();
        assert_eq!(m.total_cost, 4);
        assert_eq!(m.used_vehicles, 1);
        assert_eq!(m.occupancy, vec![0, 4, 0, 0, 0]);
        assert_eq!(m.delays, vec![1]);
    }

    #[test]
    fn shared_ride_overlap() {
        // r2 boards at loc1 on the way: 2 ticks with one passenger, 2 with two
        let inst = instance(vec![req(1, 0, 2, 0, 5), req(2, 1, 2, 2, 5)], vec![vehicle(1, 0, 0)]);
        let sol = insertion_heuristic(&inst).unwrap();
        let m = evaluate_metrics(&sol, &inst).unwrap();
        assert_eq!(m.occupancy, vec![0, 2, 2, 0, 0]);
        assert_eq!(m.vehicle_time(), 4);
        assert_eq!(m.delays.iter().sum::<u64>(), 2);
    }

    #[test]
    fn approach_counts_as_empty_time() {
        let inst = instance(vec![req(1, 0, 2, 10, 5)], vec![vehicle(1, 2, 0)]);
        let m = evaluate_metrics(&insertion_heuristic(&inst).unwrap(), &inst).unwrap();
        assert_eq!(m.occupancy, vec![4, 4, 0, 0, 0]);
        assert_eq!(m.total_cost, 8);
    }

    #[test]
    fn empty() {
        let inst = crate::darp::DarpInstance::new(vec![], line(), 4, Fleet::Auto).unwrap();
        let sol = DarpSolution { method: "proposed".into(), objective: 0, routes: vec![], delays: vec![] };
        let m = evaluate_metrics(&sol, &inst).unwrap();
        assert_eq!(m, Metrics { total_cost: 0, used_vehicles: 0, occupancy: vec![0; 5], delays: vec![] });
    }

    #[test]
    fn rejects_invalid() {
        let inst = instance(vec![req(1, 0, 2, 0, 5)], vec![vehicle(1, 0, 0)]);
        let mut sol = insertion_heuristic(&inst).unwrap();
        sol.objective = 1;
        assert!(matches!(
            evaluate_metrics(&sol, &inst),
            Err(DarpError::Invalid(v)) if v == vec![DarpViolation::Objective { stated: 1, actual: 4 }]
        ));
    }
}
