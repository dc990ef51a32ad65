use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Cost, Duration, VehicleId};

use super::{DarpInstance, DarpSolution, Fleet, RequestId, StopKind};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DarpViolation {
    UnknownVehicle(VehicleId),
    /// Start location or release time differs from the fleet.
    VehicleMismatch(VehicleId),
    VehicleReused(VehicleId),
    EmptyRoute(VehicleId),
    UnknownRequest(RequestId),
    NotServed(RequestId),
    ServedTwice(RequestId),
    /// Missing its pickup or dropoff within one route, or wrong order.
    Precedence(RequestId),
    WrongLocation(RequestId, StopKind),
    OutsideWindow(RequestId, StopKind),
    TravelGap { vehicle: VehicleId, stop: usize },
    Capacity { vehicle: VehicleId, stop: usize },
    OnboardMismatch(VehicleId),
    DrivingMismatch(VehicleId),
    DelayMismatch(RequestId),
    Objective { stated: Cost, actual: Cost },
}

/// Checks a solution against the raw instance, recomputing every derived
/// quantity.
pub fn validate_darp(instance: &DarpInstance, solution: &DarpSolution) -> Vec<DarpViolation> {
    use DarpViolation::*;
    let travel = instance.travel();
    let mut out = Vec::new();
    let mut seen_vehicles = BTreeSet::new();
    let mut served: BTreeMap<RequestId, usize> = BTreeMap::new();
    let mut pickups: BTreeMap<RequestId, i64> = BTreeMap::new();
    let mut actual: Cost = 0;

    for route in &solution.routes {
        let v = route.vehicle;
        if !seen_vehicles.insert(v.id) {
            out.push(VehicleReused(v.id));
        }
        let stops = &route.plan.stops;
        match instance.fleet() {
            Fleet::Vehicles { vehicles } => match vehicles.iter().find(|f| f.id == v.id) {
                None => out.push(UnknownVehicle(v.id)),
                Some(f) if *f != v => out.push(VehicleMismatch(v.id)),
                _ => {}
            },
            // an on-demand vehicle appears where and when its work starts
            Fleet::Auto => {
                if stops.first().is_some_and(|s| s.location != v.start || s.time < v.t_st) {
                    out.push(VehicleMismatch(v.id));
                }
            }
        }
        if !travel.contains(v.start) {
            out.push(VehicleMismatch(v.id));
            continue;
        }
        if stops.is_empty() {
            out.push(EmptyRoute(v.id));
            continue;
        }

        let mut here = (v.start, v.t_st);
        let mut load: i64 = 0;
        let mut onboard = Vec::with_capacity(stops.len());
        let mut open: BTreeMap<RequestId, usize> = BTreeMap::new();
        let mut driving = 0;
        for (i, s) in stops.iter().enumerate() {
            let leg = if travel.contains(s.location) { travel.get(here.0, s.location) } else { 0 };
            if i > 0 {
                driving += leg;
            }
            if s.time < here.1 + leg {
                out.push(TravelGap { vehicle: v.id, stop: i });
            }
            here = (s.location, s.time);
            let Ok(req) = instance.request(s.request) else {
                out.push(UnknownRequest(s.request));
                continue;
            };
            if req.location(s.kind) != s.location {
                out.push(WrongLocation(req.id, s.kind));
            }
            let (lo, hi) = req.window(s.kind, travel);
            if s.time < lo || s.time > hi {
                out.push(OutsideWindow(req.id, s.kind));
            }
            match s.kind {
                StopKind::Pickup => {
                    *served.entry(req.id).or_default() += 1;
                    pickups.insert(req.id, s.time - req.t_r);
                    if open.insert(req.id, i).is_some() {
                        out.push(Precedence(req.id));
                    }
                    load += 1;
                }
                StopKind::Dropoff => {
                    if open.remove(&req.id).is_none() {
                        out.push(Precedence(req.id));
                    }
                    load -= 1;
                }
            }
            if load > instance.capacity() as i64 {
                out.push(Capacity { vehicle: v.id, stop: i });
            }
            onboard.push(load.max(0) as u32);
        }
        for r in open.keys() {
            out.push(Precedence(*r));
        }
        if onboard != route.plan.onboard {
            out.push(OnboardMismatch(v.id));
        }
        if driving != route.plan.driving {
            out.push(DrivingMismatch(v.id));
        }
        actual += driving + travel.get(v.start, stops[0].location);
    }

    for r in instance.requests() {
        match served.get(&r.id) {
            None => out.push(NotServed(r.id)),
            Some(&n) if n > 1 => out.push(ServedTwice(r.id)),
            _ => {}
        }
    }
    let stated: BTreeMap<RequestId, Duration> = solution.delays.iter().copied().collect();
    if stated.len() != solution.delays.len() || stated != pickups {
        for r in instance.requests() {
            if stated.get(&r.id) != pickups.get(&r.id) {
                out.push(DelayMismatch(r.id));
            }
        }
    }
    if actual != solution.objective {
        out.push(Objective { stated: solution.objective, actual });
    }
    out
}
