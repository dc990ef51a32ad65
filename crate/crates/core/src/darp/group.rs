use crate::model::{Duration, LocationId, Time, TravelMatrix};

use super::{DarpError, Request, RoutePlan, Stop, StopKind};

/// Schedules a fixed stop sequence as early as possible. Returns `None` if a
/// window or the capacity is violated. `start` is the vehicle's position and
/// release time, if the plan is attached to one.
pub(crate) fn simulate(
    seq: &[(&Request, StopKind)],
    travel: &TravelMatrix,
    capacity: u32,
    start: Option<(LocationId, Time)>,
) -> Option<RoutePlan> {
    let mut stops = Vec::with_capacity(seq.len());
    let mut here = start;
    let mut load = 0u32;
    for &(req, kind) in seq {
        let loc = req.location(kind);
        let (earliest, latest) = req.window(kind, travel);
        let arrive = here.map_or(earliest, |(at, t)| t + travel.get(at, loc));
        let time = arrive.max(earliest);
        if time > latest {
            return None;
        }
        match kind {
            StopKind::Pickup => {
                load += 1;
                if load > capacity {
                    return None;
                }
            }
            StopKind::Dropoff => load = load.checked_sub(1)?,
        }
        stops.push(Stop { request: req.id, kind, location: loc, time });
        here = Some((loc, time));
    }
    Some(RoutePlan::from_stops(stops, travel))
}

struct GroupSearch<'a> {
    group: &'a [Request],
    travel: &'a TravelMatrix,
    capacity: u32,
    stops: Vec<Stop>,
    best: Option<RoutePlan>,
}

impl GroupSearch<'_> {
    fn better(&self, driving: Duration, span: Duration) -> bool {
        self.best.as_ref().is_none_or(|b| (driving, span) < (b.driving, b.span()))
    }

    fn dfs(&mut self, picked: u64, dropped: u64, load: u32, driving: Duration) {
        if self.best.as_ref().is_some_and(|b| driving > b.driving) {
            return;
        }
        let n = self.group.len();
        if dropped.count_ones() as usize == n {
            let span = self.stops.last().unwrap().time - self.stops[0].time;
            if self.better(driving, span) {
                self.best = Some(RoutePlan::from_stops(self.stops.clone(), self.travel));
            }
            return;
        }
        let here = self.stops.last().map(|s| (s.location, s.time));
        for i in 0..n {
            let bit = 1u64 << i;
            let kind = if picked & bit == 0 {
                if load == self.capacity {
                    continue;
                }
                StopKind::Pickup
            } else if dropped & bit == 0 {
                StopKind::Dropoff
            } else {
                continue;
            };
            let req = &self.group[i];
            let loc = req.location(kind);
            let (earliest, latest) = req.window(kind, self.travel);
            let leg = here.map_or(0, |(at, _)| self.travel.get(at, loc));
            let time = here.map_or(earliest, |(_, t)| t + leg).max(earliest);
            if time > latest {
                continue;
            }
            self.stops.push(Stop { request: req.id, kind, location: loc, time });
            match kind {
                StopKind::Pickup => self.dfs(picked | bit, dropped, load + 1, driving + leg),
                StopKind::Dropoff => self.dfs(picked, dropped | bit, load - 1, driving + leg),
            }
            self.stops.pop();
        }
    }
}

/// Cheapest route serving every request in `group`, trying every order of
/// pickups and dropoffs. Ties on driving time go to the shorter span, then
/// to the first order found (requests in the given order, pickups first).
pub fn optimal_plan_for_group(
    group: &[Request],
    travel: &TravelMatrix,
    capacity: u32,
) -> Result<Option<RoutePlan>, DarpError> {
    if group.len() > capacity as usize || group.len() > 64 {
        return Err(DarpError::GroupTooLarge { size: group.len(), capacity });
    }
    if group.is_empty() {
        return Ok(Some(RoutePlan::from_stops(Vec::new(), travel)));
    }
    let mut search = GroupSearch { group, travel, capacity, stops: Vec::new(), best: None };
    search.dfs(0, 0, 0, 0);
    Ok(search.best)
}
