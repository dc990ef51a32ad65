use std::collections::HashSet;
use std::time::{Duration as WallDuration, Instant};

use crate::model::{Cost, TravelMatrix};

use super::group::optimal_plan_for_group;
use super::{DarpError, Request, RequestId, RoutePlan};

pub const DEFAULT_MAX_BATCH: usize = 12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BatchOptions {
    pub capacity: u32,
    pub max_requests: usize,
    /// Wall-clock budget for the partitioning search.
    pub time_limit: Option<WallDuration>,
}

impl BatchOptions {
    pub fn new(capacity: u32) -> Self {
        Self { capacity, max_requests: DEFAULT_MAX_BATCH, time_limit: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BatchResult {
    /// Sorted by the request ids they serve.
    pub plans: Vec<RoutePlan>,
    /// False if the time limit cut the search short.
    pub optimal: bool,
}

struct Group {
    mask: u64,
    ids: Vec<RequestId>,
    cost: Cost,
    plan: RoutePlan,
}

/// Every feasible group of at most `capacity` requests. A group is only
/// tried if all its subsets one smaller are feasible.
fn feasible_groups(batch: &[Request], travel: &TravelMatrix, capacity: u32) -> Result<Vec<Group>, DarpError> {
    let n = batch.len();
    let mut groups = Vec::new();
    let mut level: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if let Some(plan) = optimal_plan_for_group(&batch[i..=i], travel, capacity)? {
            level.push(vec![i]);
            groups.push(plan_group(batch, &[i], plan));
        }
    }
    let mut known: HashSet<u64> = groups.iter().map(|g| g.mask).collect();
    for _ in 2..=capacity.min(n as u32) {
        let mut next = Vec::new();
        for members in &level {
            for j in members.last().unwrap() + 1..n {
                let mask = members.iter().fold(1u64 << j, |m, &i| m | 1 << i);
                let closed = members.iter().all(|&i| known.contains(&(mask & !(1 << i))));
                if !closed {
                    continue;
                }
                let mut cand = members.clone();
                cand.push(j);
                let reqs: Vec<Request> = cand.iter().map(|&i| batch[i]).collect();
                if let Some(plan) = optimal_plan_for_group(&reqs, travel, capacity)? {
                    groups.push(plan_group(batch, &cand, plan));
                    next.push(cand);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        known.extend(groups.iter().map(|g| g.mask));
        level = next;
    }
    Ok(groups)
}

fn plan_group(batch: &[Request], members: &[usize], plan: RoutePlan) -> Group {
    Group {
        mask: members.iter().fold(0, |m, &i| m | 1 << i),
        ids: members.iter().map(|&i| batch[i].id).collect(),
        cost: plan.driving,
        plan,
    }
}

/// Partition key: total cost, then fewer groups, then the group id lists.
type Key = (Cost, usize, Vec<Vec<RequestId>>);

struct Partition<'a> {
    groups: &'a [Group],
    /// Groups containing each request, cheapest share first.
    by_request: Vec<Vec<usize>>,
    /// Cheapest cost share of each request, scaled by `scale`.
    share: Vec<Cost>,
    scale: Cost,
    full: u64,
    chosen: Vec<usize>,
    best: (Key, Vec<usize>),
    deadline: Option<Instant>,
    timed_out: bool,
}

impl Partition<'_> {
    fn key(&self, chosen: &[usize]) -> Key {
        let mut ids: Vec<Vec<RequestId>> = chosen.iter().map(|&g| self.groups[g].ids.clone()).collect();
        ids.sort();
        let cost = chosen.iter().map(|&g| self.groups[g].cost).sum();
        (cost, chosen.len(), ids)
    }

    fn search(&mut self, covered: u64, cost: Cost) {
        if self.timed_out || self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.timed_out = true;
            return;
        }
        if covered == self.full {
            let key = self.key(&self.chosen);
            if key < self.best.0 {
                self.best = (key, self.chosen.clone());
            }
            return;
        }
        let bound: Cost = (0..self.by_request.len())
            .filter(|&r| covered & (1 << r) == 0)
            .map(|r| self.share[r])
            .sum();
        if cost * self.scale + bound > self.best.0 .0 * self.scale {
            return;
        }
        let r = (!covered).trailing_zeros() as usize;
        for k in 0..self.by_request[r].len() {
            let g = self.by_request[r][k];
            let group = &self.groups[g];
            if group.mask & covered != 0 {
                continue;
            }
            let c = group.cost;
            self.chosen.push(g);
            self.search(covered | group.mask, cost + c);
            self.chosen.pop();
        }
    }
}

fn lcm_upto(n: u32) -> Cost {
    fn gcd(a: Cost, b: Cost) -> Cost {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    (1..=n.max(1) as Cost).fold(1, |l, k| l / gcd(l, k) * k)
}

/// Optimal route plans for one batch, ignoring where vehicles are.
///
/// Minimizes total driving time over all partitions of the batch into
/// feasible groups; ties go to fewer groups, then to the lexicographically
/// smallest list of group id lists.
pub fn solve_batch_exact(
    batch: &[Request],
    travel: &TravelMatrix,
    opts: &BatchOptions,
) -> Result<BatchResult, DarpError> {
    if batch.len() > opts.max_requests.min(64) {
        return Err(DarpError::BatchTooLarge { size: batch.len(), limit: opts.max_requests.min(64) });
    }
    let started = Instant::now();
    let mut batch = batch.to_vec();
    batch.sort_by_key(|r| r.id);
    let n = batch.len();
    let groups = feasible_groups(&batch, travel, opts.capacity)?;
    let largest = groups.iter().map(|g| g.ids.len() as u32).max().unwrap_or(1);
    let scale = lcm_upto(largest);
    let share_of = |g: &Group| g.cost * scale / g.ids.len() as Cost;

    let mut by_request = vec![Vec::new(); n];
    for (gi, g) in groups.iter().enumerate() {
        for r in 0..n {
            if g.mask & (1 << r) != 0 {
                by_request[r].push(gi);
            }
        }
    }
    for list in &mut by_request {
        list.sort_by_key(|&g| (share_of(&groups[g]), g));
    }
    let share = by_request.iter().map(|l| l.first().map_or(0, |&g| share_of(&groups[g]))).collect();

    // singletons are always feasible and come first in `groups`
    let singles: Vec<usize> = (0..n).collect();
    debug_assert!(groups.iter().take(n).all(|g| g.ids.len() == 1));
    let mut part = Partition {
        groups: &groups,
        by_request,
        share,
        scale,
        full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
        chosen: Vec::new(),
        best: (Default::default(), singles.clone()),
        deadline: opts.time_limit.map(|l| started + l),
        timed_out: false,
    };
    part.best.0 = part.key(&singles);
    part.search(0, 0);

    let mut chosen = part.best.1.clone();
    chosen.sort_by(|&a, &b| groups[a].ids.cmp(&groups[b].ids));
    Ok(BatchResult {
        plans: chosen.into_iter().map(|g| groups[g].plan.clone()).collect(),
        optimal: !part.timed_out,
    })
}
