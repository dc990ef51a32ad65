//! Reference solvers used to certify the chaining solver.
//!
//! [`brute_force_optimal`] and [`fleet_min_matching`] only use the model's
//! feasibility and cost predicates; they share no graph code with the flow
//! solver. [`full_variant_optimal`] feeds every integer-delay variant to the
//! chaining solver, which is the ground truth the variant generator is
//! compared against.

use std::collections::{BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::chainsolve::{solve_generation, Chain, ChainError, ChainLink, SolveOptions};
use crate::flownet::FlowError;
use crate::model::{ChainingInstance, Cost, Duration, ModelError, Origin, VariantRef};
use crate::variantgen::{Connection, GenerationResult};

pub const MAX_BRUTE_FORCE_PLANS: usize = 9;
pub const MAX_FULL_VARIANT_TICKS: Duration = 200;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for exhaustive search: {plans} plans (limit {limit})")]
    TooManyPlans { plans: usize, limit: usize },
    #[error("total delay budget {total} exceeds the enumeration limit {limit}")]
    TooManyVariants { total: Duration, limit: Duration },
    #[error("plan {0} has a positive delay budget; matching needs fixed plans")]
    DelayedPlan(crate::model::PlanId),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    /// `None` when no feasible chain set exists.
    pub objective: Option<Cost>,
    pub witness: Vec<Chain>,
    /// Number of distinct feasible chain sets (counting delay choices).
    pub feasible_sets: u128,
}

type Last = Option<(usize, Duration)>;

struct Exhaustive<'a> {
    instance: &'a ChainingInstance,
    full: u32,
    memo: HashMap<(u32, usize, Last), (Option<Cost>, u128)>,
}

impl Exhaustive<'_> {
    fn origin(&self, vehicle: usize, last: Last) -> Origin {
        match last {
            None => Origin::Vehicle(self.instance.vehicles()[vehicle].id),
            Some((p, d)) => Origin::Plan(VariantRef::new(self.instance.plans()[p].id, d)),
        }
    }

    /// Every `(plan, delay, cost)` the origin can move on to.
    fn moves(&self, mask: u32, vehicle: usize, last: Last) -> Vec<(usize, Duration, Cost)> {
        let from = self.origin(vehicle, last);
        let mut out = Vec::new();
        for (i, plan) in self.instance.plans().iter().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            for delay in 0..=plan.d_max {
                let to = VariantRef::new(plan.id, delay);
                if self.instance.connection_feasible(from, to).expect("valid pair") {
                    if let Some(c) = self.instance.connection_cost(from, to).expect("feasible") {
                        out.push((i, delay, c));
                    }
                }
            }
        }
        out
    }

    /// Minimum cost and number of ways to cover the plans outside `mask`
    /// using vehicles `vehicle..`, given the current chain ends at `last`.
    fn best(&mut self, mask: u32, vehicle: usize, last: Last) -> (Option<Cost>, u128) {
        if vehicle == self.instance.vehicles().len() {
            return if mask == self.full { (Some(0), 1) } else { (None, 0) };
        }
        if let Some(&v) = self.memo.get(&(mask, vehicle, last)) {
            return v;
        }
        // close the current chain (or leave the vehicle unused)
        let (mut best, mut count) = self.best(mask, vehicle + 1, None);
        for (p, d, c) in self.moves(mask, vehicle, last) {
            let (sub, n) = self.best(mask | (1 << p), vehicle, Some((p, d)));
            count += n;
            if let Some(s) = sub {
                best = Some(best.map_or(s + c, |b| b.min(s + c)));
            }
        }
        self.memo.insert((mask, vehicle, last), (best, count));
        (best, count)
    }

    fn witness(&mut self) -> Vec<Chain> {
        let mut chains = Vec::new();
        let (mut mask, mut vehicle, mut last) = (0u32, 0usize, None);
        let mut current: Option<Chain> = None;
        while vehicle < self.instance.vehicles().len() {
            let (target, _) = self.best(mask, vehicle, last);
            let target = target.expect("witness is only built for feasible instances");
            let step = self.moves(mask, vehicle, last).into_iter().find(|&(p, d, c)| {
                self.best(mask | (1 << p), vehicle, Some((p, d))).0 == Some(target - c)
            });
            match step {
                Some((p, d, c)) => {
                    let from = self.origin(vehicle, last);
                    let to = VariantRef::new(self.instance.plans()[p].id, d);
                    let chain = current.get_or_insert_with(|| Chain {
                        vehicle: self.instance.vehicles()[vehicle].id,
                        plans: Vec::new(),
                        links: Vec::new(),
                    });
                    chain.plans.push(to);
                    chain.links.push(ChainLink {
                        cost: c,
                        wait: self.instance.wait_time(from, to).expect("feasible"),
                    });
                    mask |= 1 << p;
                    last = Some((p, d));
                }
                None => {
                    chains.extend(current.take());
                    vehicle += 1;
                    last = None;
                }
            }
        }
        chains.extend(current);
        chains
    }
}

/// Exhaustive search over every assignment of plans, at every integer
/// delay, to chains headed by distinct vehicles.
pub fn brute_force_optimal(instance: &ChainingInstance) -> Result<OracleResult, OracleError> {
    let n = instance.plans().len();
    if n > MAX_BRUTE_FORCE_PLANS {
        return Err(OracleError::TooManyPlans { plans: n, limit: MAX_BRUTE_FORCE_PLANS });
    }
    let mut search = Exhaustive { instance, full: (1u32 << n) - 1, memo: HashMap::new() };
    let (objective, feasible_sets) = search.best(0, 0, None);
    let witness = if objective.is_some() { search.witness() } else { Vec::new() };
    Ok(OracleResult { objective, witness, feasible_sets })
}

/// Minimum number of vehicles for fixed-time plans with one dedicated
/// vehicle available per plan: plans minus a maximum matching of the
/// "can be served right after" relation (Hopcroft-Karp).
pub fn fleet_min_matching(instance: &ChainingInstance) -> Result<usize, OracleError> {
    if let Some(p) = instance.plans().iter().find(|p| p.d_max > 0) {
        return Err(OracleError::DelayedPlan(p.id));
    }
    let plans = instance.plans();
    let mut adj = vec![Vec::new(); plans.len()];
    for (i, a) in plans.iter().enumerate() {
        for (j, b) in plans.iter().enumerate() {
            if i != j && instance.connection_feasible(Origin::plan(a.id), VariantRef::base(b.id))? {
                adj[i].push(j);
            }
        }
    }
    Ok(plans.len() - hopcroft_karp(&adj, plans.len()))
}

fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left = adj.len();
    let mut match_left = vec![FREE; left];
    let mut match_right = vec![FREE; right];
    let mut dist = vec![0usize; left];
    let mut size = 0;
    loop {
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = FREE;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_right[v] {
                    FREE => found = true,
                    w if dist[w] == FREE => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return size;
        }
        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            dist: &mut [usize],
            match_left: &mut [usize],
            match_right: &mut [usize],
        ) -> bool {
            for &v in &adj[u] {
                let w = match_right[v];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, dist, match_left, match_right)) {
                    match_left[u] = v;
                    match_right[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..left {
            if match_left[u] == FREE && augment(u, adj, &mut dist, &mut match_left, &mut match_right) {
                size += 1;
            }
        }
    }
}

/// Every integer-delay variant of every plan and every feasible, allowed
/// connection between them.
pub fn full_variant_generation(instance: &ChainingInstance) -> Result<GenerationResult, OracleError> {
    let total: Duration = instance.plans().iter().map(|p| p.d_max).sum();
    if total > MAX_FULL_VARIANT_TICKS {
        return Err(OracleError::TooManyVariants { total, limit: MAX_FULL_VARIANT_TICKS });
    }
    let all: Vec<VariantRef> = instance
        .plans()
        .iter()
        .flat_map(|p| (0..=p.d_max).map(move |d| VariantRef::new(p.id, d)))
        .collect();
    let variants: BTreeSet<VariantRef> = all.iter().copied().filter(|v| v.delay > 0).collect();
    let origins = instance
        .vehicles()
        .iter()
        .map(|v| Origin::Vehicle(v.id))
        .chain(all.iter().map(|&v| Origin::Plan(v)));
    let mut connections = Vec::new();
    for from in origins {
        for &to in &all {
            if from.variant().is_some_and(|v| v.plan == to.plan) {
                continue;
            }
            if instance.connection_feasible(from, to)? {
                if let Some(cost) = instance.connection_cost(from, to)? {
                    connections.push(Connection { origin: from, target: to, cost });
                }
            }
        }
    }
    connections.sort();
    Ok(GenerationResult { variants, connections })
}

/// Optimal objective over the complete variant set; `None` if infeasible.
pub fn full_variant_optimal(instance: &ChainingInstance) -> Result<Option<Cost>, OracleError> {
    let gen = full_variant_generation(instance)?;
    match solve_generation(instance, &gen, &SolveOptions::new()) {
        Ok((sol, _)) => Ok(Some(sol.objective)),
        Err(ChainError::Infeasible(FlowError::PlanUnreachable { .. } | FlowError::Infeasible { .. })) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chainsolve::{solve_chaining, validate_chains};
    use crate::model::tests::{e1, loc};
    use crate::model::{CostPolicy, Plan, PlanId, TravelMatrix, Vehicle, VehicleId};

    fn line_plans(times: &[(i64, i64)]) -> Vec<Plan> {
        times
            .iter()
            .enumerate()
            .map(|(i, &(t_or, t_de))| Plan {
                id: PlanId(i as u32 + 1),
                origin: loc(0),
                destination: loc(0),
                t_or,
                t_de,
                d_max: 0,
            })
            .collect()
    }

    fn single_location(plans: Vec<Plan>, vehicles: Vec<Vehicle>, policy: CostPolicy) -> ChainingInstance {
        ChainingInstance::new(plans, vehicles, TravelMatrix::from_rows(vec![vec![0]]).unwrap(), policy).unwrap()
    }

    #[test]
    fn e1_brute_force() {
        let res = brute_force_optimal(&e1()).unwrap();
        assert_eq!(res.objective, Some(2));
        // p2 may run at delay 1, 2 or 3 behind p1
        assert_eq!(res.feasible_sets, 3);
        let report = validate_chains(&e1(), &res.witness);
        assert!(report.is_valid());
        assert_eq!(report.objective, 2);
    }

    #[test]
    fn unreachable_plan() {
        let travel = TravelMatrix::from_grid(&[(0, 0), (100, 0)], 1).unwrap();
        let plan = Plan { id: PlanId(1), origin: loc(1), destination: loc(1), t_or: 5, t_de: 6, d_max: 3 };
        let veh = Vehicle { id: VehicleId(1), start: loc(0), t_st: 0 };
        let inst = ChainingInstance::new(vec![plan], vec![veh], travel, CostPolicy::TravelCost).unwrap();
        let res = brute_force_optimal(&inst).unwrap();
        assert_eq!(res.objective, None);
        assert_eq!(res.feasible_sets, 0);
        assert!(res.witness.is_empty());
        assert_eq!(full_variant_optimal(&inst).unwrap(), None);
    }

    #[test]
    fn two_isolated_plans() {
        let travel = TravelMatrix::from_grid(&[(0, 0), (3, 0), (40, 0), (45, 0)], 1).unwrap();
        let plans = vec![
            Plan { id: PlanId(1), origin: loc(1), destination: loc(1), t_or: 10, t_de: 20, d_max: 0 },
            Plan { id: PlanId(2), origin: loc(3), destination: loc(3), t_or: 10, t_de: 20, d_max: 0 },
        ];
        let vehicles = vec![
            Vehicle { id: VehicleId(1), start: loc(0), t_st: 0 },
            Vehicle { id: VehicleId(2), start: loc(2), t_st: 0 },
        ];
        let inst = ChainingInstance::new(plans, vehicles, travel, CostPolicy::TravelCost).unwrap();
        let res = brute_force_optimal(&inst).unwrap();
        assert_eq!(res.objective, Some(3 + 5));
        assert_eq!(res.witness.len(), 2);
    }

    #[test]
    fn guard_rejects_large_instances() {
        let plans = line_plans(&[(0, 1); 10]);
        let inst = single_location(plans, vec![], CostPolicy::FleetSize);
        assert!(matches!(brute_force_optimal(&inst), Err(OracleError::TooManyPlans { plans: 10, .. })));
    }

    #[test]
    fn matching_examples() {
        // p1 -> p2 and p1 -> p3 only; p2 and p3 are far apart
        let mut plans = line_plans(&[(0, 1), (5, 6), (5, 6)]);
        for (p, l) in plans.iter_mut().zip([0, 1, 2]) {
            p.origin = loc(l);
            p.destination = loc(l);
        }
        let travel = TravelMatrix::from_rows(vec![vec![0, 0, 0], vec![0, 0, 9], vec![0, 9, 0]]).unwrap();
        let inst = ChainingInstance::new(plans, vec![], travel, CostPolicy::FleetSize).unwrap();
        assert_eq!(fleet_min_matching(&inst).unwrap(), 2);

        let line = single_location(line_plans(&[(0, 1), (2, 3), (4, 5)]), vec![], CostPolicy::FleetSize);
        assert_eq!(fleet_min_matching(&line).unwrap(), 1);

        let parallel = single_location(line_plans(&[(0, 5), (1, 6), (2, 7)]), vec![], CostPolicy::FleetSize);
        assert_eq!(fleet_min_matching(&parallel).unwrap(), 3);

        assert!(matches!(fleet_min_matching(&e1()), Err(OracleError::DelayedPlan(PlanId(2)))));
    }

    #[test]
    fn full_variants_on_e1() {
        let gen = full_variant_generation(&e1()).unwrap();
        assert_eq!(gen.variants.len(), 3);
        assert_eq!(full_variant_optimal(&e1()).unwrap(), Some(2));
        assert_eq!(solve_chaining(&e1()).unwrap().objective, 2);
    }

    #[test]
    fn full_variant_guard() {
        let mut plans = line_plans(&[(0, 1), (2, 3)]);
        plans[0].d_max = 150;
        plans[1].d_max = 60;
        let inst = single_location(plans, vec![], CostPolicy::TravelCost);
        assert!(matches!(full_variant_optimal(&inst), Err(OracleError::TooManyVariants { total: 210, .. })));
    }

    #[test]
    fn zero_budget_matches_plain_flow() {
        let plans = line_plans(&[(0, 4), (3, 8), (9, 12), (10, 11)]);
        let vehicles = (1..=2).map(|i| Vehicle { id: VehicleId(i), start: loc(0), t_st: 0 }).collect();
        let inst = single_location(plans, vehicles, CostPolicy::FleetSize);
        let full = full_variant_optimal(&inst).unwrap();
        let sol = solve_chaining(&inst).unwrap();
        assert_eq!(full, Some(sol.objective));
        assert_eq!(sol.stats.branch_nodes, 0);
    }

    #[test]
    fn delay_reachable_only_through_a_chain_of_delays() {
        // p3 can only follow p2 if p2 is itself delayed behind p1; the
        // variant generator must find p3@2 through p2@3.
        let plans = vec![
            Plan { id: PlanId(1), origin: loc(0), destination: loc(0), t_or: 0, t_de: 13, d_max: 0 },
            Plan { id: PlanId(2), origin: loc(0), destination: loc(0), t_or: 10, t_de: 20, d_max: 3 },
            Plan { id: PlanId(3), origin: loc(0), destination: loc(0), t_or: 21, t_de: 22, d_max: 2 },
        ];
        let vehicles = vec![Vehicle { id: VehicleId(1), start: loc(0), t_st: 0 }];
        let inst = single_location(plans, vehicles, CostPolicy::TravelCost);
        let full = full_variant_optimal(&inst).unwrap();
        assert_eq!(full, Some(0));
        assert_eq!(solve_chaining(&inst).unwrap().objective, 0);
    }
}
