//! Exact plan chaining: branch-and-bound over the min-cost flow relaxation
//! of the chaining network, chain extraction, and an independent validator.
//!
//! The relaxation drops the variant-consistency side constraints (a plan
//! must leave as the same variant it arrived as). When a relaxed optimum
//! breaks one, the search branches on the offending plan with one child per
//! variant; a child closes every other variant of that plan on both sides.

use std::cmp::{Ordering, Reverse};
use std::collections::{BinaryHeap, HashMap};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::flownet::{build_network, FlowAssignment, FlowError, FlowNetwork, Residual, VariantRouting};
use crate::model::{ChainingInstance, Cost, Duration, ModelError, Origin, PlanId, VariantRef, VehicleId};
use crate::variantgen::{generate, Connection, GenerationResult};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ChainError {
    #[error(transparent)]
    Infeasible(#[from] FlowError),
    #[error("flow does not decode into chains: {0}")]
    Malformed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    /// `f(left plan -> left φ) + Σ_{φ' ≠ φ} f(right φ' -> right plan) <= 1`
    LeftMajor,
    /// `f(right φ -> right plan) + Σ_{φ' ≠ φ} f(left plan -> left φ') <= 1`
    RightMajor,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConsistencyConstraint {
    pub plan: PlanId,
    pub variant: VariantRef,
    pub term: usize,
    pub complement: Vec<usize>,
    pub orientation: Orientation,
}

impl ConsistencyConstraint {
    pub fn lhs(&self, flow: &[i64]) -> i64 {
        flow[self.term] + self.complement.iter().map(|&e| flow[e]).sum::<i64>()
    }

    pub fn satisfied(&self, flow: &[i64]) -> bool {
        self.lhs(flow) <= 1
    }
}

/// Both orientations for every variant node pair in the network.
pub fn consistency_constraints(net: &FlowNetwork) -> Vec<ConsistencyConstraint> {
    let mut out = Vec::new();
    for p in &net.plans {
        for v in &p.variants {
            let others = p.variants.iter().filter(|o| o.delay != v.delay);
            let variant = VariantRef::new(p.plan, v.delay);
            out.push(ConsistencyConstraint {
                plan: p.plan,
                variant,
                term: v.left_edge,
                complement: others.clone().map(|o| o.right_edge).collect(),
                orientation: Orientation::LeftMajor,
            });
            out.push(ConsistencyConstraint {
                plan: p.plan,
                variant,
                term: v.right_edge,
                complement: others.map(|o| o.left_edge).collect(),
                orientation: Orientation::RightMajor,
            });
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainLink {
    pub cost: Cost,
    pub wait: Duration,
}

/// A vehicle followed by the plan variants it serves, in order. `links[i]`
/// describes the connection into `plans[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub vehicle: VehicleId,
    pub plans: Vec<VariantRef>,
    pub links: Vec<ChainLink>,
}

impl Chain {
    pub fn cost(&self) -> Cost {
        self.links.iter().map(|l| l.cost).sum()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Search nodes that were branched on.
    pub branch_nodes: u64,
    pub relaxations: u64,
    pub warm_starts: u64,
    #[serde(skip)]
    pub wall_time: std::time::Duration,
}

/// Parent and child relaxation bounds, recorded on request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BranchEvent {
    pub plan: PlanId,
    pub parent_bound: Cost,
    pub child_bound: Option<Cost>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainSolution {
    pub chains: Vec<Chain>,
    pub objective: Cost,
    pub stats: SolveStats,
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    pub routing: VariantRouting,
    pub warm_start: bool,
    pub record_trace: bool,
}

impl SolveOptions {
    pub fn new() -> Self {
        Self { routing: VariantRouting::Strengthened, warm_start: true, record_trace: false }
    }
}

pub fn solve_chaining(instance: &ChainingInstance) -> Result<ChainSolution, ChainError> {
    solve_chaining_with(instance, &SolveOptions::new()).map(|(s, _)| s)
}

pub fn solve_chaining_with(
    instance: &ChainingInstance,
    opts: &SolveOptions,
) -> Result<(ChainSolution, Vec<BranchEvent>), ChainError> {
    solve_generation(instance, &generate(instance), opts)
}

/// Solves over an explicit set of variants and connections.
pub fn solve_generation(
    instance: &ChainingInstance,
    gen: &GenerationResult,
    opts: &SolveOptions,
) -> Result<(ChainSolution, Vec<BranchEvent>), ChainError> {
    let started = Instant::now();
    let net = build_network(instance, gen, opts.routing);
    let mut search = Search::new(&net, opts);
    let best = search.run()?;
    let chains = extract_chains(instance, &net, &best)?;
    let mut stats = search.stats;
    stats.wall_time = started.elapsed();
    Ok((ChainSolution { chains, objective: best.cost, stats }, search.trace))
}

struct OpenNode {
    bound: Cost,
    depth: usize,
    seq: u64,
    forced: Vec<(usize, Duration)>,
    assignment: Arc<FlowAssignment>,
}

impl PartialEq for OpenNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for OpenNode {}

impl PartialOrd for OpenNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OpenNode {
    /// Max-heap order: lowest bound first, then deepest, then oldest.
    fn cmp(&self, other: &Self) -> Ordering {
        Reverse(self.bound)
            .cmp(&Reverse(other.bound))
            .then(self.depth.cmp(&other.depth))
            .then(Reverse(self.seq).cmp(&Reverse(other.seq)))
    }
}

struct Search<'a> {
    net: &'a FlowNetwork,
    residual: Residual<'a>,
    opts: &'a SolveOptions,
    /// Connection edges leaving / entering each node.
    out_conn: Vec<Vec<usize>>,
    in_conn: Vec<Vec<usize>>,
    stats: SolveStats,
    trace: Vec<BranchEvent>,
}

impl<'a> Search<'a> {
    fn new(net: &'a FlowNetwork, opts: &'a SolveOptions) -> Self {
        let mut out_conn = vec![Vec::new(); net.nodes.len()];
        let mut in_conn = vec![Vec::new(); net.nodes.len()];
        for (e, edge) in net.edges.iter().enumerate() {
            if edge.connection.is_some() {
                out_conn[edge.tail].push(e);
                in_conn[edge.head].push(e);
            }
        }
        Self {
            net,
            residual: Residual::new(net),
            opts,
            out_conn,
            in_conn,
            stats: SolveStats::default(),
            trace: Vec::new(),
        }
    }

    fn upper_for(&self, forced: &[(usize, Duration)]) -> Vec<i64> {
        let mut upper: Vec<i64> = self.net.edges.iter().map(|e| e.upper).collect();
        for &(plan, delay) in forced {
            for v in self.net.plans[plan].variants.iter().filter(|v| v.delay != delay) {
                upper[v.left_edge] = 0;
                upper[v.right_edge] = 0;
            }
        }
        upper
    }

    fn relax(
        &mut self,
        forced: &[(usize, Duration)],
        warm: Option<&FlowAssignment>,
    ) -> Result<FlowAssignment, FlowError> {
        self.stats.relaxations += 1;
        let upper = self.upper_for(forced);
        let warm = if self.opts.warm_start { warm } else { None };
        let solved = self.residual.solve_detailed(&upper, warm)?;
        if solved.warm {
            self.stats.warm_starts += 1;
        }
        Ok(solved.assignment)
    }

    fn active_variant(&self, flow: &[i64], plan: usize, left: bool) -> Option<usize> {
        self.net.plans[plan].variants.iter().position(|v| {
            let e = if left { v.left_edge } else { v.right_edge };
            flow[e] > 0
        })
    }

    /// The inconsistent plan with the costliest active connections around
    /// its mismatched variants; ties go to the lowest plan id.
    fn branch_plan(&self, flow: &[i64]) -> Option<usize> {
        let mut best: Option<(Cost, usize)> = None;
        for (i, p) in self.net.plans.iter().enumerate() {
            let (Some(l), Some(r)) = (self.active_variant(flow, i, true), self.active_variant(flow, i, false))
            else {
                continue;
            };
            if l == r {
                continue;
            }
            let active_cost = |edges: &[usize]| -> Cost {
                edges.iter().filter(|&&e| flow[e] > 0).map(|&e| self.net.edges[e].cost).sum()
            };
            let weight = active_cost(&self.out_conn[p.variants[l].left])
                + active_cost(&self.in_conn[p.variants[r].right]);
            if best.is_none_or(|(w, _)| weight > w) {
                best = Some((weight, i));
            }
        }
        best.map(|(_, i)| i)
    }

    fn run(&mut self) -> Result<FlowAssignment, ChainError> {
        let root = self.relax(&[], None)?;
        if self.branch_plan(&root.flow).is_none() {
            return Ok(root);
        }
        let mut incumbent: Option<Arc<FlowAssignment>> = None;
        let mut seq = 0u64;
        let mut heap = BinaryHeap::new();
        heap.push(OpenNode { bound: root.cost, depth: 0, seq, forced: Vec::new(), assignment: Arc::new(root) });
        while let Some(node) = heap.pop() {
            if incumbent.as_ref().is_some_and(|inc| node.bound >= inc.cost) {
                continue;
            }
            let Some(plan) = self.branch_plan(&node.assignment.flow) else {
                incumbent = Some(node.assignment);
                continue;
            };
            self.stats.branch_nodes += 1;
            let delays: Vec<Duration> = self.net.plans[plan].variants.iter().map(|v| v.delay).collect();
            for delay in delays {
                let mut forced = node.forced.clone();
                forced.push((plan, delay));
                let child = self.relax(&forced, Some(&node.assignment));
                if self.opts.record_trace {
                    self.trace.push(BranchEvent {
                        plan: self.net.plans[plan].plan,
                        parent_bound: node.bound,
                        child_bound: child.as_ref().ok().map(|c| c.cost),
                    });
                }
                let Ok(child) = child else { continue };
                if incumbent.as_ref().is_some_and(|inc| child.cost >= inc.cost) {
                    continue;
                }
                if self.branch_plan(&child.flow).is_none() {
                    incumbent = Some(Arc::new(child));
                    continue;
                }
                seq += 1;
                heap.push(OpenNode {
                    bound: child.cost,
                    depth: node.depth + 1,
                    seq,
                    forced,
                    assignment: Arc::new(child),
                });
            }
        }
        incumbent
            .map(|a| Arc::try_unwrap(a).unwrap_or_else(|a| (*a).clone()))
            .ok_or(ChainError::Infeasible(FlowError::Infeasible { shortfall: 0 }))
    }
}

/// Follows unit flows from every vehicle through the active connection
/// edges.
pub fn extract_chains(
    instance: &ChainingInstance,
    net: &FlowNetwork,
    assignment: &FlowAssignment,
) -> Result<Vec<Chain>, ChainError> {
    let active: Vec<&Connection> = assignment
        .active_edges()
        .filter_map(|e| net.edges[e].connection)
        .map(|k| &net.connections[k])
        .collect();
    let has_variant_nodes = |v: VariantRef| {
        instance
            .plan_position(v.plan)
            .and_then(|i| net.plans.get(i))
            .is_some_and(|p| p.variant(v.delay).is_some())
    };

    let mut arrival: HashMap<PlanId, &Connection> = HashMap::new();
    let mut departure: HashMap<Origin, &Connection> = HashMap::new();
    let mut leaving: HashMap<PlanId, &Connection> = HashMap::new();
    for c in &active {
        if arrival.insert(c.target.plan, c).is_some() {
            return Err(ChainError::Malformed(format!("plan {} entered twice", c.target.plan)));
        }
        departure.insert(c.origin, c);
        if let Origin::Plan(v) = c.origin {
            if leaving.insert(v.plan, c).is_some() {
                return Err(ChainError::Malformed(format!("plan {} left twice", v.plan)));
            }
        }
    }
    for (plan, out) in &leaving {
        let Origin::Plan(left) = out.origin else { unreachable!() };
        let Some(inc) = arrival.get(plan) else {
            return Err(ChainError::Malformed(format!("plan {plan} left but never entered")));
        };
        if left.delay != inc.target.delay && has_variant_nodes(left) && has_variant_nodes(inc.target) {
            return Err(ChainError::Malformed(format!(
                "plan {plan} entered as {} but left as {}",
                inc.target, left
            )));
        }
    }

    let mut chains = Vec::new();
    let mut covered = 0usize;
    for v in instance.vehicles() {
        let mut from = Origin::Vehicle(v.id);
        let Some(mut next) = departure.get(&from).copied() else { continue };
        let mut chain = Chain { vehicle: v.id, plans: Vec::new(), links: Vec::new() };
        loop {
            let target = next.target;
            chain.links.push(ChainLink { cost: next.cost, wait: instance.wait_time(from, target)? });
            chain.plans.push(target);
            covered += 1;
            if covered > instance.plans().len() {
                return Err(ChainError::Malformed("cycle in chain".into()));
            }
            from = Origin::Plan(target);
            match leaving.get(&target.plan) {
                Some(c) => next = c,
                None => break,
            }
        }
        chains.push(chain);
    }
    if covered != instance.plans().len() {
        return Err(ChainError::Malformed(format!(
            "{} of {} plans reachable from vehicles",
            covered,
            instance.plans().len()
        )));
    }
    Ok(chains)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownVehicle { chain: usize, vehicle: VehicleId },
    VehicleReused { vehicle: VehicleId },
    EmptyChain { chain: usize },
    LinkCountMismatch { chain: usize },
    UnknownPlan { chain: usize, plan: PlanId },
    DelayOutOfRange { chain: usize, link: usize, variant: VariantRef },
    PlanMultiplicity { plan: PlanId, count: usize },
    /// Index into `links`: link 0 leaves the vehicle.
    Timing { chain: usize, link: usize },
    Forbidden { chain: usize, link: usize },
    CostMismatch { chain: usize, link: usize, stated: Cost, actual: Cost },
    WaitMismatch { chain: usize, link: usize, stated: Duration, actual: Duration },
    ObjectiveMismatch { stated: Cost, actual: Cost },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    /// Objective recomputed from the instance.
    pub objective: Cost,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks chains against the raw instance data only.
pub fn validate_chains(instance: &ChainingInstance, chains: &[Chain]) -> ValidationReport {
    let mut violations = Vec::new();
    let mut objective = 0;
    let mut vehicle_uses: HashMap<VehicleId, usize> = HashMap::new();
    let mut plan_uses: HashMap<PlanId, usize> = instance.plans().iter().map(|p| (p.id, 0)).collect();

    for (ci, chain) in chains.iter().enumerate() {
        *vehicle_uses.entry(chain.vehicle).or_default() += 1;
        let Ok(vehicle) = instance.vehicle(chain.vehicle) else {
            violations.push(Violation::UnknownVehicle { chain: ci, vehicle: chain.vehicle });
            continue;
        };
        if chain.plans.is_empty() {
            violations.push(Violation::EmptyChain { chain: ci });
        }
        if chain.links.len() != chain.plans.len() {
            violations.push(Violation::LinkCountMismatch { chain: ci });
        }
        // (location, ready time, plan) of the previous element
        let mut prev = (vehicle.start, vehicle.t_st, None::<&crate::model::Plan>);
        let mut prev_variant = Origin::Vehicle(vehicle.id);
        for (li, &variant) in chain.plans.iter().enumerate() {
            let Some(count) = plan_uses.get_mut(&variant.plan) else {
                violations.push(Violation::UnknownPlan { chain: ci, plan: variant.plan });
                break;
            };
            *count += 1;
            let plan = instance.plan(variant.plan).expect("counted above");
            if variant.delay < 0 || variant.delay > plan.d_max {
                violations.push(Violation::DelayOutOfRange { chain: ci, link: li, variant });
                break;
            }
            let tt = instance.travel().get(prev.0, plan.origin);
            let start = plan.t_or + variant.delay;
            let on_time = prev.1 + tt <= start
                && match prev.2 {
                    Some(p) if tt == 0 && prev.1 == start => (p.t_or, p.id) < (plan.t_or, plan.id),
                    _ => true,
                };
            if !on_time {
                violations.push(Violation::Timing { chain: ci, link: li });
            } else {
                match instance.connection_cost(prev_variant, variant) {
                    Ok(Some(cost)) => {
                        objective += cost;
                        if let Some(link) = chain.links.get(li) {
                            if link.cost != cost {
                                violations.push(Violation::CostMismatch {
                                    chain: ci,
                                    link: li,
                                    stated: link.cost,
                                    actual: cost,
                                });
                            }
                            let wait = start - prev.1 - tt;
                            if link.wait != wait {
                                violations.push(Violation::WaitMismatch {
                                    chain: ci,
                                    link: li,
                                    stated: link.wait,
                                    actual: wait,
                                });
                            }
                        }
                    }
                    Ok(None) => violations.push(Violation::Forbidden { chain: ci, link: li }),
                    Err(_) => violations.push(Violation::Timing { chain: ci, link: li }),
                }
            }
            prev = (plan.destination, plan.t_de + variant.delay, Some(plan));
            prev_variant = Origin::Plan(variant);
        }
    }
    let mut reused: Vec<VehicleId> =
        vehicle_uses.into_iter().filter(|&(_, n)| n > 1).map(|(v, _)| v).collect();
    reused.sort();
    violations.extend(reused.into_iter().map(|vehicle| Violation::VehicleReused { vehicle }));
    let mut wrong: Vec<(PlanId, usize)> = plan_uses.into_iter().filter(|&(_, n)| n != 1).collect();
    wrong.sort();
    violations.extend(wrong.into_iter().map(|(plan, count)| Violation::PlanMultiplicity { plan, count }));
    ValidationReport { violations, objective }
}

/// [`validate_chains`] plus a check of the stated objective.
pub fn validate_solution(instance: &ChainingInstance, solution: &ChainSolution) -> ValidationReport {
    let mut report = validate_chains(instance, &solution.chains);
    if report.objective != solution.objective {
        report
            .violations
            .push(Violation::ObjectiveMismatch { stated: solution.objective, actual: report.objective });
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flownet::solve_mcf;
    use crate::model::tests::{e1, e1_with, loc};
    use crate::model::{CostPolicy, Plan, TravelMatrix, Vehicle};

    const P1: PlanId = PlanId(1);
    const P2: PlanId = PlanId(2);
    const V1: VehicleId = VehicleId(1);

    #[test]
    fn e1_travel_cost() {
        let inst = e1();
        let sol = solve_chaining(&inst).unwrap();
        assert_eq!(sol.objective, 2);
        assert_eq!(sol.chains.len(), 1);
        assert_eq!(sol.chains[0].vehicle, V1);
        assert_eq!(sol.chains[0].plans, vec![VariantRef::base(P1), VariantRef::new(P2, 1)]);
        assert_eq!(
            sol.chains[0].links,
            vec![ChainLink { cost: 0, wait: 5 }, ChainLink { cost: 2, wait: 0 }]
        );
        assert_eq!(sol.stats.branch_nodes, 0);
        let report = validate_solution(&inst, &sol);
        assert!(report.is_valid(), "{report:?}");
        assert_eq!(report.objective, 2);
    }

    #[test]
    fn e1_fleet_size_with_dedicated_vehicles() {
        let base = e1_with(CostPolicy::FleetSize);
        let vehicles = vec![
            Vehicle { id: VehicleId(1), start: loc(0), t_st: 0 },
            Vehicle { id: VehicleId(2), start: loc(2), t_st: 0 },
        ];
        let inst = ChainingInstance::new(base.plans().to_vec(), vehicles, base.travel().clone(), CostPolicy::FleetSize)
            .unwrap();
        let sol = solve_chaining(&inst).unwrap();
        assert_eq!(sol.objective, 1);
        assert_eq!(sol.chains.len(), 1);
        assert!(validate_solution(&inst, &sol).is_valid());
    }

    #[test]
    fn e1_without_vehicle() {
        let inst = e1().without_vehicles(&[V1]);
        assert!(matches!(solve_chaining(&inst), Err(ChainError::Infeasible(_))));
    }

    #[test]
    fn empty_instance() {
        let inst =
            ChainingInstance::new(vec![], vec![], TravelMatrix::from_rows(vec![]).unwrap(), CostPolicy::TravelCost)
                .unwrap();
        let sol = solve_chaining(&inst).unwrap();
        assert!(sol.chains.is_empty());
        assert_eq!(sol.objective, 0);
    }

    #[test]
    fn two_vehicle_only_chains() {
        let travel = TravelMatrix::from_grid(&[(0, 0), (9, 0)], 1).unwrap();
        let plans = vec![
            Plan { id: P1, origin: loc(0), destination: loc(0), t_or: 10, t_de: 15, d_max: 0 },
            Plan { id: P2, origin: loc(1), destination: loc(1), t_or: 10, t_de: 15, d_max: 0 },
        ];
        let vehicles = vec![
            Vehicle { id: VehicleId(1), start: loc(0), t_st: 0 },
            Vehicle { id: VehicleId(2), start: loc(1), t_st: 0 },
        ];
        let inst = ChainingInstance::new(plans, vehicles, travel, CostPolicy::TravelCost).unwrap();
        let sol = solve_chaining(&inst).unwrap();
        assert_eq!(sol.chains.len(), 2);
        assert!(sol.chains.iter().all(|c| c.plans.len() == 1));
        assert_eq!(sol.objective, 0);
    }

    #[test]
    fn validator_flags_timing() {
        let inst = e1();
        let chain = Chain {
            vehicle: V1,
            plans: vec![VariantRef::base(P2), VariantRef::base(P1)],
            links: vec![ChainLink { cost: 4, wait: 7 }, ChainLink { cost: 0, wait: 0 }],
        };
        let report = validate_chains(&inst, &[chain]);
        assert_eq!(report.violations, vec![Violation::Timing { chain: 0, link: 1 }]);
    }

    #[test]
    fn validator_flags_multiplicity_and_reuse() {
        let inst = e1();
        let a = Chain { vehicle: V1, plans: vec![VariantRef::base(P1)], links: vec![ChainLink { cost: 0, wait: 5 }] };
        let report = validate_chains(&inst, &[a.clone(), a]);
        assert!(report.violations.contains(&Violation::PlanMultiplicity { plan: P1, count: 2 }));
        assert!(report.violations.contains(&Violation::PlanMultiplicity { plan: P2, count: 0 }));
        assert!(report.violations.contains(&Violation::VehicleReused { vehicle: V1 }));
    }

    #[test]
    fn constraints_cover_zero_delay_variants() {
        let inst = e1();
        let net = build_network(&inst, &generate(&inst), VariantRouting::Strengthened);
        let cons = consistency_constraints(&net);
        // p2 has variants {0, 1}: two orientations each
        assert_eq!(cons.len(), 4);
        assert!(cons.iter().all(|c| c.plan == P2 && c.complement.len() == 1));
        let flow = solve_mcf(&net).unwrap().flow;
        assert!(cons.iter().all(|c| c.satisfied(&flow)));
    }

    /// p2 can be entered late (from p1) or on time (from the vehicle), and
    /// only its on-time version reaches p3. The cheapest relaxed flow mixes
    /// the two.
    fn mismatch_instance() -> ChainingInstance {
        // locations: 0 depot, 1 and 2 adjacent, 3 far away
        let travel = TravelMatrix::from_rows(vec![
            vec![0, 5, 30, 30],
            vec![5, 0, 1, 30],
            vec![30, 1, 0, 30],
            vec![30, 30, 3, 0],
        ])
        .unwrap();
        let plans = vec![
            Plan { id: PlanId(1), origin: loc(1), destination: loc(1), t_or: 8, t_de: 10, d_max: 0 },
            Plan { id: PlanId(2), origin: loc(2), destination: loc(2), t_or: 10, t_de: 12, d_max: 1 },
            Plan { id: PlanId(3), origin: loc(2), destination: loc(2), t_or: 12, t_de: 14, d_max: 0 },
        ];
        let vehicles = vec![
            Vehicle { id: VehicleId(1), start: loc(0), t_st: 0 },
            Vehicle { id: VehicleId(2), start: loc(3), t_st: 0 },
        ];
        ChainingInstance::new(plans, vehicles, travel, CostPolicy::TravelCost).unwrap()
    }

    #[test]
    fn branching_repairs_mismatched_variants() {
        let inst = mismatch_instance();
        let gen = generate(&inst);
        let net = build_network(&inst, &gen, VariantRouting::Strengthened);
        let relaxed = solve_mcf(&net).unwrap();
        let cons = consistency_constraints(&net);
        assert!(cons.iter().any(|c| !c.satisfied(&relaxed.flow)), "relaxation should mismatch");

        let (sol, trace) = solve_chaining_with(&inst, &SolveOptions { record_trace: true, ..SolveOptions::new() }).unwrap();
        assert!(sol.stats.branch_nodes >= 1);
        assert!(sol.objective > relaxed.cost);
        assert!(validate_solution(&inst, &sol).is_valid());
        for ev in &trace {
            if let Some(child) = ev.child_bound {
                assert!(child >= ev.parent_bound);
            }
        }
        let oracle = crate::oracle::brute_force_optimal(&inst).unwrap();
        assert_eq!(Some(sol.objective), oracle.objective);
    }

    #[test]
    fn literal_routing_can_return_invalid_chains() {
        let inst = mismatch_instance();
        let opts = SolveOptions { routing: VariantRouting::Literal, ..SolveOptions::new() };
        let (sol, _) = solve_chaining_with(&inst, &opts).unwrap();
        let report = validate_chains(&inst, &sol.chains);
        assert!(report.violations.iter().any(|v| matches!(v, Violation::Timing { .. })), "{sol:?}");
        assert!(sol.objective < solve_chaining(&inst).unwrap().objective);
    }

    #[test]
    fn cold_and_warm_search_agree() {
        let inst = mismatch_instance();
        let warm = solve_chaining(&inst).unwrap();
        let cold = solve_chaining_with(&inst, &SolveOptions { warm_start: false, ..SolveOptions::new() })
            .unwrap()
            .0;
        assert_eq!(warm.objective, cold.objective);
        assert_eq!(cold.stats.warm_starts, 0);
    }
}
