//! The chaining flow network and an exact min-cost flow solver for it.
//!
//! Layout, left to right: the source feeds every left plan node and every
//! vehicle; a left plan node feeds its left variant nodes; vehicles and left
//! plan/variant nodes feed right plan/variant nodes through connection edges;
//! right variant nodes feed their right plan node, which feeds the sink. All
//! bounds are `[0, 1]` and only connection edges carry a cost.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};
use std::io::{self, Write};

use thiserror::Error;

use crate::model::{ChainingInstance, Cost, Duration, Origin, PlanId, VariantRef, VehicleId};
use crate::variantgen::{Connection, GenerationResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Source,
    Sink,
    LeftPlan(PlanId),
    RightPlan(PlanId),
    LeftVariant(VariantRef),
    RightVariant(VariantRef),
    Vehicle(VehicleId),
    /// Free node for hand-built networks.
    Aux(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowNode {
    pub kind: NodeKind,
    pub supply: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlowEdge {
    pub tail: usize,
    pub head: usize,
    pub lower: i64,
    pub upper: i64,
    pub cost: Cost,
    /// Index into [`FlowNetwork::connections`] for connection edges.
    pub connection: Option<usize>,
}

/// How a plan that has delayed variants is wired.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum VariantRouting {
    /// Such a plan also gets a zero-delay variant node pair, and every one of
    /// its connections, delayed or not, goes through a variant node.
    #[default]
    Strengthened,
    /// Undelayed connections attach to the plan nodes directly; only delayed
    /// variants get nodes. Kept for comparison: arriving as a delayed variant
    /// and leaving through an undelayed connection is not excluded.
    Literal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VariantNodes {
    pub delay: Duration,
    pub left: usize,
    pub right: usize,
    /// Left plan -> left variant.
    pub left_edge: usize,
    /// Right variant -> right plan.
    pub right_edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanNodes {
    pub plan: PlanId,
    pub left: usize,
    pub right: usize,
    pub source_edge: usize,
    pub sink_edge: usize,
    /// Sorted by delay. Empty for plans routed without variant nodes.
    pub variants: Vec<VariantNodes>,
}

impl PlanNodes {
    pub fn variant(&self, delay: Duration) -> Option<&VariantNodes> {
        self.variants.iter().find(|v| v.delay == delay)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VehicleNode {
    pub vehicle: VehicleId,
    pub node: usize,
    pub source_edge: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowNetwork {
    pub nodes: Vec<FlowNode>,
    pub edges: Vec<FlowEdge>,
    pub source: usize,
    pub sink: usize,
    pub plans: Vec<PlanNodes>,
    pub vehicles: Vec<VehicleNode>,
    pub connections: Vec<Connection>,
    pub routing: VariantRouting,
    node_of: HashMap<NodeKind, usize>,
}

impl FlowNetwork {
    /// A network holding only a source with `supply` and a matching sink.
    pub fn with_terminals(supply: i64) -> Self {
        let mut net = Self::blank(VariantRouting::Strengthened);
        net.source = net.add_node(NodeKind::Source, supply);
        net.sink = net.add_node(NodeKind::Sink, -supply);
        net
    }

    fn blank(routing: VariantRouting) -> Self {
        Self {
            nodes: Vec::new(),
            edges: Vec::new(),
            source: 0,
            sink: 0,
            plans: Vec::new(),
            vehicles: Vec::new(),
            connections: Vec::new(),
            routing,
            node_of: HashMap::new(),
        }
    }

    pub fn add_node(&mut self, kind: NodeKind, supply: i64) -> usize {
        let id = self.nodes.len();
        self.nodes.push(FlowNode { kind, supply });
        self.node_of.insert(kind, id);
        id
    }

    pub fn add_edge(&mut self, tail: usize, head: usize, upper: i64, cost: Cost) -> usize {
        self.edges.push(FlowEdge { tail, head, lower: 0, upper, cost, connection: None });
        self.edges.len() - 1
    }

    pub fn node(&self, kind: NodeKind) -> Option<usize> {
        self.node_of.get(&kind).copied()
    }

    /// Total flow the source must push.
    pub fn demand(&self) -> i64 {
        self.nodes[self.source].supply
    }

    pub fn plan_nodes(&self, plan: PlanId) -> Option<&PlanNodes> {
        self.plans.iter().find(|p| p.plan == plan)
    }

    /// One line per edge: `tail head lower upper cost`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> io::Result<()> {
        for e in &self.edges {
            writeln!(out, "{} {} {} {} {}", e.tail, e.head, e.lower, e.upper, e.cost)?;
        }
        Ok(())
    }
}

/// Builds the chaining network for the connections in `gen`.
///
/// Node ids are assigned in the order: source, left plans, left variants,
/// vehicles, right variants, right plans, sink.
pub fn build_network(
    instance: &ChainingInstance,
    gen: &GenerationResult,
    routing: VariantRouting,
) -> FlowNetwork {
    let plan_count = instance.plans().len() as i64;
    let mut net = FlowNetwork::blank(routing);
    net.connections = gen.connections.clone();

    let variant_delays: Vec<Vec<Duration>> = instance
        .plans()
        .iter()
        .map(|p| {
            let delayed = gen.delayed_variants_of(p.id).map(|v| v.delay);
            match routing {
                VariantRouting::Strengthened if gen.delayed_variants_of(p.id).next().is_some() => {
                    std::iter::once(0).chain(delayed).collect()
                }
                VariantRouting::Strengthened => Vec::new(),
                VariantRouting::Literal => delayed.collect(),
            }
        })
        .collect();

    net.source = net.add_node(NodeKind::Source, plan_count);
    let left: Vec<usize> =
        instance.plans().iter().map(|p| net.add_node(NodeKind::LeftPlan(p.id), 0)).collect();
    let left_var: Vec<Vec<usize>> = instance
        .plans()
        .iter()
        .zip(&variant_delays)
        .map(|(p, ds)| {
            ds.iter().map(|&d| net.add_node(NodeKind::LeftVariant(VariantRef::new(p.id, d)), 0)).collect()
        })
        .collect();
    let veh: Vec<usize> =
        instance.vehicles().iter().map(|v| net.add_node(NodeKind::Vehicle(v.id), 0)).collect();
    let right_var: Vec<Vec<usize>> = instance
        .plans()
        .iter()
        .zip(&variant_delays)
        .map(|(p, ds)| {
            ds.iter().map(|&d| net.add_node(NodeKind::RightVariant(VariantRef::new(p.id, d)), 0)).collect()
        })
        .collect();
    let right: Vec<usize> =
        instance.plans().iter().map(|p| net.add_node(NodeKind::RightPlan(p.id), 0)).collect();
    net.sink = net.add_node(NodeKind::Sink, -plan_count);

    let source = net.source;
    let sink = net.sink;
    let source_edges: Vec<usize> = left.iter().map(|&l| net.add_edge(source, l, 1, 0)).collect();
    net.vehicles = instance
        .vehicles()
        .iter()
        .zip(&veh)
        .map(|(v, &node)| VehicleNode { vehicle: v.id, node, source_edge: net.add_edge(source, node, 1, 0) })
        .collect();
    let left_edges: Vec<Vec<usize>> = left
        .iter()
        .zip(&left_var)
        .map(|(&l, vs)| vs.iter().map(|&v| net.add_edge(l, v, 1, 0)).collect())
        .collect();
    let right_edges: Vec<Vec<usize>> = right
        .iter()
        .zip(&right_var)
        .map(|(&r, vs)| vs.iter().map(|&v| net.add_edge(v, r, 1, 0)).collect())
        .collect();
    let sink_edges: Vec<usize> = right.iter().map(|&r| net.add_edge(r, sink, 1, 0)).collect();

    net.plans = instance
        .plans()
        .iter()
        .enumerate()
        .map(|(i, p)| PlanNodes {
            plan: p.id,
            left: left[i],
            right: right[i],
            source_edge: source_edges[i],
            sink_edge: sink_edges[i],
            variants: variant_delays[i]
                .iter()
                .enumerate()
                .map(|(k, &delay)| VariantNodes {
                    delay,
                    left: left_var[i][k],
                    right: right_var[i][k],
                    left_edge: left_edges[i][k],
                    right_edge: right_edges[i][k],
                })
                .collect(),
        })
        .collect();

    let left_end = |plans: &[PlanNodes], v: VariantRef| -> usize {
        let i = instance.plan_position(v.plan).expect("connection plans belong to the instance");
        plans[i].variant(v.delay).map_or(plans[i].left, |n| n.left)
    };
    let right_end = |plans: &[PlanNodes], v: VariantRef| -> usize {
        let i = instance.plan_position(v.plan).expect("connection plans belong to the instance");
        plans[i].variant(v.delay).map_or(plans[i].right, |n| n.right)
    };
    for (k, c) in gen.connections.iter().enumerate() {
        let tail = match c.origin {
            Origin::Vehicle(id) => net.node(NodeKind::Vehicle(id)).expect("vehicle node"),
            Origin::Plan(v) => left_end(&net.plans, v),
        };
        let head = right_end(&net.plans, c.target);
        let e = net.add_edge(tail, head, 1, c.cost);
        net.edges[e].connection = Some(k);
    }
    net
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlowAssignment {
    pub flow: Vec<i64>,
    pub cost: Cost,
}

impl FlowAssignment {
    pub fn active_edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.flow.iter().enumerate().filter(|(_, &f)| f > 0).map(|(e, _)| e)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("no feasible flow: plan {plan} cannot be reached ({shortfall} units short)")]
    PlanUnreachable { plan: PlanId, shortfall: i64 },
    #[error("no feasible flow ({shortfall} units short)")]
    Infeasible { shortfall: i64 },
}

/// Solves the unconstrained min-cost flow problem on `network`.
pub fn solve_mcf(network: &FlowNetwork) -> Result<FlowAssignment, FlowError> {
    let upper: Vec<i64> = network.edges.iter().map(|e| e.upper).collect();
    Residual::new(network).solve(&upper, None)
}

const INF: Cost = Cost::MAX / 4;

/// Residual-graph view of a network: arc `2e` runs along edge `e`, arc
/// `2e + 1` against it.
pub(crate) struct Residual<'a> {
    net: &'a FlowNetwork,
    adj: Vec<Vec<usize>>,
}

pub(crate) struct Solved {
    pub assignment: FlowAssignment,
    pub warm: bool,
}

impl<'a> Residual<'a> {
    pub fn new(net: &'a FlowNetwork) -> Self {
        let mut adj = vec![Vec::new(); net.nodes.len()];
        for (e, edge) in net.edges.iter().enumerate() {
            adj[edge.tail].push(2 * e);
            adj[edge.head].push(2 * e + 1);
        }
        Self { net, adj }
    }

    #[inline]
    fn arc_ends(&self, arc: usize) -> (usize, usize) {
        let e = &self.net.edges[arc / 2];
        if arc.is_multiple_of(2) {
            (e.tail, e.head)
        } else {
            (e.head, e.tail)
        }
    }

    #[inline]
    fn arc_cost(&self, arc: usize) -> Cost {
        let c = self.net.edges[arc / 2].cost;
        if arc.is_multiple_of(2) {
            c
        } else {
            -c
        }
    }

    #[inline]
    fn arc_capacity(&self, arc: usize, upper: &[i64], flow: &[i64]) -> i64 {
        let e = arc / 2;
        if arc.is_multiple_of(2) {
            upper[e] - flow[e]
        } else {
            flow[e] - self.net.edges[e].lower
        }
    }

    pub fn solve(&self, upper: &[i64], warm: Option<&FlowAssignment>) -> Result<FlowAssignment, FlowError> {
        self.solve_detailed(upper, warm).map(|s| s.assignment)
    }

    /// Successive shortest paths with node potentials. A warm start keeps the
    /// given flow minus the units crossing edges whose bound dropped below
    /// their flow, provided the remainder is still cost-optimal; otherwise
    /// the solve starts from zero flow.
    pub fn solve_detailed(
        &self,
        upper: &[i64],
        warm: Option<&FlowAssignment>,
    ) -> Result<Solved, FlowError> {
        let n = self.net.nodes.len();
        let start = warm.and_then(|w| self.reduce_to_bounds(w, upper)).and_then(|flow| {
            let potential = self.johnson_potentials(upper, &flow)?;
            Some((flow, potential))
        });
        let is_warm = start.is_some();
        let (mut flow, mut potential) =
            start.unwrap_or_else(|| (vec![0; self.net.edges.len()], vec![0; n]));

        let demand = self.net.demand();
        let mut pushed = self.net.edges.iter().zip(&flow).filter(|(e, _)| e.tail == self.net.source).map(|(_, &f)| f).sum::<i64>();
        let source = self.net.source;
        let sink = self.net.sink;
        let mut dist = vec![INF; n];
        let mut parent = vec![usize::MAX; n];
        let mut heap = BinaryHeap::new();
        while pushed < demand {
            dist.fill(INF);
            parent.fill(usize::MAX);
            dist[source] = 0;
            heap.clear();
            heap.push(Reverse((0, source)));
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                if u == sink {
                    break;
                }
                for &arc in &self.adj[u] {
                    if self.arc_capacity(arc, upper, &flow) <= 0 {
                        continue;
                    }
                    let (_, v) = self.arc_ends(arc);
                    let nd = d + self.arc_cost(arc) + potential[u] - potential[v];
                    if nd < dist[v] {
                        dist[v] = nd;
                        parent[v] = arc;
                        heap.push(Reverse((nd, v)));
                    }
                }
            }
            if dist[sink] >= INF {
                return Err(self.infeasibility(upper, &flow, demand - pushed));
            }
            let cap = dist[sink];
            for (p, d) in potential.iter_mut().zip(&dist) {
                *p += (*d).min(cap);
            }
            let mut v = sink;
            while v != source {
                let arc = parent[v];
                if arc % 2 == 0 {
                    flow[arc / 2] += 1;
                } else {
                    flow[arc / 2] -= 1;
                }
                v = self.arc_ends(arc).0;
            }
            pushed += 1;
        }
        let cost = self.net.edges.iter().zip(&flow).map(|(e, &f)| e.cost * f).sum();
        Ok(Solved { assignment: FlowAssignment { flow, cost }, warm: is_warm })
    }

    /// Drops whole source-to-sink units through every edge whose flow
    /// exceeds its new bound. Relies on the network being acyclic.
    fn reduce_to_bounds(&self, warm: &FlowAssignment, upper: &[i64]) -> Option<Vec<i64>> {
        if warm.flow.len() != self.net.edges.len() {
            return None;
        }
        let mut flow = warm.flow.clone();
        for e in 0..flow.len() {
            while flow[e] > upper[e] {
                flow[e] -= 1;
                let mut u = self.net.edges[e].tail;
                while u != self.net.source {
                    let arc = self.adj[u]
                        .iter()
                        .copied()
                        .find(|&a| a % 2 == 1 && flow[a / 2] > 0)?;
                    flow[arc / 2] -= 1;
                    u = self.net.edges[arc / 2].tail;
                }
                let mut v = self.net.edges[e].head;
                while v != self.net.sink {
                    let arc = self.adj[v]
                        .iter()
                        .copied()
                        .find(|&a| a % 2 == 0 && flow[a / 2] > 0)?;
                    flow[arc / 2] -= 1;
                    v = self.net.edges[arc / 2].head;
                }
            }
        }
        Some(flow)
    }

    /// Shortest distances from a virtual root joined to every node by
    /// zero-cost arcs (queue-based Bellman-Ford). `None` on a negative cycle.
    fn johnson_potentials(&self, upper: &[i64], flow: &[i64]) -> Option<Vec<Cost>> {
        let n = self.net.nodes.len();
        let mut dist = vec![0; n];
        let mut in_queue = vec![true; n];
        let mut relaxed = vec![0usize; n];
        let mut queue: std::collections::VecDeque<usize> = (0..n).collect();
        while let Some(u) = queue.pop_front() {
            in_queue[u] = false;
            for &arc in &self.adj[u] {
                if self.arc_capacity(arc, upper, flow) <= 0 {
                    continue;
                }
                let (_, v) = self.arc_ends(arc);
                let nd = dist[u] + self.arc_cost(arc);
                if nd < dist[v] {
                    dist[v] = nd;
                    relaxed[v] += 1;
                    if relaxed[v] > n {
                        return None;
                    }
                    if !in_queue[v] {
                        in_queue[v] = true;
                        queue.push_back(v);
                    }
                }
            }
        }
        Some(dist)
    }

    fn infeasibility(&self, upper: &[i64], flow: &[i64], shortfall: i64) -> FlowError {
        let mut seen = vec![false; self.net.nodes.len()];
        let mut stack = vec![self.net.source];
        seen[self.net.source] = true;
        while let Some(u) = stack.pop() {
            for &arc in &self.adj[u] {
                let (_, v) = self.arc_ends(arc);
                if !seen[v] && self.arc_capacity(arc, upper, flow) > 0 {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        self.net
            .plans
            .iter()
            .find(|p| flow[p.sink_edge] < upper[p.sink_edge] && !seen[p.right])
            .map_or(FlowError::Infeasible { shortfall }, |p| FlowError::PlanUnreachable {
                plan: p.plan,
                shortfall,
            })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::tests::{e1, loc};
    use crate::model::{CostPolicy, Plan, TravelMatrix, Vehicle};
    use crate::variantgen::generate;

    /// Bellman-Ford negative-cycle check on the residual graph.
    pub(crate) fn has_negative_cycle(net: &FlowNetwork, upper: &[i64], flow: &[i64]) -> bool {
        let n = net.nodes.len();
        let mut arcs = Vec::new();
        for (e, edge) in net.edges.iter().enumerate() {
            if flow[e] < upper[e] {
                arcs.push((edge.tail, edge.head, edge.cost));
            }
            if flow[e] > edge.lower {
                arcs.push((edge.head, edge.tail, -edge.cost));
            }
        }
        let mut dist = vec![0i64; n];
        for _ in 0..n {
            let mut changed = false;
            for &(u, v, c) in &arcs {
                if dist[u] + c < dist[v] {
                    dist[v] = dist[u] + c;
                    changed = true;
                }
            }
            if !changed {
                return false;
            }
        }
        true
    }

    pub(crate) fn assert_conserves(net: &FlowNetwork, a: &FlowAssignment) {
        let mut balance = vec![0i64; net.nodes.len()];
        for (e, edge) in net.edges.iter().enumerate() {
            assert!(a.flow[e] >= edge.lower && a.flow[e] <= edge.upper, "bounds on edge {e}");
            balance[edge.tail] += a.flow[e];
            balance[edge.head] -= a.flow[e];
        }
        for (i, node) in net.nodes.iter().enumerate() {
            assert_eq!(balance[i], node.supply, "conservation at node {i}");
        }
        let cost: i64 = net.edges.iter().zip(&a.flow).map(|(e, f)| e.cost * f).sum();
        assert_eq!(cost, a.cost);
    }

    #[test]
    fn e1_network_shape() {
        let inst = e1();
        let net = build_network(&inst, &generate(&inst), VariantRouting::Strengthened);
        assert_eq!(net.nodes.len(), 11);
        assert_eq!(net.edges.len(), 12);
        let kinds: Vec<NodeKind> = net.nodes.iter().map(|n| n.kind).collect();
        use NodeKind::*;
        let (p1, p2) = (PlanId(1), PlanId(2));
        assert_eq!(
            kinds,
            vec![
                Source,
                LeftPlan(p1),
                LeftPlan(p2),
                LeftVariant(VariantRef::new(p2, 0)),
                LeftVariant(VariantRef::new(p2, 1)),
                Vehicle(VehicleId(1)),
                RightVariant(VariantRef::new(p2, 0)),
                RightVariant(VariantRef::new(p2, 1)),
                RightPlan(p1),
                RightPlan(p2),
                Sink,
            ]
        );
        assert_eq!(net.nodes[net.source].supply, 2);
        assert_eq!(net.nodes[net.sink].supply, -2);
        let mut dump = Vec::new();
        net.write_edge_list(&mut dump).unwrap();
        assert_eq!(String::from_utf8(dump).unwrap().lines().count(), 12);
    }

    #[test]
    fn literal_routing_omits_zero_delay_nodes() {
        let inst = e1();
        let net = build_network(&inst, &generate(&inst), VariantRouting::Literal);
        assert_eq!(net.nodes.len(), 9);
        assert_eq!(net.edges.len(), 10);
    }

    #[test]
    fn minimal_network() {
        let travel = TravelMatrix::from_grid(&[(0, 0)], 1).unwrap();
        let plan = Plan { id: PlanId(1), origin: loc(0), destination: loc(0), t_or: 3, t_de: 4, d_max: 0 };
        let veh = Vehicle { id: VehicleId(1), start: loc(0), t_st: 0 };
        let inst = ChainingInstance::new(vec![plan], vec![veh], travel, CostPolicy::TravelCost).unwrap();
        let net = build_network(&inst, &generate(&inst), VariantRouting::Strengthened);
        assert_eq!(net.nodes.len(), 5);
        assert_eq!(net.edges.len(), 4);
        let a = solve_mcf(&net).unwrap();
        assert_eq!(a.flow[net.plans[0].source_edge], 0);
        assert_conserves(&net, &a);
    }

    #[test]
    fn empty_network() {
        let inst = ChainingInstance::new(vec![], vec![], TravelMatrix::from_rows(vec![]).unwrap(), CostPolicy::TravelCost).unwrap();
        let net = build_network(&inst, &generate(&inst), VariantRouting::Strengthened);
        assert_eq!(net.nodes.len(), 2);
        assert!(net.edges.is_empty());
        assert_eq!(net.nodes[net.sink].supply, 0);
        assert_eq!(solve_mcf(&net).unwrap().cost, 0);
    }

    #[test]
    fn cheaper_parallel_edge_wins() {
        let mut net = FlowNetwork::with_terminals(1);
        let (s, t) = (net.source, net.sink);
        let dear = net.add_edge(s, t, 1, 3);
        let cheap = net.add_edge(s, t, 1, 1);
        let a = solve_mcf(&net).unwrap();
        assert_eq!(a.flow[cheap], 1);
        assert_eq!(a.flow[dear], 0);
        assert_eq!(a.cost, 1);
    }

    #[test]
    fn e1_optimum() {
        let inst = e1();
        let net = build_network(&inst, &generate(&inst), VariantRouting::Strengthened);
        let a = solve_mcf(&net).unwrap();
        assert_eq!(a.cost, 2);
        assert_conserves(&net, &a);
        let upper: Vec<i64> = net.edges.iter().map(|e| e.upper).collect();
        assert!(!has_negative_cycle(&net, &upper, &a.flow));
        let active: Vec<(Origin, VariantRef)> = a
            .active_edges()
            .filter_map(|e| net.edges[e].connection)
            .map(|k| (net.connections[k].origin, net.connections[k].target))
            .collect();
        assert_eq!(
            active,
            vec![
                (Origin::Vehicle(VehicleId(1)), VariantRef::base(PlanId(1))),
                (Origin::plan(PlanId(1)), VariantRef::new(PlanId(2), 1)),
            ]
        );
    }

    #[test]
    fn e1_without_vehicle_is_infeasible() {
        let inst = e1().without_vehicles(&[VehicleId(1)]);
        let net = build_network(&inst, &generate(&inst), VariantRouting::Strengthened);
        assert!(matches!(solve_mcf(&net), Err(FlowError::PlanUnreachable { plan: PlanId(1), .. })));
    }

    #[test]
    fn warm_start_matches_cold_solve() {
        // Diamond: two routes of cost 1 and 4; forbidding the cheap one must
        // reroute.
        let mut net = FlowNetwork::with_terminals(1);
        let (s, t) = (net.source, net.sink);
        let a = net.add_node(NodeKind::Aux(0), 0);
        let b = net.add_node(NodeKind::Aux(1), 0);
        let sa = net.add_edge(s, a, 1, 0);
        net.add_edge(a, t, 1, 1);
        net.add_edge(s, b, 1, 0);
        net.add_edge(b, t, 1, 4);
        let res = Residual::new(&net);
        let mut upper: Vec<i64> = net.edges.iter().map(|e| e.upper).collect();
        let first = res.solve(&upper, None).unwrap();
        assert_eq!(first.cost, 1);
        upper[sa] = 0;
        let warm = res.solve_detailed(&upper, Some(&first)).unwrap();
        let cold = res.solve(&upper, None).unwrap();
        assert!(warm.warm);
        assert_eq!(warm.assignment.cost, 4);
        assert_eq!(warm.assignment, cold);
    }
}
