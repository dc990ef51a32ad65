//! Generation of the delayed plan variants and connections that an optimal
//! chaining can use.
//!
//! Every vehicle and plan is first tried against every other plan. Whenever a
//! connection needs the target delayed, the target variant is created with
//! the smallest delay that works and queued; queued variants are then tried
//! as origins against every other plan until no new variant appears.

use std::collections::{BTreeSet, HashSet, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::model::{ChainingInstance, Cost, ModelError, Origin, PlanId, VariantRef};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Connection {
    pub origin: Origin,
    pub target: VariantRef,
    pub cost: Cost,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConnectOutcome {
    /// Feasible against the undelayed target.
    Direct(Connection),
    /// Feasible once the target is delayed by the variant's (positive) delay.
    NewVariant(VariantRef, Connection),
    /// Impossible within the target's delay budget, or forbidden by the
    /// cost policy.
    Infeasible,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GenerationResult {
    /// Delayed variants, unique by `(plan, delay)`; all delays are positive.
    pub variants: BTreeSet<VariantRef>,
    /// Sorted, without duplicate `(origin, target)` pairs.
    pub connections: Vec<Connection>,
}

impl GenerationResult {
    pub fn delayed_variants_of(&self, plan: PlanId) -> impl Iterator<Item = VariantRef> + '_ {
        self.variants
            .range(VariantRef::new(plan, 1)..=VariantRef::new(plan, i64::MAX))
            .copied()
    }
}

/// Order in which queued variants are expanded. The result does not depend
/// on it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum QueueDiscipline {
    #[default]
    Fifo,
    Lifo,
}

pub fn try_connect(
    instance: &ChainingInstance,
    from: Origin,
    to: PlanId,
) -> Result<ConnectOutcome, ModelError> {
    let delay = instance.min_target_delay(from, to)?;
    if delay > instance.plan(to)?.d_max {
        return Ok(ConnectOutcome::Infeasible);
    }
    let target = VariantRef::new(to, delay);
    let Some(cost) = instance.connection_cost(from, target)? else {
        return Ok(ConnectOutcome::Infeasible);
    };
    let connection = Connection { origin: from, target, cost };
    Ok(if delay == 0 {
        ConnectOutcome::Direct(connection)
    } else {
        ConnectOutcome::NewVariant(target, connection)
    })
}

fn connect_all(instance: &ChainingInstance, from: Origin) -> Vec<ConnectOutcome> {
    let own = from.variant().map(|v| v.plan);
    instance
        .plans()
        .iter()
        .filter(|p| Some(p.id) != own)
        .map(|p| try_connect(instance, from, p.id).expect("ids come from the instance"))
        .filter(|o| !matches!(o, ConnectOutcome::Infeasible))
        .collect()
}

pub fn generate(instance: &ChainingInstance) -> GenerationResult {
    generate_with(instance, QueueDiscipline::Fifo)
}

pub fn generate_with(instance: &ChainingInstance, discipline: QueueDiscipline) -> GenerationResult {
    let origins: Vec<Origin> = instance
        .plans()
        .iter()
        .map(|p| Origin::plan(p.id))
        .chain(instance.vehicles().iter().map(|v| Origin::Vehicle(v.id)))
        .collect();
    let first_pass: Vec<Vec<ConnectOutcome>> =
        origins.par_iter().map(|&o| connect_all(instance, o)).collect();

    let mut variants = BTreeSet::new();
    let mut connections = HashSet::new();
    let mut queue = VecDeque::new();
    let mut absorb = |outcomes: Vec<ConnectOutcome>,
                      variants: &mut BTreeSet<VariantRef>,
                      queue: &mut VecDeque<VariantRef>| {
        for outcome in outcomes {
            match outcome {
                ConnectOutcome::Direct(c) => {
                    connections.insert(c);
                }
                ConnectOutcome::NewVariant(v, c) => {
                    connections.insert(c);
                    if variants.insert(v) {
                        queue.push_back(v);
                    }
                }
                ConnectOutcome::Infeasible => {}
            }
        }
    };
    for outcomes in first_pass {
        absorb(outcomes, &mut variants, &mut queue);
    }
    loop {
        let next = match discipline {
            QueueDiscipline::Fifo => queue.pop_front(),
            QueueDiscipline::Lifo => queue.pop_back(),
        };
        let Some(variant) = next else { break };
        absorb(connect_all(instance, Origin::Plan(variant)), &mut variants, &mut queue);
    }

    let mut connections: Vec<Connection> = connections.into_iter().collect();
    connections.sort();
    GenerationResult { variants, connections }
}
