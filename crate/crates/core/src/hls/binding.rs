// SPDX-License-Identifier: Apache-2.0

//! Left-edge binding of operations to functional-unit instances and of
//! values to registers, plus the cost estimator.

use std::collections::{BTreeMap, BTreeSet};

use crate::dfg::{Dfg, Edge, NodeId, NodeKind};
use crate::width_mask;

use super::{Allocation, HlsError, ResourceLibrary, Schedule};

/// A functional-unit instance, e.g. multiplier 1. Indices are 1-based as
/// in schedule reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct FuInstance {
    pub kind: NodeKind,
    pub index: u32,
}

impl std::fmt::Display for FuInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}{}", self.kind.name(), self.index)
    }
}

/// Binding of operations to instances and values to registers.
#[derive(Debug, Clone, Default)]
pub struct Binding {
    pub fu_bind: BTreeMap<NodeId, FuInstance>,
    pub reg_bind: BTreeMap<NodeId, u32>,
    /// Value lifetimes as `[birth step, last-use step]` intervals.
    pub lifetimes: BTreeMap<NodeId, (u32, u32)>,
}

impl Binding {
    /// Distinct functional-unit instances in use, sorted.
    pub fn fu_instances(&self) -> Vec<FuInstance> {
        let set: BTreeSet<FuInstance> = self.fu_bind.values().copied().collect();
        set.into_iter().collect()
    }

    /// Distinct register indices in use, sorted.
    pub fn register_indices(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self.reg_bind.values().copied().collect();
        set.into_iter().collect()
    }

    /// Nodes bound to `instance`, sorted by node id.
    pub fn ops_on(&self, instance: FuInstance) -> Vec<NodeId> {
        self.fu_bind
            .iter()
            .filter(|(_, &i)| i == instance)
            .map(|(&id, _)| id)
            .collect()
    }

    /// Values sharing register `index`, sorted by node id.
    pub fn values_in(&self, index: u32) -> Vec<NodeId> {
        self.reg_bind
            .iter()
            .filter(|(_, &r)| r == index)
            .map(|(&id, _)| id)
            .collect()
    }
}

/// Value lifetimes over the schedule. An operation result is born when its
/// unit finishes (`start + latency`) and lives to its last consuming
/// operation's start step; values feeding outputs live to `length + 1`.
/// Inputs live from step 1. Never-consumed values get no entry.
pub fn lifetimes(
    dfg: &Dfg,
    schedule: &Schedule,
    library: &ResourceLibrary,
) -> BTreeMap<NodeId, (u32, u32)> {
    let mut map = BTreeMap::new();
    for node in &dfg.nodes {
        if node.kind == NodeKind::Const || node.kind == NodeKind::Output {
            continue;
        }
        let consumers = dfg.consumers(node.id);
        if consumers.is_empty() {
            continue;
        }
        let birth = if node.kind.is_operation() {
            schedule.start(node.id) + library.latency(node.kind)
        } else {
            1
        };
        let last = consumers
            .iter()
            .map(|e| {
                let consumer = dfg.node(e.to);
                if consumer.kind.is_operation() {
                    schedule.start(e.to)
                } else {
                    schedule.length + 1
                }
            })
            .max()
            .unwrap();
        map.insert(node.id, (birth, last));
    }
    map
}

/// Left-edge assignment of operations to instances: nodes of each kind,
/// sorted by start step (ties by node id), take the lowest-numbered
/// instance free over their execution interval.
pub fn bind_functional_units(
    dfg: &Dfg,
    schedule: &Schedule,
    allocation: &Allocation,
    library: &ResourceLibrary,
) -> Result<Binding, HlsError> {
    let mut binding = Binding::default();
    for kind in NodeKind::OPERATIONS {
        let mut ops: Vec<NodeId> = dfg
            .operation_nodes()
            .filter(|n| n.kind == kind)
            .map(|n| n.id)
            .collect();
        if ops.is_empty() {
            continue;
        }
        ops.sort_by_key(|&id| (schedule.start(id), id));
        let latency = library.latency(kind);
        // Finish step of the last operation placed on each instance.
        let mut instance_free_after: Vec<u32> = vec![0; allocation.count(kind) as usize];
        for id in ops {
            let start = schedule.start(id);
            let slot = instance_free_after.iter().position(|&end| end < start);
            match slot {
                Some(index) => {
                    instance_free_after[index] = start + latency - 1;
                    binding.fu_bind.insert(
                        id,
                        FuInstance {
                            kind,
                            index: index as u32 + 1,
                        },
                    );
                }
                None => {
                    return Err(HlsError::InfeasibleBinding(format!(
                        "no free {} instance at step {start}",
                        kind.name()
                    )))
                }
            }
        }
    }
    Ok(binding)
}

/// Left-edge register allocation over value lifetimes. Values produced in
/// the final step that feed only outputs latch straight into output
/// registers and need no datapath register.
pub fn bind_registers(dfg: &Dfg, schedule: &Schedule, library: &ResourceLibrary) -> Binding {
    let intervals = lifetimes(dfg, schedule, library);
    let mut candidates: Vec<(NodeId, (u32, u32))> = intervals
        .iter()
        .filter(|(&id, &(birth, _))| dfg.node(id).kind.is_operation() && birth <= schedule.length)
        .map(|(&id, &interval)| (id, interval))
        .collect();
    candidates.sort_by_key(|&(id, (birth, _))| (birth, id));

    let mut register_free_after: Vec<u32> = Vec::new();
    let mut binding = Binding {
        lifetimes: intervals,
        ..Binding::default()
    };
    for (id, (birth, last)) in candidates {
        let slot = register_free_after.iter().position(|&end| end < birth);
        let index = match slot {
            Some(index) => index,
            None => {
                register_free_after.push(0);
                register_free_after.len() - 1
            }
        };
        register_free_after[index] = last;
        binding.reg_bind.insert(id, index as u32 + 1);
    }
    binding
}

/// Combined functional-unit and register binding.
pub fn bind(
    dfg: &Dfg,
    schedule: &Schedule,
    allocation: &Allocation,
    library: &ResourceLibrary,
) -> Result<Binding, HlsError> {
    let fu = bind_functional_units(dfg, schedule, allocation, library)?;
    let regs = bind_registers(dfg, schedule, library);
    Ok(Binding {
        fu_bind: fu.fu_bind,
        reg_bind: regs.reg_bind,
        lifetimes: regs.lifetimes,
    })
}

/// Where an operand value physically comes from during execution.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueSource {
    /// An input port, read modulo `2^width`.
    Port { name: String, width: u32 },
    /// A literal net.
    Const { value: u64, width: u32 },
    /// A datapath register, read modulo `2^width`.
    Register { index: u32, width: u32 },
    /// The combinational output of a functional unit, truncated to
    /// `width`; used when a final-step value latches straight into an
    /// output register.
    FuOutput {
        kind: NodeKind,
        instance: u32,
        width: u32,
    },
}

/// Resolves the physical source of the operand carried by `edge`.
pub fn value_source(dfg: &Dfg, binding: &Binding, edge: &Edge) -> ValueSource {
    let producer = dfg.node(edge.from);
    match producer.kind {
        NodeKind::Input => ValueSource::Port {
            name: producer.name.clone().expect("input has a name"),
            width: edge.width,
        },
        NodeKind::Const => ValueSource::Const {
            value: producer.value.expect("const has a value") & width_mask(edge.width),
            width: edge.width,
        },
        _ => match binding.reg_bind.get(&edge.from) {
            Some(&index) => ValueSource::Register {
                index,
                width: edge.width,
            },
            None => {
                let instance = binding.fu_bind[&edge.from];
                ValueSource::FuOutput {
                    kind: instance.kind,
                    instance: instance.index,
                    width: edge.width,
                }
            }
        },
    }
}

/// Deterministic cost summary of a scheduled and bound design.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CostReport {
    pub latency: u32,
    pub fu_counts: BTreeMap<&'static str, u32>,
    pub registers: u32,
    pub mux_inputs: u32,
    pub area: u32,
}

/// Counts the multiplexer inputs implied by instance and register sharing:
/// any functional-unit operand port or register write port fed by more
/// than one distinct source over the schedule needs a mux with that many
/// inputs.
pub fn count_mux_inputs(dfg: &Dfg, binding: &Binding) -> u32 {
    let mut total = 0u32;
    for instance in binding.fu_instances() {
        let ops = binding.ops_on(instance);
        for position in 0..instance.kind.arity() {
            let sources: BTreeSet<ValueSource> = ops
                .iter()
                .map(|&id| {
                    let edge = dfg.operands(id)[position];
                    value_source(dfg, binding, &edge)
                })
                .collect();
            if sources.len() > 1 {
                total += sources.len() as u32;
            }
        }
    }
    for index in binding.register_indices() {
        let writers: BTreeSet<(FuInstance, u32)> = binding
            .values_in(index)
            .iter()
            .map(|&id| (binding.fu_bind[&id], dfg.node(id).width))
            .collect();
        if writers.len() > 1 {
            total += writers.len() as u32;
        }
    }
    total
}

/// Cost summary used by schedule reports.
pub fn estimate(
    dfg: &Dfg,
    schedule: &Schedule,
    binding: &Binding,
    library: &ResourceLibrary,
) -> CostReport {
    let mut fu_counts: BTreeMap<&'static str, u32> = BTreeMap::new();
    let mut area = 0u32;
    for instance in binding.fu_instances() {
        *fu_counts.entry(instance.kind.name()).or_insert(0) += 1;
        area += library.area(instance.kind);
    }
    CostReport {
        latency: schedule.length,
        fu_counts,
        registers: binding.register_indices().len() as u32,
        mux_inputs: count_mux_inputs(dfg, binding),
        area,
    }
}
