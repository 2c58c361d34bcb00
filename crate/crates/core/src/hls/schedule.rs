// SPDX-License-Identifier: Apache-2.0

//! ASAP, ALAP, and resource-constrained list scheduling.

use std::collections::BTreeMap;

use crate::dfg::{critical_path, topo_order, Dfg, NodeId, NodeKind};

use super::{Allocation, HlsError, ResourceLibrary, Schedule};

/// Step at which the value of `id` becomes readable, given the operation
/// start steps computed so far. Inputs and constants are readable from
/// step 1; an operation result from `start + latency`.
fn availability(
    dfg: &Dfg,
    library: &ResourceLibrary,
    starts: &BTreeMap<NodeId, u32>,
    id: NodeId,
) -> u32 {
    let node = dfg.node(id);
    if node.kind.is_operation() {
        starts[&id] + library.latency(node.kind)
    } else {
        1
    }
}

fn schedule_length(dfg: &Dfg, library: &ResourceLibrary, starts: &BTreeMap<NodeId, u32>) -> u32 {
    starts
        .iter()
        .map(|(&id, &start)| start + library.latency(dfg.node(id).kind) - 1)
        .max()
        .unwrap_or(0)
}

/// Unconstrained earliest schedule. Length equals the critical path.
pub fn asap(dfg: &Dfg, library: &ResourceLibrary) -> Schedule {
    let order = topo_order(dfg).expect("acyclic dataflow graph");
    let mut starts = BTreeMap::new();
    for id in order {
        if !dfg.node(id).kind.is_operation() {
            continue;
        }
        let start = dfg
            .operands(id)
            .iter()
            .map(|e| availability(dfg, library, &starts, e.from))
            .max()
            .unwrap_or(1);
        starts.insert(id, start);
    }
    let length = schedule_length(dfg, library, &starts);
    Schedule::new(starts, length)
}

/// Latest feasible schedule within `deadline` control steps.
pub fn alap(dfg: &Dfg, library: &ResourceLibrary, deadline: u32) -> Result<Schedule, HlsError> {
    let bound = critical_path(dfg, &library.latencies());
    if deadline < bound {
        return Err(HlsError::Deadline {
            deadline,
            critical_path: bound,
        });
    }
    let order = topo_order(dfg).expect("acyclic dataflow graph");
    let mut starts: BTreeMap<NodeId, u32> = BTreeMap::new();
    for &id in order.iter().rev() {
        let node = dfg.node(id);
        if !node.kind.is_operation() {
            continue;
        }
        // The value must be ready by the earliest consuming operation, or
        // by the end of the schedule for outputs and dead values.
        let mut ready_by = deadline + 1;
        for edge in dfg.consumers(id) {
            let consumer = dfg.node(edge.to);
            if consumer.kind.is_operation() {
                ready_by = ready_by.min(starts[&edge.to]);
            }
        }
        starts.insert(id, ready_by - library.latency(node.kind));
    }
    Ok(Schedule::new(starts, deadline))
}

/// Per-node slack between the ALAP and ASAP start steps.
pub fn mobility(asap: &Schedule, alap: &Schedule) -> BTreeMap<NodeId, u32> {
    asap.iter()
        .map(|(id, early)| {
            let late = alap.start(id);
            debug_assert!(late >= early);
            (id, late - early)
        })
        .collect()
}

/// Resource-constrained list scheduling. At each step ready operations are
/// admitted in (ascending mobility, ascending node id) order until the
/// per-kind instance budget is exhausted.
pub fn list_schedule(
    dfg: &Dfg,
    library: &ResourceLibrary,
    allocation: &Allocation,
) -> Result<Schedule, HlsError> {
    if let Some(&kind) = allocation.missing_kinds(dfg).first() {
        return Err(HlsError::MissingResource { kind: kind.name() });
    }

    let earliest = asap(dfg, library);
    let latest = alap(dfg, library, earliest.length).expect("deadline equals asap length");
    let slack = mobility(&earliest, &latest);

    let mut pending: Vec<NodeId> = dfg.operation_nodes().map(|n| n.id).collect();
    pending.sort_by_key(|&id| (slack[&id], id));

    let mut starts: BTreeMap<NodeId, u32> = BTreeMap::new();
    let mut step = 1u32;
    while !pending.is_empty() {
        let mut admitted = Vec::new();
        for (index, &id) in pending.iter().enumerate() {
            let ready = dfg.operands(id).iter().all(|e| {
                let producer = dfg.node(e.from);
                if producer.kind.is_operation() {
                    starts
                        .get(&e.from)
                        .map(|&s| s + library.latency(producer.kind) <= step)
                        .unwrap_or(false)
                } else {
                    true
                }
            });
            if !ready {
                continue;
            }
            let kind = dfg.node(id).kind;
            let executing = starts
                .iter()
                .filter(|(&other, &s)| {
                    let node = dfg.node(other);
                    node.kind == kind && s <= step && step < s + library.latency(kind)
                })
                .count() as u32;
            if executing < allocation.count(kind) {
                starts.insert(id, step);
                admitted.push(index);
            }
        }
        for &index in admitted.iter().rev() {
            pending.remove(index);
        }
        step += 1;
    }

    let length = schedule_length(dfg, library, &starts);
    Ok(Schedule::new(starts, length))
}

/// Allocation covering the per-step concurrency maximum of the ASAP
/// schedule, the default for `--auto-allocate`.
pub fn auto_allocate(dfg: &Dfg, library: &ResourceLibrary) -> Allocation {
    let schedule = asap(dfg, library);
    let mut peaks: BTreeMap<NodeKind, u32> = BTreeMap::new();
    for step in 1..=schedule.length {
        let mut at_step: BTreeMap<NodeKind, u32> = BTreeMap::new();
        for (id, start) in schedule.iter() {
            let kind = dfg.node(id).kind;
            if start <= step && step < start + library.latency(kind) {
                *at_step.entry(kind).or_insert(0) += 1;
            }
        }
        for (kind, count) in at_step {
            let peak = peaks.entry(kind).or_insert(0);
            *peak = (*peak).max(count);
        }
    }
    Allocation::from_pairs(peaks)
}
