// SPDX-License-Identifier: Apache-2.0

//! Shared test support: random valid programs, random operation DAGs, and
//! independent brute-force oracles for scheduling and register counts.
//! Everything here stays independent of the implementation paths it
//! checks. Compiled once per test target, so not every item is used by
//! every target.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use bdlc_core::dfg::{Dfg, Edge, Node, NodeId, NodeKind};
use bdlc_core::hls::{Allocation, ResourceLibrary, Schedule};
use bdlc_core::sim::SplitMix64;

// --- random valid BDL programs -------------------------------------------

pub struct ProgramSpec {
    pub source: String,
}

/// Generates a valid BDL module with at most `max_ops` operator
/// occurrences and widths up to `max_width`. Reads only bind to inputs or
/// strictly earlier writes, so every generated source parses.
pub fn random_program(rng: &mut SplitMix64, max_ops: usize, max_width: u32) -> ProgramSpec {
    let input_count = 1 + rng.below(3) as usize;
    let output_count = 1 + rng.below(2) as usize;
    let local_count = rng.below(3) as usize;

    let inputs: Vec<String> = (0..input_count).map(|i| format!("i{i}")).collect();
    let outputs: Vec<String> = (0..output_count).map(|i| format!("o{i}")).collect();
    let locals: Vec<String> = (0..local_count).map(|i| format!("t{i}")).collect();

    let mut widths: BTreeMap<String, u32> = BTreeMap::new();
    for name in inputs.iter().chain(&outputs).chain(&locals) {
        widths.insert(name.clone(), 1 + rng.below(max_width as u64) as u32);
    }

    let mut ports: Vec<String> = inputs
        .iter()
        .map(|n| format!("in {n}: {}", widths[n]))
        .collect();
    ports.extend(outputs.iter().map(|n| format!("out {n}: {}", widths[n])));

    let mut body_lines: Vec<String> = Vec::new();
    let mut readable: Vec<String> = inputs.clone();
    let mut ops_left = max_ops;
    let all_targets: Vec<String> = outputs.iter().chain(&locals).cloned().collect();
    let mut unwritten: BTreeSet<String> = all_targets.iter().cloned().collect();

    // A sequence of phases; each phase is a single assignment or a par of
    // assignments to distinct targets. All reads bind to earlier phases,
    // so every generated source parses. Targets may be rewritten in later
    // phases.
    let phase_count = 2 + rng.below(4) as usize;
    for _ in 0..phase_count {
        let in_phase = (1 + rng.below(3) as usize).min(all_targets.len());
        let mut pool = all_targets.clone();
        let mut phase_lines = Vec::new();
        let mut written_this_phase: Vec<String> = Vec::new();
        for _ in 0..in_phase {
            let pick = rng.below(pool.len() as u64) as usize;
            let target = pool.remove(pick);
            let budget = ops_left.min(1 + rng.below(5) as usize);
            let expr = random_expr(rng, &readable, &widths, &target, budget, &mut ops_left);
            phase_lines.push(format!("{target} = {expr};"));
            written_this_phase.push(target);
        }
        if phase_lines.len() > 1 {
            body_lines.push(format!("par {{ {} }}", phase_lines.join(" ")));
        } else {
            body_lines.push(phase_lines.pop().unwrap());
        }
        for target in written_this_phase {
            unwritten.remove(&target);
            if !readable.contains(&target) {
                readable.push(target);
            }
        }
    }
    // Any output still unwritten gets a final assignment.
    for target in outputs.iter() {
        if unwritten.contains(target) {
            let budget = ops_left.min(2);
            let expr = random_expr(rng, &readable, &widths, target, budget, &mut ops_left);
            body_lines.push(format!("{target} = {expr};"));
        }
    }

    let mut source = format!("module gen (\n  {}\n) {{\n", ports.join(", "));
    for local in &locals {
        source.push_str(&format!("  var {local}: {};\n", widths[local]));
    }
    source.push_str("  seq {\n");
    for line in &body_lines {
        source.push_str(&format!("    {line}\n"));
    }
    source.push_str("  }\n}\n");

    ProgramSpec { source }
}

fn random_expr(
    rng: &mut SplitMix64,
    readable: &[String],
    widths: &BTreeMap<String, u32>,
    target: &str,
    budget: usize,
    ops_left: &mut usize,
) -> String {
    let width = widths[target];
    if budget == 0 || *ops_left == 0 || rng.below(8) == 0 {
        return random_leaf(rng, readable, width);
    }
    *ops_left -= 1;
    let choice = rng.below(9);
    let lhs_budget = (budget - 1).div_ceil(2);
    let rhs_budget = (budget - 1) / 2;
    match choice {
        0..=5 => {
            let op = ["+", "-", "*", "&", "|", "^"][choice as usize];
            let lhs = random_expr(rng, readable, widths, target, lhs_budget, ops_left);
            let rhs = random_expr(rng, readable, widths, target, rhs_budget, ops_left);
            format!("({lhs} {op} {rhs})")
        }
        6 => {
            let operand = random_expr(rng, readable, widths, target, budget - 1, ops_left);
            format!("(~{operand})")
        }
        _ => {
            let op = if choice == 7 { "<<" } else { ">>" };
            let lhs = random_expr(rng, readable, widths, target, budget - 1, ops_left);
            let amount = rng.below(width as u64);
            format!("({lhs} {op} {amount})")
        }
    }
}

fn random_leaf(rng: &mut SplitMix64, readable: &[String], width: u32) -> String {
    if readable.is_empty() || rng.below(4) == 0 {
        let value = rng.next_u64() & bdlc_core::width_mask(width);
        format!("{value}")
    } else {
        readable[rng.below(readable.len() as u64) as usize].clone()
    }
}

/// A feasible random allocation: at least one instance per used kind.
pub fn random_allocation(rng: &mut SplitMix64, dfg: &Dfg) -> Allocation {
    let mut allocation = Allocation::new();
    let used: BTreeSet<NodeKind> = dfg.operation_nodes().map(|n| n.kind).collect();
    for kind in used {
        allocation.set(kind, 1 + rng.below(3) as u32);
    }
    allocation
}

// --- random operation DAGs -------------------------------------------------

/// Builds a bare operation DAG: a few input leaves plus `op_count`
/// operation nodes whose operands reference earlier nodes.
pub fn random_dag(rng: &mut SplitMix64, op_count: usize) -> Dfg {
    let mut dfg = Dfg::default();
    let input_count = 1 + rng.below(3) as usize;
    for index in 0..input_count {
        dfg.nodes.push(Node {
            id: NodeId(index),
            kind: NodeKind::Input,
            width: 8,
            name: Some(format!("i{index}")),
            value: None,
        });
    }
    let kinds = [
        NodeKind::Add,
        NodeKind::Sub,
        NodeKind::Mul,
        NodeKind::And,
        NodeKind::Or,
        NodeKind::Xor,
        NodeKind::Not,
    ];
    for _ in 0..op_count {
        let id = NodeId(dfg.nodes.len());
        let kind = kinds[rng.below(kinds.len() as u64) as usize];
        dfg.nodes.push(Node {
            id,
            kind,
            width: 8,
            name: None,
            value: None,
        });
        for position in 0..kind.arity() {
            let from = NodeId(rng.below(id.0 as u64) as usize);
            dfg.edges.push(Edge {
                from,
                to: id,
                position,
                width: 8,
            });
        }
    }
    dfg
}

// --- brute-force scheduling oracle -----------------------------------------

/// Exhaustive breadth-first search over feasible schedules; returns the
/// optimal length. Independent of the list scheduler.
pub fn brute_force_optimal_length(
    dfg: &Dfg,
    library: &ResourceLibrary,
    allocation: &Allocation,
) -> u32 {
    let ops: Vec<&Node> = dfg.operation_nodes().collect();
    assert!(ops.len() <= 12, "oracle is exponential");
    let index_of: BTreeMap<NodeId, usize> = ops
        .iter()
        .enumerate()
        .map(|(index, node)| (node.id, index))
        .collect();
    let preds: Vec<Vec<usize>> = ops
        .iter()
        .map(|node| {
            dfg.operands(node.id)
                .iter()
                .filter(|e| dfg.node(e.from).kind.is_operation())
                .map(|e| index_of[&e.from])
                .collect()
        })
        .collect();
    let full: u32 = (1u32 << ops.len()) - 1;

    // State: (done bitmask, running ops with remaining cycles).
    type Running = Vec<(usize, u32)>;
    let initial: (u32, Running) = (0, Vec::new());
    let mut seen: BTreeSet<(u32, Running)> = BTreeSet::new();
    seen.insert(initial.clone());
    let mut frontier: VecDeque<(u32, Running)> = VecDeque::from([initial]);
    let mut steps = 0u32;

    loop {
        if frontier
            .iter()
            .any(|(done, running)| *done == full && running.is_empty())
        {
            return steps;
        }
        let mut next: BTreeSet<(u32, Running)> = BTreeSet::new();
        for (done, running) in frontier.drain(..) {
            let running_ids: BTreeSet<usize> = running.iter().map(|&(op, _)| op).collect();
            let ready: Vec<usize> = (0..ops.len())
                .filter(|&op| {
                    done >> op & 1 == 0
                        && !running_ids.contains(&op)
                        && preds[op].iter().all(|&p| done >> p & 1 == 1)
                })
                .collect();
            // Enumerate every budget-feasible subset of the ready set.
            for subset in 0u32..1 << ready.len() {
                let chosen: Vec<usize> = ready
                    .iter()
                    .enumerate()
                    .filter(|&(bit, _)| subset >> bit & 1 == 1)
                    .map(|(_, &op)| op)
                    .collect();
                let mut usage: BTreeMap<NodeKind, u32> = BTreeMap::new();
                for &(op, _) in &running {
                    *usage.entry(ops[op].kind).or_insert(0) += 1;
                }
                for &op in &chosen {
                    *usage.entry(ops[op].kind).or_insert(0) += 1;
                }
                if usage
                    .iter()
                    .any(|(&kind, &count)| count > allocation.count(kind))
                {
                    continue;
                }
                let mut new_running: Running = Vec::new();
                let mut new_done = done;
                for &(op, remaining) in &running {
                    if remaining > 1 {
                        new_running.push((op, remaining - 1));
                    } else {
                        new_done |= 1 << op;
                    }
                }
                for &op in &chosen {
                    let latency = library.latency(ops[op].kind);
                    if latency > 1 {
                        new_running.push((op, latency - 1));
                    } else {
                        new_done |= 1 << op;
                    }
                }
                new_running.sort();
                let state = (new_done, new_running);
                if seen.insert(state.clone()) {
                    next.insert(state);
                }
            }
        }
        frontier.extend(next);
        steps += 1;
        assert!(
            steps <= 16 * ops.len() as u32 + 16,
            "oracle failed to terminate"
        );
    }
}

/// Dependence and resource feasibility of a schedule, asserted directly.
pub fn assert_schedule_feasible(
    dfg: &Dfg,
    library: &ResourceLibrary,
    allocation: Option<&Allocation>,
    schedule: &Schedule,
) {
    for edge in &dfg.edges {
        let producer = dfg.node(edge.from);
        let consumer = dfg.node(edge.to);
        if producer.kind.is_operation() && consumer.kind.is_operation() {
            let su = schedule.start(edge.from);
            let sv = schedule.start(edge.to);
            assert!(
                sv >= su + library.latency(producer.kind),
                "dependence violated on {edge:?}"
            );
        }
    }
    if let Some(allocation) = allocation {
        for step in 1..=schedule.length {
            let mut usage: BTreeMap<NodeKind, u32> = BTreeMap::new();
            for (id, start) in schedule.iter() {
                let kind = dfg.node(id).kind;
                if start <= step && step < start + library.latency(kind) {
                    *usage.entry(kind).or_insert(0) += 1;
                }
            }
            for (kind, count) in usage {
                assert!(
                    count <= allocation.count(kind),
                    "step {step} uses {count} {} units",
                    kind.name()
                );
            }
        }
    }
    for (id, start) in schedule.iter() {
        assert!(start >= 1, "{id:?} scheduled before step 1");
        let kind = dfg.node(id).kind;
        assert!(start + library.latency(kind) - 1 <= schedule.length);
    }
}

// --- register oracle ---------------------------------------------------------

/// Maximum number of simultaneously live intervals, by a step counter.
pub fn max_simultaneous_live(intervals: &[(u32, u32)]) -> usize {
    let top = intervals.iter().map(|&(_, end)| end).max().unwrap_or(0);
    (0..=top)
        .map(|step| {
            intervals
                .iter()
                .filter(|&&(birth, end)| birth <= step && step <= end)
                .count()
        })
        .max()
        .unwrap_or(0)
}

/// Minimal register count by exhaustive assignment of intervals to slots.
pub fn brute_force_min_registers(intervals: &[(u32, u32)]) -> usize {
    assert!(intervals.len() <= 8, "oracle is exponential");
    if intervals.is_empty() {
        return 0;
    }
    fn fits(assignment: &[usize], intervals: &[(u32, u32)], slot_count: usize) -> bool {
        for slot in 0..slot_count {
            let members: Vec<(u32, u32)> = assignment
                .iter()
                .enumerate()
                .filter(|&(_, &s)| s == slot)
                .map(|(index, _)| intervals[index])
                .collect();
            for (i, a) in members.iter().enumerate() {
                for b in &members[i + 1..] {
                    if a.0 <= b.1 && b.0 <= a.1 {
                        return false;
                    }
                }
            }
        }
        true
    }
    for slots in 1..=intervals.len() {
        let mut assignment = vec![0usize; intervals.len()];
        loop {
            if fits(&assignment, intervals, slots) {
                return slots;
            }
            // Next assignment in base-`slots` counting.
            let mut position = 0;
            loop {
                if position == assignment.len() {
                    break;
                }
                assignment[position] += 1;
                if assignment[position] < slots {
                    break;
                }
                assignment[position] = 0;
                position += 1;
            }
            if position == assignment.len() {
                break;
            }
        }
    }
    intervals.len()
}
