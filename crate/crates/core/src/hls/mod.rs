// SPDX-License-Identifier: Apache-2.0

//! Allocation, scheduling, and binding.

mod binding;
mod report;
mod schedule;

pub use binding::{
    bind, bind_functional_units, bind_registers, estimate, lifetimes, value_source, Binding,
    CostReport, FuInstance, ValueSource,
};
pub use report::{build_report, OpReport, RegisterReport, ScheduleReport, StepReport};
pub use schedule::{alap, asap, auto_allocate, list_schedule, mobility};

use std::collections::BTreeMap;

use crate::dfg::{Dfg, NodeId, NodeKind};

/// Functional-unit characteristics for one operation kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FuSpec {
    pub name: String,
    /// Cycles per operation, at least 1.
    pub latency: u32,
    /// Abstract area units per instance.
    pub area: u32,
}

/// Per-kind functional-unit library.
#[derive(Debug, Clone)]
pub struct ResourceLibrary {
    specs: BTreeMap<NodeKind, FuSpec>,
}

impl ResourceLibrary {
    /// Unit-latency library covering every operation kind, with the
    /// default abstract areas documented in the README.
    pub fn unit() -> Self {
        let mut specs = BTreeMap::new();
        for kind in NodeKind::OPERATIONS {
            let area = match kind {
                NodeKind::Mul => 32,
                NodeKind::Add | NodeKind::Sub => 8,
                NodeKind::Shl | NodeKind::Shr => 4,
                NodeKind::Not => 1,
                _ => 2,
            };
            specs.insert(
                kind,
                FuSpec {
                    name: kind.name().to_string(),
                    latency: 1,
                    area,
                },
            );
        }
        ResourceLibrary { specs }
    }

    pub fn with_latency(mut self, kind: NodeKind, latency: u32) -> Self {
        assert!(latency >= 1, "latencies must be at least one cycle");
        self.specs
            .get_mut(&kind)
            .expect("library covers all operation kinds")
            .latency = latency;
        self
    }

    pub fn latency(&self, kind: NodeKind) -> u32 {
        self.specs[&kind].latency
    }

    pub fn area(&self, kind: NodeKind) -> u32 {
        self.specs[&kind].area
    }

    pub fn latencies(&self) -> BTreeMap<NodeKind, u32> {
        self.specs.iter().map(|(&k, s)| (k, s.latency)).collect()
    }
}

impl Default for ResourceLibrary {
    fn default() -> Self {
        ResourceLibrary::unit()
    }
}

/// Instance counts per operation kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Allocation {
    counts: BTreeMap<NodeKind, u32>,
}

impl Allocation {
    pub fn new() -> Self {
        Allocation::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (NodeKind, u32)>) -> Self {
        Allocation {
            counts: pairs.into_iter().collect(),
        }
    }

    pub fn set(&mut self, kind: NodeKind, count: u32) {
        self.counts.insert(kind, count);
    }

    pub fn count(&self, kind: NodeKind) -> u32 {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeKind, u32)> + '_ {
        self.counts.iter().map(|(&k, &c)| (k, c))
    }

    /// The kinds used by `dfg` that this allocation does not cover.
    pub fn missing_kinds(&self, dfg: &Dfg) -> Vec<NodeKind> {
        let mut missing: Vec<NodeKind> = dfg
            .operation_nodes()
            .map(|n| n.kind)
            .filter(|&k| self.count(k) == 0)
            .collect();
        missing.sort();
        missing.dedup();
        missing
    }
}

/// A control-step assignment for every operation node, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    starts: BTreeMap<NodeId, u32>,
    pub length: u32,
}

impl Schedule {
    pub fn new(starts: BTreeMap<NodeId, u32>, length: u32) -> Self {
        Schedule { starts, length }
    }

    pub fn start(&self, id: NodeId) -> u32 {
        self.starts[&id]
    }

    pub fn get(&self, id: NodeId) -> Option<u32> {
        self.starts.get(&id).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.starts.iter().map(|(&id, &s)| (id, s))
    }

    pub fn len_ops(&self) -> usize {
        self.starts.len()
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum HlsError {
    #[error("deadline {deadline} is below the critical path of {critical_path} cycles")]
    Deadline { deadline: u32, critical_path: u32 },
    #[error("no resource allocated for kind `{kind}`")]
    MissingResource { kind: &'static str },
    #[error("infeasible binding: {0}")]
    InfeasibleBinding(String),
}
