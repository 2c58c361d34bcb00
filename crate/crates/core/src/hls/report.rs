// SPDX-License-Identifier: Apache-2.0

//! Schedule/binding report in the stable JSON shape used by golden tests:
//! `{steps:[{step, ops:[{node, kind, instance}]}], registers:[...], length}`.

use serde::{Deserialize, Serialize};

use crate::dfg::Dfg;

use super::{Binding, Schedule};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct OpReport {
    pub node: usize,
    pub kind: String,
    pub instance: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct StepReport {
    pub step: u32,
    pub ops: Vec<OpReport>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct RegisterReport {
    pub index: u32,
    pub width: u32,
    pub values: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ScheduleReport {
    pub steps: Vec<StepReport>,
    pub registers: Vec<RegisterReport>,
    pub length: u32,
}

pub fn build_report(dfg: &Dfg, schedule: &Schedule, binding: &Binding) -> ScheduleReport {
    let steps = (1..=schedule.length)
        .map(|step| {
            let mut ops: Vec<OpReport> = schedule
                .iter()
                .filter(|&(_, start)| start == step)
                .map(|(id, _)| OpReport {
                    node: id.0,
                    kind: dfg.node(id).kind.name().to_string(),
                    instance: binding.fu_bind[&id].index,
                })
                .collect();
            ops.sort_by_key(|op| op.node);
            StepReport { step, ops }
        })
        .collect();
    let registers = binding
        .register_indices()
        .into_iter()
        .map(|index| {
            let mut values = binding.values_in(index);
            values.sort_by_key(|&id| binding.lifetimes[&id].0);
            RegisterReport {
                index,
                width: values
                    .iter()
                    .map(|&id| dfg.node(id).width)
                    .max()
                    .unwrap_or(0),
                values: values.into_iter().map(|id| id.0).collect(),
            }
        })
        .collect();
    ScheduleReport {
        steps,
        registers,
        length: schedule.length,
    }
}
