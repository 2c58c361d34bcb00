// SPDX-License-Identifier: Apache-2.0

//! Cycle-accurate execution of an RT-level design, driven purely by the
//! datapath structure and per-state control words. Functional-unit
//! arithmetic here is implemented independently of the interpreter so
//! co-simulation cross-checks the two paths.

use std::collections::BTreeMap;

use crate::dfg::NodeKind;
use crate::frontend::Direction;
use crate::hls::ValueSource;
use crate::rtl::{PortFeed, RtlDesign};
use crate::width_mask;

use super::{SimError, SimResult, TraceCycle};

fn apply_fu(kind: NodeKind, width: u32, operands: &[u64]) -> u64 {
    let mask = width_mask(width);
    let a = operands[0];
    let b = operands.get(1).copied().unwrap_or(0);
    match kind {
        NodeKind::Add => a.wrapping_add(b) & mask,
        NodeKind::Sub => a.wrapping_sub(b) & mask,
        NodeKind::Mul => a.wrapping_mul(b) & mask,
        NodeKind::And => a & b,
        NodeKind::Or => a | b,
        NodeKind::Xor => a ^ b,
        NodeKind::Not => !a & mask,
        NodeKind::Shl => {
            if b >= 64 {
                0
            } else {
                (a << b) & mask
            }
        }
        NodeKind::Shr => {
            if b >= 64 {
                0
            } else {
                a >> b
            }
        }
        other => unreachable!("{} is not a functional unit", other.name()),
    }
}

struct Machine<'a> {
    design: &'a RtlDesign,
    ports: BTreeMap<String, u64>,
    registers: Vec<u64>,
    captured: Vec<Vec<u64>>,
    output_regs: Vec<u64>,
    state: u32,
    done: bool,
}

impl<'a> Machine<'a> {
    fn resolve(&self, source: &ValueSource, fu_outs: Option<&[u64]>) -> u64 {
        match source {
            ValueSource::Port { name, width } => self.ports[name] & width_mask(*width),
            ValueSource::Const { value, .. } => *value,
            ValueSource::Register { index, width } => {
                let pos = self
                    .design
                    .registers
                    .iter()
                    .position(|r| r.index == *index)
                    .expect("bound register exists");
                self.registers[pos] & width_mask(*width)
            }
            ValueSource::FuOutput {
                kind,
                instance,
                width,
            } => {
                let outs = fu_outs.expect("functional units feed only registers");
                let pos = self
                    .design
                    .fus
                    .iter()
                    .position(|fu| fu.kind == *kind && fu.instance == *instance)
                    .expect("bound unit exists");
                outs[pos] & width_mask(*width)
            }
        }
    }

    fn resolve_feed(&self, feed: &PortFeed, selects: &[u32], fu_outs: Option<&[u64]>) -> u64 {
        match feed {
            PortFeed::Direct(source) => self.resolve(source, fu_outs),
            PortFeed::Mux(index) => {
                let mux = &self.design.muxes[*index];
                let select = selects[*index] as usize;
                self.resolve(&mux.inputs[select], fu_outs)
            }
        }
    }

    /// One clock cycle from the current state. Returns the state that was
    /// active, for tracing.
    fn step(&mut self, start: bool) -> u32 {
        let active = self.state;
        let word = &self.design.controller.words[active as usize];
        let length = self.design.schedule_length;

        // Combinational phase: operand values, then unit outputs.
        let operand_values: Vec<Vec<u64>> = self
            .design
            .fus
            .iter()
            .map(|fu| {
                fu.operand_feeds
                    .iter()
                    .map(|feed| self.resolve_feed(feed, &word.mux_selects, None))
                    .collect()
            })
            .collect();
        let fu_outs: Vec<u64> = self
            .design
            .fus
            .iter()
            .enumerate()
            .map(|(pos, fu)| {
                if fu.latency >= 2 {
                    apply_fu(fu.kind, fu.width, &self.captured[pos])
                } else {
                    apply_fu(fu.kind, fu.width, &operand_values[pos])
                }
            })
            .collect();

        // Clock edge.
        let fire = active != 0 || (start && length == 0);
        if fire {
            let mut capture_slot = 0;
            for (pos, fu) in self.design.fus.iter().enumerate() {
                if fu.latency >= 2 {
                    if word.fu_captures[capture_slot] {
                        self.captured[pos] = operand_values[pos].clone();
                    }
                    capture_slot += 1;
                }
            }
            for (pos, register) in self.design.registers.iter().enumerate() {
                if word.reg_enables[pos] {
                    self.registers[pos] =
                        self.resolve_feed(&register.feed, &word.mux_selects, Some(&fu_outs));
                }
            }
            for (pos, out) in self.design.output_regs.iter().enumerate() {
                if word.out_enables[pos] {
                    self.output_regs[pos] =
                        self.resolve_feed(&out.feed, &word.mux_selects, Some(&fu_outs));
                }
            }
        }

        // State transition and done.
        if active == 0 {
            if start {
                if length == 0 {
                    self.done = true;
                } else {
                    self.done = false;
                    self.state = 1;
                }
            }
        } else if active == length {
            self.done = word.done;
            self.state = 0;
        } else {
            self.state = active + 1;
        }
        active
    }
}

/// Runs a design from reset through start to done and samples the
/// outputs. Reported cycles are the datapath control steps (the schedule
/// length); the start dispatch adds one cycle of wall time.
pub fn simulate_rtl(
    design: &RtlDesign,
    inputs: &BTreeMap<String, u64>,
) -> Result<SimResult, SimError> {
    simulate_rtl_traced(design, inputs, false)
}

/// As [`simulate_rtl`], optionally capturing a per-cycle trace.
pub fn simulate_rtl_traced(
    design: &RtlDesign,
    inputs: &BTreeMap<String, u64>,
    capture_trace: bool,
) -> Result<SimResult, SimError> {
    for port in design.ports.iter().filter(|p| p.direction == Direction::In) {
        match inputs.get(&port.name) {
            None => {
                return Err(SimError::Input(format!(
                    "missing value for input `{}`",
                    port.name
                )))
            }
            Some(&value) if value > width_mask(port.width) => {
                return Err(SimError::Input(format!(
                    "value {value} does not fit input `{}` of width {}",
                    port.name, port.width
                )));
            }
            _ => {}
        }
    }
    for name in inputs.keys() {
        if !design
            .ports
            .iter()
            .any(|p| p.direction == Direction::In && &p.name == name)
        {
            return Err(SimError::Input(format!("`{name}` is not an input port")));
        }
    }

    let mut machine = Machine {
        design,
        ports: inputs.clone(),
        registers: vec![0; design.registers.len()],
        captured: design
            .fus
            .iter()
            .map(|fu| vec![0; fu.operand_feeds.len()])
            .collect(),
        output_regs: vec![0; design.output_regs.len()],
        state: 0,
        done: false,
    };

    let mut trace = capture_trace.then(Vec::new);
    let limit = 10 * (design.schedule_length + 2);
    let mut started = false;
    for cycle in 0..limit {
        let start = !started;
        started = true;
        let active = machine.step(start);
        if let Some(trace) = trace.as_mut() {
            trace.push(TraceCycle {
                cycle,
                state: active,
                registers: machine.registers.clone(),
                control_word: design.controller.words[active as usize].bits(&design.muxes),
            });
        }
        if machine.done {
            let outputs = design
                .output_regs
                .iter()
                .enumerate()
                .map(|(pos, out)| (out.name.clone(), machine.output_regs[pos]))
                .collect();
            return Ok(SimResult {
                outputs,
                cycles: design.schedule_length,
                trace,
            });
        }
    }
    Err(SimError::Watchdog { limit })
}
