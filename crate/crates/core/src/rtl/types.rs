// SPDX-License-Identifier: Apache-2.0

//! RT-level design structure: a word-level datapath of functional units,
//! registers, and muxes, driven by a linear-chain FSM controller.
//!
//! Conventions: single rising clock edge, synchronous active-high reset,
//! a `start` pulse sampled in the idle state, and a level `done` signal
//! held until the next start. Inputs must stay stable from start to done.
//! Outputs are registered in the final step.

use serde::Serialize;

use crate::dfg::NodeKind;
use crate::frontend::PortDecl;
use crate::hls::ValueSource;

/// Driver of a functional-unit operand port or register write port.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PortFeed {
    Direct(ValueSource),
    /// Index into [`RtlDesign::muxes`].
    Mux(usize),
}

/// A bound functional-unit instance. Units with latency 2 or more latch
/// their operands in the start step and present the result at the end of
/// the finish step.
#[derive(Debug, Clone, Serialize)]
pub struct Fu {
    pub kind: NodeKind,
    /// 1-based instance index within the kind.
    pub instance: u32,
    pub width: u32,
    pub latency: u32,
    pub operand_feeds: Vec<PortFeed>,
}

/// A multiplexer feeding one port. The select value is an index into
/// `inputs`.
#[derive(Debug, Clone, Serialize)]
pub struct Mux {
    pub width: u32,
    pub inputs: Vec<ValueSource>,
    pub select_width: u32,
}

/// A shared datapath register holding intermediate values.
#[derive(Debug, Clone, Serialize)]
pub struct DataRegister {
    /// 1-based index from register binding.
    pub index: u32,
    pub width: u32,
    pub feed: PortFeed,
}

/// Output-port register, loaded in the final step (or on start for
/// zero-step designs).
#[derive(Debug, Clone, Serialize)]
pub struct OutputRegister {
    pub name: String,
    pub width: u32,
    pub feed: PortFeed,
}

/// Per-state control word. The layout (and so the rendered word width) is
/// identical across states: mux selects, register enables, capture
/// enables, output enables, done.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ControlWord {
    pub mux_selects: Vec<u32>,
    pub reg_enables: Vec<bool>,
    pub fu_captures: Vec<bool>,
    pub out_enables: Vec<bool>,
    pub done: bool,
}

impl ControlWord {
    pub fn zeroed(muxes: usize, regs: usize, captures: usize, outs: usize) -> ControlWord {
        ControlWord {
            mux_selects: vec![0; muxes],
            reg_enables: vec![false; regs],
            fu_captures: vec![false; captures],
            out_enables: vec![false; outs],
            done: false,
        }
    }

    /// Renders the word as a bit string in layout order, for traces.
    pub fn bits(&self, muxes: &[Mux]) -> String {
        let mut out = String::new();
        for (select, mux) in self.mux_selects.iter().zip(muxes) {
            for bit in (0..mux.select_width).rev() {
                out.push(if select >> bit & 1 == 1 { '1' } else { '0' });
            }
        }
        for &enable in self
            .reg_enables
            .iter()
            .chain(&self.fu_captures)
            .chain(&self.out_enables)
        {
            out.push(if enable { '1' } else { '0' });
        }
        out.push(if self.done { '1' } else { '0' });
        out
    }
}

/// Linear-chain controller: state 0 is idle, states `1..=length` are the
/// control steps. The done flag of the final step's word is asserted on
/// the transition back to idle and held.
#[derive(Debug, Clone, Serialize)]
pub struct ControllerFsm {
    pub state_count: u32,
    pub state_bits: u32,
    /// Indexed by state; `words[0]` is the idle word.
    pub words: Vec<ControlWord>,
    pub control_word_width: u32,
}

#[derive(Debug, Clone, Serialize)]
pub struct RtlDesign {
    pub name: String,
    pub ports: Vec<PortDecl>,
    pub schedule_length: u32,
    pub fus: Vec<Fu>,
    pub muxes: Vec<Mux>,
    pub registers: Vec<DataRegister>,
    pub output_regs: Vec<OutputRegister>,
    pub controller: ControllerFsm,
}

/// Deterministic structure counts for reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RtlStats {
    pub fu_count: u32,
    /// Total bits of shared datapath registers (output registers not
    /// included).
    pub register_bits: u32,
    pub mux_inputs: u32,
    pub state_count: u32,
}

/// Mux select width for `n` inputs.
pub fn select_width(inputs: usize) -> u32 {
    match inputs {
        0 | 1 => 0,
        n => (n - 1).ilog2() + 1,
    }
}

/// Structure counts of a design.
pub fn rtl_stats(design: &RtlDesign) -> RtlStats {
    RtlStats {
        fu_count: design.fus.len() as u32,
        register_bits: design.registers.iter().map(|r| r.width).sum(),
        mux_inputs: design.muxes.iter().map(|m| m.inputs.len() as u32).sum(),
        state_count: design.controller.state_count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn select_widths() {
        assert_eq!(select_width(1), 0);
        assert_eq!(select_width(2), 1);
        assert_eq!(select_width(3), 2);
        assert_eq!(select_width(4), 2);
        assert_eq!(select_width(5), 3);
    }
}
