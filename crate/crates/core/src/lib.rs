// SPDX-License-Identifier: Apache-2.0

//! Compiler core for BDL, a small behavioral hardware description language.
//!
//! The pipeline mirrors a classic describe-and-synthesize flow:
//!
//! 1. [`frontend`] — lex, parse, and width-check `.bdl` sources.
//! 2. [`dfg`] — build a dataflow graph and run graph analyses.
//! 3. [`hls`] — schedule operations under resource constraints and bind
//!    them to functional-unit instances and registers.
//! 4. [`rtl`] — assemble the schedule and binding into an FSM-plus-datapath
//!    register-transfer design.
//! 5. [`logic`] — two-level minimization (Quine–McCluskey), gate netlists,
//!    technology mapping, and exhaustive equivalence checking.
//! 6. [`emit`] — Verilog-subset, structural-VHDL, PLA, and JSON writers.
//! 7. [`sim`] — behavioral interpretation, cycle-accurate RTL simulation,
//!    and co-simulation campaigns.

pub mod dfg;
pub mod emit;
pub mod frontend;
pub mod hls;
pub mod logic;
pub mod pipeline;
pub mod rtl;
pub mod sim;

/// Tool name used in emitted file headers.
pub const TOOL_NAME: &str = "bdlc";
/// Tool version used in emitted file headers and the CLI version string.
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// All-ones mask for a bit width in `[1, 64]`.
pub fn width_mask(width: u32) -> u64 {
    debug_assert!((1..=64).contains(&width), "width {width} out of range");
    if width == 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}
