// SPDX-License-Identifier: Apache-2.0

//! Execution at three levels: behavioral interpretation, cycle-accurate
//! RTL simulation, and gate-level evaluation (in [`crate::logic`]), plus
//! co-simulation campaigns across the first two.

mod cosim;
mod interp;
mod rng;
mod rtl_sim;

pub use cosim::{cosim, CosimReport, Mismatch};
pub use interp::{interpret, validate_inputs};
pub use rng::SplitMix64;
pub use rtl_sim::{simulate_rtl, simulate_rtl_traced};

use std::collections::BTreeMap;

/// Result of one simulation run. `cycles` means source cycles for the
/// interpreter (one per assignment) and datapath control steps for the
/// RTL simulation; the two metrics are never compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimResult {
    pub outputs: BTreeMap<String, u64>,
    pub cycles: u32,
    pub trace: Option<Vec<TraceCycle>>,
}

/// One line of the `--trace` dump.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceCycle {
    pub cycle: u32,
    /// Controller state active during the cycle (0 = idle).
    pub state: u32,
    /// Datapath register values after the clock edge.
    pub registers: Vec<u64>,
    /// Control word bits in layout order.
    pub control_word: String,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SimError {
    #[error("input error: {0}")]
    Input(String),
    #[error("watchdog expired after {limit} cycles without done")]
    Watchdog { limit: u32 },
}
