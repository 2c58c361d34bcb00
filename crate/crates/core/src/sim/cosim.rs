// SPDX-License-Identifier: Apache-2.0

//! Co-simulation: the interpreter and the RTL simulation must agree on
//! every output value for every vector. Cycle counts are separate metrics
//! per timing model and are never compared to each other.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::frontend::Program;
use crate::rtl::RtlDesign;
use crate::width_mask;

use super::interp::interpret;
use super::rng::SplitMix64;
use super::rtl_sim::simulate_rtl;
use super::SimError;

#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub inputs: BTreeMap<String, u64>,
    pub interpreted: BTreeMap<String, u64>,
    pub simulated: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CosimReport {
    pub trials: u32,
    /// Vectors actually run: the two corner vectors plus `trials`.
    pub vectors: u32,
    pub source_cycles: u32,
    pub rtl_cycles: u32,
    pub mismatches: Vec<Mismatch>,
}

impl CosimReport {
    pub fn pass(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Runs `trials` seeded pseudo-random vectors plus the all-zeros and
/// all-max corners through both execution models.
pub fn cosim(
    program: &Program,
    design: &RtlDesign,
    trials: u32,
    seed: u64,
) -> Result<CosimReport, SimError> {
    let input_ports: Vec<(String, u32)> = program
        .input_ports()
        .map(|p| (p.name.clone(), p.width))
        .collect();

    let mut vectors: Vec<BTreeMap<String, u64>> = Vec::with_capacity(trials as usize + 2);
    vectors.push(input_ports.iter().map(|(n, _)| (n.clone(), 0)).collect());
    vectors.push(
        input_ports
            .iter()
            .map(|(n, w)| (n.clone(), width_mask(*w)))
            .collect(),
    );
    let mut rng = SplitMix64::new(seed);
    for _ in 0..trials {
        vectors.push(
            input_ports
                .iter()
                .map(|(n, w)| (n.clone(), rng.next_u64() & width_mask(*w)))
                .collect(),
        );
    }

    let mut mismatches = Vec::new();
    let mut source_cycles = 0;
    let mut rtl_cycles = 0;
    for inputs in &vectors {
        let interpreted = interpret(program, inputs)?;
        let simulated = simulate_rtl(design, inputs)?;
        source_cycles = interpreted.cycles;
        rtl_cycles = simulated.cycles;
        if interpreted.outputs != simulated.outputs {
            mismatches.push(Mismatch {
                inputs: inputs.clone(),
                interpreted: interpreted.outputs,
                simulated: simulated.outputs,
            });
        }
    }
    Ok(CosimReport {
        trials,
        vectors: vectors.len() as u32,
        source_cycles,
        rtl_cycles,
        mismatches,
    })
}
