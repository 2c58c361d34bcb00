// SPDX-License-Identifier: Apache-2.0

//! End-to-end synthesis driver: source text in, RT-level design out.

use crate::dfg::{build_dfg, strength_reduce, Dfg};
use crate::frontend::{check_widths, parse_source, FrontendError, Program};
use crate::hls::{
    auto_allocate, bind, build_report, estimate, list_schedule, Allocation, Binding, CostReport,
    HlsError, ResourceLibrary, Schedule, ScheduleReport,
};
use crate::rtl::{build_design, RtlDesign};

#[derive(Debug, Clone)]
pub enum AllocationChoice {
    /// Per-kind maximum concurrency of the ASAP schedule.
    Auto,
    Explicit(Allocation),
}

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub allocation: AllocationChoice,
    pub strength_reduce: bool,
    pub library: ResourceLibrary,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            allocation: AllocationChoice::Auto,
            strength_reduce: false,
            library: ResourceLibrary::unit(),
        }
    }
}

/// Everything the pipeline produces for one module.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub program: Program,
    pub dfg: Dfg,
    pub allocation: Allocation,
    pub schedule: Schedule,
    pub binding: Binding,
    pub design: RtlDesign,
    pub report: ScheduleReport,
    pub cost: CostReport,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Hls(#[from] HlsError),
}

/// Runs parse, width check, dataflow construction, scheduling, binding,
/// and RTL assembly.
pub fn synthesize(source: &str, options: &SynthOptions) -> Result<Synthesis, SynthesisError> {
    let program = parse_source(source)?;
    synthesize_program(program, options)
}

/// Same pipeline starting from an already-parsed program.
pub fn synthesize_program(
    program: Program,
    options: &SynthOptions,
) -> Result<Synthesis, SynthesisError> {
    let widths = check_widths(&program)?;
    let mut dfg = build_dfg(&program, &widths);
    if options.strength_reduce {
        strength_reduce(&mut dfg);
    }
    let allocation = match &options.allocation {
        AllocationChoice::Auto => auto_allocate(&dfg, &options.library),
        AllocationChoice::Explicit(allocation) => allocation.clone(),
    };
    let schedule = list_schedule(&dfg, &options.library, &allocation)?;
    let binding = bind(&dfg, &schedule, &allocation, &options.library)?;
    let design = build_design(
        &program.name,
        &program.ports,
        &dfg,
        &schedule,
        &binding,
        &options.library,
    );
    let report = build_report(&dfg, &schedule, &binding);
    let cost = estimate(&dfg, &schedule, &binding, &options.library);
    Ok(Synthesis {
        program,
        dfg,
        allocation,
        schedule,
        binding,
        design,
        report,
        cost,
    })
}
