// SPDX-License-Identifier: Apache-2.0

//! Two-level logic synthesis: truth tables, Quine–McCluskey minimization,
//! gate netlists, technology mapping, and equivalence checking.

mod cover;
mod equiv;
mod mapping;
mod netlist;
mod table;

pub use cover::{canonical_sop, minimize, qm_primes, select_cover, Implicant, SopCover};
pub use equiv::{check_against_table, check_equivalence, EquivResult, MAX_EQUIV_INPUTS};
pub use mapping::{limit_fanin2, map_to_library, MapTarget};
pub use netlist::{
    eval_netlist, half_adder_netlist, merge_netlists, sop_to_aoi_netlist, Evaluator, Gate,
    GateNetlist, GateOp, NetNamer, NetRef, OutputBinding,
};
pub use table::{TruthTable, MAX_MINIMIZE_INPUTS, MAX_TABLE_INPUTS};

/// Errors raised by logic synthesis and equivalence checking.
#[derive(Debug, Clone, thiserror::Error)]
pub enum LogicError {
    #[error("{inputs} inputs exceed the supported limit of {limit}")]
    Size { inputs: usize, limit: usize },
    #[error("unknown output `{0}`")]
    UnknownOutput(String),
    #[error("invalid netlist: {0}")]
    Invalid(String),
    #[error("interface mismatch: {0}")]
    MismatchedInterfaces(String),
}

/// Per-output (name, canonical products, minimized products) counts.
pub type MinimizeStats = Vec<(String, usize, usize)>;

/// Minimizes every output of a table and assembles one merged AOI
/// netlist. Returns the netlist and per-output (canonical, minimized)
/// product counts for reporting.
pub fn minimize_table(
    table: &TruthTable,
    name: &str,
) -> Result<(GateNetlist, MinimizeStats), LogicError> {
    let mut parts = Vec::new();
    let mut stats = Vec::new();
    for output in table.outputs() {
        let canonical = canonical_sop(table, output);
        let minimized = minimize(table, output)?;
        stats.push((
            output.clone(),
            canonical.product_count(),
            minimized.product_count(),
        ));
        parts.push(sop_to_aoi_netlist(&minimized, table.inputs(), output));
    }
    let mut merged = merge_netlists(name, &parts);
    merged.inputs = table.inputs().to_vec();
    Ok((merged, stats))
}
