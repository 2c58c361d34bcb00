// SPDX-License-Identifier: Apache-2.0

//! Text emission: Verilog subset, structural VHDL, PLA tables, and the
//! reader for the tool's own emitted gate-instantiation subset.
//!
//! All emitters are deterministic: identical inputs yield byte-identical
//! text. Emitted HDL files start with a fixed header comment carrying the
//! tool name, version, and a hash of the serialized input.

mod pla;
mod reader;
mod verilog;
mod vhdl;

pub use pla::{read_pla, write_pla};
pub use reader::read_verilog_netlist;
pub use verilog::{emit_verilog_netlist, emit_verilog_rtl};
pub use vhdl::{emit_vhdl_rtl, emit_vhdl_structural};

use sha2::{Digest, Sha256};

use crate::{TOOL_NAME, TOOL_VERSION};

#[derive(Debug, Clone, thiserror::Error)]
pub enum EmitError {
    #[error("gate `{gate}` has fan-in {inputs}; structural VHDL needs at most 2")]
    FanIn { gate: String, inputs: usize },
    #[error("PLA format error at line {line}: {message}")]
    PlaFormat { line: usize, message: String },
    #[error("{inputs} inputs exceed the PLA writer limit of {limit}")]
    TooManyInputs { inputs: usize, limit: usize },
    #[error("verilog reader error at line {line}: {message}")]
    VerilogFormat { line: usize, message: String },
}

/// Header comment line: `<lead> bdlc <version> sha256:<hash16>`.
pub(crate) fn header_line(lead: &str, payload: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(payload.as_bytes());
    let digest = hasher.finalize();
    let hash16: String = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
    format!("{lead} {TOOL_NAME} {TOOL_VERSION} sha256:{hash16}\n")
}

/// BDL identifiers are already legal HDL identifiers; the name table only
/// resolves collisions with reserved words and generated names by
/// suffixing, deterministically.
pub(crate) struct NameTable {
    used: std::collections::BTreeSet<String>,
    case_insensitive: bool,
}

impl NameTable {
    pub fn new(reserved: &[&str], case_insensitive: bool) -> NameTable {
        let used = reserved
            .iter()
            .map(|s| {
                if case_insensitive {
                    s.to_ascii_lowercase()
                } else {
                    s.to_string()
                }
            })
            .collect();
        NameTable {
            used,
            case_insensitive,
        }
    }

    fn key(&self, name: &str) -> String {
        if self.case_insensitive {
            name.to_ascii_lowercase()
        } else {
            name.to_string()
        }
    }

    /// Claims `name`, suffixing until free.
    pub fn claim(&mut self, name: &str) -> String {
        if self.used.insert(self.key(name)) {
            return name.to_string();
        }
        for suffix in 0.. {
            let candidate = format!("{name}_v{suffix}");
            if self.used.insert(self.key(&candidate)) {
                return candidate;
            }
        }
        unreachable!()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_deterministic_and_hash_tied() {
        let a = header_line("//", "payload");
        let b = header_line("//", "payload");
        let c = header_line("//", "other");
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.starts_with("// bdlc "));
    }

    #[test]
    fn name_table_suffixes_collisions() {
        let mut table = NameTable::new(&["done"], false);
        assert_eq!(table.claim("a"), "a");
        assert_eq!(table.claim("done"), "done_v0");
        assert_eq!(table.claim("a"), "a_v0");
    }

    #[test]
    fn vhdl_names_collide_case_insensitively() {
        let mut table = NameTable::new(&[], true);
        assert_eq!(table.claim("Sig"), "Sig");
        assert_eq!(table.claim("sig"), "sig_v0");
    }
}
