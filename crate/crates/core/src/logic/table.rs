// SPDX-License-Identifier: Apache-2.0

//! Truth tables as per-output minterm sets. The first input name is the
//! most significant bit of a minterm index.

use std::collections::BTreeSet;

use super::LogicError;

/// Inputs stay small enough for exhaustive row enumeration.
pub const MAX_TABLE_INPUTS: usize = 16;
/// Minimization works on tables of at most this many inputs.
pub const MAX_MINIMIZE_INPUTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    inputs: Vec<String>,
    outputs: Vec<String>,
    on_sets: Vec<BTreeSet<u32>>,
}

impl TruthTable {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>) -> Result<TruthTable, LogicError> {
        if inputs.len() > MAX_TABLE_INPUTS {
            return Err(LogicError::Size {
                inputs: inputs.len(),
                limit: MAX_TABLE_INPUTS,
            });
        }
        let mut seen = BTreeSet::new();
        for name in inputs.iter().chain(outputs.iter()) {
            if !seen.insert(name.clone()) {
                return Err(LogicError::Invalid(format!(
                    "duplicate signal name `{name}`"
                )));
            }
        }
        let on_sets = vec![BTreeSet::new(); outputs.len()];
        Ok(TruthTable {
            inputs,
            outputs,
            on_sets,
        })
    }

    /// Single-output table from a minterm list.
    pub fn from_minterms(
        inputs: &[&str],
        output: &str,
        minterms: &[u32],
    ) -> Result<TruthTable, LogicError> {
        let mut table = TruthTable::new(
            inputs.iter().map(|s| s.to_string()).collect(),
            vec![output.to_string()],
        )?;
        for &m in minterms {
            table.set_minterm(output, m)?;
        }
        Ok(table)
    }

    pub fn inputs(&self) -> &[String] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[String] {
        &self.outputs
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn row_count(&self) -> u32 {
        1u32 << self.inputs.len()
    }

    pub fn output_index(&self, name: &str) -> Option<usize> {
        self.outputs.iter().position(|o| o == name)
    }

    /// Marks row `minterm` of `output` as 1.
    pub fn set_minterm(&mut self, output: &str, minterm: u32) -> Result<(), LogicError> {
        if minterm >= self.row_count() {
            return Err(LogicError::Invalid(format!(
                "minterm {minterm} out of range for {} inputs",
                self.inputs.len()
            )));
        }
        let index = self
            .output_index(output)
            .ok_or_else(|| LogicError::UnknownOutput(output.to_string()))?;
        self.on_sets[index].insert(minterm);
        Ok(())
    }

    pub fn on_set(&self, output: &str) -> &BTreeSet<u32> {
        let index = self.output_index(output).expect("output exists");
        &self.on_sets[index]
    }

    /// Value of `output` on row `minterm`.
    pub fn value(&self, output: &str, minterm: u32) -> bool {
        self.on_set(output).contains(&minterm)
    }

    /// Bit of input position `j` (0 = first input, most significant) in a
    /// minterm index.
    pub fn input_bit(&self, minterm: u32, position: usize) -> bool {
        (minterm >> (self.inputs.len() - 1 - position)) & 1 == 1
    }
}

/// The three-variable majority function over (A, B, C): 1 when at least
/// two inputs are 1. Used widely in tests.
#[cfg(test)]
pub fn majority_table() -> TruthTable {
    TruthTable::from_minterms(&["A", "B", "C"], "F", &[3, 5, 6, 7]).unwrap()
}
