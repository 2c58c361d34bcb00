// SPDX-License-Identifier: Apache-2.0

//! Exhaustive combinational equivalence checking.

use std::collections::BTreeMap;

use super::netlist::{Evaluator, GateNetlist};
use super::table::TruthTable;
use super::LogicError;

/// Inputs stay exhaustively enumerable.
pub const MAX_EQUIV_INPUTS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivResult {
    Equivalent,
    /// The lexicographically smallest differing assignment, over input
    /// names in sorted order (all-zeros first).
    Counterexample(BTreeMap<String, bool>),
}

fn sorted_inputs(netlist: &GateNetlist) -> Vec<String> {
    let mut names = netlist.inputs.clone();
    names.sort();
    names
}

fn assignment_bits(names: &[String], index: u32) -> BTreeMap<String, bool> {
    let n = names.len();
    names
        .iter()
        .enumerate()
        .map(|(j, name)| (name.clone(), (index >> (n - 1 - j)) & 1 == 1))
        .collect()
}

/// Compares two netlists over all `2^n` assignments. Both must expose the
/// same primary input and output name sets.
pub fn check_equivalence(a: &GateNetlist, b: &GateNetlist) -> Result<EquivResult, LogicError> {
    let names = sorted_inputs(a);
    if names != sorted_inputs(b) {
        return Err(LogicError::MismatchedInterfaces(
            "primary inputs differ".to_string(),
        ));
    }
    let mut outputs_a: Vec<&str> = a.outputs.iter().map(|o| o.name.as_str()).collect();
    let mut outputs_b: Vec<&str> = b.outputs.iter().map(|o| o.name.as_str()).collect();
    outputs_a.sort();
    outputs_b.sort();
    if outputs_a != outputs_b {
        return Err(LogicError::MismatchedInterfaces(
            "primary outputs differ".to_string(),
        ));
    }
    if names.len() > MAX_EQUIV_INPUTS {
        return Err(LogicError::Size {
            inputs: names.len(),
            limit: MAX_EQUIV_INPUTS,
        });
    }

    let eval_a = Evaluator::new(a)?;
    let eval_b = Evaluator::new(b)?;
    // Map sorted-name bit positions onto each netlist's input order.
    let position = |netlist: &GateNetlist| -> Vec<usize> {
        netlist
            .inputs
            .iter()
            .map(|i| names.iter().position(|n| n == i).unwrap())
            .collect()
    };
    let pos_a = position(a);
    let pos_b = position(b);
    let out_pos_b: Vec<usize> = a
        .outputs
        .iter()
        .map(|o| b.outputs.iter().position(|p| p.name == o.name).unwrap())
        .collect();

    let n = names.len();
    for index in 0..1u64 << n {
        let bits: Vec<bool> = (0..n).map(|j| (index >> (n - 1 - j)) & 1 == 1).collect();
        let in_a: Vec<bool> = pos_a.iter().map(|&p| bits[p]).collect();
        let in_b: Vec<bool> = pos_b.iter().map(|&p| bits[p]).collect();
        let va = eval_a.eval(&in_a);
        let vb = eval_b.eval(&in_b);
        for (i, &bi) in out_pos_b.iter().enumerate() {
            if va[i] != vb[bi] {
                return Ok(EquivResult::Counterexample(assignment_bits(
                    &names,
                    index as u32,
                )));
            }
        }
    }
    Ok(EquivResult::Equivalent)
}

/// Compares a netlist against a truth table over all rows. The netlist's
/// input and output names must match the table's.
pub fn check_against_table(
    netlist: &GateNetlist,
    table: &TruthTable,
) -> Result<EquivResult, LogicError> {
    let mut table_inputs: Vec<String> = table.inputs().to_vec();
    table_inputs.sort();
    if sorted_inputs(netlist) != table_inputs {
        return Err(LogicError::MismatchedInterfaces(
            "primary inputs differ from table".to_string(),
        ));
    }
    for output in &netlist.outputs {
        if table.output_index(&output.name).is_none() {
            return Err(LogicError::MismatchedInterfaces(format!(
                "table lacks output `{}`",
                output.name
            )));
        }
    }
    if netlist.outputs.len() != table.outputs().len() {
        return Err(LogicError::MismatchedInterfaces(
            "primary outputs differ from table".to_string(),
        ));
    }

    let evaluator = Evaluator::new(netlist)?;
    // Table rows index inputs in table order; remap to netlist order.
    let pos: Vec<usize> = netlist
        .inputs
        .iter()
        .map(|i| table.inputs().iter().position(|n| n == i).unwrap())
        .collect();
    for minterm in 0..table.row_count() {
        let row: Vec<bool> = (0..table.input_count())
            .map(|j| table.input_bit(minterm, j))
            .collect();
        let input_values: Vec<bool> = pos.iter().map(|&p| row[p]).collect();
        let values = evaluator.eval(&input_values);
        for (output, value) in netlist.outputs.iter().zip(values) {
            if value != table.value(&output.name, minterm) {
                let names: Vec<String> = {
                    let mut v = table.inputs().to_vec();
                    v.sort();
                    v
                };
                // Re-index the counterexample by sorted names.
                let assignment = names
                    .iter()
                    .map(|name| {
                        let p = table.inputs().iter().position(|n| n == name).unwrap();
                        (name.clone(), row[p])
                    })
                    .collect();
                return Ok(EquivResult::Counterexample(assignment));
            }
        }
    }
    Ok(EquivResult::Equivalent)
}

#[cfg(test)]
mod tests {
    use super::super::netlist::{half_adder_netlist, Gate, GateOp, NetRef, OutputBinding};
    use super::*;

    fn one_gate(op: GateOp) -> GateNetlist {
        GateNetlist {
            name: "g".into(),
            inputs: vec!["a".into(), "b".into()],
            outputs: vec![OutputBinding {
                name: "y".into(),
                driver: NetRef::Net("y".into()),
            }],
            gates: vec![Gate {
                op,
                inputs: vec!["a".into(), "b".into()],
                output: "y".into(),
            }],
        }
    }

    #[test]
    fn and_vs_or_counterexample_is_zero_one() {
        let result = check_equivalence(&one_gate(GateOp::And), &one_gate(GateOp::Or)).unwrap();
        match result {
            EquivResult::Counterexample(assignment) => {
                assert!(!assignment["a"]);
                assert!(assignment["b"]);
            }
            EquivResult::Equivalent => panic!("and and or are not equivalent"),
        }
    }

    #[test]
    fn netlist_is_equivalent_to_itself() {
        let netlist = half_adder_netlist();
        assert!(matches!(
            check_equivalence(&netlist, &netlist).unwrap(),
            EquivResult::Equivalent
        ));
    }

    #[test]
    fn canonical_and_minimized_majority_are_equivalent() {
        use super::super::cover::{canonical_sop, minimize};
        use super::super::netlist::sop_to_aoi_netlist;
        use super::super::table::TruthTable;
        let table = TruthTable::from_minterms(&["A", "B", "C"], "F", &[3, 5, 6, 7]).unwrap();
        let canonical = sop_to_aoi_netlist(&canonical_sop(&table, "F"), table.inputs(), "F");
        let minimized = sop_to_aoi_netlist(&minimize(&table, "F").unwrap(), table.inputs(), "F");
        assert!(matches!(
            check_equivalence(&canonical, &minimized).unwrap(),
            EquivResult::Equivalent
        ));
    }

    #[test]
    fn interface_mismatch_is_an_error() {
        let a = one_gate(GateOp::And);
        let mut b = one_gate(GateOp::And);
        b.inputs = vec!["a".into(), "c".into()];
        b.gates[0].inputs = vec!["a".into(), "c".into()];
        assert!(check_equivalence(&a, &b).is_err());
    }

    #[test]
    fn size_limit_is_enforced() {
        let inputs: Vec<String> = (0..17).map(|i| format!("x{i:02}")).collect();
        let mut netlist = GateNetlist::new("wide");
        netlist.inputs = inputs.clone();
        netlist.outputs = vec![OutputBinding {
            name: "y".into(),
            driver: NetRef::Net("y".into()),
        }];
        netlist.gates = vec![Gate {
            op: GateOp::And,
            inputs,
            output: "y".into(),
        }];
        assert!(matches!(
            check_equivalence(&netlist, &netlist),
            Err(LogicError::Size { inputs: 17, .. })
        ));
    }

    #[test]
    fn table_comparison_detects_mismatch() {
        use super::super::table::TruthTable;
        let netlist = one_gate(GateOp::And);
        let and_table = TruthTable::from_minterms(&["a", "b"], "y", &[3]).unwrap();
        assert!(matches!(
            check_against_table(&netlist, &and_table).unwrap(),
            EquivResult::Equivalent
        ));
        let or_table = TruthTable::from_minterms(&["a", "b"], "y", &[1, 2, 3]).unwrap();
        match check_against_table(&netlist, &or_table).unwrap() {
            EquivResult::Counterexample(assignment) => {
                assert_eq!((assignment["a"], assignment["b"]), (false, true));
            }
            EquivResult::Equivalent => panic!("and is not or"),
        }
    }
}
