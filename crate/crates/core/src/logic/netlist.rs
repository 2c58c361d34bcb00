// SPDX-License-Identifier: Apache-2.0

//! Gate-level netlists: structure, validation, evaluation, and the
//! AND-OR-Inverter construction from SOP covers.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::cover::SopCover;
use super::LogicError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateOp {
    And,
    Or,
    Not,
    Xor,
    Nand,
    Nor,
    Xnor,
}

impl GateOp {
    /// Verilog gate-primitive name.
    pub fn verilog_name(self) -> &'static str {
        match self {
            GateOp::And => "and",
            GateOp::Or => "or",
            GateOp::Not => "not",
            GateOp::Xor => "xor",
            GateOp::Nand => "nand",
            GateOp::Nor => "nor",
            GateOp::Xnor => "xnor",
        }
    }

    pub fn from_verilog_name(name: &str) -> Option<GateOp> {
        Some(match name {
            "and" => GateOp::And,
            "or" => GateOp::Or,
            "not" => GateOp::Not,
            "xor" => GateOp::Xor,
            "nand" => GateOp::Nand,
            "nor" => GateOp::Nor,
            "xnor" => GateOp::Xnor,
            _ => return None,
        })
    }

    /// Two-input VHDL component name (INV for the inverter).
    pub fn vhdl_component(self) -> &'static str {
        match self {
            GateOp::And => "AND2",
            GateOp::Or => "OR2",
            GateOp::Not => "INV",
            GateOp::Xor => "EXOR2",
            GateOp::Nand => "NAND2",
            GateOp::Nor => "NOR2",
            GateOp::Xnor => "XNOR2",
        }
    }

    pub fn eval(self, inputs: &[bool]) -> bool {
        match self {
            GateOp::And => inputs.iter().all(|&b| b),
            GateOp::Or => inputs.iter().any(|&b| b),
            GateOp::Not => !inputs[0],
            GateOp::Xor => inputs.iter().filter(|&&b| b).count() % 2 == 1,
            GateOp::Nand => !inputs.iter().all(|&b| b),
            GateOp::Nor => !inputs.iter().any(|&b| b),
            GateOp::Xnor => inputs.iter().filter(|&&b| b).count() % 2 == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gate {
    pub op: GateOp,
    pub inputs: Vec<String>,
    pub output: String,
}

/// Driver of a primary output: a named net or a constant. Constants
/// serialize as `$0`/`$1`, which cannot collide with identifiers.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum NetRef {
    Net(String),
    Const0,
    Const1,
}

impl Serialize for NetRef {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            NetRef::Net(name) => serializer.serialize_str(name),
            NetRef::Const0 => serializer.serialize_str("$0"),
            NetRef::Const1 => serializer.serialize_str("$1"),
        }
    }
}

impl<'de> Deserialize<'de> for NetRef {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Ok(match text.as_str() {
            "$0" => NetRef::Const0,
            "$1" => NetRef::Const1,
            _ => NetRef::Net(text),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputBinding {
    pub name: String,
    pub driver: NetRef,
}

/// A combinational gate-level netlist. Every net has exactly one driver
/// (a primary input or a gate output) and the gate graph is acyclic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateNetlist {
    pub name: String,
    pub inputs: Vec<String>,
    pub outputs: Vec<OutputBinding>,
    pub gates: Vec<Gate>,
}

impl GateNetlist {
    pub fn new(name: impl Into<String>) -> GateNetlist {
        GateNetlist {
            name: name.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            gates: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<(), LogicError> {
        let mut drivers: BTreeSet<&str> = BTreeSet::new();
        for input in &self.inputs {
            if !drivers.insert(input) {
                return Err(LogicError::Invalid(format!("duplicate input `{input}`")));
            }
        }
        for gate in &self.gates {
            let want = if gate.op == GateOp::Not { 1 } else { 2 };
            if (gate.op == GateOp::Not && gate.inputs.len() != 1)
                || (gate.op != GateOp::Not && gate.inputs.len() < want)
            {
                return Err(LogicError::Invalid(format!(
                    "gate `{}` has {} inputs",
                    gate.output,
                    gate.inputs.len()
                )));
            }
            if !drivers.insert(&gate.output) {
                return Err(LogicError::Invalid(format!(
                    "net `{}` has more than one driver",
                    gate.output
                )));
            }
        }
        for gate in &self.gates {
            for input in &gate.inputs {
                if !drivers.contains(input.as_str()) {
                    return Err(LogicError::Invalid(format!(
                        "gate `{}` reads undriven net `{input}`",
                        gate.output
                    )));
                }
            }
        }
        for output in &self.outputs {
            if let NetRef::Net(net) = &output.driver {
                if !drivers.contains(net.as_str()) {
                    return Err(LogicError::Invalid(format!(
                        "output `{}` reads undriven net `{net}`",
                        output.name
                    )));
                }
            }
        }
        self.topo_gate_order()?;
        Ok(())
    }

    /// Topological order over gate indices; errors on combinational
    /// cycles. Ready gates are taken in original index order.
    pub fn topo_gate_order(&self) -> Result<Vec<usize>, LogicError> {
        let producer: BTreeMap<&str, usize> = self
            .gates
            .iter()
            .enumerate()
            .map(|(i, g)| (g.output.as_str(), i))
            .collect();
        let inputs: BTreeSet<&str> = self.inputs.iter().map(String::as_str).collect();
        let mut order = Vec::with_capacity(self.gates.len());
        let mut state = vec![0u8; self.gates.len()]; // 0 new, 1 visiting, 2 done
        fn visit(
            index: usize,
            gates: &[Gate],
            producer: &BTreeMap<&str, usize>,
            inputs: &BTreeSet<&str>,
            state: &mut [u8],
            order: &mut Vec<usize>,
        ) -> Result<(), LogicError> {
            match state[index] {
                2 => return Ok(()),
                1 => {
                    return Err(LogicError::Invalid(format!(
                        "combinational cycle through net `{}`",
                        gates[index].output
                    )))
                }
                _ => {}
            }
            state[index] = 1;
            for net in &gates[index].inputs {
                if inputs.contains(net.as_str()) {
                    continue;
                }
                if let Some(&dep) = producer.get(net.as_str()) {
                    visit(dep, gates, producer, inputs, state, order)?;
                }
            }
            state[index] = 2;
            order.push(index);
            Ok(())
        }
        for index in 0..self.gates.len() {
            visit(
                index,
                &self.gates,
                &producer,
                &inputs,
                &mut state,
                &mut order,
            )?;
        }
        Ok(order)
    }

    /// Reorders gates topologically in place (emission order).
    pub fn sort_topologically(&mut self) -> Result<(), LogicError> {
        let order = self.topo_gate_order()?;
        self.gates = order.into_iter().map(|i| self.gates[i].clone()).collect();
        Ok(())
    }

    /// All net names in use.
    pub fn net_names(&self) -> BTreeSet<String> {
        let mut names: BTreeSet<String> = self.inputs.iter().cloned().collect();
        for gate in &self.gates {
            names.insert(gate.output.clone());
        }
        for output in &self.outputs {
            names.insert(output.name.clone());
        }
        names
    }
}

/// Fast repeated evaluation of one netlist.
pub struct Evaluator<'a> {
    netlist: &'a GateNetlist,
    order: Vec<usize>,
    net_index: BTreeMap<&'a str, usize>,
    /// Gate operand and output net indices, in `order` order.
    wiring: Vec<(Vec<usize>, usize)>,
    net_count: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(netlist: &'a GateNetlist) -> Result<Evaluator<'a>, LogicError> {
        let order = netlist.topo_gate_order()?;
        let mut net_index: BTreeMap<&str, usize> = BTreeMap::new();
        for input in &netlist.inputs {
            let next = net_index.len();
            net_index.insert(input, next);
        }
        for gate in &netlist.gates {
            let next = net_index.len();
            net_index.entry(&gate.output).or_insert(next);
        }
        let wiring = order
            .iter()
            .map(|&i| {
                let gate = &netlist.gates[i];
                let operands = gate
                    .inputs
                    .iter()
                    .map(|net| net_index[net.as_str()])
                    .collect();
                (operands, net_index[gate.output.as_str()])
            })
            .collect();
        let net_count = net_index.len();
        Ok(Evaluator {
            netlist,
            order,
            net_index,
            wiring,
            net_count,
        })
    }

    /// Evaluates with input values given in `netlist.inputs` order.
    pub fn eval(&self, input_values: &[bool]) -> Vec<bool> {
        debug_assert_eq!(input_values.len(), self.netlist.inputs.len());
        let mut values = vec![false; self.net_count];
        values[..input_values.len()].copy_from_slice(input_values);
        let mut operand_buf = Vec::with_capacity(4);
        for (gate_pos, &gate_index) in self.order.iter().enumerate() {
            let (operands, output) = &self.wiring[gate_pos];
            operand_buf.clear();
            operand_buf.extend(operands.iter().map(|&i| values[i]));
            values[*output] = self.netlist.gates[gate_index].op.eval(&operand_buf);
        }
        self.netlist
            .outputs
            .iter()
            .map(|out| match &out.driver {
                NetRef::Net(net) => values[self.net_index[net.as_str()]],
                NetRef::Const0 => false,
                NetRef::Const1 => true,
            })
            .collect()
    }
}

/// Evaluates a netlist on one input assignment, returning output values.
pub fn eval_netlist(
    netlist: &GateNetlist,
    assignment: &BTreeMap<String, bool>,
) -> Result<BTreeMap<String, bool>, LogicError> {
    let evaluator = Evaluator::new(netlist)?;
    let mut input_values = Vec::with_capacity(netlist.inputs.len());
    for input in &netlist.inputs {
        let value = assignment.get(input).ok_or_else(|| {
            LogicError::Invalid(format!("assignment misses primary input `{input}`"))
        })?;
        input_values.push(*value);
    }
    let outputs = evaluator.eval(&input_values);
    Ok(netlist
        .outputs
        .iter()
        .zip(outputs)
        .map(|(out, value)| (out.name.clone(), value))
        .collect())
}

/// Allocates collision-free net names.
pub struct NetNamer {
    used: BTreeSet<String>,
}

impl NetNamer {
    pub fn new(used: impl IntoIterator<Item = String>) -> NetNamer {
        NetNamer {
            used: used.into_iter().collect(),
        }
    }

    pub fn reserve(&mut self, name: &str) {
        self.used.insert(name.to_string());
    }

    pub fn fresh(&mut self, base: &str) -> String {
        if self.used.insert(base.to_string()) {
            return base.to_string();
        }
        for suffix in 0.. {
            let candidate = format!("{base}_{suffix}");
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
        unreachable!()
    }
}

/// Builds the AND-OR-Inverter netlist of a cover: one shared NOT per
/// complemented variable, one AND per multi-literal product, and an OR
/// root when there is more than one product. Constant covers drive the
/// output from a constant net.
pub fn sop_to_aoi_netlist(
    cover: &SopCover,
    input_names: &[String],
    output_name: &str,
) -> GateNetlist {
    assert_eq!(cover.input_count, input_names.len());
    let mut netlist = GateNetlist::new(output_name);
    netlist.inputs = input_names.to_vec();

    if cover.implicants.is_empty() {
        netlist.outputs.push(OutputBinding {
            name: output_name.to_string(),
            driver: NetRef::Const0,
        });
        return netlist;
    }
    if cover.implicants.iter().any(|i| i.care == 0) {
        netlist.outputs.push(OutputBinding {
            name: output_name.to_string(),
            driver: NetRef::Const1,
        });
        return netlist;
    }

    let mut namer = NetNamer::new(input_names.iter().cloned().chain([output_name.to_string()]));

    // Shared inverters, in input order.
    let n = input_names.len();
    let mut inverted: BTreeMap<usize, String> = BTreeMap::new();
    for (j, name) in input_names.iter().enumerate() {
        let bit = 1u32 << (n - 1 - j);
        let needed = cover
            .implicants
            .iter()
            .any(|imp| imp.care & bit != 0 && imp.values & bit == 0);
        if !needed {
            continue;
        }
        // A single-product, single-literal negative cover is just one
        // inverter driving the output directly.
        let single = cover.implicants.len() == 1 && cover.implicants[0].literal_count() == 1;
        let net = if single {
            output_name.to_string()
        } else {
            namer.fresh(&format!("{name}_n"))
        };
        netlist.gates.push(Gate {
            op: GateOp::Not,
            inputs: vec![name.clone()],
            output: net.clone(),
        });
        inverted.insert(j, net);
    }

    let single_product = cover.implicants.len() == 1;
    let mut product_nets = Vec::new();
    for (index, imp) in cover.implicants.iter().enumerate() {
        let mut literals = Vec::new();
        for (j, name) in input_names.iter().enumerate() {
            let bit = 1u32 << (n - 1 - j);
            if imp.care & bit == 0 {
                continue;
            }
            if imp.values & bit != 0 {
                literals.push(name.clone());
            } else {
                literals.push(inverted[&j].clone());
            }
        }
        if literals.len() == 1 {
            product_nets.push(literals.pop().unwrap());
        } else {
            let net = if single_product {
                output_name.to_string()
            } else {
                namer.fresh(&format!("p{index}"))
            };
            netlist.gates.push(Gate {
                op: GateOp::And,
                inputs: literals,
                output: net.clone(),
            });
            product_nets.push(net);
        }
    }

    let driver = if single_product {
        product_nets.pop().unwrap()
    } else {
        netlist.gates.push(Gate {
            op: GateOp::Or,
            inputs: product_nets,
            output: output_name.to_string(),
        });
        output_name.to_string()
    };
    netlist.outputs.push(OutputBinding {
        name: output_name.to_string(),
        driver: NetRef::Net(driver),
    });
    netlist
}

/// Merges per-output netlists over a shared input list into one module,
/// renaming clashing internal nets.
pub fn merge_netlists(name: &str, parts: &[GateNetlist]) -> GateNetlist {
    let mut merged = GateNetlist::new(name);
    if let Some(first) = parts.first() {
        merged.inputs = first.inputs.clone();
    }
    let mut namer = NetNamer::new(merged.inputs.iter().cloned());
    for part in parts {
        for output in &part.outputs {
            namer.reserve(&output.name);
        }
    }
    for part in parts {
        debug_assert_eq!(part.inputs, merged.inputs, "parts share the input list");
        let own_outputs: BTreeSet<&str> = part.outputs.iter().map(|o| o.name.as_str()).collect();
        let mut rename: BTreeMap<&str, String> = BTreeMap::new();
        for gate in &part.gates {
            // A gate legitimately driving this part's own output keeps
            // its name; only internal nets are renamed on collision.
            let new_name = if own_outputs.contains(gate.output.as_str()) {
                gate.output.clone()
            } else {
                namer.fresh(&gate.output)
            };
            rename.insert(gate.output.as_str(), new_name);
        }
        let map = |net: &String, rename: &BTreeMap<&str, String>| -> String {
            rename
                .get(net.as_str())
                .cloned()
                .unwrap_or_else(|| net.clone())
        };
        for gate in &part.gates {
            merged.gates.push(Gate {
                op: gate.op,
                inputs: gate.inputs.iter().map(|i| map(i, &rename)).collect(),
                output: rename[gate.output.as_str()].clone(),
            });
        }
        for output in &part.outputs {
            merged.outputs.push(OutputBinding {
                name: output.name.clone(),
                driver: match &output.driver {
                    NetRef::Net(net) => NetRef::Net(map(net, &rename)),
                    other => other.clone(),
                },
            });
        }
    }
    merged
}

/// The half-adder gate netlist of the classic two-gate form.
pub fn half_adder_netlist() -> GateNetlist {
    GateNetlist {
        name: "Half_Adder".to_string(),
        inputs: vec!["a".to_string(), "b".to_string()],
        outputs: vec![
            OutputBinding {
                name: "c".to_string(),
                driver: NetRef::Net("c".to_string()),
            },
            OutputBinding {
                name: "s".to_string(),
                driver: NetRef::Net("s".to_string()),
            },
        ],
        gates: vec![
            Gate {
                op: GateOp::And,
                inputs: vec!["a".to_string(), "b".to_string()],
                output: "c".to_string(),
            },
            Gate {
                op: GateOp::Xor,
                inputs: vec!["a".to_string(), "b".to_string()],
                output: "s".to_string(),
            },
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::super::cover::{canonical_sop, minimize};
    use super::super::table::majority_table;
    use super::*;

    fn assign(pairs: &[(&str, bool)]) -> BTreeMap<String, bool> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn canonical_majority_netlist_counts() {
        let table = majority_table();
        let cover = canonical_sop(&table, "F");
        let netlist = sop_to_aoi_netlist(&cover, table.inputs(), "F");
        netlist.validate().unwrap();
        let count = |op: GateOp| netlist.gates.iter().filter(|g| g.op == op).count();
        assert_eq!(count(GateOp::Not), 3);
        assert_eq!(count(GateOp::And), 4);
        assert_eq!(count(GateOp::Or), 1);
        assert_eq!(netlist.gates.len(), 8);
        assert!(netlist
            .gates
            .iter()
            .filter(|g| g.op == GateOp::And)
            .all(|g| g.inputs.len() == 3));
        assert!(netlist
            .gates
            .iter()
            .filter(|g| g.op == GateOp::Or)
            .all(|g| g.inputs.len() == 4));
    }

    #[test]
    fn minimized_majority_netlist_has_no_inverters() {
        let table = majority_table();
        let cover = minimize(&table, "F").unwrap();
        let netlist = sop_to_aoi_netlist(&cover, table.inputs(), "F");
        netlist.validate().unwrap();
        let count = |op: GateOp| netlist.gates.iter().filter(|g| g.op == op).count();
        assert_eq!(count(GateOp::Not), 0);
        assert_eq!(count(GateOp::And), 3);
        assert_eq!(count(GateOp::Or), 1);
    }

    #[test]
    fn single_product_cover_skips_the_or() {
        let table = TruthTable::from_minterms(&["A", "B"], "f", &[3]).unwrap();
        let cover = minimize(&table, "f").unwrap();
        let netlist = sop_to_aoi_netlist(&cover, table.inputs(), "f");
        assert_eq!(netlist.gates.len(), 1);
        assert_eq!(netlist.gates[0].op, GateOp::And);
        assert_eq!(netlist.gates[0].output, "f");
    }

    use super::super::table::TruthTable;

    #[test]
    fn constant_covers_use_constant_nets() {
        let zero = TruthTable::from_minterms(&["A"], "f", &[]).unwrap();
        let cover = minimize(&zero, "f").unwrap();
        let netlist = sop_to_aoi_netlist(&cover, zero.inputs(), "f");
        assert!(netlist.gates.is_empty());
        assert_eq!(netlist.outputs[0].driver, NetRef::Const0);

        let one = TruthTable::from_minterms(&["A"], "f", &[0, 1]).unwrap();
        let cover = minimize(&one, "f").unwrap();
        let netlist = sop_to_aoi_netlist(&cover, one.inputs(), "f");
        assert_eq!(netlist.outputs[0].driver, NetRef::Const1);
    }

    #[test]
    fn identity_and_inverter_covers() {
        let id = TruthTable::from_minterms(&["A"], "f", &[1]).unwrap();
        let netlist = sop_to_aoi_netlist(&minimize(&id, "f").unwrap(), id.inputs(), "f");
        assert!(netlist.gates.is_empty());
        assert_eq!(netlist.outputs[0].driver, NetRef::Net("A".to_string()));

        let inv = TruthTable::from_minterms(&["A"], "f", &[0]).unwrap();
        let netlist = sop_to_aoi_netlist(&minimize(&inv, "f").unwrap(), inv.inputs(), "f");
        assert_eq!(netlist.gates.len(), 1);
        assert_eq!(netlist.gates[0].op, GateOp::Not);
        assert_eq!(netlist.gates[0].output, "f");
    }

    #[test]
    fn half_adder_matches_the_gate_truth_tables() {
        let netlist = half_adder_netlist();
        netlist.validate().unwrap();
        let run = |a: bool, b: bool| {
            let out = eval_netlist(&netlist, &assign(&[("a", a), ("b", b)])).unwrap();
            (out["c"], out["s"])
        };
        assert_eq!(run(false, false), (false, false));
        assert_eq!(run(false, true), (false, true));
        assert_eq!(run(true, false), (false, true));
        assert_eq!(run(true, true), (true, false));
    }

    #[test]
    fn majority_netlist_evaluates_row_110() {
        let table = majority_table();
        let cover = minimize(&table, "F").unwrap();
        let netlist = sop_to_aoi_netlist(&cover, table.inputs(), "F");
        let out =
            eval_netlist(&netlist, &assign(&[("A", true), ("B", true), ("C", false)])).unwrap();
        assert!(out["F"]);
    }

    #[test]
    fn aoi_netlist_matches_table_on_every_row() {
        let table = majority_table();
        let cover = canonical_sop(&table, "F");
        let netlist = sop_to_aoi_netlist(&cover, table.inputs(), "F");
        let evaluator = Evaluator::new(&netlist).unwrap();
        for m in 0..table.row_count() {
            let bits: Vec<bool> = (0..3).map(|j| table.input_bit(m, j)).collect();
            assert_eq!(evaluator.eval(&bits)[0], table.value("F", m), "row {m}");
        }
    }

    #[test]
    fn validation_catches_structural_faults() {
        let mut netlist = half_adder_netlist();
        netlist.gates.push(Gate {
            op: GateOp::And,
            inputs: vec!["a".into(), "b".into()],
            output: "c".into(),
        });
        assert!(netlist.validate().is_err()); // double driver

        let mut netlist = half_adder_netlist();
        netlist.gates[0].inputs[0] = "ghost".into();
        assert!(netlist.validate().is_err()); // undriven net

        let mut netlist = half_adder_netlist();
        netlist.gates[0].inputs = vec!["c".into(), "a".into()];
        netlist.gates[1].inputs = vec!["s".into(), "b".into()];
        netlist.gates[0].output = "s".into();
        netlist.gates[1].output = "c".into();
        assert!(netlist.validate().is_err()); // combinational cycle
    }

    #[test]
    fn merge_renames_clashing_internal_nets() {
        let t1 = TruthTable::from_minterms(&["A", "B"], "f", &[1, 2]).unwrap();
        let t2 = TruthTable::from_minterms(&["A", "B"], "g", &[2, 1]).unwrap();
        let n1 = sop_to_aoi_netlist(&minimize(&t1, "f").unwrap(), t1.inputs(), "f");
        let n2 = sop_to_aoi_netlist(&minimize(&t2, "g").unwrap(), t2.inputs(), "g");
        let merged = merge_netlists("both", &[n1, n2]);
        merged.validate().unwrap();
        assert_eq!(merged.outputs.len(), 2);
        let out = eval_netlist(&merged, &assign(&[("A", true), ("B", false)])).unwrap();
        assert!(out["f"] && out["g"]);
    }

    #[test]
    fn netlist_json_is_stable_and_round_trips() {
        let netlist = half_adder_netlist();
        let json = serde_json::to_string(&netlist).unwrap();
        assert!(json.starts_with("{\"name\":\"Half_Adder\",\"inputs\":"));
        let back: GateNetlist = serde_json::from_str(&json).unwrap();
        assert_eq!(back, netlist);
    }
}
