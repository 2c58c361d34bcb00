// SPDX-License-Identifier: Apache-2.0

//! Technology mapping: fan-in reduction to two-input gates and De Morgan
//! decomposition into a NAND2-only library.

use super::netlist::{Gate, GateNetlist, GateOp, NetNamer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MapTarget {
    /// Keep the AND-OR-Inverter structure, fan-in unrestricted.
    AoiUnrestricted,
    /// Exclusively 2-input NAND gates.
    Nand2,
}

/// Re-expresses a netlist in the target library. The AOI target is the
/// identity; the NAND2 target first reduces fan-in, then rewrites every
/// gate with the De Morgan identities.
pub fn map_to_library(netlist: &GateNetlist, target: MapTarget) -> GateNetlist {
    match target {
        MapTarget::AoiUnrestricted => netlist.clone(),
        MapTarget::Nand2 => to_nand2(&limit_fanin2(netlist)),
    }
}

/// Splits gates with more than two inputs into balanced trees of two-input
/// gates. Negated kinds (NAND/NOR/XNOR) keep the negation at the tree
/// root over subtrees of their base kind.
pub fn limit_fanin2(netlist: &GateNetlist) -> GateNetlist {
    let mut out = GateNetlist::new(netlist.name.clone());
    out.inputs = netlist.inputs.clone();
    out.outputs = netlist.outputs.clone();
    let mut namer = NetNamer::new(netlist.net_names());
    for gate in &netlist.gates {
        split_gate(gate, &mut out.gates, &mut namer);
    }
    out
}

fn base_of(op: GateOp) -> GateOp {
    match op {
        GateOp::Nand => GateOp::And,
        GateOp::Nor => GateOp::Or,
        GateOp::Xnor => GateOp::Xor,
        other => other,
    }
}

fn split_gate(gate: &Gate, gates: &mut Vec<Gate>, namer: &mut NetNamer) {
    if gate.inputs.len() <= 2 {
        gates.push(gate.clone());
        return;
    }
    let base = base_of(gate.op);
    let mid = gate.inputs.len().div_ceil(2);
    let left = subtree(base, &gate.inputs[..mid], gates, namer);
    let right = subtree(base, &gate.inputs[mid..], gates, namer);
    gates.push(Gate {
        op: gate.op,
        inputs: vec![left, right],
        output: gate.output.clone(),
    });
}

fn subtree(op: GateOp, nets: &[String], gates: &mut Vec<Gate>, namer: &mut NetNamer) -> String {
    if nets.len() == 1 {
        return nets[0].clone();
    }
    let mid = nets.len().div_ceil(2);
    let left = subtree(op, &nets[..mid], gates, namer);
    let right = subtree(op, &nets[mid..], gates, namer);
    let output = namer.fresh("t");
    gates.push(Gate {
        op,
        inputs: vec![left, right],
        output: output.clone(),
    });
    output
}

/// Rewrites a fan-in-2 netlist into 2-input NANDs only.
fn to_nand2(netlist: &GateNetlist) -> GateNetlist {
    let mut out = GateNetlist::new(netlist.name.clone());
    out.inputs = netlist.inputs.clone();
    out.outputs = netlist.outputs.clone();
    let mut namer = NetNamer::new(netlist.net_names());
    let nand = |a: &str, b: &str, y: String| Gate {
        op: GateOp::Nand,
        inputs: vec![a.to_string(), b.to_string()],
        output: y,
    };
    for gate in &netlist.gates {
        let y = gate.output.clone();
        match (gate.op, gate.inputs.as_slice()) {
            (GateOp::Not, [a]) => out.gates.push(nand(a, a, y)),
            (GateOp::Nand, [a, b]) => out.gates.push(nand(a, b, y)),
            (GateOp::And, [a, b]) => {
                let t = namer.fresh("t");
                out.gates.push(nand(a, b, t.clone()));
                out.gates.push(nand(&t, &t, y));
            }
            (GateOp::Or, [a, b]) => {
                let na = namer.fresh("t");
                let nb = namer.fresh("t");
                out.gates.push(nand(a, a, na.clone()));
                out.gates.push(nand(b, b, nb.clone()));
                out.gates.push(nand(&na, &nb, y));
            }
            (GateOp::Nor, [a, b]) => {
                let na = namer.fresh("t");
                let nb = namer.fresh("t");
                let or = namer.fresh("t");
                out.gates.push(nand(a, a, na.clone()));
                out.gates.push(nand(b, b, nb.clone()));
                out.gates.push(nand(&na, &nb, or.clone()));
                out.gates.push(nand(&or, &or, y));
            }
            (GateOp::Xor, [a, b]) => {
                let t = namer.fresh("t");
                let u = namer.fresh("t");
                let v = namer.fresh("t");
                out.gates.push(nand(a, b, t.clone()));
                out.gates.push(nand(a, &t, u.clone()));
                out.gates.push(nand(b, &t, v.clone()));
                out.gates.push(nand(&u, &v, y));
            }
            (GateOp::Xnor, [a, b]) => {
                let t = namer.fresh("t");
                let u = namer.fresh("t");
                let v = namer.fresh("t");
                let x = namer.fresh("t");
                out.gates.push(nand(a, b, t.clone()));
                out.gates.push(nand(a, &t, u.clone()));
                out.gates.push(nand(b, &t, v.clone()));
                out.gates.push(nand(&u, &v, x.clone()));
                out.gates.push(nand(&x, &x, y));
            }
            (op, inputs) => unreachable!(
                "fan-in {} {} gate after reduction",
                inputs.len(),
                op.verilog_name()
            ),
        }
    }
    out
}
