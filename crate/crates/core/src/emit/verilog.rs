// SPDX-License-Identifier: Apache-2.0

//! Verilog emission: gate-primitive netlists and the synthesizable
//! FSM-plus-datapath subset documented in the README.

use std::collections::BTreeMap;

use crate::dfg::NodeKind;
use crate::frontend::Direction;
use crate::hls::ValueSource;
use crate::logic::{GateNetlist, NetRef};
use crate::rtl::{PortFeed, RtlDesign};

use super::{header_line, NameTable};

const VERILOG_RESERVED: &[&str] = &[
    "always",
    "and",
    "assign",
    "begin",
    "buf",
    "case",
    "casex",
    "casez",
    "default",
    "defparam",
    "edge",
    "else",
    "end",
    "endcase",
    "endfunction",
    "endmodule",
    "endtask",
    "for",
    "forever",
    "function",
    "if",
    "initial",
    "inout",
    "input",
    "integer",
    "localparam",
    "module",
    "nand",
    "negedge",
    "nor",
    "not",
    "or",
    "output",
    "parameter",
    "posedge",
    "reg",
    "repeat",
    "signed",
    "task",
    "tri",
    "wand",
    "while",
    "wire",
    "wor",
    "xnor",
    "xor",
];

/// Emits one module instantiating Verilog gate primitives, instance names
/// `Gate1..GateN` in topological order, port order (output, inputs...).
pub fn emit_verilog_netlist(netlist: &GateNetlist, module_name: &str) -> String {
    let payload = serde_json::to_string(netlist).expect("netlist serializes");
    let mut text = header_line("//", &payload);

    let mut ordered = netlist.clone();
    ordered
        .sort_topologically()
        .expect("emission needs an acyclic netlist");

    let port_names: Vec<String> = ordered
        .inputs
        .iter()
        .cloned()
        .chain(ordered.outputs.iter().map(|o| o.name.clone()))
        .collect();
    text.push_str(&format!(
        "module {module_name} ({});\n",
        port_names.join(", ")
    ));
    if !ordered.inputs.is_empty() {
        text.push_str(&format!("  input {};\n", ordered.inputs.join(", ")));
    }
    if !ordered.outputs.is_empty() {
        let names: Vec<String> = ordered.outputs.iter().map(|o| o.name.clone()).collect();
        text.push_str(&format!("  output {};\n", names.join(", ")));
    }

    let output_names: Vec<&str> = ordered.outputs.iter().map(|o| o.name.as_str()).collect();
    let internal: Vec<String> = ordered
        .gates
        .iter()
        .map(|g| g.output.clone())
        .filter(|net| !output_names.contains(&net.as_str()))
        .collect();
    if !internal.is_empty() {
        text.push_str(&format!("  wire {};\n", internal.join(", ")));
    }
    text.push('\n');

    for (index, gate) in ordered.gates.iter().enumerate() {
        text.push_str(&format!(
            "  {} Gate{} ({}, {});\n",
            gate.op.verilog_name(),
            index + 1,
            gate.output,
            gate.inputs.join(", ")
        ));
    }

    // Identity and constant outputs use continuous assignments.
    for output in &ordered.outputs {
        match &output.driver {
            NetRef::Net(net) if *net != output.name => {
                text.push_str(&format!("  assign {} = {};\n", output.name, net));
            }
            NetRef::Const0 => {
                text.push_str(&format!("  assign {} = 1'b0;\n", output.name));
            }
            NetRef::Const1 => {
                text.push_str(&format!("  assign {} = 1'b1;\n", output.name));
            }
            NetRef::Net(_) => {}
        }
    }
    text.push_str("endmodule\n");
    text
}

struct RtlNames {
    ports: BTreeMap<String, String>,
    out_reg: BTreeMap<String, String>,
    out_data: BTreeMap<String, String>,
}

fn zero_extend(expr: String, from: u32, to: u32) -> String {
    debug_assert!(from <= to);
    if from == to {
        expr
    } else {
        format!("{{{}'b0, {expr}}}", to - from)
    }
}

fn slice(base: &str, declared: u32, read: u32) -> String {
    debug_assert!(read <= declared);
    if read == declared {
        base.to_string()
    } else {
        format!("{base}[{}:0]", read - 1)
    }
}

fn fu_base(kind: NodeKind, instance: u32) -> String {
    format!("{}{}", kind.name(), instance)
}

/// Emits the synthesizable FSM-plus-datapath module: clk/reset/start/done
/// handshake, a binary state register, per-state control words as a
/// combinational case, muxes as continuous assignments, and registered
/// updates gated by the word's enables.
pub fn emit_verilog_rtl(design: &RtlDesign, module_name: &str) -> String {
    let payload = serde_json::to_string(design).expect("design serializes");
    let mut text = header_line("//", &payload);

    let mut table = NameTable::new(VERILOG_RESERVED, false);
    for fixed in [
        "clk", "reset", "start", "done", "state", "cw", "fire", "done_r",
    ] {
        table.claim(fixed);
    }
    let mut names = RtlNames {
        ports: BTreeMap::new(),
        out_reg: BTreeMap::new(),
        out_data: BTreeMap::new(),
    };
    for port in &design.ports {
        let clean = table.claim(&port.name);
        names.ports.insert(port.name.clone(), clean);
    }
    for out in &design.output_regs {
        let base = &names.ports[&out.name];
        names
            .out_reg
            .insert(out.name.clone(), table.claim(&format!("{base}_r")));
        names
            .out_data
            .insert(out.name.clone(), table.claim(&format!("{base}_d")));
    }

    let port_widths: BTreeMap<&str, u32> = design
        .ports
        .iter()
        .map(|p| (p.name.as_str(), p.width))
        .collect();
    let reg_width: BTreeMap<u32, u32> = design
        .registers
        .iter()
        .map(|r| (r.index, r.width))
        .collect();
    let fu_width: BTreeMap<(NodeKind, u32), u32> = design
        .fus
        .iter()
        .map(|fu| ((fu.kind, fu.instance), fu.width))
        .collect();

    let source_expr = |source: &ValueSource, target: u32| -> String {
        match source {
            ValueSource::Port { name, width } => {
                let base = &names.ports[name];
                zero_extend(
                    slice(base, port_widths[name.as_str()], *width),
                    *width,
                    target,
                )
            }
            ValueSource::Const { value, .. } => format!("{target}'d{value}"),
            ValueSource::Register { index, width } => {
                let base = format!("r{index}");
                zero_extend(slice(&base, reg_width[index], *width), *width, target)
            }
            ValueSource::FuOutput {
                kind,
                instance,
                width,
            } => {
                let base = format!("{}_out", fu_base(*kind, *instance));
                zero_extend(
                    slice(&base, fu_width[&(*kind, *instance)], *width),
                    *width,
                    target,
                )
            }
        }
    };

    // Ports.
    text.push_str(&format!("module {module_name} (\n"));
    text.push_str(
        "  input wire clk,\n  input wire reset,\n  input wire start,\n  output wire done",
    );
    for port in &design.ports {
        let clean = &names.ports[&port.name];
        let dir = match port.direction {
            Direction::In => "input",
            Direction::Out => "output",
        };
        text.push_str(&format!(",\n  {dir} wire [{}:0] {clean}", port.width - 1));
    }
    text.push_str("\n);\n");

    // State encoding.
    let bits = design.controller.state_bits;
    let length = design.schedule_length;
    text.push_str(&format!(
        "\n  localparam [{}:0] STATE_IDLE = {bits}'d0;\n",
        bits - 1
    ));
    for step in 1..=length {
        text.push_str(&format!(
            "  localparam [{}:0] STATE_S{step} = {bits}'d{step};\n",
            bits - 1
        ));
    }
    text.push_str(&format!("\n  reg [{}:0] state;\n  reg done_r;\n", bits - 1));

    // Control word as a per-state constant.
    let cw_width = design.controller.control_word_width;
    text.push_str(&format!("\n  reg [{}:0] cw;\n", cw_width - 1));
    text.push_str("  always @(*) begin\n    case (state)\n");
    for (state, word) in design.controller.words.iter().enumerate() {
        let label = if state == 0 {
            "STATE_IDLE".to_string()
        } else {
            format!("STATE_S{state}")
        };
        text.push_str(&format!(
            "      {label}: cw = {cw_width}'b{};\n",
            word.bits(&design.muxes)
        ));
    }
    text.push_str(&format!(
        "      default: cw = {{{cw_width}{{1'b0}}}};\n    endcase\n  end\n"
    ));

    // Control word fields, most significant first.
    let mut top = cw_width;
    let mut field = |width: u32, name: String, text: &mut String| {
        if width == 1 {
            text.push_str(&format!("  wire {name} = cw[{}];\n", top - 1));
        } else {
            text.push_str(&format!(
                "  wire [{}:0] {name} = cw[{}:{}];\n",
                width - 1,
                top - 1,
                top - width
            ));
        }
        top -= width;
    };
    text.push('\n');
    for (index, mux) in design.muxes.iter().enumerate() {
        field(mux.select_width, format!("ctl_sel{index}"), &mut text);
    }
    for register in &design.registers {
        field(1, format!("ctl_en_r{}", register.index), &mut text);
    }
    for fu in design.fus.iter().filter(|fu| fu.latency >= 2) {
        field(
            1,
            format!("ctl_cap_{}", fu_base(fu.kind, fu.instance)),
            &mut text,
        );
    }
    for out in &design.output_regs {
        let base = &names.ports[&out.name];
        field(1, format!("ctl_out_{base}"), &mut text);
    }
    field(1, "ctl_done".to_string(), &mut text);
    debug_assert_eq!(top, 0);
    if length == 0 {
        text.push_str("  wire fire = start && state == STATE_IDLE;\n");
    } else {
        text.push_str("  wire fire = state != STATE_IDLE;\n");
    }

    // Muxes.
    if !design.muxes.is_empty() {
        text.push('\n');
    }
    for (index, mux) in design.muxes.iter().enumerate() {
        let mut expr = source_expr(&mux.inputs[mux.inputs.len() - 1], mux.width);
        for (k, input) in mux.inputs.iter().enumerate().rev().skip(1) {
            expr = format!(
                "ctl_sel{index} == {}'d{k} ? {} : {expr}",
                mux.select_width,
                source_expr(input, mux.width)
            );
        }
        text.push_str(&format!(
            "  wire [{}:0] mux{index} = {expr};\n",
            mux.width - 1
        ));
    }

    // Functional units.
    text.push('\n');
    for fu in &design.fus {
        let base = fu_base(fu.kind, fu.instance);
        let w = fu.width - 1;
        let operand_names = ["a", "b"];
        for (position, feed) in fu.operand_feeds.iter().enumerate() {
            let expr = match feed {
                PortFeed::Mux(index) => format!("mux{index}"),
                PortFeed::Direct(source) => source_expr(source, fu.width),
            };
            text.push_str(&format!(
                "  wire [{w}:0] {base}_{} = {expr};\n",
                operand_names[position]
            ));
        }
        let (a, b) = (format!("{base}_a"), format!("{base}_b"));
        let (a, b) = if fu.latency >= 2 {
            text.push_str(&format!("  reg [{w}:0] {base}_cap_a;\n"));
            if fu.operand_feeds.len() > 1 {
                text.push_str(&format!("  reg [{w}:0] {base}_cap_b;\n"));
            }
            (format!("{base}_cap_a"), format!("{base}_cap_b"))
        } else {
            (a, b)
        };
        let expr = match fu.kind {
            NodeKind::Add => format!("{a} + {b}"),
            NodeKind::Sub => format!("{a} - {b}"),
            NodeKind::Mul => format!("{a} * {b}"),
            NodeKind::And => format!("{a} & {b}"),
            NodeKind::Or => format!("{a} | {b}"),
            NodeKind::Xor => format!("{a} ^ {b}"),
            NodeKind::Not => format!("~{a}"),
            NodeKind::Shl => format!("{a} << {b}"),
            NodeKind::Shr => format!("{a} >> {b}"),
            other => unreachable!("{} is not a functional unit", other.name()),
        };
        text.push_str(&format!("  wire [{w}:0] {base}_out = {expr};\n"));
    }

    // Datapath and output registers with their write-data nets.
    text.push('\n');
    for register in &design.registers {
        let expr = match &register.feed {
            PortFeed::Mux(index) => format!("mux{index}"),
            PortFeed::Direct(source) => source_expr(source, register.width),
        };
        text.push_str(&format!(
            "  reg [{}:0] r{};\n",
            register.width - 1,
            register.index
        ));
        text.push_str(&format!(
            "  wire [{}:0] r{}_d = {expr};\n",
            register.width - 1,
            register.index
        ));
    }
    for out in &design.output_regs {
        let reg = &names.out_reg[&out.name];
        let data = &names.out_data[&out.name];
        let expr = match &out.feed {
            PortFeed::Mux(index) => format!("mux{index}"),
            PortFeed::Direct(source) => source_expr(source, out.width),
        };
        text.push_str(&format!("  reg [{}:0] {reg};\n", out.width - 1));
        text.push_str(&format!("  wire [{}:0] {data} = {expr};\n", out.width - 1));
    }
    text.push('\n');
    for out in &design.output_regs {
        let clean = &names.ports[&out.name];
        text.push_str(&format!(
            "  assign {clean} = {};\n",
            names.out_reg[&out.name]
        ));
    }
    text.push_str("  assign done = done_r;\n");

    // Sequential behavior.
    text.push_str("\n  always @(posedge clk) begin\n");
    text.push_str("    if (reset) begin\n      state <= STATE_IDLE;\n      done_r <= 1'b0;\n    end else begin\n");
    text.push_str("      case (state)\n");
    text.push_str("        STATE_IDLE: begin\n          if (start) begin\n");
    if length == 0 {
        text.push_str("            done_r <= 1'b1;\n");
    } else {
        text.push_str("            done_r <= 1'b0;\n            state <= STATE_S1;\n");
    }
    text.push_str("          end\n        end\n");
    for step in 1..=length {
        if step == length {
            text.push_str(&format!(
                "        STATE_S{step}: begin\n          done_r <= ctl_done;\n          state <= STATE_IDLE;\n        end\n"
            ));
        } else {
            text.push_str(&format!(
                "        STATE_S{step}: state <= STATE_S{};\n",
                step + 1
            ));
        }
    }
    text.push_str("        default: state <= STATE_IDLE;\n      endcase\n");
    for register in &design.registers {
        text.push_str(&format!(
            "      if (fire && ctl_en_r{0}) r{0} <= r{0}_d;\n",
            register.index
        ));
    }
    for fu in design.fus.iter().filter(|fu| fu.latency >= 2) {
        let base = fu_base(fu.kind, fu.instance);
        text.push_str(&format!(
            "      if (fire && ctl_cap_{base}) begin\n        {base}_cap_a <= {base}_a;\n"
        ));
        if fu.operand_feeds.len() > 1 {
            text.push_str(&format!("        {base}_cap_b <= {base}_b;\n"));
        }
        text.push_str("      end\n");
    }
    for out in &design.output_regs {
        let base = &names.ports[&out.name];
        text.push_str(&format!(
            "      if (fire && ctl_out_{base}) {} <= {};\n",
            names.out_reg[&out.name], names.out_data[&out.name]
        ));
    }
    text.push_str("    end\n  end\nendmodule\n");
    text
}
