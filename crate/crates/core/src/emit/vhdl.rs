// SPDX-License-Identifier: Apache-2.0

//! Structural VHDL emission over two-input components, and the RTL
//! entity/architecture form of synthesized designs.

use std::collections::BTreeMap;

use crate::dfg::NodeKind;
use crate::frontend::Direction;
use crate::hls::ValueSource;
use crate::logic::{GateNetlist, GateOp, NetRef};
use crate::rtl::{ControlWord, PortFeed, RtlDesign};
use crate::width_mask;

use super::{header_line, EmitError, NameTable};

const VHDL_RESERVED: &[&str] = &[
    "abs",
    "access",
    "after",
    "alias",
    "all",
    "and",
    "architecture",
    "array",
    "assert",
    "attribute",
    "begin",
    "block",
    "body",
    "buffer",
    "bus",
    "case",
    "component",
    "configuration",
    "constant",
    "disconnect",
    "downto",
    "else",
    "elsif",
    "end",
    "entity",
    "exit",
    "file",
    "for",
    "function",
    "generate",
    "generic",
    "group",
    "guarded",
    "if",
    "impure",
    "in",
    "inertial",
    "inout",
    "is",
    "label",
    "library",
    "linkage",
    "literal",
    "loop",
    "map",
    "mod",
    "nand",
    "new",
    "next",
    "nor",
    "not",
    "null",
    "of",
    "on",
    "open",
    "or",
    "others",
    "out",
    "package",
    "port",
    "postponed",
    "procedure",
    "process",
    "pure",
    "range",
    "record",
    "register",
    "reject",
    "rem",
    "report",
    "return",
    "rol",
    "ror",
    "select",
    "severity",
    "signal",
    "shared",
    "sla",
    "sll",
    "sra",
    "srl",
    "subtype",
    "then",
    "to",
    "transport",
    "type",
    "unaffected",
    "units",
    "until",
    "use",
    "variable",
    "wait",
    "when",
    "while",
    "with",
    "xnor",
    "xor",
];

/// Emits an entity plus `architecture structural` instantiating two-input
/// components (`AND2`, `OR2`, `EXOR2`, `NAND2`, `NOR2`, `XNOR2`, `INV`)
/// with port maps in (inputs..., output) order.
pub fn emit_vhdl_structural(netlist: &GateNetlist, entity_name: &str) -> Result<String, EmitError> {
    for gate in &netlist.gates {
        if gate.inputs.len() > 2 {
            return Err(EmitError::FanIn {
                gate: gate.output.clone(),
                inputs: gate.inputs.len(),
            });
        }
    }
    let payload = serde_json::to_string(netlist).expect("netlist serializes");
    let mut text = header_line("--", &payload);

    let mut ordered = netlist.clone();
    ordered
        .sort_topologically()
        .expect("emission needs an acyclic netlist");

    text.push_str(&format!("entity {entity_name} is\n  port (\n"));
    let mut port_lines = Vec::new();
    if !ordered.inputs.is_empty() {
        port_lines.push(format!("    {}: in bit", ordered.inputs.join(", ")));
    }
    if !ordered.outputs.is_empty() {
        let names: Vec<String> = ordered.outputs.iter().map(|o| o.name.clone()).collect();
        port_lines.push(format!("    {}: out bit", names.join(", ")));
    }
    text.push_str(&port_lines.join(";\n"));
    text.push_str(&format!(");\nend {entity_name};\n\n"));

    text.push_str(&format!("architecture structural of {entity_name} is\n"));
    let mut used_ops: Vec<GateOp> = ordered.gates.iter().map(|g| g.op).collect();
    used_ops.sort();
    used_ops.dedup();
    for op in &used_ops {
        let component = op.vhdl_component();
        if *op == GateOp::Not {
            text.push_str(&format!(
                "  component {component} port (x: in bit; o: out bit); end component;\n"
            ));
        } else {
            text.push_str(&format!(
                "  component {component} port (x, y: in bit; o: out bit); end component;\n"
            ));
        }
    }
    let output_names: Vec<&str> = ordered.outputs.iter().map(|o| o.name.as_str()).collect();
    let internal: Vec<String> = ordered
        .gates
        .iter()
        .map(|g| g.output.clone())
        .filter(|net| !output_names.contains(&net.as_str()))
        .collect();
    if !internal.is_empty() {
        text.push_str(&format!("  signal {}: bit;\n", internal.join(", ")));
    }
    text.push_str("begin\n");
    for (index, gate) in ordered.gates.iter().enumerate() {
        let mut operands = gate.inputs.clone();
        operands.push(gate.output.clone());
        text.push_str(&format!(
            "  Gate{} : {} port map ({});\n",
            index + 1,
            gate.op.vhdl_component(),
            operands.join(", ")
        ));
    }
    for output in &ordered.outputs {
        match &output.driver {
            NetRef::Net(net) if *net != output.name => {
                text.push_str(&format!("  {} <= {};\n", output.name, net));
            }
            NetRef::Const0 => text.push_str(&format!("  {} <= '0';\n", output.name)),
            NetRef::Const1 => text.push_str(&format!("  {} <= '1';\n", output.name)),
            NetRef::Net(_) => {}
        }
    }
    text.push_str("end structural;\n");
    Ok(text)
}

fn binary_literal(value: u64, width: u32) -> String {
    let mut bits = String::with_capacity(width as usize);
    for position in (0..width).rev() {
        bits.push(if value >> position & 1 == 1 { '1' } else { '0' });
    }
    format!("unsigned'(\"{bits}\")")
}

/// Emits a clocked entity/architecture mirroring the FSM-plus-datapath
/// design: functional units and muxes as concurrent assignments selected
/// by state comparisons, register updates in one rising-edge process.
pub fn emit_vhdl_rtl(design: &RtlDesign, entity_name: &str) -> String {
    let payload = serde_json::to_string(design).expect("design serializes");
    let mut text = header_line("--", &payload);

    let mut table = NameTable::new(VHDL_RESERVED, true);
    for fixed in ["clk", "reset", "start", "done", "state", "done_r"] {
        table.claim(fixed);
    }
    let mut port_names: BTreeMap<String, String> = BTreeMap::new();
    for port in &design.ports {
        port_names.insert(port.name.clone(), table.claim(&port.name));
    }
    let mut out_regs: BTreeMap<String, String> = BTreeMap::new();
    for out in &design.output_regs {
        let base = port_names[&out.name].clone();
        out_regs.insert(out.name.clone(), table.claim(&format!("{base}_r")));
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

    let resize = |expr: String, from: u32, to: u32| -> String {
        if from == to {
            expr
        } else {
            format!("resize({expr}, {to})")
        }
    };
    let sliced = |base: &str, declared: u32, read: u32| -> String {
        if read == declared {
            base.to_string()
        } else {
            format!("{base}({} downto 0)", read - 1)
        }
    };
    let source_expr = |source: &ValueSource, target: u32| -> String {
        match source {
            ValueSource::Port { name, width } => {
                let base = format!("unsigned({})", port_names[name]);
                resize(
                    sliced(&base, port_widths[name.as_str()], *width),
                    *width,
                    target,
                )
            }
            ValueSource::Const { value, .. } => binary_literal(*value, target),
            ValueSource::Register { index, width } => resize(
                sliced(&format!("r{index}"), reg_width[index], *width),
                *width,
                target,
            ),
            ValueSource::FuOutput {
                kind,
                instance,
                width,
            } => {
                let base = format!("{}{}_out", kind.name(), instance);
                resize(
                    sliced(&base, fu_width[&(*kind, *instance)], *width),
                    *width,
                    target,
                )
            }
        }
    };

    // Entity.
    text.push_str("library ieee;\nuse ieee.std_logic_1164.all;\nuse ieee.numeric_std.all;\n\n");
    text.push_str(&format!("entity {entity_name} is\n  port (\n"));
    text.push_str("    clk: in std_logic;\n    reset: in std_logic;\n    start: in std_logic;\n    done: out std_logic");
    for port in &design.ports {
        let clean = &port_names[&port.name];
        let dir = match port.direction {
            Direction::In => "in",
            Direction::Out => "out",
        };
        text.push_str(&format!(
            ";\n    {clean}: {dir} std_logic_vector({} downto 0)",
            port.width - 1
        ));
    }
    text.push_str(&format!(");\nend {entity_name};\n\n"));

    // Architecture declarations.
    let bits = design.controller.state_bits;
    text.push_str(&format!("architecture rtl of {entity_name} is\n"));
    text.push_str(&format!(
        "  signal state: unsigned({} downto 0) := (others => '0');\n",
        bits - 1
    ));
    text.push_str("  signal done_r: std_logic := '0';\n");
    for register in &design.registers {
        text.push_str(&format!(
            "  signal r{}: unsigned({} downto 0) := (others => '0');\n",
            register.index,
            register.width - 1
        ));
    }
    for out in &design.output_regs {
        text.push_str(&format!(
            "  signal {}: unsigned({} downto 0) := (others => '0');\n",
            out_regs[&out.name],
            out.width - 1
        ));
    }
    for fu in &design.fus {
        let base = format!("{}{}", fu.kind.name(), fu.instance);
        for (position, _) in fu.operand_feeds.iter().enumerate() {
            let suffix = ["a", "b"][position];
            text.push_str(&format!(
                "  signal {base}_{suffix}: unsigned({} downto 0);\n",
                fu.width - 1
            ));
        }
        if fu.latency >= 2 {
            for (position, _) in fu.operand_feeds.iter().enumerate() {
                let suffix = ["a", "b"][position];
                text.push_str(&format!(
                    "  signal {base}_cap_{suffix}: unsigned({} downto 0) := (others => '0');\n",
                    fu.width - 1
                ));
            }
        }
        text.push_str(&format!(
            "  signal {base}_out: unsigned({} downto 0);\n",
            fu.width - 1
        ));
    }
    text.push_str("begin\n  done <= done_r;\n");
    for out in &design.output_regs {
        text.push_str(&format!(
            "  {} <= std_logic_vector({});\n",
            port_names[&out.name], out_regs[&out.name]
        ));
    }

    // Muxed operand signals as state-selected concurrent assignments.
    let mux_expr_at = |feed: &PortFeed, word: &ControlWord, target: u32| -> String {
        match feed {
            PortFeed::Direct(source) => source_expr(source, target),
            PortFeed::Mux(index) => {
                let mux = &design.muxes[*index];
                source_expr(&mux.inputs[word.mux_selects[*index] as usize], target)
            }
        }
    };
    text.push('\n');
    for fu in &design.fus {
        let base = format!("{}{}", fu.kind.name(), fu.instance);
        for (position, feed) in fu.operand_feeds.iter().enumerate() {
            let suffix = ["a", "b"][position];
            match feed {
                PortFeed::Direct(source) => {
                    text.push_str(&format!(
                        "  {base}_{suffix} <= {};\n",
                        source_expr(source, fu.width)
                    ));
                }
                PortFeed::Mux(index) => {
                    let mux = &design.muxes[*index];
                    // Selection per state, default to input 0.
                    let mut arms: Vec<String> = Vec::new();
                    for (state, word) in design.controller.words.iter().enumerate().skip(1) {
                        let select = word.mux_selects[*index] as usize;
                        if select != 0 {
                            arms.push(format!(
                                "{} when state = {state} else ",
                                source_expr(&mux.inputs[select], fu.width)
                            ));
                        }
                    }
                    text.push_str(&format!(
                        "  {base}_{suffix} <= {}{};\n",
                        arms.join(""),
                        source_expr(&mux.inputs[0], fu.width)
                    ));
                }
            }
        }
        let (a, b) = if fu.latency >= 2 {
            (format!("{base}_cap_a"), format!("{base}_cap_b"))
        } else {
            (format!("{base}_a"), format!("{base}_b"))
        };
        let w = fu.width;
        let expr = match fu.kind {
            NodeKind::Add => format!("{a} + {b}"),
            NodeKind::Sub => format!("{a} - {b}"),
            NodeKind::Mul => format!("resize({a} * {b}, {w})"),
            NodeKind::And => format!("{a} and {b}"),
            NodeKind::Or => format!("{a} or {b}"),
            NodeKind::Xor => format!("{a} xor {b}"),
            NodeKind::Not => format!("not {a}"),
            NodeKind::Shl => shift_expr("shift_left", &a, &b, w),
            NodeKind::Shr => shift_expr("shift_right", &a, &b, w),
            other => unreachable!("{} is not a functional unit", other.name()),
        };
        text.push_str(&format!("  {base}_out <= {expr};\n"));
    }

    // One clocked process: state chain plus per-state register loads.
    let length = design.schedule_length;
    text.push_str("\n  process (clk)\n  begin\n    if rising_edge(clk) then\n");
    text.push_str("      if reset = '1' then\n        state <= (others => '0');\n        done_r <= '0';\n      else\n");
    text.push_str("        case to_integer(state) is\n");
    text.push_str("          when 0 =>\n            if start = '1' then\n");
    if length == 0 {
        let word = &design.controller.words[0];
        for (pos, out) in design.output_regs.iter().enumerate() {
            if word.out_enables[pos] {
                text.push_str(&format!(
                    "              {} <= {};\n",
                    out_regs[&out.name],
                    mux_expr_at(&out.feed, word, out.width)
                ));
            }
        }
        text.push_str("              done_r <= '1';\n");
    } else {
        text.push_str("              done_r <= '0';\n");
        text.push_str(&format!("              state <= to_unsigned(1, {bits});\n"));
    }
    text.push_str("            end if;\n");
    for state in 1..=length as usize {
        let word = &design.controller.words[state];
        text.push_str(&format!("          when {state} =>\n"));
        for (pos, register) in design.registers.iter().enumerate() {
            if word.reg_enables[pos] {
                text.push_str(&format!(
                    "            r{} <= {};\n",
                    register.index,
                    mux_expr_at(&register.feed, word, register.width)
                ));
            }
        }
        let mut capture_slot = 0;
        for fu in &design.fus {
            if fu.latency >= 2 {
                if word.fu_captures[capture_slot] {
                    let base = format!("{}{}", fu.kind.name(), fu.instance);
                    for (position, _) in fu.operand_feeds.iter().enumerate() {
                        let suffix = ["a", "b"][position];
                        text.push_str(&format!(
                            "            {base}_cap_{suffix} <= {base}_{suffix};\n"
                        ));
                    }
                }
                capture_slot += 1;
            }
        }
        for (pos, out) in design.output_regs.iter().enumerate() {
            if word.out_enables[pos] {
                text.push_str(&format!(
                    "            {} <= {};\n",
                    out_regs[&out.name],
                    mux_expr_at(&out.feed, word, out.width)
                ));
            }
        }
        if state as u32 == length {
            text.push_str("            done_r <= '1';\n");
            text.push_str("            state <= (others => '0');\n");
        } else {
            text.push_str(&format!(
                "            state <= to_unsigned({}, {bits});\n",
                state + 1
            ));
        }
    }
    text.push_str("          when others =>\n            state <= (others => '0');\n");
    text.push_str("        end case;\n      end if;\n    end if;\n  end process;\n");
    text.push_str("end rtl;\n");
    text
}

fn shift_expr(op: &str, a: &str, b: &str, width: u32) -> String {
    if width <= 6 {
        // Amounts are bounded by 2^width - 1 < 64 and fit an integer.
        format!("{op}({a}, to_integer({b}))")
    } else {
        let max64 = binary_literal(64 & width_mask(width), width);
        format!(
            "to_unsigned(0, {width}) when {b} >= {max64} else {op}({a}, to_integer({b}(6 downto 0)))"
        )
    }
}
