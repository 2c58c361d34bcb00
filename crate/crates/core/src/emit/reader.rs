// SPDX-License-Identifier: Apache-2.0

//! Reader for the tool's own emitted gate-instantiation subset. This is
//! not a general Verilog parser: it accepts exactly the shape produced by
//! [`super::emit_verilog_netlist`], enough for round-trip checks and the
//! `check` command.

use crate::logic::{Gate, GateNetlist, GateOp, NetRef, OutputBinding};

use super::EmitError;

fn fail(line: usize, message: impl Into<String>) -> EmitError {
    EmitError::VerilogFormat {
        line,
        message: message.into(),
    }
}

fn split_names(list: &str) -> Vec<String> {
    list.split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect()
}

pub fn read_verilog_netlist(text: &str) -> Result<GateNetlist, EmitError> {
    let mut netlist: Option<GateNetlist> = None;
    let mut declared_outputs: Vec<String> = Vec::new();
    let mut aliases: Vec<(String, NetRef)> = Vec::new();
    let mut ended = false;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split("//").next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(fail(line_no, "content after endmodule"));
        }
        if let Some(rest) = line.strip_prefix("module ") {
            if netlist.is_some() {
                return Err(fail(line_no, "only one module per file"));
            }
            let open = rest.find('(').ok_or_else(|| fail(line_no, "missing ("))?;
            let close = rest
                .rfind(");")
                .ok_or_else(|| fail(line_no, "missing );"))?;
            let name = rest[..open].trim().to_string();
            if name.is_empty() {
                return Err(fail(line_no, "missing module name"));
            }
            // The port list repeats the input/output declarations below.
            let _ports = split_names(&rest[open + 1..close]);
            netlist = Some(GateNetlist::new(name));
            continue;
        }
        let module = netlist
            .as_mut()
            .ok_or_else(|| fail(line_no, "content before module header"))?;
        if line == "endmodule" {
            ended = true;
            continue;
        }
        if let Some(rest) = line.strip_suffix(';') {
            let rest = rest.trim();
            if let Some(names) = rest.strip_prefix("input ") {
                module.inputs.extend(split_names(names));
            } else if let Some(names) = rest.strip_prefix("output ") {
                declared_outputs.extend(split_names(names));
            } else if let Some(_names) = rest.strip_prefix("wire ") {
                // Internal nets are reconstructed from gate outputs.
            } else if let Some(assign) = rest.strip_prefix("assign ") {
                let (lhs, rhs) = assign
                    .split_once('=')
                    .ok_or_else(|| fail(line_no, "malformed assign"))?;
                let driver = match rhs.trim() {
                    "1'b0" => NetRef::Const0,
                    "1'b1" => NetRef::Const1,
                    net => NetRef::Net(net.to_string()),
                };
                aliases.push((lhs.trim().to_string(), driver));
            } else {
                // Gate instantiation: `<op> <name> (out, in...)`.
                let open = rest
                    .find('(')
                    .ok_or_else(|| fail(line_no, "expected a gate instantiation"))?;
                let close = rest
                    .rfind(')')
                    .ok_or_else(|| fail(line_no, "missing ) in instantiation"))?;
                let head: Vec<&str> = rest[..open].split_whitespace().collect();
                if head.len() != 2 {
                    return Err(fail(line_no, "expected `<gate> <instance> (...)`"));
                }
                let op = GateOp::from_verilog_name(head[0])
                    .ok_or_else(|| fail(line_no, format!("unknown gate `{}`", head[0])))?;
                let mut nets = split_names(&rest[open + 1..close]);
                if nets.len() < 2 {
                    return Err(fail(line_no, "gate needs an output and inputs"));
                }
                let output = nets.remove(0);
                module.gates.push(Gate {
                    op,
                    inputs: nets,
                    output,
                });
            }
        } else {
            return Err(fail(line_no, "expected a `;`-terminated statement"));
        }
    }

    let mut module = netlist.ok_or_else(|| fail(1, "no module found"))?;
    if !ended {
        return Err(fail(text.lines().count().max(1), "missing endmodule"));
    }
    for name in declared_outputs {
        let driver = aliases
            .iter()
            .find(|(alias, _)| *alias == name)
            .map(|(_, driver)| driver.clone())
            .unwrap_or(NetRef::Net(name.clone()));
        module.outputs.push(OutputBinding { name, driver });
    }
    module
        .validate()
        .map_err(|e| fail(1, format!("invalid netlist: {e}")))?;
    Ok(module)
}
