// SPDX-License-Identifier: Apache-2.0

//! Berkeley-PLA-subset reader and writer. The subset is completely
//! specified tables: `.i`, `.o`, optional `.ilb`/`.ob` names, rows of
//! 0/1 input and output bits, and an `.e` terminator. `#` comments and a
//! `.p` product count are accepted on input and ignored; don't-care
//! symbols are not part of the subset.

use std::collections::BTreeSet;

use crate::logic::{TruthTable, MAX_MINIMIZE_INPUTS};

use super::EmitError;

pub fn read_pla(text: &str) -> Result<TruthTable, EmitError> {
    let mut input_count: Option<usize> = None;
    let mut output_count: Option<usize> = None;
    let mut input_names: Option<Vec<String>> = None;
    let mut output_names: Option<Vec<String>> = None;
    let mut rows: Vec<(usize, String, String)> = Vec::new();
    let mut terminated = false;

    let fail = |line: usize, message: &str| -> EmitError {
        EmitError::PlaFormat {
            line,
            message: message.to_string(),
        }
    };

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if terminated {
            return Err(fail(line_no, "content after .e terminator"));
        }
        if let Some(rest) = line.strip_prefix('.') {
            let mut parts = rest.split_whitespace();
            let directive = parts.next().unwrap_or("");
            let args: Vec<&str> = parts.collect();
            match directive {
                "i" => {
                    let value = args
                        .first()
                        .and_then(|a| a.parse::<usize>().ok())
                        .ok_or_else(|| fail(line_no, "`.i` needs a count"))?;
                    input_count = Some(value);
                }
                "o" => {
                    let value = args
                        .first()
                        .and_then(|a| a.parse::<usize>().ok())
                        .ok_or_else(|| fail(line_no, "`.o` needs a count"))?;
                    if value == 0 {
                        return Err(fail(line_no, "`.o` must be positive"));
                    }
                    output_count = Some(value);
                }
                "ilb" => {
                    input_names = Some(args.iter().map(|s| s.to_string()).collect());
                }
                "ob" => {
                    output_names = Some(args.iter().map(|s| s.to_string()).collect());
                }
                "p" => {} // product count: accepted, ignored
                "e" => terminated = true,
                other => {
                    return Err(fail(line_no, &format!("unknown directive `.{other}`")));
                }
            }
            continue;
        }
        let mut parts = line.split_whitespace();
        let in_bits = parts.next().unwrap_or("").to_string();
        let out_bits = parts.next().unwrap_or("").to_string();
        if parts.next().is_some() || out_bits.is_empty() {
            return Err(fail(line_no, "rows are `<input bits> <output bits>`"));
        }
        rows.push((line_no, in_bits, out_bits));
    }

    if !terminated {
        return Err(fail(text.lines().count().max(1), "missing .e terminator"));
    }
    let n = input_count.ok_or_else(|| fail(1, "missing .i header"))?;
    let m = output_count.ok_or_else(|| fail(1, "missing .o header"))?;

    let inputs = match input_names {
        Some(names) => {
            if names.len() != n {
                return Err(fail(1, ".ilb name count does not match .i"));
            }
            names
        }
        None => (0..n).map(|i| format!("x{i}")).collect(),
    };
    let outputs = match output_names {
        Some(names) => {
            if names.len() != m {
                return Err(fail(1, ".ob name count does not match .o"));
            }
            names
        }
        None => (0..m).map(|i| format!("f{i}")).collect(),
    };

    let mut table = TruthTable::new(inputs, outputs.clone()).map_err(|e| EmitError::PlaFormat {
        line: 1,
        message: e.to_string(),
    })?;

    let mut seen_rows: BTreeSet<u32> = BTreeSet::new();
    for (line_no, in_bits, out_bits) in rows {
        if in_bits.len() != n || !in_bits.chars().all(|c| c == '0' || c == '1') {
            return Err(fail(line_no, &format!("input bits must be {n} of 0/1")));
        }
        if out_bits.len() != m || !out_bits.chars().all(|c| c == '0' || c == '1') {
            return Err(fail(line_no, &format!("output bits must be {m} of 0/1")));
        }
        let minterm = u32::from_str_radix(&in_bits, 2).expect("validated bits");
        if !seen_rows.insert(minterm) {
            return Err(fail(line_no, "duplicate input row"));
        }
        for (output, bit) in outputs.iter().zip(out_bits.chars()) {
            if bit == '1' {
                table
                    .set_minterm(output, minterm)
                    .map_err(|e| fail(line_no, &e.to_string()))?;
            }
        }
    }
    Ok(table)
}

/// Serializes a complete table: all `2^n` rows in ascending minterm
/// order.
pub fn write_pla(table: &TruthTable) -> Result<String, EmitError> {
    let n = table.input_count();
    if n > MAX_MINIMIZE_INPUTS {
        return Err(EmitError::TooManyInputs {
            inputs: n,
            limit: MAX_MINIMIZE_INPUTS,
        });
    }
    let mut out = String::new();
    out.push_str(&format!(".i {n}\n"));
    out.push_str(&format!(".o {}\n", table.outputs().len()));
    out.push_str(&format!(".ilb {}\n", table.inputs().join(" ")));
    out.push_str(&format!(".ob {}\n", table.outputs().join(" ")));
    for minterm in 0..table.row_count() {
        let mut row = String::new();
        for position in 0..n {
            row.push(if table.input_bit(minterm, position) {
                '1'
            } else {
                '0'
            });
        }
        row.push(' ');
        for output in table.outputs() {
            row.push(if table.value(output, minterm) {
                '1'
            } else {
                '0'
            });
        }
        out.push_str(&row);
        out.push('\n');
    }
    out.push_str(".e\n");
    Ok(out)
}
