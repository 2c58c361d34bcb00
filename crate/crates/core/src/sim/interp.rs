// SPDX-License-Identifier: Apache-2.0

//! Behavioral interpreter with source-level timing: one cycle per
//! assignment, seq sums its children, par takes the maximum. Assignments
//! sharing a cycle read the previous cycle's values and commit together.

use std::collections::BTreeMap;

use crate::frontend::{BinOp, Direction, Expr, Program, UnaryOp};
use crate::width_mask;

use super::{SimError, SimResult};

fn eval_expr(expr: &Expr, width: u32, env: &BTreeMap<String, u64>) -> u64 {
    let mask = width_mask(width);
    match expr {
        Expr::Const(value) => value & mask,
        Expr::Var(name) => env[name] & mask,
        Expr::Unary {
            op: UnaryOp::Not,
            operand,
        } => !eval_expr(operand, width, env) & mask,
        Expr::Binary { op, lhs, rhs } => {
            let a = eval_expr(lhs, width, env);
            let b = eval_expr(rhs, width, env);
            match op {
                BinOp::Add => a.wrapping_add(b) & mask,
                BinOp::Sub => a.wrapping_sub(b) & mask,
                BinOp::Mul => a.wrapping_mul(b) & mask,
                BinOp::And => a & b,
                BinOp::Or => a | b,
                BinOp::Xor => a ^ b,
                BinOp::Shl => {
                    if b >= 64 {
                        0
                    } else {
                        (a << b) & mask
                    }
                }
                BinOp::Shr => {
                    if b >= 64 {
                        0
                    } else {
                        a >> b
                    }
                }
            }
        }
    }
}

/// Checks that `inputs` covers exactly the `in` ports with fitting values.
pub fn validate_inputs(program: &Program, inputs: &BTreeMap<String, u64>) -> Result<(), SimError> {
    for port in program.input_ports() {
        match inputs.get(&port.name) {
            None => {
                return Err(SimError::Input(format!(
                    "missing value for input `{}`",
                    port.name
                )))
            }
            Some(&value) => {
                if value > width_mask(port.width) {
                    return Err(SimError::Input(format!(
                        "value {value} does not fit input `{}` of width {}",
                        port.name, port.width
                    )));
                }
            }
        }
    }
    for name in inputs.keys() {
        let is_input = program.input_ports().any(|p| &p.name == name);
        if !is_input {
            return Err(SimError::Input(format!("`{name}` is not an input port")));
        }
    }
    Ok(())
}

/// Executes the program on one input vector. Cycle count follows the
/// structural rule; output values follow the modulo-`2^w` semantics.
pub fn interpret(program: &Program, inputs: &BTreeMap<String, u64>) -> Result<SimResult, SimError> {
    validate_inputs(program, inputs)?;
    let mut env: BTreeMap<String, u64> = inputs.clone();

    let mut assigns = program.assignments();
    assigns.sort_by_key(|a| (a.offset, a.index));
    let total_cycles = program.body.cycle_count();

    let mut cursor = 0usize;
    for cycle in 0..total_cycles {
        let mut commits: Vec<(String, u64)> = Vec::new();
        while cursor < assigns.len() && assigns[cursor].offset == cycle {
            let assign = &assigns[cursor];
            let width = program.width_of(assign.target).expect("checked target");
            let value = eval_expr(assign.expr, width, &env);
            commits.push((assign.target.to_string(), value));
            cursor += 1;
        }
        for (target, value) in commits {
            env.insert(target, value);
        }
    }

    let outputs = program
        .ports
        .iter()
        .filter(|p| p.direction == Direction::Out)
        .map(|p| (p.name.clone(), env[&p.name]))
        .collect();
    Ok(SimResult {
        outputs,
        cycles: total_cycles,
        trace: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_source;

    fn inputs(pairs: &[(&str, u64)]) -> BTreeMap<String, u64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn s_example_computes_21_in_one_cycle() {
        let program =
            parse_source("module s_example (in a: 4, in b: 4, out s: 9) { s = a*a + b*b + 4*b; }")
                .unwrap();
        let result = interpret(&program, &inputs(&[("a", 3), ("b", 2)])).unwrap();
        assert_eq!(result.outputs["s"], 21);
        assert_eq!(result.cycles, 1);
    }

    #[test]
    fn par_takes_one_cycle_and_seq_takes_three() {
        let par = parse_source(
            "module m (out x: 4, out y: 4, out z: 4) { par { x = 1; y = 2; z = 3; } }",
        )
        .unwrap();
        let result = interpret(&par, &inputs(&[])).unwrap();
        assert_eq!(result.cycles, 1);
        let seq = parse_source(
            "module m (out x: 4, out y: 4, out z: 4) { seq { x = 1; y = 2; z = 3; } }",
        )
        .unwrap();
        let result = interpret(&seq, &inputs(&[])).unwrap();
        assert_eq!(result.cycles, 3);
        assert_eq!(result.outputs["z"], 3);
    }

    #[test]
    fn narrow_target_wraps_modulo() {
        let program =
            parse_source("module m (in a: 4, in b: 4, out s: 4) { s = a*a + b*b + 4*b; }").unwrap();
        let result = interpret(&program, &inputs(&[("a", 3), ("b", 2)])).unwrap();
        assert_eq!(result.outputs["s"], 21 % 16);
    }

    #[test]
    fn same_cycle_reads_see_previous_values() {
        // In the par, x and y swap through the registered semantics.
        let program = parse_source(
            "module m (in a: 4, in b: 4, out x: 4, out y: 4) {
               seq {
                 par { x = a; y = b; }
                 par { x = y; y = x; }
               }
             }",
        )
        .unwrap();
        let result = interpret(&program, &inputs(&[("a", 5), ("b", 9)])).unwrap();
        assert_eq!(result.outputs["x"], 9);
        assert_eq!(result.outputs["y"], 5);
        assert_eq!(result.cycles, 2);
    }

    #[test]
    fn later_offset_write_binds_reads_across_par_arms() {
        // z reads the x written by the sibling arm one cycle earlier.
        let program = parse_source(
            "module m (in a: 4, out z: 4, out w: 4) {
               par {
                 w = a;
                 seq { z = 1; z = w + 1; }
               }
             }",
        )
        .unwrap();
        let result = interpret(&program, &inputs(&[("a", 7)])).unwrap();
        assert_eq!(result.outputs["w"], 7);
        assert_eq!(result.outputs["z"], 8);
    }

    #[test]
    fn shift_semantics_are_total() {
        let program = parse_source(
            "module m (in a: 8, out x: 8, out y: 8) { par { x = a << 3; y = a >> 3; } }",
        )
        .unwrap();
        let result = interpret(&program, &inputs(&[("a", 0b1011_0101)])).unwrap();
        assert_eq!(result.outputs["x"], (0b1011_0101u64 << 3) & 0xFF);
        assert_eq!(result.outputs["y"], 0b0001_0110);
        // A shift amount at the width limit still evaluates (to zero).
        let wide = parse_source("module m (in a: 64, out x: 64) { x = a << 63; }").unwrap();
        let result = interpret(&wide, &inputs(&[("a", 3)])).unwrap();
        assert_eq!(result.outputs["x"], 1u64 << 63);
    }

    #[test]
    fn input_errors_are_reported() {
        let program = parse_source("module m (in a: 4, out s: 4) { s = a; }").unwrap();
        assert!(matches!(
            interpret(&program, &inputs(&[])),
            Err(SimError::Input(_))
        ));
        assert!(matches!(
            interpret(&program, &inputs(&[("a", 99)])),
            Err(SimError::Input(_))
        ));
        assert!(matches!(
            interpret(&program, &inputs(&[("a", 3), ("ghost", 0)])),
            Err(SimError::Input(_))
        ));
    }
}
