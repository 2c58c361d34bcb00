// SPDX-License-Identifier: Apache-2.0

mod common;

use bdlc_core::dfg::build_dfg;
use bdlc_core::frontend::{check_widths, parse_source};
use bdlc_core::sim::SplitMix64;
use common::random_program;

#[test]
fn generator_produces_operation_rich_programs() {
    let mut rng = SplitMix64::new(0xC0511);
    let mut total_ops = 0usize;
    let mut with_ops = 0usize;
    let mut multi_step = 0usize;
    for _ in 0..200 {
        let spec = random_program(&mut rng, 12, 8);
        let program = parse_source(&spec.source).unwrap();
        let widths = check_widths(&program).unwrap();
        let dfg = build_dfg(&program, &widths);
        total_ops += dfg.operation_count();
        if dfg.operation_count() > 0 {
            with_ops += 1;
        }
        if program.assignments().len() > 1 {
            multi_step += 1;
        }
    }
    println!(
        "avg ops {:.1}, {}/200 with ops, {}/200 multi-assignment",
        total_ops as f64 / 200.0,
        with_ops,
        multi_step
    );
    assert!(total_ops as f64 / 200.0 >= 3.0, "generator too degenerate");
    assert!(with_ops >= 150);
    assert!(multi_step >= 100);
}
