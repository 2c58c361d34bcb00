// SPDX-License-Identifier: Apache-2.0

//! Width checking under the evaluate-at-destination-width rule.

use std::collections::BTreeMap;

use super::ast::{walk_expr_nodes, Expr, ExprId, Program};
use super::FrontendError;

/// Per-node evaluation widths. Every expression node of an accepted
/// program carries the width of the assignment target it feeds.
#[derive(Debug, Clone)]
pub struct WidthReport {
    node_widths: BTreeMap<ExprId, u32>,
}

impl WidthReport {
    pub fn width(&self, id: ExprId) -> u32 {
        self.node_widths[&id]
    }

    pub fn len(&self) -> usize {
        self.node_widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.node_widths.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ExprId, u32)> + '_ {
        self.node_widths.iter().map(|(&id, &w)| (id, w))
    }
}

/// Annotates every expression node with its evaluation width. Operands are
/// zero-extended (or truncated) to the destination width and every
/// operation is carried out modulo `2^w`. Constants must fit the
/// destination width.
pub fn check_widths(program: &Program) -> Result<WidthReport, FrontendError> {
    let assigns = program.assignments();
    let mut node_widths = BTreeMap::new();
    let mut failure = None;
    walk_expr_nodes(program, |id, assign_index, node| {
        let target = assigns[assign_index].target;
        let width = program
            .width_of(target)
            .expect("validated assignment target");
        node_widths.insert(id, width);
        if failure.is_none() {
            if let Expr::Const(value) = node {
                if width < 64 && *value >= 1u64 << width {
                    failure = Some(FrontendError::Width {
                        value: *value,
                        width,
                        target: target.to_string(),
                    });
                }
            }
        }
    });
    match failure {
        Some(err) => Err(err),
        None => Ok(WidthReport { node_widths }),
    }
}
