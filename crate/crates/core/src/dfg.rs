// SPDX-License-Identifier: Apache-2.0

//! Dataflow graph construction and analyses.
//!
//! The graph is a value-flow representation: every operator occurrence in
//! the source becomes exactly one operation node (no common-subexpression
//! merging), inputs and constants are leaf nodes, and one `Output` node per
//! output port consumes the port's final value.

use std::collections::{BTreeMap, BinaryHeap};

use crate::frontend::{BinOp, Direction, Expr, Program, UnaryOp, WidthReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "n{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Input,
    Const,
    Add,
    Sub,
    Mul,
    And,
    Or,
    Xor,
    Not,
    Shl,
    Shr,
    Output,
}

impl NodeKind {
    /// Operation nodes occupy a functional unit for their latency;
    /// inputs, constants, and outputs are wiring.
    pub fn is_operation(self) -> bool {
        !matches!(self, NodeKind::Input | NodeKind::Const | NodeKind::Output)
    }

    pub fn arity(self) -> usize {
        match self {
            NodeKind::Input | NodeKind::Const => 0,
            NodeKind::Not | NodeKind::Output => 1,
            _ => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NodeKind::Input => "input",
            NodeKind::Const => "const",
            NodeKind::Add => "add",
            NodeKind::Sub => "sub",
            NodeKind::Mul => "mul",
            NodeKind::And => "and",
            NodeKind::Or => "or",
            NodeKind::Xor => "xor",
            NodeKind::Not => "not",
            NodeKind::Shl => "shl",
            NodeKind::Shr => "shr",
            NodeKind::Output => "output",
        }
    }

    /// Parses an operation-kind name as used on the command line.
    pub fn parse_operation(name: &str) -> Option<NodeKind> {
        let kind = match name {
            "add" => NodeKind::Add,
            "sub" => NodeKind::Sub,
            "mul" => NodeKind::Mul,
            "and" => NodeKind::And,
            "or" => NodeKind::Or,
            "xor" => NodeKind::Xor,
            "not" => NodeKind::Not,
            "shl" => NodeKind::Shl,
            "shr" => NodeKind::Shr,
            _ => return None,
        };
        Some(kind)
    }

    /// All operation kinds, in a fixed order.
    pub const OPERATIONS: [NodeKind; 9] = [
        NodeKind::Add,
        NodeKind::Sub,
        NodeKind::Mul,
        NodeKind::And,
        NodeKind::Or,
        NodeKind::Xor,
        NodeKind::Not,
        NodeKind::Shl,
        NodeKind::Shr,
    ];
}

impl From<BinOp> for NodeKind {
    fn from(op: BinOp) -> Self {
        match op {
            BinOp::Add => NodeKind::Add,
            BinOp::Sub => NodeKind::Sub,
            BinOp::Mul => NodeKind::Mul,
            BinOp::And => NodeKind::And,
            BinOp::Or => NodeKind::Or,
            BinOp::Xor => NodeKind::Xor,
            BinOp::Shl => NodeKind::Shl,
            BinOp::Shr => NodeKind::Shr,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Node {
    pub id: NodeId,
    pub kind: NodeKind,
    pub width: u32,
    /// Port name for `Input`/`Output` nodes.
    pub name: Option<String>,
    /// Literal value for `Const` nodes.
    pub value: Option<u64>,
}

/// Directed dataflow edge: `from` produces the operand at `position` of
/// `to`. `width` is the effective operand width: the value is read modulo
/// `2^width` (narrowing variable copies are folded into this mask).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub from: NodeId,
    pub to: NodeId,
    pub position: usize,
    pub width: u32,
}

#[derive(Debug, Clone, Default)]
pub struct Dfg {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    /// Output port name → its `Output` node.
    pub outputs: BTreeMap<String, NodeId>,
    /// Write-before-read pairs between assignment root values induced by
    /// seq ordering.
    pub cycle_barriers: Vec<(NodeId, NodeId)>,
}

impl Dfg {
    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.0]
    }

    /// Operand edges of `id`, ordered by position.
    pub fn operands(&self, id: NodeId) -> Vec<Edge> {
        let mut ops: Vec<Edge> = self.edges.iter().filter(|e| e.to == id).copied().collect();
        ops.sort_by_key(|e| e.position);
        ops
    }

    /// Edges consuming the value of `id`.
    pub fn consumers(&self, id: NodeId) -> Vec<Edge> {
        self.edges
            .iter()
            .filter(|e| e.from == id)
            .copied()
            .collect()
    }

    pub fn operation_nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.iter().filter(|n| n.kind.is_operation())
    }

    pub fn operation_count(&self) -> usize {
        self.operation_nodes().count()
    }

    fn push_node(
        &mut self,
        kind: NodeKind,
        width: u32,
        name: Option<String>,
        value: Option<u64>,
    ) -> NodeId {
        let id = NodeId(self.nodes.len());
        self.nodes.push(Node {
            id,
            kind,
            width,
            name,
            value,
        });
        id
    }

    fn push_edge(&mut self, from: NodeId, to: NodeId, position: usize, width: u32) {
        self.edges.push(Edge {
            from,
            to,
            position,
            width,
        });
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum DfgError {
    #[error("dataflow graph contains a cycle involving {0}")]
    Cycle(NodeId),
}

/// Builds the dataflow graph of a width-checked program.
///
/// Assignments are processed in ascending cycle order so each variable
/// read binds to the latest write that committed in an earlier cycle.
/// Common subexpressions stay distinct.
pub fn build_dfg(program: &Program, _widths: &WidthReport) -> Dfg {
    let mut dfg = Dfg::default();

    let mut input_nodes: BTreeMap<&str, NodeId> = BTreeMap::new();
    for port in program
        .ports
        .iter()
        .filter(|p| p.direction == Direction::In)
    {
        let id = dfg.push_node(NodeKind::Input, port.width, Some(port.name.clone()), None);
        input_nodes.insert(port.name.as_str(), id);
    }

    // Latest committed write per variable: (offset, value node, value width).
    let mut writes: BTreeMap<&str, Vec<(u32, NodeId, u32)>> = BTreeMap::new();

    let mut assigns = program.assignments();
    assigns.sort_by_key(|a| (a.offset, a.index));

    for assign in &assigns {
        let dest_width = program.width_of(assign.target).expect("checked target");
        let mut barrier_sources = Vec::new();
        let root = build_expr(
            &mut dfg,
            assign.expr,
            dest_width,
            assign.offset,
            &input_nodes,
            &writes,
            &mut barrier_sources,
        );
        let (root_node, root_value_width) = root;
        let stored_width = root_value_width.min(dest_width);
        for source in barrier_sources {
            if source != root_node && !dfg.cycle_barriers.contains(&(source, root_node)) {
                dfg.cycle_barriers.push((source, root_node));
            }
        }
        writes
            .entry(assign.target)
            .or_default()
            .push((assign.offset, root_node, stored_width));
    }

    for port in program
        .ports
        .iter()
        .filter(|p| p.direction == Direction::Out)
    {
        let history = writes
            .get(port.name.as_str())
            .expect("checked output write");
        let &(_, value_node, value_width) = history
            .iter()
            .max_by_key(|(offset, _, _)| *offset)
            .expect("non-empty write history");
        let out = dfg.push_node(NodeKind::Output, port.width, Some(port.name.clone()), None);
        dfg.push_edge(value_node, out, 0, value_width.min(port.width));
        dfg.outputs.insert(port.name.clone(), out);
    }

    dfg
}

/// Returns the value node and its value width.
fn build_expr(
    dfg: &mut Dfg,
    expr: &Expr,
    width: u32,
    offset: u32,
    inputs: &BTreeMap<&str, NodeId>,
    writes: &BTreeMap<&str, Vec<(u32, NodeId, u32)>>,
    barriers: &mut Vec<NodeId>,
) -> (NodeId, u32) {
    match expr {
        Expr::Const(value) => {
            let id = dfg.push_node(NodeKind::Const, width, None, Some(*value));
            (id, width)
        }
        Expr::Var(name) => {
            if let Some(&id) = inputs.get(name.as_str()) {
                let input_width = dfg.node(id).width;
                (id, input_width.min(width))
            } else {
                let history = writes.get(name.as_str()).expect("validated read");
                let &(_, node, value_width) = history
                    .iter()
                    .filter(|(w, _, _)| *w < offset)
                    .max_by_key(|(w, _, _)| *w)
                    .expect("validated read-before-write");
                barriers.push(node);
                (node, value_width.min(width))
            }
        }
        Expr::Unary {
            op: UnaryOp::Not,
            operand,
        } => {
            let (operand_node, operand_width) =
                build_expr(dfg, operand, width, offset, inputs, writes, barriers);
            let id = dfg.push_node(NodeKind::Not, width, None, None);
            dfg.push_edge(operand_node, id, 0, operand_width);
            (id, width)
        }
        Expr::Binary { op, lhs, rhs } => {
            let (lhs_node, lhs_width) =
                build_expr(dfg, lhs, width, offset, inputs, writes, barriers);
            let (rhs_node, rhs_width) =
                build_expr(dfg, rhs, width, offset, inputs, writes, barriers);
            let id = dfg.push_node(NodeKind::from(*op), width, None, None);
            dfg.push_edge(lhs_node, id, 0, lhs_width);
            dfg.push_edge(rhs_node, id, 1, rhs_width);
            (id, width)
        }
    }
}

/// Rewrites `Mul` nodes with a power-of-two constant operand into `Shl`
/// nodes. Off by default; enabled by the `--strength-reduce` flag.
pub fn strength_reduce(dfg: &mut Dfg) {
    for index in 0..dfg.nodes.len() {
        let id = NodeId(index);
        if dfg.nodes[index].kind != NodeKind::Mul {
            continue;
        }
        let operands = dfg.operands(id);
        let const_side = operands.iter().find(|e| {
            let n = dfg.node(e.from);
            n.kind == NodeKind::Const && n.value.map(|v| v.is_power_of_two()).unwrap_or(false)
        });
        let Some(&const_edge) = const_side else {
            continue;
        };
        let other = operands
            .iter()
            .find(|e| e.position != const_edge.position)
            .copied()
            .expect("mul has two operands");
        let shift = dfg.node(const_edge.from).value.unwrap().trailing_zeros() as u64;
        let width = dfg.nodes[index].width;
        let amount = dfg.push_node(NodeKind::Const, width, None, Some(shift));
        dfg.nodes[index].kind = NodeKind::Shl;
        dfg.edges.retain(|e| e.to != id);
        dfg.push_edge(other.from, id, 0, other.width);
        dfg.push_edge(amount, id, 1, width);
    }
}

/// Deterministic topological order: producers before consumers, ties
/// broken by ascending node id.
pub fn topo_order(dfg: &Dfg) -> Result<Vec<NodeId>, DfgError> {
    let n = dfg.nodes.len();
    let mut indegree = vec![0usize; n];
    for edge in &dfg.edges {
        indegree[edge.to.0] += 1;
    }
    let mut ready: BinaryHeap<std::cmp::Reverse<usize>> = indegree
        .iter()
        .enumerate()
        .filter(|(_, &d)| d == 0)
        .map(|(i, _)| std::cmp::Reverse(i))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(std::cmp::Reverse(index)) = ready.pop() {
        order.push(NodeId(index));
        for edge in dfg.consumers(NodeId(index)) {
            indegree[edge.to.0] -= 1;
            if indegree[edge.to.0] == 0 {
                ready.push(std::cmp::Reverse(edge.to.0));
            }
        }
    }
    if order.len() != n {
        let stuck = indegree
            .iter()
            .position(|&d| d > 0)
            .map(NodeId)
            .expect("cycle leaves a positive indegree");
        return Err(DfgError::Cycle(stuck));
    }
    Ok(order)
}

/// Longest weighted path over operation nodes; the lower bound on any
/// schedule length. `latencies` must cover every operation kind present.
pub fn critical_path(dfg: &Dfg, latencies: &BTreeMap<NodeKind, u32>) -> u32 {
    let order = topo_order(dfg).expect("acyclic dataflow graph");
    let mut finish = vec![0u32; dfg.nodes.len()];
    let mut best = 0;
    for id in order {
        let node = dfg.node(id);
        let ready = dfg
            .operands(id)
            .iter()
            .map(|e| finish[e.from.0])
            .max()
            .unwrap_or(0);
        let latency = if node.kind.is_operation() {
            *latencies
                .get(&node.kind)
                .unwrap_or_else(|| panic!("no latency for kind {}", node.kind.name()))
        } else {
            0
        };
        finish[id.0] = ready + latency;
        best = best.max(finish[id.0]);
    }
    best
}

/// DOT dump for documentation and debugging.
pub fn dfg_to_dot(dfg: &Dfg) -> String {
    let mut out = String::from("digraph dfg {\n  rankdir=TB;\n");
    for node in &dfg.nodes {
        let label = match node.kind {
            NodeKind::Input => format!("in {}", node.name.as_deref().unwrap_or("?")),
            NodeKind::Output => format!("out {}", node.name.as_deref().unwrap_or("?")),
            NodeKind::Const => format!("const {}", node.value.unwrap_or(0)),
            kind => kind.name().to_string(),
        };
        out.push_str(&format!(
            "  {} [label=\"{}\\nw{}\"];\n",
            node.id, label, node.width
        ));
    }
    for edge in &dfg.edges {
        out.push_str(&format!(
            "  {} -> {} [label=\"{}\"];\n",
            edge.from, edge.to, edge.position
        ));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{check_widths, parse_source};

    fn build(source: &str) -> Dfg {
        let program = parse_source(source).unwrap();
        let widths = check_widths(&program).unwrap();
        build_dfg(&program, &widths)
    }

    const S_EXAMPLE: &str =
        "module s_example (in a: 4, in b: 4, out s: 9) { s = a*a + b*b + 4*b; }";

    fn unit_latencies() -> BTreeMap<NodeKind, u32> {
        NodeKind::OPERATIONS.iter().map(|&k| (k, 1)).collect()
    }

    #[test]
    fn s_example_has_paper_shape() {
        let dfg = build(S_EXAMPLE);
        let count = |kind: NodeKind| dfg.nodes.iter().filter(|n| n.kind == kind).count();
        assert_eq!(count(NodeKind::Mul), 3);
        assert_eq!(count(NodeKind::Add), 2);
        assert_eq!(count(NodeKind::Input), 2);
        assert_eq!(count(NodeKind::Const), 1);
        assert_eq!(count(NodeKind::Output), 1);
        assert_eq!(dfg.operation_count(), 5);
    }

    #[test]
    fn identity_program_is_wiring_only() {
        let dfg = build("module m (in a: 4, out s: 4) { s = a; }");
        assert_eq!(dfg.operation_count(), 0);
        assert_eq!(dfg.nodes.len(), 2); // input + output
        assert_eq!(dfg.edges.len(), 1);
    }

    #[test]
    fn seq_def_use_becomes_an_edge() {
        let dfg = build(
            "module m (in a: 4, in b: 4, in c: 4, out s: 4) {
               var t: 4;
               seq { t = a + b; s = t + c; }
             }",
        );
        let adds: Vec<&Node> = dfg
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Add)
            .collect();
        assert_eq!(adds.len(), 2);
        let (first, second) = (adds[0].id, adds[1].id);
        assert!(dfg.edges.iter().any(|e| e.from == first && e.to == second));
        assert_eq!(dfg.cycle_barriers, vec![(first, second)]);
    }

    #[test]
    fn operation_count_matches_operator_occurrences() {
        let program = parse_source("module m (in a: 4, out s: 8) { s = a*a + a*a; }").unwrap();
        let widths = check_widths(&program).unwrap();
        let dfg = build_dfg(&program, &widths);
        // No CSE: both a*a products stay distinct.
        let occurrences: usize = program
            .assignments()
            .iter()
            .map(|a| a.expr.operator_count())
            .sum();
        assert_eq!(dfg.operation_count(), occurrences);
        assert_eq!(occurrences, 3);
    }

    #[test]
    fn narrowing_copy_masks_the_read() {
        let dfg = build(
            "module m (in a: 4, out s: 9) {
               var t: 2;
               seq { t = a; s = t + 1; }
             }",
        );
        let add = dfg.nodes.iter().find(|n| n.kind == NodeKind::Add).unwrap();
        let operands = dfg.operands(add.id);
        // The read of t flows from the input node but is masked to t's width.
        assert_eq!(dfg.node(operands[0].from).kind, NodeKind::Input);
        assert_eq!(operands[0].width, 2);
    }

    #[test]
    fn topo_order_is_deterministic_and_respects_edges() {
        let dfg = build(S_EXAMPLE);
        let order = topo_order(&dfg).unwrap();
        assert_eq!(order.len(), dfg.nodes.len());
        let position: BTreeMap<NodeId, usize> =
            order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        for edge in &dfg.edges {
            assert!(position[&edge.from] < position[&edge.to]);
        }
        // Every Mul feeding an Add precedes it.
        for node in dfg.nodes.iter().filter(|n| n.kind == NodeKind::Add) {
            for op in dfg.operands(node.id) {
                assert!(position[&op.from] < position[&node.id]);
            }
        }
    }

    #[test]
    fn topo_order_of_empty_graph_is_empty() {
        let dfg = Dfg::default();
        assert!(topo_order(&dfg).unwrap().is_empty());
    }

    #[test]
    fn topo_order_of_chain() {
        let dfg = build(
            "module m (in a: 4, out s: 4) {
               var x: 4; var y: 4;
               seq { x = ~a; y = ~x; s = ~y; }
             }",
        );
        let nots: Vec<NodeId> = dfg
            .nodes
            .iter()
            .filter(|n| n.kind == NodeKind::Not)
            .map(|n| n.id)
            .collect();
        let order = topo_order(&dfg).unwrap();
        let position: BTreeMap<NodeId, usize> =
            order.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        assert!(position[&nots[0]] < position[&nots[1]]);
        assert!(position[&nots[1]] < position[&nots[2]]);
    }

    #[test]
    fn cycle_is_reported() {
        let mut dfg = build("module m (in a: 4, out s: 4) { s = a + 1; }");
        let add = dfg
            .nodes
            .iter()
            .find(|n| n.kind == NodeKind::Add)
            .unwrap()
            .id;
        dfg.push_edge(add, add, 0, 4);
        assert!(matches!(topo_order(&dfg), Err(DfgError::Cycle(_))));
    }

    #[test]
    fn critical_path_of_s_example_is_three() {
        // Exhaustive path enumeration over the five operation nodes gives
        // mul -> add -> add as the longest chain.
        let dfg = build(S_EXAMPLE);
        assert_eq!(critical_path(&dfg, &unit_latencies()), 3);
    }

    #[test]
    fn critical_path_trivia() {
        let single = build("module m (in a: 4, in b: 4, out s: 4) { s = a + b; }");
        assert_eq!(critical_path(&single, &unit_latencies()), 1);
        let independent = build(
            "module m (in a: 4, in b: 4, out x: 8, out y: 8) {
               par { x = a * a; y = b * b; }
             }",
        );
        assert_eq!(critical_path(&independent, &unit_latencies()), 1);
    }

    #[test]
    fn critical_path_weights_by_latency() {
        let dfg = build(S_EXAMPLE);
        let mut lats = unit_latencies();
        lats.insert(NodeKind::Mul, 3);
        // mul(3) -> add(1) -> add(1)
        assert_eq!(critical_path(&dfg, &lats), 5);
    }

    #[test]
    fn strength_reduce_rewrites_pow2_mul() {
        let mut dfg = build(S_EXAMPLE);
        strength_reduce(&mut dfg);
        let count = |kind: NodeKind| dfg.nodes.iter().filter(|n| n.kind == kind).count();
        assert_eq!(count(NodeKind::Mul), 2); // a*a and b*b survive
        assert_eq!(count(NodeKind::Shl), 1); // 4*b becomes b << 2
        let shl = dfg.nodes.iter().find(|n| n.kind == NodeKind::Shl).unwrap();
        let operands = dfg.operands(shl.id);
        assert_eq!(dfg.node(operands[0].from).kind, NodeKind::Input);
        assert_eq!(dfg.node(operands[1].from).value, Some(2));
        assert!(topo_order(&dfg).is_ok());
    }

    #[test]
    fn dot_dump_mentions_every_node() {
        let dfg = build(S_EXAMPLE);
        let dot = dfg_to_dot(&dfg);
        for node in &dfg.nodes {
            assert!(dot.contains(&node.id.to_string()));
        }
    }
}
