// SPDX-License-Identifier: Apache-2.0

//! Abstract syntax for BDL modules.

use std::fmt;

/// Direction of a module port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

/// A port declaration: `in a: 4` or `out s: 9`.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct PortDecl {
    pub name: String,
    pub direction: Direction,
    pub width: u32,
}

/// A local variable declaration: `var t: 8;`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub width: u32,
}

/// Binary operators, in increasing binding strength they appear in the
/// grammar as `| ^ & << >> + - *`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Or,
    Xor,
    And,
    Shl,
    Shr,
    Add,
    Sub,
    Mul,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Or => "|",
            BinOp::Xor => "^",
            BinOp::And => "&",
            BinOp::Shl => "<<",
            BinOp::Shr => ">>",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
        }
    }

    /// Precedence level, higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Or => 1,
            BinOp::Xor => 2,
            BinOp::And => 3,
            BinOp::Shl | BinOp::Shr => 4,
            BinOp::Add | BinOp::Sub => 5,
            BinOp::Mul => 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
}

/// Expression tree. Shift amounts are restricted to constant literals by
/// the parser.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Const(u64),
    Var(String),
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    /// Number of operator nodes (unary + binary) in the tree.
    pub fn operator_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 0,
            Expr::Unary { operand, .. } => 1 + operand.operator_count(),
            Expr::Binary { lhs, rhs, .. } => 1 + lhs.operator_count() + rhs.operator_count(),
        }
    }

    /// Pre-order visit of every node in the tree.
    pub fn walk<'a>(&'a self, f: &mut impl FnMut(&'a Expr)) {
        f(self);
        match self {
            Expr::Const(_) | Expr::Var(_) => {}
            Expr::Unary { operand, .. } => operand.walk(f),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.walk(f);
                rhs.walk(f);
            }
        }
    }
}

/// Statements: a single-cycle assignment or a seq/par composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Assign { target: String, expr: Expr },
    Seq(Vec<Stmt>),
    Par(Vec<Stmt>),
}

impl Stmt {
    /// Cycle count under the structural timing rule: an assignment takes
    /// one cycle, seq sums its children, par takes the maximum.
    pub fn cycle_count(&self) -> u32 {
        match self {
            Stmt::Assign { .. } => 1,
            Stmt::Seq(children) => children.iter().map(Stmt::cycle_count).sum(),
            Stmt::Par(children) => children.iter().map(Stmt::cycle_count).max().unwrap_or(0),
        }
    }
}

/// A parsed BDL module.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Program {
    pub name: String,
    pub ports: Vec<PortDecl>,
    pub locals: Vec<VarDecl>,
    pub body: Stmt,
}

impl Program {
    pub fn input_ports(&self) -> impl Iterator<Item = &PortDecl> {
        self.ports.iter().filter(|p| p.direction == Direction::In)
    }

    pub fn output_ports(&self) -> impl Iterator<Item = &PortDecl> {
        self.ports.iter().filter(|p| p.direction == Direction::Out)
    }

    /// Declared width of a port or local, if any.
    pub fn width_of(&self, name: &str) -> Option<u32> {
        self.ports
            .iter()
            .find(|p| p.name == name)
            .map(|p| p.width)
            .or_else(|| self.locals.iter().find(|v| v.name == name).map(|v| v.width))
    }

    /// All assignments in syntactic order, each tagged with the cycle
    /// offset at which it executes relative to the start of the body.
    pub fn assignments(&self) -> Vec<AssignRef<'_>> {
        let mut out = Vec::new();
        collect_assignments(&self.body, 0, &mut out);
        for (index, a) in out.iter_mut().enumerate() {
            a.index = index;
        }
        out
    }
}

/// One assignment site within a program body.
#[derive(Debug, Clone, Copy)]
pub struct AssignRef<'a> {
    /// Position in syntactic order, starting at 0.
    pub index: usize,
    /// Cycle offset relative to the body start at which this assignment
    /// executes (reads its operands and commits at end of cycle).
    pub offset: u32,
    pub target: &'a str,
    pub expr: &'a Expr,
}

fn collect_assignments<'a>(stmt: &'a Stmt, offset: u32, out: &mut Vec<AssignRef<'a>>) {
    match stmt {
        Stmt::Assign { target, expr } => out.push(AssignRef {
            index: 0,
            offset,
            target,
            expr,
        }),
        Stmt::Seq(children) => {
            let mut at = offset;
            for child in children {
                collect_assignments(child, at, out);
                at += child.cycle_count();
            }
        }
        Stmt::Par(children) => {
            for child in children {
                collect_assignments(child, offset, out);
            }
        }
    }
}

/// Identifier of an expression node, assigned by a pre-order walk over the
/// assignments of a program in syntactic order. Shared between the width
/// checker and the dataflow-graph builder so annotations line up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExprId(pub usize);

/// Walks every expression node of every assignment in numbering order,
/// calling `f(id, assignment_index, node)`.
pub fn walk_expr_nodes<'a>(program: &'a Program, mut f: impl FnMut(ExprId, usize, &'a Expr)) {
    let mut next = 0usize;
    for assign in program.assignments() {
        assign.expr.walk(&mut |node| {
            f(ExprId(next), assign.index, node);
            next += 1;
        });
    }
}

// --- pretty printing ---------------------------------------------------

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "module {} (", self.name)?;
        for (i, port) in self.ports.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let dir = match port.direction {
                Direction::In => "in",
                Direction::Out => "out",
            };
            write!(f, "{} {}: {}", dir, port.name, port.width)?;
        }
        writeln!(f, ") {{")?;
        for local in &self.locals {
            writeln!(f, "  var {}: {};", local.name, local.width)?;
        }
        write_stmt(f, &self.body, 1)?;
        writeln!(f, "}}")
    }
}

fn write_stmt(f: &mut fmt::Formatter<'_>, stmt: &Stmt, depth: usize) -> fmt::Result {
    let pad = "  ".repeat(depth);
    match stmt {
        Stmt::Assign { target, expr } => writeln!(f, "{pad}{target} = {};", ExprPrinter(expr, 0)),
        Stmt::Seq(children) => {
            writeln!(f, "{pad}seq {{")?;
            for child in children {
                write_stmt(f, child, depth + 1)?;
            }
            writeln!(f, "{pad}}}")
        }
        Stmt::Par(children) => {
            writeln!(f, "{pad}par {{")?;
            for child in children {
                write_stmt(f, child, depth + 1)?;
            }
            writeln!(f, "{pad}}}")
        }
    }
}

struct ExprPrinter<'a>(&'a Expr, u8);

impl fmt::Display for ExprPrinter<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ExprPrinter(expr, min_prec) = *self;
        match expr {
            Expr::Const(v) => write!(f, "{v}"),
            Expr::Var(name) => write!(f, "{name}"),
            Expr::Unary { operand, .. } => write!(f, "~{}", ExprPrinter(operand, 7)),
            Expr::Binary { op, lhs, rhs } => {
                let prec = op.precedence();
                let need_parens = prec < min_prec;
                if need_parens {
                    write!(f, "(")?;
                }
                // Left-associative: the right operand needs strictly
                // higher precedence to avoid re-association on reparse.
                write!(
                    f,
                    "{} {} {}",
                    ExprPrinter(lhs, prec),
                    op.symbol(),
                    ExprPrinter(rhs, prec + 1)
                )?;
                if need_parens {
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// Renders a program as canonical BDL source text. `parse` of the result
/// yields a structurally equal program.
pub fn pretty_print(program: &Program) -> String {
    program.to_string()
}
