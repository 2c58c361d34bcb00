// SPDX-License-Identifier: Apache-2.0

//! Recursive-descent parser and semantic checks for BDL.
//!
//! Grammar:
//!
//! ```text
//! module   ::= "module" ident "(" [portdecl {"," portdecl}] ")"
//!              "{" {vardecl} stmt "}"
//! portdecl ::= ("in" | "out") ident ":" width
//! vardecl  ::= "var" ident ":" width ";"
//! stmt     ::= assign ";" | "seq" "{" {stmt} "}" | "par" "{" {stmt} "}"
//! assign   ::= ident "=" expr
//! expr     ::= precedence over | ^ & << >> + - * ~ with parentheses
//! ```

use std::collections::{BTreeMap, BTreeSet};

use super::ast::{BinOp, Direction, Expr, PortDecl, Program, Stmt, UnaryOp, VarDecl};
use super::lexer::{literal_value, tokenize, Token, TokenKind};
use super::FrontendError;

/// Parses a token stream into a checked [`Program`]. All `Program` and
/// `Stmt` invariants hold on success.
pub fn parse(tokens: &[Token]) -> Result<Program, FrontendError> {
    let mut parser = Parser { tokens, pos: 0 };
    let program = parser.parse_module()?;
    validate(&program)?;
    Ok(program)
}

/// Convenience wrapper: tokenize then parse.
pub fn parse_source(source: &str) -> Result<Program, FrontendError> {
    parse(&tokenize(source)?)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&'a Token> {
        let token = self.tokens.get(self.pos);
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn error(&self, expected: &str) -> FrontendError {
        let (line, column, found) = match self.peek() {
            Some(t) => (t.line, t.column, format!("`{}`", t.text)),
            None => {
                let (line, column) = self
                    .tokens
                    .last()
                    .map(|t| (t.line, t.column + t.text.len() as u32))
                    .unwrap_or((1, 1));
                (line, column, "end of input".to_string())
            }
        };
        FrontendError::Parse {
            line,
            column,
            expected: expected.to_string(),
            found,
        }
    }

    fn expect(&mut self, kind: TokenKind, text: &str) -> Result<&'a Token, FrontendError> {
        match self.peek() {
            Some(t) if t.is(kind, text) => Ok(self.advance().unwrap()),
            _ => Err(self.error(&format!("`{text}`"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> Result<String, FrontendError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                let text = t.text.clone();
                self.advance();
                Ok(text)
            }
            _ => Err(self.error(what)),
        }
    }

    fn expect_width(&mut self) -> Result<u32, FrontendError> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Int => {
                let value = literal_value(&t.text);
                let (line, column) = (t.line, t.column);
                self.advance();
                if !(1..=64).contains(&value) {
                    return Err(FrontendError::Semantic {
                        message: format!("width {value} out of range [1, 64] at {line}:{column}"),
                    });
                }
                Ok(value as u32)
            }
            _ => Err(self.error("width literal")),
        }
    }

    fn parse_module(&mut self) -> Result<Program, FrontendError> {
        self.expect(TokenKind::Keyword, "module")?;
        let name = self.expect_ident("module name")?;
        self.expect(TokenKind::Punct, "(")?;
        let mut ports = Vec::new();
        if !matches!(self.peek(), Some(t) if t.is(TokenKind::Punct, ")")) {
            loop {
                ports.push(self.parse_port()?);
                if matches!(self.peek(), Some(t) if t.is(TokenKind::Punct, ",")) {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(TokenKind::Punct, ")")?;
        self.expect(TokenKind::Punct, "{")?;
        let mut locals = Vec::new();
        while matches!(self.peek(), Some(t) if t.is(TokenKind::Keyword, "var")) {
            self.advance();
            let name = self.expect_ident("variable name")?;
            self.expect(TokenKind::Punct, ":")?;
            let width = self.expect_width()?;
            self.expect(TokenKind::Punct, ";")?;
            locals.push(VarDecl { name, width });
        }
        let body = self.parse_stmt()?;
        self.expect(TokenKind::Punct, "}")?;
        if self.pos != self.tokens.len() {
            return Err(self.error("end of input"));
        }
        Ok(Program {
            name,
            ports,
            locals,
            body,
        })
    }

    fn parse_port(&mut self) -> Result<PortDecl, FrontendError> {
        let direction = match self.peek() {
            Some(t) if t.is(TokenKind::Keyword, "in") => Direction::In,
            Some(t) if t.is(TokenKind::Keyword, "out") => Direction::Out,
            _ => return Err(self.error("`in` or `out`")),
        };
        self.advance();
        let name = self.expect_ident("port name")?;
        self.expect(TokenKind::Punct, ":")?;
        let width = self.expect_width()?;
        Ok(PortDecl {
            name,
            direction,
            width,
        })
    }

    fn parse_stmt(&mut self) -> Result<Stmt, FrontendError> {
        match self.peek() {
            Some(t) if t.is(TokenKind::Keyword, "seq") => {
                self.advance();
                Ok(Stmt::Seq(self.parse_block()?))
            }
            Some(t) if t.is(TokenKind::Keyword, "par") => {
                self.advance();
                Ok(Stmt::Par(self.parse_block()?))
            }
            Some(t) if t.kind == TokenKind::Ident => {
                let target = self.expect_ident("assignment target")?;
                self.expect(TokenKind::Op, "=")?;
                let expr = self.parse_expr(1)?;
                self.expect(TokenKind::Punct, ";")?;
                Ok(Stmt::Assign { target, expr })
            }
            _ => Err(self.error("statement (`seq`, `par`, or assignment)")),
        }
    }

    fn parse_block(&mut self) -> Result<Vec<Stmt>, FrontendError> {
        self.expect(TokenKind::Punct, "{")?;
        let mut children = Vec::new();
        while !matches!(self.peek(), Some(t) if t.is(TokenKind::Punct, "}")) {
            children.push(self.parse_stmt()?);
        }
        self.expect(TokenKind::Punct, "}")?;
        Ok(children)
    }

    fn peek_binop(&self) -> Option<BinOp> {
        let t = self.peek()?;
        if t.kind != TokenKind::Op {
            return None;
        }
        match t.text.as_str() {
            "|" => Some(BinOp::Or),
            "^" => Some(BinOp::Xor),
            "&" => Some(BinOp::And),
            "<<" => Some(BinOp::Shl),
            ">>" => Some(BinOp::Shr),
            "+" => Some(BinOp::Add),
            "-" => Some(BinOp::Sub),
            "*" => Some(BinOp::Mul),
            _ => None,
        }
    }

    fn parse_expr(&mut self, min_prec: u8) -> Result<Expr, FrontendError> {
        let mut lhs = self.parse_unary()?;
        while let Some(op) = self.peek_binop() {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.advance();
            let rhs = self.parse_expr(prec + 1)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> Result<Expr, FrontendError> {
        match self.peek() {
            Some(t) if t.is(TokenKind::Op, "~") => {
                self.advance();
                Ok(Expr::Unary {
                    op: UnaryOp::Not,
                    operand: Box::new(self.parse_unary()?),
                })
            }
            Some(t) if t.is(TokenKind::Punct, "(") => {
                self.advance();
                let inner = self.parse_expr(1)?;
                self.expect(TokenKind::Punct, ")")?;
                Ok(inner)
            }
            Some(t) if t.kind == TokenKind::Ident => {
                Ok(Expr::Var(self.expect_ident("identifier")?))
            }
            Some(t) if t.kind == TokenKind::Int => {
                let value = literal_value(&t.text);
                self.advance();
                Ok(Expr::Const(value))
            }
            _ => Err(self.error("expression")),
        }
    }
}

// --- semantic checks ----------------------------------------------------

fn validate(program: &Program) -> Result<(), FrontendError> {
    let mut seen = BTreeSet::new();
    for (name, what) in program
        .ports
        .iter()
        .map(|p| (&p.name, "port"))
        .chain(program.locals.iter().map(|v| (&v.name, "local")))
    {
        if !seen.insert(name.clone()) {
            return Err(FrontendError::Semantic {
                message: format!("duplicate declaration of {what} `{name}`"),
            });
        }
    }

    let inputs: BTreeSet<&str> = program.input_ports().map(|p| p.name.as_str()).collect();

    // Writes per variable, keyed by cycle offset.
    let mut writes: BTreeMap<&str, BTreeSet<u32>> = BTreeMap::new();
    for assign in program.assignments() {
        if program.width_of(assign.target).is_none() {
            return Err(FrontendError::Semantic {
                message: format!("assignment to undeclared identifier `{}`", assign.target),
            });
        }
        if inputs.contains(assign.target) {
            return Err(FrontendError::Semantic {
                message: format!("assignment to input port `{}`", assign.target),
            });
        }
        let slots = writes.entry(assign.target).or_default();
        if !slots.insert(assign.offset) {
            return Err(FrontendError::Semantic {
                message: format!(
                    "`{}` is assigned twice in the same cycle (parallel write-write conflict)",
                    assign.target
                ),
            });
        }
    }

    for port in program.output_ports() {
        if !writes.contains_key(port.name.as_str()) {
            return Err(FrontendError::Semantic {
                message: format!("output port `{}` is never assigned", port.name),
            });
        }
    }

    // Every read must be an input port or bind to a strictly earlier write.
    for assign in program.assignments() {
        let mut failure = None;
        assign.expr.walk(&mut |node| {
            if failure.is_some() {
                return;
            }
            match node {
                Expr::Var(name) => {
                    if program.width_of(name).is_none() {
                        failure = Some(format!("use of undeclared identifier `{name}`"));
                    } else if !inputs.contains(name.as_str()) {
                        let written_before = writes
                            .get(name.as_str())
                            .map(|slots| slots.iter().any(|&w| w < assign.offset))
                            .unwrap_or(false);
                        if !written_before {
                            failure = Some(format!(
                                "`{name}` is read before it is assigned (in assignment to `{}`)",
                                assign.target
                            ));
                        }
                    }
                }
                Expr::Binary {
                    op: BinOp::Shl | BinOp::Shr,
                    rhs,
                    ..
                } if !matches!(**rhs, Expr::Const(_)) => {
                    failure = Some("shift amounts must be constant literals".to_string());
                }
                _ => {}
            }
        });
        if let Some(message) = failure {
            return Err(FrontendError::Semantic { message });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const HALF_ADDER: &str = "\
module half_adder (in a: 1, in b: 1, out c: 1, out s: 1) {
  par {
    s = a ^ b;
    c = a & b;
  }
}
";

    pub const S_EXAMPLE: &str = "\
module s_example (in a: 4, in b: 4, out s: 9) {
  s = a*a + b*b + 4*b;
}
";

    #[test]
    fn parses_half_adder() {
        let program = parse_source(HALF_ADDER).unwrap();
        assert_eq!(program.name, "half_adder");
        assert_eq!(program.ports.len(), 4);
        match &program.body {
            Stmt::Par(children) => {
                assert_eq!(children.len(), 2);
                assert!(matches!(children[0], Stmt::Assign { .. }));
            }
            other => panic!("expected par body, got {other:?}"),
        }
    }

    #[test]
    fn parses_s_example_shape() {
        let program = parse_source(S_EXAMPLE).unwrap();
        let assigns = program.assignments();
        assert_eq!(assigns.len(), 1);
        let mut muls = 0;
        let mut adds = 0;
        assigns[0].expr.walk(&mut |node| {
            if let Expr::Binary { op, .. } = node {
                match op {
                    BinOp::Mul => muls += 1,
                    BinOp::Add => adds += 1,
                    _ => {}
                }
            }
        });
        assert_eq!((muls, adds), (3, 2));
    }

    #[test]
    fn double_write_in_par_is_rejected() {
        let source = "module m (out x: 4) { par { x = 1; x = 2; } }";
        let err = parse_source(source).unwrap_err();
        assert!(matches!(err, FrontendError::Semantic { .. }), "{err}");
    }

    #[test]
    fn double_write_at_same_offset_in_nested_blocks_is_rejected() {
        // Both writes to x land in cycle 1 of the par.
        let source = "module m (in a: 4, out x: 4) {
          par { seq { x = a; x = 1; } seq { x = 2; } }
        }";
        assert!(parse_source(source).is_err());
        // Offset-shifted writes do not conflict.
        let ok = "module m (in a: 4, out x: 4) {
          par { seq { x = a; x = 1; } }
        }";
        assert!(parse_source(ok).is_ok());
    }

    #[test]
    fn undeclared_identifier_is_rejected() {
        let source = "module m (out x: 4) { x = y; }";
        assert!(parse_source(source).is_err());
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let source = "module m (in a: 4, in a: 4, out x: 4) { x = a; }";
        assert!(parse_source(source).is_err());
        let source = "module m (in a: 4, out x: 4) { var a: 2; x = a; }";
        assert!(parse_source(source).is_err());
    }

    #[test]
    fn read_before_write_is_rejected() {
        let source = "module m (out x: 4) { var t: 4; x = t; }";
        assert!(parse_source(source).is_err());
        // Reading an out port before assignment.
        let source = "module m (in a: 4, out x: 4, out y: 4) { par { x = y; y = a; } }";
        assert!(parse_source(source).is_err());
        // Reading after assignment is fine.
        let source = "module m (in a: 4, out x: 4, out y: 4) { seq { y = a; x = y; } }";
        assert!(parse_source(source).is_ok());
    }

    #[test]
    fn unassigned_output_is_rejected() {
        let source = "module m (in a: 4, out x: 4, out y: 4) { x = a; }";
        assert!(parse_source(source).is_err());
    }

    #[test]
    fn shift_amount_must_be_constant() {
        let source = "module m (in a: 4, in k: 2, out x: 4) { x = a << k; }";
        assert!(parse_source(source).is_err());
        let source = "module m (in a: 4, out x: 4) { x = a << 2; }";
        assert!(parse_source(source).is_ok());
    }

    #[test]
    fn assignment_to_input_is_rejected() {
        let source = "module m (in a: 4, out x: 4) { seq { a = 1; x = a; } }";
        assert!(parse_source(source).is_err());
    }

    #[test]
    fn precedence_matches_c_conventions() {
        let program =
            parse_source("module m (in a: 8, in b: 8, out x: 8) { x = a | b ^ a & b + a * b; }")
                .unwrap();
        let assigns = program.assignments();
        // Top level must be Or.
        match assigns[0].expr {
            Expr::Binary { op: BinOp::Or, .. } => {}
            ref other => panic!("expected or at root, got {other:?}"),
        }
    }

    #[test]
    fn parse_error_reports_position_and_expectation() {
        let err = parse_source("module m (in a: 4) x = a;").unwrap_err();
        match err {
            FrontendError::Parse { line, expected, .. } => {
                assert_eq!(line, 1);
                assert!(expected.contains('{'), "{expected}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn width_bounds_are_enforced() {
        assert!(parse_source("module m (in a: 0, out x: 4) { x = a; }").is_err());
        assert!(parse_source("module m (in a: 65, out x: 4) { x = a; }").is_err());
        assert!(parse_source("module m (in a: 64, out x: 64) { x = a; }").is_ok());
    }
}
