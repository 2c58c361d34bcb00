// SPDX-License-Identifier: Apache-2.0

//! Lexer for `.bdl` sources.

use super::FrontendError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Int,
    Keyword,
    Op,
    Punct,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: u32,
    /// 1-based column of the first character.
    pub column: u32,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }
}

/// Reserved words. `int` is reserved for width-typed declarations even
/// though the current grammar spells them with `var`.
pub const KEYWORDS: &[&str] = &["module", "in", "out", "var", "seq", "par", "int"];

/// Splits source text into tokens. Whitespace and `//` line comments are
/// discarded; every other character must belong to the BDL alphabet.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut tokens = Vec::new();
    let mut chars = source.chars().peekable();
    let mut line: u32 = 1;
    let mut column: u32 = 1;

    macro_rules! bump {
        () => {{
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '/' {
            let (start_line, start_column) = (line, column);
            bump!();
            if chars.peek() == Some(&'/') {
                while let Some(&n) = chars.peek() {
                    if n == '\n' {
                        break;
                    }
                    bump!();
                }
                continue;
            }
            return Err(FrontendError::Lex {
                line: start_line,
                column: start_column,
                found: '/',
            });
        }

        let (start_line, start_column) = (line, column);
        if c.is_ascii_alphabetic() || c == '_' {
            let mut text = String::new();
            while let Some(&n) = chars.peek() {
                if n.is_ascii_alphanumeric() || n == '_' {
                    text.push(bump!());
                } else {
                    break;
                }
            }
            let kind = if KEYWORDS.contains(&text.as_str()) {
                TokenKind::Keyword
            } else {
                TokenKind::Ident
            };
            tokens.push(Token {
                kind,
                text,
                line: start_line,
                column: start_column,
            });
        } else if c.is_ascii_digit() {
            let mut text = String::new();
            text.push(bump!());
            let radix = if text == "0" {
                match chars.peek() {
                    Some('b') | Some('B') => {
                        text.push(bump!());
                        2
                    }
                    Some('x') | Some('X') => {
                        text.push(bump!());
                        16
                    }
                    _ => 10,
                }
            } else {
                10
            };
            while let Some(&n) = chars.peek() {
                if n.is_ascii_alphanumeric() {
                    text.push(bump!());
                } else {
                    break;
                }
            }
            // Reject now so every Int token carries a valid u64 value.
            parse_int_text(&text, radix).ok_or(FrontendError::Lex {
                line: start_line,
                column: start_column,
                found: c,
            })?;
            tokens.push(Token {
                kind: TokenKind::Int,
                text,
                line: start_line,
                column: start_column,
            });
        } else {
            let text = match c {
                '<' | '>' => {
                    bump!();
                    if chars.peek() == Some(&c) {
                        bump!();
                        format!("{c}{c}")
                    } else {
                        return Err(FrontendError::Lex {
                            line: start_line,
                            column: start_column,
                            found: c,
                        });
                    }
                }
                '=' | '|' | '^' | '&' | '+' | '-' | '*' | '~' => {
                    bump!();
                    c.to_string()
                }
                '(' | ')' | '{' | '}' | ':' | ';' | ',' => {
                    bump!();
                    tokens.push(Token {
                        kind: TokenKind::Punct,
                        text: c.to_string(),
                        line: start_line,
                        column: start_column,
                    });
                    continue;
                }
                other => {
                    return Err(FrontendError::Lex {
                        line: start_line,
                        column: start_column,
                        found: other,
                    })
                }
            };
            tokens.push(Token {
                kind: TokenKind::Op,
                text,
                line: start_line,
                column: start_column,
            });
        }
    }
    Ok(tokens)
}

fn parse_int_text(text: &str, radix: u32) -> Option<u64> {
    let digits = match radix {
        2 => &text[2..],
        16 => &text[2..],
        _ => text,
    };
    if digits.is_empty() {
        return None;
    }
    u64::from_str_radix(digits, radix).ok()
}

/// Value of an integer-literal token. Lexing guarantees this succeeds.
pub fn literal_value(text: &str) -> u64 {
    let lower = text.to_ascii_lowercase();
    if let Some(digits) = lower.strip_prefix("0b") {
        u64::from_str_radix(digits, 2).expect("lexer-validated literal")
    } else if let Some(digits) = lower.strip_prefix("0x") {
        u64::from_str_radix(digits, 16).expect("lexer-validated literal")
    } else {
        lower.parse().expect("lexer-validated literal")
    }
}
