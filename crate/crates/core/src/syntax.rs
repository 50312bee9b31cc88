//! Concrete formula syntax.
//!
//! ```text
//! φ ::= top | p | O(i,o) | A(i,p) | Atil(i,φ) | ~φ | [i]φ | <i>φ | [E:s]φ
//!     | (φ & φ) | (φ | φ) | (φ -> φ) | (φ <-> φ)
//! ```
//!
//! A binary connective may appear without parentheses at the top level or
//! directly inside a pair of parentheses; `&` and `|` may be chained there
//! and associate to the left. Names are identifiers (`[A-Za-z0-9_']+`) or
//! double-quoted strings.

use crate::formula::{Formula, Name};
use crate::instantiations::awareness;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    LBrack,
    RBrack,
    Lt,
    Gt,
    Comma,
    Colon,
    Tilde,
    Amp,
    Bar,
    Arrow,
    DArrow,
    Ident(String),
    Quoted(String),
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Lt => "<",
            Tok::Gt => ">",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Arrow => "->",
            Tok::DArrow => "<->",
            Tok::Ident(s) => return write!(f, "`{s}`"),
            Tok::Quoted(s) => return write!(f, "\"{s}\""),
            Tok::End => "end of input",
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn lex(text: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut k, mut line, mut column) = (0, 1, 1);
    let err = |line, column, message: String| SyntaxError { line, column, message };
    while k < chars.len() {
        let c = chars[k];
        let (l0, c0) = (line, column);
        let mut step = 1;
        let tok = match c {
            '\n' => {
                line += 1;
                column = 1;
                k += 1;
                continue;
            }
            c if c.is_whitespace() => None,
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBrack),
            ']' => Some(Tok::RBrack),
            '>' => Some(Tok::Gt),
            ',' => Some(Tok::Comma),
            ':' => Some(Tok::Colon),
            '~' => Some(Tok::Tilde),
            '&' => Some(Tok::Amp),
            '|' => Some(Tok::Bar),
            '<' if chars.get(k + 1) == Some(&'-') && chars.get(k + 2) == Some(&'>') => {
                step = 3;
                Some(Tok::DArrow)
            }
            '<' => Some(Tok::Lt),
            '-' if chars.get(k + 1) == Some(&'>') => {
                step = 2;
                Some(Tok::Arrow)
            }
            '"' => {
                let mut s = String::new();
                let mut j = k + 1;
                loop {
                    match chars.get(j) {
                        None => return Err(err(l0, c0, "unterminated string".into())),
                        Some('"') => break,
                        Some('\\') => match chars.get(j + 1) {
                            Some(&e @ ('"' | '\\')) => {
                                s.push(e);
                                j += 2;
                            }
                            _ => return Err(err(l0, c0, "invalid escape in string".into())),
                        },
                        Some('\n') => return Err(err(l0, c0, "newline in string".into())),
                        Some(&ch) => {
                            s.push(ch);
                            j += 1;
                        }
                    }
                }
                step = j + 1 - k;
                Some(Tok::Quoted(s))
            }
            c if is_ident_char(c) => {
                let mut j = k;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                step = j - k;
                Some(Tok::Ident(chars[k..j].iter().collect()))
            }
            other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
        };
        if let Some(tok) = tok {
            out.push(Spanned {
                tok,
                line: l0,
                column: c0,
            });
        }
        k += step;
        column += step;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum BinOp {
    And,
    Or,
    Imp,
    Iff,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn advance(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, at: &Spanned, message: String) -> SyntaxError {
        SyntaxError {
            line: at.line,
            column: at.column,
            message,
        }
    }

    fn unexpected(&self, expected: &str) -> SyntaxError {
        let at = self.here();
        self.error_at(at, format!("expected {expected}, found {}", at.tok))
    }

    fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.unexpected(&tok.to_string()))
        }
    }

    fn name(&mut self, what: &str) -> Result<Name, SyntaxError> {
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Quoted(s) => {
                self.advance();
                Ok(Name::from(s))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn binop(&self) -> Option<BinOp> {
        match self.peek() {
            Tok::Amp => Some(BinOp::And),
            Tok::Bar => Some(BinOp::Or),
            Tok::Arrow => Some(BinOp::Imp),
            Tok::DArrow => Some(BinOp::Iff),
            _ => None,
        }
    }

    /// `unit (op unit)*` with a single operator kind; only `&`/`|` chain.
    fn expr(&mut self) -> Result<Formula, SyntaxError> {
        let mut lhs = self.unit()?;
        let Some(op) = self.binop() else {
            return Ok(lhs);
        };
        let mut count = 0;
        while let Some(next) = self.binop() {
            let at = self.advance();
            if next != op || (count > 0 && matches!(op, BinOp::Imp | BinOp::Iff)) {
                return Err(self.error_at(&at, format!("ambiguous use of {}: add parentheses", at.tok)));
            }
            if *self.peek() == Tok::End || *self.peek() == Tok::RParen {
                return Err(self.error_at(&at, format!("dangling {}: expected a formula", at.tok)));
            }
            let rhs = self.unit()?;
            lhs = match op {
                BinOp::And => Formula::and(lhs, rhs),
                BinOp::Or => Formula::or(lhs, rhs),
                BinOp::Imp => Formula::implies(lhs, rhs),
                BinOp::Iff => Formula::iff(lhs, rhs),
            };
            count += 1;
        }
        Ok(lhs)
    }

    fn unit(&mut self) -> Result<Formula, SyntaxError> {
        let start = self.here().clone();
        match start.tok.clone() {
            Tok::Tilde => {
                self.advance();
                Ok(Formula::not(self.unit()?))
            }
            Tok::LParen => {
                self.advance();
                let f = self.expr()?;
                if *self.peek() == Tok::End {
                    return Err(self.error_at(&start, "unclosed `(`".into()));
                }
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::LBrack => {
                self.advance();
                let first = self.name("an agent or event model name")?;
                if *self.peek() == Tok::Colon {
                    self.advance();
                    let event = self.name("an event name")?;
                    self.expect(Tok::RBrack)?;
                    Ok(Formula::Dyn(first, event, Box::new(self.unit()?)))
                } else {
                    self.expect(Tok::RBrack)?;
                    Ok(Formula::Box(first, Box::new(self.unit()?)))
                }
            }
            Tok::Lt => {
                self.advance();
                let agent = self.name("an agent name")?;
                self.expect(Tok::Gt)?;
                Ok(Formula::poss(agent, self.unit()?))
            }
            Tok::Ident(word) => {
                self.advance();
                let call = *self.peek() == Tok::LParen;
                match word.as_str() {
                    "top" => Ok(Formula::Top),
                    "O" | "A" if call => {
                        self.advance();
                        let agent = self.name("an agent name")?;
                        self.expect(Tok::Comma)?;
                        let object = self.name("an object name")?;
                        self.expect(Tok::RParen)?;
                        Ok(Formula::Owns(agent, object))
                    }
                    "Atil" if call => {
                        self.advance();
                        let agent = self.name("an agent name")?;
                        self.expect(Tok::Comma)?;
                        let body = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(awareness::expand_atomic_awareness(&agent, &body))
                    }
                    _ => Ok(Formula::Atom(Name::from(word))),
                }
            }
            Tok::Quoted(word) => {
                self.advance();
                Ok(Formula::Atom(Name::from(word)))
            }
            Tok::End => Err(self.error_at(&start, "unexpected end of input: expected a formula".into())),
            other => Err(self.error_at(&start, format!("expected a formula, found {other}"))),
        }
    }
}

/// Parses a formula; derived connectives are expanded on the fly.
pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0 };
    let f = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("end of input"));
    }
    Ok(f)
}

const KEYWORDS: [&str; 4] = ["top", "O", "A", "Atil"];

fn write_name(out: &mut String, name: &str, atom_position: bool) {
    let plain = !name.is_empty() && name.chars().all(is_ident_char) && !(atom_position && KEYWORDS.contains(&name));
    if plain {
        out.push_str(name);
    } else {
        out.push('"');
        for c in name.chars() {
            if c == '"' || c == '\\' {
                out.push('\\');
            }
            out.push(c);
        }
        out.push('"');
    }
}

fn as_iff(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::And(l, r) = f {
        let (a, b) = l.as_implication()?;
        let (b2, a2) = r.as_implication()?;
        if a == a2 && b == b2 {
            return Some((a, b));
        }
    }
    None
}

fn as_or(f: &Formula) -> Option<(&Formula, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::And(l, r) = inner.as_ref() {
            if let (Formula::Not(a), Formula::Not(b)) = (l.as_ref(), r.as_ref()) {
                return Some((a, b));
            }
        }
    }
    None
}

fn as_diamond(f: &Formula) -> Option<(&Name, &Formula)> {
    if let Formula::Not(inner) = f {
        if let Formula::Box(i, body) = inner.as_ref() {
            if let Formula::Not(a) = body.as_ref() {
                return Some((i, a));
            }
        }
    }
    None
}

fn write_formula(out: &mut String, f: &Formula, top: bool) {
    let binary = |out: &mut String, a: &Formula, op: &str, b: &Formula| {
        if !top {
            out.push('(');
        }
        write_formula(out, a, false);
        out.push_str(op);
        write_formula(out, b, false);
        if !top {
            out.push(')');
        }
    };
    if let Some((a, b)) = as_iff(f) {
        return binary(out, a, " <-> ", b);
    }
    if let Some((a, b)) = as_or(f) {
        return binary(out, a, " | ", b);
    }
    if let Some((a, b)) = f.as_implication() {
        return binary(out, a, " -> ", b);
    }
    if let Some((i, a)) = as_diamond(f) {
        out.push('<');
        write_name(out, i, false);
        out.push('>');
        return write_formula(out, a, false);
    }
    match f {
        Formula::Top => out.push_str("top"),
        Formula::Atom(p) => write_name(out, p, true),
        Formula::Owns(i, o) => {
            out.push_str("O(");
            write_name(out, i, false);
            out.push(',');
            write_name(out, o, false);
            out.push(')');
        }
        Formula::Not(a) => {
            out.push('~');
            write_formula(out, a, false);
        }
        Formula::And(a, b) => binary(out, a, " & ", b),
        Formula::Box(i, a) => {
            out.push('[');
            write_name(out, i, false);
            out.push(']');
            write_formula(out, a, false);
        }
        Formula::Dyn(e, s, a) => {
            out.push('[');
            write_name(out, e, false);
            out.push(':');
            write_name(out, s, false);
            out.push(']');
            write_formula(out, a, false);
        }
    }
}

/// Prints a formula in the concrete syntax, re-sugaring `|`, `->`, `<->`
/// and `<i>` where the expanded shape is recognised.
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(&mut out, f, true);
    out
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn ownership_implies_box() {
        let f = parse("O(1,a) -> [1](O(1,a))");
        assert_eq!(
            f,
            Formula::implies(Formula::owns("1", "a"), Formula::nec("1", Formula::owns("1", "a")))
        );
    }

    #[test]
    fn dynamic_negation() {
        assert_eq!(
            parse("[E:s] ~p"),
            Formula::dynamic("E", "s", Formula::not(Formula::atom("p")))
        );
    }

    #[test]
    fn dangling_conjunction() {
        let e = parse_formula("(p &").unwrap_err();
        assert_eq!((e.line, e.column), (1, 4));
        assert!(e.message.contains("dangling"), "{e}");
    }

    #[test]
    fn error_positions_span_lines() {
        let e = parse_formula("(p &\n  q $)").unwrap_err();
        assert_eq!((e.line, e.column), (2, 5));
    }

    #[test]
    fn mixed_operators_need_parentheses() {
        assert!(parse_formula("p & q | r").is_err());
        assert!(parse_formula("p -> q -> r").is_err());
        assert_eq!(parse("(p & q & r)"), parse("((p & q) & r)"));
    }

    #[test]
    fn sugar_expands() {
        assert_eq!(parse("<1>p"), Formula::poss("1", Formula::atom("p")));
        assert_eq!(parse("(p <-> q)"), Formula::iff(Formula::atom("p"), Formula::atom("q")));
        assert_eq!(parse("A(1,p)"), Formula::owns("1", "p"));
        assert_eq!(parse("Atil(1, ~p)"), Formula::owns("1", "p"));
    }

    #[test]
    fn printing_resugars() {
        for text in [
            "O(1,a) -> [1]O(1,a)",
            "[E:s]~p",
            "<2>(p | q)",
            "(p <-> q) & ~top",
            "O(1,\"x:(p -> q)\")",
            "\"top\"",
        ] {
            assert_eq!(print_formula(&parse(text)), text);
        }
    }

    #[test]
    fn quoted_names_round_trip() {
        let f = Formula::owns("1", "a \"b\"");
        assert_eq!(parse(&print_formula(&f)), f);
    }
}
