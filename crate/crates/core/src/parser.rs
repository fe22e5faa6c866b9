//! Concrete text syntax for formulas.
//!
//! Precedence from tightest to loosest: `!`, `F[a,b]`/`G[a,b]`, `U[a,b]`,
//! `&`, `|`. `U` does not associate, so chains need parentheses. `F`, `G` and
//! `U` are keywords only when followed by `[`; otherwise they are ordinary
//! proposition names.

use std::fmt;

use thiserror::Error;

use crate::formula::{Formula, FormulaError, Interner, Node, TimeBound};
use crate::rational::{format_decimal, parse_rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negation at offset {pos} is not applied to a proposition (formulas must be in negation normal form)")]
    NotNnf { pos: usize },
    #[error("at offset {pos}: {source}")]
    Bound {
        pos: usize,
        #[source]
        source: FormulaError,
    },
}

pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { src: text.as_bytes(), text, pos: 0, interner: Interner::new() };
    let f = p.or()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    text: &'a str,
    pos: usize,
    interner: Interner,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> ParseError {
        ParseError::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    /// Operator keyword (`F`, `G`, `U`) at the cursor, if followed by `[`.
    fn keyword(&mut self) -> Option<u8> {
        self.skip_ws();
        let c = *self.src.get(self.pos)?;
        if !matches!(c, b'F' | b'G' | b'U') {
            return None;
        }
        let next = self.src.get(self.pos + 1).copied();
        if next.is_some_and(is_ident_char) {
            return None;
        }
        let mut k = self.pos + 1;
        while k < self.src.len() && self.src[k].is_ascii_whitespace() {
            k += 1;
        }
        (self.src.get(k) == Some(&b'[')).then_some(c)
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        match self.src.get(self.pos) {
            Some(c) if c.is_ascii_alphabetic() || *c == b'_' => {}
            _ => return None,
        }
        while self.pos < self.src.len() && is_ident_char(self.src[self.pos]) {
            self.pos += 1;
        }
        Some(self.text[start..self.pos].to_string())
    }

    fn bound(&mut self) -> Result<TimeBound, ParseError> {
        self.expect(b'[')?;
        let start = self.pos;
        let lo = self.number()?;
        self.expect(b',')?;
        let hi = self.number()?;
        self.expect(b']')?;
        TimeBound::new(lo, hi).map_err(|source| ParseError::Bound { pos: start, source })
    }

    fn number(&mut self) -> Result<crate::rational::Rational, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || matches!(self.src[self.pos], b'.' | b'/' | b'-' | b'+'))
        {
            self.pos += 1;
        }
        parse_rational(&self.text[start..self.pos]).map_err(|_| ParseError::Syntax {
            pos: start,
            msg: "expected a decimal or fraction literal".into(),
        })
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.and()?;
        while self.eat(b'|') {
            let rhs = self.and()?;
            acc = self.interner.intern(Node::Or(acc, rhs));
        }
        Ok(acc)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.until()?;
        while self.eat(b'&') {
            let rhs = self.until()?;
            acc = self.interner.intern(Node::And(acc, rhs));
        }
        Ok(acc)
    }

    fn until(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.unary()?;
        if self.keyword() != Some(b'U') {
            return Ok(lhs);
        }
        self.pos += 1;
        let bound = self.bound()?;
        let rhs = self.unary()?;
        if self.keyword() == Some(b'U') {
            return Err(self.error("`U` is not associative; add parentheses"));
        }
        Ok(self.interner.intern(Node::Until(bound, lhs, rhs)))
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.peek() == Some(b'!') {
            let at = self.pos;
            self.pos += 1;
            if self.keyword().is_some() {
                return Err(ParseError::NotNnf { pos: at });
            }
            return match self.ident() {
                Some(name) => Ok(self.interner.intern(Node::NegProp(name))),
                None => Err(ParseError::NotNnf { pos: at }),
            };
        }
        match self.keyword() {
            Some(b'F') | Some(b'G') => {
                let op = self.src[self.pos];
                self.pos += 1;
                let bound = self.bound()?;
                let body = self.unary()?;
                let node = if op == b'F' { Node::Finally(bound, body) } else { Node::Globally(bound, body) };
                Ok(self.interner.intern(node))
            }
            Some(_) => Err(self.error("`U` needs a left operand")),
            None => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        if self.eat(b'(') {
            let f = self.or()?;
            self.expect(b')')?;
            return Ok(f);
        }
        match self.ident() {
            Some(name) => Ok(self.interner.intern(Node::Prop(name))),
            None => Err(self.error("expected a proposition, `!`, `F[..]`, `G[..]` or `(`")),
        }
    }
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

// Printing levels: higher binds tighter.
const OR: u8 = 0;
const AND: u8 = 1;
const UNTIL: u8 = 2;
const UNARY: u8 = 3;

fn level(f: &Formula) -> u8 {
    match f.node() {
        Node::Or(..) => OR,
        Node::And(..) => AND,
        Node::Until(..) => UNTIL,
        _ => UNARY,
    }
}

fn write_formula(f: &Formula, out: &mut fmt::Formatter<'_>) -> fmt::Result {
    match f.node() {
        Node::Prop(p) => write!(out, "{p}"),
        Node::NegProp(p) => write!(out, "!{p}"),
        Node::Or(l, r) => {
            // left-nested chains of the same operator need no parentheses
            write_operand(l, out, level(l) == OR || level(l) == UNTIL || level(l) == UNARY)?;
            write!(out, " | ")?;
            write_operand(r, out, level(r) >= UNTIL)
        }
        Node::And(l, r) => {
            write_operand(l, out, level(l) >= AND)?;
            write!(out, " & ")?;
            write_operand(r, out, level(r) >= UNTIL)
        }
        Node::Until(b, l, r) => {
            write_operand(l, out, level(l) == UNARY)?;
            write!(out, " U{b} ")?;
            write_operand(r, out, level(r) == UNARY)
        }
        Node::Finally(b, c) => {
            write!(out, "F{b} ")?;
            write_operand(c, out, level(c) == UNARY)
        }
        Node::Globally(b, c) => {
            write!(out, "G{b} ")?;
            write_operand(c, out, level(c) == UNARY)
        }
    }
}

fn write_operand(f: &Formula, out: &mut fmt::Formatter<'_>, bare: bool) -> fmt::Result {
    if bare {
        write_formula(f, out)
    } else {
        write!(out, "(")?;
        write_formula(f, out)?;
        write!(out, ")")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(self, f)
    }
}

/// Canonical text of `f`; same as its `Display` output.
pub fn print(f: &Formula) -> String {
    f.to_string()
}

/// Formula text with bounds in fixed-point decimal notation.
pub fn print_decimal(f: &Formula) -> String {
    let text = print(f);
    let mut out = String::with_capacity(text.len());
    let mut rest = text.as_str();
    while let Some(open) = rest.find('[') {
        let close = open + rest[open..].find(']').expect("balanced bound brackets");
        out.push_str(&rest[..=open]);
        let parts: Vec<String> = rest[open + 1..close]
            .split(',')
            .map(|n| {
                let v = parse_rational(n).expect("printer emits valid literals");
                format_decimal(&v)
            })
            .collect();
        out.push_str(&parts.join(","));
        out.push(']');
        rest = &rest[close + 1..];
    }
    out.push_str(rest);
    out
}
