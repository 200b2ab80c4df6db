//! Recursive-descent parser for the expression grammar.
//!
//! Grammar (standard precedence, `^` right-associative and binding tighter
//! than unary minus):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'i' | 'pi' | func '(' expr ')' | ident | '(' expr ')'
//! func   := 'sin' | 'cos' | 'exp' | 'sqrt' | 'conj' | 'abs'
//! ```
//!
//! Numbers are integer or decimal literals (with optional `e` exponent);
//! exact rationals are written as quotients (`1/2`). Identifiers denote
//! real-domain symbols; complex symbols are constructed through the API.

use super::{Expr, FuncKind, SymExpr};
use crate::error::{Error, Result};

/// Parse an expression into structural normal form.
///
/// The result is canonicalized (flattened, constants folded, terms ordered)
/// but not simplified; rewrite rules such as `sin^2 + cos^2 -> 1` apply only
/// through [`SymExpr::simplify`]. Printing a canonical expression and
/// parsing it back reproduces the expression structurally.
pub fn parse_expr(text: &str) -> Result<SymExpr> {
    let mut p = Parser { input: text.as_bytes(), pos: 0 };
    let e = p.parse_expr()?;
    p.skip_ws();
    if p.pos < p.input.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e.canonicalize())
}

struct Parser<'a> {
    input: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Syntax { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.input.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected '{}'", c as char)))
        }
    }

    fn parse_expr(&mut self) -> Result<SymExpr> {
        let mut acc = self.parse_term()?;
        loop {
            if self.eat(b'+') {
                acc = acc + self.parse_term()?;
            } else if self.eat(b'-') {
                acc = acc - self.parse_term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_term(&mut self) -> Result<SymExpr> {
        let mut acc = self.parse_unary()?;
        loop {
            if self.eat(b'*') {
                acc = acc * self.parse_unary()?;
            } else if self.eat(b'/') {
                acc = acc / self.parse_unary()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_unary(&mut self) -> Result<SymExpr> {
        if self.eat(b'-') {
            Ok(-self.parse_unary()?)
        } else {
            self.parse_power()
        }
    }

    fn parse_power(&mut self) -> Result<SymExpr> {
        let base = self.parse_atom()?;
        if self.eat(b'^') {
            let exp = self.parse_unary()?;
            Ok(SymExpr::new(Expr::Power(base, exp)))
        } else {
            Ok(base)
        }
    }

    fn parse_atom(&mut self) -> Result<SymExpr> {
        match self.peek() {
            None => Err(self.err("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.parse_expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.parse_number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.parse_ident(),
            Some(c) => Err(self.err(&format!("unexpected character '{}'", c as char))),
        }
    }

    fn parse_number(&mut self) -> Result<SymExpr> {
        let start = self.pos;
        let mut is_float = false;
        while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos < self.input.len() && self.input[self.pos] == b'.' {
            is_float = true;
            self.pos += 1;
            while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
        }
        // exponent part: only when digits follow (so `2e` stays `2 * e`)
        if self.pos < self.input.len() && matches!(self.input[self.pos], b'e' | b'E') {
            let mut probe = self.pos + 1;
            if probe < self.input.len() && matches!(self.input[probe], b'+' | b'-') {
                probe += 1;
            }
            if probe < self.input.len() && self.input[probe].is_ascii_digit() {
                is_float = true;
                self.pos = probe;
                while self.pos < self.input.len() && self.input[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        if text == "." {
            self.pos = start;
            return Err(self.err("malformed number"));
        }
        if is_float {
            text.parse::<f64>()
                .map(SymExpr::float)
                .map_err(|_| Error::Syntax { pos: start, msg: format!("malformed number '{text}'") })
        } else {
            match text.parse::<i64>() {
                Ok(v) => Ok(SymExpr::int(v)),
                // integer too large for i64: keep it as a float literal
                Err(_) => text
                    .parse::<f64>()
                    .map(SymExpr::float)
                    .map_err(|_| Error::Syntax { pos: start, msg: format!("malformed number '{text}'") }),
            }
        }
    }

    fn parse_ident(&mut self) -> Result<SymExpr> {
        let start = self.pos;
        while self.pos < self.input.len()
            && (self.input[self.pos].is_ascii_alphanumeric() || self.input[self.pos] == b'_')
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.input[start..self.pos]).unwrap();
        match name {
            "i" => return Ok(SymExpr::imaginary()),
            "pi" => return Ok(SymExpr::pi()),
            _ => {}
        }
        if self.peek() == Some(b'(') {
            let kind = match name {
                "sin" => FuncKind::Sin,
                "cos" => FuncKind::Cos,
                "exp" => FuncKind::Exp,
                "sqrt" => FuncKind::Sqrt,
                "conj" => FuncKind::Conj,
                "abs" => FuncKind::Abs,
                _ => return Err(Error::domain(format!("unknown function '{name}'"))),
            };
            self.expect(b'(')?;
            let arg = self.parse_expr()?;
            self.expect(b')')?;
            return Ok(SymExpr::new(Expr::Func(kind, arg)));
        }
        Ok(SymExpr::symbol(name))
    }
}
