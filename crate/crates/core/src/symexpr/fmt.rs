//! Expression printer.
//!
//! Output uses the same grammar the parser accepts, so
//! `parse_expr(e.to_string())` reproduces a canonical `e` structurally.

use std::fmt;

use super::{Expr, SymExpr};

impl fmt::Display for SymExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(self, f)
    }
}

fn is_negative_literal(e: &SymExpr) -> bool {
    match e.node() {
        Expr::Int(v) => *v < 0,
        Expr::Rational(n, _) => *n < 0,
        Expr::Float(x) => *x < 0.0,
        _ => false,
    }
}

/// Reciprocal factors (exponent exactly -1) print as quotients; any other
/// negative exponent prints in `x^(-k)` form so the parse reproduces the
/// node structurally.
fn denominator_form(factor: &SymExpr) -> Option<SymExpr> {
    if let Expr::Power(b, e) = factor.node() {
        if matches!(e.node(), Expr::Int(-1)) {
            return Some(b.clone());
        }
    }
    None
}

fn term_is_negative(e: &SymExpr) -> bool {
    match e.node() {
        Expr::Product(fs) => fs.first().is_some_and(is_negative_literal),
        _ => is_negative_literal(e),
    }
}

/// Strip the sign of a negative term for `a - b` printing.
fn negate_term(e: &SymExpr) -> SymExpr {
    match e.node() {
        Expr::Int(v) => SymExpr::int(-v),
        Expr::Rational(n, d) => SymExpr::rational(-n, *d),
        Expr::Float(x) => SymExpr::float(-x),
        Expr::Product(fs) => {
            let mut fs = fs.clone();
            match fs[0].node() {
                Expr::Int(-1) => {
                    fs.remove(0);
                }
                Expr::Int(v) => fs[0] = SymExpr::int(-v),
                Expr::Rational(n, d) => fs[0] = SymExpr::rational(-n, *d),
                Expr::Float(x) => fs[0] = SymExpr::float(-x),
                _ => unreachable!(),
            }
            if fs.len() == 1 {
                fs.pop().unwrap()
            } else {
                SymExpr::new(Expr::Product(fs))
            }
        }
        _ => unreachable!("negate_term called on non-negative term"),
    }
}

fn write_expr(e: &SymExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match e.node() {
        Expr::Int(v) => write!(f, "{v}"),
        Expr::Rational(n, d) => write!(f, "{n}/{d}"),
        Expr::Float(x) => write!(f, "{x:?}"),
        Expr::I => write!(f, "i"),
        Expr::Symbol(s) => write!(f, "{}", s.name()),
        Expr::Sum(ts) => {
            for (i, t) in ts.iter().enumerate() {
                if i == 0 {
                    write_expr(t, f)?;
                } else if term_is_negative(t) {
                    write!(f, " - ")?;
                    let stripped = negate_term(t);
                    // negation may have unwrapped a (-1)*(sum) product
                    if matches!(stripped.node(), Expr::Sum(_)) {
                        write!(f, "(")?;
                        write_expr(&stripped, f)?;
                        write!(f, ")")?;
                    } else {
                        write_expr(&stripped, f)?;
                    }
                } else {
                    write!(f, " + ")?;
                    write_expr(t, f)?;
                }
            }
            Ok(())
        }
        Expr::Product(fs) => write_product(fs, f),
        Expr::Power(b, x) => {
            if denominator_form(e).is_some() {
                // standalone x^(-k) prints as a quotient
                return write_product(std::slice::from_ref(e), f);
            }
            write_power(b, x, f)
        }
        Expr::Func(kind, a) => {
            write!(f, "{}(", kind.name())?;
            write_expr(a, f)?;
            write!(f, ")")
        }
    }
}

fn write_product(factors: &[SymExpr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut num: Vec<&SymExpr> = Vec::new();
    let mut den: Vec<SymExpr> = Vec::new();
    for factor in factors {
        match denominator_form(factor) {
            Some(base) => den.push(base),
            None => num.push(factor),
        }
    }
    // a leading -1 prints as a bare sign
    let mut sign_stripped = false;
    if num.len() > 1 && matches!(num[0].node(), Expr::Int(-1)) {
        write!(f, "-")?;
        num.remove(0);
        sign_stripped = true;
    }
    if num.is_empty() {
        write!(f, "1")?;
    } else {
        for (i, factor) in num.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            let needs_parens = matches!(factor.node(), Expr::Sum(_))
                || ((i > 0 || sign_stripped) && is_negative_literal(factor));
            if needs_parens {
                write!(f, "(")?;
                write_expr(factor, f)?;
                write!(f, ")")?;
            } else {
                write_expr(factor, f)?;
            }
        }
    }
    // each reciprocal prints as its own division so the reparse rebuilds
    // the same factor list (a/(b*c) would fuse the bases into one factor)
    for b in &den {
        write!(f, "/")?;
        if is_atom(b) {
            write_expr(b, f)?;
        } else {
            write!(f, "(")?;
            write_expr(b, f)?;
            write!(f, ")")?;
        }
    }
    Ok(())
}

fn is_atom(e: &SymExpr) -> bool {
    match e.node() {
        Expr::Int(v) => *v >= 0,
        Expr::Float(x) => *x >= 0.0,
        Expr::I | Expr::Symbol(_) | Expr::Func(..) => true,
        _ => false,
    }
}

fn write_power(b: &SymExpr, e: &SymExpr, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if is_atom(b) {
        write_expr(b, f)?;
    } else {
        write!(f, "(")?;
        write_expr(b, f)?;
        write!(f, ")")?;
    }
    write!(f, "^")?;
    let exp_simple = matches!(e.node(), Expr::Int(v) if *v >= 0)
        || matches!(e.node(), Expr::Symbol(_) | Expr::Func(..));
    if exp_simple {
        write_expr(e, f)
    } else {
        write!(f, "(")?;
        write_expr(e, f)?;
        write!(f, ")")
    }
}
