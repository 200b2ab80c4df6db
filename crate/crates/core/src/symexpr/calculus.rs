//! Substitution, differentiation, and numeric evaluation.

use num_complex::Complex64;

use super::{Binding, Domain, Expr, FuncKind, SymExpr};
use crate::error::{Error, Result};

pub(crate) fn substitute(e: &SymExpr, binding: &Binding) -> Result<SymExpr> {
    Ok(subst_rec(e, binding)?.simplify())
}

fn subst_rec(e: &SymExpr, binding: &Binding) -> Result<SymExpr> {
    match e.node() {
        Expr::Symbol(s) => match binding.get(s.name()) {
            Some(v) => {
                if s.domain() == Domain::Real && v.im != 0.0 {
                    return Err(Error::domain(format!(
                        "real symbol '{}' bound to non-real value {v}",
                        s.name()
                    )));
                }
                Ok(SymExpr::from_complex(v))
            }
            None => Ok(e.clone()),
        },
        Expr::Sum(ts) => {
            let mapped: Result<Vec<_>> = ts.iter().map(|t| subst_rec(t, binding)).collect();
            Ok(SymExpr::new(Expr::Sum(mapped?)))
        }
        Expr::Product(fs) => {
            let mapped: Result<Vec<_>> = fs.iter().map(|f| subst_rec(f, binding)).collect();
            Ok(SymExpr::new(Expr::Product(mapped?)))
        }
        Expr::Power(b, x) => Ok(SymExpr::new(Expr::Power(
            subst_rec(b, binding)?,
            subst_rec(x, binding)?,
        ))),
        Expr::Func(kind, a) => Ok(SymExpr::new(Expr::Func(*kind, subst_rec(a, binding)?))),
        _ => Ok(e.clone()),
    }
}

pub(crate) fn differentiate(e: &SymExpr, symbol: &str) -> Result<SymExpr> {
    if e.free_symbols()
        .iter()
        .any(|s| s.name() == symbol && s.domain() == Domain::Complex)
    {
        return Err(Error::domain(format!(
            "cannot differentiate with respect to complex-domain symbol '{symbol}'"
        )));
    }
    let canonical = e.simplify();
    Ok(diff_rec(&canonical, symbol)?.simplify())
}

fn diff_rec(e: &SymExpr, sym: &str) -> Result<SymExpr> {
    if !e.contains_symbol(sym) {
        return Ok(SymExpr::zero());
    }
    match e.node() {
        Expr::Symbol(_) => Ok(SymExpr::one()),
        Expr::Sum(ts) => {
            let mut acc = SymExpr::zero();
            for t in ts {
                acc = acc + diff_rec(t, sym)?;
            }
            Ok(acc)
        }
        Expr::Product(fs) => {
            // n-ary product rule
            let mut acc = SymExpr::zero();
            for (i, f) in fs.iter().enumerate() {
                if !f.contains_symbol(sym) {
                    continue;
                }
                let mut term = diff_rec(f, sym)?;
                for (j, g) in fs.iter().enumerate() {
                    if i != j {
                        term = term * g.clone();
                    }
                }
                acc = acc + term;
            }
            Ok(acc)
        }
        Expr::Power(b, x) => {
            if x.contains_symbol(sym) {
                return Err(Error::domain(format!(
                    "cannot differentiate through exponent containing '{sym}'"
                )));
            }
            // d(u^c) = c * u^(c-1) * du
            let du = diff_rec(b, sym)?;
            Ok(x.clone() * b.pow(x.clone() - SymExpr::one()) * du)
        }
        Expr::Func(kind, a) => {
            match kind {
                FuncKind::Abs => {
                    return Err(Error::domain(format!(
                        "cannot differentiate through abs of an expression containing '{sym}'"
                    )));
                }
                FuncKind::Conj => {
                    if a.contains_complex_symbol() {
                        return Err(Error::domain(format!(
                            "cannot differentiate through conj of complex-domain symbols \
                             (argument of conj contains '{sym}')"
                        )));
                    }
                    // all symbols real: d/dsym conj(u) = conj(du)
                    return Ok(diff_rec(a, sym)?.conj());
                }
                _ => {}
            }
            let du = diff_rec(a, sym)?;
            let outer = match kind {
                FuncKind::Sin => a.cos(),
                FuncKind::Cos => -a.sin(),
                FuncKind::Exp => a.exp(),
                FuncKind::Sqrt => SymExpr::one() / (SymExpr::int(2) * a.sqrt()),
                FuncKind::Conj | FuncKind::Abs => unreachable!(),
            };
            Ok(outer * du)
        }
        // literals and other symbols were handled by the contains check
        _ => Ok(SymExpr::zero()),
    }
}

pub(crate) fn eval(e: &SymExpr, binding: &Binding) -> Result<Complex64> {
    match e.node() {
        Expr::Int(v) => Ok(Complex64::new(*v as f64, 0.0)),
        Expr::Rational(n, d) => Ok(Complex64::new(*n as f64 / *d as f64, 0.0)),
        Expr::Float(f) => Ok(Complex64::new(*f, 0.0)),
        Expr::I => Ok(Complex64::new(0.0, 1.0)),
        Expr::Symbol(s) => {
            if s.name() == "pi" {
                return Ok(Complex64::new(std::f64::consts::PI, 0.0));
            }
            match binding.get(s.name()) {
                Some(v) => {
                    if s.domain() == Domain::Real && v.im != 0.0 {
                        Err(Error::domain(format!(
                            "real symbol '{}' bound to non-real value {v}",
                            s.name()
                        )))
                    } else {
                        Ok(v)
                    }
                }
                None => Err(Error::UnboundSymbol(s.name().to_string())),
            }
        }
        Expr::Sum(ts) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in ts {
                acc += eval(t, binding)?;
            }
            Ok(acc)
        }
        Expr::Product(fs) => {
            let mut acc = Complex64::new(1.0, 0.0);
            for f in fs {
                acc *= eval(f, binding)?;
            }
            Ok(acc)
        }
        Expr::Power(b, x) => {
            let base = eval(b, binding)?;
            let exp = eval(x, binding)?;
            Ok(eval_power(base, exp))
        }
        Expr::Func(kind, a) => {
            let z = eval(a, binding)?;
            Ok(match kind {
                FuncKind::Sin => z.sin(),
                FuncKind::Cos => z.cos(),
                FuncKind::Exp => z.exp(),
                FuncKind::Sqrt => z.sqrt(),
                FuncKind::Conj => z.conj(),
                FuncKind::Abs => Complex64::new(z.norm(), 0.0),
            })
        }
    }
}

/// Complex power with the documented conventions: 0^0 = 1, 0^w = 0 for
/// Re(w) > 0, and infinity for the remaining zero-base cases. Integer
/// exponents use exact repeated multiplication.
fn eval_power(base: Complex64, exp: Complex64) -> Complex64 {
    if exp == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    if base == Complex64::new(0.0, 0.0) {
        return if exp.im == 0.0 && exp.re > 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(f64::INFINITY, 0.0)
        };
    }
    if exp.im == 0.0 && exp.re.fract() == 0.0 && exp.re.abs() <= i32::MAX as f64 {
        return base.powi(exp.re as i32);
    }
    base.powc(exp)
}
