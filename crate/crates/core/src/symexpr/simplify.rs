//! Canonicalizing rewriter.
//!
//! The pass set is bounded and deterministic: flattening, constant folding,
//! like-term/like-factor collection, identity-element removal, power and
//! exponential merging on integer exponents, conjugation pushdown, and the
//! Pythagorean pair rule. `simplify` iterates the bottom-up pass to a
//! structural fixpoint (in practice one or two passes).

use std::collections::BTreeMap;

use super::const_fold::{fold_const, fold_func, fold_power, Const};
use super::{Expr, FuncKind, SymExpr};

const MAX_PASSES: usize = 32;

pub(crate) fn simplify(e: &SymExpr) -> SymExpr {
    fixpoint(e, true)
}

/// Structural canonicalization only: flattening, constant folding,
/// identity removal, ordering. The Pythagorean pair rule is reserved for
/// `simplify` so that parsed text keeps its algebraic shape.
pub(crate) fn canonicalize(e: &SymExpr) -> SymExpr {
    fixpoint(e, false)
}

fn fixpoint(e: &SymExpr, pyth: bool) -> SymExpr {
    let mut cur = simplify_once(e, pyth);
    for _ in 0..MAX_PASSES {
        let next = simplify_once(&cur, pyth);
        if next == cur {
            return next;
        }
        cur = next;
    }
    cur
}

fn simplify_once(e: &SymExpr, pyth: bool) -> SymExpr {
    match e.node() {
        Expr::Int(_) | Expr::Float(_) | Expr::I | Expr::Symbol(_) => e.clone(),
        Expr::Rational(n, d) => SymExpr::rational(*n, *d),
        Expr::Sum(ts) => make_sum(ts.iter().map(|t| simplify_once(t, pyth)).collect(), pyth),
        Expr::Product(fs) => {
            make_product(fs.iter().map(|f| simplify_once(f, pyth)).collect(), pyth)
        }
        Expr::Power(b, x) => make_power(simplify_once(b, pyth), simplify_once(x, pyth), pyth),
        Expr::Func(kind, a) => make_func(*kind, simplify_once(a, pyth), pyth),
    }
}

/// Decompose a canonical-ish term into (constant coefficient, residual
/// factor list). Constant-foldable factors are absorbed into the
/// coefficient; the residual list keeps canonical order.
fn decompose_term(term: &SymExpr) -> (Const, Vec<SymExpr>) {
    if let Some(c) = fold_const(term) {
        return (c, Vec::new());
    }
    if let Expr::Product(fs) = term.node() {
        let mut coeff = Const::one();
        let mut rest = Vec::new();
        for f in fs {
            match fold_const(f) {
                Some(c) => coeff = coeff.mul(c),
                None => rest.push(f.clone()),
            }
        }
        rest.sort();
        (coeff, rest)
    } else {
        (Const::one(), vec![term.clone()])
    }
}

/// Rebuild `coeff * rest` in canonical product shape.
fn emit_term(coeff: Const, rest: &[SymExpr]) -> SymExpr {
    if coeff.is_zero() {
        return SymExpr::zero();
    }
    if rest.is_empty() {
        return coeff.emit();
    }
    let mut factors = if coeff.is_one() {
        Vec::new()
    } else {
        coeff.emit_factors()
    };
    factors.extend(rest.iter().cloned());
    if factors.len() == 1 {
        return factors.pop().unwrap();
    }
    factors.sort();
    SymExpr::new(Expr::Product(factors))
}

fn make_sum(terms: Vec<SymExpr>, pyth: bool) -> SymExpr {
    // flatten
    let mut flat = Vec::with_capacity(terms.len());
    for t in terms {
        match t.node() {
            Expr::Sum(inner) => flat.extend(inner.iter().cloned()),
            _ => flat.push(t),
        }
    }
    // collect like terms keyed by residual factors
    let mut groups: BTreeMap<Vec<SymExpr>, Const> = BTreeMap::new();
    for t in &flat {
        let (coeff, rest) = decompose_term(t);
        let slot = groups.entry(rest).or_insert_with(Const::zero);
        *slot = slot.add(coeff);
    }
    if pyth {
        pythagorean_pass(&mut groups);
    }
    let mut out: Vec<SymExpr> = groups
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(rest, coeff)| emit_term(coeff, &rest))
        .collect();
    match out.len() {
        0 => SymExpr::zero(),
        1 => out.pop().unwrap(),
        _ => {
            out.sort();
            SymExpr::new(Expr::Sum(out))
        }
    }
}

/// Replace matching pairs `c*R*sin(u)^2 + c*R*cos(u)^2` by `c*R`.
fn pythagorean_pass(groups: &mut BTreeMap<Vec<SymExpr>, Const>) {
    loop {
        let mut replacement: Option<(Vec<SymExpr>, Vec<SymExpr>, Vec<SymExpr>)> = None;
        'search: for (rest, coeff) in groups.iter() {
            if coeff.is_zero() {
                continue;
            }
            for (idx, factor) in rest.iter().enumerate() {
                let Some(partner_factor) = trig_square_partner(factor) else {
                    continue;
                };
                let mut partner = rest.clone();
                partner[idx] = partner_factor;
                partner.sort();
                if partner == *rest {
                    continue;
                }
                if let Some(pc) = groups.get(&partner) {
                    if pc == coeff {
                        let mut reduced = rest.clone();
                        reduced.remove(idx);
                        replacement = Some((rest.clone(), partner, reduced));
                        break 'search;
                    }
                }
            }
        }
        let Some((a, b, reduced)) = replacement else {
            return;
        };
        let coeff = groups.remove(&a).unwrap();
        groups.remove(&b);
        let slot = groups.entry(reduced).or_insert_with(Const::zero);
        *slot = slot.add(coeff);
    }
}

/// For a factor `sin(u)^2` return `cos(u)^2` and vice versa.
fn trig_square_partner(factor: &SymExpr) -> Option<SymExpr> {
    if let Expr::Power(base, exp) = factor.node() {
        if matches!(exp.node(), Expr::Int(2)) {
            if let Expr::Func(kind, arg) = base.node() {
                let swapped = match kind {
                    FuncKind::Sin => FuncKind::Cos,
                    FuncKind::Cos => FuncKind::Sin,
                    _ => return None,
                };
                return Some(SymExpr::new(Expr::Power(
                    SymExpr::new(Expr::Func(swapped, arg.clone())),
                    SymExpr::int(2),
                )));
            }
        }
    }
    None
}

fn make_product(factors: Vec<SymExpr>, pyth: bool) -> SymExpr {
    // flatten
    let mut flat = Vec::with_capacity(factors.len());
    for f in factors {
        match f.node() {
            Expr::Product(inner) => flat.extend(inner.iter().cloned()),
            _ => flat.push(f),
        }
    }
    let mut coeff = Const::one();
    // group non-constant factors by base, accumulating exponents;
    // exp(...) factors with integer exponents accumulate into one argument
    let mut exponents: BTreeMap<SymExpr, Vec<SymExpr>> = BTreeMap::new();
    let mut exp_args: Vec<SymExpr> = Vec::new();
    let mut ordered_bases: Vec<SymExpr> = Vec::new();
    for f in &flat {
        if let Some(c) = fold_const(f) {
            coeff = coeff.mul(c);
            continue;
        }
        let (base, exp) = match f.node() {
            Expr::Power(b, x) => (b.clone(), x.clone()),
            _ => (f.clone(), SymExpr::one()),
        };
        // exp(u)^n with integer n merges into a single exponential
        if let (Expr::Func(FuncKind::Exp, u), Expr::Int(n)) = (base.node(), exp.node()) {
            exp_args.push(if *n == 1 {
                u.clone()
            } else {
                make_product(vec![SymExpr::int(*n), u.clone()], pyth)
            });
            continue;
        }
        if !exponents.contains_key(&base) {
            ordered_bases.push(base.clone());
        }
        exponents.entry(base).or_default().push(exp);
    }
    if coeff.is_zero() {
        return SymExpr::zero();
    }
    let mut out: Vec<SymExpr> = Vec::new();
    for base in ordered_bases {
        let exps = exponents.remove(&base).unwrap();
        let total = if exps.len() == 1 {
            exps.into_iter().next().unwrap()
        } else {
            make_sum(exps, pyth)
        };
        let rebuilt = make_power(base, total, pyth);
        match fold_const(&rebuilt) {
            Some(c) => coeff = coeff.mul(c),
            None => out.push(rebuilt),
        }
    }
    if !exp_args.is_empty() {
        let arg = make_sum(exp_args, pyth);
        let e = make_func(FuncKind::Exp, arg, pyth);
        match fold_const(&e) {
            Some(c) => coeff = coeff.mul(c),
            None => out.push(e),
        }
    }
    if coeff.is_zero() {
        return SymExpr::zero();
    }
    // drop factors that collapsed to one
    out.retain(|f| !f.is_one());
    if out.is_empty() {
        return coeff.emit();
    }
    // distribute a constant coefficient over a lone sum factor so that
    // affine forms like 1 - (1 - x) collapse under like-term collection
    if out.len() == 1 && !coeff.is_one() {
        if let Expr::Sum(ts) = out[0].node() {
            let scaled = ts
                .iter()
                .map(|t| make_product(vec![coeff.emit(), t.clone()], pyth))
                .collect();
            return make_sum(scaled, pyth);
        }
    }
    let mut factors = if coeff.is_one() {
        Vec::new()
    } else {
        coeff.emit_factors()
    };
    factors.extend(out);
    if factors.len() == 1 {
        return factors.pop().unwrap();
    }
    factors.sort();
    SymExpr::new(Expr::Product(factors))
}

fn make_power(base: SymExpr, exp: SymExpr, pyth: bool) -> SymExpr {
    if exp.is_zero() {
        return SymExpr::one(); // includes 0^0 = 1 by convention
    }
    if exp.is_one() {
        return base;
    }
    if base.is_one() {
        return SymExpr::one();
    }
    if let (Some(b), Some(x)) = (fold_const(&base), fold_const(&exp)) {
        if let Some(v) = fold_power(b, x) {
            return v.emit();
        }
    }
    if base.is_zero() {
        if let Some(x) = fold_const(&exp) {
            if x.is_real() && x.re.to_f64() > 0.0 {
                return SymExpr::zero();
            }
        }
    }
    if let Expr::Int(n) = exp.node() {
        let n = *n;
        match base.node() {
            // (x^a)^n -> x^(a*n): valid for any base when n is an integer
            Expr::Power(b2, e2) => {
                let merged = make_product(vec![e2.clone(), SymExpr::int(n)], pyth);
                return make_power(b2.clone(), merged, pyth);
            }
            // (a*b)^n -> a^n * b^n
            Expr::Product(fs) => {
                let powered = fs
                    .iter()
                    .map(|f| make_power(f.clone(), SymExpr::int(n), pyth))
                    .collect();
                return make_product(powered, pyth);
            }
            // sqrt(u)^(2k) -> u^k
            Expr::Func(FuncKind::Sqrt, u) if n % 2 == 0 => {
                return make_power(u.clone(), SymExpr::int(n / 2), pyth);
            }
            // exp(u)^n -> exp(n*u)
            Expr::Func(FuncKind::Exp, u) => {
                let arg = make_product(vec![SymExpr::int(n), u.clone()], pyth);
                return make_func(FuncKind::Exp, arg, pyth);
            }
            _ => {}
        }
    }
    SymExpr::new(Expr::Power(base, exp))
}

fn make_func(kind: FuncKind, arg: SymExpr, pyth: bool) -> SymExpr {
    if let Some(c) = fold_const(&arg) {
        if let Some(v) = fold_func(kind, c) {
            return v.emit();
        }
    }
    if kind == FuncKind::Conj {
        return make_conj(arg, pyth);
    }
    SymExpr::new(Expr::Func(kind, arg))
}

/// Conjugation pushdown: literals and provably-real subtrees lose the conj,
/// and conj distributes over sums, products, integer powers, and the entire
/// functions sin/cos/exp.
fn make_conj(arg: SymExpr, pyth: bool) -> SymExpr {
    if arg.is_real_valued() {
        return arg;
    }
    match arg.node() {
        Expr::Func(FuncKind::Conj, inner) => inner.clone(),
        Expr::Sum(ts) => make_sum(ts.iter().map(|t| make_conj(t.clone(), pyth)).collect(), pyth),
        Expr::Product(fs) => {
            make_product(fs.iter().map(|f| make_conj(f.clone(), pyth)).collect(), pyth)
        }
        Expr::Power(b, e) if matches!(e.node(), Expr::Int(_)) => {
            make_power(make_conj(b.clone(), pyth), e.clone(), pyth)
        }
        // sin/cos/exp commute with conj everywhere; sqrt does on the
        // principal branch (exact except on the negative real axis)
        Expr::Func(k @ (FuncKind::Sin | FuncKind::Cos | FuncKind::Exp | FuncKind::Sqrt), a) => {
            make_func(*k, make_conj(a.clone(), pyth), pyth)
        }
        Expr::Func(FuncKind::Abs, _) => arg, // |z| is real
        Expr::I => Const::i().conj().emit(),
        _ => SymExpr::new(Expr::Func(FuncKind::Conj, arg)),
    }
}
