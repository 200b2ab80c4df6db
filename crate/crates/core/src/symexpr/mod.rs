//! Symbolic scalar engine.
//!
//! [`SymExpr`] is an immutable expression tree over complex scalars with
//! named real/complex symbols. Expressions are built from literals, the
//! imaginary unit, symbols, sums, products, powers, and a fixed function set
//! (`sin`, `cos`, `exp`, `sqrt`, `conj`, `abs`).
//!
//! [`SymExpr::simplify`] rewrites to a canonical form: sums and products are
//! flattened, constants folded into a single literal, and terms ordered by a
//! fixed total order (literals < `i` < symbols < compound nodes). Structural
//! equality of canonical forms is the toolkit's notion of symbolic equality;
//! anything beyond it is checked numerically.
//!
//! Simplification is a bounded rewrite set, not a general CAS: constant
//! folding, like-term collection, `x^0 -> 1`, `x^1 -> x`, `0*x -> 0`,
//! conjugation of literals and real symbols, `sin^2 + cos^2 -> 1` on an
//! identical canonical argument, and `exp(0) -> 1`. Rational literals stay
//! exact until mixed with floats, so gate constants like `sqrt(1/2)` keep
//! their algebraic identities (`sqrt(1/2) * sqrt(1/2) -> 1/2`).
//!
//! `pi` is a reserved real symbol bound automatically during numeric
//! evaluation; `i` is the imaginary unit. Neither may be used as a symbol
//! or binding name.
//!
//! Expressions are immutable and cheaply cloneable (shared subtrees); all
//! operations are pure, so values can be sent and shared across threads.

mod calculus;
mod const_fold;
mod fmt;
mod parse;
mod simplify;

pub use parse::parse_expr;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) use const_fold::Const;

/// Value domain of a named symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    Real,
    Complex,
}

/// A named symbol with a declared domain.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    name: Arc<str>,
    domain: Domain,
}

impl Symbol {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }
}

/// Function heads supported by the engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FuncKind {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Conj,
    Abs,
}

impl FuncKind {
    pub fn name(self) -> &'static str {
        match self {
            FuncKind::Sin => "sin",
            FuncKind::Cos => "cos",
            FuncKind::Exp => "exp",
            FuncKind::Sqrt => "sqrt",
            FuncKind::Conj => "conj",
            FuncKind::Abs => "abs",
        }
    }
}

/// Expression node. Use the constructors on [`SymExpr`]; the enum itself is
/// exposed for pattern matching.
#[derive(Debug, Clone)]
pub enum Expr {
    Int(i64),
    /// Normalized: denominator > 1, gcd(|num|, den) = 1.
    Rational(i64, i64),
    Float(f64),
    /// The imaginary unit.
    I,
    Symbol(Symbol),
    Sum(Vec<SymExpr>),
    Product(Vec<SymExpr>),
    Power(SymExpr, SymExpr),
    Func(FuncKind, SymExpr),
}

/// Immutable, shareable expression handle.
#[derive(Clone)]
pub struct SymExpr(Arc<Expr>);

impl std::fmt::Debug for SymExpr {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl SymExpr {
    pub(crate) fn new(node: Expr) -> Self {
        SymExpr(Arc::new(node))
    }

    pub fn node(&self) -> &Expr {
        &self.0
    }

    pub fn int(v: i64) -> Self {
        SymExpr::new(Expr::Int(v))
    }

    /// Exact rational literal. Panics on a zero denominator.
    pub fn rational(num: i64, den: i64) -> Self {
        assert!(den != 0, "rational literal with zero denominator");
        let (n, d) = normalize_rational(num, den);
        if d == 1 {
            SymExpr::int(n)
        } else {
            SymExpr::new(Expr::Rational(n, d))
        }
    }

    pub fn float(v: f64) -> Self {
        // normalize -0.0 so canonical forms compare cleanly
        let v = if v == 0.0 { 0.0 } else { v };
        SymExpr::new(Expr::Float(v))
    }

    pub fn imaginary() -> Self {
        SymExpr::new(Expr::I)
    }

    /// The circle constant as a reserved real symbol, bound automatically
    /// during numeric evaluation.
    pub fn pi() -> Self {
        SymExpr::new(Expr::Symbol(Symbol {
            name: "pi".into(),
            domain: Domain::Real,
        }))
    }

    /// A real-domain symbol. Panics on the reserved names `i` and `pi`.
    pub fn symbol(name: &str) -> Self {
        SymExpr::symbol_with_domain(name, Domain::Real)
    }

    /// A complex-domain symbol. Panics on the reserved names `i` and `pi`.
    pub fn complex_symbol(name: &str) -> Self {
        SymExpr::symbol_with_domain(name, Domain::Complex)
    }

    pub fn symbol_with_domain(name: &str, domain: Domain) -> Self {
        assert!(name != "i", "'i' is the imaginary unit, not a symbol name");
        if name == "pi" {
            assert!(domain == Domain::Real, "'pi' is a reserved real constant");
            return SymExpr::pi();
        }
        SymExpr::new(Expr::Symbol(Symbol {
            name: name.into(),
            domain,
        }))
    }

    pub fn zero() -> Self {
        SymExpr::int(0)
    }

    pub fn one() -> Self {
        SymExpr::int(1)
    }

    /// Exact literal form of a complex double (real literal when the
    /// imaginary part is zero).
    pub fn from_complex(z: Complex64) -> Self {
        Const::from_complex(z).emit()
    }

    pub fn from_f64(v: f64) -> Self {
        SymExpr::float(v)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.node(), Expr::Int(0))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.node(), Expr::Int(1))
    }

    /// True when the expression contains no symbols other than `pi`-free
    /// literals, i.e. it folds to a numeric constant without a binding.
    pub fn is_constant(&self) -> bool {
        self.free_symbols().is_empty() && !self.contains_pi()
    }

    fn contains_pi(&self) -> bool {
        match self.node() {
            Expr::Symbol(s) => s.name() == "pi",
            Expr::Sum(ts) | Expr::Product(ts) => ts.iter().any(|t| t.contains_pi()),
            Expr::Power(b, e) => b.contains_pi() || e.contains_pi(),
            Expr::Func(_, a) => a.contains_pi(),
            _ => false,
        }
    }

    /// True when the expression evaluates without a binding (no free
    /// symbols; `pi` is allowed).
    pub fn is_numeric(&self) -> bool {
        self.free_symbols().is_empty()
    }

    /// All symbols except the reserved constant `pi`.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.collect_symbols(&mut out);
        out
    }

    pub fn free_symbol_names(&self) -> BTreeSet<String> {
        self.free_symbols()
            .into_iter()
            .map(|s| s.name().to_string())
            .collect()
    }

    fn collect_symbols(&self, out: &mut BTreeSet<Symbol>) {
        match self.node() {
            Expr::Symbol(s) => {
                if s.name() != "pi" {
                    out.insert(s.clone());
                }
            }
            Expr::Sum(ts) | Expr::Product(ts) => {
                for t in ts {
                    t.collect_symbols(out);
                }
            }
            Expr::Power(b, e) => {
                b.collect_symbols(out);
                e.collect_symbols(out);
            }
            Expr::Func(_, a) => a.collect_symbols(out),
            _ => {}
        }
    }

    pub fn contains_symbol(&self, name: &str) -> bool {
        match self.node() {
            Expr::Symbol(s) => s.name() == name,
            Expr::Sum(ts) | Expr::Product(ts) => ts.iter().any(|t| t.contains_symbol(name)),
            Expr::Power(b, e) => b.contains_symbol(name) || e.contains_symbol(name),
            Expr::Func(_, a) => a.contains_symbol(name),
            _ => false,
        }
    }

    fn contains_complex_symbol(&self) -> bool {
        self.free_symbols()
            .iter()
            .any(|s| s.domain() == Domain::Complex)
    }

    /// Conservative check that the expression is provably real-valued.
    pub fn is_real_valued(&self) -> bool {
        match self.node() {
            Expr::Int(_) | Expr::Rational(..) | Expr::Float(_) => true,
            Expr::I => false,
            Expr::Symbol(s) => s.domain() == Domain::Real,
            Expr::Sum(ts) | Expr::Product(ts) => ts.iter().all(|t| t.is_real_valued()),
            Expr::Power(b, e) => b.is_real_valued() && matches!(e.node(), Expr::Int(_)),
            Expr::Func(kind, a) => match kind {
                FuncKind::Abs => true,
                FuncKind::Sin | FuncKind::Cos | FuncKind::Exp => a.is_real_valued(),
                FuncKind::Conj => a.is_real_valued(),
                FuncKind::Sqrt => match a.node() {
                    Expr::Int(v) => *v >= 0,
                    Expr::Rational(n, _) => *n >= 0,
                    Expr::Float(f) => *f >= 0.0,
                    _ => false,
                },
            },
        }
    }

    pub fn pow(&self, exponent: SymExpr) -> SymExpr {
        match exponent.node() {
            Expr::Int(0) => SymExpr::one(),
            Expr::Int(1) => self.clone(),
            _ => SymExpr::new(Expr::Power(self.clone(), exponent)),
        }
    }

    pub fn powi(&self, exponent: i64) -> SymExpr {
        self.pow(SymExpr::int(exponent))
    }

    pub fn sin(&self) -> SymExpr {
        SymExpr::new(Expr::Func(FuncKind::Sin, self.clone()))
    }

    pub fn cos(&self) -> SymExpr {
        SymExpr::new(Expr::Func(FuncKind::Cos, self.clone()))
    }

    pub fn exp(&self) -> SymExpr {
        SymExpr::new(Expr::Func(FuncKind::Exp, self.clone()))
    }

    pub fn sqrt(&self) -> SymExpr {
        SymExpr::new(Expr::Func(FuncKind::Sqrt, self.clone()))
    }

    pub fn conj(&self) -> SymExpr {
        match self.node() {
            Expr::Int(_) | Expr::Rational(..) | Expr::Float(_) => self.clone(),
            Expr::I => SymExpr::int(-1) * SymExpr::imaginary(),
            Expr::Func(FuncKind::Conj, inner) => inner.clone(),
            _ => SymExpr::new(Expr::Func(FuncKind::Conj, self.clone())),
        }
    }

    pub fn abs(&self) -> SymExpr {
        SymExpr::new(Expr::Func(FuncKind::Abs, self.clone()))
    }

    /// Canonicalize (see module docs for the rewrite set). Total and
    /// idempotent.
    pub fn simplify(&self) -> SymExpr {
        simplify::simplify(self)
    }

    /// Structural normal form: flattening, constant folding, ordering, and
    /// identity removal, without the trig pair rule. The parser uses this so
    /// parsed text keeps its algebraic shape; `simplify` is the full rewrite.
    pub fn canonicalize(&self) -> SymExpr {
        simplify::canonicalize(self)
    }

    /// Replace bound symbols by their values and re-simplify. Unbound
    /// symbols stay symbolic.
    pub fn substitute(&self, binding: &Binding) -> Result<SymExpr> {
        calculus::substitute(self, binding)
    }

    /// Exact symbolic derivative with respect to a real-domain symbol.
    pub fn differentiate(&self, symbol: &str) -> Result<SymExpr> {
        calculus::differentiate(self, symbol)
    }

    /// Numeric evaluation; every free symbol must be bound.
    pub fn eval(&self, binding: &Binding) -> Result<Complex64> {
        calculus::eval(self, binding)
    }

    /// Numeric value of a symbol-free expression.
    pub fn to_complex(&self) -> Result<Complex64> {
        calculus::eval(self, &Binding::new())
    }

    fn rank(&self) -> u8 {
        match self.node() {
            Expr::Int(_) | Expr::Rational(..) | Expr::Float(_) => 0,
            Expr::I => 1,
            Expr::Symbol(_) => 2,
            Expr::Sum(_) => 3,
            Expr::Product(_) => 4,
            Expr::Power(..) => 5,
            Expr::Func(..) => 6,
        }
    }
}

pub(crate) fn normalize_rational(num: i64, den: i64) -> (i64, i64) {
    let sign = if (num < 0) != (den < 0) { -1 } else { 1 };
    let (n, d) = (num.unsigned_abs(), den.unsigned_abs());
    let g = gcd(n, d);
    (sign * (n / g) as i64, (d / g) as i64)
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

// Structural equality on canonical (or raw) trees. Floats compare by total
// order so equality stays reflexive.
impl PartialEq for SymExpr {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (Expr::Int(a), Expr::Int(b)) => a == b,
            (Expr::Rational(a, b), Expr::Rational(c, d)) => a == c && b == d,
            (Expr::Float(a), Expr::Float(b)) => a.total_cmp(b) == Ordering::Equal,
            (Expr::I, Expr::I) => true,
            (Expr::Symbol(a), Expr::Symbol(b)) => a == b,
            (Expr::Sum(a), Expr::Sum(b)) | (Expr::Product(a), Expr::Product(b)) => a == b,
            (Expr::Power(b1, e1), Expr::Power(b2, e2)) => b1 == b2 && e1 == e2,
            (Expr::Func(k1, a1), Expr::Func(k2, a2)) => k1 == k2 && a1 == a2,
            _ => false,
        }
    }
}

impl Eq for SymExpr {}

/// The fixed total order used for canonical term ordering:
/// literals < `i` < symbols (lexicographic) < compound nodes (by kind, then
/// recursively). Literals order by numeric value with a kind tiebreak.
impl Ord for SymExpr {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (ra, rb) = (self.rank(), other.rank());
        if ra != rb {
            return ra.cmp(&rb);
        }
        match (self.node(), other.node()) {
            (Expr::Int(_) | Expr::Rational(..) | Expr::Float(_), _) => {
                literal_cmp(self.node(), other.node())
            }
            (Expr::I, Expr::I) => Ordering::Equal,
            (Expr::Symbol(a), Expr::Symbol(b)) => a.cmp(b),
            (Expr::Sum(a), Expr::Sum(b)) | (Expr::Product(a), Expr::Product(b)) => a.cmp(b),
            (Expr::Power(b1, e1), Expr::Power(b2, e2)) => {
                b1.cmp(b2).then_with(|| e1.cmp(e2))
            }
            (Expr::Func(k1, a1), Expr::Func(k2, a2)) => k1.cmp(k2).then_with(|| a1.cmp(a2)),
            _ => unreachable!("rank() already separated node kinds"),
        }
    }
}

impl PartialOrd for SymExpr {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn literal_kind(e: &Expr) -> u8 {
    match e {
        Expr::Int(_) => 0,
        Expr::Rational(..) => 1,
        Expr::Float(_) => 2,
        _ => unreachable!(),
    }
}

fn literal_cmp(a: &Expr, b: &Expr) -> Ordering {
    let value_cmp = match (a, b) {
        (Expr::Int(x), Expr::Int(y)) => x.cmp(y),
        (Expr::Int(x), Expr::Rational(n, d)) => (*x as i128 * *d as i128).cmp(&(*n as i128)),
        (Expr::Rational(n, d), Expr::Int(y)) => (*n as i128).cmp(&(*y as i128 * *d as i128)),
        (Expr::Rational(n1, d1), Expr::Rational(n2, d2)) => {
            (*n1 as i128 * *d2 as i128).cmp(&(*n2 as i128 * *d1 as i128))
        }
        _ => literal_f64(a).total_cmp(&literal_f64(b)),
    };
    value_cmp.then_with(|| literal_kind(a).cmp(&literal_kind(b)))
}

fn literal_f64(e: &Expr) -> f64 {
    match e {
        Expr::Int(v) => *v as f64,
        Expr::Rational(n, d) => *n as f64 / *d as f64,
        Expr::Float(f) => *f,
        _ => unreachable!(),
    }
}

/// Map from symbol name to a numeric complex value.
///
/// `i` and `pi` are reserved and cannot be bound. Domain checks (a
/// real-domain symbol must get a real value) happen where the binding meets
/// an expression, since the expression carries the domain information.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Binding {
    map: std::collections::BTreeMap<String, Complex64>,
}

impl Binding {
    pub fn new() -> Self {
        Binding::default()
    }

    pub fn bind(&mut self, name: &str, value: Complex64) -> Result<()> {
        if name == "i" || name == "pi" {
            return Err(Error::domain(format!("'{name}' is reserved and cannot be bound")));
        }
        self.map.insert(name.to_string(), value);
        Ok(())
    }

    pub fn bind_real(&mut self, name: &str, value: f64) -> Result<()> {
        self.bind(name, Complex64::new(value, 0.0))
    }

    /// Build a binding from `(name, real value)` pairs.
    pub fn from_reals<'a, I: IntoIterator<Item = (&'a str, f64)>>(pairs: I) -> Result<Self> {
        let mut b = Binding::new();
        for (name, v) in pairs {
            b.bind_real(name, v)?;
        }
        Ok(b)
    }

    pub fn get(&self, name: &str) -> Option<Complex64> {
        self.map.get(name).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Complex64)> {
        self.map.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn merged(&self, other: &Binding) -> Binding {
        let mut map = self.map.clone();
        for (k, v) in &other.map {
            map.insert(k.clone(), *v);
        }
        Binding { map }
    }
}

// Operator overloads build raw nodes with only identity/zero folds; full
// canonicalization is an explicit `simplify` call.
impl std::ops::Add for SymExpr {
    type Output = SymExpr;
    fn add(self, rhs: SymExpr) -> SymExpr {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        if let (Expr::Int(a), Expr::Int(b)) = (self.node(), rhs.node()) {
            if let Some(s) = a.checked_add(*b) {
                return SymExpr::int(s);
            }
        }
        let mut terms = Vec::new();
        for e in [self, rhs] {
            match e.node() {
                Expr::Sum(ts) => terms.extend(ts.iter().cloned()),
                _ => terms.push(e),
            }
        }
        SymExpr::new(Expr::Sum(terms))
    }
}

impl std::ops::Sub for SymExpr {
    type Output = SymExpr;
    fn sub(self, rhs: SymExpr) -> SymExpr {
        self + (-rhs)
    }
}

impl std::ops::Neg for SymExpr {
    type Output = SymExpr;
    fn neg(self) -> SymExpr {
        fn neg_literal(e: &SymExpr) -> Option<SymExpr> {
            match e.node() {
                Expr::Int(v) => Some(match v.checked_neg() {
                    Some(n) => SymExpr::int(n),
                    None => SymExpr::float(-(*v as f64)),
                }),
                Expr::Rational(n, d) => Some(SymExpr::rational(-n, *d)),
                Expr::Float(f) => Some(SymExpr::float(-f)),
                _ => None,
            }
        }
        if let Some(n) = neg_literal(&self) {
            return n;
        }
        // fold the sign into a leading literal factor
        if let Expr::Product(fs) = self.node() {
            if let Some(first) = fs.first().and_then(neg_literal) {
                let mut fs = fs.clone();
                if first.is_one() {
                    fs.remove(0);
                } else {
                    fs[0] = first;
                }
                return if fs.len() == 1 {
                    fs.pop().unwrap()
                } else {
                    SymExpr::new(Expr::Product(fs))
                };
            }
        }
        SymExpr::int(-1) * self
    }
}

impl std::ops::Mul for SymExpr {
    type Output = SymExpr;
    fn mul(self, rhs: SymExpr) -> SymExpr {
        if self.is_zero() || rhs.is_zero() {
            return SymExpr::zero();
        }
        if self.is_one() {
            return rhs;
        }
        if rhs.is_one() {
            return self;
        }
        if let (Expr::Int(a), Expr::Int(b)) = (self.node(), rhs.node()) {
            if let Some(p) = a.checked_mul(*b) {
                return SymExpr::int(p);
            }
        }
        let mut factors = Vec::new();
        for e in [self, rhs] {
            match e.node() {
                Expr::Product(fs) => factors.extend(fs.iter().cloned()),
                _ => factors.push(e),
            }
        }
        SymExpr::new(Expr::Product(factors))
    }
}

impl std::ops::Div for SymExpr {
    type Output = SymExpr;
    fn div(self, rhs: SymExpr) -> SymExpr {
        if self.is_zero() && !rhs.is_zero() {
            return SymExpr::zero();
        }
        if rhs.is_one() {
            return self;
        }
        if let (Expr::Int(a), Expr::Int(b)) = (self.node(), rhs.node()) {
            if *b != 0 {
                return SymExpr::rational(*a, *b);
            }
        }
        self * rhs.powi(-1)
    }
}

#[cfg(test)]
mod tests;
