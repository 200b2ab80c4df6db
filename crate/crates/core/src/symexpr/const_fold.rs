//! Exact constant arithmetic used by the simplifier.
//!
//! `Num` is a scalar that stays exact (integer or rational) until a float
//! enters the computation; `Const` is a complex number with `Num` parts.
//! Overflowing integer arithmetic falls back to floats.

use num_complex::Complex64;

use super::{Expr, SymExpr};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Num {
    Int(i64),
    /// Normalized: den > 1, gcd(|num|, den) = 1.
    Rat(i64, i64),
    F(f64),
}

impl Num {
    pub fn zero() -> Num {
        Num::Int(0)
    }

    pub fn one() -> Num {
        Num::Int(1)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Num::Int(v) => *v == 0,
            Num::Rat(..) => false,
            Num::F(f) => *f == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Num::Int(v) => *v == 1,
            Num::Rat(..) => false,
            Num::F(f) => *f == 1.0,
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, Num::F(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Num::Int(v) => *v as f64,
            Num::Rat(n, d) => *n as f64 / *d as f64,
            Num::F(f) => *f,
        }
    }

    fn rat(n: i128, d: i128) -> Num {
        debug_assert!(d != 0);
        let sign = if (n < 0) != (d < 0) { -1i128 } else { 1 };
        let (n, d) = (n.unsigned_abs(), d.unsigned_abs());
        let g = gcd_u128(n, d);
        let (n, d) = (n / g, d / g);
        if i64::try_from(n).is_err() || i64::try_from(d).is_err() {
            return Num::F(sign as f64 * n as f64 / d as f64);
        }
        let n = sign as i64 * n as i64;
        let d = d as i64;
        if d == 1 {
            Num::Int(n)
        } else {
            Num::Rat(n, d)
        }
    }

    fn as_ratio(&self) -> Option<(i128, i128)> {
        match self {
            Num::Int(v) => Some((*v as i128, 1)),
            Num::Rat(n, d) => Some((*n as i128, *d as i128)),
            Num::F(_) => None,
        }
    }

    pub fn add(self, other: Num) -> Num {
        match (self.as_ratio(), other.as_ratio()) {
            (Some((a, b)), Some((c, d))) => Num::rat(a * d + c * b, b * d),
            _ => Num::F(self.to_f64() + other.to_f64()),
        }
    }

    pub fn neg(self) -> Num {
        match self {
            Num::Int(v) => v.checked_neg().map(Num::Int).unwrap_or(Num::F(-(v as f64))),
            Num::Rat(n, d) => Num::Rat(-n, d),
            Num::F(f) => Num::F(-f),
        }
    }

    pub fn mul(self, other: Num) -> Num {
        match (self.as_ratio(), other.as_ratio()) {
            (Some((a, b)), Some((c, d))) => Num::rat(a * c, b * d),
            _ => Num::F(self.to_f64() * other.to_f64()),
        }
    }

    /// None for exact division by exact zero (left unevaluated by callers).
    pub fn recip(self) -> Option<Num> {
        match self.as_ratio() {
            Some((n, d)) => {
                if n == 0 {
                    None
                } else {
                    Some(Num::rat(d, n))
                }
            }
            None => Some(Num::F(1.0 / self.to_f64())),
        }
    }

    /// Exact square root when the operand is a perfect square of a rational;
    /// negative operands report the root of |x| with the sign flag.
    pub fn exact_sqrt(&self) -> Option<(Num, bool)> {
        let (n, d) = self.as_ratio()?;
        let negative = n < 0;
        let n = n.unsigned_abs();
        let d = d.unsigned_abs();
        let rn = integer_sqrt(n)?;
        let rd = integer_sqrt(d)?;
        Some((Num::rat(rn as i128, rd as i128), negative))
    }
}

fn integer_sqrt(v: u128) -> Option<u128> {
    if v == 0 {
        return Some(0);
    }
    let r = (v as f64).sqrt().round() as u128;
    (r.saturating_sub(2)..=r + 2).find(|&cand| cand.checked_mul(cand) == Some(v))
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a.max(1)
}

/// Complex constant with exact-when-possible parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Const {
    pub re: Num,
    pub im: Num,
}

impl Const {
    pub fn zero() -> Const {
        Const { re: Num::zero(), im: Num::zero() }
    }

    pub fn one() -> Const {
        Const { re: Num::one(), im: Num::zero() }
    }

    pub fn i() -> Const {
        Const { re: Num::zero(), im: Num::one() }
    }

    pub fn real(n: Num) -> Const {
        Const { re: n, im: Num::zero() }
    }

    pub fn from_complex(z: Complex64) -> Const {
        Const { re: Num::F(z.re), im: Num::F(z.im) }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn is_exact(&self) -> bool {
        self.re.is_exact() && self.im.is_exact()
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn add(self, o: Const) -> Const {
        Const { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    pub fn mul(self, o: Const) -> Const {
        Const {
            re: self.re.mul(o.re).add(self.im.mul(o.im).neg()),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    pub fn conj(self) -> Const {
        Const { re: self.re, im: self.im.neg() }
    }

    pub fn recip(self) -> Option<Const> {
        let norm2 = self.re.mul(self.re).add(self.im.mul(self.im));
        let inv = norm2.recip()?;
        Some(Const { re: self.re.mul(inv), im: self.im.neg().mul(inv) })
    }

    pub fn pow_int(self, k: i64) -> Option<Const> {
        if k == 0 {
            return Some(Const::one());
        }
        if self.is_zero() {
            return if k > 0 { Some(Const::zero()) } else { None };
        }
        let mut base = self;
        let mut k_abs = k.unsigned_abs();
        if k < 0 {
            base = base.recip()?;
        }
        let mut acc = Const::one();
        while k_abs > 0 {
            if k_abs & 1 == 1 {
                acc = acc.mul(base);
            }
            k_abs >>= 1;
            if k_abs > 0 {
                base = base.mul(base);
            }
        }
        Some(acc)
    }

    /// Canonical node form: real literal, `i` (with coefficient), or a
    /// two-term sum.
    pub fn emit(&self) -> SymExpr {
        if self.im.is_zero() {
            return emit_num(self.re);
        }
        let im_part = if self.im.is_one() {
            SymExpr::imaginary()
        } else {
            SymExpr::new(Expr::Product(vec![emit_num(self.im), SymExpr::imaginary()]))
        };
        if self.re.is_zero() {
            im_part
        } else {
            SymExpr::new(Expr::Sum(vec![emit_num(self.re), im_part]))
        }
    }

    /// Factor list form for product emission (sorted canonically).
    pub fn emit_factors(&self) -> Vec<SymExpr> {
        if self.im.is_zero() {
            vec![emit_num(self.re)]
        } else if self.re.is_zero() {
            if self.im.is_one() {
                vec![SymExpr::imaginary()]
            } else {
                vec![emit_num(self.im), SymExpr::imaginary()]
            }
        } else {
            vec![self.emit()]
        }
    }
}

pub(crate) fn emit_num(n: Num) -> SymExpr {
    match n {
        Num::Int(v) => SymExpr::int(v),
        Num::Rat(num, den) => SymExpr::new(Expr::Rational(num, den)),
        Num::F(f) => SymExpr::float(f),
    }
}

/// Try to fold an entire (sub)tree to a constant. Functions fold only in the
/// cases the simplifier is allowed to evaluate (see `simplify`); anything
/// else returns None, keeping exact forms like `sqrt(1/2)` or `sin(1)`
/// unevaluated.
pub(crate) fn fold_const(e: &SymExpr) -> Option<Const> {
    match e.node() {
        Expr::Int(v) => Some(Const::real(Num::Int(*v))),
        Expr::Rational(n, d) => Some(Const::real(Num::Rat(*n, *d))),
        Expr::Float(f) => Some(Const::real(Num::F(*f))),
        Expr::I => Some(Const::i()),
        Expr::Symbol(_) => None,
        Expr::Sum(ts) => {
            let mut acc = Const::zero();
            for t in ts {
                acc = acc.add(fold_const(t)?);
            }
            Some(acc)
        }
        Expr::Product(fs) => {
            let mut acc = Const::one();
            for f in fs {
                acc = acc.mul(fold_const(f)?);
            }
            Some(acc)
        }
        Expr::Power(b, x) => {
            let base = fold_const(b)?;
            let exp = fold_const(x)?;
            fold_power(base, exp)
        }
        Expr::Func(kind, a) => {
            let arg = fold_const(a)?;
            fold_func(*kind, arg)
        }
    }
}

/// Constant power folding. Exact for integer exponents; float-contaminated
/// operands evaluate numerically; exact base with fractional exact exponent
/// stays unevaluated (None).
pub(crate) fn fold_power(base: Const, exp: Const) -> Option<Const> {
    if exp.is_zero() {
        return Some(Const::one()); // includes 0^0 = 1
    }
    if let (Num::Int(k), true) = (exp.re, exp.im.is_zero()) {
        return base.pow_int(k);
    }
    if base.is_exact() && exp.is_exact() {
        return None;
    }
    let b = base.to_complex();
    let x = exp.to_complex();
    if b == Complex64::ZERO {
        return if x.re > 0.0 {
            Some(Const::zero())
        } else {
            Some(Const::from_complex(Complex64::new(f64::INFINITY, 0.0)))
        };
    }
    Some(Const::from_complex(b.powc(x)))
}

/// Constant function folding: exact special values, exact conj/abs, and full
/// numeric evaluation once floats are involved.
pub(crate) fn fold_func(kind: FuncKindLocal, arg: Const) -> Option<Const> {
    use super::FuncKind::*;
    match kind {
        Conj => return Some(arg.conj()),
        Abs => {
            let norm2 = arg.re.mul(arg.re).add(arg.im.mul(arg.im));
            if let Some((root, false)) = norm2.exact_sqrt() {
                return Some(Const::real(root));
            }
            if !arg.is_exact() {
                return Some(Const::real(Num::F(arg.to_complex().norm())));
            }
            return None; // exact non-perfect-square: leave as sqrt form
        }
        _ => {}
    }
    if arg.is_exact() {
        return match kind {
            Sin if arg.is_zero() => Some(Const::zero()),
            Cos if arg.is_zero() => Some(Const::one()),
            Exp if arg.is_zero() => Some(Const::one()),
            Sqrt if arg.is_real() => {
                let (root, negative) = arg.re.exact_sqrt()?;
                if negative {
                    Some(Const { re: Num::zero(), im: root })
                } else {
                    Some(Const::real(root))
                }
            }
            _ => None,
        };
    }
    let z = arg.to_complex();
    let v = match kind {
        Sin => z.sin(),
        Cos => z.cos(),
        Exp => z.exp(),
        Sqrt => z.sqrt(),
        Conj | Abs => unreachable!(),
    };
    Some(Const::from_complex(v))
}

pub(crate) type FuncKindLocal = super::FuncKind;
