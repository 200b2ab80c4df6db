use num_complex::Complex64;

use super::*;
use crate::error::Error;

fn sym(name: &str) -> SymExpr {
    SymExpr::symbol(name)
}

#[test]
fn parse_two_pi_is_product() {
    let e = parse_expr("2*pi").unwrap();
    match e.node() {
        Expr::Product(fs) => {
            assert_eq!(fs.len(), 2);
            assert_eq!(fs[0], SymExpr::int(2));
            assert_eq!(fs[1], SymExpr::pi());
        }
        other => panic!("expected product, got {other:?}"),
    }
}

#[test]
fn parse_keeps_pythagorean_sum() {
    let e = parse_expr("sin(theta)^2 + cos(theta)^2").unwrap();
    match e.node() {
        Expr::Sum(ts) => {
            assert_eq!(ts.len(), 2);
            assert!(ts.iter().all(|t| matches!(t.node(), Expr::Power(..))));
        }
        other => panic!("expected sum, got {other:?}"),
    }
    assert_eq!(e.simplify(), SymExpr::one());
}

#[test]
fn parse_error_has_position() {
    match parse_expr("1/(") {
        Err(Error::Syntax { pos, .. }) => assert_eq!(pos, 3),
        other => panic!("expected syntax error, got {other:?}"),
    }
}

#[test]
fn parse_unknown_function_is_domain_error() {
    assert!(matches!(parse_expr("foo(x)"), Err(Error::Domain(_))));
}

#[test]
fn parse_precedence_and_associativity() {
    // ^ binds tighter than unary minus; right-associative
    let a = parse_expr("-x^2").unwrap().simplify();
    let b = (-(sym("x").powi(2))).simplify();
    assert_eq!(a, b);
    let c = parse_expr("2^3^2").unwrap().simplify();
    assert_eq!(c, SymExpr::int(512));
}

#[test]
fn simplify_pythagorean_with_shared_coefficient() {
    let th = sym("theta");
    let e = SymExpr::int(3) * th.sin().powi(2) + SymExpr::int(3) * th.cos().powi(2);
    assert_eq!(e.simplify(), SymExpr::int(3));
}

#[test]
fn simplify_conj_of_real_symbol() {
    let th = sym("theta");
    assert_eq!(th.conj().simplify(), th);
    let z = SymExpr::complex_symbol("z");
    assert_eq!(z.conj().simplify(), z.conj());
}

#[test]
fn simplify_constant_folding_and_collection() {
    let th = sym("theta");
    let e = SymExpr::int(2) * (th.clone() + th.clone());
    let expected = SymExpr::int(4) * th;
    assert_eq!(e.simplify(), expected.simplify());
}

#[test]
fn simplify_power_rules() {
    let x = sym("x");
    assert_eq!(x.powi(0).simplify(), SymExpr::one());
    assert_eq!(x.powi(1).simplify(), x);
    assert_eq!((SymExpr::zero() * x.clone()).simplify(), SymExpr::zero());
    assert_eq!(SymExpr::zero().powi(0).simplify(), SymExpr::one());
    assert_eq!(SymExpr::zero().exp().simplify(), SymExpr::one());
}

#[test]
fn simplify_exact_sqrt_products() {
    // sqrt(1/2) * sqrt(1/2) = 1/2, exactly
    let h = SymExpr::rational(1, 2).sqrt();
    assert_eq!((h.clone() * h).simplify(), SymExpr::rational(1, 2));
}

#[test]
fn simplify_exponential_merge() {
    let a = sym("alpha");
    let i = SymExpr::imaginary();
    let e = (i.clone() * a.clone()).exp() * (-(i * a)).exp();
    assert_eq!(e.simplify(), SymExpr::one());
}

#[test]
fn simplify_is_idempotent_on_examples() {
    let cases = [
        "sin(t)^2 + cos(t)^2",
        "2*(x + x) - 3*x",
        "conj(i*a + b)",
        "sqrt(1/2)*sqrt(1/2)*x^0",
        "exp(i*p)*exp(-i*p) + x*y/x",
    ];
    for c in cases {
        let s = parse_expr(c).unwrap().simplify();
        assert_eq!(s.simplify(), s, "not idempotent on {c}");
    }
}

#[test]
fn substitute_analytic_example() {
    let th = sym("theta");
    let e = (th.clone() / SymExpr::int(2)).cos();
    let mut b = Binding::new();
    b.bind_real("theta", std::f64::consts::PI).unwrap();
    let r = e.substitute(&b).unwrap();
    let v = r.to_complex().unwrap();
    assert!(v.norm() < 1e-12, "cos(pi/2) should fold to ~0, got {v}");
}

#[test]
fn substitute_partial_binding() {
    let e = sym("theta") * sym("phi");
    let mut b = Binding::new();
    b.bind_real("theta", 2.0).unwrap();
    let r = e.substitute(&b).unwrap();
    let expected = (SymExpr::float(2.0) * sym("phi")).simplify();
    assert_eq!(r, expected);
    assert!(r.contains_symbol("phi"));
}

#[test]
fn substitute_rejects_complex_value_for_real_symbol() {
    let e = sym("theta").sin();
    let mut b = Binding::new();
    b.bind("theta", Complex64::new(1.0, 2.0)).unwrap();
    assert!(matches!(e.substitute(&b), Err(Error::Domain(_))));
}

#[test]
fn differentiate_chain_rule() {
    let th = sym("theta");
    let e = (SymExpr::int(2) * th.clone()).sin();
    let d = e.differentiate("theta").unwrap();
    let expected = (SymExpr::int(2) * (SymExpr::int(2) * th).cos()).simplify();
    assert_eq!(d, expected);
}

#[test]
fn differentiate_constant_is_zero() {
    let c = parse_expr("3*x + sqrt(2)").unwrap();
    assert_eq!(c.differentiate("theta").unwrap(), SymExpr::zero());
}

#[test]
fn differentiate_abs_is_domain_error() {
    let e = sym("theta").abs();
    assert!(matches!(e.differentiate("theta"), Err(Error::Domain(_))));
}

#[test]
fn differentiate_conj_of_complex_symbol_is_domain_error() {
    // conj distributes over products of real symbols, so a differentiable
    // case like conj(z*theta) reduces to conj(z)*theta and succeeds; the
    // error fires when conj cannot be pushed off the symbol (fractional
    // powers block distribution).
    let z = SymExpr::complex_symbol("z");
    let e = (z.clone() * sym("theta")).pow(SymExpr::rational(1, 2)).conj();
    assert!(matches!(e.differentiate("theta"), Err(Error::Domain(_))));
    let ok = (z.clone() * sym("theta")).conj().differentiate("theta").unwrap();
    assert_eq!(ok, z.conj().simplify());
}

#[test]
fn differentiate_sqrt() {
    let x = sym("x");
    let d = x.sqrt().differentiate("x").unwrap();
    let mut b = Binding::new();
    b.bind_real("x", 2.25).unwrap();
    let v = d.eval(&b).unwrap();
    assert!((v.re - 1.0 / (2.0 * 1.5)).abs() < 1e-12);
}

#[test]
fn eval_euler_identity() {
    let e = (SymExpr::imaginary() * SymExpr::pi()).exp();
    let v = e.to_complex().unwrap();
    assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn eval_sine_at_pi_over_six() {
    let e = parse_expr("sin(theta)").unwrap();
    let mut b = Binding::new();
    b.bind_real("theta", std::f64::consts::PI / 6.0).unwrap();
    let v = e.eval(&b).unwrap();
    assert!((v.re - 0.5).abs() < 1e-12 && v.im == 0.0);
}

#[test]
fn eval_unbound_symbol() {
    let e = parse_expr("sin(theta)").unwrap();
    match e.eval(&Binding::new()) {
        Err(Error::UnboundSymbol(name)) => assert_eq!(name, "theta"),
        other => panic!("expected UnboundSymbol, got {other:?}"),
    }
}

#[test]
fn eval_zero_power_zero_is_one() {
    let e = SymExpr::zero().pow(SymExpr::zero());
    assert_eq!(e.to_complex().unwrap(), Complex64::new(1.0, 0.0));
}

#[test]
fn eval_sqrt_of_negative_real_promotes_to_complex() {
    let v = parse_expr("sqrt(-4.0)").unwrap().to_complex().unwrap();
    assert!((v - Complex64::new(0.0, 2.0)).norm() < 1e-12);
}

#[test]
fn binding_rejects_reserved_names() {
    let mut b = Binding::new();
    assert!(b.bind_real("pi", 3.0).is_err());
    assert!(b.bind_real("i", 1.0).is_err());
}

#[test]
fn print_parse_roundtrip_spot_checks() {
    let cases = [
        "2*pi",
        "x - 2*y",
        "sin(a)*cos(b)",
        "3/4",
        "1/x",
        "2/x",
        "x^(-2)",
        "sqrt(1/2)",
        "(1/2)^(1/2)",
        "exp(i*t)",
        "-x",
        "1 + 2*i",
        "a*b^2/c",
    ];
    for c in cases {
        let e = parse_expr(c).unwrap().simplify();
        let back = parse_expr(&e.to_string()).unwrap();
        assert_eq!(back, e, "roundtrip failed on {c}: printed as {e}");
    }
}

#[test]
fn canonical_ordering_literals_i_symbols_compounds() {
    let lit = SymExpr::int(3);
    let i = SymExpr::imaginary();
    let a = sym("a");
    let compound = sym("b").sin();
    assert!(lit < i && i < a && a < compound);
    // symbols compare lexicographically
    assert!(sym("alpha") < sym("beta"));
}

#[test]
fn free_symbols_excludes_pi() {
    let e = parse_expr("2*pi*theta + phi").unwrap();
    let names = e.free_symbol_names();
    assert_eq!(
        names.into_iter().collect::<Vec<_>>(),
        vec!["phi".to_string(), "theta".to_string()]
    );
}

#[test]
fn values_are_shareable_across_threads() {
    fn assert_send_sync<T: Send + Sync>() {}
    assert_send_sync::<SymExpr>();
    assert_send_sync::<Binding>();
    assert_send_sync::<crate::symlinalg::SymMatrix>();
    assert_send_sync::<crate::qstate::QState>();
    assert_send_sync::<crate::channel::Channel>();
    assert_send_sync::<crate::circuit::Circuit>();
}
