use super::*;
use crate::random::SeededPrng;

fn x_circuit() -> Circuit {
    let mut c = Circuit::new(1);
    c.x(0).unwrap();
    c
}

fn h_circuit() -> Circuit {
    let mut c = Circuit::new(1);
    c.h(0).unwrap();
    c
}

#[test]
fn basis_strategy_enumerates_truth_table() {
    let mut src = SeededPrng::new(1);
    let cases = generate_test_cases(&x_circuit(), &Strategy::Basis, &mut src).unwrap();
    assert_eq!(cases.len(), 2);
    // |0> -> |1>, |1> -> |0>
    for (idx, case) in cases.iter().enumerate() {
        let Expected::State(expected) = &case.expected else { panic!() };
        let target = QState::basis(RegisterShape::qubits(1).unwrap(), 1 - idx).unwrap();
        assert!((fidelity(expected, &target).unwrap() - 1.0).abs() < 1e-12);
    }
    // and the generating circuit passes its own suite
    let report = run_suite(&x_circuit(), &cases, &Binding::new()).unwrap();
    assert!(report.all_passed);
}

#[test]
fn basis_strategy_size_limit_with_override() {
    let c = Circuit::new(7);
    let mut src = SeededPrng::new(1);
    assert!(matches!(
        generate_test_cases(&c, &Strategy::Basis, &mut src),
        Err(Error::SizeLimit(_))
    ));
    let cases = generate_test_cases_with_limit(&c, &Strategy::Basis, &mut src, 7).unwrap();
    assert_eq!(cases.len(), 128);
}

#[test]
fn symbolic_family_through_hadamard() {
    let mut src = SeededPrng::new(2);
    let cases = generate_test_cases(
        &h_circuit(),
        &Strategy::SymbolicFamily { pairs: vec![(0, 1)] },
        &mut src,
    )
    .unwrap();
    assert_eq!(cases.len(), 1);
    let Expected::State(expected) = &cases[0].expected else { panic!() };
    // expected amplitudes (cos a + sin a)/sqrt2, (cos a - sin a)/sqrt2;
    // spot-check at a = 0: H|0> = (1,1)/sqrt2
    let mut b = Binding::new();
    b.bind_real("alpha", 0.0).unwrap();
    let at_zero = expected.substitute(&b).unwrap();
    let crate::qstate::StateBody::Pure(v) = at_zero.body() else { panic!() };
    let nv = v.to_numeric().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((nv[0].re - h).abs() < 1e-12 && (nv[1].re - h).abs() < 1e-12);
    // the full symbolic family passes the suite at several bindings
    for alpha in [0.3, 1.2, -0.8] {
        let mut b = Binding::new();
        b.bind_real("alpha", alpha).unwrap();
        let report = run_suite(&h_circuit(), &cases, &b).unwrap();
        assert!(report.all_passed, "alpha={alpha}");
    }
}

#[test]
fn random_kets_pass_self_consistency() {
    let mut src = SeededPrng::new(3);
    let mut c = Circuit::new(2);
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    let cases =
        generate_test_cases(&c, &Strategy::RandomKets { count: 5 }, &mut src).unwrap();
    assert_eq!(cases.len(), 5);
    let report = run_suite(&c, &cases, &Binding::new()).unwrap();
    assert!(report.all_passed);
}

#[test]
fn hzh_equals_x() {
    let mut hzh = Circuit::new(1);
    hzh.h(0).unwrap();
    hzh.push_builtin(BuiltinGate::Z, &[0], &[], vec![]).unwrap();
    hzh.h(0).unwrap();
    let mut src = SeededPrng::new(4);
    let report =
        check_equivalence(&hzh, &x_circuit(), EquivMethod::ExactMatrix, 0, &mut src).unwrap();
    assert!(matches!(report.verdict, Verdict::Equivalent));
}

#[test]
fn rz_equals_p_up_to_global_phase() {
    let mut src = SeededPrng::new(5);
    for k in 0..10 {
        let theta = 0.37 + 0.61 * k as f64;
        let mut rz = Circuit::new(1);
        rz.rz(0, SymExpr::float(theta)).unwrap();
        let mut p = Circuit::new(1);
        p.phase(0, SymExpr::float(theta)).unwrap();
        let report =
            check_equivalence(&rz, &p, EquivMethod::ExactMatrix, 0, &mut src).unwrap();
        assert!(
            matches!(report.verdict, Verdict::EquivalentUpToGlobalPhase),
            "theta={theta}: {:?}",
            report.verdict.class()
        );
    }
}

#[test]
fn x_vs_z_distinct_with_basis_witness() {
    let mut z = Circuit::new(1);
    z.push_builtin(BuiltinGate::Z, &[0], &[], vec![]).unwrap();
    let mut src = SeededPrng::new(6);
    let report =
        check_equivalence(&x_circuit(), &z, EquivMethod::ExactMatrix, 0, &mut src).unwrap();
    let Verdict::Distinct(witness) = &report.verdict else {
        panic!("expected distinct, got {}", report.verdict.class());
    };
    // |0> is a witness: X|0> = |1> vs Z|0> = |0>
    let deficit = replay_witness(&x_circuit(), &z, witness).unwrap();
    assert!(deficit > 1e-9);
    assert!((witness.fidelity_deficit - 1.0).abs() < 1e-9);
}

#[test]
fn width_mismatch_reported() {
    let mut src = SeededPrng::new(7);
    let err = check_equivalence(
        &x_circuit(),
        &Circuit::new(2),
        EquivMethod::ExactMatrix,
        0,
        &mut src,
    );
    assert!(matches!(err, Err(Error::WidthMismatch(1, 2))));
}

#[test]
fn randomized_method_detects_and_confirms() {
    let mut src = SeededPrng::new(8);
    // same circuit: equivalent
    let mut c = Circuit::new(2);
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    let report =
        check_equivalence(&c, &c.clone(), EquivMethod::RandomizedStates, 8, &mut src).unwrap();
    assert!(matches!(report.verdict, Verdict::Equivalent));
    // different circuit: distinct with a replayable witness
    let mut d = Circuit::new(2);
    d.h(0).unwrap();
    let report =
        check_equivalence(&c, &d, EquivMethod::RandomizedStates, 8, &mut src).unwrap();
    let Verdict::Distinct(w) = &report.verdict else {
        panic!("expected distinct");
    };
    assert!(replay_witness(&c, &d, w).unwrap() > 1e-9);
}

#[test]
fn symbolic_method_identifies_identical_parametrized_circuits() {
    let mut a = Circuit::new(1);
    a.ry(0, SymExpr::symbol("t")).unwrap();
    let mut src = SeededPrng::new(9);
    let report =
        check_equivalence(&a, &a.clone(), EquivMethod::Symbolic, 0, &mut src).unwrap();
    assert!(matches!(report.verdict, Verdict::Equivalent));
    assert_eq!(report.method, EquivMethod::Symbolic);
}

#[test]
fn symbolic_method_falls_back_to_sampling() {
    // RZ(t) vs P(t): structurally different, equal only up to phase;
    // numeric sampling must decide
    let mut rz = Circuit::new(1);
    rz.rz(0, SymExpr::symbol("t")).unwrap();
    let mut p = Circuit::new(1);
    p.phase(0, SymExpr::symbol("t")).unwrap();
    let mut src = SeededPrng::new(10);
    let report = check_equivalence(&rz, &p, EquivMethod::Symbolic, 0, &mut src).unwrap();
    assert!(matches!(report.verdict, Verdict::EquivalentUpToGlobalPhase));
    // distinct symbolic circuits produce a witness carrying the binding
    let mut rx = Circuit::new(1);
    rx.rx(0, SymExpr::symbol("t")).unwrap();
    let report = check_equivalence(&rz, &rx, EquivMethod::Symbolic, 0, &mut src).unwrap();
    let Verdict::Distinct(w) = &report.verdict else {
        panic!("expected distinct");
    };
    assert!(w.binding.is_some());
    assert!(replay_witness(&rz, &rx, w).unwrap() > 1e-9);
}

#[test]
fn equivalence_is_symmetric_on_verdict_class() {
    let mut src = SeededPrng::new(11);
    let circuits = [x_circuit(), h_circuit(), {
        let mut c = Circuit::new(1);
        c.push_builtin(BuiltinGate::S, &[0], &[], vec![]).unwrap();
        c
    }];
    for a in &circuits {
        for b in &circuits {
            let ab =
                check_equivalence(a, b, EquivMethod::ExactMatrix, 0, &mut src).unwrap();
            let ba =
                check_equivalence(b, a, EquivMethod::ExactMatrix, 0, &mut src).unwrap();
            assert_eq!(ab.verdict.class(), ba.verdict.class());
        }
    }
}

#[test]
fn subsystem_test_on_bell_marginal() {
    // CNOT with |+0> input: reduced state on the target wire is I/2
    let mut c = Circuit::new(2);
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    let maximally_mixed = QState::mixed_unchecked(
        RegisterShape::qubits(1).unwrap(),
        crate::symlinalg::SymMatrix::from_numeric(
            numeric::identity(2).map(|z| z * 0.5),
        ),
    );
    let case = TestCase {
        input: QState::zero_qubits(2).unwrap(),
        expected: Expected::State(maximally_mixed),
        tolerance: 1e-9,
    };
    let report = subsystem_test(&c, &[1], &[case], &Binding::new()).unwrap();
    assert!(report.all_passed);
    assert!((report.cases[0].fidelity - 1.0).abs() < 1e-9);
}

#[test]
fn subsystem_test_identity_circuit_passes_with_input_marginal() {
    let c = Circuit::new(2);
    let input = QState::zero_qubits(2).unwrap();
    let expected = input.partial_trace(&[0]).unwrap();
    let case = TestCase {
        input,
        expected: Expected::State(expected),
        tolerance: 1e-9,
    };
    let report = subsystem_test(&c, &[0], &[case], &Binding::new()).unwrap();
    assert!(report.all_passed);
}

#[test]
fn subsystem_test_shape_mismatch() {
    let c = Circuit::new(2);
    let case = TestCase {
        input: QState::zero_qubits(2).unwrap(),
        expected: Expected::State(QState::zero_qubits(2).unwrap()),
        tolerance: 1e-9,
    };
    assert!(matches!(
        subsystem_test(&c, &[0], &[case], &Binding::new()),
        Err(Error::Shape(_))
    ));
}

#[test]
fn mutations_produce_valid_different_circuits() {
    let mut src = SeededPrng::new(12);
    let c = random_circuit(3, 10, &mut src).unwrap();
    for op in [
        MutationOp::GateSubstitution,
        MutationOp::ControlRemoval,
        MutationOp::AdjacentSwap,
    ] {
        if let Some(m) = mutate(&c, op, &mut src).unwrap() {
            assert_eq!(m.num_qubits(), c.num_qubits());
            assert_eq!(m.gates().len(), c.gates().len());
        }
    }
}

#[test]
fn self_equivalence_for_random_circuits() {
    let mut src = SeededPrng::new(13);
    for _ in 0..10 {
        let c = random_circuit(3, 8, &mut src).unwrap();
        let report =
            check_equivalence(&c, &c.clone(), EquivMethod::ExactMatrix, 0, &mut src).unwrap();
        assert!(matches!(report.verdict, Verdict::Equivalent));
    }
}

#[test]
fn basis_cases_detect_an_injected_substitution() {
    let mut src = SeededPrng::new(14);
    let mut c = Circuit::new(2);
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    c.x(1).unwrap();
    let cases = generate_test_cases(&c, &Strategy::Basis, &mut src).unwrap();
    // X -> Y on the last gate
    let mutated = c
        .with_gate_replaced(2, GateApp::builtin(BuiltinGate::Y, &[1], &[], vec![]).unwrap())
        .unwrap();
    let report = run_suite(&mutated, &cases, &Binding::new()).unwrap();
    assert!(!report.all_passed, "mutation escaped the basis suite");
}
