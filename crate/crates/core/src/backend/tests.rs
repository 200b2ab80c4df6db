use super::*;
use crate::circuit::BuiltinGate;
use crate::numeric;
use crate::qstate::fidelity;
use crate::symexpr::SymExpr;

#[test]
fn registry_has_builtins_in_order() {
    let reg = BackendRegistry::default();
    assert_eq!(reg.names(), vec!["sv-ideal".to_string(), "dm-noisy".to_string()]);
    assert!(reg.get("sv-ideal").is_ok());
    assert!(matches!(reg.get("nope"), Err(Error::UnknownBackend(_))));
}

#[test]
fn duplicate_registration_rejected() {
    let mut reg = BackendRegistry::default();
    assert!(matches!(
        reg.register(Arc::new(StatevectorBackend)),
        Err(Error::DuplicateName(_))
    ));
}

#[test]
fn custom_backend_dispatches_through_qrun() {
    struct Stub;
    impl Backend for Stub {
        fn name(&self) -> &str {
            "stub"
        }
        fn capabilities(&self) -> Capabilities {
            Capabilities { max_qubits: 4, supports_noise: false, supports_symbolic: false }
        }
        fn run(&self, c: &Circuit, _: &Binding, o: &RunOptions) -> Result<RunResult> {
            let mut counts = BTreeMap::new();
            counts.insert(bitstring(0, c.num_qubits()), o.shots);
            Ok(RunResult {
                counts,
                final_state: None,
                metadata: RunMetadata {
                    backend: "stub".to_string(),
                    seed: o.seed,
                    shots: o.shots,
                    elapsed: Duration::ZERO,
                },
            })
        }
    }
    let mut reg = BackendRegistry::default();
    reg.register(Arc::new(Stub)).unwrap();
    let backend = reg.get("stub").unwrap();
    let c = Circuit::new(2);
    let out = qrun(
        backend.as_ref(),
        &c,
        &Binding::new(),
        &RunOptions { shots: 5, ..Default::default() },
    )
    .unwrap();
    assert_eq!(out.counts.get("00"), Some(&5));
}

#[test]
fn empty_circuit_measures_all_zero() {
    let c = Circuit::new(1);
    let out = qrun(
        &StatevectorBackend,
        &c,
        &Binding::new(),
        &RunOptions { shots: 100, seed: 3, ..Default::default() },
    )
    .unwrap();
    assert_eq!(out.counts.get("0"), Some(&100));
    assert_eq!(out.counts.len(), 1);
}

#[test]
fn hadamard_counts_within_binomial_bound() {
    let mut c = Circuit::new(1);
    c.h(0).unwrap();
    let shots = 100_000u64;
    let out = qrun(
        &StatevectorBackend,
        &c,
        &Binding::new(),
        &RunOptions { shots, seed: 11, ..Default::default() },
    )
    .unwrap();
    let zeros = *out.counts.get("0").unwrap_or(&0) as f64;
    let freq = zeros / shots as f64;
    let sigma = 0.5 / (shots as f64).sqrt();
    assert!(
        (freq - 0.5).abs() < 4.0 * sigma,
        "frequency {freq} outside 4 sigma of 0.5"
    );
}

#[test]
fn determinism_under_fixed_seed() {
    let mut c = Circuit::new(3);
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    c.cnot(1, 2).unwrap();
    let opts = RunOptions { shots: 1000, seed: 42, ..Default::default() };
    let a = qrun(&StatevectorBackend, &c, &Binding::new(), &opts).unwrap();
    let b = qrun(&StatevectorBackend, &c, &Binding::new(), &opts).unwrap();
    assert_eq!(a.counts, b.counts);
}

#[test]
fn unbound_symbol_reported() {
    let mut c = Circuit::new(1);
    c.rx(0, SymExpr::symbol("theta")).unwrap();
    let err = qrun(&StatevectorBackend, &c, &Binding::new(), &RunOptions::default());
    assert!(matches!(err, Err(Error::UnboundSymbol(name)) if name == "theta"));
}

#[test]
fn noise_on_sv_backend_is_capability_error() {
    let mut c = Circuit::new(1);
    c.h(0).unwrap();
    let noise = NoiseSpec {
        placements: vec![NoisePlacement {
            qubit: 0,
            kind: NoiseKind::BitFlip,
            param: 0.1,
            after_gate_index: 0,
        }],
        uniform: None,
    };
    let err = qrun(
        &StatevectorBackend,
        &c,
        &Binding::new(),
        &RunOptions { noise: Some(noise), ..Default::default() },
    );
    assert!(matches!(err, Err(Error::Capability(_))));
}

#[test]
fn sv_and_dm_agree_on_noiseless_circuits() {
    let mut c = Circuit::new(3);
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    c.ry(2, SymExpr::float(0.87)).unwrap();
    c.cnot(1, 2).unwrap();
    let opts = RunOptions::default();
    let sv = qrun(&StatevectorBackend, &c, &Binding::new(), &opts).unwrap();
    let dm = qrun(&DensityMatrixBackend, &c, &Binding::new(), &opts).unwrap();
    let psi = sv.final_state.unwrap();
    let rho = dm.final_state.unwrap();
    let dev = numeric::max_abs_diff(
        &psi.density().to_numeric().unwrap(),
        &rho.density().to_numeric().unwrap(),
    );
    assert!(dev < 1e-10, "sv/dm disagreement {dev}");
}

#[test]
fn run_gate_applies_pauli_x() {
    let state = QState::zero_qubits(1).unwrap();
    let x = BuiltinGate::X.matrix(&[]).unwrap();
    let out = run_gate(&x, &[0], &state).unwrap();
    let one = QState::basis(RegisterShape::qubits(1).unwrap(), 1).unwrap();
    assert!((fidelity(&out, &one).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn run_cgate_respects_classical_bit() {
    let state = QState::zero_qubits(1).unwrap();
    let x = BuiltinGate::X.matrix(&[]).unwrap();
    let mut record = ClassicalRegister::new();
    record.set("m", 0);
    let unchanged = run_cgate(&x, &[0], &record, "m", &state).unwrap();
    assert!((fidelity(&unchanged, &state).unwrap() - 1.0).abs() < 1e-12);
    record.set("m", 1);
    let flipped = run_cgate(&x, &[0], &record, "m", &state).unwrap();
    let one = QState::basis(RegisterShape::qubits(1).unwrap(), 1).unwrap();
    assert!((fidelity(&flipped, &one).unwrap() - 1.0).abs() < 1e-12);
    assert!(matches!(
        run_cgate(&x, &[0], &record, "missing", &state),
        Err(Error::MissingClassicalBit(_))
    ));
}

#[test]
fn measurement_collapses_and_is_seed_deterministic() {
    let mut c = Circuit::new(1);
    c.h(0).unwrap();
    let out = qrun(&StatevectorBackend, &c, &Binding::new(), &RunOptions::default()).unwrap();
    let state = out.final_state.unwrap();
    let mut src = SeededPrng::new(4);
    let (bit, collapsed) = measure(&state, 0, &mut src).unwrap();
    let target = QState::basis(RegisterShape::qubits(1).unwrap(), bit as usize).unwrap();
    assert!((fidelity(&collapsed, &target).unwrap() - 1.0).abs() < 1e-12);
    let mut src2 = SeededPrng::new(4);
    let (bit2, _) = measure(&state, 0, &mut src2).unwrap();
    assert_eq!(bit, bit2);
}

#[test]
fn teleportation_reproduces_input_on_every_branch() {
    // prepare a fixed single-qubit state on wire 0, entangle wires 1-2,
    // Bell-measure wires 0-1, classically correct wire 2
    let mut src = SeededPrng::new(17);
    let psi = crate::random::random_ket(2, &mut src).unwrap();
    let amps = match psi.body() {
        StateBody::Pure(v) => v.to_numeric().unwrap(),
        _ => unreachable!(),
    };
    let mut joint = vec![Complex64::new(0.0, 0.0); 8];
    joint[0] = amps[0]; // |0 00>
    joint[4] = amps[1]; // |1 00>
    let state = QState::pure_unchecked(
        RegisterShape::qubits(3).unwrap(),
        SymVector::from_complex_slice(&joint),
    );
    let h = BuiltinGate::H.matrix(&[]).unwrap();
    let x = BuiltinGate::X.matrix(&[]).unwrap();
    let z = BuiltinGate::Z.matrix(&[]).unwrap();
    let cnot = BuiltinGate::CNOT.matrix(&[]).unwrap();
    // Bell pair on wires 1, 2
    let state = run_gate(&h, &[1], &state).unwrap();
    let state = run_gate(&cnot, &[1, 2], &state).unwrap();
    // Bell measurement basis on wires 0, 1
    let state = run_gate(&cnot, &[0, 1], &state).unwrap();
    let state = run_gate(&h, &[0], &state).unwrap();

    let mut total_prob = 0.0;
    for m0 in 0..2u8 {
        for m1 in 0..2u8 {
            let (p0, after0) = postselect(&state, 0, m0).unwrap();
            let (p1, after1) = postselect(&after0, 1, m1).unwrap();
            let prob = p0 * p1;
            total_prob += prob;
            let mut record = ClassicalRegister::new();
            record.set("m0", m0);
            record.set("m1", m1);
            let corrected = run_cgate(&x, &[2], &record, "m1", &after1).unwrap();
            let corrected = run_cgate(&z, &[2], &record, "m0", &corrected).unwrap();
            let reduced = corrected.partial_trace(&[2]).unwrap();
            let f = fidelity(&reduced, &psi).unwrap();
            assert!(
                (f - 1.0).abs() < 1e-9,
                "branch ({m0},{m1}) fidelity {f}"
            );
            assert!((prob - 0.25).abs() < 1e-9, "branch probability {prob}");
        }
    }
    assert!((total_prob - 1.0).abs() < 1e-9);
}

#[test]
fn ghz_bitflip_noise_matches_dense_channel_oracle() {
    // GHZ-3 with bit-flip noise on each qubit after the final gate
    let mut c = Circuit::new(3);
    c.h(0).unwrap();
    c.cnot(0, 1).unwrap();
    c.cnot(1, 2).unwrap();
    let p = 0.1;
    let last = c.gates().len() - 1;
    let noise = NoiseSpec {
        placements: (0..3)
            .map(|q| NoisePlacement {
                qubit: q,
                kind: NoiseKind::BitFlip,
                param: p,
                after_gate_index: last,
            })
            .collect(),
        uniform: None,
    };
    let shots = 100_000u64;
    let out = qrun(
        &DensityMatrixBackend,
        &c,
        &Binding::new(),
        &RunOptions { shots, seed: 5, noise: Some(noise) },
    )
    .unwrap();

    // dense oracle: perfect GHZ density, then one-qubit bit-flip channels
    // composed via full product superoperators
    let sv = qrun(&StatevectorBackend, &c, &Binding::new(), &RunOptions::default()).unwrap();
    let ghz = sv.final_state.unwrap().density().to_numeric().unwrap();
    let flip = noise_model(NoiseKind::BitFlip, SymExpr::float(p)).unwrap();
    let id = crate::channel::Channel::identity(2);
    let on0 =
        crate::channel::product_superoperator_all(&[flip.clone(), id.clone(), id.clone()])
            .unwrap();
    let on1 =
        crate::channel::product_superoperator_all(&[id.clone(), flip.clone(), id.clone()])
            .unwrap();
    let on2 = crate::channel::product_superoperator_all(&[id.clone(), id, flip]).unwrap();
    let state = QState::mixed_unchecked(
        RegisterShape::qubits(3).unwrap(),
        SymMatrix::from_numeric(ghz),
    );
    let noisy = on2.apply(&on1.apply(&on0.apply(&state).unwrap()).unwrap()).unwrap();
    let oracle = noisy.density().to_numeric().unwrap();

    // total variation between sampled distribution and oracle diagonal
    let mut tv = 0.0;
    for idx in 0..8 {
        let key = bitstring(idx, 3);
        let sampled = *out.counts.get(&key).unwrap_or(&0) as f64 / shots as f64;
        tv += (sampled - oracle[(idx, idx)].re).abs();
    }
    tv /= 2.0;
    assert!(tv < 0.02, "total variation {tv}");
}

#[test]
fn capability_width_enforced() {
    let c = Circuit::new(DM_MAX_QUBITS + 1);
    let err = qrun(&DensityMatrixBackend, &c, &Binding::new(), &RunOptions::default());
    assert!(matches!(err, Err(Error::Capability(_))));
}
