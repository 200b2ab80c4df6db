//! Variational-layer properties that need longer runs: sampled-estimator
//! convergence and standard-error scaling, and gradient checks on QAOA
//! instances.

mod common;

use common::{rng, uniform_in};
use qsym_core::circuit::qaoa_template;
use qsym_core::symexpr::SymExpr;
use qsym_core::variational::{
    gradient_parameter_shift, EvalMode, Method, Objective, Observable, Pauli,
};
use std::collections::BTreeMap;

fn random_three_qubit_instance(r: &mut rand_chacha::ChaCha8Rng) -> (Objective, Vec<f64>) {
    use qsym_core::circuit::Circuit;
    let mut c = Circuit::new(3);
    for w in 0..3 {
        c.h(w).unwrap();
    }
    c.ry(0, SymExpr::symbol("a")).unwrap();
    c.cnot(0, 1).unwrap();
    c.rx(1, SymExpr::symbol("b")).unwrap();
    c.cnot(1, 2).unwrap();
    c.rz(2, SymExpr::symbol("a")).unwrap();
    let mut obs = Observable::z(0);
    obs.add_term(
        SymExpr::rational(1, 2),
        BTreeMap::from([(1usize, Pauli::X), (2usize, Pauli::Z)]),
    )
    .unwrap();
    let params = vec![
        uniform_in(r, -std::f64::consts::PI, std::f64::consts::PI),
        uniform_in(r, -std::f64::consts::PI, std::f64::consts::PI),
    ];
    let obj = Objective::new(c, obs, EvalMode::Exact).unwrap();
    (obj, params)
}

#[test]
fn sampled_estimator_within_four_sigma_of_exact() {
    let mut r = rng(301);
    for case in 0..5 {
        let (exact_obj, params) = random_three_qubit_instance(&mut r);
        let exact = exact_obj.value(&params).unwrap();
        let shots = 100_000u64;
        let sampled_obj = Objective::new(
            exact_obj.circuit().clone(),
            exact_obj.observable().clone(),
            EvalMode::Sampled { shots, seed: 500 + case },
        )
        .unwrap();
        let sampled = sampled_obj.value(&params).unwrap();
        // two terms, each a +/-1-bounded estimator with |coeff| <= 1
        let sigma = 1.5 / (shots as f64).sqrt();
        assert!(
            (sampled - exact).abs() < 4.0 * sigma,
            "case {case}: sampled {sampled} vs exact {exact}"
        );
    }
}

#[test]
fn sampled_standard_error_shrinks_by_decade() {
    let mut r = rng(302);
    let (exact_obj, params) = random_three_qubit_instance(&mut r);
    let exact = exact_obj.value(&params).unwrap();
    let repeats = 24;
    let rms_at = |shots: u64| -> f64 {
        let mut sum_sq = 0.0;
        for rep in 0..repeats {
            let obj = Objective::new(
                exact_obj.circuit().clone(),
                exact_obj.observable().clone(),
                EvalMode::Sampled { shots, seed: 9000 + rep },
            )
            .unwrap();
            let v = obj.value(&params).unwrap();
            sum_sq += (v - exact) * (v - exact);
        }
        (sum_sq / repeats as f64).sqrt()
    };
    let e3 = rms_at(1_000);
    let e4 = rms_at(10_000);
    let e5 = rms_at(100_000);
    // each decade of shots should shrink the error by ~sqrt(10) = 3.16,
    // checked loosely within a factor of two
    for (lo, hi, label) in [(e4, e3, "1e3 -> 1e4"), (e5, e4, "1e4 -> 1e5")] {
        let ratio = hi / lo;
        assert!(
            ratio > 3.16 / 2.0 && ratio < 3.16 * 2.0,
            "{label}: error ratio {ratio} (errors {hi} vs {lo})"
        );
    }
}

#[test]
fn qaoa_gradient_matches_finite_differences() {
    let mut r = rng(303);
    // triangle and path instances, p = 1 and 2
    let graphs: Vec<Vec<(usize, usize, f64)>> = vec![
        vec![(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)],
        vec![(0, 1, 0.7), (1, 2, 1.3)],
    ];
    for (gi, edges) in graphs.iter().enumerate() {
        for p in 1..=2 {
            let circuit = qaoa_template(edges, p).unwrap();
            let mut obs = Observable::new();
            for &(u, v, w) in edges {
                obs.add_term(
                    SymExpr::float(0.5 * w),
                    BTreeMap::from([(u, Pauli::Z), (v, Pauli::Z)]),
                )
                .unwrap();
            }
            let obj = Objective::new(circuit, obs, EvalMode::Exact).unwrap();
            let k = obj.param_names().len();
            assert_eq!(k, 2 * p);
            let params: Vec<f64> = (0..k).map(|_| uniform_in(&mut r, -1.5, 1.5)).collect();
            let grad = gradient_parameter_shift(&obj, &params).unwrap();
            let h = 1e-5;
            for slot in 0..k {
                let mut plus = params.clone();
                plus[slot] += h;
                let mut minus = params.clone();
                minus[slot] -= h;
                let fd =
                    (obj.value(&plus).unwrap() - obj.value(&minus).unwrap()) / (2.0 * h);
                assert!(
                    (grad[slot] - fd).abs() < 1e-6,
                    "graph {gi}, p={p}, {}: shift {} vs fd {fd}",
                    obj.param_names()[slot],
                    grad[slot]
                );
            }
        }
    }
}

#[test]
fn optimizer_methods_agree_on_simple_landscape() {
    use qsym_core::circuit::Circuit;
    use qsym_core::variational::optimize;
    let mut c = Circuit::new(2);
    c.ry(0, SymExpr::symbol("a")).unwrap();
    c.cnot(0, 1).unwrap();
    c.ry(1, SymExpr::symbol("b")).unwrap();
    let obs = Observable::zz(0, 1, 1.0);
    let obj = Objective::new(c, obs, EvalMode::Exact).unwrap();
    for method in [Method::GradientDescent { lr: 0.4 }, Method::Adaptive { lr: 0.5 }] {
        let trace = optimize(&obj, &[0.8, 0.4], method, 20_000, 1e-4).unwrap();
        let best = trace
            .iterations
            .iter()
            .map(|p| p.value)
            .fold(f64::INFINITY, f64::min);
        assert!(best < -0.99, "{method:?} reached only {best}");
    }
}
