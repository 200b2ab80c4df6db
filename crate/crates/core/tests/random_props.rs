//! Statistical properties of the random-object samplers: Haar moments,
//! invariance proxies, and sampling consistency of the backends.

mod common;

use num_complex::Complex64;
use qsym_core::backend::{bitstring, qrun, RunOptions, StatevectorBackend};
use qsym_core::qstate::StateBody;
use qsym_core::random::{random_ket, random_unitary, SeededPrng};
use qsym_core::symexpr::Binding;
use qsym_core::testgen::random_circuit;

#[test]
fn random_ket_pauli_z_moment_vanishes() {
    // dim = 2: <Z> averaged over Haar kets is 0
    let mut src = SeededPrng::new(401);
    let n = 10_000;
    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    for _ in 0..n {
        let ket = random_ket(2, &mut src).unwrap();
        let StateBody::Pure(v) = ket.body() else { unreachable!() };
        let nv = v.to_numeric().unwrap();
        let z = nv[0].norm_sqr() - nv[1].norm_sqr();
        sum += z;
        sum_sq += z * z;
    }
    let mean = sum / n as f64;
    let var = (sum_sq / n as f64 - mean * mean).max(0.0);
    let sigma = (var / n as f64).sqrt();
    assert!(
        mean.abs() < 3.0 * sigma,
        "<Z> = {mean}, 3 sigma = {:.2e}",
        3.0 * sigma
    );
}

#[test]
fn haar_left_right_invariance_proxy() {
    // for fixed unitary V and Haar U, the |entry|^2 moments of V U and
    // U V match those of U (1/d)
    let dim = 3usize;
    let v = random_unitary(dim, &mut SeededPrng::new(402))
        .unwrap()
        .to_numeric()
        .unwrap();
    let n = 6_000;
    let mut src = SeededPrng::new(403);
    let mut moments = [0.0f64; 3]; // U, VU, UV at entry (0, 0)
    let mut sq = [0.0f64; 3];
    for _ in 0..n {
        let u = random_unitary(dim, &mut src).unwrap().to_numeric().unwrap();
        let vu = &v * &u;
        let uv = &u * &v;
        for (k, m) in [&u, &vu, &uv].into_iter().enumerate() {
            let x = m[(0, 0)].norm_sqr();
            moments[k] += x;
            sq[k] += x * x;
        }
    }
    let target = 1.0 / dim as f64;
    for (k, label) in ["U", "VU", "UV"].iter().enumerate() {
        let mean = moments[k] / n as f64;
        let var = (sq[k] / n as f64 - mean * mean).max(0.0);
        let sigma = (var / n as f64).sqrt();
        assert!(
            (mean - target).abs() < 3.0 * sigma,
            "{label}: moment {mean} vs {target} (3 sigma {:.2e})",
            3.0 * sigma
        );
    }
}

#[test]
fn backend_sampling_matches_exact_diagonal_in_total_variation() {
    // random 4-qubit circuits: empirical distribution at 1e5 shots within
    // total variation 0.02 of the exact Born distribution
    let shots = 100_000u64;
    for seed in 0..3u64 {
        let mut src = SeededPrng::new(500 + seed);
        let c = random_circuit(4, 12, &mut src).unwrap();
        let exact = qrun(&StatevectorBackend, &c, &Binding::new(), &RunOptions::default())
            .unwrap()
            .final_state
            .unwrap();
        let StateBody::Pure(v) = exact.body() else { unreachable!() };
        let amps = v.to_numeric().unwrap();
        let sampled = qrun(
            &StatevectorBackend,
            &c,
            &Binding::new(),
            &RunOptions { shots, seed: 600 + seed, ..Default::default() },
        )
        .unwrap()
        .counts;
        let mut tv = 0.0;
        for (idx, amp) in amps.iter().enumerate() {
            let key = bitstring(idx, 4);
            let freq = *sampled.get(&key).unwrap_or(&0) as f64 / shots as f64;
            tv += (freq - amp.norm_sqr()).abs();
        }
        tv /= 2.0;
        assert!(tv < 0.02, "seed {seed}: total variation {tv}");
    }
}

#[test]
fn complex_entries_have_expected_scale() {
    // Ginibre entries (g1 + i g2)/sqrt(2) have E|z|^2 = 1
    let mut src = SeededPrng::new(404);
    let n = 20_000;
    let mut sum = 0.0;
    for _ in 0..n {
        let z: Complex64 = qsym_core::random::complex_gaussian(&mut src).unwrap();
        sum += z.norm_sqr();
    }
    let mean = sum / n as f64;
    assert!((mean - 1.0).abs() < 0.05, "E|z|^2 = {mean}");
}
