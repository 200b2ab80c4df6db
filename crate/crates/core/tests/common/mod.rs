//! Shared test support: seeded random expression/matrix generators and
//! small numeric helpers used by the property and acceptance suites.

#![allow(dead_code)]

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use qsym_core::symexpr::SymExpr;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

pub fn uniform_in(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * uniform(rng)
}

pub fn pick(rng: &mut ChaCha8Rng, n: usize) -> usize {
    (rng.next_u64() % n as u64) as usize
}

/// Random complex with standard-normal-ish parts (Box-Muller on uniforms).
pub fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let u = uniform(rng);
        let v = uniform(rng);
        if u > 1e-12 {
            return (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos();
        }
    }
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

/// Configuration for the random expression generator.
pub struct ExprGen {
    /// Symbols the generated tree may mention.
    pub symbols: Vec<&'static str>,
    /// Allow the imaginary unit and conj/abs (off for differentiation
    /// tests, which need real-analytic trees).
    pub allow_complex: bool,
    /// Allow division (reciprocal powers).
    pub allow_division: bool,
    pub max_depth: usize,
}

impl ExprGen {
    pub fn smooth(symbols: Vec<&'static str>) -> Self {
        ExprGen {
            symbols,
            allow_complex: false,
            allow_division: false,
            max_depth: 4,
        }
    }

    pub fn general(symbols: Vec<&'static str>) -> Self {
        ExprGen {
            symbols,
            allow_complex: true,
            allow_division: true,
            max_depth: 6,
        }
    }

    pub fn generate(&self, rng: &mut ChaCha8Rng) -> SymExpr {
        self.gen_node(rng, self.max_depth, true)
    }

    fn gen_leaf(&self, rng: &mut ChaCha8Rng) -> SymExpr {
        let n_choices = if self.allow_complex { 5 } else { 4 };
        match pick(rng, n_choices) {
            0 => SymExpr::int((rng.next_u64() % 7) as i64 - 3),
            1 => {
                let n = (rng.next_u64() % 7) as i64 - 3;
                let d = (rng.next_u64() % 3) as i64 + 2;
                SymExpr::rational(n, d)
            }
            2 => SymExpr::float(uniform_in(rng, -2.0, 2.0)),
            3 => {
                if self.symbols.is_empty() {
                    SymExpr::one()
                } else {
                    SymExpr::symbol(self.symbols[pick(rng, self.symbols.len())])
                }
            }
            _ => SymExpr::imaginary(),
        }
    }

    fn gen_node(&self, rng: &mut ChaCha8Rng, depth: usize, allow_exp: bool) -> SymExpr {
        if depth == 0 {
            return self.gen_leaf(rng);
        }
        match pick(rng, 10) {
            0 | 1 => {
                let n = 2 + pick(rng, 2);
                let mut acc = self.gen_node(rng, depth - 1, allow_exp);
                for _ in 1..n {
                    acc = acc + self.gen_node(rng, depth - 1, allow_exp);
                }
                acc
            }
            2 | 3 => {
                let n = 2 + pick(rng, 2);
                let mut acc = self.gen_node(rng, depth - 1, allow_exp);
                for _ in 1..n {
                    acc = acc * self.gen_node(rng, depth - 1, allow_exp);
                }
                acc
            }
            4 => self.gen_node(rng, depth - 1, allow_exp).powi(2 + pick(rng, 2) as i64),
            5 => self.gen_node(rng, depth - 1, allow_exp).sin(),
            6 => self.gen_node(rng, depth - 1, allow_exp).cos(),
            7 => {
                // nested exponentials blow up finite-difference scales
                if allow_exp {
                    self.gen_node(rng, depth - 1, false).exp()
                } else {
                    self.gen_leaf(rng)
                }
            }
            8 => {
                if self.allow_complex {
                    let inner = self.gen_node(rng, depth - 1, allow_exp);
                    if pick(rng, 2) == 0 {
                        inner.conj()
                    } else {
                        inner.abs()
                    }
                } else {
                    // branch-safe square root: sqrt(k + u^2) with k >= 1
                    let u = self.gen_node(rng, depth - 1, false);
                    (SymExpr::int(1 + pick(rng, 3) as i64) + u.powi(2)).sqrt()
                }
            }
            _ => {
                if self.allow_division {
                    let den = self.gen_node(rng, depth - 1, allow_exp);
                    self.gen_node(rng, depth - 1, allow_exp) / den
                } else {
                    self.gen_leaf(rng)
                }
            }
        }
    }
}

use nalgebra::DMatrix;

pub type CMat = DMatrix<Complex64>;

/// Random Ginibre matrix (independent standard complex Gaussians / sqrt 2).
pub fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| random_complex(rng) / Complex64::new(2f64.sqrt(), 0.0))
}

/// Random density matrix from G G† / tr(G G†).
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    let g = ginibre(rng, dim, dim);
    let w = &g * g.adjoint();
    let tr: Complex64 = w.diagonal().iter().sum();
    w.map(|x| x / tr)
}

/// Random normalized statevector.
pub fn random_statevector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim).map(|_| random_complex(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}
