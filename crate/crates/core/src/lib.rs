//! qsym-core: a symbolic quantum programming toolkit.
//!
//! The crate combines a small computer-algebra engine for complex-valued
//! scalar expressions with the linear-algebra, state, channel, and circuit
//! machinery needed to build, run, differentiate, and test quantum programs
//! symbolically or numerically.
//!
//! Module map:
//!
//! * [`symexpr`] — scalar expressions: parsing, simplification, substitution,
//!   differentiation, numeric evaluation.
//! * [`symlinalg`] — dense vectors/matrices over expressions; kets, bras,
//!   projectors, symbolic matrix families, Kronecker products.
//! * [`qstate`] — registers, pure/mixed states, partial trace, partial
//!   transposition, reshuffling, fidelity.
//! * [`circuit`] — gate embeddings, controlled gates, register permutations,
//!   QFT/QAOA templates, circuit unitaries and state application.
//! * [`channel`] — quantum channels in Kraus/superoperator/Choi form,
//!   conversions, composition, and standard noise models.
//! * [`random`] — Haar-random kets and unitaries, random CPTP channels, and
//!   pluggable entropy sources (seeded PRNG or raw entropy files).
//! * [`variational`] — observables, objective functions, parameter-shift and
//!   symbolic gradients, classical optimizers.
//! * [`backend`] — execution abstraction with statevector and density-matrix
//!   simulators, shot sampling, and mid-circuit measurement.
//! * [`testgen`] — test-case generation, circuit equivalence checking, and
//!   subsystem-level validation.

pub mod backend;
pub mod channel;
pub mod circuit;
pub mod error;
pub mod numeric;
pub mod qstate;
pub mod random;
pub mod symlinalg;
pub mod testgen;
pub mod variational;
pub mod symexpr;

pub use error::{Error, Result};
pub use symexpr::{Binding, SymExpr};
pub use symlinalg::{SymMatrix, SymVector};
