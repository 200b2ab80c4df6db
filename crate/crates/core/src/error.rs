//! Crate-wide error type.
//!
//! Every fallible operation in the toolkit reports through [`Error`]; the
//! variants mirror the failure classes of the public API (parse errors,
//! domain violations, shape mismatches, capability limits, ...).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed expression text; `pos` is a byte offset into the input.
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    /// Value or operation outside the mathematical domain of the operand
    /// (unknown function, complex value for a real symbol, parameter out of
    /// range, unsupported derivative, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Numeric evaluation hit a symbol with no binding.
    #[error("unbound symbol: {0}")]
    UnboundSymbol(String),

    /// Basis/subsystem index outside the valid range.
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    /// Incompatible matrix/vector/register shapes.
    #[error("shape error: {0}")]
    Shape(String),

    /// `partial_trace` called with nothing to keep.
    #[error("keep set must be nonempty")]
    EmptyKeepSet,

    /// A numeric-only operation received unbound symbolic data.
    #[error("not numeric: {0}")]
    NotNumeric(String),

    /// Request exceeds a configured dense-size limit.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// A wire appears more than once in a target/control list.
    #[error("duplicate wire {0}")]
    DuplicateWire(usize),

    /// Wire index outside the circuit width.
    #[error("wire {wire} out of range for {num_qubits} qubits")]
    WireOutOfRange { wire: usize, num_qubits: usize },

    /// The given map is not a bijection on the wire set.
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),

    /// Invalid interaction graph (self-loop or duplicate edge).
    #[error("graph error: {0}")]
    Graph(String),

    /// Superoperator whose reshuffle is not Hermitian; the map has no
    /// Kraus form.
    #[error("Choi matrix not Hermitian (deviation {0:.3e})")]
    NonHermitianChoi(f64),

    /// Choi eigenvalue below the CP floor; the map is not completely
    /// positive.
    #[error("Choi matrix has negative eigenvalue {0:.6e}; map is not CP")]
    NegativeEigenvalue(f64),

    /// An entropy file ran out of bytes.
    #[error("entropy source exhausted")]
    EntropyExhausted,

    /// Random-channel construction hit a (numerically) singular marginal
    /// after the configured number of resampling attempts.
    #[error("singular marginal in random channel construction")]
    SingularMarginal,

    /// Parameter-shift gradient requested through a gate that is not of
    /// Pauli-rotation form.
    #[error("gate '{0}' does not support the parameter-shift rule")]
    UnsupportedGateForShift(String),

    /// The objective became non-finite during optimization; the trace up to
    /// the failure is attached.
    #[error("objective became non-finite after {trace}")]
    NonFiniteObjective {
        trace: Box<crate::variational::OptimizerTrace>,
    },

    /// Backend cannot satisfy the request (width, noise, symbolics).
    #[error("capability error: {0}")]
    Capability(String),

    /// `run_cgate` referenced a classical bit that was never measured.
    #[error("missing classical bit '{0}'")]
    MissingClassicalBit(String),

    /// Backend name already registered.
    #[error("backend '{0}' already registered")]
    DuplicateName(String),

    /// Backend name not found in the registry.
    #[error("unknown backend '{0}'")]
    UnknownBackend(String),

    /// Circuits of different widths compared for equivalence.
    #[error("width mismatch: {0} vs {1} qubits")]
    WidthMismatch(usize, usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
