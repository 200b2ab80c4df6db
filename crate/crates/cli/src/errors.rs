//! CLI error representation and the exit-code contract.
//!
//! Exit codes: 0 success, 1 usage errors, 2 validation/schema errors,
//! 3 semantic negative results (distinct circuits, failing test suites).
//! Every error prints to standard error as single-line JSON
//! `{"code", "message", "path"?}`.

use qsym_core::Error as CoreError;

#[derive(Debug)]
pub struct CliError {
    pub code: String,
    pub message: String,
    pub path: Option<String>,
    pub exit: i32,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: "usage".to_string(),
            message: message.into(),
            path: None,
            exit: 1,
        }
    }

    pub fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError {
            code: "schema".to_string(),
            message: message.into(),
            path: Some(path.into()),
            exit: 2,
        }
    }

    pub fn expr_syntax(path: impl Into<String>, offset: usize, message: impl Into<String>) -> Self {
        CliError {
            code: "expr_syntax".to_string(),
            message: format!("{} (offset {offset})", message.into()),
            path: Some(path.into()),
            exit: 2,
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: "io".to_string(),
            message: message.into(),
            path: None,
            exit: 2,
        }
    }

    pub fn print_and_code(&self) -> i32 {
        let mut obj = serde_json::json!({
            "code": self.code,
            "message": self.message,
        });
        if let Some(p) = &self.path {
            obj["path"] = serde_json::Value::String(p.clone());
        }
        eprintln!("{obj}");
        self.exit
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let code = match &e {
            CoreError::Syntax { .. } => "expr_syntax",
            CoreError::Domain(_) => "domain",
            CoreError::UnboundSymbol(_) => "unbound_symbol",
            CoreError::IndexOutOfRange { .. } => "index_out_of_range",
            CoreError::Shape(_) => "shape",
            CoreError::EmptyKeepSet => "empty_keep_set",
            CoreError::NotNumeric(_) => "not_numeric",
            CoreError::SizeLimit(_) => "size_limit",
            CoreError::DuplicateWire(_) => "duplicate_wire",
            CoreError::WireOutOfRange { .. } => "wire_out_of_range",
            CoreError::NotAPermutation(_) => "not_a_permutation",
            CoreError::Graph(_) => "graph",
            CoreError::NonHermitianChoi(_) => "non_hermitian_choi",
            CoreError::NegativeEigenvalue(_) => "negative_eigenvalue",
            CoreError::EntropyExhausted => "entropy_exhausted",
            CoreError::SingularMarginal => "singular_marginal",
            CoreError::UnsupportedGateForShift(_) => "unsupported_gate_for_shift",
            CoreError::NonFiniteObjective { .. } => "non_finite_objective",
            CoreError::Capability(_) => "capability",
            CoreError::MissingClassicalBit(_) => "missing_classical_bit",
            CoreError::DuplicateName(_) => "duplicate_name",
            CoreError::UnknownBackend(_) => "unknown_backend",
            CoreError::WidthMismatch(..) => "width_mismatch",
            CoreError::Io(_) => "io",
        };
        CliError {
            code: code.to_string(),
            message: e.to_string(),
            path: None,
            exit: 2,
        }
    }
}
