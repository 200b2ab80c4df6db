//! Observable specification parser.
//!
//! Grammar: terms joined by `+` or `-`; each term is a product of factors
//! joined by `*`, where a factor of the form `X<wire>`, `Y<wire>`, or
//! `Z<wire>` names a Pauli and every other factor multiplies into the
//! (real) coefficient expression. Examples:
//!
//! ```text
//! Z0
//! 0.5*Z0*Z1 + 0.5*Z1*Z2 - 2
//! (1/2)*X0 + sin(w)*Z1
//! ```

use std::collections::BTreeMap;

use qsym_core::symexpr::{parse_expr, SymExpr};
use qsym_core::variational::{Observable, Pauli};

use crate::errors::CliError;

pub fn parse_observable(spec: &str) -> Result<Observable, CliError> {
    let mut obs = Observable::new();
    for (term_text, negated) in split_terms(spec) {
        let term_text = term_text.trim();
        if term_text.is_empty() {
            return Err(CliError::usage(format!(
                "empty term in observable spec '{spec}'"
            )));
        }
        let mut coeff = if negated {
            -SymExpr::one()
        } else {
            SymExpr::one()
        };
        let mut paulis: BTreeMap<usize, Pauli> = BTreeMap::new();
        for factor in split_factors(term_text) {
            let factor = factor.trim();
            if let Some((pauli, wire)) = parse_pauli_factor(factor) {
                if paulis.insert(wire, pauli).is_some() {
                    return Err(CliError::usage(format!(
                        "wire {wire} named twice in term '{term_text}'"
                    )));
                }
                continue;
            }
            let expr = parse_expr(factor).map_err(|e| {
                CliError::usage(format!("bad coefficient '{factor}': {e}"))
            })?;
            coeff = coeff * expr;
        }
        obs.add_term(coeff.simplify(), paulis)
            .map_err(CliError::from)?;
    }
    Ok(obs)
}

fn parse_pauli_factor(factor: &str) -> Option<(Pauli, usize)> {
    let mut chars = factor.chars();
    let head = chars.next()?;
    let pauli = Pauli::from_char(head)?;
    let rest: String = chars.collect();
    if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some((pauli, rest.parse().ok()?))
}

/// Split on top-level + and - (respecting parentheses); returns
/// (term, negated).
fn split_terms(spec: &str) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    let mut negated = false;
    let mut seen_content = false;
    for ch in spec.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
                seen_content = true;
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            '+' | '-' if depth == 0 && seen_content => {
                out.push((current.clone(), negated));
                current.clear();
                negated = ch == '-';
                seen_content = false;
            }
            '-' if depth == 0 && !seen_content && current.trim().is_empty() => {
                negated = !negated;
            }
            _ => {
                if !ch.is_whitespace() {
                    seen_content = true;
                }
                current.push(ch);
            }
        }
    }
    out.push((current, negated));
    out
}

fn split_factors(term: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in term.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            '*' if depth == 0 => {
                out.push(current.clone());
                current.clear();
            }
            _ => current.push(ch),
        }
    }
    out.push(current);
    out
}
