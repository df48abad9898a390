//! The `.qdn` network-description language.
//!
//! ```text
//! network NAME
//! param a, b
//! stage 0 suo 2 rank 1
//! basis s1@{1}
//! init
//! term a * s1@{1}
//! map 0 -> 1
//! rule s1@{1} => b * s1@{2} + -i * s2@{1}
//! ```
//!
//! Statements are line oriented and `#` starts a comment. The amplitude in
//! front of a basis element is a product-level expression: sums must be
//! parenthesized, since `+` separates rule terms.

mod lexer;
mod parser;
mod printer;

use std::fmt;

pub use parser::{parse_expr, parse_network_with_diagnostics};
pub use printer::to_qdn;

use crate::network::NetworkDescription;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Position {
    /// 1-based line.
    pub line: usize,
    /// 1-based column, counted in characters.
    pub column: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub position: Option<Position>,
    pub message: String,
}

impl Diagnostic {
    pub fn error(position: Position, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            position: Some(position),
            message: message.into(),
        }
    }

    pub fn warning(position: Option<Position>, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            position,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(pos) = self.position {
            write!(f, "{pos}: ")?;
        }
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{kind}: {}", self.message)
    }
}

/// Parses and validates a network. Any error diagnostic fails the parse;
/// warnings are dropped (see [`parse_network_with_diagnostics`]).
pub fn parse_network(source: &str) -> Result<NetworkDescription, Vec<Diagnostic>> {
    match parse_network_with_diagnostics(source) {
        (Some(network), _) => Ok(network),
        (None, diagnostics) => Err(diagnostics),
    }
}

/// Structural checks beyond parsing: unused parameters, parameters used but
/// never declared, missing rules, and maps that break the dimension theorem
/// (a semi-unitary map needs a target at least as large as its source).
pub fn validate(network: &NetworkDescription) -> Vec<Diagnostic> {
    let sources = network.source_map.as_ref();
    let map_pos = |k: usize| sources.and_then(|s| s.maps.get(k).copied());
    let param_pos = |p: &str| sources.and_then(|s| s.parameters.get(p).copied());
    let network_pos = sources.and_then(|s| s.network);
    let error = |position: Option<Position>, message: String| Diagnostic {
        severity: Severity::Error,
        position,
        message,
    };

    let mut out = Vec::new();
    let referenced = network.referenced_parameters();
    for p in network.parameters() {
        if !referenced.contains(p) {
            out.push(Diagnostic::warning(
                param_pos(p),
                format!("parameter '{p}' is declared but never used"),
            ));
        }
    }
    for p in &referenced {
        if !network.parameters().contains(p) {
            out.push(error(network_pos, format!("parameter '{p}' is used but not declared")));
        }
    }
    for (k, map) in network.maps().iter().enumerate() {
        let (src, dst) = (map.source(), map.target());
        if src.len() > dst.len() {
            out.push(error(
                map_pos(k),
                format!(
                    "map {k} -> {}: source effective dimension {} exceeds target effective dimension {}; \
                     no semi-unitary map exists (dimension theorem)",
                    k + 1,
                    src.len(),
                    dst.len()
                ),
            ));
        }
        for element in map.missing_rules() {
            out.push(error(
                map_pos(k),
                format!("map {k} -> {}: no rule for {element}", k + 1),
            ));
        }
    }
    out
}
