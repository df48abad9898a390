use std::path::{Path, PathBuf};

use qdn_core::netdsl::parse_network_with_diagnostics;
use qdn_core::{Binding, Diagnostic, NetworkDescription, Scenario};

use crate::error::CliError;
use crate::values::{bind, Assignment};

pub fn read_source(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn print_diagnostics(origin: &str, diagnostics: &[Diagnostic]) {
    for d in diagnostics {
        eprintln!("{origin}:{d}");
    }
}

/// Loads either a `.qdn` file or a built-in scenario. Parse diagnostics go
/// to standard error.
pub fn load_network(file: Option<&PathBuf>, scenario: Option<&str>) -> Result<NetworkDescription, CliError> {
    match (file, scenario) {
        (_, Some(name)) => name
            .parse::<Scenario>()
            .map(Scenario::build)
            .map_err(|e| CliError::user(e.to_string())),
        (Some(path), None) => {
            let text = read_source(path)?;
            let (network, diagnostics) = parse_network_with_diagnostics(&text);
            print_diagnostics(&path.display().to_string(), &diagnostics);
            network.ok_or(CliError::Invalid)
        }
        (None, None) => Err(CliError::user("give a network file or --scenario NAME")),
    }
}

pub fn parse_assignments(args: &[String]) -> Result<Vec<Assignment>, CliError> {
    args.iter().map(|a| Assignment::parse(a)).collect()
}

pub fn binding_for(network: &NetworkDescription, assignments: &[Assignment]) -> Result<Binding, CliError> {
    bind(network.parameters(), assignments)
}

/// Fails with every missing name when `needed` is not covered.
pub fn require_bound<'a>(
    binding: &Binding,
    needed: impl IntoIterator<Item = &'a String>,
) -> Result<(), CliError> {
    let missing: Vec<&str> = needed
        .into_iter()
        .filter(|p| !binding.contains(p))
        .map(String::as_str)
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::user(format!(
            "unbound parameter{} {}; use --set NAME=VALUE",
            if missing.len() == 1 { "" } else { "s" },
            missing.join(", ")
        )))
    }
}
