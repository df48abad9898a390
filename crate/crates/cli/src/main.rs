mod error;
mod load;
mod report;
mod sweep;
mod values;

use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qdn_core::{Scenario, to_qdn};

use error::CliError;
use load::{binding_for, load_network, parse_assignments, require_bound};

#[derive(Parser)]
#[command(name = "qdn", version, about = "Quantized detector network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a network file, then spot-check semi-unitarity.
    Check(CheckArgs),
    /// Outcome probability table for one binding.
    Rates(RatesArgs),
    /// POVM elements over the initial basis.
    Povm(PovmArgs),
    /// Rate tables over a parameter grid, as CSV.
    Sweep(SweepArgs),
    /// Print a built-in scenario as a .qdn file.
    Export(ExportArgs),
}

#[derive(Args)]
struct Source {
    /// Network description file.
    #[arg(required_unless_present = "scenario", conflicts_with = "scenario")]
    file: Option<PathBuf>,
    /// Use a built-in network instead of a file.
    #[arg(long, value_parser = scenario_names())]
    scenario: Option<String>,
    /// Parameter values, e.g. `theta*=pi/4 phi1=0`. A trailing `*` matches a prefix.
    #[arg(long = "set", value_name = "NAME=VALUE", num_args = 1..)]
    set: Vec<String>,
}

fn scenario_names() -> clap::builder::PossibleValuesParser {
    Scenario::ALL.iter().map(|s| s.name()).collect::<Vec<_>>().into()
}

#[derive(Args)]
struct CheckArgs {
    file: PathBuf,
    /// Check semi-unitarity at this binding; failures become errors.
    #[arg(long = "set", value_name = "NAME=VALUE", num_args = 1..)]
    set: Vec<String>,
}

#[derive(Args)]
struct RatesArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    #[arg(long)]
    csv: bool,
    /// Include labels whose rate is below 1e-12.
    #[arg(long)]
    all: bool,
    /// Rescale the initial state to unit norm.
    #[arg(long)]
    normalize: bool,
}

#[derive(Args)]
struct PovmArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long)]
    json: bool,
    /// Include elements whose entries are all below 1e-12.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    source: Source,
    /// Grid axis `NAME=START:STOP:STEPS`, both ends included. Repeatable.
    #[arg(long = "sweep", value_name = "SPEC", required = true, num_args = 1..)]
    sweep: Vec<String>,
    /// Write CSV here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Keep every final label, even ones that never reach 1e-12.
    #[arg(long)]
    all: bool,
    #[arg(long)]
    normalize: bool,
    /// Refuse grids with more points than this.
    #[arg(long, default_value_t = sweep::DEFAULT_MAX_POINTS)]
    max_points: usize,
}

#[derive(Args)]
struct ExportArgs {
    #[arg(long, value_parser = scenario_names())]
    scenario: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Check(a) => check(a),
        Command::Rates(a) => rates(a),
        Command::Povm(a) => povm(a),
        Command::Sweep(a) => sweep::run(a),
        Command::Export(a) => export(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Invalid) => ExitCode::from(1),
        Err(e) => {
            eprintln!("qdn: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn stdout() -> BufWriter<std::io::StdoutLock<'static>> {
    BufWriter::new(std::io::stdout().lock())
}

fn check(args: CheckArgs) -> Result<(), CliError> {
    let text = load::read_source(&args.file)?;
    let origin = args.file.display().to_string();
    let (network, diagnostics) = qdn_core::netdsl::parse_network_with_diagnostics(&text);
    load::print_diagnostics(&origin, &diagnostics);
    let network = network.ok_or(CliError::Invalid)?;
    let binding = binding_for(&network, &parse_assignments(&args.set)?)?;
    let findings = sweep::spot_check(&network, &binding);
    load::print_diagnostics(&origin, &findings);
    let warnings = diagnostics.iter().chain(&findings).filter(|d| !d.is_error()).count();
    if findings.iter().any(|d| d.is_error()) {
        return Err(CliError::Invalid);
    }
    let mut out = stdout();
    writeln!(
        out,
        "{}: ok ({} stages, {} maps, {} warning{})",
        network.name(),
        network.stages().len(),
        network.maps().len(),
        warnings,
        if warnings == 1 { "" } else { "s" }
    )?;
    out.flush()?;
    Ok(())
}

fn rates(args: RatesArgs) -> Result<(), CliError> {
    let network = load_network(args.source.file.as_ref(), args.source.scenario.as_deref())?;
    let binding = binding_for(&network, &parse_assignments(&args.source.set)?)?;
    require_bound(&binding, &network.referenced_parameters())?;
    let table = network
        .rates(&binding, args.normalize)
        .map_err(|e| CliError::user(sweep::explain(e)))?;
    let rows = report::rate_rows(&network, &table, args.all);
    let mut out = stdout();
    if args.json {
        report::write_rates_json(&mut out, &network, &binding, &rows)?;
    } else if args.csv {
        report::write_rates_csv(&mut out, &rows)?;
    } else {
        report::write_rates_human(&mut out, &network, &binding, &rows)?;
    }
    out.flush()?;
    Ok(())
}

fn povm(args: PovmArgs) -> Result<(), CliError> {
    let network = load_network(args.source.file.as_ref(), args.source.scenario.as_deref())?;
    let binding = binding_for(&network, &parse_assignments(&args.source.set)?)?;
    let needed: std::collections::BTreeSet<String> =
        network.maps().iter().flat_map(|m| m.parameters()).collect();
    require_bound(&binding, &needed)?;
    let povms = network.povms(&binding).map_err(|e| CliError::user(e.to_string()))?;
    let mut out = stdout();
    if args.json {
        report::write_povms_json(&mut out, &network, &binding, &povms, args.all)?;
    } else {
        report::write_povms_human(&mut out, &network, &binding, &povms, args.all)?;
    }
    out.flush()?;
    Ok(())
}

fn export(args: ExportArgs) -> Result<(), CliError> {
    let scenario: Scenario = args.scenario.parse().map_err(|e: qdn_core::stdlib::ModuleError| CliError::user(e.to_string()))?;
    let text = to_qdn(&scenario.build());
    match args.out {
        Some(path) => std::fs::write(&path, text).map_err(|source| CliError::Io { path, source }),
        None => {
            let mut out = stdout();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}
