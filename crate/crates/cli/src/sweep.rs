use std::collections::BTreeSet;
use std::f64::consts::TAU;
use std::io::Write;

use qdn_core::povm::PovmError;
use qdn_core::{realize, Binding, Diagnostic, Label, NetworkDescription, NetworkError, RateTable, Severity};
use rayon::prelude::*;

use crate::error::CliError;
use crate::load::{binding_for, load_network, parse_assignments, require_bound};
use crate::report::{detectors_field, machine_number, DISPLAY_CUTOFF};
use crate::values::SweepSpec;
use crate::SweepArgs;

pub const DEFAULT_MAX_POINTS: usize = 1_000_000;

/// Semi-unitarity tolerance for `check`.
const DEFECT_TOL: f64 = 1e-10;
const SAMPLES: usize = 16;

pub fn explain(e: NetworkError) -> String {
    match e {
        NetworkError::Povm(PovmError::NotNormalized { .. }) => format!("{e}; pass --normalize to rescale"),
        e => e.to_string(),
    }
}

/// Deterministic, well-spread angles in `[0, 2π)`.
fn sample_angle(sample: usize, param: usize) -> f64 {
    const G1: f64 = 0.618_033_988_749_894_9;
    const G2: f64 = 0.754_877_666_246_692_8;
    ((0.5 + (sample + 1) as f64 * G1 + (param + 1) as f64 * G2).fract()) * TAU
}

/// Realizes each map at the given binding, or at sampled angles for the
/// parameters it leaves open. A defect at a fully bound map is an error; at
/// a sampled one it is a warning, since the samples may be unphysical.
pub fn spot_check(network: &NetworkDescription, binding: &Binding) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (k, map) in network.maps().iter().enumerate() {
        let open: Vec<String> = map.parameters().into_iter().filter(|p| !binding.contains(p)).collect();
        let samples = if open.is_empty() { 1 } else { SAMPLES };
        for s in 0..samples {
            let mut b = binding.clone();
            for (j, p) in open.iter().enumerate() {
                b.set(p.clone(), sample_angle(s, j));
            }
            let defect = match realize(map, &b) {
                Ok(m) => m.semi_unitarity_defect(),
                Err(e) => {
                    out.push(located(network, k, Severity::Error, format!("map {k} -> {}: {e}", k + 1)));
                    break;
                }
            };
            if defect > DEFECT_TOL {
                let at = if open.is_empty() {
                    String::new()
                } else {
                    let vals: Vec<String> = open.iter().map(|p| format!("{p}={:.6}", b.get(p).unwrap_or(0.0))).collect();
                    format!(" at sampled {}", vals.join(" "))
                };
                let severity = if open.is_empty() { Severity::Error } else { Severity::Warning };
                out.push(located(
                    network,
                    k,
                    severity,
                    format!("map {k} -> {}: not semi-unitary{at} (defect {defect:.3e})", k + 1),
                ));
                break;
            }
        }
    }
    out
}

fn located(network: &NetworkDescription, k: usize, severity: Severity, message: String) -> Diagnostic {
    Diagnostic {
        severity,
        position: network.map_position(k),
        message,
    }
}

/// Grid points in row-major order: the first axis varies slowest.
fn grid(axes: &[(SweepSpec, Vec<f64>)], index: usize) -> Vec<f64> {
    let mut rest = index;
    let mut point = vec![0.0; axes.len()];
    for (slot, (_, values)) in axes.iter().enumerate().rev() {
        point[slot] = values[rest % values.len()];
        rest /= values.len();
    }
    point
}

pub fn run(args: SweepArgs) -> Result<(), CliError> {
    let network = load_network(args.source.file.as_ref(), args.source.scenario.as_deref())?;
    let base = binding_for(&network, &parse_assignments(&args.source.set)?)?;

    let mut specs = Vec::new();
    for raw in &args.sweep {
        let spec = SweepSpec::parse(raw)?;
        if !network.parameters().contains(&spec.name) {
            return Err(CliError::user(format!("cannot sweep '{}': no such parameter", spec.name)));
        }
        if specs.iter().any(|s: &SweepSpec| s.name == spec.name) {
            return Err(CliError::user(format!("'{}' is swept twice", spec.name)));
        }
        specs.push(spec);
    }
    // columns follow parameter declaration order
    specs.sort_by_key(|s| network.parameters().iter().position(|p| *p == s.name));
    let axes: Vec<(SweepSpec, Vec<f64>)> = specs.into_iter().map(|s| {
        let v = s.values();
        (s, v)
    }).collect();

    let points = axes
        .iter()
        .try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()))
        .filter(|n| *n <= args.max_points)
        .ok_or_else(|| CliError::user(format!("sweep grid exceeds {} points", args.max_points)))?;

    let mut probe = base.clone();
    for (spec, values) in &axes {
        probe.set(spec.name.clone(), values[0]);
    }
    require_bound(&probe, &network.referenced_parameters())?;

    let tables: Vec<(Vec<f64>, RateTable)> = (0..points)
        .into_par_iter()
        .map(|i| {
            let point = grid(&axes, i);
            let mut b = base.clone();
            for ((spec, _), v) in axes.iter().zip(&point) {
                b.set(spec.name.clone(), *v);
            }
            network.rates(&b, args.normalize).map(|t| (point, t))
        })
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::user(explain(e)))?;

    let labels: BTreeSet<Label> = if args.all {
        network
            .final_stage()
            .basis()
            .iter()
            .map(|e| e.label)
            .chain(tables.iter().flat_map(|(_, t)| t.labels()))
            .collect()
    } else {
        tables
            .iter()
            .flat_map(|(_, t)| t.iter().filter(|(_, p)| *p >= DISPLAY_CUTOFF).map(|(l, _)| l))
            .collect()
    };

    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(std::fs::File::create(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?),
        None => Box::new(std::io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(std::io::BufWriter::new(sink));
    let mut header: Vec<String> = axes.iter().map(|(s, _)| s.name.clone()).collect();
    header.extend(["label", "detectors", "rate"].map(String::from));
    w.write_record(&header)?;
    for (point, table) in &tables {
        for label in &labels {
            let mut record: Vec<String> = point.iter().copied().map(machine_number).collect();
            record.push(label.bits().to_string());
            record.push(detectors_field(*label));
            record.push(machine_number(table.rate(*label)));
            w.write_record(&record)?;
        }
    }
    w.flush()?;
    Ok(())
}
