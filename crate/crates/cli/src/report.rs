//! Rate tables and POVM matrices in human, JSON and CSV form.

use std::io::Write;

use qdn_core::{Binding, Complex64, Label, NetworkDescription, PovmSet, RateTable};
use serde::Serialize;

use crate::error::CliError;

/// Below this a rate or matrix entry is shown as zero to people. Machine
/// formats always carry the exact value.
pub const DISPLAY_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub label: Label,
    pub p: f64,
}

/// Rows in label order: rates of at least [`DISPLAY_CUTOFF`], or with
/// `all`, every label the final stage can show.
pub fn rate_rows(network: &NetworkDescription, table: &RateTable, all: bool) -> Vec<Row> {
    let mut labels: Vec<Label> = if all {
        network.final_stage().basis().iter().map(|e| e.label).chain(table.labels()).collect()
    } else {
        table.iter().filter(|(_, p)| *p >= DISPLAY_CUTOFF).map(|(l, _)| l).collect()
    };
    labels.sort();
    labels.dedup();
    labels.into_iter().map(|label| Row { label, p: table.rate(label) }).collect()
}

pub fn human_number(x: f64) -> String {
    if x.abs() < DISPLAY_CUTOFF {
        return "0".into();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.to_string()
    }
}

fn binding_line(binding: &Binding) -> String {
    binding
        .iter()
        .map(|(k, v)| format!("{k}={}", human_number(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn write_rates_human(out: &mut impl Write, network: &NetworkDescription, binding: &Binding, rows: &[Row]) -> Result<(), CliError> {
    writeln!(out, "network {} ({} stages)", network.name(), network.stages().len())?;
    if !binding.is_empty() {
        writeln!(out, "binding {}", binding_line(binding))?;
    }
    let width = rows.iter().map(|r| r.label.detector_set().len()).max().unwrap_or(0).max(9);
    writeln!(out, "{:<7} {:<width$}  rate", "label", "detectors")?;
    for r in rows {
        writeln!(out, "{:<7} {:<width$}  {}", r.label.bits(), r.label.detector_set(), human_number(r.p))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRate {
    label: u32,
    detectors: Vec<u32>,
    p: f64,
}

#[derive(Serialize)]
struct JsonRates<'a> {
    network: &'a str,
    binding: std::collections::BTreeMap<&'a str, f64>,
    rates: Vec<JsonRate>,
}

pub fn write_rates_json(out: &mut impl Write, network: &NetworkDescription, binding: &Binding, rows: &[Row]) -> Result<(), CliError> {
    let doc = JsonRates {
        network: network.name(),
        binding: binding.iter().collect(),
        rates: rows
            .iter()
            .map(|r| JsonRate {
                label: r.label.bits(),
                detectors: r.label.detectors(),
                p: r.p,
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Shortest text that reads back to the same `f64`, as in the JSON output.
pub fn machine_number(x: f64) -> String {
    format!("{x:?}")
}

pub fn detectors_field(label: Label) -> String {
    label.detectors().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_rates_csv(out: impl Write, rows: &[Row]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["label", "detectors", "rate"])?;
    for r in rows {
        w.write_record([r.label.bits().to_string(), detectors_field(r.label), machine_number(r.p)])?;
    }
    w.flush()?;
    Ok(())
}

fn human_complex(z: Complex64) -> String {
    let re = if z.re.abs() < DISPLAY_CUTOFF { 0.0 } else { z.re };
    let im = if z.im.abs() < DISPLAY_CUTOFF { 0.0 } else { z.im };
    match (re == 0.0, im == 0.0) {
        (_, true) => human_number(re),
        (true, false) => format!("{}i", human_number(im)),
        (false, false) => {
            let sign = if im < 0.0 { '-' } else { '+' };
            format!("{}{sign}{}i", human_number(re), human_number(im.abs()))
        }
    }
}

fn visible(m: &qdn_core::povm::PovmElement) -> bool {
    m.matrix().iter().any(|z| z.norm() >= DISPLAY_CUTOFF)
}

pub fn write_povms_human(out: &mut impl Write, network: &NetworkDescription, binding: &Binding, povms: &PovmSet, all: bool) -> Result<(), CliError> {
    writeln!(out, "network {} ({} stages)", network.name(), network.stages().len())?;
    if !binding.is_empty() {
        writeln!(out, "binding {}", binding_line(binding))?;
    }
    let names: Vec<String> = povms.initial().basis().iter().map(|e| e.to_string()).collect();
    for e in povms.elements().iter().filter(|e| all || visible(e)) {
        writeln!(out)?;
        writeln!(out, "E^{}  detectors {}", e.label().bits(), e.label().detector_set())?;
        let cells: Vec<Vec<String>> = (0..names.len())
            .map(|r| (0..names.len()).map(|c| human_complex(e.matrix()[(r, c)])).collect())
            .collect();
        let head = names.iter().map(String::len).max().unwrap_or(0);
        let widths: Vec<usize> = (0..names.len())
            .map(|c| cells.iter().map(|row| row[c].len()).chain([names[c].len()]).max().unwrap_or(0))
            .collect();
        let line = |first: &str, row: &[String]| {
            let mut s = format!("  {first:<head$}");
            for (c, cell) in row.iter().enumerate() {
                s.push_str(&format!("  {:<w$}", cell, w = widths[c]));
            }
            s.trim_end().to_string()
        };
        writeln!(out, "{}", line("", &names))?;
        for (r, row) in cells.iter().enumerate() {
            writeln!(out, "{}", line(&names[r], row))?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonPovm {
    label: u32,
    detectors: Vec<u32>,
    /// Row-major `[re, im]` pairs.
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct JsonPovms<'a> {
    network: &'a str,
    binding: std::collections::BTreeMap<&'a str, f64>,
    basis: Vec<String>,
    completeness_defect: f64,
    povms: Vec<JsonPovm>,
}

pub fn write_povms_json(out: &mut impl Write, network: &NetworkDescription, binding: &Binding, povms: &PovmSet, all: bool) -> Result<(), CliError> {
    let doc = JsonPovms {
        network: network.name(),
        binding: binding.iter().collect(),
        basis: povms.initial().basis().iter().map(|e| e.to_string()).collect(),
        completeness_defect: povms.completeness_defect(),
        povms: povms
            .elements()
            .iter()
            .filter(|e| all || visible(e))
            .map(|e| {
                let m = e.matrix();
                JsonPovm {
                    label: e.label().bits(),
                    detectors: e.label().detectors(),
                    matrix: (0..m.nrows())
                        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                        .collect(),
                }
            })
            .collect(),
    };
    serde_json::to_writer_pretty(&mut *out, &doc).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}
