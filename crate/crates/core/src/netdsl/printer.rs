use std::fmt::Write;

use crate::network::NetworkDescription;
use crate::registry::{BasisElement, StageSpace};

fn element(stage: &StageSpace, e: &BasisElement) -> String {
    if stage.suo_dim() == 1 {
        format!("@{}", e.label.detector_set())
    } else {
        format!("s{}@{}", e.suo, e.label.detector_set())
    }
}

/// Renders a network as `.qdn` text that parses back to an equal network.
pub fn to_qdn(network: &NetworkDescription) -> String {
    let mut out = String::new();
    writeln!(out, "network {}", network.name()).unwrap();
    if !network.parameters().is_empty() {
        writeln!(out, "param {}", network.parameters().join(", ")).unwrap();
    }
    for stage in network.stages() {
        writeln!(out).unwrap();
        writeln!(
            out,
            "stage {} suo {} rank {}",
            stage.index(),
            stage.suo_dim(),
            stage.rank()
        )
        .unwrap();
        for e in stage.basis() {
            writeln!(out, "basis {}", element(stage, e)).unwrap();
        }
    }
    let initial = network.initial_stage();
    writeln!(out, "\ninit").unwrap();
    for (e, amp) in network.initial_state() {
        writeln!(out, "term {} * {}", amp.display_as_factor(), element(initial, e)).unwrap();
    }
    for map in network.maps() {
        writeln!(
            out,
            "\nmap {} -> {}",
            map.source().index(),
            map.target().index()
        )
        .unwrap();
        for rule in map.rules() {
            let terms: Vec<String> = rule
                .terms
                .iter()
                .map(|(t, amp)| format!("{} * {}", amp.display_as_factor(), element(map.target(), t)))
                .collect();
            writeln!(
                out,
                "rule {} => {}",
                element(map.source(), &rule.source),
                terms.join(" + ")
            )
            .unwrap();
        }
    }
    out
}
