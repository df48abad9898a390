//! Rule generators for common optical modules and builders for the worked
//! experiments.

mod modules;
mod scenarios;

pub use modules::{
    beamsplitter_rule, beamsplitter_rules, mirror_rules, pair_source_rules, phase_rules,
    rotator_rules, two_photon_rule, wollaston_rules, Arm, ModuleError, ModuleKind, ModuleSpec,
};
pub use scenarios::{build_scenario, Scenario};
