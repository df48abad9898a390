//! Quantized detector networks.
//!
//! A network is a chain of stages `Ω_0 … Ω_N`. Each stage pairs a small SUO
//! Hilbert space with a register of detector qubits, and computation is
//! restricted to an explicitly declared effective basis of `(s^i, a^M)`
//! pairs. Stage maps are semi-unitary; their product gives the total
//! transition operator, from which generalized Kraus operators, POVM
//! elements and outcome/coincidence rates follow.

pub mod evolution;
pub mod exprs;
pub mod netdsl;
pub mod network;
pub mod povm;
pub mod registry;
pub mod stdlib;

pub use evolution::{
    apply, compose, realize, semi_unitarity_defect, EvolutionError, Rule, StageMap,
    TransitionMatrix,
};
pub use exprs::{eval, parameters_of, AmpExpr, Binding, ExprError, Func};
pub use netdsl::{parse_network, to_qdn, validate, Diagnostic, Position, Severity};
pub use network::{NetworkDescription, NetworkError};
pub use povm::{
    completeness_defect, coincidence_rate, detector_marginal, kraus_operators, outcome_rates,
    povm_elements, KrausOperator, PovmElement, PovmError, PovmSet, RateTable,
};
pub use registry::{
    basis_index, label_detectors, labstate_label, BasisElement, EffectiveVector, Label,
    RegistryError, StageSpace,
};
pub use stdlib::{build_scenario, Scenario};

pub use num_complex::Complex64;
