//! A complete experiment: parameters, stages, initial state and stage maps.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::evolution::{compose, EvolutionError, StageMap, TransitionMatrix};
use crate::exprs::{AmpExpr, Binding, ExprError};
use crate::netdsl::Position;
use crate::povm::{PovmError, PovmSet, RateTable};
use crate::registry::{BasisElement, EffectiveVector, StageSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("a network needs at least one stage")]
    NoStages,
    #[error("stage at position {position} has index {index}")]
    StageIndex { position: usize, index: usize },
    #[error("expected {expected} stage maps for {stages} stages, got {got}")]
    MapCount {
        stages: usize,
        expected: usize,
        got: usize,
    },
    #[error("map {0} does not connect stage {0} to stage {next}", next = .0 + 1)]
    MapStages(usize),
    #[error("initial term {0} is not declared at stage 0")]
    InitialElement(BasisElement),
    #[error("parameter '{0}' declared twice")]
    DuplicateParameter(String),
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Povm(#[from] PovmError),
}

/// Where declarations came from, when the network was parsed from text.
#[derive(Debug, Clone, Default)]
pub(crate) struct SourceMap {
    pub network: Option<Position>,
    pub parameters: BTreeMap<String, Position>,
    pub maps: Vec<Position>,
}

#[derive(Debug, Clone)]
pub struct NetworkDescription {
    name: String,
    parameters: Vec<String>,
    stages: Vec<Arc<StageSpace>>,
    initial_state: Vec<(BasisElement, AmpExpr)>,
    maps: Vec<StageMap>,
    pub(crate) source_map: Option<SourceMap>,
}

impl PartialEq for NetworkDescription {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.parameters == other.parameters
            && self.stages == other.stages
            && self.initial_state == other.initial_state
            && self.maps == other.maps
    }
}

impl NetworkDescription {
    pub fn new(
        name: impl Into<String>,
        parameters: Vec<String>,
        stages: Vec<Arc<StageSpace>>,
        initial_state: Vec<(BasisElement, AmpExpr)>,
        maps: Vec<StageMap>,
    ) -> Result<Self, NetworkError> {
        let mut seen = BTreeSet::new();
        for p in &parameters {
            if !seen.insert(p.as_str()) {
                return Err(NetworkError::DuplicateParameter(p.clone()));
            }
        }
        if stages.is_empty() {
            return Err(NetworkError::NoStages);
        }
        for (position, stage) in stages.iter().enumerate() {
            if stage.index() != position {
                return Err(NetworkError::StageIndex {
                    position,
                    index: stage.index(),
                });
            }
        }
        if maps.len() + 1 != stages.len() {
            return Err(NetworkError::MapCount {
                stages: stages.len(),
                expected: stages.len() - 1,
                got: maps.len(),
            });
        }
        for (k, map) in maps.iter().enumerate() {
            if **map.source() != *stages[k] || **map.target() != *stages[k + 1] {
                return Err(NetworkError::MapStages(k));
            }
        }
        let mut merged: Vec<(BasisElement, AmpExpr)> = Vec::new();
        for (element, amp) in initial_state {
            if !stages[0].contains(&element) {
                return Err(NetworkError::InitialElement(element));
            }
            match merged.iter_mut().find(|(e, _)| *e == element) {
                Some((_, existing)) => {
                    let prev = std::mem::replace(existing, AmpExpr::real(0.0));
                    *existing = prev + amp;
                }
                None => merged.push((element, amp)),
            }
        }
        Ok(Self {
            name: name.into(),
            parameters,
            stages,
            initial_state: merged,
            maps,
            source_map: None,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Declared parameters in declaration order.
    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn stages(&self) -> &[Arc<StageSpace>] {
        &self.stages
    }

    pub fn initial_stage(&self) -> &Arc<StageSpace> {
        &self.stages[0]
    }

    pub fn final_stage(&self) -> &Arc<StageSpace> {
        self.stages.last().expect("at least one stage")
    }

    pub fn initial_state(&self) -> &[(BasisElement, AmpExpr)] {
        &self.initial_state
    }

    pub fn maps(&self) -> &[StageMap] {
        &self.maps
    }

    /// Where map `k` was declared, for networks parsed from text.
    pub fn map_position(&self, k: usize) -> Option<Position> {
        self.source_map.as_ref().and_then(|s| s.maps.get(k).copied())
    }

    /// Parameters that appear in the initial state or any rule.
    pub fn referenced_parameters(&self) -> BTreeSet<String> {
        let mut names: BTreeSet<String> = self
            .initial_state
            .iter()
            .flat_map(|(_, amp)| amp.parameters())
            .collect();
        for map in &self.maps {
            names.extend(map.parameters());
        }
        names
    }

    /// Referenced parameters with no value in `binding`, in declaration order
    /// (undeclared ones last).
    pub fn unbound_parameters(&self, binding: &Binding) -> Vec<String> {
        let referenced = self.referenced_parameters();
        let mut out: Vec<String> = self
            .parameters
            .iter()
            .filter(|p| referenced.contains(*p) && !binding.contains(p))
            .cloned()
            .collect();
        out.extend(
            referenced
                .iter()
                .filter(|p| !self.parameters.contains(p) && !binding.contains(p))
                .cloned(),
        );
        out
    }

    pub fn initial_vector(&self, binding: &Binding) -> Result<EffectiveVector, ExprError> {
        let stage = self.initial_stage().clone();
        let mut coefficients = vec![Complex64::new(0.0, 0.0); stage.len()];
        for (element, amp) in &self.initial_state {
            let k = stage
                .basis_index(element)
                .expect("initial terms are checked at construction");
            coefficients[k] += amp.eval(binding)?;
        }
        Ok(EffectiveVector::new(stage, coefficients).expect("length matches stage"))
    }

    /// `U_{N,0}` at `binding`; the identity for a single-stage network.
    pub fn total(&self, binding: &Binding) -> Result<TransitionMatrix, EvolutionError> {
        if self.maps.is_empty() {
            let stage = self.initial_stage().clone();
            let n = stage.len();
            return Ok(TransitionMatrix::from_entries(
                stage.clone(),
                stage,
                DMatrix::identity(n, n),
            ));
        }
        compose(&self.maps, binding)
    }

    pub fn povms(&self, binding: &Binding) -> Result<PovmSet, NetworkError> {
        Ok(PovmSet::from_total(&self.total(binding)?))
    }

    /// Outcome rates for the network's own initial state.
    pub fn rates(&self, binding: &Binding, normalize: bool) -> Result<RateTable, NetworkError> {
        let povms = self.povms(binding)?;
        let psi0 = self.initial_vector(binding)?;
        Ok(povms
            .rates(&psi0, normalize)?
            .with_metadata(&self.name, self.stages.len(), binding.clone()))
    }

    /// Final state `U_{N,0} Ψ₀`.
    pub fn evolve(&self, binding: &Binding) -> Result<EffectiveVector, NetworkError> {
        let total = self.total(binding)?;
        Ok(total.apply(&self.initial_vector(binding)?)?)
    }
}
