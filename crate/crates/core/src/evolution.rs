//! Semi-unitary stage maps: construction from rules, numeric realization,
//! composition into the total transition operator, and application to states.

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::exprs::{AmpExpr, Binding, ExprError};
use crate::registry::{BasisElement, EffectiveVector, StageSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvolutionError {
    #[error(
        "no semi-unitary map exists from stage {source_stage} (effective dimension {source_dim}) \
         to stage {target_stage} (effective dimension {target_dim}): the target dimension must not be smaller"
    )]
    DimensionTheorem {
        source_stage: usize,
        source_dim: usize,
        target_stage: usize,
        target_dim: usize,
    },
    #[error("a stage map must connect stage n to n+1, got {source_stage} -> {target_stage}")]
    NotConsecutive {
        source_stage: usize,
        target_stage: usize,
    },
    #[error("rule source {element} is not declared at stage {stage}")]
    UnknownSource { element: BasisElement, stage: usize },
    #[error("rule target {element} is not declared at stage {stage}")]
    UnknownTarget { element: BasisElement, stage: usize },
    #[error("duplicate rule for {0}")]
    DuplicateRule(BasisElement),
    #[error("incomplete map: no rule for {element} at stage {stage}")]
    IncompleteMap { element: BasisElement, stage: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("cannot compose: map {boundary} ends at stage {left} but map {next} starts at stage {right}", next = .boundary + 1)]
    StageMismatch {
        boundary: usize,
        left: usize,
        right: usize,
    },
    #[error("cannot compose an empty list of maps")]
    EmptyComposition,
    #[error("state lives on stage {got} (dimension {got_dim}) but the operator acts on stage {expected} (dimension {expected_dim})")]
    BasisMismatch {
        expected: usize,
        expected_dim: usize,
        got: usize,
        got_dim: usize,
    },
}

/// `U_{n+1,n}` acting on one source basis element.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub source: BasisElement,
    pub terms: Vec<(BasisElement, AmpExpr)>,
}

impl Rule {
    pub fn new(source: BasisElement) -> Self {
        Self {
            source,
            terms: Vec::new(),
        }
    }

    /// Appends `amp * target`, summing into an existing term for the same target.
    pub fn term(mut self, amp: AmpExpr, target: BasisElement) -> Self {
        self.push(amp, target);
        self
    }

    pub fn push(&mut self, amp: AmpExpr, target: BasisElement) {
        match self.terms.iter_mut().find(|(t, _)| *t == target) {
            Some((_, existing)) => {
                let prev = std::mem::replace(existing, AmpExpr::real(0.0));
                *existing = prev + amp;
            }
            None => self.terms.push((target, amp)),
        }
    }

    /// Same rule with duplicate targets summed.
    pub fn merged(self) -> Self {
        let mut out = Rule::new(self.source);
        for (target, amp) in self.terms {
            out.push(amp, target);
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct StageMap {
    source: Arc<StageSpace>,
    target: Arc<StageSpace>,
    rules: Vec<Rule>,
    by_source: HashMap<BasisElement, usize>,
}

impl PartialEq for StageMap {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.rules == other.rules
    }
}

impl StageMap {
    pub fn builder(
        source: Arc<StageSpace>,
        target: Arc<StageSpace>,
    ) -> Result<StageMapBuilder, EvolutionError> {
        if target.index() != source.index() + 1 {
            return Err(EvolutionError::NotConsecutive {
                source_stage: source.index(),
                target_stage: target.index(),
            });
        }
        if source.len() > target.len() {
            return Err(EvolutionError::DimensionTheorem {
                source_stage: source.index(),
                source_dim: source.len(),
                target_stage: target.index(),
                target_dim: target.len(),
            });
        }
        Ok(StageMapBuilder {
            map: StageMap {
                source,
                target,
                rules: Vec::new(),
                by_source: HashMap::new(),
            },
        })
    }

    pub fn new(
        source: Arc<StageSpace>,
        target: Arc<StageSpace>,
        rules: impl IntoIterator<Item = Rule>,
    ) -> Result<Self, EvolutionError> {
        let mut builder = Self::builder(source, target)?;
        for rule in rules {
            builder.add_rule(rule)?;
        }
        Ok(builder.build())
    }

    pub fn source(&self) -> &Arc<StageSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StageSpace> {
        &self.target
    }

    /// Rules in registration order.
    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_for(&self, source: &BasisElement) -> Option<&Rule> {
        self.by_source.get(source).map(|&k| &self.rules[k])
    }

    /// Source basis elements without a rule.
    pub fn missing_rules(&self) -> Vec<BasisElement> {
        self.source
            .basis()
            .iter()
            .filter(|e| !self.by_source.contains_key(e))
            .copied()
            .collect()
    }

    pub fn parameters(&self) -> BTreeSet<String> {
        self.rules
            .iter()
            .flat_map(|r| r.terms.iter())
            .flat_map(|(_, amp)| amp.parameters())
            .collect()
    }

    pub fn realize(&self, binding: &Binding) -> Result<TransitionMatrix, EvolutionError> {
        realize(self, binding)
    }
}

#[derive(Debug)]
pub struct StageMapBuilder {
    map: StageMap,
}

impl StageMapBuilder {
    pub fn add_rule(&mut self, rule: Rule) -> Result<(), EvolutionError> {
        let map = &mut self.map;
        if !map.source.contains(&rule.source) {
            return Err(EvolutionError::UnknownSource {
                element: rule.source,
                stage: map.source.index(),
            });
        }
        if map.by_source.contains_key(&rule.source) {
            return Err(EvolutionError::DuplicateRule(rule.source));
        }
        if let Some((target, _)) = rule.terms.iter().find(|(t, _)| !map.target.contains(t)) {
            return Err(EvolutionError::UnknownTarget {
                element: *target,
                stage: map.target.index(),
            });
        }
        map.by_source.insert(rule.source, map.rules.len());
        map.rules.push(rule.merged());
        Ok(())
    }

    pub fn build(self) -> StageMap {
        self.map
    }
}

/// Realized operator between two effective bases; rows index the target
/// basis, columns the source basis.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    source: Arc<StageSpace>,
    target: Arc<StageSpace>,
    entries: DMatrix<Complex64>,
}

impl TransitionMatrix {
    pub fn from_entries(
        source: Arc<StageSpace>,
        target: Arc<StageSpace>,
        entries: DMatrix<Complex64>,
    ) -> Self {
        assert_eq!(entries.nrows(), target.len());
        assert_eq!(entries.ncols(), source.len());
        Self {
            source,
            target,
            entries,
        }
    }

    pub fn source(&self) -> &Arc<StageSpace> {
        &self.source
    }

    pub fn target(&self) -> &Arc<StageSpace> {
        &self.target
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Coefficient `U^{jB,iA}`, or `None` if either element is outside the effective bases.
    pub fn entry(&self, target: &BasisElement, source: &BasisElement) -> Option<Complex64> {
        let row = self.target.basis_index(target)?;
        let col = self.source.basis_index(source)?;
        Some(self.entries[(row, col)])
    }

    pub fn semi_unitarity_defect(&self) -> f64 {
        semi_unitarity_defect(self)
    }

    pub fn apply(&self, state: &EffectiveVector) -> Result<EffectiveVector, EvolutionError> {
        apply(self, state)
    }
}

pub fn realize(map: &StageMap, binding: &Binding) -> Result<TransitionMatrix, EvolutionError> {
    let rows = map.target.len();
    let cols = map.source.len();
    let mut entries = DMatrix::zeros(rows, cols);
    for (col, element) in map.source.basis().iter().enumerate() {
        let rule = map
            .rule_for(element)
            .ok_or(EvolutionError::IncompleteMap {
                element: *element,
                stage: map.source.index(),
            })?;
        for (target, amp) in &rule.terms {
            let row = map
                .target
                .basis_index(target)
                .expect("targets are checked when the rule is added");
            entries[(row, col)] += amp.eval(binding)?;
        }
    }
    Ok(TransitionMatrix {
        source: map.source.clone(),
        target: map.target.clone(),
        entries,
    })
}

/// Largest entry magnitude of `U†U - I`.
pub fn semi_unitarity_defect(matrix: &TransitionMatrix) -> f64 {
    let gram = matrix.entries.adjoint() * &matrix.entries;
    max_deviation_from_identity(&gram)
}

pub(crate) fn max_deviation_from_identity(m: &DMatrix<Complex64>) -> f64 {
    let mut worst = 0.0f64;
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            let expected = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((m[(r, c)] - expected).norm());
        }
    }
    worst
}

/// `U_{N,0} = U_{N,N-1} … U_{1,0}` at one binding.
pub fn compose(maps: &[StageMap], binding: &Binding) -> Result<TransitionMatrix, EvolutionError> {
    let (first, rest) = maps.split_first().ok_or(EvolutionError::EmptyComposition)?;
    for (k, pair) in maps.windows(2).enumerate() {
        if *pair[0].target != *pair[1].source {
            return Err(EvolutionError::StageMismatch {
                boundary: k,
                left: pair[0].target.index(),
                right: pair[1].source.index(),
            });
        }
    }
    let mut total = realize(first, binding)?;
    for map in rest {
        let next = realize(map, binding)?;
        total = TransitionMatrix {
            source: total.source,
            target: next.target,
            entries: next.entries * total.entries,
        };
    }
    Ok(total)
}

pub fn apply(
    matrix: &TransitionMatrix,
    state: &EffectiveVector,
) -> Result<EffectiveVector, EvolutionError> {
    if **state.stage() != *matrix.source {
        return Err(EvolutionError::BasisMismatch {
            expected: matrix.source.index(),
            expected_dim: matrix.source.len(),
            got: state.stage().index(),
            got_dim: state.stage().len(),
        });
    }
    let coefficients: Vec<Complex64> = (0..matrix.entries.nrows())
        .map(|row| {
            matrix
                .entries
                .row(row)
                .iter()
                .zip(state.coefficients())
                .map(|(u, c)| u * c)
                .sum()
        })
        .collect();
    Ok(EffectiveVector::new(matrix.target.clone(), coefficients)
        .expect("row count equals target dimension"))
}
