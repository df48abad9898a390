//! Stages, labstate labels and effective bases.
//!
//! A labstate label packs a set of signalling detectors into an integer:
//! detector `m` (1-based) owns bit `m - 1`, so `{1, 2}` is label 3 and
//! `{7, 8}` is label 192. The void labstate is label 0.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

/// Largest register rank a stage may declare. Labels stay below `2^30`.
pub const MAX_RANK: u32 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("invalid detector {0} (detectors are numbered from 1)")]
    InvalidDetector(i64),
    #[error("detector {0} exceeds the maximum register rank {MAX_RANK}")]
    DetectorOutOfRange(i64),
    #[error("detector {0} listed more than once")]
    DuplicateDetector(u32),
    #[error("invalid labstate label {0}")]
    InvalidLabel(i64),
    #[error("register rank {0} exceeds the maximum of {MAX_RANK}")]
    RankTooLarge(u32),
    #[error("SUO dimension must be at least 1")]
    EmptySuo,
    #[error("label {label} exceeds register of rank {rank}")]
    LabelOutOfRange { label: u32, rank: u32 },
    #[error("SUO index {index} outside 1..={dim}")]
    SuoOutOfRange { index: u32, dim: u32 },
    #[error("basis element {0} declared twice")]
    DuplicateElement(BasisElement),
}

/// Labstate label: bit `m - 1` is set iff detector `m` signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Label(u32);

impl Label {
    pub const VOID: Label = Label(0);

    /// Builds a label from raw bits. Bits above [`MAX_RANK`] are rejected.
    pub fn from_bits(bits: u32) -> Result<Self, RegistryError> {
        if bits >> MAX_RANK != 0 {
            return Err(RegistryError::InvalidLabel(bits as i64));
        }
        Ok(Label(bits))
    }

    pub fn from_detectors<I>(detectors: I) -> Result<Self, RegistryError>
    where
        I: IntoIterator<Item = i64>,
    {
        let mut bits = 0u32;
        for m in detectors {
            if m < 1 {
                return Err(RegistryError::InvalidDetector(m));
            }
            if m > MAX_RANK as i64 {
                return Err(RegistryError::DetectorOutOfRange(m));
            }
            let bit = 1u32 << (m - 1);
            if bits & bit != 0 {
                return Err(RegistryError::DuplicateDetector(m as u32));
            }
            bits |= bit;
        }
        Ok(Label(bits))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Detectors in ascending order.
    pub fn detectors(self) -> Vec<u32> {
        (0..MAX_RANK)
            .filter(|b| self.0 & (1 << b) != 0)
            .map(|b| b + 1)
            .collect()
    }

    pub fn contains(self, detector: u32) -> bool {
        (1..=MAX_RANK).contains(&detector) && self.0 & (1 << (detector - 1)) != 0
    }

    /// Number of signalling detectors.
    pub fn signal_count(self) -> u32 {
        self.0.count_ones()
    }

    /// Smallest register rank that can hold this label.
    pub fn min_rank(self) -> u32 {
        32 - self.0.leading_zeros()
    }

    /// `{1,2}` style rendering, `{}` for the void state.
    pub fn detector_set(self) -> String {
        let dets: Vec<String> = self.detectors().iter().map(u32::to_string).collect();
        format!("{{{}}}", dets.join(","))
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<i64> for Label {
    type Error = RegistryError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        if !(0..1i64 << MAX_RANK).contains(&value) {
            return Err(RegistryError::InvalidLabel(value));
        }
        Ok(Label(value as u32))
    }
}

/// `M = Σ 2^(m-1)` over the signalling detectors.
pub fn labstate_label<I>(detectors: I) -> Result<u32, RegistryError>
where
    I: IntoIterator<Item = i64>,
{
    Label::from_detectors(detectors).map(Label::bits)
}

/// Inverse of [`labstate_label`].
pub fn label_detectors(label: i64) -> Result<BTreeSet<u32>, RegistryError> {
    Ok(Label::try_from(label)?.detectors().into_iter().collect())
}

/// One product basis ket `s^i a^M` of a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisElement {
    /// 1-based SUO basis index.
    pub suo: u32,
    pub label: Label,
}

impl BasisElement {
    pub fn new(suo: u32, label: Label) -> Self {
        Self { suo, label }
    }

    /// Convenience constructor from a detector list; panics on invalid detectors.
    pub fn of(suo: u32, detectors: &[u32]) -> Self {
        let label = Label::from_detectors(detectors.iter().map(|&d| d as i64))
            .expect("valid detector list");
        Self { suo, label }
    }
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}@{}", self.suo, self.label.detector_set())
    }
}

/// A stage `Ω_n`: SUO dimension, register rank and the ordered effective basis.
#[derive(Debug, Clone)]
pub struct StageSpace {
    index: usize,
    suo_dim: u32,
    rank: u32,
    basis: Vec<BasisElement>,
    positions: HashMap<BasisElement, usize>,
}

impl PartialEq for StageSpace {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index
            && self.suo_dim == other.suo_dim
            && self.rank == other.rank
            && self.basis == other.basis
    }
}

impl StageSpace {
    pub fn builder(index: usize, suo_dim: u32, rank: u32) -> Result<StageBuilder, RegistryError> {
        if suo_dim == 0 {
            return Err(RegistryError::EmptySuo);
        }
        if rank > MAX_RANK {
            return Err(RegistryError::RankTooLarge(rank));
        }
        Ok(StageBuilder {
            stage: StageSpace {
                index,
                suo_dim,
                rank,
                basis: Vec::new(),
                positions: HashMap::new(),
            },
        })
    }

    /// Builds a stage from a complete basis list.
    pub fn new(
        index: usize,
        suo_dim: u32,
        rank: u32,
        basis: impl IntoIterator<Item = BasisElement>,
    ) -> Result<Self, RegistryError> {
        let mut builder = Self::builder(index, suo_dim, rank)?;
        for element in basis {
            builder.declare(element)?;
        }
        Ok(builder.build())
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn suo_dim(&self) -> u32 {
        self.suo_dim
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    /// Effective dimension.
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Dimension of the full `H_n ⊗ R_n` space.
    pub fn full_dim(&self) -> u64 {
        self.suo_dim as u64 * (1u64 << self.rank)
    }

    pub fn basis_index(&self, element: &BasisElement) -> Option<usize> {
        self.positions.get(element).copied()
    }

    pub fn contains(&self, element: &BasisElement) -> bool {
        self.positions.contains_key(element)
    }

    /// Checks an element against this stage's SUO dimension and register rank.
    pub fn check_element(&self, element: &BasisElement) -> Result<(), RegistryError> {
        check_bounds(self.suo_dim, self.rank, element)
    }
}

fn check_bounds(suo_dim: u32, rank: u32, element: &BasisElement) -> Result<(), RegistryError> {
    if element.suo == 0 || element.suo > suo_dim {
        return Err(RegistryError::SuoOutOfRange {
            index: element.suo,
            dim: suo_dim,
        });
    }
    if element.label.min_rank() > rank {
        return Err(RegistryError::LabelOutOfRange {
            label: element.label.bits(),
            rank,
        });
    }
    Ok(())
}

/// Position of `element` in the stage's effective basis.
pub fn basis_index(stage: &StageSpace, element: &BasisElement) -> Option<usize> {
    stage.basis_index(element)
}

/// Incrementally declares basis elements; the finished stage is immutable.
#[derive(Debug)]
pub struct StageBuilder {
    stage: StageSpace,
}

impl StageBuilder {
    pub fn declare(&mut self, element: BasisElement) -> Result<usize, RegistryError> {
        check_bounds(self.stage.suo_dim, self.stage.rank, &element)?;
        if self.stage.positions.contains_key(&element) {
            return Err(RegistryError::DuplicateElement(element));
        }
        let position = self.stage.basis.len();
        self.stage.basis.push(element);
        self.stage.positions.insert(element, position);
        Ok(position)
    }

    pub fn build(self) -> StageSpace {
        self.stage
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("vector of length {got} does not match stage {stage} of effective dimension {expected}")]
pub struct DimensionMismatch {
    pub stage: usize,
    pub expected: usize,
    pub got: usize,
}

/// State `Ψ_n` restricted to a stage's effective basis.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveVector {
    stage: Arc<StageSpace>,
    coefficients: Vec<Complex64>,
}

impl EffectiveVector {
    pub fn new(
        stage: Arc<StageSpace>,
        coefficients: Vec<Complex64>,
    ) -> Result<Self, DimensionMismatch> {
        if coefficients.len() != stage.len() {
            return Err(DimensionMismatch {
                stage: stage.index(),
                expected: stage.len(),
                got: coefficients.len(),
            });
        }
        Ok(Self {
            stage,
            coefficients,
        })
    }

    pub fn zeros(stage: Arc<StageSpace>) -> Self {
        let coefficients = vec![Complex64::new(0.0, 0.0); stage.len()];
        Self {
            stage,
            coefficients,
        }
    }

    pub fn stage(&self) -> &Arc<StageSpace> {
        &self.stage
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn coefficient(&self, element: &BasisElement) -> Option<Complex64> {
        self.stage
            .basis_index(element)
            .map(|i| self.coefficients[i])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coefficients.iter().map(Complex64::norm_sqr).sum()
    }

    /// Conjugated coefficients, i.e. the components of the dual `Ψ̄`.
    pub fn dual(&self) -> Vec<Complex64> {
        self.coefficients.iter().map(Complex64::conj).collect()
    }

    /// `Σ |Ψ^{iA}|²` grouped by labstate label.
    pub fn label_weights(&self) -> Vec<(Label, f64)> {
        let mut weights: Vec<(Label, f64)> = Vec::new();
        for (element, c) in self.stage.basis().iter().zip(&self.coefficients) {
            match weights.iter_mut().find(|(l, _)| *l == element.label) {
                Some((_, w)) => *w += c.norm_sqr(),
                None => weights.push((element.label, c.norm_sqr())),
            }
        }
        weights.sort_by_key(|(l, _)| *l);
        weights
    }
}
