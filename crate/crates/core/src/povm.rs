//! Generalized Kraus operators, POVM elements and outcome rates.
//!
//! `M^A` is the block of the total transition matrix whose rows carry final
//! label `A`; `E^A = M^A† M^A` acts on the initial effective space and
//! `Pr(A) = Ψ̄₀ E^A Ψ₀`.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::evolution::{max_deviation_from_identity, TransitionMatrix};
use crate::exprs::Binding;
use crate::registry::{EffectiveVector, Label, StageSpace};

/// Tolerance on `|Ψ₀|² - 1` before a state counts as normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;
/// Largest imaginary part tolerated in `Ψ̄ E Ψ`.
pub const IMAGINARY_TOLERANCE: f64 = 1e-10;
/// Rates below this are shown as zero in human-readable output.
pub const DISPLAY_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PovmError {
    #[error("initial state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("cannot normalize the zero state")]
    ZeroState,
    #[error("state lives on stage {got} but the POVM acts on stage {expected}")]
    BasisMismatch { expected: usize, got: usize },
    #[error("rate for label {label} has imaginary part {imag}")]
    NonReal { label: Label, imag: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct KrausOperator {
    initial: Arc<StageSpace>,
    label: Label,
    suo_rows: Vec<u32>,
    matrix: DMatrix<Complex64>,
}

impl KrausOperator {
    pub fn label(&self) -> Label {
        self.label
    }

    /// Final SUO index of each row.
    pub fn suo_rows(&self) -> &[u32] {
        &self.suo_rows
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn initial(&self) -> &Arc<StageSpace> {
        &self.initial
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PovmElement {
    initial: Arc<StageSpace>,
    label: Label,
    matrix: DMatrix<Complex64>,
}

impl PovmElement {
    pub fn label(&self) -> Label {
        self.label
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn initial(&self) -> &Arc<StageSpace> {
        &self.initial
    }

    /// `Ψ̄ E Ψ` over raw coefficients in initial-basis order.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (r, pr) in psi.iter().enumerate() {
            let mut row = Complex64::new(0.0, 0.0);
            for (c, pc) in psi.iter().enumerate() {
                row += self.matrix[(r, c)] * pc;
            }
            acc += pr.conj() * row;
        }
        acc
    }

    /// Largest entry magnitude of `E - E†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let diff = &self.matrix - self.matrix.adjoint();
        diff.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        if self.matrix.is_empty() {
            return 0.0;
        }
        let hermitian = (&self.matrix + self.matrix.adjoint()) * Complex64::new(0.5, 0.0);
        hermitian
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

/// One Kraus operator per final label that has a nonzero entry, in label order.
pub fn kraus_operators(total: &TransitionMatrix) -> Vec<KrausOperator> {
    let mut rows_by_label: BTreeMap<Label, Vec<usize>> = BTreeMap::new();
    for (row, element) in total.target().basis().iter().enumerate() {
        rows_by_label.entry(element.label).or_default().push(row);
    }
    let entries = total.entries();
    rows_by_label
        .into_iter()
        .filter(|(_, rows)| {
            rows.iter()
                .any(|&r| entries.row(r).iter().any(|z| *z != Complex64::new(0.0, 0.0)))
        })
        .map(|(label, rows)| {
            let matrix = DMatrix::from_fn(rows.len(), entries.ncols(), |r, c| entries[(rows[r], c)]);
            let suo_rows = rows.iter().map(|&r| total.target().basis()[r].suo).collect();
            KrausOperator {
                initial: total.source().clone(),
                label,
                suo_rows,
                matrix,
            }
        })
        .collect()
}

pub fn povm_elements(kraus: &[KrausOperator]) -> Vec<PovmElement> {
    kraus
        .iter()
        .map(|k| PovmElement {
            initial: k.initial.clone(),
            label: k.label,
            matrix: k.matrix.adjoint() * &k.matrix,
        })
        .collect()
}

/// Largest entry magnitude of `Σ_A E^A - I`. An empty list has nothing to
/// compare against and reports 0; use [`PovmSet::completeness_defect`] when
/// the initial stage is known.
pub fn completeness_defect(povms: &[PovmElement]) -> f64 {
    let Some(first) = povms.first() else {
        return 0.0;
    };
    let mut sum = DMatrix::zeros(first.matrix.nrows(), first.matrix.ncols());
    for e in povms {
        sum += &e.matrix;
    }
    max_deviation_from_identity(&sum)
}

/// Outcome probability per final label, `Pr(A) = Re Ψ̄₀ E^A Ψ₀`.
///
/// With `normalize` the state is rescaled to unit norm first; otherwise a
/// state whose squared norm is off by more than [`NORMALIZATION_TOLERANCE`]
/// is rejected.
pub fn outcome_rates(
    povms: &[PovmElement],
    psi0: &EffectiveVector,
    normalize: bool,
) -> Result<RateTable, PovmError> {
    if let Some(first) = povms.first() {
        if **psi0.stage() != *first.initial {
            return Err(PovmError::BasisMismatch {
                expected: first.initial.index(),
                got: psi0.stage().index(),
            });
        }
    }
    let norm_sqr = psi0.norm_sqr();
    let scale = if normalize {
        if norm_sqr == 0.0 {
            return Err(PovmError::ZeroState);
        }
        1.0 / norm_sqr
    } else {
        if (norm_sqr - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(PovmError::NotNormalized {
                norm: norm_sqr.sqrt(),
            });
        }
        1.0
    };
    let mut rates = BTreeMap::new();
    for e in povms {
        let p = e.expectation(psi0.coefficients()) * scale;
        if p.im.abs() >= IMAGINARY_TOLERANCE {
            return Err(PovmError::NonReal {
                label: e.label,
                imag: p.im,
            });
        }
        rates.insert(e.label, p.re);
    }
    Ok(RateTable {
        rates,
        binding: Binding::new(),
        network: String::new(),
        stage_count: 0,
    })
}

/// Rate of the label whose signalling detectors are exactly `detectors`;
/// 0 when the label is absent or the detector list is not a valid label.
pub fn coincidence_rate(table: &RateTable, detectors: &[u32]) -> f64 {
    Label::from_detectors(detectors.iter().map(|&d| d as i64))
        .map(|label| table.rate(label))
        .unwrap_or(0.0)
}

/// Sum of rates over every label in which `detector` signals.
pub fn detector_marginal(table: &RateTable, detector: u32) -> f64 {
    table
        .rates
        .iter()
        .filter(|(label, _)| label.contains(detector))
        .map(|(_, p)| p)
        .sum()
}

/// Label-indexed outcome probabilities at one binding.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RateTable {
    rates: BTreeMap<Label, f64>,
    binding: Binding,
    network: String,
    stage_count: usize,
}

impl RateTable {
    pub fn from_rates(rates: impl IntoIterator<Item = (Label, f64)>) -> Self {
        Self {
            rates: rates.into_iter().collect(),
            ..Self::default()
        }
    }

    pub fn with_metadata(mut self, network: &str, stage_count: usize, binding: Binding) -> Self {
        self.network = network.to_string();
        self.stage_count = stage_count;
        self.binding = binding;
        self
    }

    pub fn rate(&self, label: Label) -> f64 {
        self.rates.get(&label).copied().unwrap_or(0.0)
    }

    /// Rates in ascending label order.
    pub fn iter(&self) -> impl Iterator<Item = (Label, f64)> + '_ {
        self.rates.iter().map(|(l, p)| (*l, *p))
    }

    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        self.rates.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.rates.values().sum()
    }

    pub fn binding(&self) -> &Binding {
        &self.binding
    }

    pub fn network(&self) -> &str {
        &self.network
    }

    pub fn stage_count(&self) -> usize {
        self.stage_count
    }

    pub fn coincidence_rate(&self, detectors: &[u32]) -> f64 {
        coincidence_rate(self, detectors)
    }

    pub fn detector_marginal(&self, detector: u32) -> f64 {
        detector_marginal(self, detector)
    }
}

/// Kraus operators and POVM elements of one total transition matrix.
#[derive(Debug, Clone)]
pub struct PovmSet {
    initial: Arc<StageSpace>,
    kraus: Vec<KrausOperator>,
    elements: Vec<PovmElement>,
}

impl PovmSet {
    pub fn from_total(total: &TransitionMatrix) -> Self {
        let kraus = kraus_operators(total);
        let elements = povm_elements(&kraus);
        Self {
            initial: total.source().clone(),
            kraus,
            elements,
        }
    }

    pub fn initial(&self) -> &Arc<StageSpace> {
        &self.initial
    }

    pub fn kraus(&self) -> &[KrausOperator] {
        &self.kraus
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn element(&self, label: Label) -> Option<&PovmElement> {
        self.elements.iter().find(|e| e.label == label)
    }

    pub fn completeness_defect(&self) -> f64 {
        let n = self.initial.len();
        let mut sum = DMatrix::zeros(n, n);
        for e in &self.elements {
            sum += &e.matrix;
        }
        max_deviation_from_identity(&sum)
    }

    pub fn rates(&self, psi0: &EffectiveVector, normalize: bool) -> Result<RateTable, PovmError> {
        outcome_rates(&self.elements, psi0, normalize)
    }
}
