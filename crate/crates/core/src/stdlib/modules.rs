use thiserror::Error;

use crate::evolution::Rule;
use crate::exprs::AmpExpr;
use crate::registry::{BasisElement, Label, StageSpace};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModuleError {
    #[error("port {0} is used twice")]
    PortCollision(BasisElement),
    #[error("stage {stage} has SUO dimension {dim}; this module needs at least 2")]
    SuoTooSmall { stage: usize, dim: u32 },
    #[error("pair source target {element} must carry exactly two detectors")]
    NotAPair { element: BasisElement },
    #[error("detector {0} appears in both arms")]
    SharedDetector(u32),
    #[error("{kind:?} module expects {inputs} input(s), {outputs} output(s) and {params} parameter(s)")]
    BadArity {
        kind: ModuleKind,
        inputs: &'static str,
        outputs: &'static str,
        params: &'static str,
    },
    #[error("unknown scenario '{0}' (expected one of: wollaston, beamsplitter, brandt, franson_i, franson_ii, franson_iii)")]
    UnknownScenario(String),
}

/// Single-photon beamsplitter port: `t·out1 + i·r·out2`.
pub fn beamsplitter_rule(
    t: &AmpExpr,
    r: &AmpExpr,
    input: BasisElement,
    out1: BasisElement,
    out2: BasisElement,
) -> Rule {
    Rule::new(input)
        .term(t.clone(), out1)
        .term(AmpExpr::i() * r.clone(), out2)
}

/// `in1 → t·out1 + i·r·out2`, `in2 → i·r·out1 + t·out2`.
pub fn beamsplitter_rules(
    t: &AmpExpr,
    r: &AmpExpr,
    in1: BasisElement,
    in2: BasisElement,
    out1: BasisElement,
    out2: BasisElement,
) -> Result<Vec<Rule>, ModuleError> {
    if in1 == in2 {
        return Err(ModuleError::PortCollision(in1));
    }
    if out1 == out2 {
        return Err(ModuleError::PortCollision(out1));
    }
    Ok(vec![
        beamsplitter_rule(t, r, in1, out1, out2),
        beamsplitter_rule(t, r, in2, out2, out1),
    ])
}

/// Polarizing split: `s1@input → s1@out1`, `s2@input → s2@out2`.
pub fn wollaston_rules(
    source: &StageSpace,
    input: Label,
    out1: Label,
    out2: Label,
) -> Result<Vec<Rule>, ModuleError> {
    require_polarization(source)?;
    Ok(vec![
        Rule::new(BasisElement::new(1, input)).term(AmpExpr::one(), BasisElement::new(1, out1)),
        Rule::new(BasisElement::new(2, input)).term(AmpExpr::one(), BasisElement::new(2, out2)),
    ])
}

/// Quarter-turn polarization rotator: `s2@input → −output`. Only the `s2`
/// branch is generated.
pub fn rotator_rules(
    source: &StageSpace,
    input: Label,
    output: BasisElement,
) -> Result<Vec<Rule>, ModuleError> {
    require_polarization(source)?;
    Ok(vec![Rule::new(BasisElement::new(2, input)).term(AmpExpr::real(-1.0), output)])
}

/// Photon-pair creation: unit amplitude from `source` into a two-detector labstate.
pub fn pair_source_rules(
    source: BasisElement,
    target: BasisElement,
) -> Result<Vec<Rule>, ModuleError> {
    if target.label.signal_count() != 2 {
        return Err(ModuleError::NotAPair { element: target });
    }
    Ok(vec![Rule::new(source).term(AmpExpr::one(), target)])
}

/// Plain routing, `input → output`.
pub fn mirror_rules(input: BasisElement, output: BasisElement) -> Vec<Rule> {
    vec![Rule::new(input).term(AmpExpr::one(), output)]
}

/// `input → cis(phase)·output`.
pub fn phase_rules(phase: &AmpExpr, input: BasisElement, output: BasisElement) -> Vec<Rule> {
    vec![Rule::new(input).term(AmpExpr::cis(phase.clone()), output)]
}

/// Outcomes of one photon: `(detector, amplitude)` pairs.
pub type Arm = [(u32, AmpExpr)];

/// Expands `{Σ a_k A^{d_k}}{Σ b_l A^{e_l}}` into one rule whose targets are
/// the two-detector labstates `{d_k, e_l}` with amplitude `a_k·b_l`.
pub fn two_photon_rule(
    source: BasisElement,
    suo: u32,
    first: &Arm,
    second: &Arm,
) -> Result<Rule, ModuleError> {
    let mut rule = Rule::new(source);
    for (d2, b) in second {
        for (d1, a) in first {
            if d1 == d2 {
                return Err(ModuleError::SharedDetector(*d1));
            }
            let target = BasisElement::of(suo, &[*d1, *d2]);
            rule.push(a.clone() * b.clone(), target);
        }
    }
    Ok(rule)
}

fn require_polarization(stage: &StageSpace) -> Result<(), ModuleError> {
    if stage.suo_dim() < 2 {
        return Err(ModuleError::SuoTooSmall {
            stage: stage.index(),
            dim: stage.suo_dim(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Beamsplitter,
    Wollaston,
    Mirror,
    Phase,
    Rotator,
    PairSource,
}

/// A placed module: kind, port assignments and parameter expressions.
///
/// | kind         | inputs            | outputs      | params |
/// |--------------|-------------------|--------------|--------|
/// | beamsplitter | in1 \[, in2\]     | out1, out2   | t, r   |
/// | wollaston    | in (label only)   | out1, out2 (labels only) | – |
/// | mirror       | in                | out          | –      |
/// | phase        | in                | out          | φ      |
/// | rotator      | in (label only)   | out          | –      |
/// | pair_source  | source            | pair         | –      |
#[derive(Debug, Clone, PartialEq)]
pub struct ModuleSpec {
    pub kind: ModuleKind,
    pub inputs: Vec<BasisElement>,
    pub outputs: Vec<BasisElement>,
    pub params: Vec<AmpExpr>,
}

impl ModuleSpec {
    pub fn rules(&self, source: &StageSpace) -> Result<Vec<Rule>, ModuleError> {
        let arity = |inputs, outputs, params| ModuleError::BadArity {
            kind: self.kind,
            inputs,
            outputs,
            params,
        };
        let (ins, outs, ps) = (&self.inputs[..], &self.outputs[..], &self.params[..]);
        match self.kind {
            ModuleKind::Beamsplitter => match (ins, outs, ps) {
                ([in1], [o1, o2], [t, r]) => {
                    if o1 == o2 {
                        return Err(ModuleError::PortCollision(*o1));
                    }
                    Ok(vec![beamsplitter_rule(t, r, *in1, *o1, *o2)])
                }
                ([in1, in2], [o1, o2], [t, r]) => beamsplitter_rules(t, r, *in1, *in2, *o1, *o2),
                _ => Err(arity("1 or 2", "2", "2")),
            },
            ModuleKind::Wollaston => match (ins, outs, ps) {
                ([i], [o1, o2], []) => wollaston_rules(source, i.label, o1.label, o2.label),
                _ => Err(arity("1", "2", "0")),
            },
            ModuleKind::Mirror => match (ins, outs, ps) {
                ([i], [o], []) => Ok(mirror_rules(*i, *o)),
                _ => Err(arity("1", "1", "0")),
            },
            ModuleKind::Phase => match (ins, outs, ps) {
                ([i], [o], [phi]) => Ok(phase_rules(phi, *i, *o)),
                _ => Err(arity("1", "1", "1")),
            },
            ModuleKind::Rotator => match (ins, outs, ps) {
                ([i], [o], []) => rotator_rules(source, i.label, *o),
                _ => Err(arity("1", "1", "0")),
            },
            ModuleKind::PairSource => match (ins, outs, ps) {
                ([i], [o], []) => pair_source_rules(*i, *o),
                _ => Err(arity("1", "1", "0")),
            },
        }
    }
}
