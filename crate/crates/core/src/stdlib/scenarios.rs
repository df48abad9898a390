//! Complete networks for the worked experiments.
//!
//! Splitter amplitudes are parameterized as `t = cos θ`, `r = sin θ` so every
//! binding is physical. Polarization amplitudes enter through the initial
//! state as `alpha_re + i·alpha_im` and `beta_re + i·beta_im`.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::modules::{
    beamsplitter_rule, beamsplitter_rules, mirror_rules, pair_source_rules, rotator_rules,
    two_photon_rule, wollaston_rules, ModuleError,
};
use crate::evolution::{Rule, StageMap};
use crate::exprs::AmpExpr;
use crate::network::NetworkDescription;
use crate::registry::{BasisElement, StageSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Wollaston,
    Beamsplitter,
    Brandt,
    /// Path difference far below the pair-emission window: local interference only.
    FransonI,
    /// Path difference beyond the coherence time: eight distinguishable detectors.
    FransonII,
    /// Path difference between the two: short-short and long-long pairs interfere.
    FransonIII,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::Wollaston,
        Scenario::Beamsplitter,
        Scenario::Brandt,
        Scenario::FransonI,
        Scenario::FransonII,
        Scenario::FransonIII,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Wollaston => "wollaston",
            Scenario::Beamsplitter => "beamsplitter",
            Scenario::Brandt => "brandt",
            Scenario::FransonI => "franson_i",
            Scenario::FransonII => "franson_ii",
            Scenario::FransonIII => "franson_iii",
        }
    }

    pub fn build(self) -> NetworkDescription {
        let built = match self {
            Scenario::Wollaston => wollaston(),
            Scenario::Beamsplitter => beamsplitter(),
            Scenario::Brandt => brandt(),
            Scenario::FransonI => franson(FinalStage::Local),
            Scenario::FransonII => franson(FinalStage::Distinguishable),
            Scenario::FransonIII => franson(FinalStage::PostSelected),
        };
        built.unwrap_or_else(|e| panic!("built-in scenario {} is malformed: {e}", self.name()))
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = ModuleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| ModuleError::UnknownScenario(s.to_string()))
    }
}

pub fn build_scenario(name: &str) -> Result<NetworkDescription, ModuleError> {
    Ok(name.parse::<Scenario>()?.build())
}

type BuildResult = Result<NetworkDescription, Box<dyn std::error::Error>>;

fn p(name: &str) -> AmpExpr {
    AmpExpr::param(name)
}

fn e(suo: u32, detectors: &[u32]) -> BasisElement {
    BasisElement::of(suo, detectors)
}

fn stage(index: usize, suo: u32, rank: u32, basis: &[BasisElement]) -> Result<Arc<StageSpace>, Box<dyn std::error::Error>> {
    Ok(Arc::new(StageSpace::new(index, suo, rank, basis.iter().copied())?))
}

fn complex_param(prefix: &str) -> AmpExpr {
    p(&format!("{prefix}_re")) + AmpExpr::i() * p(&format!("{prefix}_im"))
}

fn polarization_params() -> Vec<String> {
    ["alpha_re", "alpha_im", "beta_re", "beta_im"]
        .into_iter()
        .map(String::from)
        .collect()
}

fn wollaston() -> BuildResult {
    let s0 = stage(0, 2, 1, &[e(1, &[1]), e(2, &[1])])?;
    let s1 = stage(1, 2, 2, &[e(1, &[1]), e(2, &[2])])?;
    let label = |d: u32| e(1, &[d]).label;
    let rules = wollaston_rules(&s0, label(1), label(1), label(2))?;
    let u10 = StageMap::new(s0.clone(), s1.clone(), rules)?;
    let init = vec![
        (e(1, &[1]), complex_param("alpha")),
        (e(2, &[1]), complex_param("beta")),
    ];
    Ok(NetworkDescription::new(
        "wollaston",
        polarization_params(),
        vec![s0, s1],
        init,
        vec![u10],
    )?)
}

/// Single photon on either in-port. The splitter's first output feeds
/// detector 2 and its second output detector 1, so that label 1 carries
/// `r²|α|² + irt(αβ* − α*β) + t²|β|²`. The final basis is declared in port
/// order (detector 2, then detector 1).
fn beamsplitter() -> BuildResult {
    let (in1, in2) = (e(1, &[1]), e(1, &[2]));
    let (out1, out2) = (e(1, &[2]), e(1, &[1]));
    let s0 = stage(0, 1, 2, &[in1, in2])?;
    let s1 = stage(1, 1, 2, &[out1, out2])?;
    let (t, r) = (AmpExpr::cos(p("theta")), AmpExpr::sin(p("theta")));
    let u10 = StageMap::new(s0.clone(), s1.clone(), beamsplitter_rules(&t, &r, in1, in2, out1, out2)?)?;
    let mut params = polarization_params();
    params.push("theta".into());
    let init = vec![(in1, complex_param("alpha")), (in2, complex_param("beta"))];
    Ok(NetworkDescription::new("beamsplitter", params, vec![s0, s1], init, vec![u10])?)
}

/// Wollaston prism, then BS1 on the first output and a rotator on the
/// second, recombined at BS2. Detector 1 is held until the last stage.
fn brandt() -> BuildResult {
    let s0 = stage(0, 2, 1, &[e(1, &[1]), e(2, &[1])])?;
    let s1 = stage(1, 2, 2, &[e(1, &[1]), e(2, &[2])])?;
    let s2 = stage(2, 2, 3, &[e(1, &[1]), e(1, &[2]), e(1, &[3])])?;
    let s3 = stage(3, 2, 3, &[e(1, &[1]), e(1, &[2]), e(1, &[3])])?;
    let label = |d: u32| e(1, &[d]).label;
    let (t1, r1) = (AmpExpr::cos(p("theta1")), AmpExpr::sin(p("theta1")));
    let (t2, r2) = (AmpExpr::cos(p("theta2")), AmpExpr::sin(p("theta2")));

    let u10 = StageMap::new(s0.clone(), s1.clone(), wollaston_rules(&s0, label(1), label(1), label(2))?)?;

    let mut r21 = vec![beamsplitter_rule(&t1, &r1, e(1, &[1]), e(1, &[1]), e(1, &[2]))];
    r21.extend(rotator_rules(&s1, label(2), e(1, &[3]))?);
    let u21 = StageMap::new(s1.clone(), s2.clone(), r21)?;

    let mut r32 = mirror_rules(e(1, &[1]), e(1, &[1]));
    r32.extend(beamsplitter_rules(&t2, &r2, e(1, &[2]), e(1, &[3]), e(1, &[3]), e(1, &[2]))?);
    let u32_ = StageMap::new(s2.clone(), s3.clone(), r32)?;

    let mut params = polarization_params();
    params.extend(["theta1".into(), "theta2".into()]);
    let init = vec![
        (e(1, &[1]), complex_param("alpha")),
        (e(2, &[1]), complex_param("beta")),
    ];
    Ok(NetworkDescription::new(
        "brandt",
        params,
        vec![s0, s1, s2, s3],
        init,
        vec![u10, u21, u32_],
    )?)
}

#[derive(Clone, Copy)]
enum FinalStage {
    /// Four final detectors; long and short paths recombine coherently.
    Local,
    /// Long-path photons reach detectors 5..8.
    Distinguishable,
    /// As `Distinguishable`, except long-long pairs are relabeled onto the
    /// short-short detectors.
    PostSelected,
}

fn franson(kind: FinalStage) -> BuildResult {
    let name = match kind {
        FinalStage::Local => "franson_i",
        FinalStage::Distinguishable => "franson_ii",
        FinalStage::PostSelected => "franson_iii",
    };
    let s0 = stage(0, 1, 1, &[e(1, &[1])])?;
    let s1 = stage(1, 1, 2, &[e(1, &[1, 2])])?;
    // a^3, a^6, a^9, a^12: short/short, long/short, short/long, long/long
    let (ss, ls, sl, ll) = (e(1, &[1, 2]), e(1, &[2, 3]), e(1, &[1, 4]), e(1, &[3, 4]));
    let s2 = stage(2, 1, 4, &[ss, ls, sl, ll])?;
    let final_labels: &[&[u32]] = match kind {
        FinalStage::Local => &[&[1, 2], &[2, 3], &[1, 4], &[3, 4]],
        _ => &[
            &[1, 2], &[2, 3], &[1, 4], &[3, 4],
            &[2, 5], &[4, 5], &[2, 7], &[4, 7],
            &[1, 6], &[3, 6], &[1, 8], &[3, 8],
            &[5, 6], &[6, 7], &[5, 8], &[7, 8],
        ],
    };
    let rank = match kind {
        FinalStage::Local => 4,
        _ => 8,
    };
    let final_basis: Vec<BasisElement> = final_labels.iter().map(|d| e(1, d)).collect();
    let s3 = stage(3, 1, rank, &final_basis)?;

    let i = AmpExpr::i;
    let t = |k: u32| AmpExpr::cos(p(&format!("theta{k}")));
    let r = |k: u32| AmpExpr::sin(p(&format!("theta{k}")));

    let u10 = StageMap::new(s0.clone(), s1.clone(), pair_source_rules(e(1, &[1]), ss)?)?;

    // First splitters; the long-arm phase rides on the reflected amplitude.
    let arm1 = [(1, t(1)), (3, i() * r(1) * AmpExpr::cis(p("phi1")))];
    let arm2 = [(2, t(2)), (4, i() * r(2) * AmpExpr::cis(p("phi2")))];
    let u21 = StageMap::new(s1.clone(), s2.clone(), [two_photon_rule(ss, 1, &arm1, &arm2)?])?;

    // Second splitters: a photon entering on `port` leaves transmitted on
    // `port` or reflected on `other`.
    let bs = |k: u32, port: u32, other: u32| [(port, t(k)), (other, i() * r(k))];
    let short1 = bs(3, 1, 3);
    let long1_local = bs(3, 3, 1);
    let short2 = bs(4, 2, 4);
    let long2_local = bs(4, 4, 2);
    let long1_late = bs(3, 5, 7);
    let long2_late = bs(4, 6, 8);

    let rules: Vec<Rule> = match kind {
        FinalStage::Local => vec![
            two_photon_rule(ss, 1, &short1, &short2)?,
            two_photon_rule(ls, 1, &long1_local, &short2)?,
            two_photon_rule(sl, 1, &short1, &long2_local)?,
            two_photon_rule(ll, 1, &long1_local, &long2_local)?,
        ],
        FinalStage::Distinguishable => vec![
            two_photon_rule(ss, 1, &short1, &short2)?,
            two_photon_rule(ls, 1, &long1_late, &short2)?,
            two_photon_rule(sl, 1, &short1, &long2_late)?,
            two_photon_rule(ll, 1, &long1_late, &long2_late)?,
        ],
        FinalStage::PostSelected => vec![
            two_photon_rule(ss, 1, &short1, &short2)?,
            two_photon_rule(ls, 1, &long1_late, &short2)?,
            two_photon_rule(sl, 1, &short1, &long2_late)?,
            two_photon_rule(ll, 1, &long1_local, &long2_local)?,
        ],
    };
    let u32_ = StageMap::new(s2.clone(), s3.clone(), rules)?;

    let params = ["theta1", "theta2", "theta3", "theta4", "phi1", "phi2"]
        .into_iter()
        .map(String::from)
        .collect();
    Ok(NetworkDescription::new(
        name,
        params,
        vec![s0, s1, s2, s3],
        vec![(e(1, &[1]), AmpExpr::one())],
        vec![u10, u21, u32_],
    )?)
}
