mod support;

use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

use qdn_core::{
    AmpExpr, Binding, BasisElement, Complex64, NetworkDescription, Scenario, StageMap, StageSpace,
};
use support::oracle::{full_register_evolve, OracleError};
use support::*;

const ORACLE_TOL: f64 = 1e-12;

fn max_discrepancy(net: &NetworkDescription, binding: &Binding) -> f64 {
    let engine = net.rates(binding, false).unwrap();
    let oracle = full_register_evolve(net, binding).unwrap().label_rates();
    let mut worst: f64 = 0.0;
    for (label, p) in &oracle {
        worst = worst.max((rate(&engine, *label) - p).abs());
    }
    for (label, p) in engine.iter() {
        worst = worst.max((oracle.get(&label.bits()).copied().unwrap_or(0.0) - p).abs());
    }
    worst
}

#[test]
fn every_scenario_agrees_with_oracle() {
    let mut rng = rng(21);
    for scenario in Scenario::ALL {
        let net = scenario.build();
        for _ in 0..20 {
            let binding = random_binding(&net, &mut rng);
            let d = max_discrepancy(&net, &binding);
            assert!(d < ORACLE_TOL, "{scenario}: discrepancy {d:e}");
        }
    }
}

#[test]
fn franson_i_quarter_phases() {
    let net = Scenario::FransonI.build();
    let binding = symmetric_franson(FRAC_PI_2, FRAC_PI_2);
    assert!(max_discrepancy(&net, &binding) < ORACLE_TOL);
    let oracle = full_register_evolve(&net, &binding).unwrap().label_rates();
    for label in [3, 6, 9, 12] {
        assert!((oracle[&label] - 0.25).abs() < ORACLE_TOL);
    }
}

#[test]
fn wollaston_amplitudes_land_on_both_outputs() {
    let net = Scenario::Wollaston.build();
    let (a, b) = (Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8));
    let mut binding = Binding::new();
    set_qubit(&mut binding, a, b);
    let v = full_register_evolve(&net, &binding).unwrap();
    assert_eq!(v.amps.len(), 8);
    assert!((v.amplitude(1, 1) - a).norm() < ORACLE_TOL);
    assert!((v.amplitude(2, 2) - b).norm() < ORACLE_TOL);
    let rest: f64 = v.amps.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0;
    assert!(rest.abs() < ORACLE_TOL);
}

#[test]
fn identity_network_leaves_input_alone() {
    let s0 = Arc::new(StageSpace::new(0, 1, 1, [BasisElement::of(1, &[1])]).unwrap());
    let s1 = Arc::new(StageSpace::new(1, 1, 1, [BasisElement::of(1, &[1])]).unwrap());
    let map = StageMap::new(s0.clone(), s1.clone(), qdn_core::stdlib::mirror_rules(BasisElement::of(1, &[1]), BasisElement::of(1, &[1]))).unwrap();
    let init = vec![(BasisElement::of(1, &[1]), AmpExpr::real(1.0))];
    let net = NetworkDescription::new("id", vec![], vec![s0, s1], init, vec![map]).unwrap();
    let v = full_register_evolve(&net, &Binding::new()).unwrap();
    assert_eq!(v.amps, vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
    assert!(max_discrepancy(&net, &Binding::new()) < ORACLE_TOL);
}

#[test]
fn rank_cap_is_enforced() {
    let stage = Arc::new(StageSpace::new(0, 1, 11, [BasisElement::of(1, &[11])]).unwrap());
    let init = vec![(BasisElement::of(1, &[11]), AmpExpr::one())];
    let net = NetworkDescription::new("wide", vec![], vec![stage], init, vec![]).unwrap();
    assert!(matches!(
        full_register_evolve(&net, &Binding::new()),
        Err(OracleError::RankCap { stage: 0, rank: 11 })
    ));
}
