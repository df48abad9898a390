//! End-to-end acceptance gate, one test per criterion. Run with
//! `--nocapture` to see the measured errors behind each verdict.

mod support;

use std::f64::consts::PI;
use std::path::PathBuf;

use qdn_core::{
    compose, parse_network, realize, to_qdn, Binding, Complex64, Diagnostic, NetworkDescription,
    RateTable, Scenario,
};
use rand::Rng;
use support::oracle::full_register_evolve;
use support::*;

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn label_rate(t: &RateTable, bits: u32) -> f64 {
    rate(t, bits)
}

fn max_entry(m: &qdn_core::povm::PovmElement, want: [[Complex64; 2]; 2]) -> f64 {
    let mut worst: f64 = 0.0;
    for (r, row) in want.iter().enumerate() {
        for (c, w) in row.iter().enumerate() {
            worst = worst.max((m.matrix()[(r, c)] - w).norm());
        }
    }
    worst
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn criterion_1() -> Outcome {
    let net = Scenario::Wollaston.build();
    let mut rng = rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b) = random_qubit(&mut rng);
        let mut binding = Binding::new();
        set_qubit(&mut binding, a, b);
        let t = net.rates(&binding, false).map_err(|e| e.to_string())?;
        worst = worst
            .max((label_rate(&t, 1) - a.norm_sqr()).abs())
            .max((label_rate(&t, 2) - b.norm_sqr()).abs());
    }
    check(worst < 1e-12, || format!("rate error {worst:e}"))?;
    let povms = net.povms(&Binding::new()).map_err(|e| e.to_string())?;
    let es = povms.elements();
    check(es.len() == 2, || format!("{} POVM elements", es.len()))?;
    let (one, zero) = (c(1.0, 0.0), c(0.0, 0.0));
    let p1 = max_entry(&es[0], [[one, zero], [zero, zero]]);
    let p2 = max_entry(&es[1], [[zero, zero], [zero, one]]);
    let complete = povms.completeness_defect();
    check(p1 < 1e-12 && p2 < 1e-12, || format!("projector error {:e}", p1.max(p2)))?;
    check(complete < 1e-12, || format!("completeness defect {complete:e}"))?;
    Ok(format!("100 states, max rate error {worst:.1e}; E1+E2=I to {complete:.1e}"))
}

fn criterion_2() -> Outcome {
    let net = Scenario::Beamsplitter.build();
    let mut rng = rng(102);
    let mut worst: f64 = 0.0;
    let i = Complex64::i();
    for _ in 0..200 {
        let binding = random_binding(&net, &mut rng);
        let g = |k: &str| binding.get(k).unwrap();
        let (a, b) = (c(g("alpha_re"), g("alpha_im")), c(g("beta_re"), g("beta_im")));
        let (t, r) = (g("theta").cos(), g("theta").sin());
        let cross = i * r * t * (a * b.conj() - a.conj() * b);
        let p1 = r * r * a.norm_sqr() + cross + t * t * b.norm_sqr();
        let p2 = t * t * a.norm_sqr() - cross + r * r * b.norm_sqr();
        let table = net.rates(&binding, false).map_err(|e| e.to_string())?;
        worst = worst
            .max((label_rate(&table, 1) - p1).norm())
            .max((label_rate(&table, 2) - p2).norm());
        check(label_rate(&table, 0) == 0.0 && label_rate(&table, 3) == 0.0, || {
            "void or double-detection rate is nonzero".into()
        })?;
    }
    check(worst < 1e-12, || format!("rate error {worst:e}"))?;
    // closed-form E^1 at a generic angle
    let th: f64 = 0.37;
    let (t, r) = (th.cos(), th.sin());
    let povms = net.povms(&Binding::new().with("theta", th)).map_err(|e| e.to_string())?;
    let e1 = povms.elements().iter().find(|e| e.label().bits() == 1).ok_or("no label-1 element")?;
    let err = max_entry(e1, [[c(r * r, 0.0), -i * r * t], [i * r * t, c(t * t, 0.0)]]);
    check(err < 1e-12, || format!("E^1 differs by {err:e}"))?;
    Ok(format!("200 bindings, max rate error {worst:.1e}; Pr(void)=Pr(both)=0"))
}

fn criterion_3() -> Outcome {
    let net = Scenario::Brandt.build();
    let mut worst: f64 = 0.0;
    let mut points = 0;
    for th1 in angle_grid(5) {
        for th2 in angle_grid(5) {
            for psi in phase_grid(5) {
                let (a, b) = (Complex64::from_polar(0.6, psi), c(0.8, 0.0));
                let mut binding = Binding::new().with("theta1", th1).with("theta2", th2);
                set_qubit(&mut binding, a, b);
                let povms = net.povms(&binding).map_err(|e| e.to_string())?;
                let labels: Vec<u32> = povms.elements().iter().map(|e| e.label().bits()).collect();
                // at grid corners a splitter may be fully transmitting, which
                // empties a label; generic points must show all three
                check(labels.iter().all(|l| [1, 2, 4].contains(l)), || format!("labels {labels:?}"))?;
                let (t1, r1, t2, r2) = (th1.cos(), th1.sin(), th2.cos(), th2.sin());
                let mix = (a.conj() * b + a * b.conj()).re;
                let want = [
                    (1, t1 * t1 * a.norm_sqr()),
                    (2, r1 * r1 * r2 * r2 * a.norm_sqr() + r2 * r1 * t2 * mix + t2 * t2 * b.norm_sqr()),
                    (4, r1 * r1 * t2 * t2 * a.norm_sqr() - r2 * r1 * t2 * mix + r2 * r2 * b.norm_sqr()),
                ];
                let table = net.rates(&binding, false).map_err(|e| e.to_string())?;
                for (l, p) in want {
                    worst = worst.max((label_rate(&table, l) - p).abs());
                }
                points += 1;
            }
        }
    }
    check(worst < 1e-12, || format!("rate error {worst:e}"))?;
    let mut generic = Binding::new().with("theta1", 0.4).with("theta2", 1.1);
    set_qubit(&mut generic, c(0.6, 0.0), c(0.0, 0.8));
    let labels: Vec<u32> = net
        .povms(&generic)
        .map_err(|e| e.to_string())?
        .elements()
        .iter()
        .map(|e| e.label().bits())
        .collect();
    check(labels == [1, 2, 4], || format!("generic POVM labels {labels:?}"))?;
    Ok(format!("POVM labels {{1,2,4}}; {points} grid points, max error {worst:.1e}"))
}

fn sin2(x: f64) -> f64 {
    x.sin().powi(2)
}

fn cos2(x: f64) -> f64 {
    x.cos().powi(2)
}

fn franson_grid(net: &NetworkDescription, mut each: impl FnMut(f64, f64, &RateTable) -> Result<(), String>) -> Result<(), String> {
    for &p1 in &phase_grid(8) {
        for &p2 in &phase_grid(8) {
            let table = net.rates(&symmetric_franson(p1, p2), false).map_err(|e| e.to_string())?;
            each(p1, p2, &table)?;
        }
    }
    Ok(())
}

fn criterion_4() -> Outcome {
    let net = Scenario::FransonI.build();
    let mut worst: f64 = 0.0;
    franson_grid(&net, |p1, p2, t| {
        let (h1, h2) = (p1 / 2.0, p2 / 2.0);
        for (l, p) in [
            (3, sin2(h1) * sin2(h2)),
            (6, cos2(h1) * sin2(h2)),
            (9, sin2(h1) * cos2(h2)),
            (12, cos2(h1) * cos2(h2)),
        ] {
            worst = worst.max((label_rate(t, l) - p).abs());
        }
        worst = worst.max((t.total() - 1.0).abs());
        Ok(())
    })?;
    check(worst < 1e-10, || format!("error {worst:e}"))?;
    Ok(format!("8x8 phase grid, max error {worst:.1e}, totals 1"))
}

const FRANSON_II_LABELS: [u32; 16] = [3, 6, 9, 12, 18, 24, 66, 72, 33, 36, 129, 132, 48, 96, 144, 192];

fn criterion_5() -> Outcome {
    let net = Scenario::FransonII.build();
    let mut worst: f64 = 0.0;
    franson_grid(&net, |_, _, t| {
        check(t.len() == 16, || format!("{} nonzero rates", t.len()))?;
        for l in FRANSON_II_LABELS {
            worst = worst.max((label_rate(t, l) - 1.0 / 16.0).abs());
        }
        Ok(())
    })?;
    check(worst < 1e-10, || format!("symmetric error {worst:e}"))?;
    let mut rng = rng(105);
    let theta: [f64; 4] = std::array::from_fn(|_| rng.gen_range(0.0..2.0 * PI));
    let mut worst_var: f64 = 0.0;
    for l in FRANSON_II_LABELS {
        let mut xs = Vec::new();
        for &p1 in &phase_grid(8) {
            for &p2 in &phase_grid(8) {
                let t = net.rates(&franson_binding(theta, p1, p2), false).map_err(|e| e.to_string())?;
                xs.push(label_rate(&t, l));
            }
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        worst_var = worst_var.max(xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64);
    }
    check(worst_var < 1e-20, || format!("phase variance {worst_var:e}"))?;
    Ok(format!("16 labels at 1/16 (error {worst:.1e}); phase variance {worst_var:.1e}"))
}

fn criterion_6() -> Outcome {
    let net = Scenario::FransonIII.build();
    let mut worst: f64 = 0.0;
    franson_grid(&net, |p1, p2, t| {
        let s = (p1 + p2) / 2.0;
        for l in [3, 12] {
            worst = worst.max((label_rate(t, l) - 0.25 * cos2(s)).abs());
        }
        for l in [6, 9] {
            worst = worst.max((label_rate(t, l) - 0.25 * sin2(s)).abs());
        }
        for l in [18, 24, 66, 72, 33, 36, 129, 132] {
            worst = worst.max((label_rate(t, l) - 1.0 / 16.0).abs());
        }
        worst = worst.max((t.total() - 1.0).abs());
        Ok(())
    })?;
    check(worst < 1e-10, || format!("error {worst:e}"))?;
    Ok(format!("1/4 cos^2 and 1/4 sin^2 pairs, eight 1/16 labels; max error {worst:.1e}"))
}

fn criterion_7() -> Outcome {
    let mut rng = rng(107);
    let (mut unitary, mut complete, mut positive, mut oracle): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for scenario in Scenario::ALL {
        let net = scenario.build();
        let maps = net.maps();
        for _ in 0..50 {
            let b = random_binding(&net, &mut rng);
            for map in maps {
                unitary = unitary.max(realize(map, &b).map_err(|e| e.to_string())?.semi_unitarity_defect());
            }
            for end in 1..=maps.len() {
                for start in 0..end {
                    let m = compose(&maps[start..end], &b).map_err(|e| e.to_string())?;
                    unitary = unitary.max(m.semi_unitarity_defect());
                }
            }
            complete = complete.max(net.povms(&b).map_err(|e| e.to_string())?.completeness_defect());
        }
        let b = random_binding(&net, &mut rng);
        let povms = net.povms(&b).map_err(|e| e.to_string())?;
        let dim = net.initial_stage().len();
        for _ in 0..1000 {
            let psi: Vec<Complex64> =
                (0..dim).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            for e in povms.elements() {
                positive = positive.min(e.expectation(&psi).re);
            }
        }
        for _ in 0..20 {
            let b = random_binding(&net, &mut rng);
            let engine = net.rates(&b, false).map_err(|e| e.to_string())?;
            let brute = full_register_evolve(&net, &b).map_err(|e| format!("{e:?}"))?.label_rates();
            for (l, p) in &brute {
                oracle = oracle.max((label_rate(&engine, *l) - p).abs());
            }
            for (l, p) in engine.iter() {
                oracle = oracle.max((brute.get(&l.bits()).copied().unwrap_or(0.0) - p).abs());
            }
        }
    }
    check(unitary < 1e-10, || format!("semi-unitarity defect {unitary:e}"))?;
    check(complete < 1e-10, || format!("completeness defect {complete:e}"))?;
    check(positive >= -1e-10, || format!("negative expectation {positive:e}"))?;
    check(oracle < 1e-12, || format!("oracle discrepancy {oracle:e}"))?;
    Ok(format!(
        "defects: unitary {unitary:.1e}, completeness {complete:.1e}; min expectation {positive:.1e}; oracle {oracle:.1e}"
    ))
}

fn criterion_8() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../networks");
    for scenario in Scenario::ALL {
        let path = dir.join(format!("{}.qdn", scenario.name()));
        let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let first = parse_network(&text).map_err(|d| format!("{}: {}", scenario, d[0]))?;
        let printed = to_qdn(&first);
        let second = parse_network(&printed).map_err(|d| format!("{} reprint: {}", scenario, d[0]))?;
        check(first == second && printed == text && first == scenario.build(), || {
            format!("{scenario} does not round-trip")
        })?;
    }
    let bad = "\
network squeeze
stage 0 suo 1 rank 2
basis @{1}
basis @{2}
stage 1 suo 1 rank 2
basis @{1}
init
term 1 * @{1}
map 0 -> 1
rule @{1} => 1 * @{1}
rule @{2} => 1 * @{1}
";
    let diags = match parse_network(bad) {
        Ok(_) => return Err("dimension-theorem violation accepted".into()),
        Err(d) => d,
    };
    let hit: Option<&Diagnostic> = diags.iter().find(|d| d.is_error() && d.message.contains("dimension"));
    let hit = hit.ok_or_else(|| format!("no dimension diagnostic in {diags:?}"))?;
    let pos = hit.position.ok_or("dimension diagnostic has no position")?;
    check(pos.line == 9, || format!("diagnostic at {pos}, expected line 9"))?;
    Ok(format!("six files round-trip; rejected 2 -> 1 map at {pos}: {}", hit.message))
}

fn report(n: usize, name: &str, run: fn() -> Outcome) {
    match run() {
        Ok(detail) => println!("criterion {n} PASS  {name}: {detail}"),
        Err(why) => {
            println!("criterion {n} FAIL  {name}: {why}");
            panic!("criterion {n} ({name}) failed: {why}");
        }
    }
}

#[test]
fn criterion_1_wollaston_rates_and_projectors() {
    report(1, "wollaston rates and projectors", criterion_1);
}

#[test]
fn criterion_2_beamsplitter_rates() {
    report(2, "beamsplitter rates", criterion_2);
}

#[test]
fn criterion_3_brandt_povms_and_rates() {
    report(3, "brandt POVMs and rates", criterion_3);
}

#[test]
fn criterion_4_franson_i_product_rates() {
    report(4, "franson i product rates", criterion_4);
}

#[test]
fn criterion_5_franson_ii_sixteen_constant_rates() {
    report(5, "franson ii sixteen constant rates", criterion_5);
}

#[test]
fn criterion_6_franson_iii_interference() {
    report(6, "franson iii interference", criterion_6);
}

#[test]
fn criterion_7_structural_properties_and_oracle() {
    report(7, "structural properties and oracle", criterion_7);
}

#[test]
fn criterion_8_parser_round_trip_and_dimension_check() {
    report(8, "parser round trip and dimension check", criterion_8);
}
