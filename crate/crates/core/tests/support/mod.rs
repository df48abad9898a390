#![allow(dead_code)]

pub mod oracle;

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use qdn_core::{Binding, Complex64, NetworkDescription};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the unit sphere in C².
pub fn random_qubit(rng: &mut impl Rng) -> (Complex64, Complex64) {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 && n <= 1.0 {
            return (Complex64::new(v[0] / n, v[1] / n), Complex64::new(v[2] / n, v[3] / n));
        }
    }
}

pub fn set_qubit(b: &mut Binding, alpha: Complex64, beta: Complex64) {
    b.set("alpha_re", alpha.re)
        .set("alpha_im", alpha.im)
        .set("beta_re", beta.re)
        .set("beta_im", beta.im);
}

/// Random values for every declared parameter: angles anywhere on the
/// circle, polarization amplitudes normalized.
pub fn random_binding(network: &NetworkDescription, rng: &mut impl Rng) -> Binding {
    let mut b = Binding::new();
    for name in network.parameters() {
        if !name.starts_with("alpha") && !name.starts_with("beta") {
            b.set(name.clone(), rng.gen_range(0.0..2.0 * PI));
        }
    }
    if network.parameters().iter().any(|p| p == "alpha_re") {
        let (a, c) = random_qubit(rng);
        set_qubit(&mut b, a, c);
    }
    b
}

pub fn franson_binding(theta: [f64; 4], phi1: f64, phi2: f64) -> Binding {
    let mut b = Binding::new();
    for (k, t) in theta.iter().enumerate() {
        b.set(format!("theta{}", k + 1), *t);
    }
    b.with("phi1", phi1).with("phi2", phi2)
}

pub fn symmetric_franson(phi1: f64, phi2: f64) -> Binding {
    franson_binding([FRAC_PI_4; 4], phi1, phi2)
}

/// `n` evenly spaced points over `[0, 2π)`.
pub fn phase_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| 2.0 * PI * k as f64 / n as f64).collect()
}

/// `n` points over `[0, π/2]`, endpoints included.
pub fn angle_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| FRAC_PI_2 * k as f64 / (n - 1) as f64).collect()
}

pub fn rate(table: &qdn_core::RateTable, bits: u32) -> f64 {
    table.rate(qdn_core::Label::from_bits(bits).unwrap())
}
