//! Brute-force reference evolution over the full `d · 2^r` register spaces.
//!
//! Nothing here touches the engine's matrices: each stage map is re-embedded
//! from its rules into a dense row-major `Vec<Vec<_>>` and multiplied by hand.

use std::collections::BTreeMap;

use qdn_core::{Binding, Complex64, NetworkDescription};

pub const MAX_ORACLE_RANK: u32 = 10;

#[derive(Debug)]
pub enum OracleError {
    RankCap { stage: usize, rank: u32 },
    Expr(String),
}

/// A state over the whole tensor space of one stage. Index of `(s, M)` is
/// `(s - 1) · 2^rank + M`.
#[derive(Debug, Clone)]
pub struct FullVector {
    pub suo_dim: u32,
    pub rank: u32,
    pub amps: Vec<Complex64>,
}

impl FullVector {
    pub fn amplitude(&self, suo: u32, label: u32) -> Complex64 {
        self.amps[full_index(self.rank, suo, label)]
    }

    /// `|amplitude|²` summed over SUO states, keyed by labstate label.
    pub fn label_rates(&self) -> BTreeMap<u32, f64> {
        let width = 1usize << self.rank;
        let mut out = BTreeMap::new();
        for (k, a) in self.amps.iter().enumerate() {
            let p = a.norm_sqr();
            if p != 0.0 {
                *out.entry((k % width) as u32).or_insert(0.0) += p;
            }
        }
        out
    }
}

fn full_index(rank: u32, suo: u32, label: u32) -> usize {
    (suo as usize - 1) * (1usize << rank) + label as usize
}

fn full_dim(suo_dim: u32, rank: u32) -> usize {
    suo_dim as usize * (1usize << rank)
}

type Dense = Vec<Vec<Complex64>>;

fn mat_vec(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
    m.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a * b)
        })
        .collect()
}

pub fn full_register_evolve(
    network: &NetworkDescription,
    binding: &Binding,
) -> Result<FullVector, OracleError> {
    for stage in network.stages() {
        if stage.rank() > MAX_ORACLE_RANK {
            return Err(OracleError::RankCap {
                stage: stage.index(),
                rank: stage.rank(),
            });
        }
    }

    let s0 = network.initial_stage();
    let mut v = vec![Complex64::new(0.0, 0.0); full_dim(s0.suo_dim(), s0.rank())];
    for (element, amp) in network.initial_state() {
        let a = amp.eval(binding).map_err(|e| OracleError::Expr(e.to_string()))?;
        v[full_index(s0.rank(), element.suo, element.label.bits())] += a;
    }

    for map in network.maps() {
        let (src, dst) = (map.source(), map.target());
        let mut dense: Dense =
            vec![vec![Complex64::new(0.0, 0.0); full_dim(src.suo_dim(), src.rank())]; full_dim(dst.suo_dim(), dst.rank())];
        for rule in map.rules() {
            let col = full_index(src.rank(), rule.source.suo, rule.source.label.bits());
            for (target, amp) in &rule.terms {
                let a = amp.eval(binding).map_err(|e| OracleError::Expr(e.to_string()))?;
                dense[full_index(dst.rank(), target.suo, target.label.bits())][col] += a;
            }
        }
        v = mat_vec(&dense, &v);
    }

    let last = network.final_stage();
    Ok(FullVector {
        suo_dim: last.suo_dim(),
        rank: last.rank(),
        amps: v,
    })
}
