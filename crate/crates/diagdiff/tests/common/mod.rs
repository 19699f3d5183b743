//! Seeded random builders shared by the integration suites.

use diagdiff::diagram::{DiagBox, Diagram, Ob, Ty};
use diagdiff::rig::PhaseExpr;
use rand_chacha::ChaCha8Rng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_theta(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-PI..PI)).collect()
}

/// An affine phase: random constant plus up to `max_params` parameter terms
/// with small non-zero coefficients.
pub fn random_phase(rng: &mut ChaCha8Rng, max_params: usize) -> PhaseExpr {
    let mut phase = PhaseExpr::constant(rng.gen_range(-PI..PI));
    for i in 0..max_params {
        if rng.gen_bool(0.5) {
            let mut coeff = rng.gen_range(-2.0f64..2.0);
            if coeff.abs() < 0.1 {
                coeff = 0.5;
            }
            phase = phase.plus_theta(i, coeff);
        }
    }
    phase
}

/// A random spider with `m, n ≤ 3` legs.
pub fn random_spider(rng: &mut ChaCha8Rng, max_params: usize) -> DiagBox {
    let m = rng.gen_range(0..=3);
    let n = rng.gen_range(0..=3);
    DiagBox::z_spider(m, n, random_phase(rng, max_params))
}

/// A random composite ZX diagram built layer by layer, keeping the wire
/// count between 1 and `max_qubits`.
pub fn random_zx_diagram(
    rng: &mut ChaCha8Rng,
    max_qubits: usize,
    layers: usize,
    max_params: usize,
) -> Diagram {
    let start = rng.gen_range(1..=max_qubits);
    random_zx_diagram_from(rng, start, max_qubits, layers, max_params)
}

/// As `random_zx_diagram`, but starting from a fixed domain width.
pub fn random_zx_diagram_from(
    rng: &mut ChaCha8Rng,
    dom_wires: usize,
    max_qubits: usize,
    layers: usize,
    max_params: usize,
) -> Diagram {
    let mut d = Diagram::id(Ty::qubits(dom_wires));
    for _ in 0..layers {
        let w = d.cod().0.len();
        match rng.gen_range(0..4u8) {
            0 if w >= 1 => {
                let offset = rng.gen_range(0..w);
                d = d.then_at(offset, DiagBox::hadamard()).unwrap();
            }
            1 if w >= 2 => {
                let offset = rng.gen_range(0..w - 1);
                d = d
                    .then_at(offset, DiagBox::swap(Ob::Qubit, Ob::Qubit))
                    .unwrap();
            }
            _ => {
                // A spider whose legs keep the wire count in range.
                let m = rng.gen_range(0..=w.min(2));
                let lo = if w - m == 0 { 1 } else { 0 };
                let hi = (max_qubits - (w - m)).min(3);
                let n = rng.gen_range(lo..=hi.max(lo));
                let offset = rng.gen_range(0..=w - m);
                d = d
                    .then_at(offset, DiagBox::z_spider(m, n, random_phase(rng, max_params)))
                    .unwrap();
            }
        }
    }
    d
}
