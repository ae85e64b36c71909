//! Random instance generators for property tests, benchmarks and batch
//! checks.

use rand::Rng;

use crate::operator::JacobiParameters;
use crate::spectral::SpectralData;
use crate::C64;

/// Minimum spacing between generated nodes.
const NODE_GAP: f64 = 0.1;

/// Random Jacobi parameters of size `2..=max_size` with `a ∈ [0.5, 2]` and
/// `|b| ≤ 2`.
pub fn random_jacobi<R: Rng + ?Sized>(rng: &mut R, max_size: usize) -> JacobiParameters {
    let n = rng.random_range(2..=max_size.max(2));
    let a = (0..n - 1).map(|_| rng.random_range(0.5..=2.0)).collect();
    let b = (0..n)
        .map(|_| C64::from_polar(rng.random_range(0.0..=2.0), rng.random_range(0.0..std::f64::consts::TAU)))
        .collect();
    JacobiParameters::new(a, b).expect("generated couplings are positive")
}

/// Random valid spectral data with `1..=max_nodes` nodes in `[0, 3]`, mixing
/// unimodular (S₁) and interior (S₂) phases. Roughly one instance in eight
/// carries a node at the origin.
pub fn random_spectral_data<R: Rng + ?Sized>(rng: &mut R, max_nodes: usize) -> SpectralData {
    let count = rng.random_range(1..=max_nodes.max(1));
    let with_zero = rng.random_bool(0.125);
    let mut nodes = Vec::with_capacity(count);
    let mut s = if with_zero { 0.0 } else { rng.random_range(0.2..0.6) };
    for _ in 0..count {
        nodes.push(s);
        s += NODE_GAP + rng.random_range(0.0..0.35);
    }
    let raw: Vec<f64> = (0..count).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    // Put the rounding residue on the heaviest node so the mass is 1 to the ulp.
    let residue = 1.0 - weights.iter().sum::<f64>();
    let heaviest = (0..count).max_by(|&i, &j| weights[i].total_cmp(&weights[j])).unwrap_or(0);
    weights[heaviest] += residue;

    let phases = nodes
        .iter()
        .map(|&s| {
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            if s == 0.0 {
                C64::new(1.0, 0.0)
            } else if rng.random_bool(0.4) {
                C64::from_polar(1.0, theta)
            } else {
                C64::from_polar(rng.random_range(0.0..0.95), theta)
            }
        })
        .collect();
    SpectralData { nodes, weights, phases }
}
