//! The functional model: an anti-linear multiplication operator on
//! `L²(ν; C²)` restricted to the subspace whose second component vanishes on
//! S₁, written as a finite complex symmetric matrix.
//!
//! Coordinates are orthonormal: slot `(j, k)` is the indicator of node `j` in
//! component `k`, scaled by `w_j^{-1/2}`. Weights then live only in the
//! cyclic vector `𝟙`, whose coordinate at `(j, 1)` is `sqrt(w_j)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::operator::{inner, AntiLinearOperator};
use crate::spectral::{NodeClass, SpectralData};
use crate::{tol, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slot {
    pub node: usize,
    /// Component of `C²`, 1 or 2.
    pub component: u8,
}

/// One diagonal block of the model matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub node: usize,
    pub size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpace {
    pub slots: Vec<Slot>,
    pub blocks: Vec<Block>,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub classes: Vec<NodeClass>,
}

impl ModelSpace {
    pub fn dimension(&self) -> usize {
        self.slots.len()
    }

    /// `s_j` for every slot: the diagonal of `|𝓑|`.
    pub fn slot_values(&self) -> Vec<f64> {
        self.slots.iter().map(|slot| self.nodes[slot.node]).collect()
    }
}

/// The model operator `𝓑` with cyclic vector `𝟙`.
///
/// S₂ nodes contribute `s·[[ψ, r], [r, -ψ̄]]` with `r = sqrt(1 - |ψ|²)`, S₁
/// nodes the scalar `s·ψ`.
pub fn build_model(data: &SpectralData, tol_phase: f64) -> Result<(AntiLinearOperator, ModelSpace)> {
    data.ensure_valid()?;
    let classes = data.classify(tol_phase);
    let mut slots = Vec::new();
    let mut blocks = Vec::new();
    for (node, class) in classes.iter().enumerate() {
        let size = class.multiplicity();
        blocks.push(Block { node, size });
        for component in 1..=size as u8 {
            slots.push(Slot { node, component });
        }
    }
    let d = slots.len();
    let mut matrix = DMatrix::zeros(d, d);
    let mut cyclic = DVector::zeros(d);
    let mut offset = 0;
    for block in &blocks {
        let j = block.node;
        let (s, psi) = (data.nodes[j], data.phases[j]);
        cyclic[offset] = C64::new(data.weights[j].sqrt(), 0.0);
        if block.size == 1 {
            matrix[(offset, offset)] = psi * s;
        } else {
            let r = (1.0 - psi.norm_sqr()).max(0.0).sqrt();
            matrix[(offset, offset)] = psi * s;
            matrix[(offset, offset + 1)] = C64::new(r * s, 0.0);
            matrix[(offset + 1, offset)] = C64::new(r * s, 0.0);
            matrix[(offset + 1, offset + 1)] = -psi.conj() * s;
        }
        offset += block.size;
    }
    // Weights sum to 1 only within validation tolerance.
    let norm = cyclic.norm();
    cyclic /= C64::new(norm, 0.0);
    let op = AntiLinearOperator::with_cyclic(matrix, cyclic)?;
    let space = ModelSpace {
        slots,
        blocks,
        nodes: data.nodes.clone(),
        weights: data.weights.clone(),
        classes,
    };
    Ok((op, space))
}

/// Residuals of the four model properties.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelReport {
    pub dimension: usize,
    /// Max `|⟨𝓑f, g⟩ - ⟨𝓑g, f⟩|` over sampled pairs.
    pub symmetry: f64,
    /// Max entry of `|𝓑| - M_s`, with `|𝓑|` from the eigendecomposition of `𝓑²`.
    pub modulus: f64,
    /// Max relative error of the two moment identities for `f(s) = s^k`, `k ≤ 6`.
    pub moments: f64,
    /// Dimension of the Krylov space generated from `𝟙`.
    pub krylov_rank: usize,
    /// Whether `|𝓑|` has multiplicity 1 on S₁ nodes and 2 on S₂ nodes.
    pub multiplicities_match: bool,
}

impl ModelReport {
    pub fn cyclic(&self) -> bool {
        self.krylov_rank == self.dimension
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.symmetry <= tol
            && self.modulus <= tol
            && self.moments <= tol
            && self.cyclic()
            && self.multiplicities_match
    }
}

pub fn verify_model(data: &SpectralData) -> Result<ModelReport> {
    let (op, space) = build_model(data, tol::PHASE)?;
    let d = space.dimension();
    let scale = data.max_node().max(1.0);

    let symmetry = op.check_symmetry();

    let spectrum = op.modulus_spectrum(tol::CLUSTER)?;
    let modulus_matrix = spectrum.function(|s| s);
    let diag = space.slot_values();
    let modulus = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| {
            let expected = if i == j { diag[i] } else { 0.0 };
            (modulus_matrix[(i, j)] - expected).norm()
        })
        .fold(0.0, f64::max)
        / scale;

    let one = op.cyclic().clone();
    let b_one = op.apply(&one)?;
    let mut moments: f64 = 0.0;
    let mut even = one.clone();
    let mut odd = b_one;
    for k in 0..=6 {
        let nu: f64 = data.nodes.iter().zip(&data.weights).map(|(s, w)| w * s.powi(k)).sum();
        let psi: C64 = data
            .nodes
            .iter()
            .zip(&data.weights)
            .zip(&data.phases)
            .map(|((s, w), psi)| psi * (w * s.powi(k + 1)))
            .sum();
        let reference = scale.powi(k + 1);
        moments = moments.max((inner(&even, &one) - nu).norm() / reference);
        moments = moments.max((inner(&odd, &one) - psi).norm() / reference);
        even = &modulus_matrix * even;
        odd = &modulus_matrix * odd;
    }

    let krylov_rank = op.lanczos(d, tol::RANK).basis.len();

    let zero_threshold = tol::CLUSTER * (1.0 + spectrum.max_value());
    let mut expected: Vec<(f64, usize)> = data
        .nodes
        .iter()
        .zip(&space.classes)
        .map(|(&s, class)| (s, class.multiplicity()))
        .collect();
    expected.sort_by(|x, y| x.0.total_cmp(&y.0));
    let multiplicities_match = spectrum.clusters.len() == expected.len()
        && spectrum.clusters.iter().zip(&expected).all(|(cluster, &(s, m))| {
            let value = if cluster.value <= zero_threshold { 0.0 } else { cluster.value };
            cluster.multiplicity() == m && (value - s).abs() <= 1e-10 * scale
        });

    Ok(ModelReport { dimension: d, symmetry, modulus, moments, krylov_rank, multiplicities_match })
}
