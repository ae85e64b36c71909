//! Finitely supported spectral data `(ν, ψ)` and the sesquilinear form it
//! induces on polynomials.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;
use crate::C64;

const MASS_TOL: f64 = 1e-12;
const PHASE_SLACK: f64 = 1e-12;

/// Spectral data of a finitely supported measure: `ν = Σ w_j δ_{s_j}` with
/// phase `ψ_j` at each node.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub phases: Vec<C64>,
}

/// Multiplicity class of a node: `S1` where `|ψ| = 1`, `S2` where `|ψ| < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeClass {
    S1,
    S2,
}

impl NodeClass {
    /// Spectral multiplicity of `|B|` at a node of this class.
    pub fn multiplicity(self) -> usize {
        match self {
            NodeClass::S1 => 1,
            NodeClass::S2 => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            NodeClass::S1 => "S1",
            NodeClass::S2 => "S2",
        }
    }
}

/// Even/odd part values `(p^e(s_j), p^o(s_j))` of a polynomial at the nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct ParityValues {
    pub even: Vec<C64>,
    pub odd: Vec<C64>,
}

impl ParityValues {
    pub fn of(p: &ComplexPolynomial, nodes: &[f64]) -> Self {
        let (even, odd) = nodes
            .iter()
            .map(|&s| {
                let plus = p.evaluate_real(s);
                let minus = p.evaluate_real(-s);
                ((plus + minus) * 0.5, (plus - minus) * 0.5)
            })
            .unzip();
        Self { even, odd }
    }

    pub fn constant_one(len: usize) -> Self {
        Self { even: vec![C64::new(1.0, 0.0); len], odd: vec![C64::new(0.0, 0.0); len] }
    }

    /// Values of `s · p*(s)`; parity flips and real nodes make the star a
    /// plain conjugation.
    pub fn shifted_star(&self, nodes: &[f64]) -> Self {
        Self {
            even: self.odd.iter().zip(nodes).map(|(o, &s)| o.conj() * s).collect(),
            odd: self.even.iter().zip(nodes).map(|(e, &s)| e.conj() * s).collect(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Self) {
        for (x, y) in self.even.iter_mut().zip(&other.even) {
            *x += c * y;
        }
        for (x, y) in self.odd.iter_mut().zip(&other.odd) {
            *x += c * y;
        }
    }

    pub fn scale(&mut self, c: f64) {
        self.even.iter_mut().chain(self.odd.iter_mut()).for_each(|x| *x *= c);
    }
}

impl SpectralData {
    /// Construct and validate.
    pub fn new(nodes: Vec<f64>, weights: Vec<f64>, phases: Vec<C64>) -> Result<Self> {
        let data = Self { nodes, weights, phases };
        data.ensure_valid()?;
        Ok(data)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// List of violated invariants; empty when the data is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut report = Vec::new();
        let n = self.nodes.len();
        if n == 0 {
            report.push("no nodes".to_string());
        }
        if self.weights.len() != n || self.phases.len() != n {
            report.push(format!(
                "length mismatch: {} nodes, {} weights, {} phases",
                n,
                self.weights.len(),
                self.phases.len()
            ));
            return report;
        }
        if let Some(&s) = self.nodes.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
            report.push(format!("node {s} is not a finite nonnegative number"));
        }
        if let Some(w) = self.nodes.windows(2).find(|w| w[1] <= w[0]) {
            report.push(format!("nodes not strictly increasing at {} -> {}", w[0], w[1]));
        }
        if let Some(&w) = self.weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            report.push(format!("weight {w} is not positive"));
        }
        let mass: f64 = self.weights.iter().sum();
        if (mass - 1.0).abs() > MASS_TOL {
            report.push(format!("mass {mass} differs from 1"));
        }
        for (&s, &psi) in self.nodes.iter().zip(&self.phases) {
            if !(psi.re.is_finite() && psi.im.is_finite()) || psi.norm() > 1.0 + PHASE_SLACK {
                report.push(format!("|psi| = {} > 1 at node {s}", psi.norm()));
            }
            if s == 0.0 && (psi - 1.0).norm() > PHASE_SLACK {
                report.push(format!("psi(0) = {psi} but the convention fixes psi(0) = 1"));
            }
        }
        report
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidData(report))
        }
    }

    /// `[x, y]` on polynomials given by their parity values at the nodes.
    pub fn form_values(&self, x: &ParityValues, y: &ParityValues) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for j in 0..self.nodes.len() {
            let (xe, xo) = (x.even[j], x.odd[j]);
            let (ye, yo) = (y.even[j].conj(), y.odd[j].conj());
            let psi = self.phases[j];
            acc += (xe * ye + xo * ye * psi + xe * yo * psi.conj() + xo * yo) * self.weights[j];
        }
        acc
    }

    /// Sesquilinear form `[p, q]` built from `ν` and the kernel
    /// `[[1, ψ], [ψ̄, 1]]` acting on even/odd parts.
    pub fn sesquilinear_form(&self, p: &ComplexPolynomial, q: &ComplexPolynomial) -> Result<C64> {
        self.ensure_valid()?;
        Ok(self.form_values(&ParityValues::of(p, &self.nodes), &ParityValues::of(q, &self.nodes)))
    }

    pub fn classify(&self, tol_phase: f64) -> Vec<NodeClass> {
        self.nodes
            .iter()
            .zip(&self.phases)
            .map(|(&s, psi)| {
                if s == 0.0 || psi.norm() >= 1.0 - tol_phase {
                    NodeClass::S1
                } else {
                    NodeClass::S2
                }
            })
            .collect()
    }

    /// Dimension of the model space: one slot per S₁ node, two per S₂ node.
    pub fn model_dimension(&self, tol_phase: f64) -> usize {
        self.classify(tol_phase).into_iter().map(NodeClass::multiplicity).sum()
    }

    /// Phases rotated by `e^{-2iα}`, as produced by replacing `δ` with
    /// `e^{iα} δ`. A node at zero keeps `ψ = 1`, so only `α ∈ πℤ` is allowed
    /// there.
    pub fn gauge_transform(&self, alpha: f64) -> Result<Self> {
        self.ensure_valid()?;
        let rotation = C64::from_polar(1.0, -2.0 * alpha);
        let has_zero = self.nodes.first() == Some(&0.0);
        if has_zero && (rotation - 1.0).norm() > 1e-12 {
            return Err(Error::GaugeAtZero { alpha });
        }
        let phases = self
            .nodes
            .iter()
            .zip(&self.phases)
            .map(|(&s, &psi)| if s == 0.0 { psi } else { psi * rotation })
            .collect();
        Ok(Self { nodes: self.nodes.clone(), weights: self.weights.clone(), phases })
    }

    /// Unitary equivalence of the induced operators: identical supports
    /// (matched within `tol`) with identical S₁ sets. Weights and phase
    /// arguments play no role.
    pub fn equivalent(&self, other: &Self, tol: f64) -> bool {
        if self.nodes.len() != other.nodes.len() {
            return false;
        }
        let nodes_match =
            self.nodes.iter().zip(&other.nodes).all(|(a, b)| (a - b).abs() <= tol);
        nodes_match && self.classify(crate::tol::PHASE) == other.classify(crate::tol::PHASE)
    }

    pub fn max_node(&self) -> f64 {
        self.nodes.iter().copied().fold(0.0, f64::max)
    }
}
