//! Finite symmetric anti-linear operators `B x = A · conj(x)`.
//!
//! `A` is complex symmetric, so `⟨Bx, y⟩ = ⟨By, x⟩`. The operator carries its
//! cyclic vector `δ`; operators built from a matrix alone use `δ = e₀`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::ComplexPolynomial;
use crate::spectral::SpectralData;
use crate::{tol, C64};

const SYMMETRY_TOL: f64 = 1e-12;
const UNIT_TOL: f64 = 1e-10;
/// `|ψ|` may overshoot 1 by this much before extraction fails.
const PHASE_OVERSHOOT: f64 = 1e-9;
const MASS_DEFECT: f64 = 1e-9;
const TAKAGI_CLUSTER: f64 = 1e-6;

/// `⟨x, y⟩`, linear in `x`.
pub(crate) fn inner(x: &DVector<C64>, y: &DVector<C64>) -> C64 {
    y.dotc(x)
}

/// Max over sampled pairs of `|⟨Bx, y⟩ - ⟨By, x⟩|` for `B = A·conj(·)`.
///
/// Pairs are all basis pairs for small matrices plus seeded random unit
/// vectors.
pub fn check_symmetry(matrix: &DMatrix<C64>) -> f64 {
    let n = matrix.nrows();
    if n == 0 || n != matrix.ncols() {
        return f64::INFINITY;
    }
    let apply = |x: &DVector<C64>| matrix * x.map(|c| c.conj());
    let residual = |x: &DVector<C64>, y: &DVector<C64>| {
        (inner(&apply(x), y) - inner(&apply(y), x)).norm()
    };
    let mut worst: f64 = 0.0;
    if n <= 16 {
        for i in 0..n {
            for j in i + 1..n {
                let (ei, ej) = (basis(n, i), basis(n, j));
                worst = worst.max(residual(&ei, &ej));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut random_unit = || {
        let v = DVector::from_fn(n, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let norm = v.norm();
        v / C64::new(norm, 0.0)
    };
    for _ in 0..32 {
        let (x, y) = (random_unit(), random_unit());
        worst = worst.max(residual(&x, &y));
    }
    worst
}

pub(crate) fn basis(n: usize, k: usize) -> DVector<C64> {
    let mut e = DVector::zeros(n);
    e[k] = C64::new(1.0, 0.0);
    e
}

fn max_asymmetry(matrix: &DMatrix<C64>) -> f64 {
    let n = matrix.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((matrix[(i, j)] - matrix[(j, i)]).norm());
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct AntiLinearOperator {
    matrix: DMatrix<C64>,
    cyclic: DVector<C64>,
}

/// Jacobi parameters: off-diagonal `a_n > 0` and complex diagonal `b_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobiParameters {
    pub a: Vec<f64>,
    pub b: Vec<C64>,
}

impl JacobiParameters {
    pub fn new(a: Vec<f64>, b: Vec<C64>) -> Result<Self> {
        let params = Self { a, b };
        params.ensure_valid()?;
        Ok(params)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        if let Some((index, &value)) =
            self.a.iter().enumerate().find(|(_, a)| !(a.is_finite() && **a > 0.0))
        {
            return Err(Error::NonPositiveCoupling { index, value });
        }
        Ok(())
    }

    /// Number of diagonal entries.
    pub fn len(&self) -> usize {
        self.b.len()
    }

    pub fn is_empty(&self) -> bool {
        self.b.is_empty()
    }

    /// Leading `n × n` block.
    pub fn truncate(&self, n: usize) -> Self {
        Self {
            a: self.a.iter().take(n.saturating_sub(1)).copied().collect(),
            b: self.b.iter().take(n).copied().collect(),
        }
    }

    /// Largest deviation from `other`, each entry scaled by `max(|reference|, 1)`.
    /// Lengths must agree, otherwise the result is infinite.
    pub fn max_deviation(&self, reference: &Self) -> f64 {
        if self.a.len() != reference.a.len() || self.b.len() != reference.b.len() {
            return f64::INFINITY;
        }
        let da = self.a.iter().zip(&reference.a).map(|(x, r)| (x - r).abs() / r.abs().max(1.0));
        let db = self.b.iter().zip(&reference.b).map(|(x, r)| (x - r).norm() / r.norm().max(1.0));
        da.chain(db).fold(0.0, f64::max)
    }
}

/// One eigenvalue cluster of `|B|`: indices into [`ModulusSpectrum::values`].
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub value: f64,
    pub start: usize,
    pub len: usize,
}

impl Cluster {
    pub fn multiplicity(&self) -> usize {
        self.len
    }

    pub fn indices(&self) -> std::ops::Range<usize> {
        self.start..self.start + self.len
    }
}

/// Eigendecomposition of `|B| = sqrt(B²)`, ascending.
#[derive(Clone, Debug)]
pub struct ModulusSpectrum {
    /// Eigenvalues of `|B|`, each recomputed as `‖B v‖` for its eigenvector.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors, column `k` for `values[k]`.
    pub vectors: DMatrix<C64>,
    pub clusters: Vec<Cluster>,
}

impl ModulusSpectrum {
    pub fn max_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `f(|B|)` as a dense matrix.
    pub fn function(&self, f: impl Fn(f64) -> f64) -> DMatrix<C64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, k| {
            self.vectors[(i, k)] * f(self.values[k])
        });
        scaled * self.vectors.adjoint()
    }
}

/// Spectral-data extraction settings.
#[derive(Clone, Copy, Debug)]
pub struct ExtractOptions {
    pub tol_cluster: f64,
    pub tol_weight: f64,
    /// Reject nonzero eigenvalues of multiplicity above two.
    pub assert_cyclic: bool,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { tol_cluster: tol::CLUSTER, tol_weight: tol::WEIGHT, assert_cyclic: true }
    }
}

/// Why the Lanczos iteration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    /// The cyclic subspace is exhausted.
    Breakdown,
    /// The requested number of steps was reached.
    MaxSteps,
}

#[derive(Clone, Debug)]
pub struct LanczosResult {
    pub params: JacobiParameters,
    /// Orthonormal vectors `v_k` with `v_0 = δ`.
    pub basis: Vec<DVector<C64>>,
    pub termination: Termination,
}

impl AntiLinearOperator {
    /// Operator with cyclic vector `e₀`.
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let n = matrix.nrows();
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, cols: matrix.ncols() });
        }
        Self::with_cyclic(matrix, basis(n, 0))
    }

    pub fn with_cyclic(matrix: DMatrix<C64>, cyclic: DVector<C64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        if cyclic.len() != rows {
            return Err(Error::DimensionMismatch { expected: rows, got: cyclic.len() });
        }
        let scale = matrix.iter().map(|c| c.norm()).fold(1.0, f64::max);
        let residual = max_asymmetry(&matrix);
        if residual > SYMMETRY_TOL * scale {
            return Err(Error::NotSymmetric { residual });
        }
        let norm = cyclic.norm();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::OutOfDomain {
                what: "cyclic vector norm",
                value: norm,
                domain: "{1}",
            });
        }
        Ok(Self { matrix, cyclic })
    }

    /// `n × n` tridiagonal operator with diagonal `b` and off-diagonals `a`.
    pub fn from_jacobi(params: &JacobiParameters, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if params.b.len() < n {
            return Err(Error::ParametersTooShort { field: "b", needed: n, have: params.b.len() });
        }
        if params.a.len() + 1 < n {
            return Err(Error::ParametersTooShort { field: "a", needed: n - 1, have: params.a.len() });
        }
        params.truncate(n).ensure_valid()?;
        let mut matrix = DMatrix::zeros(n, n);
        for k in 0..n {
            matrix[(k, k)] = params.b[k];
            if k + 1 < n {
                matrix[(k, k + 1)] = C64::new(params.a[k], 0.0);
                matrix[(k + 1, k)] = C64::new(params.a[k], 0.0);
            }
        }
        Self::new(matrix)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn cyclic(&self) -> &DVector<C64> {
        &self.cyclic
    }

    /// Whether the cyclic vector is `e₀`.
    pub fn cyclic_is_origin(&self) -> bool {
        self.cyclic == basis(self.dim(), 0)
    }

    pub fn apply(&self, x: &DVector<C64>) -> Result<DVector<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok(self.apply_unchecked(x))
    }

    fn apply_unchecked(&self, x: &DVector<C64>) -> DVector<C64> {
        &self.matrix * x.map(|c| c.conj())
    }

    /// `p(B) x = Σ c_k B^k x`; coefficients act linearly on the iterates.
    pub fn apply_polynomial(&self, p: &ComplexPolynomial, x: &DVector<C64>) -> Result<DVector<C64>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        let mut acc = DVector::zeros(self.dim());
        let mut power = x.clone();
        for (k, &c) in p.coeffs().iter().enumerate() {
            if k > 0 {
                power = self.apply_unchecked(&power);
            }
            acc += &power * c;
        }
        Ok(acc)
    }

    /// `B² = A · conj(A)`, Hermitian positive semi-definite.
    pub fn square(&self) -> DMatrix<C64> {
        let h = &self.matrix * self.matrix.map(|c| c.conj());
        (&h + h.adjoint()) * C64::new(0.5, 0.0)
    }

    pub fn check_symmetry(&self) -> f64 {
        check_symmetry(&self.matrix)
    }

    /// Largest singular value of `A`.
    pub fn operator_norm(&self) -> f64 {
        self.matrix.clone().singular_values().max()
    }

    pub fn modulus_spectrum(&self, tol_cluster: f64) -> Result<ModulusSpectrum> {
        modulus_spectrum_of(&self.matrix, tol_cluster)
    }

    pub fn extract_spectral_data(&self, tol_cluster: f64) -> Result<SpectralData> {
        self.extract_with(ExtractOptions { tol_cluster, ..ExtractOptions::default() })
    }

    /// Spectral data `(ν, ψ)` at the cyclic vector: per cluster with
    /// projection `P`, `w = ‖Pδ‖²` and `ψ = ⟨P Bδ, δ⟩ / (s w)`.
    pub fn extract_with(&self, options: ExtractOptions) -> Result<SpectralData> {
        let spectrum = self.modulus_spectrum(options.tol_cluster)?;
        let zero_threshold = options.tol_cluster * (1.0 + spectrum.max_value());
        let delta = &self.cyclic;
        let b_delta = self.apply_unchecked(delta);

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut phases = Vec::new();
        for cluster in &spectrum.clusters {
            let s = if cluster.value <= zero_threshold { 0.0 } else { cluster.value };
            if options.assert_cyclic && s > 0.0 && cluster.multiplicity() > 2 {
                return Err(Error::NonCyclic { value: s, multiplicity: cluster.multiplicity() });
            }
            let mut weight = 0.0;
            let mut moment = C64::new(0.0, 0.0);
            for k in cluster.indices() {
                let v = spectrum.vectors.column(k);
                let along_delta = v.dotc(delta);
                weight += along_delta.norm_sqr();
                moment += v.dotc(&b_delta) * along_delta.conj();
            }
            if weight < options.tol_weight {
                continue;
            }
            let psi = if s == 0.0 {
                C64::new(1.0, 0.0)
            } else {
                let psi = moment / (s * weight);
                let modulus = psi.norm();
                // `⟨P Bδ, δ⟩` carries an absolute error of order ε‖B‖ per
                // coordinate, so light clusters get proportionally more slack.
                let noise = 64.0 * f64::EPSILON * self.dim() as f64 * spectrum.max_value() / (s * weight.sqrt());
                if modulus > 1.0 + PHASE_OVERSHOOT.max(noise) {
                    return Err(Error::PhaseOutOfRange { node: s, modulus });
                }
                if modulus > 1.0 {
                    psi / modulus
                } else {
                    psi
                }
            };
            nodes.push(s);
            weights.push(weight);
            phases.push(psi);
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > MASS_DEFECT {
            return Err(Error::MassDefect { total });
        }
        weights.iter_mut().for_each(|w| *w /= total);
        SpectralData::new(nodes, weights, phases)
    }

    /// Anti-linear Lanczos with full reorthogonalization, started at `δ`.
    ///
    /// `B v_k = a_k v_{k+1} + b_k v_k + a_{k-1} v_{k-1}`; stops when
    /// `a_k ≤ tol_breakdown · ‖B‖` or after `max_steps` vectors.
    pub fn lanczos(&self, max_steps: usize, tol_breakdown: f64) -> LanczosResult {
        let n = self.dim();
        let max_steps = max_steps.max(1);
        let threshold = tol_breakdown * self.operator_norm();
        let mut basis: Vec<DVector<C64>> = vec![self.cyclic.clone()];
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut termination = Termination::MaxSteps;
        loop {
            let k = basis.len() - 1;
            let w = self.apply_unchecked(&basis[k]);
            let bk = inner(&w, &basis[k]);
            b.push(bk);
            if basis.len() == n {
                // The whole space is spanned: nothing left to generate.
                termination = Termination::Breakdown;
                break;
            }
            if basis.len() == max_steps {
                break;
            }
            let mut r = w - &basis[k] * bk;
            if k > 0 {
                r -= &basis[k - 1] * C64::new(a[k - 1], 0.0);
            }
            for _ in 0..2 {
                for v in &basis {
                    let c = inner(&r, v);
                    r -= v * c;
                }
            }
            let ak = r.norm();
            if ak <= threshold {
                termination = Termination::Breakdown;
                break;
            }
            a.push(ak);
            basis.push(r / C64::new(ak, 0.0));
        }
        LanczosResult { params: JacobiParameters { a, b }, basis, termination }
    }
}

fn hermitian_eigen(h: DMatrix<C64>) -> Result<(Vec<f64>, DMatrix<C64>)> {
    let n = h.nrows();
    let eigen = SymmetricEigen::try_new(h, f64::EPSILON, 1000 * n.max(10)).ok_or(Error::EigenSolver)?;
    Ok((eigen.eigenvalues.iter().copied().collect(), eigen.eigenvectors))
}

/// Eigendecomposition of `sqrt(A · conj(A))` with eigenvalues refined as
/// `‖A conj(v)‖`, sorted ascending and grouped by relative gap.
pub(crate) fn modulus_spectrum_of(matrix: &DMatrix<C64>, tol_cluster: f64) -> Result<ModulusSpectrum> {
    let n = matrix.nrows();
    let conj = matrix.map(|c| c.conj());
    let h = matrix * &conj;
    let h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let (_, vectors) = hermitian_eigen(h)?;

    let refined: Vec<f64> = (0..n)
        .map(|k| (matrix * vectors.column(k).map(|c| c.conj())).norm())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| refined[i].total_cmp(&refined[j]));
    let values: Vec<f64> = order.iter().map(|&k| refined[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, k| vectors[(i, order[k])]);

    let threshold = tol_cluster * (1.0 + values.last().copied().unwrap_or(0.0));
    let mut clusters: Vec<Cluster> = Vec::new();
    for (k, &value) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if value - values[k - 1] <= threshold => c.len += 1,
            _ => clusters.push(Cluster { value, start: k, len: 1 }),
        }
    }
    for c in &mut clusters {
        c.value = values[c.indices()].iter().sum::<f64>() / c.len as f64;
    }
    Ok(ModulusSpectrum { values, vectors, clusters })
}

/// Autonne-Takagi factorisation `A = U Σ Uᵀ`.
#[derive(Clone, Debug)]
pub struct Takagi {
    pub u: DMatrix<C64>,
    /// Singular values, descending.
    pub sigma: Vec<f64>,
}

impl Takagi {
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let scaled = DMatrix::from_fn(self.u.nrows(), self.u.ncols(), |i, k| {
            self.u[(i, k)] * self.sigma[k]
        });
        scaled * self.u.transpose()
    }
}

/// Takagi factorisation of a complex symmetric matrix.
///
/// Eigenvectors of `A·conj(A)` are grouped into clusters; each cluster spans
/// an invariant subspace of `x ↦ A conj(x)`, whose restriction is a small
/// symmetric matrix `M`. `M` is factored through the real symmetric embedding
/// `[[Re M, Im M], [Im M, -Re M]]`, whose positive eigenpairs `(x; y)` give
/// Takagi vectors `x + iy`.
pub fn takagi(matrix: &DMatrix<C64>) -> Result<Takagi> {
    let (rows, cols) = matrix.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    let scale = matrix.iter().map(|c| c.norm()).fold(1.0, f64::max);
    let residual = max_asymmetry(matrix);
    if residual > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { residual });
    }
    let n = rows;
    let spectrum = modulus_spectrum_of(matrix, TAKAGI_CLUSTER)?;
    let zero_threshold = TAKAGI_CLUSTER * (1.0 + spectrum.max_value());

    let mut columns: Vec<(f64, DVector<C64>)> = Vec::with_capacity(n);
    for cluster in &spectrum.clusters {
        let block = spectrum.vectors.columns(cluster.start, cluster.len).into_owned();
        let top = spectrum.values[cluster.indices()].iter().copied().fold(0.0, f64::max);
        if top <= zero_threshold {
            for (k, idx) in cluster.indices().enumerate() {
                columns.push((spectrum.values[idx], block.column(k).into_owned()));
            }
            continue;
        }
        let k = cluster.len;
        let restricted = block.adjoint() * matrix * block.map(|c| c.conj());
        let embedding = DMatrix::<f64>::from_fn(2 * k, 2 * k, |i, j| {
            let (bi, bj) = (i / k, j / k);
            let m = restricted[(i % k, j % k)];
            let m_sym = (m + restricted[(j % k, i % k)]) * 0.5;
            match (bi, bj) {
                (0, 0) => m_sym.re,
                (1, 1) => -m_sym.re,
                _ => m_sym.im,
            }
        });
        let eigen = SymmetricEigen::try_new(embedding, f64::EPSILON, 1000 * k.max(10))
            .ok_or(Error::EigenSolver)?;
        let mut order: Vec<usize> = (0..2 * k).collect();
        order.sort_by(|&i, &j| eigen.eigenvalues[j].total_cmp(&eigen.eigenvalues[i]));
        for &idx in order.iter().take(k) {
            let vec = eigen.eigenvectors.column(idx);
            let w = DVector::from_fn(k, |i, _| C64::new(vec[i], vec[i + k]));
            let u = &block * w;
            let sigma = (matrix * u.map(|c| c.conj())).norm();
            columns.push((sigma, u));
        }
    }
    columns.sort_by(|x, y| y.0.total_cmp(&x.0));
    let sigma = columns.iter().map(|c| c.0).collect();
    let u = DMatrix::from_fn(n, n, |i, k| columns[k].1[i]);
    Ok(Takagi { u, sigma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples;
    use proptest::prelude::*;
    use rand::Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn swap() -> AntiLinearOperator {
        AntiLinearOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        ))
        .unwrap()
    }

    fn scalar(omega: C64) -> AntiLinearOperator {
        AntiLinearOperator::new(DMatrix::from_element(1, 1, omega)).unwrap()
    }

    #[test]
    fn apply_examples() {
        let y = swap().apply(&DVector::from_vec(vec![c(0.0, 1.0), c(0.0, 0.0)])).unwrap();
        assert_eq!(y.as_slice(), &[c(0.0, 0.0), c(0.0, -1.0)]);
        let omega = c(0.3, -1.1);
        assert_eq!(scalar(omega).apply(&DVector::from_element(1, c(1.0, 0.0))).unwrap()[0], omega);
        assert!(matches!(
            swap().apply(&DVector::zeros(3)),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        ));
    }

    #[test]
    fn rejects_asymmetric_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(AntiLinearOperator::new(m.clone()), Err(Error::NotSymmetric { .. })));
        assert!(check_symmetry(&m) > 1.0);
        assert!(matches!(takagi(&m), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn check_symmetry_examples() {
        assert!(swap().check_symmetry() <= 1e-12);
        let diag = DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(check_symmetry(&diag) <= 1e-12);
    }

    #[test]
    fn square_examples() {
        assert_eq!(swap().square(), DMatrix::identity(2, 2));
        let omega = c(1.5, -2.0);
        assert!((scalar(omega).square()[(0, 0)] - omega.norm_sqr()).norm() < 1e-15);
    }

    #[test]
    fn modulus_spectrum_examples() {
        let spec = swap().modulus_spectrum(tol::CLUSTER).unwrap();
        assert_eq!(spec.clusters.len(), 1);
        assert_eq!(spec.clusters[0].multiplicity(), 2);
        assert!((spec.clusters[0].value - 1.0).abs() < 1e-15);

        let omega = c(-0.4, 0.3);
        let spec = scalar(omega).modulus_spectrum(tol::CLUSTER).unwrap();
        assert!((spec.values[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn extract_examples() {
        let data = swap().extract_spectral_data(tol::CLUSTER).unwrap();
        assert_eq!(data.nodes, vec![1.0]);
        assert!((data.weights[0] - 1.0).abs() < 1e-15);
        assert!(data.phases[0].norm() < 1e-15);

        let omega = c(1.2, -0.5);
        let data = scalar(omega).extract_spectral_data(tol::CLUSTER).unwrap();
        assert!((data.nodes[0] - omega.norm()).abs() < 1e-15);
        assert!((data.phases[0] - omega / omega.norm()).norm() < 1e-15);
    }

    #[test]
    fn extract_rejects_high_multiplicity() {
        let op = AntiLinearOperator::new(DMatrix::identity(3, 3)).unwrap();
        assert!(matches!(
            op.extract_spectral_data(tol::CLUSTER),
            Err(Error::NonCyclic { multiplicity: 3, .. })
        ));
    }

    #[test]
    fn extract_zero_node_gets_unit_phase() {
        // A = [[0, 0], [0, 1]] with δ = (1, 1)/√2: kernel carries half the mass.
        let m = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let op = AntiLinearOperator::with_cyclic(m, DVector::from_vec(vec![c(h, 0.0), c(h, 0.0)]))
            .unwrap();
        let data = op.extract_spectral_data(tol::CLUSTER).unwrap();
        assert_eq!(data.nodes[0], 0.0);
        assert_eq!(data.phases[0], c(1.0, 0.0));
        assert!((data.weights[0] - 0.5).abs() < 1e-15);
        assert!((data.phases[1] - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn lanczos_examples() {
        let run = swap().lanczos(10, tol::BREAKDOWN);
        assert_eq!(run.params.a, vec![1.0]);
        assert_eq!(run.params.b, vec![c(0.0, 0.0); 2]);
        assert_eq!(run.termination, Termination::Breakdown);

        let omega = c(0.7, 0.2);
        let run = scalar(omega).lanczos(1, tol::BREAKDOWN);
        assert_eq!(run.params.b, vec![omega]);
        assert!(run.params.a.is_empty());
    }

    #[test]
    fn lanczos_reproduces_delta_jacobi() {
        let omega = c(2.0, -1.0);
        for n in [1, 2, 3, 17, 60] {
            let mut b = vec![c(0.0, 0.0); n];
            b[0] = omega;
            let params = JacobiParameters::new(vec![1.0; n - 1], b).unwrap();
            let op = AntiLinearOperator::from_jacobi(&params, n).unwrap();
            let run = op.lanczos(n, tol::BREAKDOWN);
            assert!(run.params.max_deviation(&params) < 1e-13, "n={n}");
        }
    }

    #[test]
    fn from_jacobi_examples() {
        let omega = c(0.0, 3.0);
        let params = JacobiParameters::new(vec![1.0], vec![omega, c(0.0, 0.0)]).unwrap();
        let op = AntiLinearOperator::from_jacobi(&params, 2).unwrap();
        assert_eq!(op.matrix()[(0, 0)], omega);
        assert_eq!(op.matrix()[(0, 1)], c(1.0, 0.0));
        assert_eq!(op.matrix()[(1, 1)], c(0.0, 0.0));

        let single = JacobiParameters::new(vec![], vec![c(5.0, 0.0)]).unwrap();
        assert_eq!(AntiLinearOperator::from_jacobi(&single, 1).unwrap().matrix()[(0, 0)], c(5.0, 0.0));

        assert!(matches!(
            JacobiParameters::new(vec![0.0], vec![c(0.0, 0.0); 2]),
            Err(Error::NonPositiveCoupling { index: 0, .. })
        ));
        assert!(matches!(
            AntiLinearOperator::from_jacobi(&single, 2),
            Err(Error::ParametersTooShort { .. })
        ));
    }

    #[test]
    fn operator_norm_examples() {
        assert!((swap().operator_norm() - 1.0).abs() < 1e-14);
        let omega = c(3.0, 4.0);
        assert!((scalar(omega).operator_norm() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn takagi_examples() {
        let diag = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let t = takagi(&diag).unwrap();
        assert!((t.sigma[0] - 2.0).abs() < 1e-14 && (t.sigma[1] - 1.0).abs() < 1e-14);
        assert!((t.reconstruct() - &diag).norm() < 1e-13);

        let t = takagi(swap().matrix()).unwrap();
        assert!((t.sigma[0] - 1.0).abs() < 1e-14 && (t.sigma[1] - 1.0).abs() < 1e-14);
        assert!((t.reconstruct() - swap().matrix()).norm() < 1e-13);
        let unitary = t.u.adjoint() * &t.u;
        assert!((unitary - DMatrix::identity(2, 2)).norm() < 1e-13);
    }

    #[test]
    fn takagi_handles_zero_singular_values() {
        let v = DVector::from_vec(vec![c(1.0, 1.0), c(0.5, -2.0), c(0.0, 1.0)]);
        let rank_one = &v * v.transpose();
        let t = takagi(&rank_one).unwrap();
        assert!(t.sigma[1] < 1e-12 && t.sigma[2] < 1e-12);
        assert!((t.reconstruct() - &rank_one).norm() < 1e-12 * rank_one.norm());
    }

    fn jacobi_op(seed: u64, max: usize) -> AntiLinearOperator {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = samples::random_jacobi(&mut rng, max);
        AntiLinearOperator::from_jacobi(&params, params.len()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn apply_is_antilinear(seed in any::<u64>(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let op = jacobi_op(seed, 8);
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
            let x = DVector::from_fn(op.dim(), |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let alpha = c(re, im);
            let lhs = op.apply(&(&x * alpha)).unwrap();
            let rhs = op.apply(&x).unwrap() * alpha.conj();
            prop_assert!((lhs - rhs).norm() < 1e-12 * (1.0 + x.norm() * alpha.norm()) * 8.0);
            prop_assert!(op.check_symmetry() < 1e-12 * 8.0);
        }

        #[test]
        fn square_is_hermitian_psd(seed in any::<u64>()) {
            let op = jacobi_op(seed, 10);
            let sq = op.square();
            prop_assert!((&sq - sq.adjoint()).norm() < 1e-12);
            let norm = op.operator_norm();
            let min = sq.symmetric_eigenvalues().min();
            prop_assert!(min >= -1e-10 * norm * norm);
        }

        #[test]
        fn extraction_matches_moments(seed in any::<u64>()) {
            let op = jacobi_op(seed, 10);
            let data = op.extract_spectral_data(tol::CLUSTER).unwrap();
            let sq = op.square();
            let delta = op.cyclic().clone();
            let mut even = delta.clone();
            let mut odd = op.apply(&delta).unwrap();
            for k in 0..=6 {
                let lhs_even: f64 = data.nodes.iter().zip(&data.weights)
                    .map(|(s, w)| w * s.powi(2 * k)).sum();
                let lhs_odd: C64 = data.nodes.iter().zip(&data.weights).zip(&data.phases)
                    .map(|((s, w), psi)| psi * (w * s.powi(2 * k + 1))).sum();
                let rhs_even = inner(&even, &delta);
                let rhs_odd = inner(&odd, &delta);
                prop_assert!((rhs_even - lhs_even).norm() <= 1e-9 * lhs_even.abs().max(1.0));
                let scale = data.nodes.iter().zip(&data.weights)
                    .map(|(s, w)| w * s.powi(2 * k + 1)).sum::<f64>().max(1.0);
                prop_assert!((rhs_odd - lhs_odd).norm() <= 1e-9 * scale);
                even = &sq * even;
                odd = &sq * odd;
            }
        }

        #[test]
        fn lanczos_basis_orthonormal_and_bounded(seed in any::<u64>()) {
            let op = jacobi_op(seed, 10);
            let run = op.lanczos(op.dim(), tol::BREAKDOWN);
            let k = run.basis.len();
            let norm = op.operator_norm();
            for i in 0..k {
                for j in 0..k {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((inner(&run.basis[i], &run.basis[j]) - expected).norm() < 1e-10);
                }
            }
            for &a in &run.params.a {
                prop_assert!(a <= norm + 1e-10);
            }
            for b in &run.params.b {
                prop_assert!(b.norm() <= norm + 1e-10);
            }
        }

        #[test]
        fn takagi_matches_modulus_spectrum(seed in any::<u64>()) {
            let op = jacobi_op(seed, 10);
            let t = takagi(op.matrix()).unwrap();
            let norm = op.operator_norm();
            prop_assert!((t.reconstruct() - op.matrix()).norm() <= 1e-8 * norm);
            let unitary = t.u.adjoint() * &t.u;
            prop_assert!((unitary - DMatrix::identity(op.dim(), op.dim())).norm() < 1e-10);
            let spectrum = op.modulus_spectrum(tol::CLUSTER).unwrap();
            let mut ascending = t.sigma.clone();
            ascending.reverse();
            for (x, y) in ascending.iter().zip(&spectrum.values) {
                prop_assert!((x - y).abs() < 1e-8);
            }
        }
    }
}
