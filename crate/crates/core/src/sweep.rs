//! Batch drivers: random round trips, model fidelity checks and coupling
//! sweeps of the point-interaction example.
//!
//! Every instance draws from its own ChaCha stream seeded with
//! `seed + index`, so results do not depend on the execution mode.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::anti_orthogonal::gram_schmidt;
use crate::delta::{self, Atom, QuadratureMode};
use crate::error::Result;
use crate::io::CoefficientRow;
use crate::model::build_model;
use crate::operator::{AntiLinearOperator, JacobiParameters, Termination};
use crate::par::{self, Execution};
use crate::spectral::SpectralData;
use crate::{samples, tol, C64};

fn instance_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index as u64))
}

/// Operator → spectral data → Gram-Schmidt on one Jacobi matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundTrip {
    pub size: usize,
    pub recovered: usize,
    pub termination: Termination,
    /// Scaled deviation of the recovered parameters, infinite on a count mismatch.
    pub deviation: f64,
}

pub fn jacobi_round_trip(params: &JacobiParameters) -> Result<RoundTrip> {
    let n = params.len();
    let op = AntiLinearOperator::from_jacobi(params, n)?;
    let data = op.extract_spectral_data(tol::CLUSTER)?;
    let basis = gram_schmidt(&data, n, tol::DEGENERACY)?;
    Ok(RoundTrip {
        size: n,
        recovered: basis.count(),
        termination: basis.termination,
        deviation: basis.params.max_deviation(&params.truncate(n)),
    })
}

pub fn round_trip_batch(seed: u64, count: usize, max_size: usize, exec: Execution) -> Vec<Result<RoundTrip>> {
    par::map_indexed(exec, count, |i| {
        let params = samples::random_jacobi(&mut instance_rng(seed, i), max_size);
        jacobi_round_trip(&params)
    })
}

/// Spectral data → model → spectral data, plus the Lanczos/Gram-Schmidt
/// cross-check on the same model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCase {
    pub nodes: usize,
    pub dimension: usize,
    /// Max per-field deviation of the re-extracted data, infinite on a count mismatch.
    pub extraction_error: f64,
    pub multiplicities_match: bool,
    pub lanczos_deviation: f64,
}

pub fn model_case(data: &SpectralData) -> Result<ModelCase> {
    let (op, space) = build_model(data, tol::PHASE)?;
    let back = op.extract_spectral_data(tol::CLUSTER)?;
    let extraction_error = field_deviation(data, &back);

    let spectrum = op.modulus_spectrum(tol::CLUSTER)?;
    let mut expected: Vec<(f64, usize)> =
        data.nodes.iter().zip(&space.classes).map(|(&s, c)| (s, c.multiplicity())).collect();
    expected.sort_by(|x, y| x.0.total_cmp(&y.0));
    let multiplicities_match = spectrum.clusters.len() == expected.len()
        && spectrum
            .clusters
            .iter()
            .zip(&expected)
            .all(|(cluster, &(s, m))| cluster.multiplicity() == m && (cluster.value - s).abs() < 1e-8);

    let basis = gram_schmidt(data, space.dimension(), tol::DEGENERACY)?;
    let run = op.lanczos(op.dim(), tol::BREAKDOWN);
    Ok(ModelCase {
        nodes: data.len(),
        dimension: space.dimension(),
        extraction_error,
        multiplicities_match,
        lanczos_deviation: run.params.max_deviation(&basis.params),
    })
}

fn field_deviation(x: &SpectralData, y: &SpectralData) -> f64 {
    if x.len() != y.len() {
        return f64::INFINITY;
    }
    (0..x.len())
        .map(|j| {
            (x.nodes[j] - y.nodes[j])
                .abs()
                .max((x.weights[j] - y.weights[j]).abs())
                .max((x.phases[j] - y.phases[j]).norm())
        })
        .fold(0.0, f64::max)
}

pub fn model_batch(seed: u64, count: usize, max_nodes: usize, exec: Execution) -> Vec<Result<ModelCase>> {
    par::map_indexed(exec, count, |i| {
        let data = samples::random_spectral_data(&mut instance_rng(seed, i), max_nodes);
        model_case(&data)
    })
}

/// Parameters of one run of the point-interaction example.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleConfig {
    pub omega: C64,
    /// Quadrature nodes `M` for the continuous part.
    pub quadrature: usize,
    /// Number of Jacobi coefficients to recover.
    pub coeffs: usize,
    /// Truncation size `N` for the resolvent check.
    pub size: usize,
    pub mode: QuadratureMode,
    pub tol_degeneracy: f64,
}

impl ExampleConfig {
    pub fn new(omega: C64) -> Self {
        Self {
            omega,
            quadrature: 4000,
            coeffs: 20,
            size: 2000,
            mode: QuadratureMode::default(),
            tol_degeneracy: tol::DEGENERACY,
        }
    }
}

/// Closed form against its numerical counterpart at one point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub xi: C64,
    pub closed: C64,
    pub numeric: C64,
    pub error: f64,
}

impl Comparison {
    fn new(xi: C64, closed: C64, numeric: C64) -> Self {
        Self { xi, closed, numeric, error: (closed - numeric).norm() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub config: ExampleConfig,
    pub atom: Option<Atom>,
    pub renormalization: f64,
    pub continuous_mass: f64,
    /// `Σ w s ψ`, which should equal `ω`.
    pub first_odd_moment: C64,
    /// `Σ w s²`, which should equal `1 + |ω|²`.
    pub second_moment: f64,
    pub moment_error: f64,
    pub coefficients: Vec<CoefficientRow>,
    pub termination: Termination,
    /// Max of `|b₀ - ω|`, `|a_n - 1|`, `|b_n|` over the recovered table.
    pub coefficient_error: f64,
    pub resolvent_00: Vec<Comparison>,
    pub resolvent_01: Vec<Comparison>,
    pub cauchy_nu: Vec<Comparison>,
    pub cauchy_psi: Vec<Comparison>,
}

/// Sample points for the resolvent and transform checks.
pub const XI_SAMPLES: [C64; 3] = [C64::new(0.3, 0.0), C64::new(0.6, 0.0), C64::new(0.0, 0.6)];

pub fn run_example(config: &ExampleConfig, exec: Execution) -> Result<ExampleReport> {
    let omega = config.omega;
    let disc = delta::discretize_with(omega, config.quadrature, config.mode, exec)?;
    let data = &disc.data;

    let first_odd_moment: C64 = (0..data.len()).map(|j| data.phases[j] * (data.weights[j] * data.nodes[j])).sum();
    let second_moment: f64 = data.nodes.iter().zip(&data.weights).map(|(s, w)| w * s * s).sum();
    let moment_error = (first_odd_moment - omega).norm().max((second_moment - 1.0 - omega.norm_sqr()).abs());

    let basis = gram_schmidt(data, config.coeffs, config.tol_degeneracy)?;
    let reference = delta::jacobi_parameters(omega, basis.count());
    let coefficients: Vec<CoefficientRow> = (0..basis.count())
        .map(|n| {
            let a = basis.params.a.get(n).copied();
            let b = basis.params.b[n];
            let error = a.map_or(0.0, |a| (a - reference.a[n]).abs()).max((b - reference.b[n]).norm());
            CoefficientRow { n, a, b, error }
        })
        .collect();
    let coefficient_error = coefficients.iter().map(|r| r.error).fold(0.0, f64::max);

    let mut resolvent_00 = Vec::new();
    let mut resolvent_01 = Vec::new();
    let mut cauchy_nu = Vec::new();
    let mut cauchy_psi = Vec::new();
    for xi in XI_SAMPLES {
        let (r00, r01) = delta::truncated_resolvent(xi, omega, config.size)?;
        resolvent_00.push(Comparison::new(xi, delta::resolvent_00(xi, omega)?, r00));
        resolvent_01.push(Comparison::new(xi, delta::resolvent_01(xi, omega)?, r01));
        cauchy_nu.push(Comparison::new(xi, delta::cauchy_nu(xi, omega)?, delta::cauchy_nu_discrete(data, xi)));
        cauchy_psi.push(Comparison::new(xi, delta::cauchy_psi(xi, omega)?, delta::cauchy_psi_discrete(data, xi)));
    }

    Ok(ExampleReport {
        config: *config,
        atom: delta::atom(omega),
        renormalization: disc.renormalization,
        continuous_mass: disc.continuous_mass,
        first_odd_moment,
        second_moment,
        moment_error,
        coefficients,
        termination: basis.termination,
        coefficient_error,
        resolvent_00,
        resolvent_01,
        cauchy_nu,
        cauchy_psi,
    })
}

/// One report per configuration. Each run is sequential inside; the
/// configurations are spread over `exec`.
pub fn example_sweep(configs: &[ExampleConfig], exec: Execution) -> Vec<Result<ExampleReport>> {
    par::map(exec, configs, |config| run_example(config, Execution::Sequential))
}
