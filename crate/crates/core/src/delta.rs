//! The free Jacobi matrix with a complex point interaction at the origin,
//! `b_n = ω δ_{n,0}`, `a_n = 1`, and its closed-form spectral data.
//!
//! With `x = |ω|²`:
//!
//! * density on `[0, 2]`: `(x + 1)/π · sqrt(4 - s²) / ((1 + x)² - x s²)`;
//! * phase on `[0, 2]`: `ψ(s) = ω s / (1 + x)`;
//! * for `|ω| > 1` an atom at `|ω| + 1/|ω|` of mass `(x - 1)/x` and phase `ω/|ω|`.
//!
//! Resolvent entries and Cauchy-Stieltjes transforms are written in the
//! Joukowsky variable `z = ξ + 1/ξ`, `0 < |ξ| < 1`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::anti_orthogonal::recurrence_values;
use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::operator::{AntiLinearOperator, JacobiParameters};
use crate::par::{self, Execution};
use crate::poly::{chebyshev_t, chebyshev_u};
use crate::quadrature::gauss_legendre_on;
use crate::spectral::SpectralData;
use crate::C64;

const POLE_TOL: f64 = 1e-12;
/// Width around `s² = 2` where the Chebyshev formulas hand over to the recurrence.
const CHEBYSHEV_SINGULAR_BAND: f64 = 1e-6;
const RENORMALISATION_LIMIT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaParameters {
    pub omega: C64,
    pub quadrature_nodes: usize,
}

/// Point mass of `ν` outside `[0, 2]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub location: f64,
    pub weight: f64,
    pub phase: C64,
}

/// How the absolutely continuous part is discretised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadratureMode {
    /// Gauss-Legendre in the angle `φ` with `s = 2 cos φ`, which absorbs the
    /// square-root edge of the density.
    #[default]
    ChebyshevAngle,
    /// Gauss-Legendre directly in `s` on `[0, 2]`.
    GaussLegendre,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Discretization {
    pub data: SpectralData,
    /// Factor applied to the raw weights so that they sum to 1.
    pub renormalization: f64,
    /// Raw mass of the continuous part before renormalisation.
    pub continuous_mass: f64,
}

fn check_band(s: f64) -> Result<()> {
    if (0.0..=2.0).contains(&s) {
        Ok(())
    } else {
        Err(Error::OutOfDomain { what: "s", value: s, domain: "[0, 2]" })
    }
}

fn check_disk(xi: C64) -> Result<()> {
    let r = xi.norm();
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutOfDomain { what: "|xi|", value: r, domain: "(0, 1)" })
    }
}

fn guard_pole(denominator: C64) -> Result<C64> {
    if denominator.norm() < POLE_TOL {
        Err(Error::NearPole { denominator: denominator.norm() })
    } else {
        Ok(denominator)
    }
}

/// Density of the absolutely continuous part of `ν`.
pub fn density(s: f64, omega: C64) -> Result<f64> {
    check_band(s)?;
    let x = omega.norm_sqr();
    let r = omega.norm();
    // (1 + x)² - x s² factored so that the |ω| = 1 edge cancels cleanly.
    let near = (1.0 - r) * (1.0 - r) + r * (2.0 - s);
    let far = 1.0 + x + r * s;
    Ok((x + 1.0) / PI * ((2.0 - s) * (2.0 + s)).sqrt() / (near * far))
}

pub fn atom(omega: C64) -> Option<Atom> {
    let r = omega.norm();
    (r > 1.0).then(|| Atom {
        location: r + 1.0 / r,
        weight: (r * r - 1.0) / (r * r),
        phase: omega / r,
    })
}

pub fn phase(s: f64, omega: C64) -> Result<C64> {
    check_band(s)?;
    Ok(omega * s / (1.0 + omega.norm_sqr()))
}

pub fn discretize(omega: C64, nodes: usize) -> Result<Discretization> {
    discretize_with(omega, nodes, QuadratureMode::default(), Execution::default())
}

/// Quadrature discretisation of `(ν, ψ)`: `nodes` points for the continuous
/// part plus the atom when `|ω| > 1`, renormalised to unit mass.
pub fn discretize_with(
    omega: C64,
    nodes: usize,
    mode: QuadratureMode,
    exec: Execution,
) -> Result<Discretization> {
    if nodes < 2 {
        return Err(Error::OutOfDomain {
            what: "quadrature nodes",
            value: nodes as f64,
            domain: "[2, inf)",
        });
    }
    let x = omega.norm_sqr();
    let mut points: Vec<(f64, f64)> = match mode {
        QuadratureMode::ChebyshevAngle => {
            let rule = gauss_legendre_on(nodes, 0.0, FRAC_PI_2, exec);
            let mut pts = par::map_indexed(exec, nodes, |k| {
                let phi = rule.nodes[k];
                let sin2 = phi.sin().powi(2);
                // density(2 cos φ) · 2 sin φ, simplified.
                let w = (x + 1.0) / PI * 4.0 * sin2 / ((1.0 - x) * (1.0 - x) + 4.0 * x * sin2);
                (2.0 * phi.cos(), w * rule.weights[k])
            });
            pts.reverse();
            pts
        }
        QuadratureMode::GaussLegendre => {
            let rule = gauss_legendre_on(nodes, 0.0, 2.0, exec);
            par::map_indexed(exec, nodes, |k| {
                let s = rule.nodes[k];
                (s, density(s, omega).unwrap_or(0.0) * rule.weights[k])
            })
        }
    };
    let continuous_mass: f64 = points.iter().map(|p| p.1).sum();
    let atom = atom(omega);
    let total = continuous_mass + atom.map_or(0.0, |a| a.weight);
    let renormalization = 1.0 / total;
    if !((1.0 - RENORMALISATION_LIMIT)..=(1.0 + RENORMALISATION_LIMIT)).contains(&renormalization) {
        return Err(Error::Quadrature { factor: renormalization });
    }
    points.iter_mut().for_each(|p| p.1 *= renormalization);

    let mut phases: Vec<C64> = points.iter().map(|&(s, _)| omega * s / (1.0 + x)).collect();
    let (mut s_nodes, mut weights): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    if let Some(atom) = atom {
        s_nodes.push(atom.location);
        weights.push(atom.weight * renormalization);
        phases.push(atom.phase);
    }
    let data = SpectralData::new(s_nodes, weights, phases)?;
    Ok(Discretization { data, renormalization, continuous_mass })
}

/// `(2 + ξ + 1/ξ - JJ*)⁻¹` entry `(0, 0)`.
pub fn resolvent_00(xi: C64, omega: C64) -> Result<C64> {
    check_disk(xi)?;
    let d = guard_pole((1.0 + xi) * (1.0 - omega.norm_sqr() * xi))?;
    Ok(xi / d)
}

/// `(2 + ξ + 1/ξ - JJ*)⁻¹` entry `(0, 1)`.
pub fn resolvent_01(xi: C64, omega: C64) -> Result<C64> {
    check_disk(xi)?;
    let d = guard_pole((1.0 + xi) * (1.0 - omega.norm_sqr() * xi))?;
    Ok(omega * xi * xi / d)
}

/// Cauchy-Stieltjes transform of the even extension `ν^e` at `z = ξ + 1/ξ`.
pub fn cauchy_nu(xi: C64, omega: C64) -> Result<C64> {
    check_disk(xi)?;
    let d = guard_pole(1.0 - omega.norm_sqr() * xi * xi)?;
    Ok(xi / d)
}

/// Cauchy-Stieltjes transform of `s ψ^o(s) dν^e(s)` at `z = ξ + 1/ξ`.
pub fn cauchy_psi(xi: C64, omega: C64) -> Result<C64> {
    check_disk(xi)?;
    let d = guard_pole(1.0 - omega.norm_sqr() * xi * xi)?;
    Ok(omega * xi * (1.0 + xi * xi) / d)
}

/// `Σ_j w_j z / (z² - s_j²)`: the transform of the even extension of a
/// discrete `ν`, symmetrised on the fly.
pub fn cauchy_nu_discrete(data: &SpectralData, xi: C64) -> C64 {
    let z = xi + xi.inv();
    data.nodes.iter().zip(&data.weights).map(|(&s, &w)| z * w / (z * z - s * s)).sum()
}

/// `Σ_j w_j s_j ψ_j z / (z² - s_j²)`.
pub fn cauchy_psi_discrete(data: &SpectralData, xi: C64) -> C64 {
    let z = xi + xi.inv();
    data.nodes
        .iter()
        .zip(&data.weights)
        .zip(&data.phases)
        .map(|((&s, &w), &psi)| z * psi * (w * s) / (z * z - s * s))
        .sum()
}

/// First `n` Jacobi parameters: `a = 1`, `b = (ω, 0, 0, …)`.
pub fn jacobi_parameters(omega: C64, n: usize) -> JacobiParameters {
    let mut b = vec![C64::new(0.0, 0.0); n.max(1)];
    b[0] = omega;
    JacobiParameters { a: vec![1.0; n.max(1)], b }
}

pub fn build_truncated_j(omega: C64, n: usize) -> Result<AntiLinearOperator> {
    AntiLinearOperator::from_jacobi(&jacobi_parameters(omega, n), n)
}

/// `q_n(s)` through the Chebyshev representation; within `1e-6` of `s² = 2`
/// the value comes from the recurrence instead.
pub fn chebyshev_q(n: usize, s: f64, omega: C64) -> C64 {
    let gap = 2.0 - s * s;
    if gap.abs() < CHEBYSHEV_SINGULAR_BAND {
        let values = recurrence_values(&jacobi_parameters(omega, n.max(1)), n, s)
            .expect("unit couplings are valid");
        return values[n];
    }
    let m = n / 2;
    let t = chebyshev_t(2 * m, s / 2.0);
    let u = chebyshev_u(2 * m + 1, s / 2.0);
    let one = C64::new(1.0, 0.0);
    if n % 2 == 0 {
        let w = omega.conj();
        ((2.0 * one - 2.0 * w * s) * t + (2.0 * w - s) * u) / gap
    } else {
        (-2.0 * omega * t + (2.0 + omega * s - s * s) * u) / gap
    }
}

/// Entries `(0, 0)` and `(0, 1)` of `(2 + ξ + 1/ξ - JJ*)⁻¹` for the `n × n`
/// truncation, by a banded solve.
pub fn truncated_resolvent(xi: C64, omega: C64, n: usize) -> Result<(C64, C64)> {
    if n < 2 {
        return Err(Error::OutOfDomain { what: "truncation size", value: n as f64, domain: "[2, inf)" });
    }
    check_disk(xi)?;
    let z = 2.0 + xi + xi.inv();
    // JJ* of the truncated J, written out from the tridiagonal entries.
    let b = |k: usize| if k == 0 { omega } else { C64::new(0.0, 0.0) };
    let a = |k: usize| if k + 1 < n { 1.0 } else { 0.0 };
    let mut m = BandedMatrix::zeros(n, 2, 2);
    for i in 0..n {
        let left = if i > 0 { a(i - 1) } else { 0.0 };
        let diag = b(i).norm_sqr() + left * left + a(i) * a(i);
        m.set(i, i, z - diag);
        if i + 1 < n {
            // (JJ*)_{i,i+1} = b_i a_i + a_i conj(b_{i+1})
            let off = b(i) * a(i) + b(i + 1).conj() * a(i);
            m.set(i, i + 1, -off);
            m.set(i + 1, i, -off.conj());
        }
        if i + 2 < n {
            let off = C64::new(a(i) * a(i + 1), 0.0);
            m.set(i, i + 2, -off);
            m.set(i + 2, i, -off);
        }
    }
    let mut e0 = vec![C64::new(0.0, 0.0); n];
    e0[0] = C64::new(1.0, 0.0);
    let mut e1 = vec![C64::new(0.0, 0.0); n];
    e1[1] = C64::new(1.0, 0.0);
    let col0 = m.solve(&e0)?;
    let col1 = m.solve(&e1)?;
    Ok((col0[0], col1[0]))
}

/// Density sampled on `points` equally spaced nodes of `[0, 2]`.
pub fn density_curve(omega: C64, points: usize) -> Vec<(f64, f64)> {
    let points = points.max(2);
    (0..points)
        .map(|k| {
            let s = 2.0 * k as f64 / (points - 1) as f64;
            (s, density(s, omega).expect("sample inside the band"))
        })
        .collect()
}

pub fn phase_curve(omega: C64, points: usize) -> Vec<(f64, C64)> {
    let points = points.max(2);
    (0..points)
        .map(|k| {
            let s = 2.0 * k as f64 / (points - 1) as f64;
            (s, phase(s, omega).expect("sample inside the band"))
        })
        .collect()
}
