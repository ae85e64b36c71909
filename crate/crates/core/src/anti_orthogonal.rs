//! Anti-orthogonal polynomials.
//!
//! Orthonormal polynomials for the sesquilinear form of spectral data satisfy
//!
//! ```text
//! s q_n*(s) = a_n q_{n+1}(s) + b_n q_n(s) + a_{n-1} q_{n-1}(s),   a_n > 0,
//! ```
//!
//! so Gram-Schmidt on `1, s, s², …` yields the Jacobi parameters directly.

use crate::error::{Error, Result};
use crate::operator::{JacobiParameters, Termination};
use crate::poly::ComplexPolynomial;
use crate::spectral::{NodeClass, ParityValues, SpectralData};
use crate::{tol, C64};

#[derive(Clone, Debug)]
pub struct AntiOrthogonalBasis {
    /// `q_0, …, q_{m-1}`.
    pub polynomials: Vec<ComplexPolynomial>,
    pub params: JacobiParameters,
    pub termination: Termination,
    /// `[r, r]` of the last residual; zero up to roundoff after a degeneracy stop.
    pub last_residual: f64,
}

impl AntiOrthogonalBasis {
    /// Achieved count `m`.
    pub fn count(&self) -> usize {
        self.polynomials.len()
    }
}

/// Values of a polynomial at the nodes in coordinates that factor the form
/// node by node: `u₁ = p^e + ψ p^o`, `u₂ = sqrt(1 - |ψ|²) p^o`. The form is
/// then `Σ w (u₁ v̄₁ + u₂ v̄₂)`, a plain sum of squares on the diagonal.
///
/// On S₁ nodes the form does not see the combination `p^e - ψ̄ p^o`, and
/// multiplication by `s` followed by the star maps that kernel into itself.
/// Dropping it keeps the iteration free of components that the form cannot
/// control and that would otherwise swamp `[r, r]` with roundoff.
#[derive(Clone, Debug)]
struct FactoredValues {
    u1: Vec<C64>,
    u2: Vec<C64>,
}

struct Factors<'a> {
    data: &'a SpectralData,
    /// `sqrt(1 - |ψ|²)`, zero on S₁ nodes.
    r: Vec<f64>,
}

impl<'a> Factors<'a> {
    fn new(data: &'a SpectralData) -> Self {
        let r = data
            .classify(tol::PHASE)
            .iter()
            .zip(&data.phases)
            .map(|(class, psi)| match class {
                NodeClass::S1 => 0.0,
                NodeClass::S2 => (1.0 - psi.norm_sqr()).max(0.0).sqrt(),
            })
            .collect();
        Self { data, r }
    }

    fn one(&self) -> FactoredValues {
        let n = self.r.len();
        FactoredValues { u1: vec![C64::new(1.0, 0.0); n], u2: vec![C64::new(0.0, 0.0); n] }
    }

    /// Values of `s · p*` from those of `p`.
    fn shifted_star(&self, x: &FactoredValues) -> FactoredValues {
        let d = self.data;
        let (u1, u2) = (0..self.r.len())
            .map(|j| {
                let (s, psi, r) = (d.nodes[j], d.phases[j], self.r[j]);
                let (a, b) = (x.u1[j].conj(), x.u2[j].conj());
                ((psi * a + b * r) * s, (a * r - psi.conj() * b) * s)
            })
            .unzip();
        FactoredValues { u1, u2 }
    }

    fn form(&self, x: &FactoredValues, y: &FactoredValues) -> C64 {
        (0..self.r.len())
            .map(|j| (x.u1[j] * y.u1[j].conj() + x.u2[j] * y.u2[j].conj()) * self.data.weights[j])
            .sum()
    }
}

impl FactoredValues {
    fn axpy(&mut self, c: C64, other: &Self) {
        for (x, y) in self.u1.iter_mut().zip(&other.u1).chain(self.u2.iter_mut().zip(&other.u2)) {
            *x += c * y;
        }
    }

    fn scale(&mut self, c: f64) {
        self.u1.iter_mut().chain(self.u2.iter_mut()).for_each(|x| *x *= c);
    }
}

/// Gram-Schmidt for the form of `data`, producing at most `n_max`
/// polynomials.
///
/// The form is evaluated on values at the nodes, never on coefficients. Each
/// residual gets one reorthogonalization pass against all previous `q_k`.
/// Iteration stops when `[r, r] ≤ tol_degeneracy · s_max²`, which for finitely
/// supported data happens at the model dimension.
pub fn gram_schmidt(data: &SpectralData, n_max: usize, tol_degeneracy: f64) -> Result<AntiOrthogonalBasis> {
    data.ensure_valid()?;
    let n_max = n_max.max(1);
    let s_max = data.max_node();
    let threshold = tol_degeneracy * if s_max > 0.0 { s_max * s_max } else { 1.0 };
    let factors = Factors::new(data);

    let mut polys = vec![ComplexPolynomial::one()];
    let mut values = vec![factors.one()];
    let mut a: Vec<f64> = Vec::new();
    let mut b: Vec<C64> = Vec::new();
    let mut last_residual = f64::NAN;
    let termination = loop {
        let n = polys.len() - 1;
        let mut r_vals = factors.shifted_star(&values[n]);
        let mut r_poly = polys[n].star().shift();
        let bn = factors.form(&r_vals, &values[n]);
        b.push(bn);
        if polys.len() == n_max {
            break Termination::MaxSteps;
        }
        r_vals.axpy(-bn, &values[n]);
        r_poly = r_poly.axpy(-bn, &polys[n]);
        if n > 0 {
            let prev = C64::new(-a[n - 1], 0.0);
            r_vals.axpy(prev, &values[n - 1]);
            r_poly = r_poly.axpy(prev, &polys[n - 1]);
        }
        for (q_vals, q_poly) in values.iter().zip(&polys) {
            let c = factors.form(&r_vals, q_vals);
            r_vals.axpy(-c, q_vals);
            r_poly = r_poly.axpy(-c, q_poly);
        }
        let rr = factors.form(&r_vals, &r_vals).re;
        last_residual = rr;
        if rr < -threshold || !rr.is_finite() {
            return Err(Error::FormNotPositive { value: rr });
        }
        if rr <= threshold {
            break Termination::Breakdown;
        }
        let an = rr.sqrt();
        a.push(an);
        r_vals.scale(1.0 / an);
        values.push(r_vals);
        polys.push(r_poly.scale(C64::new(1.0 / an, 0.0)));
    };
    Ok(AntiOrthogonalBasis {
        polynomials: polys,
        params: JacobiParameters { a, b },
        termination,
        last_residual,
    })
}

fn check_length(params: &JacobiParameters, n_max: usize) -> Result<()> {
    params.ensure_valid()?;
    if params.b.len() < n_max {
        return Err(Error::ParametersTooShort { field: "b", needed: n_max, have: params.b.len() });
    }
    if params.a.len() < n_max {
        return Err(Error::ParametersTooShort { field: "a", needed: n_max, have: params.a.len() });
    }
    Ok(())
}

/// `q_0, …, q_{n_max}` from the three-term recurrence. Needs `a_k`, `b_k` for
/// `k < n_max`.
pub fn recurrence_generate(params: &JacobiParameters, n_max: usize) -> Result<Vec<ComplexPolynomial>> {
    check_length(params, n_max)?;
    let mut polys = vec![ComplexPolynomial::one()];
    for n in 0..n_max {
        let mut next = polys[n].star().shift().axpy(-params.b[n], &polys[n]);
        if n > 0 {
            next = next.axpy(C64::new(-params.a[n - 1], 0.0), &polys[n - 1]);
        }
        polys.push(next.scale(C64::new(1.0 / params.a[n], 0.0)));
    }
    Ok(polys)
}

/// Values `q_0(s), …, q_{n_max}(s)` at a real point, run through the
/// recurrence on values. For real `s`, `q*(s) = conj(q(s))`.
pub fn recurrence_values(params: &JacobiParameters, n_max: usize, s: f64) -> Result<Vec<C64>> {
    check_length(params, n_max)?;
    let mut values = vec![C64::new(1.0, 0.0)];
    for n in 0..n_max {
        let mut next = values[n].conj() * s - params.b[n] * values[n];
        if n > 0 {
            next -= values[n - 1] * params.a[n - 1];
        }
        values.push(next / params.a[n]);
    }
    Ok(values)
}

/// `max |[q_n, q_m] - δ_{nm}|`.
pub fn verify_anti_orthogonality(polys: &[ComplexPolynomial], data: &SpectralData) -> f64 {
    let values: Vec<ParityValues> = polys.iter().map(|q| ParityValues::of(q, &data.nodes)).collect();
    let mut worst: f64 = 0.0;
    for (i, x) in values.iter().enumerate() {
        for (j, y) in values.iter().enumerate() {
            let expected = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((data.form_values(x, y) - expected).norm());
        }
    }
    worst
}
