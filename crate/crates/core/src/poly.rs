//! Complex polynomials in the monomial basis.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::C64;

/// Coefficients below this modulus are stripped from the top end.
const TRAILING_ZERO: f64 = 1e-14;

/// Polynomial `Σ c_k s^k`; `coeffs[k]` holds `c_k`. The zero polynomial has no
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "Vec<C64>", into = "Vec<C64>")]
pub struct ComplexPolynomial {
    coeffs: Vec<C64>,
}

impl ComplexPolynomial {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Self { coeffs };
        p.normalize();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(C64::new(1.0, 0.0))
    }

    pub fn constant(c: C64) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `s`.
    pub fn identity() -> Self {
        Self::new(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<C64> {
        self.coeffs.last().copied()
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.norm() < TRAILING_ZERO) {
            self.coeffs.pop();
        }
    }

    /// Conjugate every coefficient: `p*(s) = conj(p(conj(s)))`.
    pub fn star(&self) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.conj()).collect() }
    }

    /// Split into even and odd parts, `p = even + odd`.
    pub fn parity_split(&self) -> (Self, Self) {
        let zero = C64::new(0.0, 0.0);
        let pick = |parity: usize| {
            Self::new(
                self.coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| if k % 2 == parity { c } else { zero })
                    .collect(),
            )
        };
        (pick(0), pick(1))
    }

    /// Horner evaluation.
    pub fn evaluate(&self, s: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * s + c)
    }

    pub fn evaluate_real(&self, s: f64) -> C64 {
        self.evaluate(C64::new(s, 0.0))
    }

    /// Multiply by `s`.
    pub fn shift(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(C64::new(0.0, 0.0));
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&x| x * c).collect())
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: C64, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        Self::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + c * other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }
}

impl From<Vec<C64>> for ComplexPolynomial {
    fn from(coeffs: Vec<C64>) -> Self {
        Self::new(coeffs)
    }
}

impl From<ComplexPolynomial> for Vec<C64> {
    fn from(p: ComplexPolynomial) -> Self {
        p.coeffs
    }
}

impl Add for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn add(self, rhs: Self) -> ComplexPolynomial {
        self.axpy(C64::new(1.0, 0.0), rhs)
    }
}

impl Sub for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn sub(self, rhs: Self) -> ComplexPolynomial {
        self.axpy(C64::new(-1.0, 0.0), rhs)
    }
}

impl Neg for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn neg(self) -> ComplexPolynomial {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for &ComplexPolynomial {
    type Output = ComplexPolynomial;
    fn mul(self, rhs: Self) -> ComplexPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return ComplexPolynomial::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        ComplexPolynomial::new(out)
    }
}

/// Chebyshev polynomial of the first kind, `T_0 = 1`, `T_1 = x`.
pub fn chebyshev_t(n: usize, x: f64) -> f64 {
    chebyshev(n, x, 1.0, x)
}

/// Chebyshev polynomial of the second kind, `U_0 = 1`, `U_1 = 2x`.
pub fn chebyshev_u(n: usize, x: f64) -> f64 {
    chebyshev(n, x, 1.0, 2.0 * x)
}

fn chebyshev(n: usize, x: f64, first: f64, second: f64) -> f64 {
    if n == 0 {
        return first;
    }
    let (mut prev, mut cur) = (first, second);
    for _ in 1..n {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}
