//! Banded complex linear systems: LU with partial pivoting.

use crate::error::{Error, Result};
use crate::C64;

/// Square matrix with `lower` sub- and `upper` super-diagonals. Storage keeps
/// `lower` extra super-diagonals for pivoting fill-in.
#[derive(Clone, Debug)]
pub struct BandedMatrix {
    n: usize,
    lower: usize,
    upper: usize,
    data: Vec<C64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, data: vec![C64::new(0.0, 0.0); n * (2 * lower + upper + 1)] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn width(&self) -> usize {
        2 * self.lower + self.upper + 1
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        debug_assert!(j + self.lower >= i && j <= i + self.upper + self.lower);
        i * self.width() + (j + self.lower - i)
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        j + self.lower >= i && j <= i + self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        if self.in_band(i, j) {
            self.data[self.slot(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    }

    /// Panics outside the declared band.
    pub fn set(&mut self, i: usize, j: usize, value: C64) {
        assert!(i < self.n && j < self.n && self.in_band(i, j), "({i}, {j}) outside band");
        let k = self.slot(i, j);
        self.data[k] = value;
    }

    /// Solve `A x = rhs`.
    pub fn solve(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        let n = self.n;
        if rhs.len() != n {
            return Err(Error::DimensionMismatch { expected: n, got: rhs.len() });
        }
        let mut a = self.clone();
        let mut x = rhs.to_vec();
        let reach = self.upper + self.lower;
        let scale = self.data.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for k in 0..n {
            let last_row = (k + self.lower).min(n - 1);
            let pivot = (k..=last_row)
                .max_by(|&i, &j| a.data[a.slot(i, k)].norm().total_cmp(&a.data[a.slot(j, k)].norm()))
                .unwrap_or(k);
            let last_col = (k + reach).min(n - 1);
            if pivot != k {
                for j in k..=last_col {
                    let (p, q) = (a.slot(k, j), a.slot(pivot, j));
                    a.data.swap(p, q);
                }
                x.swap(k, pivot);
            }
            let diag = a.data[a.slot(k, k)];
            if diag.norm() <= f64::EPSILON * scale {
                return Err(Error::Singular { row: k });
            }
            for i in k + 1..=last_row {
                let factor = a.data[a.slot(i, k)] / diag;
                if factor == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in k..=last_col {
                    let v = a.data[a.slot(k, j)];
                    let s = a.slot(i, j);
                    a.data[s] -= factor * v;
                }
                let xk = x[k];
                x[i] -= factor * xk;
            }
        }
        for k in (0..n).rev() {
            let last_col = (k + reach).min(n - 1);
            let mut acc = x[k];
            for j in k + 1..=last_col {
                acc -= a.data[a.slot(k, j)] * x[j];
            }
            x[k] = acc / a.data[a.slot(k, k)];
        }
        Ok(x)
    }
}
