//! Gauss-Legendre rules.

use std::f64::consts::PI;

use crate::par::{self, Execution};

/// Nodes and weights of an interpolatory rule on some interval.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`, nodes ascending.
///
/// Roots come from Newton's method started at Tricomi's asymptotic guess.
pub fn gauss_legendre(n: usize, exec: Execution) -> Rule {
    assert!(n >= 1, "a quadrature rule needs at least one node");
    if n == 1 {
        return Rule { nodes: vec![0.0], weights: vec![2.0] };
    }
    let half = n.div_ceil(2);
    let nf = n as f64;
    let roots = par::map_indexed(exec, half, |i| {
        let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let step = p / dp;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        (x, 2.0 / ((1.0 - x * x) * dp * dp))
    });
    // `roots` run from the right end towards the middle.
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for (i, &(x, w)) in roots.iter().enumerate() {
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule { nodes, weights }
}

/// Gauss-Legendre mapped affinely to `[lo, hi]`.
pub fn gauss_legendre_on(n: usize, lo: f64, hi: f64, exec: Execution) -> Rule {
    let base = gauss_legendre(n, exec);
    let (mid, half) = ((hi + lo) / 2.0, (hi - lo) / 2.0);
    Rule {
        nodes: base.nodes.iter().map(|x| mid + half * x).collect(),
        weights: base.weights.iter().map(|w| half * w).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules_match_tables() {
        let r = gauss_legendre(2, Execution::Sequential);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes[0] + x).abs() < 1e-15 && (r.nodes[1] - x).abs() < 1e-15);
        assert!((r.weights[0] - 1.0).abs() < 1e-15);

        let r = gauss_legendre(3, Execution::Sequential);
        assert!((r.nodes[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert_eq!(r.nodes[1], 0.0);
        assert!((r.weights[1] - 8.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_polynomials() {
        for n in [5, 20, 101] {
            let r = gauss_legendre(n, Execution::Sequential);
            for k in 0..2 * n {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got = r.integrate(|x| x.powi(k as i32));
                assert!((got - exact).abs() < 1e-13, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn large_rule_is_consistent() {
        let r = gauss_legendre(4000, Execution::default());
        assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
        assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        let mapped = gauss_legendre_on(4000, 0.0, std::f64::consts::FRAC_PI_2, Execution::default());
        assert!((mapped.integrate(f64::cos) - 1.0).abs() < 1e-13);
    }
}
