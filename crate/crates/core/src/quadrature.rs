//! Gauss–Legendre rules.

use std::f64::consts::PI;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on [-1, 1].
///
/// Nodes are returned in ascending order. Computed by Newton iteration on the
/// three-term Legendre recurrence, which converges to full double precision for
/// the rule sizes used here (n ≤ 64).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "a quadrature rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Quadrature points laid out interval by interval: interval `j` owns
/// points `j * p .. (j + 1) * p`.
#[derive(Debug, Clone)]
pub struct QuadratureGrid {
    points_per_interval: usize,
    intervals: Vec<(f64, f64)>,
    abscissae: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// Builds a `p`-point Gauss–Legendre rule on every interval between
    /// consecutive (distinct) breakpoints.
    pub fn on_breakpoints(breakpoints: &[f64], p: usize) -> Self {
        let (xi, wi) = gauss_legendre(p);
        let intervals: Vec<(f64, f64)> = breakpoints.windows(2).map(|w| (w[0], w[1])).collect();
        let mut abscissae = Vec::with_capacity(intervals.len() * p);
        let mut weights = Vec::with_capacity(intervals.len() * p);
        for &(a, b) in &intervals {
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (x, w) in xi.iter().zip(&wi) {
                abscissae.push(mid + half * x);
                weights.push(half * w);
            }
        }
        QuadratureGrid {
            points_per_interval: p,
            intervals,
            abscissae,
            weights,
        }
    }

    pub fn points_per_interval(&self) -> usize {
        self.points_per_interval
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.abscissae.len()
    }

    pub fn is_empty(&self) -> bool {
        self.abscissae.is_empty()
    }

    /// Integrates `f` over the whole grid.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.abscissae
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_rules_match_closed_forms() {
        let (x, w) = gauss_legendre(2);
        let r = 1.0 / 3f64.sqrt();
        assert!((x[0] + r).abs() < 1e-15 && (x[1] - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15 && (w[1] - 1.0).abs() < 1e-15);

        let (x, w) = gauss_legendre(3);
        assert!(x[1].abs() < 1e-16);
        assert!((x[2] - 0.6f64.sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((w[0] - 5.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_two_and_nodes_ascend() {
        for n in 1..40 {
            let (x, w) = gauss_legendre(n);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n} sum={s}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn monomials_integrate_exactly_up_to_degree_2p_minus_1() {
        let grid = QuadratureGrid::on_breakpoints(&[0.0, 0.3, 1.1, 2.5], 6);
        for m in 0..12 {
            let exact = 2.5f64.powi(m + 1) / (m + 1) as f64;
            let got = grid.integrate(|r| r.powi(m));
            assert!(((got - exact) / exact).abs() < 1e-13, "m={m}");
        }
    }
}
