//! Knot sequences and B-spline basis functions on [0, R].
//!
//! Splines are indexed from 0. The first `k` knots sit at the origin and the
//! last `k` at the box radius, so `B_0(0) = 1` and `B_{N-1}(R) = 1`; those two
//! functions are the ones dropped to impose vanishing boundary values on
//! radial orbitals.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadratureGrid;

/// Largest spline order supported by the fixed-size evaluation buffers.
pub const MAX_ORDER: usize = 16;

/// Distribution of the interior knots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum GridSpec {
    /// Uniformly spaced interior knots.
    Linear,
    /// `t = R (exp(gamma x) - 1) / (exp(gamma) - 1)` for uniform `x` in (0, 1).
    Exponential { gamma: f64 },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Exponential { gamma: 6.0 }
    }
}

impl GridSpec {
    fn map(&self, x: f64, r_max: f64) -> f64 {
        match *self {
            GridSpec::Linear => r_max * x,
            GridSpec::Exponential { gamma } => r_max * (gamma * x).exp_m1() / gamma.exp_m1(),
        }
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GridSpec::Linear => write!(f, "linear"),
            GridSpec::Exponential { gamma } => write!(f, "exp:{gamma}"),
        }
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "linear" {
            return Ok(GridSpec::Linear);
        }
        if s == "exp" || s == "exponential" {
            return Ok(GridSpec::default());
        }
        if let Some(g) = s.strip_prefix("exp:").or_else(|| s.strip_prefix("exponential:")) {
            let gamma: f64 = g
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad exponential grid parameter `{g}`")))?;
            if !(gamma.is_finite() && gamma > 0.0) {
                return Err(Error::InvalidParameter(format!("grid gamma must be > 0, got {gamma}")));
            }
            return Ok(GridSpec::Exponential { gamma });
        }
        Err(Error::InvalidParameter(format!(
            "unknown grid `{s}` (expected linear, exp or exp:<gamma>)"
        )))
    }
}

/// Non-decreasing knots `t_0 ..= t_{N+k-1}` with k-fold endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct KnotSequence {
    points: Vec<f64>,
    order: usize,
    n_splines: usize,
}

impl KnotSequence {
    /// Validates an explicit knot vector.
    pub fn new(points: Vec<f64>, order: usize) -> Result<Self> {
        if order == 0 || order > MAX_ORDER {
            return Err(Error::InvalidParameter(format!(
                "spline order must be in 1..={MAX_ORDER}, got {order}"
            )));
        }
        if points.len() <= 2 * order {
            return Err(Error::InvalidParameter(format!(
                "{} knots cannot carry order-{order} splines with interior knots",
                points.len()
            )));
        }
        let n_splines = points.len() - order;
        let r_max = points[points.len() - 1];
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(Error::InvalidParameter(format!("box radius must be > 0, got {r_max}")));
        }
        if points[..order].iter().any(|&t| t != 0.0) || points[n_splines..].iter().any(|&t| t != r_max) {
            return Err(Error::InvalidParameter(
                "first and last `order` knots must equal 0 and R".into(),
            ));
        }
        let interior = &points[order - 1..=n_splines];
        if interior.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter("interior knots must be strictly increasing".into()));
        }
        Ok(KnotSequence {
            points,
            order,
            n_splines,
        })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_splines(&self) -> usize {
        self.n_splines
    }

    pub fn r_max(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    /// Distinct knot values, ascending.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.points[self.order - 1..=self.n_splines].to_vec()
    }
}

/// Builds the knot sequence for `n_splines` splines of the given order on [0, r_max].
pub fn make_knots(r_max: f64, n_splines: usize, order: usize, grid: GridSpec) -> Result<KnotSequence> {
    if !(r_max > 0.0 && r_max.is_finite()) {
        return Err(Error::InvalidParameter(format!("r_max must be > 0, got {r_max}")));
    }
    if order == 0 || order > MAX_ORDER {
        return Err(Error::InvalidParameter(format!(
            "spline order must be in 1..={MAX_ORDER}, got {order}"
        )));
    }
    if n_splines <= order {
        return Err(Error::InvalidParameter(format!(
            "n_splines ({n_splines}) must exceed the order ({order})"
        )));
    }
    let n_intervals = n_splines - order + 1;
    let mut points = Vec::with_capacity(n_splines + order);
    points.extend(std::iter::repeat(0.0).take(order));
    for j in 1..n_intervals {
        points.push(grid.map(j as f64 / n_intervals as f64, r_max));
    }
    points.extend(std::iter::repeat(r_max).take(order));
    KnotSequence::new(points, order)
}

/// Values (and optionally first derivatives) of the `k` splines that can be
/// nonzero at one radius; entry `j` belongs to spline `first + j`.
#[derive(Debug, Clone, Copy)]
pub struct LocalValues {
    pub first: usize,
    pub values: [f64; MAX_ORDER],
    pub derivs: [f64; MAX_ORDER],
}

/// Spline values and derivatives tabulated on a quadrature grid.
#[derive(Debug, Clone)]
pub struct SplineTable {
    order: usize,
    first: Vec<usize>,
    values: Vec<f64>,
    derivs: Vec<f64>,
}

impl SplineTable {
    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// Index of the first possibly-nonzero spline at point `q`.
    pub fn first(&self, q: usize) -> usize {
        self.first[q]
    }

    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.order..(q + 1) * self.order]
    }

    pub fn derivs(&self, q: usize) -> &[f64] {
        &self.derivs[q * self.order..(q + 1) * self.order]
    }

    /// `Σ_i c_i B_i` at every tabulated point.
    pub fn combine(&self, coeffs: &[f64]) -> Vec<f64> {
        (0..self.len())
            .map(|q| {
                let f = self.first[q];
                self.values(q)
                    .iter()
                    .enumerate()
                    .map(|(j, b)| b * coeffs[f + j])
                    .sum()
            })
            .collect()
    }
}

/// A B-spline basis with its cached breakpoints and Gauss–Legendre grid.
#[derive(Debug, Clone)]
pub struct BSplineBasis {
    knots: KnotSequence,
    breakpoints: Vec<f64>,
    quadrature: QuadratureGrid,
    table: SplineTable,
}

impl BSplineBasis {
    /// Basis with the default `k + 1` quadrature points per interval.
    pub fn new(knots: KnotSequence) -> Self {
        let p = knots.order() + 1;
        Self::with_quadrature(knots, p).expect("k + 1 points is always a valid rule")
    }

    pub fn with_quadrature(knots: KnotSequence, points_per_interval: usize) -> Result<Self> {
        if points_per_interval < knots.order() {
            return Err(Error::InvalidParameter(format!(
                "need at least {} quadrature points per interval, got {points_per_interval}",
                knots.order()
            )));
        }
        let breakpoints = knots.breakpoints();
        let quadrature = QuadratureGrid::on_breakpoints(&breakpoints, points_per_interval);
        let mut basis = BSplineBasis {
            knots,
            breakpoints,
            quadrature,
            table: SplineTable {
                order: 0,
                first: Vec::new(),
                values: Vec::new(),
                derivs: Vec::new(),
            },
        };
        basis.table = basis.tabulate(basis.quadrature.abscissae());
        Ok(basis)
    }

    pub fn knots(&self) -> &KnotSequence {
        &self.knots
    }

    pub fn order(&self) -> usize {
        self.knots.order()
    }

    pub fn n_splines(&self) -> usize {
        self.knots.n_splines()
    }

    pub fn r_max(&self) -> f64 {
        self.knots.r_max()
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn quadrature(&self) -> &QuadratureGrid {
        &self.quadrature
    }

    /// Spline values on the basis' own quadrature grid.
    pub fn table(&self) -> &SplineTable {
        &self.table
    }

    /// Knot index `mu` with `t_mu <= r < t_{mu+1}`; the last nonempty
    /// interval is closed on the right so that `r = R` is covered.
    fn span(&self, r: f64) -> usize {
        let t = self.knots.points();
        let k = self.order();
        let n = self.n_splines();
        if r >= t[n] {
            return n - 1;
        }
        // Largest mu in [k-1, n-1] with t[mu] <= r.
        let (mut lo, mut hi) = (k - 1, n);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if t[mid] <= r {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    fn check_radius(&self, r: f64) -> Result<()> {
        if !(r >= 0.0 && r <= self.r_max()) {
            return Err(Error::InvalidParameter(format!(
                "radius {r} outside [0, {}]",
                self.r_max()
            )));
        }
        Ok(())
    }

    /// Cox–de Boor triangle for the `k` splines nonzero at `r`, with derivatives.
    pub fn local(&self, r: f64) -> LocalValues {
        let t = self.knots.points();
        let k = self.order();
        let mu = self.span(r);
        let mut n = [0.0; MAX_ORDER];
        let mut left = [0.0; MAX_ORDER];
        let mut right = [0.0; MAX_ORDER];
        let mut lower = [0.0; MAX_ORDER];
        n[0] = 1.0;
        for j in 1..k {
            if j == k - 1 {
                lower[..k - 1].copy_from_slice(&n[..k - 1]);
            }
            left[j] = r - t[mu + 1 - j];
            right[j] = t[mu + j] - r;
            let mut saved = 0.0;
            for s in 0..j {
                let temp = n[s] / (right[s + 1] + left[j - s]);
                n[s] = saved + right[s + 1] * temp;
                saved = left[j - s] * temp;
            }
            n[j] = saved;
        }
        let first = mu + 1 - k;
        let mut derivs = [0.0; MAX_ORDER];
        if k > 1 {
            // B'_{i,k} = (k-1) [B_{i,k-1}/(t_{i+k-1}-t_i) - B_{i+1,k-1}/(t_{i+k}-t_{i+1})];
            // `lower[j]` holds the order k-1 spline with index first + 1 + j.
            let km1 = (k - 1) as f64;
            for (j, d) in derivs.iter_mut().enumerate().take(k) {
                let i = first + j;
                let mut v = 0.0;
                if j >= 1 {
                    let den = t[i + k - 1] - t[i];
                    if den > 0.0 {
                        v += lower[j - 1] / den;
                    }
                }
                if j < k - 1 {
                    let den = t[i + k] - t[i + 1];
                    if den > 0.0 {
                        v -= lower[j] / den;
                    }
                }
                *d = km1 * v;
            }
        }
        LocalValues {
            first,
            values: n,
            derivs,
        }
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n_splines() {
            return Err(Error::IndexOutOfRange {
                index: i,
                valid: format!("0..{}", self.n_splines()),
            });
        }
        Ok(())
    }

    /// `B_i(r)`.
    pub fn eval(&self, i: usize, r: f64) -> Result<f64> {
        self.check_index(i)?;
        self.check_radius(r)?;
        let loc = self.local(r);
        Ok(if i >= loc.first && i < loc.first + self.order() {
            loc.values[i - loc.first]
        } else {
            0.0
        })
    }

    /// `dB_i/dr` at `r`.
    pub fn eval_deriv(&self, i: usize, r: f64) -> Result<f64> {
        self.check_index(i)?;
        self.check_radius(r)?;
        let loc = self.local(r);
        Ok(if i >= loc.first && i < loc.first + self.order() {
            loc.derivs[i - loc.first]
        } else {
            0.0
        })
    }

    /// Tabulates all locally nonzero splines at the given radii.
    pub fn tabulate(&self, radii: &[f64]) -> SplineTable {
        let k = self.order();
        let mut first = Vec::with_capacity(radii.len());
        let mut values = Vec::with_capacity(radii.len() * k);
        let mut derivs = Vec::with_capacity(radii.len() * k);
        for &r in radii {
            let loc = self.local(r);
            first.push(loc.first);
            values.extend_from_slice(&loc.values[..k]);
            derivs.extend_from_slice(&loc.derivs[..k]);
        }
        SplineTable {
            order: k,
            first,
            values,
            derivs,
        }
    }

    /// `∫ w(r) B_i(r) B_j(r) dr` (or with derivatives) over the full spline set.
    pub(crate) fn banded_integral(&self, integrand: impl Fn(f64, f64, f64, f64, f64) -> f64) -> Mat<f64> {
        let n = self.n_splines();
        let k = self.order();
        let grid = &self.quadrature;
        let table = &self.table;
        let mut m = Mat::<f64>::zeros(n, n);
        for q in 0..grid.len() {
            let r = grid.abscissae()[q];
            let w = grid.weights()[q];
            let f = table.first(q);
            let (v, d) = (table.values(q), table.derivs(q));
            for a in 0..k {
                for b in a..k {
                    m[(f + a, f + b)] += w * integrand(r, v[a], d[a], v[b], d[b]);
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                m[(i, j)] = m[(j, i)];
            }
        }
        m
    }

    /// `S_ij = ∫ B_i B_j dr` over all `N` splines.
    pub fn overlap_matrix(&self) -> Mat<f64> {
        self.banded_integral(|_, bi, _, bj, _| bi * bj)
    }
}

/// `B_i(r)` for 0-based spline index `i`.
pub fn eval_bspline(basis: &BSplineBasis, i: usize, r: f64) -> Result<f64> {
    basis.eval(i, r)
}

pub fn eval_bspline_deriv(basis: &BSplineBasis, i: usize, r: f64) -> Result<f64> {
    basis.eval_deriv(i, r)
}

pub fn overlap_matrix(basis: &BSplineBasis) -> Mat<f64> {
    basis.overlap_matrix()
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Literal recursive Cox–de Boor with zero-denominator terms dropped.
    fn cox_de_boor(t: &[f64], i: usize, k: usize, r: f64, n: usize) -> f64 {
        if k == 1 {
            let r_max = t[t.len() - 1];
            // The last nonempty interval is closed on the right.
            if t[i] <= r && (r < t[i + 1] || (r == r_max && t[i + 1] == r_max && t[i] < r_max && i + 1 == n)) {
                return 1.0;
            }
            return 0.0;
        }
        let mut v = 0.0;
        let d1 = t[i + k - 1] - t[i];
        if d1 > 0.0 {
            v += (r - t[i]) / d1 * cox_de_boor(t, i, k - 1, r, n);
        }
        let d2 = t[i + k] - t[i + 1];
        if d2 > 0.0 {
            v += (t[i + k] - r) / d2 * cox_de_boor(t, i + 1, k - 1, r, n);
        }
        v
    }

    fn basis(r: f64, n: usize, k: usize, grid: GridSpec) -> BSplineBasis {
        BSplineBasis::new(make_knots(r, n, k, grid).unwrap())
    }

    #[test]
    fn linear_knots_example() {
        let kn = make_knots(1.0, 5, 2, GridSpec::Linear).unwrap();
        assert_eq!(kn.points(), &[0.0, 0.0, 0.25, 0.5, 0.75, 1.0, 1.0]);
    }

    #[test]
    fn exponential_knots_have_forced_multiplicities() {
        let kn = make_knots(100.0, 42, 7, GridSpec::default()).unwrap();
        assert_eq!(kn.points().len(), 49);
        assert!(kn.points()[..7].iter().all(|&t| t == 0.0));
        assert!(kn.points()[42..].iter().all(|&t| t == 100.0));
        assert!(kn.points()[6..=42].windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn too_few_splines_or_bad_radius_rejected() {
        assert!(matches!(
            make_knots(100.0, 4, 7, GridSpec::Linear),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_knots(100.0, 7, 7, GridSpec::Linear),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_knots(0.0, 20, 7, GridSpec::Linear),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            make_knots(-3.0, 20, 7, GridSpec::Linear),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn grid_spec_parses() {
        assert_eq!("linear".parse::<GridSpec>().unwrap(), GridSpec::Linear);
        assert_eq!("exp".parse::<GridSpec>().unwrap(), GridSpec::default());
        assert_eq!(
            "exp:4.5".parse::<GridSpec>().unwrap(),
            GridSpec::Exponential { gamma: 4.5 }
        );
        assert!("exp:-1".parse::<GridSpec>().is_err());
        assert!("cubic".parse::<GridSpec>().is_err());
    }

    #[test]
    fn order_one_splines_are_interval_indicators() {
        let kn = KnotSequence::new(vec![0.0, 1.0, 2.0, 3.0], 1).unwrap();
        let b = BSplineBasis::new(kn);
        assert_eq!(b.eval(0, 0.0).unwrap(), 1.0);
        assert_eq!(b.eval(0, 0.999).unwrap(), 1.0);
        assert_eq!(b.eval(0, 1.0).unwrap(), 0.0);
        assert_eq!(b.eval(1, 1.0).unwrap(), 1.0);
        assert_eq!(b.eval(2, 3.0).unwrap(), 1.0);
    }

    #[test]
    fn triangle_scheme_matches_literal_recursion() {
        for (grid, k) in [(GridSpec::Linear, 4), (GridSpec::default(), 7), (GridSpec::Exponential { gamma: 3.0 }, 5)] {
            let b = basis(20.0, 18, k, grid);
            let t = b.knots().points().to_vec();
            for s in 0..=200 {
                let r = 20.0 * s as f64 / 200.0;
                for i in 0..b.n_splines() {
                    let want = cox_de_boor(&t, i, k, r, b.n_splines());
                    let got = b.eval(i, r).unwrap();
                    assert!((want - got).abs() < 1e-14, "i={i} r={r}: {want} vs {got}");
                }
            }
        }
    }

    #[test]
    fn partition_of_unity_and_endpoints() {
        let b = basis(60.0, 40, 7, GridSpec::default());
        for s in 1..1000 {
            let r = 60.0 * (s as f64 / 1000.0).powi(3);
            let sum: f64 = (0..40).map(|i| b.eval(i, r).unwrap()).sum();
            assert!((sum - 1.0).abs() < 1e-13);
            let dsum: f64 = (0..40).map(|i| b.eval_deriv(i, r).unwrap()).sum();
            assert!(dsum.abs() < 1e-9 * (1.0 + 1.0 / r), "r={r} dsum={dsum}");
        }
        assert!((b.eval(0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((b.eval(39, 60.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn local_support_is_exact() {
        let b = basis(10.0, 20, 5, GridSpec::default());
        let t = b.knots().points().to_vec();
        for i in 0..20 {
            for s in 0..=500 {
                let r = 10.0 * s as f64 / 500.0;
                if r < t[i] || r > t[i + 5] {
                    assert_eq!(b.eval(i, r).unwrap(), 0.0);
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let b = basis(30.0, 30, 7, GridSpec::default());
        let mut count = 0;
        for s in 1..=50 {
            let r = 30.0 * (s as f64 / 51.0).powi(2);
            let h = 1e-4 * r;
            for i in 0..30 {
                let d = b.eval_deriv(i, r).unwrap();
                let f = |x: f64| b.eval(i, x).unwrap();
                let fd = (8.0 * (f(r + h) - f(r - h)) - (f(r + 2.0 * h) - f(r - 2.0 * h))) / (12.0 * h);
                let scale = d.abs().max(1e-3);
                assert!(((d - fd) / scale).abs() < 1e-6, "i={i} r={r}: {d} vs {fd}");
                count += 1;
            }
        }
        assert_eq!(count, 1500);
    }

    #[test]
    fn linear_spline_derivatives_are_plus_minus_inverse_spacing() {
        let b = basis(1.0, 5, 2, GridSpec::Linear);
        assert!((b.eval_deriv(1, 0.1).unwrap() - 4.0).abs() < 1e-12);
        assert!((b.eval_deriv(1, 0.3).unwrap() + 4.0).abs() < 1e-12);
        assert_eq!(b.eval_deriv(3, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn bad_index_or_radius() {
        let b = basis(10.0, 12, 4, GridSpec::Linear);
        assert!(matches!(b.eval(12, 1.0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(b.eval_deriv(99, 1.0), Err(Error::IndexOutOfRange { .. })));
        assert!(b.eval(0, 10.5).is_err());
        assert!(b.eval(0, -0.1).is_err());
    }

    #[test]
    fn overlap_structure() {
        let b = basis(40.0, 30, 7, GridSpec::default());
        let s = b.overlap_matrix();
        for i in 0..30 {
            for j in 0..30 {
                assert_eq!(s[(i, j)], s[(j, i)]);
                if i.abs_diff(j) >= 7 {
                    assert_eq!(s[(i, j)], 0.0);
                }
            }
            // ∫ B_i = (t_{i+k} - t_i) / k.
            let t = b.knots().points();
            let row: f64 = (0..30).map(|j| s[(i, j)]).sum();
            let exact = (t[i + 7] - t[i]) / 7.0;
            assert!((row - exact).abs() < 1e-13 * 40.0);
        }
        assert!(s.llt(faer::Side::Lower).is_ok());
    }
}
