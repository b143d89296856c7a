//! Radial Slater integrals
//! `R^k(ab, cd) = ∫∫ χa(r1) χb(r2) r<^k / r>^(k+1) χc(r1) χd(r2) dr1 dr2`.
//!
//! The inner integral is evaluated as a potential
//! `Y(r1) = r1^(-k-1) ∫_0^r1 r^k ρ + r1^k ∫_r1^R r^(-k-1) ρ` at every outer
//! quadrature point, from running sums over whole intervals plus a sub-rule
//! on the two pieces of the interval that contains `r1`.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, MatRef, Par};
use serde::{Deserialize, Serialize};

use crate::angular::OrbitalLabel;
use crate::bspline::BSplineBasis;
use crate::error::{Error, Result};
use crate::orbitals::RadialOrbitalSet;
use crate::quadrature::{gauss_legendre, QuadratureGrid};

/// Points per interval for the outer rule and for the split-interval sub-rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlaterQuadrature {
    pub outer: usize,
    pub inner: usize,
}

impl SlaterQuadrature {
    /// Default for splines of order `k`.
    pub fn for_order(k: usize) -> Self {
        SlaterQuadrature { outer: k + 5, inner: k + 5 }
    }
}

/// Outer abscissae plus, for each of them, sub-rules on `[t_i, r]` and
/// `[r, t_i+1]`.
#[derive(Debug, Clone)]
pub struct TwoElectronGrid {
    outer: QuadratureGrid,
    inner: usize,
    lower_r: Vec<f64>,
    lower_w: Vec<f64>,
    upper_r: Vec<f64>,
    upper_w: Vec<f64>,
}

impl TwoElectronGrid {
    pub fn new(breakpoints: &[f64], quad: SlaterQuadrature) -> Result<Self> {
        if quad.outer == 0 || quad.inner == 0 || breakpoints.len() < 2 {
            return Err(Error::InvalidParameter("empty two-electron quadrature".into()));
        }
        let outer = QuadratureGrid::on_breakpoints(breakpoints, quad.outer);
        let (xi, wi) = gauss_legendre(quad.inner);
        let n = outer.len() * quad.inner;
        let (mut lower_r, mut lower_w) = (Vec::with_capacity(n), Vec::with_capacity(n));
        let (mut upper_r, mut upper_w) = (Vec::with_capacity(n), Vec::with_capacity(n));
        for (q, &r) in outer.abscissae().iter().enumerate() {
            let (a, b) = outer.intervals()[q / quad.outer];
            map_rule(&xi, &wi, a, r, &mut lower_r, &mut lower_w);
            map_rule(&xi, &wi, r, b, &mut upper_r, &mut upper_w);
        }
        Ok(TwoElectronGrid {
            outer,
            inner: quad.inner,
            lower_r,
            lower_w,
            upper_r,
            upper_w,
        })
    }

    pub fn for_basis(basis: &BSplineBasis, quad: SlaterQuadrature) -> Result<Self> {
        Self::new(basis.breakpoints(), quad)
    }

    pub fn len(&self) -> usize {
        self.outer.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outer.is_empty()
    }

    pub fn outer(&self) -> &QuadratureGrid {
        &self.outer
    }

    fn rank_weights(&self, k: u32) -> RankWeights {
        let k = k as i32;
        let r = self.outer.abscissae();
        let w = self.outer.weights();
        let pos: Vec<f64> = r.iter().map(|x| x.powi(k)).collect();
        let neg: Vec<f64> = r.iter().map(|x| x.powi(-k - 1)).collect();
        RankWeights {
            pos_w: pos.iter().zip(w).map(|(a, b)| a * b).collect(),
            neg_w: neg.iter().zip(w).map(|(a, b)| a * b).collect(),
            pos,
            neg,
            lower_w: self.lower_r.iter().zip(&self.lower_w).map(|(x, w)| w * x.powi(k)).collect(),
            upper_w: self.upper_r.iter().zip(&self.upper_w).map(|(x, w)| w * x.powi(-k - 1)).collect(),
        }
    }

    /// `Y^k` of a pair density at every outer point.
    fn potential(&self, rank: &RankWeights, rho: &PairDensity, out: &mut [f64]) {
        let p = self.outer.points_per_interval();
        let ps = self.inner;
        let n_int = self.outer.intervals().len();
        let mut below = vec![0.0; n_int];
        let mut above = vec![0.0; n_int];
        let mut acc = 0.0;
        for (i, b) in below.iter_mut().enumerate() {
            *b = acc;
            acc += dot(&rank.pos_w[i * p..(i + 1) * p], &rho.outer[i * p..(i + 1) * p]);
        }
        acc = 0.0;
        for i in (0..n_int).rev() {
            above[i] = acc;
            acc += dot(&rank.neg_w[i * p..(i + 1) * p], &rho.outer[i * p..(i + 1) * p]);
        }
        for (q, y) in out.iter_mut().enumerate() {
            let i = q / p;
            let s = q * ps..(q + 1) * ps;
            let lo = dot(&rank.lower_w[s.clone()], &rho.lower[s.clone()]);
            let hi = dot(&rank.upper_w[s.clone()], &rho.upper[s]);
            *y = rank.neg[q] * (below[i] + lo) + rank.pos[q] * (above[i] + hi);
        }
    }
}

fn map_rule(xi: &[f64], wi: &[f64], a: f64, b: f64, r: &mut Vec<f64>, w: &mut Vec<f64>) {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    for (x, wt) in xi.iter().zip(wi) {
        r.push(mid + half * x);
        w.push(half * wt);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Clone)]
struct RankWeights {
    pos: Vec<f64>,
    neg: Vec<f64>,
    pos_w: Vec<f64>,
    neg_w: Vec<f64>,
    lower_w: Vec<f64>,
    upper_w: Vec<f64>,
}

#[derive(Debug, Clone, Default)]
struct Samples {
    outer: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

type PairDensity = Samples;

impl Samples {
    fn product_into(&self, other: &Samples, out: &mut Samples) {
        fn mul(a: &[f64], b: &[f64], o: &mut Vec<f64>) {
            o.clear();
            o.extend(a.iter().zip(b).map(|(x, y)| x * y));
        }
        mul(&self.outer, &other.outer, &mut out.outer);
        mul(&self.lower, &other.lower, &mut out.lower);
        mul(&self.upper, &other.upper, &mut out.upper);
    }
}

/// Orbital values tabulated on a [`TwoElectronGrid`], with per-rank weights.
#[derive(Debug)]
pub struct OrbitalGrid {
    grid: TwoElectronGrid,
    per_l: Vec<Vec<Samples>>,
    ranks: Vec<RankWeights>,
}

impl std::fmt::Debug for RankWeights {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RankWeights").field("points", &self.pos.len()).finish()
    }
}

impl OrbitalGrid {
    pub fn new(orbitals: &RadialOrbitalSet, quad: SlaterQuadrature) -> Result<Self> {
        let basis = orbitals.basis();
        let grid = TwoElectronGrid::for_basis(basis, quad)?;
        let outer = basis.tabulate(grid.outer.abscissae());
        let lower = basis.tabulate(&grid.lower_r);
        let upper = basis.tabulate(&grid.upper_r);
        let per_l = (0..=orbitals.l_max())
            .map(|l| {
                orbitals
                    .orbitals(l)
                    .iter()
                    .map(|o| Samples {
                        outer: outer.combine(&o.coeffs),
                        lower: lower.combine(&o.coeffs),
                        upper: upper.combine(&o.coeffs),
                    })
                    .collect()
            })
            .collect();
        let ranks = (0..=2 * orbitals.l_max()).map(|k| grid.rank_weights(k)).collect();
        Ok(OrbitalGrid { grid, per_l, ranks })
    }

    pub fn grid(&self) -> &TwoElectronGrid {
        &self.grid
    }

    fn samples(&self, o: OrbitalLabel) -> Result<&Samples> {
        self.per_l
            .get(o.l as usize)
            .and_then(|v| v.get((o.n.checked_sub(o.l + 1)?) as usize))
            .ok_or_else(|| Error::IndexOutOfRange {
                index: o.n as usize,
                valid: format!("orbital {o} is not in the set"),
            })
    }

    fn rank(&self, k: u32) -> std::borrow::Cow<'_, RankWeights> {
        match self.ranks.get(k as usize) {
            Some(r) => std::borrow::Cow::Borrowed(r),
            None => std::borrow::Cow::Owned(self.grid.rank_weights(k)),
        }
    }

    /// One integral, computed without caching.
    pub fn integral(&self, k: u32, a: OrbitalLabel, b: OrbitalLabel, c: OrbitalLabel, d: OrbitalLabel) -> Result<f64> {
        let (sa, sb, sc, sd) = (self.samples(a)?, self.samples(b)?, self.samples(c)?, self.samples(d)?);
        let mut rho = Samples::default();
        sb.product_into(sd, &mut rho);
        let mut y = vec![0.0; self.grid.len()];
        self.grid.potential(&self.rank(k), &rho, &mut y);
        let w = self.grid.outer.weights();
        Ok((0..y.len()).map(|q| w[q] * sa.outer[q] * sc.outer[q] * y[q]).sum())
    }

    /// Multipole-summed integrals between the orbital pairs of `l` and `lp`:
    /// entry `[(a, c), (b, d)]` (pair index `x * n_lp + y`, `x` in `l`, `y` in
    /// `lp`) is `Σ_k f_k R^k(ab, cd)` over the first `n_l` / `n_lp` orbitals.
    pub(crate) fn coupled_block(&self, l: u32, lp: u32, n_l: usize, n_lp: usize, terms: &[(u32, f64)]) -> Result<Mat<f64>> {
        let left = self.per_l.get(l as usize).map(|v| &v[..n_l.min(v.len())]);
        let right = self.per_l.get(lp as usize).map(|v| &v[..n_lp.min(v.len())]);
        let (left, right) = match (left, right) {
            (Some(a), Some(b)) if a.len() == n_l && b.len() == n_lp => (a, b),
            _ => {
                return Err(Error::InconsistentInputs(format!(
                    "orbital set lacks {n_l} l={l} or {n_lp} l={lp} orbitals"
                )))
            }
        };
        let q_len = self.grid.len();
        let pairs = n_l * n_lp;
        let w = self.grid.outer.weights();
        let mut rho = Samples::default();

        // Weighted pair densities, one column per pair.
        let mut dens = vec![0.0; q_len * pairs];
        for (x, sx) in left.iter().enumerate() {
            for (y, sy) in right.iter().enumerate() {
                let col = &mut dens[(x * n_lp + y) * q_len..][..q_len];
                for q in 0..q_len {
                    col[q] = w[q] * sx.outer[q] * sy.outer[q];
                }
            }
        }
        let dens = MatRef::from_column_major_slice(&dens, q_len, pairs);

        let mut u = Mat::<f64>::zeros(pairs, pairs);
        let mut pot = vec![0.0; q_len * pairs];
        for &(k, f) in terms {
            let rank = self.rank(k);
            for (x, sx) in left.iter().enumerate() {
                for (y, sy) in right.iter().enumerate() {
                    sx.product_into(sy, &mut rho);
                    let col = &mut pot[(x * n_lp + y) * q_len..][..q_len];
                    self.grid.potential(&rank, &rho, col);
                }
            }
            let pot = MatRef::from_column_major_slice(&pot, q_len, pairs);
            matmul(u.as_mut(), Accum::Add, dens.transpose(), pot, f, Par::Seq);
        }
        for i in 0..pairs {
            for j in 0..i {
                let s = 0.5 * (u[(i, j)] + u[(j, i)]);
                u[(i, j)] = s;
                u[(j, i)] = s;
            }
        }
        Ok(u)
    }
}

type Key = (u32, (OrbitalLabel, OrbitalLabel), (OrbitalLabel, OrbitalLabel));

/// Cached `R^k` values for one orbital set, keyed by a canonical quadruple
/// so that all symmetry-related integrals share one entry.
#[derive(Debug)]
pub struct SlaterIntegralTable {
    orbitals: Arc<RadialOrbitalSet>,
    grid: OrbitalGrid,
    cache: RwLock<HashMap<Key, f64>>,
}

fn sorted(x: OrbitalLabel, y: OrbitalLabel) -> (OrbitalLabel, OrbitalLabel) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

impl SlaterIntegralTable {
    pub fn new(orbitals: Arc<RadialOrbitalSet>, quad: SlaterQuadrature) -> Result<Self> {
        let grid = OrbitalGrid::new(&orbitals, quad)?;
        Ok(SlaterIntegralTable {
            orbitals,
            grid,
            cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn orbitals(&self) -> &Arc<RadialOrbitalSet> {
        &self.orbitals
    }

    pub fn orbital_grid(&self) -> &OrbitalGrid {
        &self.grid
    }

    /// Number of distinct integrals computed so far.
    pub fn cached(&self) -> usize {
        self.cache.read().map_or(0, |c| c.len())
    }

    /// `R^k(ab, cd)`; electron 1 in `a`/`c`, electron 2 in `b`/`d`.
    pub fn get(&self, k: u32, a: OrbitalLabel, b: OrbitalLabel, c: OrbitalLabel, d: OrbitalLabel) -> Result<f64> {
        let (p1, p2) = (sorted(a, c), sorted(b, d));
        let key = if p1 <= p2 { (k, p1, p2) } else { (k, p2, p1) };
        if let Some(v) = self.cache.read().ok().and_then(|c| c.get(&key).copied()) {
            return Ok(v);
        }
        let value = self.grid.integral(k, key.1 .0, key.2 .0, key.1 .1, key.2 .1)?;
        if let Ok(mut c) = self.cache.write() {
            c.entry(key).or_insert(value);
        }
        Ok(value)
    }
}

/// One `R^k(ab, cd)` with the default quadrature for the set's spline order.
pub fn slater_integral(
    orbitals: &RadialOrbitalSet,
    k: u32,
    a: OrbitalLabel,
    b: OrbitalLabel,
    c: OrbitalLabel,
    d: OrbitalLabel,
) -> Result<f64> {
    let quad = SlaterQuadrature::for_order(orbitals.basis().order());
    OrbitalGrid::new(orbitals, quad)?.integral(k, a, b, c, d)
}
