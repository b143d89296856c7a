//! Brute-force references built from explicit magnetic sublevels.
//!
//! Nothing here is used by the production pipeline; these routines exist
//! to cross-check the coupled-basis shortcuts (coupling coefficients,
//! assembled Hamiltonians, block density matrices) on small bases.

use std::collections::HashMap;

use faer::Mat;

use crate::angular::{csf_expand, three_j, CsfTerm, OrbitalLabel};
use crate::ci::{CIState, ConfigList, Configuration, SlaterIntegralTable, Spin};
use crate::error::{Error, Result};
use crate::linalg::symmetric_eigenvalues;

fn phase(n: i32) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `<l m | C^k_q | l' m'>`.
pub fn gaunt(l: i32, m: i32, k: i32, q: i32, lp: i32, mp: i32) -> f64 {
    phase(m) * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * three_j(l, k, lp, 0, 0, 0) * three_j(l, k, lp, -m, q, mp)
}

/// `<l1 m1 l2 m2 | L M>`.
fn clebsch_gordan(l1: i32, m1: i32, l2: i32, m2: i32, big_l: i32, big_m: i32) -> f64 {
    phase(l1 - l2 + big_m) * ((2 * big_l + 1) as f64).sqrt() * three_j(l1, l2, big_l, m1, m2, -big_m)
}

/// `<(l1 l2) L M | C^k(1)·C^k(2) | (l3 l4) L M>` summed over all sublevels.
pub fn coupling_by_sublevels(l1: u32, l2: u32, l3: u32, l4: u32, big_l: u32, big_m: i32, k: u32) -> f64 {
    let (l1, l2, l3, l4, big_l, k) = (l1 as i32, l2 as i32, l3 as i32, l4 as i32, big_l as i32, k as i32);
    let mut sum = 0.0;
    for m1 in -l1..=l1 {
        let m2 = big_m - m1;
        if m2.abs() > l2 {
            continue;
        }
        let bra = clebsch_gordan(l1, m1, l2, m2, big_l, big_m);
        if bra == 0.0 {
            continue;
        }
        for m3 in -l3..=l3 {
            let m4 = big_m - m3;
            if m4.abs() > l4 {
                continue;
            }
            let ket = clebsch_gordan(l3, m3, l4, m4, big_l, big_m);
            if ket == 0.0 {
                continue;
            }
            let q = m1 - m3;
            if q.abs() > k {
                continue;
            }
            sum += bra * ket * phase(q) * gaunt(l1, m1, k, q, l3, m3) * gaunt(l2, m2, k, -q, l4, m4);
        }
    }
    sum
}

/// Spin orbital `(n l m ms)`, spin doubled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct SpinOrbital {
    orb: OrbitalLabel,
    m: i32,
    ms: i32,
}

fn determinants(c: &Configuration, spin: Spin) -> Result<Vec<(SpinOrbital, SpinOrbital, f64)>> {
    let terms = csf_expand(c.a, c.b, 0, 0, spin.quantum_number(), 0)?;
    Ok(terms
        .into_iter()
        .map(|CsfTerm { m1, m2, ms1, ms2, coefficient }| {
            (
                SpinOrbital { orb: c.a, m: m1, ms: ms1 },
                SpinOrbital { orb: c.b, m: m2, ms: ms2 },
                coefficient,
            )
        })
        .collect())
}

/// `<αβ|1/r12|γδ>` for product spin orbitals.
fn repulsion(t: &SlaterIntegralTable, a: SpinOrbital, b: SpinOrbital, c: SpinOrbital, d: SpinOrbital) -> Result<f64> {
    if a.ms != c.ms || b.ms != d.ms {
        return Ok(0.0);
    }
    let q = a.m - c.m;
    if d.m - b.m != q {
        return Ok(0.0);
    }
    let (la, lb, lc, ld) = (a.orb.l as i32, b.orb.l as i32, c.orb.l as i32, d.orb.l as i32);
    let k_min = (la - lc).abs().max((lb - ld).abs()).max(q.abs());
    let k_max = (la + lc).min(lb + ld);
    let mut sum = 0.0;
    for k in k_min..=k_max {
        let ang = phase(q) * gaunt(la, a.m, k, q, lc, c.m) * gaunt(lb, b.m, k, -q, ld, d.m);
        if ang != 0.0 {
            sum += ang * t.get(k as u32, a.orb, b.orb, c.orb, d.orb)?;
        }
    }
    Ok(sum)
}

fn one_body(t: &SlaterIntegralTable, x: SpinOrbital, y: SpinOrbital) -> Result<f64> {
    if x != y {
        return Ok(0.0);
    }
    Ok(t.orbitals().get(x.orb.n, x.orb.l)?.energy)
}

/// `<αβ|H|γδ>` on product states.
fn product_element(t: &SlaterIntegralTable, a: SpinOrbital, b: SpinOrbital, c: SpinOrbital, d: SpinOrbital) -> Result<f64> {
    let mut h = repulsion(t, a, b, c, d)?;
    if b == d {
        h += one_body(t, a, c)?;
    }
    if a == c {
        h += one_body(t, b, d)?;
    }
    Ok(h)
}

/// Hamiltonian over `configs` from determinant expansions with
/// Slater–Condon rules and explicit Gaunt coefficients.
pub fn hamiltonian_by_determinants(configs: &ConfigList, integrals: &SlaterIntegralTable) -> Result<Mat<f64>> {
    let spin = configs.spin();
    let dets: Vec<_> = configs.iter().map(|c| determinants(c, spin)).collect::<Result<_>>()?;
    let n = configs.len();
    let mut h = Mat::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut v = 0.0;
            for &(a, b, ci) in &dets[i] {
                for &(c, d, cj) in &dets[j] {
                    let e = product_element(integrals, a, b, c, d)? - product_element(integrals, a, b, d, c)?;
                    v += ci * cj * e;
                }
            }
            h[(i, j)] = v;
        }
    }
    Ok(h)
}

/// Coordinate density matrix of `state` over explicit `(n, l, m)`
/// orbitals, traced over both spins and electron 2. Returns its
/// eigenvalues in descending order.
pub fn sublevel_rdm_eigenvalues(state: &CIState, configs: &ConfigList) -> Result<Vec<f64>> {
    if state.coefficients.len() != configs.len() {
        return Err(Error::InconsistentInputs("state and configuration list differ".into()));
    }
    let spin = configs.spin();
    let mut index: HashMap<SpinOrbital, usize> = HashMap::new();
    let mut spatial: HashMap<(OrbitalLabel, i32), usize> = HashMap::new();
    for l in 0..=configs.l_max() {
        for n in l + 1..=configs.n_max() {
            for m in -(l as i32)..=l as i32 {
                let orb = OrbitalLabel::new(n, l);
                let s = spatial.len();
                spatial.insert((orb, m), s);
                for ms in [1, -1] {
                    let k = index.len();
                    index.insert(SpinOrbital { orb, m, ms }, k);
                }
            }
        }
    }
    let dim = index.len();
    let mut psi = Mat::<f64>::zeros(dim, dim);
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    for (c, &x) in configs.iter().zip(&state.coefficients) {
        for (a, b, w) in determinants(c, spin)? {
            let (i, j) = (index[&a], index[&b]);
            psi[(i, j)] += x * w * inv;
            psi[(j, i)] -= x * w * inv;
        }
    }
    let ns = spatial.len();
    let mut rho = Mat::<f64>::zeros(ns, ns);
    for (a, &ia) in &index {
        for (b, &ib) in &index {
            if a.ms != b.ms {
                continue;
            }
            let (sa, sb) = (spatial[&(a.orb, a.m)], spatial[&(b.orb, b.m)]);
            let v: f64 = (0..dim).map(|k| psi[(ia, k)] * psi[(ib, k)]).sum();
            rho[(sa, sb)] += v;
        }
    }
    let mut values = symmetric_eigenvalues(rho.as_ref())?;
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}
