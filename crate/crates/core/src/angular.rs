//! Wigner 3-j / 6-j symbols and the angular factors of two-electron
//! matrix elements of `1/r12`.
//!
//! Quantum numbers that may be half-integral are passed doubled (`tj = 2j`).
//! Racah sums are evaluated in exact rational arithmetic and rounded to `f64`
//! once, so large-`l` symbols do not suffer from cancellation.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[cfg(test)]
fn factorial(n: i64) -> BigInt {
    debug_assert!(n >= 0);
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// Factorials `0! ..= max!` as exact integers.
struct Factorials(Vec<BigInt>);

impl Factorials {
    fn up_to(max: i64) -> Self {
        let mut v = Vec::with_capacity(max as usize + 1);
        let mut f = BigInt::one();
        v.push(f.clone());
        for i in 1..=max {
            f *= i;
            v.push(f.clone());
        }
        Factorials(v)
    }

    fn get(&self, n: i64) -> &BigInt {
        &self.0[n as usize]
    }
}

fn parity_sign(n: i64) -> i64 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Checks the triangle rule on doubled momenta, including integrality of the sum.
fn triangle(ta: i64, tb: i64, tc: i64) -> bool {
    ta >= 0 && tb >= 0 && tc >= 0 && tc <= ta + tb && tc >= (ta - tb).abs() && (ta + tb + tc) % 2 == 0
}

/// `sign * sqrt(radicand) * sum` rounded once to f64.
fn sqrt_times(radicand: &BigRational, sum: &BigRational) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let sq = radicand * sum * sum;
    let mag = sq.to_f64().expect("finite rational").sqrt();
    if sum.is_negative() {
        -mag
    } else {
        mag
    }
}

fn check_jm(tj: i64, tm: i64) -> Result<()> {
    if tj < 0 {
        return Err(Error::InvalidQuantumNumbers(format!("negative j = {}/2", tj)));
    }
    if (tj - tm).rem_euclid(2) != 0 {
        return Err(Error::InvalidQuantumNumbers(format!(
            "j = {tj}/2 and m = {tm}/2 differ in integrality"
        )));
    }
    if tm.abs() > tj {
        return Err(Error::InvalidQuantumNumbers(format!("|m| = {}/2 exceeds j = {tj}/2", tm.abs())));
    }
    Ok(())
}

type Key3j = [i32; 6];
type Key6j = [i32; 6];

fn cache_3j() -> &'static RwLock<HashMap<Key3j, f64>> {
    static C: OnceLock<RwLock<HashMap<Key3j, f64>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

fn cache_6j() -> &'static RwLock<HashMap<Key6j, f64>> {
    static C: OnceLock<RwLock<HashMap<Key6j, f64>>> = OnceLock::new();
    C.get_or_init(Default::default)
}

/// Wigner 3-j symbol `(j1 j2 j3; m1 m2 m3)` with all arguments doubled.
pub fn wigner_3j(tj1: i32, tj2: i32, tj3: i32, tm1: i32, tm2: i32, tm3: i32) -> Result<f64> {
    let (a, b, c) = (tj1 as i64, tj2 as i64, tj3 as i64);
    let (x, y, z) = (tm1 as i64, tm2 as i64, tm3 as i64);
    check_jm(a, x)?;
    check_jm(b, y)?;
    check_jm(c, z)?;
    if x + y + z != 0 || !triangle(a, b, c) {
        return Ok(0.0);
    }
    let key = [tj1, tj2, tj3, tm1, tm2, tm3];
    if let Some(&v) = cache_3j().read().expect("3j cache poisoned").get(&key) {
        return Ok(v);
    }
    let v = racah_3j(a, b, c, x, y, z);
    cache_3j().write().expect("3j cache poisoned").insert(key, v);
    Ok(v)
}

fn racah_3j(a: i64, b: i64, c: i64, x: i64, y: i64, z: i64) -> f64 {
    // Undoubled integer combinations; all are integers once the checks pass.
    let j1pj2mj3 = (a + b - c) / 2;
    let j1mj2pj3 = (a - b + c) / 2;
    let mj1pj2pj3 = (-a + b + c) / 2;
    let jsum1 = (a + b + c) / 2 + 1;
    let f = Factorials::up_to(jsum1.max(a).max(b).max(c) + 1);

    let radicand = BigRational::new(
        f.get(j1pj2mj3)
            * f.get(j1mj2pj3)
            * f.get(mj1pj2pj3)
            * f.get((a + x) / 2)
            * f.get((a - x) / 2)
            * f.get((b + y) / 2)
            * f.get((b - y) / 2)
            * f.get((c + z) / 2)
            * f.get((c - z) / 2),
        f.get(jsum1).clone(),
    );

    let d1 = (c - b + x) / 2; // j3 - j2 + m1
    let d2 = (c - a - y) / 2; // j3 - j1 - m2
    let d3 = j1pj2mj3;
    let d4 = (a - x) / 2; // j1 - m1
    let d5 = (b + y) / 2; // j2 + m2
    let t_min = 0.max(-d1).max(-d2);
    let t_max = d3.min(d4).min(d5);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = f.get(t) * f.get(d1 + t) * f.get(d2 + t) * f.get(d3 - t) * f.get(d4 - t) * f.get(d5 - t);
        let term = BigRational::new(BigInt::from(parity_sign(t)), den);
        sum += term;
    }
    // (-1)^(j1 - j2 - m3)
    let phase = parity_sign((a - b - z) / 2);
    phase as f64 * sqrt_times(&radicand, &sum)
}

/// Wigner 6-j symbol `{j1 j2 j3; j4 j5 j6}` with all arguments doubled.
pub fn wigner_6j(tj1: i32, tj2: i32, tj3: i32, tj4: i32, tj5: i32, tj6: i32) -> Result<f64> {
    let j = [tj1, tj2, tj3, tj4, tj5, tj6].map(|v| v as i64);
    if j.iter().any(|&v| v < 0) {
        return Err(Error::InvalidQuantumNumbers(format!("negative momentum in 6-j {j:?}")));
    }
    let triads = [(j[0], j[1], j[2]), (j[0], j[4], j[5]), (j[3], j[1], j[5]), (j[3], j[4], j[2])];
    if triads.iter().any(|&(p, q, r)| !triangle(p, q, r)) {
        return Ok(0.0);
    }
    let key = [tj1, tj2, tj3, tj4, tj5, tj6];
    if let Some(&v) = cache_6j().read().expect("6j cache poisoned").get(&key) {
        return Ok(v);
    }
    let v = racah_6j(&j);
    cache_6j().write().expect("6j cache poisoned").insert(key, v);
    Ok(v)
}

fn racah_6j(j: &[i64; 6]) -> f64 {
    let a1 = (j[0] + j[1] + j[2]) / 2;
    let a2 = (j[0] + j[4] + j[5]) / 2;
    let a3 = (j[3] + j[1] + j[5]) / 2;
    let a4 = (j[3] + j[4] + j[2]) / 2;
    let b1 = (j[0] + j[1] + j[3] + j[4]) / 2;
    let b2 = (j[1] + j[2] + j[4] + j[5]) / 2;
    let b3 = (j[2] + j[0] + j[5] + j[3]) / 2;
    let f = Factorials::up_to(b1.max(b2).max(b3) + 2);

    let delta = |p: i64, q: i64, r: i64| -> BigRational {
        BigRational::new(
            f.get((p + q - r) / 2) * f.get((p - q + r) / 2) * f.get((-p + q + r) / 2),
            f.get((p + q + r) / 2 + 1).clone(),
        )
    };
    let radicand = delta(j[0], j[1], j[2]) * delta(j[0], j[4], j[5]) * delta(j[3], j[1], j[5]) * delta(j[3], j[4], j[2]);

    let t_min = a1.max(a2).max(a3).max(a4);
    let t_max = b1.min(b2).min(b3);
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let num = BigInt::from(parity_sign(t)) * f.get(t + 1);
        let den = f.get(t - a1)
            * f.get(t - a2)
            * f.get(t - a3)
            * f.get(t - a4)
            * f.get(b1 - t)
            * f.get(b2 - t)
            * f.get(b3 - t);
        sum += BigRational::new(num, den);
    }
    sqrt_times(&radicand, &sum)
}

/// 3-j symbol for integer momenta.
pub fn three_j(l1: i32, l2: i32, l3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    wigner_3j(2 * l1, 2 * l2, 2 * l3, 2 * m1, 2 * m2, 2 * m3).unwrap_or(0.0)
}

/// 6-j symbol for integer momenta.
pub fn six_j(j1: i32, j2: i32, j3: i32, j4: i32, j5: i32, j6: i32) -> f64 {
    wigner_6j(2 * j1, 2 * j2, 2 * j3, 2 * j4, 2 * j5, 2 * j6).unwrap_or(0.0)
}

/// Reduced matrix element `<l || C^k || l'> = (-1)^l sqrt((2l+1)(2l'+1)) (l k l'; 0 0 0)`.
pub fn reduced_ck(l: i32, k: i32, lp: i32) -> f64 {
    parity_sign(l as i64) as f64 * (((2 * l + 1) * (2 * lp + 1)) as f64).sqrt() * three_j(l, k, lp, 0, 0, 0)
}

/// Multipole rank `k` with its angular factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngularCoefficient {
    pub k: u32,
    pub value: f64,
}

/// Angular factor of the rank-`k` term of `1/r12` between coupled pairs:
/// `<(l1 l2) L | C^k(1)·C^k(2) | (l3 l4) L>`, electron 1 in `l1`/`l3`.
///
/// Multiplying by the radial integral `R^k(12, 34)` and summing over `k`
/// gives the full matrix element.
pub fn coupling_coefficient(l1: u32, l2: u32, l3: u32, l4: u32, big_l: u32, k: u32) -> Result<f64> {
    let (l1, l2, l3, l4, big_l, k) = (l1 as i32, l2 as i32, l3 as i32, l4 as i32, big_l as i32, k as i32);
    if !triangle(2 * l1 as i64, 2 * l2 as i64, 2 * big_l as i64) {
        return Err(Error::InvalidCoupling(format!("({l1} {l2}) cannot couple to L={big_l}")));
    }
    if !triangle(2 * l3 as i64, 2 * l4 as i64, 2 * big_l as i64) {
        return Err(Error::InvalidCoupling(format!("({l3} {l4}) cannot couple to L={big_l}")));
    }
    if (l1 + l3 + k) % 2 != 0 || (l2 + l4 + k) % 2 != 0 {
        return Ok(0.0);
    }
    let phase = parity_sign((l2 + l3 + big_l) as i64) as f64;
    Ok(phase * reduced_ck(l1, k, l3) * reduced_ck(l2, k, l4) * six_j(l1, l2, big_l, l4, l3, k))
}

/// Nonzero coefficients of every multipole allowed between the two pairs.
pub fn coupling_coefficients(l1: u32, l2: u32, l3: u32, l4: u32, big_l: u32) -> Result<Vec<AngularCoefficient>> {
    let k_min = l1.abs_diff(l3).max(l2.abs_diff(l4));
    let k_max = (l1 + l3).min(l2 + l4);
    let mut out = Vec::new();
    for k in k_min..=k_max {
        let value = coupling_coefficient(l1, l2, l3, l4, big_l, k)?;
        if value != 0.0 {
            out.push(AngularCoefficient { k, value });
        }
    }
    Ok(out)
}

/// Read-only table of L = 0 coupling coefficients for `l, l' <= l_max`,
/// filled once and then shared between threads.
#[derive(Debug, Clone)]
pub struct CouplingTable {
    l_max: u32,
    big_l: u32,
    direct: Vec<Vec<AngularCoefficient>>,
}

impl CouplingTable {
    /// Table for pairs `(l l) -> (l' l')` coupled to `big_l` (0 for S states).
    pub fn new(l_max: u32, big_l: u32) -> Result<Self> {
        let n = (l_max + 1) as usize;
        let mut direct = Vec::with_capacity(n * n);
        for l in 0..=l_max {
            for lp in 0..=l_max {
                direct.push(coupling_coefficients(l, l, lp, lp, big_l)?);
            }
        }
        Ok(CouplingTable { l_max, big_l, direct })
    }

    pub fn l_max(&self) -> u32 {
        self.l_max
    }

    pub fn big_l(&self) -> u32 {
        self.big_l
    }

    /// Coefficients for `(l l) L -> (l' l') L`.
    pub fn get(&self, l: u32, lp: u32) -> &[AngularCoefficient] {
        let n = (self.l_max + 1) as usize;
        &self.direct[l as usize * n + lp as usize]
    }
}

/// One Slater determinant in a CSF expansion. Spins are doubled (`±1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsfTerm {
    pub m1: i32,
    pub m2: i32,
    pub ms1: i32,
    pub ms2: i32,
    pub coefficient: f64,
}

/// Orbital label `n l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrbitalLabel {
    pub n: u32,
    pub l: u32,
}

impl OrbitalLabel {
    pub fn new(n: u32, l: u32) -> Self {
        OrbitalLabel { n, l }
    }
}

/// Expands the coupled two-electron function of the pair `(a, b)` into
/// determinants `|a m1 ms1, b m2 ms2|`, using
/// `(-1)^(l_b - l_a) sqrt((2S+1)(2L+1)) (l_a l_b L; m1 m2 -M_L)(1/2 1/2 S; ms1 ms2 -M_S)`.
///
/// For a doubly occupied orbital the determinants `|x y|` and `|y x|` are the
/// same function up to sign; they are merged (canonical order `(m1, ms1) <
/// (m2, ms2)`) and the result carries an extra `1/sqrt 2` so it stays
/// normalized. Pauli-forbidden couplings return an empty list.
pub fn csf_expand(a: OrbitalLabel, b: OrbitalLabel, big_l: u32, m_l: i32, spin: u32, m_s: i32) -> Result<Vec<CsfTerm>> {
    let (la, lb, big_l_i) = (a.l as i32, b.l as i32, big_l as i32);
    if !triangle(2 * la as i64, 2 * lb as i64, 2 * big_l_i as i64) {
        return Err(Error::InvalidCoupling(format!("({la} {lb}) cannot couple to L={big_l}")));
    }
    if spin > 1 || m_s.abs() > spin as i32 || m_l.abs() > big_l_i {
        return Err(Error::InvalidCoupling(format!(
            "invalid S={spin}, M_S={m_s}, M_L={m_l} for L={big_l}"
        )));
    }
    let prefactor = parity_sign((lb - la) as i64) as f64 * (((2 * spin + 1) * (2 * big_l + 1)) as f64).sqrt();
    let same = a == b;
    let mut terms: Vec<CsfTerm> = Vec::new();
    for m1 in -la..=la {
        let m2 = m_l - m1;
        if m2.abs() > lb {
            continue;
        }
        let orb = three_j(la, lb, big_l_i, m1, m2, -m_l);
        if orb == 0.0 {
            continue;
        }
        for ms1 in [1, -1] {
            let ms2 = 2 * m_s - ms1;
            if ms2.abs() != 1 {
                continue;
            }
            let sp = wigner_3j(1, 1, 2 * spin as i32, ms1, ms2, -2 * m_s)?;
            let c = prefactor * orb * sp;
            if c == 0.0 {
                continue;
            }
            if !same {
                terms.push(CsfTerm { m1, m2, ms1, ms2, coefficient: c });
                continue;
            }
            if (m1, ms1) == (m2, ms2) {
                continue;
            }
            let (t, sign) = if (m1, ms1) < (m2, ms2) {
                ((m1, m2, ms1, ms2), 1.0)
            } else {
                ((m2, m1, ms2, ms1), -1.0)
            };
            match terms
                .iter_mut()
                .find(|x| (x.m1, x.m2, x.ms1, x.ms2) == t)
            {
                Some(x) => x.coefficient += sign * c,
                None => terms.push(CsfTerm {
                    m1: t.0,
                    m2: t.1,
                    ms1: t.2,
                    ms2: t.3,
                    coefficient: sign * c,
                }),
            }
        }
    }
    if same {
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        terms.retain(|t| t.coefficient.abs() > 1e-14);
        for t in &mut terms {
            t.coefficient *= inv;
        }
    }
    Ok(terms)
}
