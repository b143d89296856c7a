//! Oracle suites run by the `selftest` command: each production path is
//! compared against a closed form or a brute-force reference.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::angular::{coupling_coefficient, CouplingTable, OrbitalLabel};
use crate::bspline::{make_knots, BSplineBasis, GridSpec};
use crate::ci::{
    assemble_hamiltonian, build_config_list, diagonalize, slater_integral, CIState, SlaterIntegralTable,
    SlaterQuadrature, Spin, StateLabel, DEFAULT_MEMORY_BUDGET,
};
use crate::entanglement::{linear_entropy, state_spectrum};
use crate::error::Result;
use crate::oracle::{coupling_by_sublevels, hamiltonian_by_determinants, sublevel_rdm_eigenvalues};
use crate::orbitals::RadialOrbitalSet;

/// Outcome of one suite: the worst deviation seen against its tolerance.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub worst: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:<32} worst {:.3e} (tol {:.0e}, {} cases){}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.worst,
            self.tolerance,
            self.cases,
            if self.detail.is_empty() { String::new() } else { format!("  {}", self.detail) }
        )
    }
}

struct Tally {
    name: &'static str,
    tolerance: f64,
    worst: f64,
    cases: usize,
    detail: String,
}

impl Tally {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Tally {
            name,
            tolerance,
            worst: 0.0,
            cases: 0,
            detail: String::new(),
        }
    }

    fn add(&mut self, err: f64, what: impl FnOnce() -> String) {
        self.cases += 1;
        // NaN counts as a failure.
        if !(err <= self.worst) {
            self.worst = if err.is_nan() { f64::INFINITY } else { err };
            self.detail = what();
        }
    }

    fn finish(self) -> Check {
        let passed = self.worst <= self.tolerance && self.cases > 0;
        Check {
            name: self.name,
            worst: self.worst,
            tolerance: self.tolerance,
            cases: self.cases,
            passed,
            detail: if passed { String::new() } else { self.detail },
        }
    }

    fn failed(name: &'static str, tolerance: f64, e: crate::Error) -> Check {
        Check {
            name,
            worst: f64::INFINITY,
            tolerance,
            cases: 0,
            passed: false,
            detail: e.to_string(),
        }
    }
}

fn guard(name: &'static str, tolerance: f64, f: impl FnOnce(&mut Tally) -> Result<()>) -> Check {
    let mut t = Tally::new(name, tolerance);
    match f(&mut t) {
        Ok(()) => t.finish(),
        Err(e) => Tally::failed(name, tolerance, e),
    }
}

/// Hydrogenic levels `-Z^2/(2n^2)` for `n <= 10`, `l <= 3`, in a box of
/// radius `30 n^2 / Z` for the largest `n`.
pub fn hydrogenic_levels() -> Check {
    guard("hydrogenic levels", 1e-8, |t| {
        for z in [1.0, 2.0] {
            let r_max = 3000.0 / z;
            let knots = make_knots(r_max, 160, 8, GridSpec::Exponential { gamma: 9.0 })?;
            let basis = Arc::new(BSplineBasis::new(knots));
            let set = RadialOrbitalSet::build(basis, z, 3, 10)?;
            for l in 0..=3 {
                for o in set.orbitals(l) {
                    let exact = -z * z / (2.0 * (o.n * o.n) as f64);
                    t.add((o.energy - exact).abs(), || format!("Z={z} n={} l={l}: {}", o.n, o.energy));
                }
            }
        }
        Ok(())
    })
}

/// `R^0(1s 1s, 1s 1s) = 5Z/8`.
pub fn direct_integral() -> Check {
    guard("R0(1s1s,1s1s) = 5Z/8", 1e-8, |t| {
        let s = OrbitalLabel::new(1, 0);
        for z in [1.0, 2.0, 5.0] {
            let knots = make_knots(60.0 * 2.0 / z, 40, 7, GridSpec::default())?;
            let set = RadialOrbitalSet::build(Arc::new(BSplineBasis::new(knots)), z, 0, 2)?;
            let v = slater_integral(&set, 0, s, s, s, s)?;
            t.add((v - 5.0 * z / 8.0).abs(), || format!("Z={z}: {v}"));
        }
        Ok(())
    })
}

/// Closed-form coupling coefficients against explicit sums over magnetic
/// sublevels, for `(l l) 0 -> (l' l') 0` with `l, l' <= 4` and `k <= 8`.
pub fn coupling_coefficients() -> Check {
    guard("coupling vs sublevel sums", 1e-12, |t| {
        for l in 0..=4 {
            for lp in 0..=4 {
                for k in 0..=8 {
                    let closed = coupling_coefficient(l, l, lp, lp, 0, k)?;
                    let brute = coupling_by_sublevels(l, l, lp, lp, 0, 0, k);
                    t.add((closed - brute).abs(), || format!("l={l} l'={lp} k={k}: {closed} vs {brute}"));
                }
            }
        }
        Ok(())
    })
}

/// Small helium basis shared by the toy suites.
pub struct ToyBasis {
    pub integrals: SlaterIntegralTable,
    pub coupling: CouplingTable,
    pub l_max: u32,
    pub n_max: u32,
}

impl ToyBasis {
    pub fn helium() -> Result<Self> {
        let (l_max, n_max) = (2, 4);
        let knots = make_knots(20.0, 12, 6, GridSpec::default())?;
        let set = RadialOrbitalSet::build(Arc::new(BSplineBasis::new(knots)), 2.0, l_max, n_max)?;
        Ok(ToyBasis {
            integrals: SlaterIntegralTable::new(Arc::new(set), SlaterQuadrature::for_order(6))?,
            coupling: CouplingTable::new(l_max, 0)?,
            l_max,
            n_max,
        })
    }

    /// Every eigenstate of one spin, labelled by the spin's lowest target.
    pub fn states(&self, spin: Spin) -> Result<(crate::ci::ConfigList, Vec<CIState>)> {
        let configs = build_config_list(self.l_max, self.n_max, 0, spin)?;
        let h = assemble_hamiltonian(&configs, &self.integrals, &self.coupling, DEFAULT_MEMORY_BUDGET)?;
        let spec = diagonalize(h.as_ref())?;
        let label = match spin {
            Spin::Singlet => StateLabel::GROUND,
            Spin::Triplet => StateLabel::TRIPLET_1S2S,
        };
        let states = (0..spec.len())
            .map(|j| {
                let coefficients: Vec<f64> = (0..configs.len()).map(|i| spec.vectors[(i, j)]).collect();
                CIState {
                    label,
                    energy: spec.values[j],
                    root: j,
                    target_weight: 0.0,
                    dominant: configs.configs()[0],
                    dominant_weight: 0.0,
                    ambiguous: false,
                    coefficients,
                }
            })
            .collect();
        Ok((configs, states))
    }
}

/// Coupled-basis Hamiltonian against determinant Slater–Condon rules.
pub fn toy_hamiltonian(toy: &ToyBasis) -> Check {
    guard("toy Hamiltonian vs determinants", 1e-12, |t| {
        for spin in [Spin::Singlet, Spin::Triplet] {
            let configs = build_config_list(toy.l_max, toy.n_max, 0, spin)?;
            let fast = assemble_hamiltonian(&configs, &toy.integrals, &toy.coupling, DEFAULT_MEMORY_BUDGET)?;
            let slow = hamiltonian_by_determinants(&configs, &toy.integrals)?;
            for i in 0..configs.len() {
                for j in 0..configs.len() {
                    let d = (fast[(i, j)] - slow[(i, j)]).abs();
                    t.add(d, || format!("{spin} ({i},{j}): {} vs {}", fast[(i, j)], slow[(i, j)]));
                }
            }
        }
        Ok(())
    })
}

/// Block density-matrix spectrum, each value repeated `2l+1` times,
/// against the spectrum of the explicit `(n, l, m)` density matrix.
pub fn toy_density_matrix(toy: &ToyBasis) -> Check {
    guard("block vs sublevel RDM", 1e-12, |t| {
        for spin in [Spin::Singlet, Spin::Triplet] {
            let (configs, states) = toy.states(spin)?;
            for st in states.iter().take(4) {
                let spec = state_spectrum(st, &configs)?;
                let mut block: Vec<f64> = spec
                    .entries()
                    .iter()
                    .flat_map(|e| std::iter::repeat(e.lambda).take(e.g as usize))
                    .collect();
                block.sort_by(|a, b| b.total_cmp(a));
                let full = sublevel_rdm_eigenvalues(st, &configs)?;
                if full.len() != block.len() {
                    t.add(f64::INFINITY, || format!("{} vs {} eigenvalues", full.len(), block.len()));
                    continue;
                }
                for (a, b) in full.iter().zip(&block) {
                    t.add((a - b).abs(), || format!("{spin} root {}: {a} vs {b}", st.root));
                }
            }
        }
        Ok(())
    })
}

/// Triplet occupations pair up within each `l` block and `S_L >= 1/2`.
pub fn triplet_pairing(toy: &ToyBasis) -> Check {
    guard("triplet pairing, S_L >= 1/2", 1e-12, |t| {
        let (configs, states) = toy.states(Spin::Triplet)?;
        for st in &states {
            let spec = state_spectrum(st, &configs)?;
            for l in 0..=toy.l_max {
                let mut vals: Vec<f64> = spec.entries().iter().filter(|e| e.l == l).map(|e| e.lambda).collect();
                vals.sort_by(|a, b| b.total_cmp(a));
                for pair in vals.chunks(2) {
                    let d = if pair.len() == 2 { (pair[0] - pair[1]).abs() } else { pair[0].abs() };
                    t.add(d, || format!("root {} l={l}: {pair:?}", st.root));
                }
            }
            let sl = linear_entropy(&spec);
            t.add((0.5 - sl).max(0.0), || format!("root {}: S_L = {sl}", st.root));
        }
        Ok(())
    })
}

/// `Σ g λ = 1` on every eigenstate of the toy basis.
pub fn occupation_sums(toy: &ToyBasis) -> Check {
    guard("sum of g*lambda = 1", 1e-10, |t| {
        for spin in [Spin::Singlet, Spin::Triplet] {
            let (configs, states) = toy.states(spin)?;
            for st in &states {
                let total = state_spectrum(st, &configs)?.total();
                t.add((total - 1.0).abs(), || format!("{spin} root {}: {total}", st.root));
            }
        }
        Ok(())
    })
}

/// Runs every suite.
pub fn run_all() -> Vec<Check> {
    let mut checks = vec![hydrogenic_levels(), direct_integral(), coupling_coefficients()];
    match ToyBasis::helium() {
        Ok(toy) => {
            checks.push(toy_hamiltonian(&toy));
            checks.push(toy_density_matrix(&toy));
            checks.push(triplet_pairing(&toy));
            checks.push(occupation_sums(&toy));
        }
        Err(e) => checks.push(Tally::failed("toy basis", 0.0, e)),
    }
    checks
}
