use faer::Mat;
use rayon::prelude::*;

use super::config::{ConfigList, Configuration, Spin};
use super::slater::SlaterIntegralTable;
use crate::angular::CouplingTable;
use crate::error::{Error, Result};

/// Default ceiling on the dense Hamiltonian's storage.
pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;

/// `<cfg_i | H | cfg_j>` for the spin-adapted, `L = 0` pair functions
/// `N (|ab> ± |ba>)`.
pub fn hamiltonian_element(
    ci: &Configuration,
    cj: &Configuration,
    spin: Spin,
    integrals: &SlaterIntegralTable,
    coupling: &CouplingTable,
) -> Result<f64> {
    for c in [ci, cj] {
        if c.a.l != c.b.l || c.a.l > coupling.l_max() {
            return Err(Error::UnsupportedSymmetry(format!("configuration {c} is not an L = 0 pair")));
        }
        if spin == Spin::Triplet && c.is_same_orbital() {
            return Err(Error::InvalidQuantumNumbers(format!("{c} cannot form a triplet")));
        }
    }
    let orbitals = integrals.orbitals();
    let mut h = 0.0;
    if ci == cj {
        h += orbitals.get(ci.a.n, ci.a.l)?.energy + orbitals.get(ci.b.n, ci.b.l)?.energy;
    }
    let eta = spin.exchange_sign();
    let (a, b, c, d) = (ci.a, ci.b, cj.a, cj.b);
    let mut v = 0.0;
    for t in coupling.get(a.l, c.l) {
        v += t.value * (integrals.get(t.k, a, b, c, d)? + eta * integrals.get(t.k, a, b, d, c)?);
    }
    Ok(h + 2.0 * ci.pair_norm() * cj.pair_norm() * v)
}

/// Dense symmetric Hamiltonian over `configs`, built block by block in
/// `(l, l')` with each element written once and mirrored.
pub fn assemble_hamiltonian(
    configs: &ConfigList,
    integrals: &SlaterIntegralTable,
    coupling: &CouplingTable,
    memory_budget: u64,
) -> Result<Mat<f64>> {
    let dim = configs.len();
    let required = (dim as u64).saturating_mul(dim as u64).saturating_mul(8);
    if required > memory_budget {
        return Err(Error::MemoryBudgetExceeded {
            dim,
            required_bytes: required,
            budget_bytes: memory_budget,
        });
    }
    let l_max = configs.l_max();
    if coupling.l_max() < l_max || coupling.big_l() != configs.big_l() {
        return Err(Error::InconsistentInputs("coupling table does not cover the configuration list".into()));
    }
    let orbitals = integrals.orbitals();
    if orbitals.l_max() < l_max || orbitals.n_max() < configs.n_max() {
        return Err(Error::InconsistentInputs(format!(
            "orbital set (l_max={}, n_max={}) smaller than configuration list (l_max={l_max}, n_max={})",
            orbitals.l_max(),
            orbitals.n_max(),
            configs.n_max()
        )));
    }

    let n_max = configs.n_max();
    let spin = configs.spin();
    let eta = spin.exchange_sign();
    let pairs: Vec<(u32, u32)> = (0..=l_max).flat_map(|l| (l..=l_max).map(move |lp| (l, lp))).collect();
    let blocks = pairs
        .par_iter()
        .map(|&(l, lp)| {
            let terms: Vec<(u32, f64)> = coupling.get(l, lp).iter().map(|t| (t.k, t.value)).collect();
            let (n_l, n_lp) = ((n_max - l) as usize, (n_max - lp) as usize);
            let u = integrals.orbital_grid().coupled_block(l, lp, n_l, n_lp, &terms)?;
            let rows = configs.block(l);
            let cols = configs.block(lp);
            let mut out = Mat::<f64>::zeros(rows.len(), cols.len());
            let idx = |o: crate::angular::OrbitalLabel| (o.n - o.l - 1) as usize;
            for (r, ci) in configs.configs()[rows.clone()].iter().enumerate() {
                let (a, b) = (idx(ci.a), idx(ci.b));
                let c0 = if l == lp { r } else { 0 };
                for (s, cj) in configs.configs()[cols.clone()].iter().enumerate().skip(c0) {
                    let (c, d) = (idx(cj.a), idx(cj.b));
                    let direct = u[(a * n_lp + c, b * n_lp + d)];
                    let exchange = u[(a * n_lp + d, b * n_lp + c)];
                    out[(r, s)] = 2.0 * ci.pair_norm() * cj.pair_norm() * (direct + eta * exchange);
                }
            }
            Ok(((l, lp), out))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut h = Mat::<f64>::zeros(dim, dim);
    for ((l, lp), block) in blocks {
        let (r0, c0) = (configs.block(l).start, configs.block(lp).start);
        for r in 0..block.nrows() {
            let s0 = if l == lp { r } else { 0 };
            for s in s0..block.ncols() {
                let v = block[(r, s)];
                h[(r0 + r, c0 + s)] = v;
                h[(c0 + s, r0 + r)] = v;
            }
        }
    }
    for (i, c) in configs.iter().enumerate() {
        h[(i, i)] += orbitals.get(c.a.n, c.a.l)?.energy + orbitals.get(c.b.n, c.b.l)?.energy;
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::angular::OrbitalLabel;
    use crate::bspline::{make_knots, BSplineBasis, GridSpec};
    use crate::ci::config::build_config_list;
    use crate::ci::slater::SlaterQuadrature;
    use crate::orbitals::RadialOrbitalSet;

    fn table(z: f64, l_max: u32, n_max: u32) -> SlaterIntegralTable {
        let basis = BSplineBasis::new(make_knots(60.0, 50, 7, GridSpec::default()).unwrap());
        let set = RadialOrbitalSet::build(Arc::new(basis), z, l_max, n_max).unwrap();
        SlaterIntegralTable::new(Arc::new(set), SlaterQuadrature::for_order(7)).unwrap()
    }

    #[test]
    fn single_configuration_1s2_estimate() {
        let t = table(2.0, 0, 2);
        let coupling = CouplingTable::new(0, 0).unwrap();
        let c = Configuration::new(OrbitalLabel::new(1, 0), OrbitalLabel::new(1, 0));
        let h = hamiltonian_element(&c, &c, Spin::Singlet, &t, &coupling).unwrap();
        assert!((h + 2.75).abs() < 1e-8, "{h}");
    }

    #[test]
    fn smallest_triplet_matrix_is_1x1() {
        let t = table(2.0, 0, 2);
        let coupling = CouplingTable::new(0, 0).unwrap();
        let list = build_config_list(0, 2, 0, Spin::Triplet).unwrap();
        let h = assemble_hamiltonian(&list, &t, &coupling, DEFAULT_MEMORY_BUDGET).unwrap();
        assert_eq!((h.nrows(), h.ncols()), (1, 1));
        // ε1s + ε2s + F0(1s,2s) - G0(1s,2s) for Z = 2.
        let want = -2.0 - 0.5 + 2.0 * (17.0 / 81.0 - 16.0 / 729.0);
        assert!((h[(0, 0)] - want).abs() < 1e-8);
    }

    #[test]
    fn assembled_matches_elementwise_and_is_symmetric() {
        let t = table(2.0, 2, 5);
        let coupling = CouplingTable::new(2, 0).unwrap();
        for spin in [Spin::Singlet, Spin::Triplet] {
            let list = build_config_list(2, 5, 0, spin).unwrap();
            let h = assemble_hamiltonian(&list, &t, &coupling, DEFAULT_MEMORY_BUDGET).unwrap();
            for i in 0..list.len() {
                for j in 0..list.len() {
                    assert_eq!(h[(i, j)], h[(j, i)]);
                    let e = hamiltonian_element(&list.configs()[i], &list.configs()[j], spin, &t, &coupling).unwrap();
                    assert!((h[(i, j)] - e).abs() < 1e-12, "{i},{j}: {} vs {e}", h[(i, j)]);
                }
            }
            let p_block = list.block(1);
            let s_block = list.block(0);
            assert!(h[(s_block.start, p_block.start)].abs() > 1e-6);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let t = table(2.0, 0, 4);
        let coupling = CouplingTable::new(0, 0).unwrap();
        let list = build_config_list(0, 4, 0, Spin::Singlet).unwrap();
        match assemble_hamiltonian(&list, &t, &coupling, 100) {
            Err(Error::MemoryBudgetExceeded { dim, required_bytes, .. }) => {
                assert_eq!(dim, 10);
                assert_eq!(required_bytes, 800);
            }
            other => panic!("{other:?}"),
        }
    }
}
