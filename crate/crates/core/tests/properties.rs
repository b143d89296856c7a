use std::sync::Arc;

use proptest::prelude::*;

use bspci::angular::wigner_3j;
use bspci::bspline::{make_knots, BSplineBasis, GridSpec};
use bspci::ci::{build_config_list, config_count, CIState, Spin, StateLabel};
use bspci::entanglement::{
    coefficient_blocks, linear_entropy, reduced_density_matrix, state_spectrum, von_neumann_entropy, Occupation,
    RdmSpectrum,
};
use bspci::orbitals::{interior_overlap, radial_hamiltonian, RadialOrbitalSet};
use bspci::quadrature::gauss_legendre;

fn grid() -> impl Strategy<Value = GridSpec> {
    prop_oneof![
        Just(GridSpec::Linear),
        (1.0f64..10.0).prop_map(|gamma| GridSpec::Exponential { gamma }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn splines_sum_to_one_and_vanish_off_support(
        order in 4usize..=10,
        extra in 1usize..30,
        r_max in 1.0f64..500.0,
        g in grid(),
        xs in prop::collection::vec(0.0f64..1.0, 1..20),
    ) {
        let basis = BSplineBasis::new(make_knots(r_max, order + extra, order, g).unwrap());
        let t = basis.knots().points();
        for x in xs {
            let r = x * r_max;
            let mut sum = 0.0;
            for i in 0..basis.n_splines() {
                let b = basis.eval(i, r).unwrap();
                sum += b;
                if r < t[i] || r > t[i + order] {
                    prop_assert_eq!(b, 0.0);
                }
            }
            prop_assert!((sum - 1.0).abs() < 1e-13, "sum {sum} at r = {r}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_monomials(p in 1usize..=16, offset in 0.0f64..4.0, width in 0.01f64..50.0) {
        // intervals sit at most a few widths from the origin, as breakpoint
        // intervals do; farther out the closed form itself cancels badly
        let a = offset * width;
        let b = a + width;
        let (x, w) = gauss_legendre(p);
        for m in 0..2 * p as i32 {
            let exact = (b.powi(m + 1) - a.powi(m + 1)) / (m + 1) as f64;
            let approx: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| 0.5 * width * wi * (0.5 * (a + b) + 0.5 * width * xi).powi(m))
                .sum();
            prop_assert!((approx - exact).abs() <= 1e-13 * exact.abs(), "m = {m}: {approx} vs {exact}");
        }
    }

    #[test]
    fn three_j_symmetries(j1 in 0i32..=8, j2 in 0i32..=8, j3 in 0i32..=8, m1 in -8i32..=8, m2 in -8i32..=8) {
        // arguments are doubled; keep integer j with |m| <= j
        let (tj1, tj2, tj3) = (2 * j1, 2 * j2, 2 * j3);
        let (tm1, tm2) = (2 * m1.clamp(-j1, j1), 2 * m2.clamp(-j2, j2));
        let tm3 = -tm1 - tm2;
        prop_assume!(tm3.abs() <= tj3);
        let v = wigner_3j(tj1, tj2, tj3, tm1, tm2, tm3).unwrap();
        let phase = if (j1 + j2 + j3) % 2 == 0 { 1.0 } else { -1.0 };
        let cyclic = wigner_3j(tj2, tj3, tj1, tm2, tm3, tm1).unwrap();
        let swapped = wigner_3j(tj2, tj1, tj3, tm2, tm1, tm3).unwrap();
        let flipped = wigner_3j(tj1, tj2, tj3, -tm1, -tm2, -tm3).unwrap();
        prop_assert!((v - cyclic).abs() < 1e-14);
        prop_assert!((v - phase * swapped).abs() < 1e-14);
        prop_assert!((v - phase * flipped).abs() < 1e-14);
    }

    #[test]
    fn config_counts_follow_closed_form(l_max in 0u32..=7, n_max in 1u32..=40) {
        prop_assume!(n_max > l_max);
        for spin in [Spin::Singlet, Spin::Triplet] {
            let expected: usize = (0..=l_max)
                .map(|l| {
                    let m = (n_max - l) as usize;
                    match spin {
                        Spin::Singlet => m * (m + 1) / 2,
                        Spin::Triplet => m * (m - 1) / 2,
                    }
                })
                .sum();
            prop_assert_eq!(config_count(l_max, n_max, spin), expected);
            prop_assert_eq!(build_config_list(l_max, n_max, 0, spin).unwrap().len(), expected);
        }
    }

    #[test]
    fn random_states_give_valid_density_matrices(
        triplet in any::<bool>(),
        raw in prop::collection::vec(-1.0f64..1.0, 40),
    ) {
        let spin = if triplet { Spin::Triplet } else { Spin::Singlet };
        let list = build_config_list(2, 5, 0, spin).unwrap();
        let v: Vec<f64> = raw.iter().cycle().take(list.len()).copied().collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let state = CIState {
            label: if triplet { StateLabel::TRIPLET_1S2S } else { StateLabel::GROUND },
            energy: 0.0,
            coefficients: v.iter().map(|x| x / norm).collect(),
            root: 0,
            target_weight: 0.0,
            dominant: list.configs()[0],
            dominant_weight: 0.0,
            ambiguous: false,
        };
        let rdm = reduced_density_matrix(&coefficient_blocks(&state, &list).unwrap()).unwrap();
        for b in rdm.blocks() {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    prop_assert_eq!(b[(i, j)], b[(j, i)]);
                }
            }
        }
        prop_assert!((rdm.trace() - 1.0).abs() < 1e-10);
        let spec = state_spectrum(&state, &list).unwrap();
        prop_assert!(spec.entries().iter().all(|e| e.lambda >= 0.0));
        prop_assert!((spec.total() - 1.0).abs() < 1e-10);
        let (sl, svn) = (linear_entropy(&spec), von_neumann_entropy(&spec));
        prop_assert!((0.0..1.0).contains(&sl));
        prop_assert!(svn >= 0.0);
        if triplet {
            prop_assert!(sl >= 0.5 - 1e-12, "triplet S_L = {sl}");
        }
    }

    #[test]
    fn entropies_ignore_spectrum_order(weights in prop::collection::vec(0.0f64..1.0, 1..12), seed in any::<u64>()) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-6);
        let mut entries: Vec<Occupation> = weights
            .iter()
            .enumerate()
            .map(|(i, w)| Occupation { l: (i % 3) as u32, lambda: w / total / (2 * (i % 3) + 1) as f64, g: (2 * (i % 3) + 1) as u32 })
            .collect();
        let a = RdmSpectrum::new(entries.clone()).unwrap();
        let k = (seed % entries.len() as u64) as usize;
        entries.rotate_left(k);
        entries.reverse();
        let b = RdmSpectrum::new(entries).unwrap();
        prop_assert!((linear_entropy(&a) - linear_entropy(&b)).abs() < 1e-14);
        prop_assert!((von_neumann_entropy(&a) - von_neumann_entropy(&b)).abs() < 1e-13);
        prop_assert_eq!(von_neumann_entropy(&a) < 1e-12, linear_entropy(&a) < 1e-12);
    }

    #[test]
    fn state_labels_round_trip(n in 1u32..=3, triplet in any::<bool>()) {
        let spin = if triplet { Spin::Triplet } else { Spin::Singlet };
        prop_assume!(!(n == 1 && triplet));
        let label = StateLabel::new(n, spin).unwrap();
        prop_assert_eq!(label.to_string().parse::<StateLabel>().unwrap(), label);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn orbitals_solve_the_generalized_problem(z in 1.0f64..5.0, l in 0u32..=3) {
        let basis = Arc::new(BSplineBasis::new(make_knots(80.0 / z, 40, 7, GridSpec::default()).unwrap()));
        let set = RadialOrbitalSet::build(basis.clone(), z, l, l + 8).unwrap();
        let h = radial_hamiltonian(&basis, z, l);
        let s = interior_overlap(&basis);
        let m = h.nrows();
        let orbs = set.orbitals(l);
        let inner = |c: &[f64]| -> Vec<f64> { c[1..=m].to_vec() };
        for (a, oa) in orbs.iter().enumerate() {
            let ca = inner(&oa.coeffs);
            let mut res = 0.0f64;
            let mut hc_norm = 0.0f64;
            for i in 0..m {
                let hc: f64 = (0..m).map(|j| h[(i, j)] * ca[j]).sum();
                let sc: f64 = (0..m).map(|j| s[(i, j)] * ca[j]).sum();
                res += (hc - oa.energy * sc).powi(2);
                hc_norm += hc * hc;
            }
            prop_assert!(res.sqrt() <= 1e-10 * hc_norm.sqrt(), "residual {} for n = {}", res.sqrt(), oa.n);
            for ob in &orbs[a..] {
                let cb = inner(&ob.coeffs);
                let ov: f64 = (0..m).map(|i| (0..m).map(|j| ca[i] * s[(i, j)] * cb[j]).sum::<f64>()).sum();
                let want = if oa.n == ob.n { 1.0 } else { 0.0 };
                prop_assert!((ov - want).abs() < 1e-12, "<{}|{}> = {ov}", oa.n, ob.n);
            }
        }
        let again = RadialOrbitalSet::build(basis, z, l, l + 8).unwrap();
        prop_assert_eq!(again.orbitals(l), orbs);
    }
}
