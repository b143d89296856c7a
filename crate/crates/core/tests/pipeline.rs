use bspci::run::{run_convergence, run_solve, run_zscan, RunConfig};

fn config(pairs: &[(&str, &str)]) -> RunConfig {
    let mut cfg = RunConfig::default();
    for (k, v) in pairs {
        cfg.set(k, v).unwrap();
    }
    cfg
}

#[test]
fn s_wave_triplet_is_a_single_determinant() {
    let cfg = config(&[("state", "1s2s-3S"), ("lmax", "0"), ("nmax", "5"), ("rmax", "60")]);
    let r = run_solve(&cfg).unwrap().result;
    assert!((r.entropies.linear - 0.5).abs() < 1e-6, "{}", r.entropies.linear);
    assert!((r.entropies.von_neumann - 1.0).abs() < 1e-4, "{}", r.entropies.von_neumann);
}

#[test]
fn lithium_ion_excited_singlet() {
    let cfg = config(&[("z", "3"), ("state", "1s2s-1S"), ("lmax", "3"), ("nmax", "25")]);
    let r = run_solve(&cfg).unwrap().result;
    assert!((r.energy + 5.040859).abs() < 1e-4, "{}", r.energy);
    assert!(!r.ambiguous);
}

#[test]
fn ground_state_is_dominated_by_one_occupation() {
    let cfg = config(&[("lmax", "3"), ("nmax", "20"), ("rmax", "60")]);
    let rep = run_solve(&cfg).unwrap();
    let e = &rep.result.entropies;
    // λ1 has g = 1, so purity <= λ1 (Σ gλ = 1) and λ1² <= purity
    assert!(e.largest_occupation >= e.purity && e.largest_occupation <= e.purity.sqrt() + 1e-15);
    assert!(e.largest_occupation > 0.99, "{}", e.largest_occupation);
    assert_eq!(rep.result.root, 0);
    assert_eq!(rep.result.dominant, "1s^2");
}

#[test]
fn ground_state_convergence_grid() {
    let cfg = config(&[("lmax_values", "0,1,2,3,4,5"), ("nmax_values", "20,25"), ("rmax", "60")]);
    let table = run_convergence(&cfg).unwrap();
    assert_eq!(table.rows.len(), 12);
    for n in [20, 25] {
        for l in 0..5 {
            let (a, b) = (table.get(l, n).unwrap(), table.get(l + 1, n).unwrap());
            assert!(b.energy <= a.energy + 1e-12, "E(l={},n={n}) > E(l={l})", l + 1);
        }
    }
    for l in 0..=5 {
        let (a, b) = (table.get(l, 20).unwrap(), table.get(l, 25).unwrap());
        assert!(b.energy <= a.energy + 1e-12, "E(l={l},n=25) > E(n=20)");
    }
    // von Neumann entropy rises to a peak at l_max = 2, then falls slowly
    for n in [20, 25] {
        let s: Vec<f64> = (0..=5).map(|l| table.get(l, n).unwrap().s_von_neumann).collect();
        assert!(s[0] < s[1] && s[1] < s[2], "n_max={n}: {s:?}");
        assert!(s[2..].windows(2).all(|w| w[0] > w[1]), "n_max={n}: {s:?}");
        assert!(s[2] - s[5] < 2e-3, "n_max={n}: {s:?}");
    }
}

#[test]
fn triplet_convergence_grid_respects_purity_bound() {
    let cfg = config(&[
        ("state", "1s2s-3S"),
        ("lmax_values", "0,1,2,3"),
        ("nmax_values", "5,10,15"),
        ("rmax", "60"),
    ]);
    let table = run_convergence(&cfg).unwrap();
    assert_eq!(table.rows.len(), 12);
    for r in &table.rows {
        assert!(r.s_linear >= 0.5 - 1e-12, "l={} n={}: {}", r.l_max, r.n_max, r.s_linear);
    }
}

#[test]
fn scan_rows_are_ordered_and_traceable() {
    let cfg = config(&[
        ("zvalues", "3,2,2.5,2"),
        ("states", "1s2s-3S"),
        ("lmax", "1"),
        ("nmax", "8"),
    ]);
    let scan = run_zscan(&cfg).unwrap();
    assert_eq!(scan.failures(), 0);
    let zs: Vec<f64> = scan.rows.iter().map(|r| r.z).collect();
    assert_eq!(zs, vec![2.0, 2.5, 3.0]);
    for r in &scan.rows {
        assert_eq!((r.l_max, r.n_max, r.order), (1, 8, 7));
        assert_eq!(r.n_splines, 13);
        assert!((r.r_max - 120.0 / r.z).abs() < 1e-12);
        assert!(r.s_linear.unwrap() >= 0.5 - 1e-12);
        assert!(r.box_converged);
    }
}
