//! Hydrogenic radial orbitals in the B-spline basis.
//!
//! Orbitals are reduced radial functions `χ_nl(r) = r R_nl(r)`, expanded over
//! the interior splines so that `χ(0) = χ(R) = 0`. All angular momenta share
//! one knot sequence.

use std::io::Write;
use std::sync::Arc;

use faer::Mat;

use crate::bspline::BSplineBasis;
use crate::error::{Error, Result};
use crate::linalg::generalized_symmetric_eigen;

/// One orbital: label, energy (hartree) and coefficients over all `N`
/// splines (the two boundary coefficients are zero).
#[derive(Debug, Clone, PartialEq)]
pub struct Orbital {
    pub n: u32,
    pub l: u32,
    pub energy: f64,
    pub coeffs: Vec<f64>,
}

/// Kinetic + centrifugal + nuclear matrix over the interior splines.
pub fn radial_hamiltonian(basis: &BSplineBasis, z: f64, l: u32) -> Mat<f64> {
    let cent = 0.5 * (l * (l + 1)) as f64;
    let full = basis.banded_integral(|r, bi, di, bj, dj| 0.5 * di * dj + (cent / (r * r) - z / r) * bi * bj);
    interior(&full)
}

/// Overlap matrix restricted to the interior splines.
pub fn interior_overlap(basis: &BSplineBasis) -> Mat<f64> {
    interior(&basis.overlap_matrix())
}

fn interior(full: &Mat<f64>) -> Mat<f64> {
    let n = full.nrows();
    full.as_ref().submatrix(1, 1, n - 2, n - 2).to_owned()
}

/// Lowest `n_max - l` eigenpairs of `H c = ε S c`, labeled `n = l+1 ..= n_max`.
///
/// `h` and `s` are interior-spline matrices; returned coefficient vectors are
/// padded with the two vanishing boundary coefficients.
pub fn solve_orbitals(h: &Mat<f64>, s: &Mat<f64>, n_max: u32, l: u32) -> Result<Vec<Orbital>> {
    if n_max <= l {
        return Err(Error::InvalidParameter(format!("n_max ({n_max}) must exceed l ({l})")));
    }
    let dim = h.nrows();
    let count = (n_max - l) as usize;
    if count > dim {
        return Err(Error::InvalidParameter(format!(
            "{count} orbitals requested for l={l} but the basis has only {dim} interior splines"
        )));
    }
    let eig = generalized_symmetric_eigen(h.as_ref(), s.as_ref())?;
    let mut out = Vec::with_capacity(count);
    for j in 0..count {
        let col = eig.vectors.col(j);
        let mut c: Vec<f64> = (0..dim).map(|i| col[i]).collect();
        let big = c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        // Positive near the origin: first non-negligible coefficient > 0.
        if let Some(first) = c.iter().find(|v| v.abs() > 1e-3 * big) {
            if *first < 0.0 {
                c.iter_mut().for_each(|v| *v = -*v);
            }
        }
        let mut coeffs = Vec::with_capacity(dim + 2);
        coeffs.push(0.0);
        coeffs.extend(c);
        coeffs.push(0.0);
        out.push(Orbital {
            n: l + 1 + j as u32,
            l,
            energy: eig.values[j],
            coeffs,
        });
    }
    Ok(out)
}

/// Orbitals for every `l <= l_max`, sharing one B-spline basis.
#[derive(Debug, Clone)]
pub struct RadialOrbitalSet {
    z: f64,
    basis: Arc<BSplineBasis>,
    per_l: Vec<Vec<Orbital>>,
}

impl RadialOrbitalSet {
    /// Solves the one-electron problem for charge `z` and `l = 0..=l_max`.
    pub fn build(basis: Arc<BSplineBasis>, z: f64, l_max: u32, n_max: u32) -> Result<Self> {
        if !(z.is_finite() && z > 0.0) {
            return Err(Error::InvalidParameter(format!("nuclear charge must be > 0, got {z}")));
        }
        if n_max <= l_max {
            return Err(Error::InvalidParameter(format!(
                "n_max ({n_max}) must exceed l_max ({l_max})"
            )));
        }
        let s = interior_overlap(&basis);
        let per_l = (0..=l_max)
            .map(|l| solve_orbitals(&radial_hamiltonian(&basis, z, l), &s, n_max, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(RadialOrbitalSet { z, basis, per_l })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn basis(&self) -> &Arc<BSplineBasis> {
        &self.basis
    }

    pub fn l_max(&self) -> u32 {
        self.per_l.len() as u32 - 1
    }

    /// Highest principal index present for `l = 0`.
    pub fn n_max(&self) -> u32 {
        self.per_l[0].last().map_or(0, |o| o.n)
    }

    /// Orbitals of one angular momentum, ascending in `n` (and energy).
    pub fn orbitals(&self, l: u32) -> &[Orbital] {
        self.per_l.get(l as usize).map_or(&[], |v| v.as_slice())
    }

    pub fn get(&self, n: u32, l: u32) -> Result<&Orbital> {
        let list = self.per_l.get(l as usize).ok_or_else(|| Error::IndexOutOfRange {
            index: l as usize,
            valid: format!("l in 0..={}", self.l_max()),
        })?;
        if n <= l {
            return Err(Error::IndexOutOfRange {
                index: n as usize,
                valid: format!("n in {}..={}", l + 1, l as usize + list.len()),
            });
        }
        list.get((n - l - 1) as usize).ok_or_else(|| Error::IndexOutOfRange {
            index: n as usize,
            valid: format!("n in {}..={}", l + 1, l as usize + list.len()),
        })
    }

    /// `χ_nl(r) = Σ_i c_i B_i(r)`.
    pub fn value(&self, n: u32, l: u32, r: f64) -> Result<f64> {
        let orb = self.get(n, l)?;
        if !(0.0..=self.basis.r_max()).contains(&r) {
            return Err(Error::InvalidParameter(format!(
                "radius {r} outside [0, {}]",
                self.basis.r_max()
            )));
        }
        let loc = self.basis.local(r);
        Ok((0..self.basis.order())
            .map(|j| loc.values[j] * orb.coeffs[loc.first + j])
            .sum())
    }

    /// Writes one CSV record per orbital: `z,n,l,energy,coefficients` where the
    /// last field holds all `N` spline coefficients separated by spaces.
    pub fn write_dump<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let to_err = |e: csv::Error| Error::Parse {
            what: "orbital dump".into(),
            msg: e.to_string(),
        };
        w.write_record(["z", "n", "l", "energy", "coefficients"]).map_err(to_err)?;
        for orb in self.per_l.iter().flatten() {
            let coeffs = orb
                .coeffs
                .iter()
                .map(|c| format!("{c:.17e}"))
                .collect::<Vec<_>>()
                .join(" ");
            w.write_record([
                format!("{}", self.z),
                orb.n.to_string(),
                orb.l.to_string(),
                format!("{:.17e}", orb.energy),
                coeffs,
            ])
            .map_err(to_err)?;
        }
        w.flush().map_err(|e| Error::io("orbital dump", e))?;
        Ok(())
    }
}

/// `χ_nl(r)` for an orbital of `set`.
pub fn orbital_value(set: &RadialOrbitalSet, n: u32, l: u32, r: f64) -> Result<f64> {
    set.value(n, l, r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bspline::{make_knots, GridSpec};

    fn basis(r: f64, n: usize) -> Arc<BSplineBasis> {
        Arc::new(BSplineBasis::new(make_knots(r, n, 7, GridSpec::default()).unwrap()))
    }

    #[test]
    fn hamiltonian_is_symmetric_and_banded() {
        let b = basis(40.0, 40);
        let h = radial_hamiltonian(&b, 2.0, 1);
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                assert_eq!(h[(i, j)], h[(j, i)]);
                if i.abs_diff(j) >= 7 {
                    assert_eq!(h[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn hydrogen_ground_state() {
        let b = basis(40.0, 40);
        let orbs = solve_orbitals(&radial_hamiltonian(&b, 1.0, 0), &interior_overlap(&b), 3, 0).unwrap();
        assert!((orbs[0].energy + 0.5).abs() < 1e-9, "{}", orbs[0].energy);
    }

    #[test]
    fn helium_ion_levels() {
        let set = RadialOrbitalSet::build(basis(60.0, 60), 2.0, 1, 4).unwrap();
        assert!((set.get(1, 0).unwrap().energy + 2.0).abs() < 1e-8);
        assert!((set.get(2, 1).unwrap().energy + 0.5).abs() < 1e-8);
        assert!((set.get(2, 0).unwrap().energy + 0.5).abs() < 1e-8);
        for l in 0..=1 {
            let e: Vec<f64> = set.orbitals(l).iter().map(|o| o.energy).collect();
            assert!(e.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn boundary_values_and_sign() {
        let set = RadialOrbitalSet::build(basis(60.0, 50), 2.0, 2, 10).unwrap();
        for l in 0..=2 {
            for o in set.orbitals(l) {
                assert_eq!(set.value(o.n, l, 0.0).unwrap(), 0.0);
                assert_eq!(set.value(o.n, l, 60.0).unwrap(), 0.0);
            }
        }
        for n in 1..=5 {
            let v = set.value(n, 0, 1e-3).unwrap();
            assert!(v > 0.0, "n={n} χ(0+)={v}");
        }
    }

    #[test]
    fn analytic_1s_shape() {
        let z: f64 = 2.0;
        let set = RadialOrbitalSet::build(basis(30.0, 60), z, 0, 3).unwrap();
        for r in [0.5, 1.0, 2.0] {
            let exact = 2.0 * z.powf(1.5) * r * (-z * r).exp();
            let got = set.value(1, 0, r).unwrap();
            assert!((got - exact).abs() < 1e-6, "r={r}: {got} vs {exact}");
        }
    }

    #[test]
    fn requests_beyond_basis_or_labels() {
        let b = basis(20.0, 12);
        assert!(RadialOrbitalSet::build(b.clone(), 2.0, 0, 11).is_err());
        let set = RadialOrbitalSet::build(b, 2.0, 1, 5).unwrap();
        assert!(matches!(set.get(1, 1), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(set.get(6, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(set.get(2, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn dump_has_header_and_one_row_per_orbital() {
        let set = RadialOrbitalSet::build(basis(20.0, 20), 2.0, 1, 4).unwrap();
        let mut buf = Vec::new();
        set.write_dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut rdr = csv::Reader::from_reader(text.as_bytes());
        assert_eq!(rdr.headers().unwrap(), vec!["z", "n", "l", "energy", "coefficients"]);
        let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 4 + 3);
        let coeffs: Vec<f64> = rows[0][4].split(' ').map(|c| c.parse().unwrap()).collect();
        assert_eq!(coeffs.len(), 20);
        assert_eq!(coeffs, set.get(1, 0).unwrap().coeffs);
    }
}
