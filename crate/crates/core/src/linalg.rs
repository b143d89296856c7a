//! Thin wrappers over faer's dense kernels, always run sequentially so that
//! results are bitwise reproducible regardless of the caller's thread pool.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::cholesky::llt::factor::{cholesky_in_place, cholesky_in_place_scratch, LltRegularization};
use faer::linalg::evd::{self_adjoint_evd, self_adjoint_evd_scratch, ComputeEigenvectors};
use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, MatRef, Par};

use crate::error::{Error, Result};

/// Ascending eigenvalues and the matching eigenvectors (as columns).
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: Mat<f64>,
}

/// Full eigendecomposition of a symmetric matrix (lower triangle is read).
pub fn symmetric_eigen(a: MatRef<'_, f64>) -> Result<SymmetricEigen> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "eigendecomposition needs a square matrix");
    let par = Par::Seq;
    let mut s = faer::diag::Diag::<f64>::zeros(n);
    let mut u = Mat::<f64>::zeros(n, n);
    let mut buf = MemBuffer::new(self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::Yes,
        par,
        Default::default(),
    ));
    self_adjoint_evd(
        a,
        s.as_mut(),
        Some(u.as_mut()),
        par,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Convergence(format!("{e:?}")))?;
    let values: Vec<f64> = (0..n).map(|i| s[i]).collect();
    Ok(SymmetricEigen { values, vectors: u })
}

/// Eigenvalues only.
pub fn symmetric_eigenvalues(a: MatRef<'_, f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    let par = Par::Seq;
    let mut s = faer::diag::Diag::<f64>::zeros(n);
    let mut buf = MemBuffer::new(self_adjoint_evd_scratch::<f64>(
        n,
        ComputeEigenvectors::No,
        par,
        Default::default(),
    ));
    self_adjoint_evd(a, s.as_mut(), None, par, MemStack::new(&mut buf), Default::default())
        .map_err(|e| Error::Convergence(format!("{e:?}")))?;
    Ok((0..n).map(|i| s[i]).collect())
}

/// Lower Cholesky factor `L` with `A = L Lᵀ`.
pub fn cholesky_lower(a: MatRef<'_, f64>) -> Result<Mat<f64>> {
    let n = a.nrows();
    let mut l = a.to_owned();
    let mut buf = MemBuffer::new(cholesky_in_place_scratch::<f64>(n, Par::Seq, Default::default()));
    cholesky_in_place(
        l.as_mut(),
        LltRegularization::default(),
        Par::Seq,
        MemStack::new(&mut buf),
        Default::default(),
    )
    .map_err(|e| Error::Factorization(format!("matrix is not positive definite ({e:?})")))?;
    for j in 0..n {
        for i in 0..j {
            l[(i, j)] = 0.0;
        }
    }
    Ok(l)
}

/// Solves the symmetric-definite problem `H c = ε S c` by reduction with
/// the Cholesky factor of `S`. Eigenvectors come back S-orthonormal.
pub fn generalized_symmetric_eigen(h: MatRef<'_, f64>, s: MatRef<'_, f64>) -> Result<SymmetricEigen> {
    let n = h.nrows();
    let l = cholesky_lower(s)?;
    // A = L⁻¹ H L⁻ᵀ: first X = L⁻¹ H, then A = L⁻¹ Xᵀ (H symmetric).
    let mut x = h.to_owned();
    solve_lower_triangular_in_place(l.as_ref(), x.as_mut(), Par::Seq);
    let mut a = x.transpose().to_owned();
    solve_lower_triangular_in_place(l.as_ref(), a.as_mut(), Par::Seq);
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (a[(i, j)] + a[(j, i)]);
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let SymmetricEigen { values, vectors } = symmetric_eigen(a.as_ref())?;
    let mut c = vectors;
    solve_upper_triangular_in_place(l.transpose(), c.as_mut(), Par::Seq);
    Ok(SymmetricEigen { values, vectors: c })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generalized_problem_residuals() {
        let n = 12;
        let s = Mat::<f64>::from_fn(n, n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                0.5
            } else {
                0.0
            }
        });
        let h = Mat::<f64>::from_fn(n, n, |i, j| ((i + 1) * (j + 1)) as f64 / (1 + i + j) as f64 - if i == j { i as f64 } else { 0.0 });
        let e = generalized_symmetric_eigen(h.as_ref(), s.as_ref()).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for j in 0..n {
            let c = e.vectors.col(j);
            let hc = &h * c;
            let sc = &s * c;
            let res = (&hc - e.values[j] * &sc).norm_l2();
            assert!(res < 1e-12 * hc.norm_l2().max(1.0));
            for i in 0..n {
                let ov = (e.vectors.col(i).transpose() * &sc).abs();
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ov - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn indefinite_overlap_fails() {
        let s = Mat::<f64>::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(cholesky_lower(s.as_ref()), Err(Error::Factorization(_))));
    }
}
