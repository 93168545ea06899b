//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use super::matrix::{Matrix, C64};
use crate::error::{Error, Result};

/// Sweep cap for the cyclic Jacobi iteration.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius threshold, relative to ‖H‖_F.
pub const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Spectral decomposition `H = V diag(w) V*` with `w` ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub eigenvectors: Matrix,
}

impl HermitianEigen {
    /// `V diag(f(wᵢ)) V*`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let fw: Vec<f64> = self.eigenvalues.iter().map(|&w| f(w)).collect();
        self.reconstruct_from(&fw)
    }

    /// `V diag(values) V*`, one value per eigenvector column.
    pub fn reconstruct_from(&self, fw: &[f64]) -> Matrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        assert_eq!(fw.len(), n, "one value per eigenpair");
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..n {
                    if fw[k] != 0.0 {
                        acc += v[(i, k)] * v[(j, k)].conj() * fw[k];
                    }
                }
                out[(i, j)] = acc;
                out[(j, i)] = acc.conj();
            }
            out[(i, i)] = C64::new(out[(i, i)].re, 0.0);
        }
        out
    }

    pub fn reconstruct(&self) -> Matrix {
        self.reconstruct_with(|w| w)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().expect("non-empty spectrum")
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// Eigendecomposition of a Hermitian matrix.
///
/// `tol_herm` bounds the accepted Hermitian defect `‖H − H*‖_F ≤ tol_herm·‖H‖_F`;
/// the anti-Hermitian residue is discarded before iterating.
pub fn hermitian_eigen(h: &Matrix, tol_herm: f64) -> Result<HermitianEigen> {
    check_hermitian(h, tol_herm)?;
    let (eigenvalues, eigenvectors, converged) = jacobi(h, true);
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors: eigenvectors.expect("vectors requested"),
    })
}

/// Eigenvalues only (ascending). Skips eigenvector accumulation.
pub fn hermitian_eigenvalues(h: &Matrix, tol_herm: f64) -> Result<Vec<f64>> {
    check_hermitian(h, tol_herm)?;
    let (w, _, converged) = jacobi(h, false);
    if !converged {
        return Err(Error::NoConvergence { sweeps: MAX_SWEEPS });
    }
    Ok(w)
}

fn check_hermitian(h: &Matrix, tol_herm: f64) -> Result<()> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}×{}",
            h.rows(),
            h.cols()
        )));
    }
    let defect = h.hermitian_defect();
    let allowed = tol_herm * h.frobenius_norm();
    if defect > allowed {
        return Err(Error::NotHermitian { defect, allowed });
    }
    Ok(())
}

/// Largest eigenvalue of the Hermitian part of `h`, ignoring convergence
/// failure (the current diagonal is still a Rayleigh-quotient estimate).
pub(crate) fn lambda_max_unchecked(h: &Matrix) -> f64 {
    let n = h.rows();
    if n == 2 {
        // closed form for 2×2 Hermitian
        let a = h[(0, 0)].re;
        let d = h[(1, 1)].re;
        let b = (h[(0, 1)] + h[(1, 0)].conj()) * 0.5;
        let mean = 0.5 * (a + d);
        let half_gap = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        return mean + half_gap;
    }
    let (w, _, _) = jacobi(h, false);
    *w.last().expect("non-empty spectrum")
}

/// Eigenpairs of the Hermitian part of `h` regardless of convergence.
pub(crate) fn eigen_unchecked(h: &Matrix) -> HermitianEigen {
    let (eigenvalues, v, _) = jacobi(h, true);
    HermitianEigen {
        eigenvalues,
        eigenvectors: v.expect("vectors requested"),
    }
}

fn jacobi(h: &Matrix, want_vectors: bool) -> (Vec<f64>, Option<Matrix>, bool) {
    let n = h.rows();
    let mut a = h.hermitian_part();
    let mut v = want_vectors.then(|| Matrix::identity(n));
    let threshold = OFF_DIAGONAL_TOL * a.frobenius_norm();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= threshold || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, v.as_mut(), p, q);
            }
        }
    }
    if !converged {
        let off = off_diagonal_norm(&a);
        converged = off <= threshold || off == 0.0;
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();
    let vectors = v.map(|v| Matrix::from_fn(n, n, |i, j| v[(i, order[j])]));
    (eigenvalues, vectors, converged)
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One unitary rotation annihilating `a[p][q]`; `a ← J* a J`, `v ← v J`.
fn rotate(a: &mut Matrix, v: Option<&mut Matrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // negligible relative to both diagonal entries: skipping keeps the sweep cheap
    if mag < f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let phase_conj = (apq / mag).conj();
    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // J = diag(1, e^{-iφ}) · [[c, s], [-s, c]]
    let jpp = C64::new(c, 0.0);
    let jpq = C64::new(s, 0.0);
    let jqp = phase_conj * (-s);
    let jqq = phase_conj * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * jpp + akq * jqp;
        a[(k, q)] = akp * jpq + akq * jqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = jpp.conj() * apk + jqp.conj() * aqk;
        a[(q, k)] = jpq.conj() * apk + jqq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);

    if let Some(v) = v {
        for k in 0..n {
            let vkp = v[(k, p)];
            let vkq = v[(k, q)];
            v[(k, p)] = vkp * jpp + vkq * jqp;
            v[(k, q)] = vkp * jpq + vkq * jqq;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_input() {
        let e = hermitian_eigen(&Matrix::diag_real(&[3.0, 1.0]), 1e-12).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
        // eigenvectors are a permutation of the identity
        assert!((e.eigenvectors[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((e.eigenvectors[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn swap_matrix() {
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let e = hermitian_eigen(&h, 1e-12).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_two_by_two() {
        let h = Matrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(2.0, 0.0)]]);
        let e = hermitian_eigen(&h, 1e-12).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-14);
        let r = &e.reconstruct() - &h;
        assert!(r.frobenius_norm() < 1e-14);
        assert!((lambda_max_unchecked(&h) - 3.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(matches!(hermitian_eigen(&h, 1e-10), Err(Error::NotHermitian { .. })));
        assert!(matches!(
            hermitian_eigen(&Matrix::zeros(2, 3), 1e-10),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn zero_matrix_converges_immediately() {
        let e = hermitian_eigen(&Matrix::zeros(4, 4), 1e-12).unwrap();
        assert!(e.eigenvalues.iter().all(|&w| w == 0.0));
    }
}
