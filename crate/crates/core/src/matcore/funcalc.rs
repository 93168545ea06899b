//! Spectral functional calculus on positive matrices and the norms built on it.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use super::eigen::{eigen_unchecked, hermitian_eigen, lambda_max_unchecked};
use super::matrix::{Matrix, C64};
use crate::error::{Error, Result};

/// Eigenvalues in `[−clamp·‖P‖, 0)` are treated as roundoff and set to zero.
pub const DEFAULT_CLAMP: f64 = 1e-10;

/// Hermitian defect accepted by the functional calculus, relative to ‖P‖_F.
pub const HERMITIAN_TOL: f64 = 1e-9;

pub const DEFAULT_THETA_STEPS: usize = 720;
pub const DEFAULT_RADIUS_REFINE_ITERS: usize = 60;

/// A real function on `[0, ∞)` applied through the spectral theorem.
#[derive(Clone)]
pub struct ScalarFunction {
    name: String,
    nonnegative: bool,
    rule: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl ScalarFunction {
    pub fn new(
        name: impl Into<String>,
        nonnegative: bool,
        rule: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            nonnegative,
            rule: Arc::new(rule),
        }
    }

    /// `t ↦ t^s`, with `0⁰ = 1`.
    pub fn power(s: f64) -> Self {
        Self::new(format!("t^{s}"), true, move |t: f64| t.powf(s))
    }

    pub fn sqrt() -> Self {
        Self::new("sqrt", true, f64::sqrt)
    }

    pub fn square() -> Self {
        Self::new("t^2", true, |t: f64| t * t)
    }

    /// `t ↦ f(t)^e`.
    pub fn powered(&self, e: f64) -> Self {
        let inner = Arc::clone(&self.rule);
        Self::new(format!("({})^{e}", self.name), self.nonnegative, move |t| inner(t).powf(e))
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.rule)(t)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_nonnegative(&self) -> bool {
        self.nonnegative
    }
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("name", &self.name)
            .field("nonnegative", &self.nonnegative)
            .finish()
    }
}

/// `V diag(f(max(wᵢ, 0))) V*` for a positive semidefinite `P = V diag(w) V*`.
pub fn func_calculus(p: &Matrix, f: &ScalarFunction, clamp: f64) -> Result<Matrix> {
    let eig = hermitian_eigen(p, HERMITIAN_TOL)?;
    let norm = eig
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, w| m.max(w.abs()));
    let floor = -clamp * norm;
    let min = eig.min_eigenvalue();
    if min < floor {
        return Err(Error::NotPsd {
            eigenvalue: min,
            floor,
        });
    }
    let mut values = Vec::with_capacity(eig.eigenvalues.len());
    for &w in &eig.eigenvalues {
        let t = w.max(0.0);
        let v = f.eval(t);
        if !v.is_finite() || (f.is_nonnegative() && v < 0.0) {
            return Err(Error::bad_params(
                "func_calculus",
                format!("{} evaluates to {v} at t = {t}", f.name()),
            ));
        }
        values.push(v);
    }
    Ok(eig.reconstruct_from(&values))
}

/// `|T| = (T*T)^{1/2}`.
pub fn abs_op(t: &Matrix) -> Result<Matrix> {
    func_calculus(&(&t.adjoint() * t), &ScalarFunction::sqrt(), DEFAULT_CLAMP)
}

/// `P^s` for positive semidefinite `P` and `s ≥ 0`; `P⁰ = I`.
pub fn power_psd(p: &Matrix, s: f64) -> Result<Matrix> {
    if !(s >= 0.0) || !s.is_finite() {
        return Err(Error::bad_params("power_psd", format!("exponent {s} must be finite and ≥ 0")));
    }
    func_calculus(p, &ScalarFunction::power(s), DEFAULT_CLAMP)
}

/// `|T|^s = (T*T)^{s/2}` without forming `|T|` first.
pub fn abs_power(t: &Matrix, s: f64) -> Result<Matrix> {
    if s == 1.0 {
        return abs_op(t);
    }
    power_psd(&(&t.adjoint() * t), s / 2.0)
}

/// Largest singular value.
pub fn spectral_norm(t: &Matrix) -> f64 {
    let gram = if t.rows() < t.cols() {
        t * &t.adjoint()
    } else {
        &t.adjoint() * t
    };
    if gram.rows() == 1 {
        return gram[(0, 0)].re.max(0.0).sqrt();
    }
    lambda_max_unchecked(&gram).max(0.0).sqrt()
}

/// Singular values, descending.
pub fn singular_values(t: &Matrix) -> Vec<f64> {
    let eig = eigen_unchecked(&(&t.adjoint() * t));
    let mut s: Vec<f64> = eig.eigenvalues.iter().map(|w| w.max(0.0).sqrt()).collect();
    s.reverse();
    s
}

/// Lower estimate of the numerical radius `w(T) = max_θ λ_max(Re(e^{iθ}T))`.
///
/// Scans an equispaced θ-grid and polishes the best bracket by golden-section
/// search. Every returned value is an attained λ_max, so the result never
/// exceeds the true radius; before refinement the gap is at most
/// `‖T‖·2π/theta_steps`.
pub fn numerical_radius(t: &Matrix, theta_steps: usize, refine_iters: usize) -> f64 {
    assert!(t.is_square(), "numerical radius needs a square matrix");
    let steps = theta_steps.max(8);
    let n = t.rows();
    if n == 1 {
        return t[(0, 0)].norm();
    }
    // T = H + iK with H, K Hermitian; Re(e^{iθ}T) = cos θ·H − sin θ·K
    let ta = t.adjoint();
    let h = (t + &ta).scale(0.5);
    let k = (t - &ta).scale_complex(C64::new(0.0, -0.5));
    let objective = |theta: f64| {
        let (s, c) = theta.sin_cos();
        let m = Matrix::from_fn(n, n, |i, j| h[(i, j)] * c - k[(i, j)] * s);
        lambda_max_unchecked(&m)
    };

    let step = 2.0 * PI / steps as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_idx = 0;
    for i in 0..steps {
        let v = objective(i as f64 * step);
        if v > best {
            best = v;
            best_idx = i;
        }
    }

    // golden-section maximization on [θ_{i−1}, θ_{i+1}]
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let center = best_idx as f64 * step;
    let (mut lo, mut hi) = (center - step, center + step);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = objective(x1);
    let mut f2 = objective(x2);
    for _ in 0..refine_iters {
        best = best.max(f1).max(f2);
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = objective(x1);
        }
    }
    best.max(f1).max(f2).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Matrix, b: &Matrix, tol: f64) -> bool {
        (a - b).frobenius_norm() <= tol
    }

    fn shift2() -> Matrix {
        Matrix::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]])
    }

    #[test]
    fn func_calculus_examples() {
        let r = func_calculus(&Matrix::diag_real(&[4.0, 9.0]), &ScalarFunction::sqrt(), DEFAULT_CLAMP)
            .unwrap();
        assert!(close(&r, &Matrix::diag_real(&[2.0, 3.0]), 1e-14));

        let f = ScalarFunction::new("exp", true, f64::exp);
        let r = func_calculus(&Matrix::identity(3), &f, DEFAULT_CLAMP).unwrap();
        assert!(close(&r, &Matrix::identity(3).scale(1f64.exp()), 1e-14));

        let p = Matrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let r = func_calculus(&p, &ScalarFunction::square(), DEFAULT_CLAMP).unwrap();
        // oracle: direct product
        assert!(close(&r, &(&p * &p), 1e-13));
        assert!(close(&r, &Matrix::from_real_rows(&[vec![5.0, 4.0], vec![4.0, 5.0]]), 1e-13));
    }

    #[test]
    fn func_calculus_rejects_indefinite() {
        let p = Matrix::diag_real(&[1.0, -0.5]);
        assert!(matches!(
            func_calculus(&p, &ScalarFunction::sqrt(), DEFAULT_CLAMP),
            Err(Error::NotPsd { .. })
        ));
        // roundoff-sized negatives are clamped
        let p = Matrix::diag_real(&[1.0, -1e-13]);
        let r = func_calculus(&p, &ScalarFunction::sqrt(), DEFAULT_CLAMP).unwrap();
        assert_eq!(r[(1, 1)].re, 0.0);
    }

    #[test]
    fn abs_op_examples() {
        let r = abs_op(&shift2()).unwrap();
        assert!(close(&r, &Matrix::diag_real(&[0.0, 2.0]), 1e-14));

        let p = Matrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!(close(&abs_op(&p).unwrap(), &p, 1e-13));

        let s = 0.5_f64.sqrt();
        let u = Matrix::from_rows(&[
            vec![C64::new(s, 0.0), C64::new(0.0, s)],
            vec![C64::new(0.0, s), C64::new(s, 0.0)],
        ]);
        assert!(close(&abs_op(&u).unwrap(), &Matrix::identity(2), 1e-14));
    }

    #[test]
    fn power_examples() {
        let r = power_psd(&Matrix::diag_real(&[4.0, 9.0]), 0.5).unwrap();
        assert!(close(&r, &Matrix::diag_real(&[2.0, 3.0]), 1e-14));

        let singular = Matrix::diag_real(&[0.0, 2.0]);
        assert!(close(&power_psd(&singular, 0.0).unwrap(), &Matrix::identity(2), 0.0));

        let p = Matrix::from_real_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let r = power_psd(&p, 2.0).unwrap();
        assert!(close(&r, &Matrix::from_real_rows(&[vec![5.0, 4.0], vec![4.0, 5.0]]), 1e-13));

        assert!(power_psd(&p, -1.0).is_err());
    }

    #[test]
    fn spectral_norm_examples() {
        assert!((spectral_norm(&Matrix::diag_real(&[1.0, -3.0])) - 3.0).abs() < 1e-14);
        assert!((spectral_norm(&shift2()) - 2.0).abs() < 1e-14);
        let s = 0.5_f64.sqrt();
        let u = Matrix::from_real_rows(&[vec![s, -s], vec![s, s]]);
        assert!((spectral_norm(&u) - 1.0).abs() < 1e-14);
        assert!((spectral_norm(&Matrix::from_real_rows(&[vec![3.0, 4.0]])) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn numerical_radius_examples() {
        let h = Matrix::from_real_rows(&[vec![1.0, 2.0], vec![2.0, -4.0]]);
        let w = numerical_radius(&h, DEFAULT_THETA_STEPS, DEFAULT_RADIUS_REFINE_ITERS);
        assert!((w - spectral_norm(&h)).abs() < 1e-9);

        // the nilpotent [[0,2],[0,0]] has field of values the closed disk of radius 1
        let w = numerical_radius(&shift2(), DEFAULT_THETA_STEPS, DEFAULT_RADIUS_REFINE_ITERS);
        assert!((w - 1.0).abs() < 1e-12);

        let d = Matrix::diag(&[C64::new(0.0, 1.0), C64::new(0.0, -1.0)]);
        let w = numerical_radius(&d, DEFAULT_THETA_STEPS, DEFAULT_RADIUS_REFINE_ITERS);
        assert!((w - 1.0).abs() < 1e-12);
    }
}
