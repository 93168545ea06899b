use berezin_lab::matcore::{
    abs_op, hermitian_eigen, hermitian_eigenvalues, inner, numerical_radius, power_psd, singular_values,
    spectral_norm, vec_norm, Matrix, C64, DEFAULT_RADIUS_REFINE_ITERS, DEFAULT_THETA_STEPS,
};
use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn to_na(m: &Matrix) -> DMatrix<nalgebra::Complex<f64>> {
    DMatrix::from_fn(m.rows(), m.cols(), |i, j| nalgebra::Complex::new(m[(i, j)].re, m[(i, j)].im))
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v: Vec<C64> = (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = vec_norm(&v);
    v.into_iter().map(|z| z / norm).collect()
}

#[test]
fn numerical_radius_matches_brute_force_field_of_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in [2, 3] {
        for _ in 0..3 {
            let a = gaussian_matrix(&mut rng, n, n);
            let w = numerical_radius(&a, DEFAULT_THETA_STEPS, DEFAULT_RADIUS_REFINE_ITERS);
            let brute = (0..100_000)
                .map(|_| {
                    let x = unit_vector(&mut rng, n);
                    a.quad_form(&x).norm()
                })
                .fold(0.0_f64, f64::max);
            let norm = spectral_norm(&a);
            assert!(brute <= w + 1e-9 * norm, "n={n}: brute {brute} > w {w}");
            assert!(w - brute <= 2e-2 * norm, "n={n}: w {w} far above brute {brute}");
            assert!(w <= norm + 1e-12 && w >= 0.5 * norm - 1e-12);
        }
    }
}

#[test]
fn eigenvalues_agree_with_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [1, 2, 3, 5, 8, 13] {
        let g = gaussian_matrix(&mut rng, n, n);
        let h = (&g + &g.adjoint()).scale(0.5);
        let ours = hermitian_eigenvalues(&h, 1e-12).unwrap();
        let mut theirs: Vec<f64> = to_na(&h).symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-10 * (1.0 + b.abs()), "n={n}: {a} vs {b}");
        }
    }
}

#[test]
fn singular_values_agree_with_nalgebra() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [2, 4, 7, 12] {
        let t = gaussian_matrix(&mut rng, n, n);
        let ours = singular_values(&t);
        let mut theirs: Vec<f64> = to_na(&t).singular_values().iter().copied().collect();
        theirs.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() <= 1e-10 * theirs[0], "n={n}: {a} vs {b}");
        }
        assert!((spectral_norm(&t) - theirs[0]).abs() <= 1e-10 * theirs[0]);
    }
}

#[test]
fn eigen_rejects_non_hermitian_input() {
    let m = Matrix::from_real_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
    assert!(hermitian_eigen(&m, 1e-9).is_err());
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = Matrix> {
    prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), n * n)
        .prop_map(move |v| Matrix::from_fn(n, n, |i, j| C64::new(v[i * n + j].0, v[i * n + j].1)))
}

proptest! {
    #[test]
    fn adjoint_is_an_involution_and_reverses_products(a in matrix_strategy(3), b in matrix_strategy(3)) {
        prop_assert_eq!(a.adjoint().adjoint(), a.clone());
        let lhs = (&a * &b).adjoint();
        let rhs = &b.adjoint() * &a.adjoint();
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-12);
    }

    #[test]
    fn quadratic_form_of_adjoint_is_conjugate(a in matrix_strategy(4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = unit_vector(&mut rng, 4);
        let lhs = a.adjoint().quad_form(&x);
        let rhs = a.quad_form(&x).conj();
        prop_assert!((lhs - rhs).norm() <= 1e-12);
        prop_assert!((inner(&x, &x).re - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn eigen_decomposition_reconstructs(g in matrix_strategy(4)) {
        let h = (&g + &g.adjoint()).scale(0.5);
        let eig = hermitian_eigen(&h, 1e-12).unwrap();
        let scale = h.max_abs().max(1.0);
        prop_assert!((&eig.reconstruct() - &h).max_abs() <= 1e-10 * scale);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn psd_powers_compose(g in matrix_strategy(3), s in 0.1..2.0f64, t in 0.1..2.0f64) {
        let p = &g.adjoint() * &g;
        let lhs = &power_psd(&p, s).unwrap() * &power_psd(&p, t).unwrap();
        let rhs = power_psd(&p, s + t).unwrap();
        let scale = spectral_norm(&p).powf(s + t).max(1.0);
        prop_assert!((&lhs - &rhs).max_abs() <= 1e-8 * scale);
    }

    #[test]
    fn abs_squares_to_gram(g in matrix_strategy(3)) {
        let a = abs_op(&g).unwrap();
        let gram = &g.adjoint() * &g;
        let scale = spectral_norm(&gram).max(1.0);
        prop_assert!((&(&a * &a) - &gram).max_abs() <= 1e-9 * scale);
        prop_assert!(a.hermitian_defect() <= 1e-12 * scale);
    }

    #[test]
    fn radius_lies_between_half_norm_and_norm(a in matrix_strategy(3)) {
        let w = numerical_radius(&a, DEFAULT_THETA_STEPS, DEFAULT_RADIUS_REFINE_ITERS);
        let norm = spectral_norm(&a);
        prop_assert!(w <= norm * (1.0 + 1e-12) + 1e-15);
        prop_assert!(w >= 0.5 * norm * (1.0 - 1e-9));
    }
}
