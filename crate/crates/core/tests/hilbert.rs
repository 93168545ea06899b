use berezin_lab::hilbert::{gram_embed, DomainSpec, KernelSpace, Point, SamplePlan};
use berezin_lab::matcore::{inner, vec_norm, Matrix, C64};
use berezin_lab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn random_gram(rng: &mut ChaCha8Rng, rank: usize, m: usize) -> Matrix {
    let f = Matrix::from_fn(rank, m, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&f.adjoint() * &f).hermitian_part()
}

#[test]
fn discrete_kernels_reproduce_the_gram_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (rank, m) in [(2, 4), (3, 6), (4, 4), (5, 10)] {
        let gram = random_gram(&mut rng, rank, m);
        let space = KernelSpace::discrete((0..m).map(|i| format!("x{i}")).collect(), &gram).unwrap();
        assert_eq!(space.dim(), rank);
        let kernels: Vec<_> = (0..m).map(|i| space.kernel_at(&Point::Index(i)).unwrap()).collect();
        let scale = gram.max_abs();
        for i in 0..m {
            for j in 0..m {
                // k_j(x_i) = ⟨k_j, k_i⟩ = K(i, j)
                let ip = inner(&kernels[j], &kernels[i]);
                assert!((ip - gram[(i, j)]).norm() <= 1e-10 * scale, "({i},{j})");
            }
        }
    }
}

#[test]
fn embedding_factorizes_the_gram_matrix() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gram = random_gram(&mut rng, 3, 5);
    let g = gram_embed(&gram, 1e-10).unwrap();
    assert_eq!(g.rows(), 3);
    assert!((&(&g.adjoint() * &g) - &gram).max_abs() <= 1e-10 * gram.max_abs());
}

#[test]
fn bergman_kernel_norm_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for n in 2..=8 {
        let space = KernelSpace::bergman(n, 0.95).unwrap();
        for _ in 0..20 {
            let z = C64::from_polar(0.95 * rng.random::<f64>().sqrt(), std::f64::consts::TAU * rng.random::<f64>());
            let k = space.kernel_at(&Point::Disk(z)).unwrap();
            let expected: f64 = (0..n).map(|j| (j + 1) as f64 * z.norm_sqr().powi(j as i32)).sum();
            assert!((vec_norm(&k).powi(2) - expected).abs() <= 1e-12 * expected);
        }
    }
}

#[test]
fn points_outside_the_domain_are_rejected() {
    let hardy = KernelSpace::hardy(3, 0.9).unwrap();
    assert!(matches!(hardy.kernel_at(&Point::Disk(C64::new(0.95, 0.0))), Err(Error::OutOfDomain(_))));
    assert!(hardy.kernel_at(&Point::Index(0)).is_err());
    let discrete = KernelSpace::orthonormal_discrete(3).unwrap();
    assert!(discrete.kernel_at(&Point::Index(3)).is_err());
}

#[test]
fn gram_file_with_imaginary_part() {
    let json = r#"{"points": ["a", "b"], "gram_re": [[2, 0], [0, 2]], "gram_im": [[0, 1], [-1, 0]]}"#;
    let space = KernelSpace::from_gram_json(json).unwrap();
    assert_eq!(space.point_count(), Some(2));
    let k0 = space.kernel_at(&Point::Index(0)).unwrap();
    let k1 = space.kernel_at(&Point::Index(1)).unwrap();
    // K(0, 1) = ⟨k_1, k_0⟩ = i
    assert!((inner(&k1, &k0) - C64::new(0.0, 1.0)).norm() <= 1e-12);
}

#[test]
fn gram_file_must_be_positive() {
    let json = r#"{"points": [0, 1], "gram_re": [[1, 2], [2, 1]]}"#;
    assert!(KernelSpace::from_gram_json(json).is_err());
}

proptest! {
    #[test]
    fn sampling_is_deterministic_and_inside_the_disk(count in 1usize..600, seed in any::<u64>(), radius in 0.1..0.99f64) {
        let space = KernelSpace::hardy(3, radius).unwrap();
        for plan in [SamplePlan::polar_grid(count), SamplePlan::uniform(count, seed)] {
            let a = space.sample_domain(&plan).unwrap();
            prop_assert_eq!(a.len(), count);
            prop_assert_eq!(&a, &space.sample_domain(&plan).unwrap());
            prop_assert!(a.iter().all(|p| space.domain().contains(p)));
        }
    }

    #[test]
    fn hardy_kernel_norm_identity(n in 2usize..12, r in 0.0..0.95f64, theta in 0.0..std::f64::consts::TAU) {
        let space = KernelSpace::hardy(n, 0.95).unwrap();
        let z = C64::from_polar(r, theta);
        let k = space.kernel_at(&Point::Disk(z)).unwrap();
        let expected: f64 = (0..n).map(|j| (r * r).powi(j as i32)).sum();
        prop_assert!((vec_norm(&k).powi(2) - expected).abs() <= 1e-12 * expected);
        let k_hat = space.normalized_kernel_at(&Point::Disk(z)).unwrap();
        prop_assert!((vec_norm(&k_hat) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn exhaustive_plan_enumerates_all_points(m in 1usize..20) {
        let space = KernelSpace::orthonormal_discrete(m).unwrap();
        let pts = space.sample_domain(&SamplePlan::exhaustive()).unwrap();
        prop_assert_eq!(pts, (0..m).map(Point::Index).collect::<Vec<_>>());
        let finite = matches!(space.domain(), DomainSpec::FinitePoints { .. });
        prop_assert!(finite);
    }
}
