use berezin_lab::blocks::{
    assemble, check_block_diag_bound, check_block_offdiag_bound, direct_sum_kernel, sample_product_domain,
    BlockOperator, DirectSumSpace, ProductPlan,
};
use berezin_lab::hilbert::{KernelSpace, Point, SamplePlan};
use berezin_lab::inequalities::{CheckParams, CheckPlan, Status};
use berezin_lab::matcore::{vec_norm, Matrix, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn hardy_bergman(n1: usize, n2: usize) -> DirectSumSpace {
    DirectSumSpace::new(KernelSpace::hardy(n1, 0.9).unwrap(), KernelSpace::bergman(n2, 0.9).unwrap())
}

#[test]
fn pair_kernel_is_the_normalized_concatenation() {
    let space = hardy_bergman(3, 2);
    let (l1, l2) = (Point::Disk(C64::new(0.5, 0.2)), Point::Disk(C64::new(-0.3, 0.6)));
    let pk = direct_sum_kernel(&space, &l1, &l2).unwrap();
    let k1 = space.first().kernel_at(&l1).unwrap();
    let k2 = space.second().kernel_at(&l2).unwrap();
    let (s1, s2) = (vec_norm(&k1).powi(2), vec_norm(&k2).powi(2));
    let total = (s1 + s2).sqrt();
    assert_eq!(pk.vector.len(), 5);
    for (got, want) in pk.vector.iter().zip(k1.iter().chain(&k2)) {
        assert!((got - want / total).norm() <= 1e-14);
    }
    assert!((pk.mass - s1 / (s1 + s2)).abs() <= 1e-14);
}

#[test]
fn block_symbol_decomposes_by_mass() {
    // ⟨T k̂, k̂⟩ = t·Ã(λ₁) + √(t(1−t))·(⟨B k̂₂, k̂₁⟩ + ⟨C k̂₁, k̂₂⟩) + (1−t)·D̃(λ₂)
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let space = hardy_bergman(3, 2);
    let blk = BlockOperator::new(
        gaussian_matrix(&mut rng, 3, 3),
        gaussian_matrix(&mut rng, 3, 2),
        gaussian_matrix(&mut rng, 2, 3),
        gaussian_matrix(&mut rng, 2, 2),
    )
    .unwrap();
    let t = assemble(&blk).unwrap();
    for _ in 0..50 {
        let z1 = C64::from_polar(0.9 * rng.random::<f64>(), 6.28 * rng.random::<f64>());
        let z2 = C64::from_polar(0.9 * rng.random::<f64>(), 6.28 * rng.random::<f64>());
        let pk = direct_sum_kernel(&space, &Point::Disk(z1), &Point::Disk(z2)).unwrap();
        let k1 = space.first().normalized_kernel_at(&Point::Disk(z1)).unwrap();
        let k2 = space.second().normalized_kernel_at(&Point::Disk(z2)).unwrap();
        let m = pk.mass;
        let expected = blk.a.quad_form(&k1) * m
            + (blk.b.bilinear(&k2, &k1) + blk.c.bilinear(&k1, &k2)) * (m * (1.0 - m)).sqrt()
            + blk.d.quad_form(&k2) * (1.0 - m);
        assert!((t.quad_form(&pk.vector) - expected).norm() <= 1e-12);
    }
}

#[test]
fn mismatched_blocks_are_rejected() {
    let space = hardy_bergman(3, 2);
    let plan = CheckPlan::default();
    let params = CheckParams::default();
    assert!(BlockOperator::new(Matrix::identity(3), Matrix::zeros(3, 3), Matrix::zeros(2, 3), Matrix::identity(2)).is_err());
    assert!(check_block_offdiag_bound(&space, &Matrix::zeros(2, 3), &Matrix::zeros(3, 2), &params, &plan).is_err());
    assert!(check_block_diag_bound(&space, &Matrix::identity(2), &Matrix::identity(3), &params, &plan).is_err());
}

#[test]
fn product_sampling_caps_pairs_and_covers_both_sides() {
    let space = hardy_bergman(2, 2);
    let base = SamplePlan::polar_grid(100);
    let plan = ProductPlan::for_space(&space, &base, 500, 7);
    let pairs = sample_product_domain(&space, &plan).unwrap();
    assert_eq!(pairs.len(), 500);
    assert_eq!(pairs, sample_product_domain(&space, &plan).unwrap());
    let full = sample_product_domain(&space, &ProductPlan::for_space(&space, &base, 10_000, 7)).unwrap();
    assert_eq!(full.len(), 100 * 100);
}

#[test]
fn block_bounds_hold_on_random_operators() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let params = CheckParams::default();
    let plan = CheckPlan::new(SamplePlan::polar_grid(100));
    for (n1, n2) in [(2, 2), (3, 2), (4, 3)] {
        let space = hardy_bergman(n1, n2);
        for _ in 0..5 {
            let a = gaussian_matrix(&mut rng, n1, n1);
            let d = gaussian_matrix(&mut rng, n2, n2);
            let a = (&a + &a.adjoint()).scale(0.5);
            let d = (&d + &d.adjoint()).scale(0.5);
            let r = check_block_diag_bound(&space, &a, &d, &params, &plan).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:?}");
            let b = gaussian_matrix(&mut rng, n1, n2);
            let c = gaussian_matrix(&mut rng, n2, n1);
            let r = check_block_offdiag_bound(&space, &b, &c, &params, &plan).unwrap();
            assert_eq!(r.status, Status::Pass, "{r:?}");
        }
    }
}

proptest! {
    #[test]
    fn split_inverts_assemble(seed in any::<u64>(), n1 in 1usize..5, n2 in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let blk = BlockOperator::new(
            gaussian_matrix(&mut rng, n1, n1),
            gaussian_matrix(&mut rng, n1, n2),
            gaussian_matrix(&mut rng, n2, n1),
            gaussian_matrix(&mut rng, n2, n2),
        )
        .unwrap();
        let t = assemble(&blk).unwrap();
        prop_assert_eq!(BlockOperator::split(&t, n1).unwrap(), blk);
    }

    #[test]
    fn masses_lie_in_the_unit_interval(r1 in 0.0..0.9f64, r2 in 0.0..0.9f64, th in 0.0..6.28f64) {
        let space = hardy_bergman(3, 4);
        let pk = direct_sum_kernel(&space, &Point::Disk(C64::from_polar(r1, th)), &Point::Disk(C64::from_polar(r2, -th))).unwrap();
        prop_assert!(pk.mass > 0.0 && pk.mass < 1.0);
        prop_assert!((vec_norm(&pk.vector) - 1.0).abs() <= 1e-12);
    }
}
