use berezin_lab::blocks::DirectSumSpace;
use berezin_lab::harness::{evaluate, gen_instance, registry::uses_symmetric, Setting, SpaceFamily, TrialConfig};
use berezin_lab::hilbert::{KernelSpace, SamplePlan};
use berezin_lab::inequalities::{
    check_diag_prop, check_offdiag_power, check_prior_commutator, check_thm_heinz, check_tuple_berp,
    check_young_scalar, CheckParams, CheckPlan, Mode, Robustness, Sign, Status, CHECK_IDS,
};
use berezin_lab::matcore::{power_psd, Matrix, C64};
use berezin_lab::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn orthonormal_pair(n1: usize, n2: usize) -> DirectSumSpace {
    DirectSumSpace::new(
        KernelSpace::orthonormal_discrete(n1).unwrap(),
        KernelSpace::orthonormal_discrete(n2).unwrap(),
    )
}

#[test]
fn offdiag_lhs_on_orthonormal_spaces_is_half_the_largest_entry_sum() {
    // with K = I the pair kernel is (e_i ⊕ e_j)/√2, so the symbol of
    // [[0,B],[C,0]] there is (B_ij + C_ji)/2
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let space = orthonormal_pair(3, 4);
    let plan = CheckPlan::new(SamplePlan::exhaustive());
    for _ in 0..10 {
        let b = gaussian_matrix(&mut rng, 3, 4);
        let c = gaussian_matrix(&mut rng, 4, 3);
        let oracle = (0..3)
            .flat_map(|i| (0..4).map(move |j| (i, j)))
            .map(|(i, j)| 0.5 * (b[(i, j)] + c[(j, i)]).norm())
            .fold(0.0_f64, f64::max);
        let params = CheckParams::default().with_r(1.0).with_alpha(0.5);
        let r = check_offdiag_power(&space, &b, &c, &params, &plan).unwrap();
        assert!((r.lhs - oracle).abs() <= 1e-12, "{} vs {oracle}", r.lhs);
        assert_eq!(r.status, Status::Pass);
    }
}

#[test]
fn diag_lhs_on_orthonormal_spaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let space = orthonormal_pair(3, 2);
    let plan = CheckPlan::new(SamplePlan::exhaustive());
    let a = gaussian_matrix(&mut rng, 3, 3);
    let d = gaussian_matrix(&mut rng, 2, 2);
    let oracle = (0..3)
        .flat_map(|i| (0..2).map(move |j| (i, j)))
        .map(|(i, j)| 0.5 * (a[(i, i)] + d[(j, j)]).norm())
        .fold(0.0_f64, f64::max);
    let r = check_diag_prop(&space, &a, &d, &CheckParams::default().with_r(1.0), &plan).unwrap();
    assert!((r.lhs - oracle).abs() <= 1e-12);
    assert_eq!(r.status, Status::Pass);
}

#[test]
fn tuple_norm_with_one_pair_reduces_to_the_power_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let space = DirectSumSpace::new(KernelSpace::hardy(2, 0.9).unwrap(), KernelSpace::hardy(3, 0.9).unwrap());
    let plan = CheckPlan::new(SamplePlan::polar_grid(64));
    let b = gaussian_matrix(&mut rng, 2, 3);
    let c = gaussian_matrix(&mut rng, 3, 2);
    let params = CheckParams::default().with_p(2.0).with_alpha(0.5);
    let r = check_tuple_berp(&space, &[(b, c)], &params, &plan).unwrap();
    assert_eq!(r.status, Status::Pass);
    assert!(r.lhs <= r.rhs);
}

#[test]
fn heinz_with_equal_operators_is_symmetric_in_alpha() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let space = KernelSpace::bergman(3, 0.9).unwrap();
    let plan = CheckPlan::new(SamplePlan::polar_grid(100));
    let g = gaussian_matrix(&mut rng, 3, 3);
    let a = power_psd(&(&g.adjoint() * &g), 0.5).unwrap();
    let x = gaussian_matrix(&mut rng, 3, 3);
    let params = CheckParams::default().with_r(2.0);
    let lo = check_thm_heinz(&space, &a, &a, &x, &params.with_alpha(0.2), &plan).unwrap();
    let hi = check_thm_heinz(&space, &a, &a, &x, &params.with_alpha(0.8), &plan).unwrap();
    assert!((lo.lhs - hi.lhs).abs() <= 1e-9 * hi.lhs.max(1.0));
    assert_eq!(lo.status, Status::Pass);
}

#[test]
fn hypotheses_are_enforced() {
    let space = KernelSpace::hardy(2, 0.9).unwrap();
    let plan = CheckPlan::default();
    let a = Matrix::identity(2);
    let bad = CheckParams::default().with_r(1.0);
    assert!(matches!(
        check_thm_heinz(&space, &a, &a, &a, &bad, &plan),
        Err(Error::BadParams { .. })
    ));
    let not_conjugate = CheckParams { p: 2.0, q: 3.0, ..CheckParams::default() };
    assert!(check_young_scalar(&[(1.0, 2.0)], &not_conjugate).is_err());
    assert!(check_young_scalar(&[(-1.0, 2.0)], &CheckParams::default()).is_err());
}

#[test]
fn commutator_sup_form_on_random_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    let space = KernelSpace::hardy(3, 0.95).unwrap();
    let plan = CheckPlan::new(SamplePlan::polar_grid(200));
    for sign in [Sign::Plus, Sign::Minus] {
        let a = gaussian_matrix(&mut rng, 3, 3);
        let x = gaussian_matrix(&mut rng, 3, 3);
        let r = check_prior_commutator(&space, &a, &x, sign, &CheckParams::default(), &plan).unwrap();
        assert_eq!(r.robustness, Robustness::SupEstimated);
        assert_eq!(r.status, Status::Pass, "{r:?}");
    }
}

#[test]
fn pointwise_and_sup_modes_agree_on_passing_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let space = orthonormal_pair(2, 3);
    let plan = CheckPlan::new(SamplePlan::exhaustive());
    let a = gaussian_matrix(&mut rng, 2, 2);
    let d = gaussian_matrix(&mut rng, 3, 3);
    for mode in [Mode::Pointwise, Mode::Sup, Mode::Both] {
        let params = CheckParams::default().with_r(2.0).with_mode(mode);
        let r = check_diag_prop(&space, &a, &d, &params, &plan).unwrap();
        assert_eq!(r.status, Status::Pass, "{mode:?}");
        assert_eq!(r.worst_pointwise_slack.is_some(), mode != Mode::Sup);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn no_checker_fails_on_random_instances(
        seed in any::<u64>(),
        id_idx in 0usize..22,
        family_idx in 0usize..4,
        dim in 2usize..5,
        trial in 0usize..8,
    ) {
        let family = [SpaceFamily::Hardy, SpaceFamily::Bergman, SpaceFamily::Discrete, SpaceFamily::Orthonormal][family_idx];
        let id = CHECK_IDS[id_idx];
        let cfg = TrialConfig { samples: 100, scalar_samples: 8, ..TrialConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let setting = Setting::build(family, dim, &cfg, uses_symmetric(id, trial), &mut rng).unwrap();
        let inst = gen_instance(id, &cfg, dim, setting.dsum.dims(), trial, None, &mut rng).unwrap();
        let r = evaluate(id, &setting, &inst).unwrap();
        prop_assert!(r.status != Status::Fail, "{}: {:?}", id, r);
        if r.robustness == Robustness::PointwiseRobust {
            prop_assert!(r.ratio() <= 1.0 + 1e-9);
        }
    }
}
