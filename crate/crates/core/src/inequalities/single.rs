//! Checkers on a single kernel space.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::berezin::{estimate_sup, KernelSample, RefineConfig};
use crate::error::Result;
use crate::hilbert::{KernelSpace, SamplePlan};
use crate::matcore::{
    abs_op, abs_power, numerical_radius, power_psd, spectral_norm, Matrix, C64, DEFAULT_RADIUS_REFINE_ITERS,
    DEFAULT_THETA_STEPS,
};

use super::engine::apply_links;
use super::{check_square_same, run_single, ChainLink, CheckParams, CheckPlan, InequalityCheck, SingleForm};

/// Sign in `AX ± XA`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sign {
    Plus,
    Minus,
}

/// Sampled `ber(m)` on a fixed sample.
pub(crate) fn ber_on(sample: &KernelSample<'_>, m: &Matrix, refine: &RefineConfig) -> Result<f64> {
    Ok(estimate_sup(sample, &SamplePlan::exhaustive(), refine, |k| m.quad_form(k).norm())?.value)
}

/// `⟨M k, k⟩` for Hermitian `M`, as a real number.
fn qre(m: &Matrix, k: &[C64]) -> f64 {
    m.quad_form(k).re
}

fn qabs(m: &Matrix, k: &[C64]) -> f64 {
    m.quad_form(k).norm()
}

/// `ber(A) ≤ w(A) ≤ ‖A‖`.
///
/// Per point `|Ã(λ)| ≤ ‖A‖`; the links check the sampled Berezin number
/// against the θ-grid radius plus its Lipschitz gap, and the radius against
/// the norm.
pub fn check_chain_111(
    space: &KernelSpace,
    a: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    check_square_same("eq111", space.dim(), &[("A", a)])?;
    let norm = spectral_norm(a);
    let lhs = |k: &[C64]| qabs(a, k);
    let pointwise = |k: &[C64]| (qabs(a, k), norm);
    let sup_rhs = |_: &KernelSample<'_>, _: &RefineConfig| Ok(norm);
    let (mut check, _) = run_single(
        space,
        plan,
        SingleForm {
            id: "eq111",
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &[("A", a)],
        },
    )?;
    let w = numerical_radius(a, DEFAULT_THETA_STEPS, DEFAULT_RADIUS_REFINE_ITERS);
    let gap = norm * 2.0 * PI / DEFAULT_THETA_STEPS as f64;
    check.links = vec![
        ChainLink::new("ber ≤ w_grid + ‖A‖·2π/steps", check.lhs, w + gap),
        ChainLink::new("w_grid ≤ ‖A‖", w, norm),
    ];
    apply_links(&mut check, true);
    Ok(check)
}

/// `ber(A*XB) ≤ ½ber(B*|X|B + A*|X*|A)`: the `α = 1/2` case of
/// [`check_thm_product_alpha`], evaluated by the same code path.
pub fn check_prior_product(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    product_alpha("eq1", space, a, b, x, &params.with_alpha(0.5), plan)
}

/// `ber(A*XB) ≤ ½ber(B*|X|^{2α}B + A*|X*|^{2(1−α)}A)`.
pub fn check_thm_product_alpha(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    product_alpha("thm2ii", space, a, b, x, params, plan)
}

/// `|X|^{2α}` and `|X*|^{2(1−α)}`.
fn alpha_pair(x: &Matrix, alpha: f64) -> Result<(Matrix, Matrix)> {
    Ok((abs_power(x, 2.0 * alpha)?, abs_power(&x.adjoint(), 2.0 * (1.0 - alpha))?))
}

fn product_alpha(
    id: &'static str,
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate(id)?;
    check_square_same(id, space.dim(), &[("A", a), ("B", b), ("X", x)])?;
    let (xa, xsa) = alpha_pair(x, params.alpha)?;
    let (ad, bd) = (a.adjoint(), b.adjoint());
    let l = &(&ad * x) * b;
    let m = (&(&(&bd * &xa) * b) + &(&(&ad * &xsa) * a)).scale(0.5);
    single_bound(id, space, &l, &m, params, plan, &[("A", a), ("B", b), ("X", x)])
}

/// `|⟨L k̂, k̂⟩| ≤ ⟨M k̂, k̂⟩` per point and `ber(L) ≤ ber(M)` at sup level.
fn single_bound(
    id: &'static str,
    space: &KernelSpace,
    l: &Matrix,
    m: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
    ops: &[(&str, &Matrix)],
) -> Result<InequalityCheck> {
    let lhs = |k: &[C64]| qabs(l, k);
    let pointwise = |k: &[C64]| (qabs(l, k), qre(m, k));
    let sup_rhs = |s: &KernelSample<'_>, refine: &RefineConfig| ber_on(s, m, refine);
    let (check, _) = run_single(
        space,
        plan,
        SingleForm {
            id,
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: ops,
        },
    )?;
    Ok(check)
}

/// `ber(AX ± XA) ≤ ber^{1/2}(A*A + AA*)·ber^{1/2}(X*X + XX*)`, sup level only.
pub fn check_prior_commutator(
    space: &KernelSpace,
    a: &Matrix,
    x: &Matrix,
    sign: Sign,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    check_square_same("commutator", space.dim(), &[("A", a), ("X", x)])?;
    let (ax, xa) = (a * x, x * a);
    let l = match sign {
        Sign::Plus => &ax + &xa,
        Sign::Minus => &ax - &xa,
    };
    let p = &(&a.adjoint() * a) + &(a * &a.adjoint());
    let q = &(&x.adjoint() * x) + &(x * &x.adjoint());
    let lhs = |k: &[C64]| qabs(&l, k);
    let sup_rhs =
        |s: &KernelSample<'_>, refine: &RefineConfig| Ok(ber_on(s, &p, refine)?.sqrt() * ber_on(s, &q, refine)?.sqrt());
    let (mut check, _) = run_single(
        space,
        plan,
        SingleForm {
            id: "commutator",
            params: *params,
            pointwise: None,
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &[("A", a), ("X", x)],
        },
    )?;
    check.notes.push(format!("sign: {sign:?}").to_lowercase());
    Ok(check)
}

/// `ber(A*XB + B*YA) ≤ 2√(‖X‖‖Y‖)·ber^{1/2}(B*B)·ber^{1/2}(AA*)`, sup level only.
pub fn check_prior_sandwich(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    y: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    let ops = [("A", a), ("B", b), ("X", x), ("Y", y)];
    check_square_same("eq4", space.dim(), &ops)?;
    let l = sandwich(a, b, x, y);
    let bb = &b.adjoint() * b;
    let aa = a * &a.adjoint();
    let coeff = 2.0 * (spectral_norm(x) * spectral_norm(y)).sqrt();
    let lhs = |k: &[C64]| qabs(&l, k);
    let sup_rhs = |s: &KernelSample<'_>, refine: &RefineConfig| {
        Ok(coeff * ber_on(s, &bb, refine)?.sqrt() * ber_on(s, &aa, refine)?.sqrt())
    };
    let (check, _) = run_single(
        space,
        plan,
        SingleForm {
            id: "eq4",
            params: *params,
            pointwise: None,
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &ops,
        },
    )?;
    Ok(check)
}

/// `A*XB + B*YA`.
fn sandwich(a: &Matrix, b: &Matrix, x: &Matrix, y: &Matrix) -> Matrix {
    let (ad, bd) = (a.adjoint(), b.adjoint());
    &(&(&ad * x) * b) + &(&(&bd * y) * a)
}

/// `ber^r(A*XB) ≤ ‖X‖^r·ber((1/p)(A*A)^{pr/2} + (1/q)(B*B)^{qr/2})`.
pub fn check_thm_product_young(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate("thm2i")?;
    let ops = [("A", a), ("B", b), ("X", x)];
    check_square_same("thm2i", space.dim(), &ops)?;
    let CheckParams { r, p, q, .. } = *params;
    let l = &(&a.adjoint() * x) * b;
    let m = &abs_power(a, p * r)?.scale(1.0 / p) + &abs_power(b, q * r)?.scale(1.0 / q);
    let xr = spectral_norm(x).powf(r);
    let lhs = |k: &[C64]| qabs(&l, k).powf(r);
    let pointwise = |k: &[C64]| (qabs(&l, k).powf(r), xr * qre(&m, k));
    let sup_rhs = |s: &KernelSample<'_>, refine: &RefineConfig| Ok(xr * ber_on(s, &m, refine)?);
    let (check, _) = run_single(
        space,
        plan,
        SingleForm {
            id: "thm2i",
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &ops,
        },
    )?;
    Ok(check)
}

/// `ber(A*XB + B*YA) ≤ ½ber(B*|X|^{2α}B + A*|X*|^{2(1−α)}A + A*|Y|^{2α}A + B*|Y*|^{2(1−α)}B)`.
pub fn check_thm_sym(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    y: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate("eq5")?;
    let ops = [("A", a), ("B", b), ("X", x), ("Y", y)];
    check_square_same("eq5", space.dim(), &ops)?;
    let (p, q) = sym_terms(a, b, x, y, params.alpha)?;
    let m = (&p + &q).scale(0.5);
    single_bound("eq5", space, &sandwich(a, b, x, y), &m, params, plan, &ops)
}

/// `(B*|X|^{2α}B + A*|X*|^{2(1−α)}A, A*|Y|^{2α}A + B*|Y*|^{2(1−α)}B)`.
fn sym_terms(a: &Matrix, b: &Matrix, x: &Matrix, y: &Matrix, alpha: f64) -> Result<(Matrix, Matrix)> {
    let (ad, bd) = (a.adjoint(), b.adjoint());
    let (xa, xsa) = alpha_pair(x, alpha)?;
    let (ya, ysa) = alpha_pair(y, alpha)?;
    let p = &(&(&bd * &xa) * b) + &(&(&ad * &xsa) * a);
    let q = &(&(&ad * &ya) * a) + &(&(&bd * &ysa) * b);
    Ok((p, q))
}

/// `ber(L) ≤ ½ber(P) + ½ber(Q)` with the per-point form `|⟨Lk̂,k̂⟩| ≤ ½⟨Pk̂,k̂⟩ + ½⟨Qk̂,k̂⟩`.
#[allow(clippy::too_many_arguments)]
fn split_bound(
    id: &'static str,
    space: &KernelSpace,
    l: &Matrix,
    p: &Matrix,
    q: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
    ops: &[(&str, &Matrix)],
) -> Result<InequalityCheck> {
    let lhs = |k: &[C64]| qabs(l, k);
    let pointwise = |k: &[C64]| (qabs(l, k), 0.5 * qre(p, k) + 0.5 * qre(q, k));
    let sup_rhs =
        |s: &KernelSample<'_>, refine: &RefineConfig| Ok(0.5 * ber_on(s, p, refine)? + 0.5 * ber_on(s, q, refine)?);
    let (check, _) = run_single(
        space,
        plan,
        SingleForm {
            id,
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: ops,
        },
    )?;
    Ok(check)
}

/// `ber(A*XB + B*YA) ≤ ½ber(B*|X|B + A*|X*|A) + ½ber(A*|Y|A + B*|Y*|B)`.
pub fn check_remark_split(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    y: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    let params = params.with_alpha(0.5);
    params.validate("remark1")?;
    let ops = [("A", a), ("B", b), ("X", x), ("Y", y)];
    check_square_same("remark1", space.dim(), &ops)?;
    let (p, q) = sym_terms(a, b, x, y, 0.5)?;
    split_bound("remark1", space, &sandwich(a, b, x, y), &p, &q, &params, plan, &ops)
}

/// `ber(AB + B*A) ≤ ½ber(|A| + |A*|) + ½ber(B*(|A| + |A*|)B)`.
pub fn check_remark_abs(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    let params = params.with_alpha(0.5);
    params.validate("remark2")?;
    let ops = [("A", a), ("B", b)];
    check_square_same("remark2", space.dim(), &ops)?;
    let l = &(a * b) + &(&b.adjoint() * a);
    let s = &abs_op(a)? + &abs_op(&a.adjoint())?;
    let bsb = &(&b.adjoint() * &s) * b;
    split_bound("remark2", space, &l, &s, &bsb, &params, plan, &ops)
}

/// `ber^r(A^α X B^{1−α}) ≤ ‖X‖^r(ber(αA^r + (1−α)B^r) − inf η)` with
/// `η = r₀(⟨A^r k̂,k̂⟩^{1/2} − ⟨B^r k̂,k̂⟩^{1/2})²`, checked per point as
/// `|⟨A^αXB^{1−α}k̂,k̂⟩|^r + ‖X‖^r η ≤ ‖X‖^r⟨(αA^r + (1−α)B^r)k̂,k̂⟩`.
pub fn check_thm_alpha_power(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate("eq10")?;
    let ops = [("A", a), ("B", b), ("X", x)];
    check_square_same("eq10", space.dim(), &ops)?;
    let CheckParams { r, alpha, .. } = *params;
    let r0 = params.r0();
    let l = &(&power_psd(a, alpha)? * x) * &power_psd(b, 1.0 - alpha)?;
    let ar = power_psd(a, r)?;
    let br = power_psd(b, r)?;
    let m = &ar.scale(alpha) + &br.scale(1.0 - alpha);
    let xr = spectral_norm(x).powf(r);
    let eta = |k: &[C64]| {
        let d = qre(&ar, k).max(0.0).sqrt() - qre(&br, k).max(0.0).sqrt();
        r0 * d * d
    };
    let lhs = |k: &[C64]| qabs(&l, k).powf(r);
    let pointwise = |k: &[C64]| (qabs(&l, k).powf(r) + xr * eta(k), xr * qre(&m, k));
    let sup_rhs = |s: &KernelSample<'_>, refine: &RefineConfig| {
        let inf_eta = s.map(eta).into_iter().fold(f64::INFINITY, f64::min);
        Ok(xr * (ber_on(s, &m, refine)? - inf_eta))
    };
    let (check, _) = run_single(
        space,
        plan,
        SingleForm {
            id: "eq10",
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &ops,
        },
    )?;
    Ok(check)
}

/// `ber^r(H_α) ≤ (‖X‖^r/2)·ber(A^r + B^r)
///  ≤ (‖X‖^r/2)·(ber(αA^r + (1−α)B^r) + ber((1−α)A^r + αB^r))`
/// with `H_α = (A^α X B^{1−α} + A^{1−α} X B^α)/2`.
pub fn check_thm_heinz(
    space: &KernelSpace,
    a: &Matrix,
    b: &Matrix,
    x: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate("heinz")?;
    let ops = [("A", a), ("B", b), ("X", x)];
    check_square_same("heinz", space.dim(), &ops)?;
    let CheckParams { r, alpha, .. } = *params;
    let h = heinz_mean(a, b, x, alpha)?;
    let ar = power_psd(a, r)?;
    let br = power_psd(b, r)?;
    let sum = &ar + &br;
    let half_xr = 0.5 * spectral_norm(x).powf(r);
    let lhs = |k: &[C64]| qabs(&h, k).powf(r);
    let pointwise = |k: &[C64]| (qabs(&h, k).powf(r), half_xr * qre(&sum, k));
    let sup_rhs = |s: &KernelSample<'_>, refine: &RefineConfig| Ok(half_xr * ber_on(s, &sum, refine)?);
    let (mut check, sample) = run_single(
        space,
        plan,
        SingleForm {
            id: "heinz",
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &ops,
        },
    )?;

    let off = RefineConfig::disabled();
    let p = &ar.scale(alpha) + &br.scale(1.0 - alpha);
    let q = &ar.scale(1.0 - alpha) + &br.scale(alpha);
    let middle = half_xr * ber_on(&sample, &sum, &off)?;
    let ber_p = ber_on(&sample, &p, &off)?;
    let ber_q = ber_on(&sample, &q, &off)?;
    check.links = vec![ChainLink::new("bracketed second inequality", middle, half_xr * (ber_p + ber_q))];
    apply_links(&mut check, true);
    let literal = half_xr * ber_p + ber_q;
    let holds = !super::violates(middle, literal, params.tolerance);
    check.notes.push(format!(
        "literal second line (‖X‖^r/2 on the first term only): {}",
        if holds { "holds" } else { "fails" }
    ));
    Ok(check)
}

/// `(A^α X B^{1−α} + A^{1−α} X B^α)/2`.
pub(crate) fn heinz_mean(a: &Matrix, b: &Matrix, x: &Matrix, alpha: f64) -> Result<Matrix> {
    let t1 = &(&power_psd(a, alpha)? * x) * &power_psd(b, 1.0 - alpha)?;
    let t2 = &(&power_psd(a, 1.0 - alpha)? * x) * &power_psd(b, alpha)?;
    Ok((&t1 + &t2).scale(0.5))
}
