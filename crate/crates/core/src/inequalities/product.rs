//! Checkers on a direct sum `H₁ ⊕ H₂`, evaluated on the product domain.

use crate::berezin::{KernelSample, RefineConfig};
use crate::blocks::{check_blocks, component_ber, BlockOperator, DirectSumSpace, PairView};
use crate::error::{Error, Result};
use crate::matcore::{abs_op, abs_power, func_calculus, singular_values, Matrix, ScalarFunction, DEFAULT_CLAMP};

use super::{run_product, validate_fg, CheckParams, CheckPlan, InequalityCheck, ProductForm};

/// Per pair `lhs(k̂) ≤ ⟨diag(P₁, P₂)k̂, k̂⟩`; at sup level
/// `sup lhs ≤ max{ber(P₁), ber(P₂)}` with component estimates.
#[allow(clippy::too_many_arguments)]
fn diag_dominated(
    id: &'static str,
    space: &DirectSumSpace,
    lhs: &dyn Fn(PairView<'_>) -> f64,
    p1: &Matrix,
    p2: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
    ops: &[(&str, &Matrix)],
) -> Result<InequalityCheck> {
    let bound = BlockOperator::diag(p1.clone(), p2.clone())?.assemble();
    let pointwise = |v: PairView<'_>| (lhs(v), bound.quad_form(v.kernel).re);
    let sup_rhs = |s1: &KernelSample<'_>, s2: &KernelSample<'_>, refine: &RefineConfig| -> Result<f64> {
        Ok(component_ber(s1, p1, refine)?.max(component_ber(s2, p2, refine)?))
    };
    let (check, _) = run_product(
        space,
        plan,
        ProductForm {
            id,
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: lhs,
            sup_rhs: &sup_rhs,
            operators: ops,
        },
    )?;
    Ok(check)
}

/// `ber^r([[0,B],[C,0]]) ≤ max{ber(f^{pr}(|C|)/p + g^{qr}(|B*|)/q), ber(f^{pr}(|B|)/p + g^{qr}(|C*|)/q)}`
/// for `f·g = id`.
pub fn check_offdiag_fg(
    space: &DirectSumSpace,
    b: &Matrix,
    c: &Matrix,
    f: &ScalarFunction,
    g: &ScalarFunction,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate("eq7")?;
    let blk = BlockOperator::offdiag(b.clone(), c.clone())?;
    check_blocks(space, &blk)?;
    let (bs, cs) = (b.adjoint(), c.adjoint());
    let mut spectrum = Vec::new();
    for m in [b, c, &bs, &cs] {
        spectrum.extend(singular_values(m));
    }
    validate_fg(f, g, &spectrum)?;
    let CheckParams { r, p, q, .. } = *params;
    let fp = f.powered(p * r);
    let gq = g.powered(q * r);
    let apply = |m: &Matrix, h: &ScalarFunction| func_calculus(&abs_op(m)?, h, DEFAULT_CLAMP);
    let p1 = &apply(c, &fp)?.scale(1.0 / p) + &apply(&bs, &gq)?.scale(1.0 / q);
    let p2 = &apply(b, &fp)?.scale(1.0 / p) + &apply(&cs, &gq)?.scale(1.0 / q);
    let t = blk.assemble();
    let lhs = |v: PairView<'_>| t.quad_form(v.kernel).norm().powf(r);
    let mut check = diag_dominated("eq7", space, &lhs, &p1, &p2, params, plan, &[("B", b), ("C", c)])?;
    check.notes.push(format!("f = {}, g = {}", f.name(), g.name()));
    Ok(check)
}

/// The `f = t^α, g = t^{1−α}, p = q = 2` instance:
/// `ber^r([[0,B],[C,0]]) ≤ ½max{ber(|C|^{2rα} + |B*|^{2r(1−α)}), ber(|B|^{2rα} + |C*|^{2r(1−α)})}`.
pub fn check_offdiag_power(
    space: &DirectSumSpace,
    b: &Matrix,
    c: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    let params = CheckParams { p: 2.0, q: 2.0, ..*params };
    params.validate("eq7cor")?;
    let blk = BlockOperator::offdiag(b.clone(), c.clone())?;
    check_blocks(space, &blk)?;
    let CheckParams { r, alpha, .. } = params;
    let (bs, cs) = (b.adjoint(), c.adjoint());
    let (ef, eg) = (2.0 * r * alpha, 2.0 * r * (1.0 - alpha));
    let p1 = (&abs_power(c, ef)? + &abs_power(&bs, eg)?).scale(0.5);
    let p2 = (&abs_power(b, ef)? + &abs_power(&cs, eg)?).scale(0.5);
    let t = blk.assemble();
    let lhs = |v: PairView<'_>| t.quad_form(v.kernel).norm().powf(r);
    diag_dominated("eq7cor", space, &lhs, &p1, &p2, &params, plan, &[("B", b), ("C", c)])
}

/// `ber_p^p(T₁,…,T_n) ≤ max{ber(Σ α|Cᵢ|^p + (1−α)|Bᵢ*|^p), ber(Σ α|Bᵢ|^p + (1−α)|Cᵢ*|^p)}`
/// for `Tᵢ = [[0,Bᵢ],[Cᵢ,0]]`.
pub fn check_tuple_berp(
    space: &DirectSumSpace,
    pairs: &[(Matrix, Matrix)],
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate("tuple_berp")?;
    if pairs.is_empty() {
        return Err(Error::DimensionMismatch("tuple_berp: empty operator tuple".into()));
    }
    let CheckParams { p, alpha, .. } = *params;
    let (n1, n2) = space.dims();
    let mut p1 = Matrix::zeros(n1, n1);
    let mut p2 = Matrix::zeros(n2, n2);
    let mut ts = Vec::with_capacity(pairs.len());
    for (b, c) in pairs {
        let blk = BlockOperator::offdiag(b.clone(), c.clone())?;
        check_blocks(space, &blk)?;
        let (bs, cs) = (b.adjoint(), c.adjoint());
        p1 = &p1 + &(&abs_power(c, p)?.scale(alpha) + &abs_power(&bs, p)?.scale(1.0 - alpha));
        p2 = &p2 + &(&abs_power(b, p)?.scale(alpha) + &abs_power(&cs, p)?.scale(1.0 - alpha));
        ts.push(blk.assemble());
    }
    let names: Vec<(String, String)> = (1..=pairs.len()).map(|i| (format!("B{i}"), format!("C{i}"))).collect();
    let ops: Vec<(&str, &Matrix)> = names
        .iter()
        .zip(pairs)
        .flat_map(|((nb, nc), (b, c))| [(nb.as_str(), b), (nc.as_str(), c)])
        .collect();
    let lhs = |v: PairView<'_>| ts.iter().map(|t| t.quad_form(v.kernel).norm().powf(p)).sum::<f64>();
    diag_dominated("tuple_berp", space, &lhs, &p1, &p2, params, plan, &ops)
}

/// `ber^r(diag(A,D)) ≤ ½max{ber(|A|^r + |A*|^r), ber(|D|^r + |D*|^r)}`.
pub fn check_diag_prop(
    space: &DirectSumSpace,
    a: &Matrix,
    d: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    params.validate("eq14")?;
    let blk = BlockOperator::diag(a.clone(), d.clone())?;
    check_blocks(space, &blk)?;
    let r = params.r;
    let p1 = (&abs_power(a, r)? + &abs_power(&a.adjoint(), r)?).scale(0.5);
    let p2 = (&abs_power(d, r)? + &abs_power(&d.adjoint(), r)?).scale(0.5);
    let t = blk.assemble();
    let lhs = |v: PairView<'_>| t.quad_form(v.kernel).norm().powf(r);
    diag_dominated("eq14", space, &lhs, &p1, &p2, params, plan, &[("A", a), ("D", d)])
}

/// `ber([[A,B],[C,D]]) ≤ ½max{ber(|C|+|B*|), ber(|B|+|C*|)} + ½max{ber(|A|+|A*|), ber(|D|+|D*|)}`,
/// sup level only.
pub fn check_full_matrix_cor(
    space: &DirectSumSpace,
    a: &Matrix,
    b: &Matrix,
    c: &Matrix,
    d: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    let blk = BlockOperator::new(a.clone(), b.clone(), c.clone(), d.clone())?;
    check_blocks(space, &blk)?;
    let abs_sum = |x: &Matrix, y: &Matrix| -> Result<Matrix> { Ok(&abs_op(x)? + &abs_op(y)?) };
    let off1 = abs_sum(c, &b.adjoint())?;
    let off2 = abs_sum(b, &c.adjoint())?;
    let diag1 = abs_sum(a, &a.adjoint())?;
    let diag2 = abs_sum(d, &d.adjoint())?;
    let t = blk.assemble();
    let lhs = |v: PairView<'_>| t.quad_form(v.kernel).norm();
    let sup_rhs = |s1: &KernelSample<'_>, s2: &KernelSample<'_>, refine: &RefineConfig| -> Result<f64> {
        let off = component_ber(s1, &off1, refine)?.max(component_ber(s2, &off2, refine)?);
        let diag = component_ber(s1, &diag1, refine)?.max(component_ber(s2, &diag2, refine)?);
        Ok(0.5 * off + 0.5 * diag)
    };
    let (mut check, _) = run_product(
        space,
        plan,
        ProductForm {
            id: "full_cor",
            params: *params,
            pointwise: None,
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &[("A", a), ("B", b), ("C", c), ("D", d)],
        },
    )?;
    if b == c && a == d {
        check.notes.push("symmetric instance [[A,B],[B,A]]".into());
    }
    Ok(check)
}
