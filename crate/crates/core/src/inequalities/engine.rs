//! Shared evaluation loop: per-λ scan, sup-level comparison and the SUSPECT
//! protocol.

use crate::berezin::{estimate_sup, KernelSample, RefineConfig};
use crate::blocks::{DirectSumSpace, PairView, ProductPlan, ProductSample};
use crate::error::Result;
use crate::hilbert::{KernelSpace, SampleStrategy};
use crate::matcore::{Matrix, C64};

use super::{
    robustness_of, tolerance_scale, violates, CheckParams, CheckPlan, InequalityCheck, Robustness,
    Status, Witness, WitnessPoint, SUSPECT_RETRIES,
};

type SupRhs<'f> = dyn Fn(&KernelSample<'_>, &RefineConfig) -> Result<f64> + Sync + 'f;
type PairSupRhs<'f> = dyn Fn(&KernelSample<'_>, &KernelSample<'_>, &RefineConfig) -> Result<f64> + 'f;

/// A check on a single kernel space.
pub(crate) struct SingleForm<'f> {
    pub id: &'static str,
    pub params: CheckParams,
    /// Per-λ `(lhs_λ, rhs_λ)`; `None` for checks verified at sup level only.
    pub pointwise: Option<&'f (dyn Fn(&[C64]) -> (f64, f64) + Sync + 'f)>,
    /// Quantity whose supremum is the published left-hand side.
    pub sup_lhs: &'f (dyn Fn(&[C64]) -> f64 + Sync + 'f),
    /// Published right-hand side estimated on a sample.
    pub sup_rhs: &'f SupRhs<'f>,
    pub operators: &'f [(&'f str, &'f Matrix)],
}

/// A check on the product domain of a direct sum.
pub(crate) struct ProductForm<'f> {
    pub id: &'static str,
    pub params: CheckParams,
    pub pointwise: Option<&'f (dyn Fn(PairView<'_>) -> (f64, f64) + 'f)>,
    pub sup_lhs: &'f (dyn Fn(PairView<'_>) -> f64 + 'f),
    /// Right-hand side from the two component samples.
    pub sup_rhs: &'f PairSupRhs<'f>,
    pub operators: &'f [(&'f str, &'f Matrix)],
}

/// Index and value of the smallest normalized slack.
fn worst_index(values: &[(f64, f64)]) -> usize {
    let mut worst = 0;
    let mut worst_key = f64::INFINITY;
    for (i, &(l, r)) in values.iter().enumerate() {
        let key = (r - l) / tolerance_scale(l, r);
        let key = if key.is_nan() { f64::NEG_INFINITY } else { key };
        if key < worst_key {
            worst_key = key;
            worst = i;
        }
    }
    worst
}

struct Scan {
    worst: usize,
    values: Vec<(f64, f64)>,
    violated: bool,
}

fn scan(values: Vec<(f64, f64)>, tol: f64) -> Scan {
    let worst = worst_index(&values);
    let violated = values.iter().any(|&(l, r)| violates(l, r, tol));
    Scan {
        worst,
        values,
        violated,
    }
}

fn blank_check(id: &str, params: CheckParams, robustness: Robustness, ops: &[(&str, &Matrix)]) -> InequalityCheck {
    InequalityCheck {
        check_id: id.to_string(),
        params,
        robustness,
        lhs: 0.0,
        rhs: 0.0,
        slack: 0.0,
        worst_pointwise_slack: None,
        status: Status::Pass,
        links: Vec::new(),
        witness: Witness::with_operators(ops),
        notes: Vec::new(),
    }
}

/// Runs a single-space check. The returned sample is the one the check was
/// decided on (plan points plus the refined maximizer of the left side).
pub(crate) fn run_single<'s>(
    space: &'s KernelSpace,
    plan: &CheckPlan,
    form: SingleForm<'_>,
) -> Result<(InequalityCheck, KernelSample<'s>)> {
    form.params.validate(form.id)?;
    let robustness = robustness_of(form.id)?;
    let tol = form.params.tolerance;
    let mut check = blank_check(form.id, form.params, robustness, form.operators);

    let mut sample = KernelSample::new(space, &plan.sample)?;
    let est = estimate_sup(&sample, &plan.sample, &plan.refine, form.sup_lhs)?;
    if est.refined && !sample.points().contains(&est.argmax) {
        sample.push(est.argmax)?;
    }

    let pointwise = match form.pointwise {
        Some(pw) if robustness == Robustness::PointwiseRobust && form.params.mode.wants_pointwise() => {
            Some(scan(sample.map(pw), tol))
        }
        _ => None,
    };
    if let Some(s) = &pointwise {
        let (l, r) = s.values[s.worst];
        check.worst_pointwise_slack = Some(r - l);
        if s.violated {
            check.status = Status::Fail;
        }
    }

    let sup_level = form.params.mode.wants_sup() || pointwise.is_none();
    if sup_level {
        let lhs = est.value;
        let mut rhs = (form.sup_rhs)(&sample, &RefineConfig::disabled())?;
        if violates(lhs, rhs, tol) && plan.sample.strategy != SampleStrategy::Exhaustive {
            for attempt in 1..=SUSPECT_RETRIES {
                let mut bigger = KernelSample::new(space, &plan.sample.scaled(1 << attempt))?;
                for p in sample.points() {
                    bigger.push(*p)?;
                }
                rhs = (form.sup_rhs)(&bigger, &plan.refine)?;
                if !violates(lhs, rhs, tol) {
                    break;
                }
            }
        }
        if violates(lhs, rhs, tol) {
            check.status = check.status.max(Status::Suspect);
            check
                .notes
                .push(format!("supremum form violated on the sample: {lhs:.12e} > {rhs:.12e}"));
        }
        check.lhs = lhs;
        check.rhs = rhs;
        check.witness.point = Some(WitnessPoint::Single(est.argmax));
    } else if let Some(s) = &pointwise {
        let (l, r) = s.values[s.worst];
        check.lhs = l;
        check.rhs = r;
        check.witness.point = Some(WitnessPoint::Single(sample.points()[s.worst]));
    }
    if let (Some(s), true) = (&pointwise, check.status == Status::Fail) {
        check.witness.point = Some(WitnessPoint::Single(sample.points()[s.worst]));
        let (l, r) = s.values[s.worst];
        check
            .notes
            .push(format!("per-point form violated at {}: {l:.12e} > {r:.12e}", sample.points()[s.worst]));
    }
    check.slack = check.rhs - check.lhs;
    Ok((check, sample))
}

/// Runs a product-domain check. No continuous refinement is done on the
/// product, so every pair's components stay inside the component samples.
pub(crate) fn run_product<'s>(
    space: &'s DirectSumSpace,
    plan: &CheckPlan,
    form: ProductForm<'_>,
) -> Result<(InequalityCheck, ProductSample<'s>)> {
    form.params.validate(form.id)?;
    let robustness = robustness_of(form.id)?;
    let tol = form.params.tolerance;
    let mut check = blank_check(form.id, form.params, robustness, form.operators);

    let pplan = ProductPlan::for_space(space, &plan.sample, plan.max_pairs, plan.pair_seed);
    let sample = ProductSample::new(space, &pplan)?;
    let lhs_values = sample.map(form.sup_lhs);
    let (lhs_sup, lhs_idx) = crate::berezin::argmax(&lhs_values);

    let pointwise = match form.pointwise {
        Some(pw) if robustness == Robustness::PointwiseRobust && form.params.mode.wants_pointwise() => {
            Some(scan(sample.map(pw), tol))
        }
        _ => None,
    };
    if let Some(s) = &pointwise {
        let (l, r) = s.values[s.worst];
        check.worst_pointwise_slack = Some(r - l);
        if s.violated {
            check.status = Status::Fail;
        }
    }

    let pair_point = |idx: usize| {
        let (a, b) = sample.pair_points(idx);
        WitnessPoint::Pair(a, b)
    };
    let sup_level = form.params.mode.wants_sup() || pointwise.is_none();
    if sup_level {
        let mut rhs = (form.sup_rhs)(sample.first(), sample.second(), &RefineConfig::disabled())?;
        let exhaustive = pplan.first.strategy == SampleStrategy::Exhaustive
            && pplan.second.strategy == SampleStrategy::Exhaustive;
        if violates(lhs_sup, rhs, tol) && !exhaustive {
            for attempt in 1..=SUSPECT_RETRIES {
                let bigger = pplan.scaled(1 << attempt);
                let mut s1 = KernelSample::new(space.first(), &bigger.first)?;
                let mut s2 = KernelSample::new(space.second(), &bigger.second)?;
                for p in sample.first().points() {
                    s1.push(*p)?;
                }
                for p in sample.second().points() {
                    s2.push(*p)?;
                }
                rhs = (form.sup_rhs)(&s1, &s2, &plan.refine)?;
                if !violates(lhs_sup, rhs, tol) {
                    break;
                }
            }
        }
        if violates(lhs_sup, rhs, tol) {
            check.status = check.status.max(Status::Suspect);
            check
                .notes
                .push(format!("supremum form violated on the sample: {lhs_sup:.12e} > {rhs:.12e}"));
        }
        check.lhs = lhs_sup;
        check.rhs = rhs;
        check.witness.point = Some(pair_point(lhs_idx));
    } else if let Some(s) = &pointwise {
        let (l, r) = s.values[s.worst];
        check.lhs = l;
        check.rhs = r;
        check.witness.point = Some(pair_point(s.worst));
    }
    if let (Some(s), true) = (&pointwise, check.status == Status::Fail) {
        check.witness.point = Some(pair_point(s.worst));
        let (l, r) = s.values[s.worst];
        check.notes.push(format!("per-pair form violated: {l:.12e} > {r:.12e}"));
    }
    check.slack = check.rhs - check.lhs;
    Ok((check, sample))
}

/// Applies auxiliary chain links to a finished check: a violated link fails
/// the check when it is sample-robust, otherwise marks it SUSPECT.
pub(crate) fn apply_links(check: &mut InequalityCheck, robust: bool) {
    let tol = check.params.tolerance;
    for link in &check.links {
        if !link.holds(tol) {
            let status = if robust { Status::Fail } else { Status::Suspect };
            check.status = check.status.max(status);
            check.notes.push(format!(
                "link `{}` violated: {:.12e} > {:.12e}",
                link.name, link.lhs, link.rhs
            ));
        }
    }
}
