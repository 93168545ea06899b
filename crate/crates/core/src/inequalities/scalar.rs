//! Scalar and vector inequalities used inside the proofs: Young/Jensen, the
//! refined Young inequality, mixed Schwarz and McCarthy.

use crate::error::{Error, Result};
use crate::matcore::{abs_power, func_calculus, inner, power_psd, singular_values, vec_norm, Matrix, ScalarFunction, C64, DEFAULT_CLAMP};

use super::{
    robustness_of, tolerance_scale, validate_fg, ChainLink, CheckParams, InequalityCheck, Status, Witness, WitnessPoint,
};

/// Tracks the tightest instance of each link over many samples.
struct Tally {
    tol: f64,
    links: Vec<Option<(ChainLink, f64)>>,
    worst: Option<(f64, f64, f64, WitnessPoint)>,
    violated: bool,
}

impl Tally {
    fn new(tol: f64, n_links: usize) -> Self {
        Self {
            tol,
            links: vec![None; n_links],
            worst: None,
            violated: false,
        }
    }

    fn record(&mut self, instance: &[(&str, f64, f64)], at: impl Fn() -> WitnessPoint) {
        for (slot, &(name, l, r)) in self.links.iter_mut().zip(instance) {
            let key = normalized_slack(l, r);
            if slot.as_ref().is_none_or(|(_, k)| key < *k) {
                *slot = Some((ChainLink::new(name, l, r), key));
            }
            if super::violates(l, r, self.tol) {
                self.violated = true;
            }
            if self.worst.as_ref().is_none_or(|w| key < w.0) {
                self.worst = Some((key, l, r, at()));
            }
        }
    }

    fn finish(self, id: &str, params: CheckParams, operators: Witness) -> Result<InequalityCheck> {
        let (_, lhs, rhs, point) = self
            .worst
            .ok_or_else(|| Error::bad_params(id, "no samples supplied"))?;
        Ok(InequalityCheck {
            check_id: id.to_string(),
            params,
            robustness: robustness_of(id)?,
            lhs,
            rhs,
            slack: rhs - lhs,
            worst_pointwise_slack: Some(rhs - lhs),
            status: if self.violated { Status::Fail } else { Status::Pass },
            links: self.links.into_iter().flatten().map(|(l, _)| l).collect(),
            witness: Witness {
                point: Some(point),
                ..operators
            },
            notes: Vec::new(),
        })
    }
}

fn normalized_slack(l: f64, r: f64) -> f64 {
    let s = (r - l) / tolerance_scale(l, r);
    if s.is_nan() {
        f64::NEG_INFINITY
    } else {
        s
    }
}

fn check_nonnegative(id: &str, samples: &[(f64, f64)]) -> Result<()> {
    if let Some(&(a, b)) = samples.iter().find(|(a, b)| !(*a >= 0.0 && *b >= 0.0)) {
        return Err(Error::bad_params(id, format!("samples must be nonnegative, got ({a}, {b})")));
    }
    Ok(())
}

/// Weighted Young/Jensen chains
/// `a^α b^{1−α} ≤ αa + (1−α)b ≤ (αa^r + (1−α)b^r)^{1/r}` and
/// `ab ≤ a^p/p + b^q/q ≤ (a^{pr}/p + b^{qr}/q)^{1/r}`.
pub fn check_young_scalar(samples: &[(f64, f64)], params: &CheckParams) -> Result<InequalityCheck> {
    params.validate("young")?;
    check_nonnegative("young", samples)?;
    let CheckParams { r, p, q, alpha, .. } = *params;
    let mut tally = Tally::new(params.tolerance, 4);
    for &(a, b) in samples {
        let geo = a.powf(alpha) * b.powf(1.0 - alpha);
        let arith = alpha * a + (1.0 - alpha) * b;
        let power = (alpha * a.powf(r) + (1.0 - alpha) * b.powf(r)).powf(1.0 / r);
        let young = a.powf(p) / p + b.powf(q) / q;
        let young_r = (a.powf(p * r) / p + b.powf(q * r) / q).powf(1.0 / r);
        tally.record(
            &[
                ("geometric ≤ arithmetic", geo, arith),
                ("arithmetic ≤ power mean", arith, power),
                ("ab ≤ a^p/p + b^q/q", a * b, young),
                ("a^p/p + b^q/q ≤ power mean", young, young_r),
            ],
            || WitnessPoint::Scalars { a, b },
        );
    }
    tally.finish("young", *params, Witness::default())
}

/// `a^α b^{1−α} ≤ αa + (1−α)b − r₀(√a − √b)²`.
pub fn check_refined_young(samples: &[(f64, f64)], params: &CheckParams) -> Result<InequalityCheck> {
    params.validate("refined_young")?;
    check_nonnegative("refined_young", samples)?;
    let alpha = params.alpha;
    let r0 = params.r0();
    let mut tally = Tally::new(params.tolerance, 1);
    for &(a, b) in samples {
        let geo = a.powf(alpha) * b.powf(1.0 - alpha);
        let d = a.sqrt() - b.sqrt();
        let rhs = alpha * a + (1.0 - alpha) * b - r0 * d * d;
        tally.record(&[("refined Young", geo, rhs)], || WitnessPoint::Scalars { a, b });
    }
    tally.finish("refined_young", *params, Witness::default())
}

/// Mixed Schwarz inequalities for `T` over vector pairs `(x, y)`:
/// `|⟨Tx,y⟩|² ≤ ⟨|T|^{2α}x,x⟩⟨|T*|^{2(1−α)}y,y⟩` and
/// `|⟨Tx,y⟩| ≤ ‖f(|T|)x‖·‖g(|T*|)y‖` (default `f = g = √·`).
pub fn check_mixed_schwarz(
    t: &Matrix,
    vectors: &[(Vec<C64>, Vec<C64>)],
    params: &CheckParams,
    fg: Option<(&ScalarFunction, &ScalarFunction)>,
) -> Result<InequalityCheck> {
    params.validate("mixed_schwarz")?;
    let alpha = params.alpha;
    let sqrt = ScalarFunction::sqrt();
    let (f, g) = fg.unwrap_or((&sqrt, &sqrt));
    validate_fg(f, g, &singular_values(t))?;

    let t_abs_a = abs_power(t, 2.0 * alpha)?;
    let ts = t.adjoint();
    let ts_abs_a = abs_power(&ts, 2.0 * (1.0 - alpha))?;
    let f_abs = func_calculus(&abs_power(t, 1.0)?, f, DEFAULT_CLAMP)?;
    let g_abs = func_calculus(&abs_power(&ts, 1.0)?, g, DEFAULT_CLAMP)?;

    let mut tally = Tally::new(params.tolerance, 2);
    for (x, y) in vectors {
        if x.len() != t.cols() || y.len() != t.rows() {
            return Err(Error::DimensionMismatch(format!(
                "mixed_schwarz: vectors of length ({}, {}) for a {}×{} operator",
                x.len(),
                y.len(),
                t.rows(),
                t.cols()
            )));
        }
        let txy = inner(&t.mul_vec(x), y).norm();
        let part_a = t_abs_a.quad_form(x).re * ts_abs_a.quad_form(y).re;
        let part_b = vec_norm(&f_abs.mul_vec(x)) * vec_norm(&g_abs.mul_vec(y));
        tally.record(
            &[("part (a)", txy * txy, part_a), ("part (b)", txy, part_b)],
            || WitnessPoint::Vectors {
                x: x.clone(),
                y: y.clone(),
            },
        );
    }
    tally.finish("mixed_schwarz", *params, Witness::with_operators(&[("T", t)]))
}

/// McCarthy: `⟨Tx,x⟩^r ≤ ⟨T^r x,x⟩` for `r ≥ 1`, reversed for `0 < r ≤ 1`,
/// for positive `T` and unit `x`.
pub fn check_mccarthy(t: &Matrix, xs: &[Vec<C64>], params: &CheckParams) -> Result<InequalityCheck> {
    params.validate("mccarthy")?;
    let r = params.r;
    let tr = power_psd(t, r)?;
    let mut tally = Tally::new(params.tolerance, 1);
    for x in xs {
        if x.len() != t.rows() {
            return Err(Error::DimensionMismatch(format!(
                "mccarthy: vector of length {} for a {}×{} operator",
                x.len(),
                t.rows(),
                t.cols()
            )));
        }
        if (vec_norm(x) - 1.0).abs() > 1e-10 {
            return Err(Error::bad_params("mccarthy", "x must be a unit vector"));
        }
        let base = t.quad_form(x).re.max(0.0).powf(r);
        let powered = tr.quad_form(x).re;
        let instance = if r >= 1.0 {
            ("⟨Tx,x⟩^r ≤ ⟨T^r x,x⟩", base, powered)
        } else {
            ("⟨T^r x,x⟩ ≤ ⟨Tx,x⟩^r", powered, base)
        };
        tally.record(&[instance], || WitnessPoint::Vectors {
            x: x.clone(),
            y: Vec::new(),
        });
    }
    tally.finish("mccarthy", *params, Witness::with_operators(&[("T", t)]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn young_equality_at_one() {
        let p = CheckParams::default().with_p(3.0).with_r(2.0).with_alpha(0.3);
        let r = check_young_scalar(&[(1.0, 1.0)], &p).unwrap();
        assert_eq!(r.status, Status::Pass);
        for link in &r.links {
            assert!((link.lhs - link.rhs).abs() <= 1e-12, "{link:?}");
        }
    }

    #[test]
    fn young_endpoint_weights() {
        for alpha in [0.0, 1.0] {
            let p = CheckParams::default().with_alpha(alpha);
            let r = check_young_scalar(&[(2.0, 5.0), (0.5, 3.0)], &p).unwrap();
            let first = &r.links[0];
            assert!((first.lhs - first.rhs).abs() <= 1e-12);
        }
    }

    #[test]
    fn young_rejects_negative_samples() {
        assert!(check_young_scalar(&[(-1.0, 1.0)], &CheckParams::default()).is_err());
        assert!(check_young_scalar(&[], &CheckParams::default()).is_err());
    }

    #[test]
    fn refined_young_equalities() {
        let r = check_refined_young(&[(2.5, 2.5)], &CheckParams::default().with_alpha(0.3)).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-12);
        // α = 1/2 is an identity in a and b
        let r = check_refined_young(&[(0.3, 7.0), (4.0, 1.0)], &CheckParams::default()).unwrap();
        for l in &r.links {
            assert!((l.lhs - l.rhs).abs() <= 1e-12);
        }
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn mixed_schwarz_identity() {
        let x = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let r = check_mixed_schwarz(&Matrix::identity(2), &[(x.clone(), x)], &CheckParams::default(), None).unwrap();
        assert_eq!(r.status, Status::Pass);
        assert!((r.lhs - r.rhs).abs() <= 1e-12);
    }

    #[test]
    fn mixed_schwarz_rejects_bad_fg() {
        let f = ScalarFunction::power(0.3);
        let g = ScalarFunction::power(0.3);
        let t = Matrix::diag_real(&[2.0, 0.5]);
        let x = vec![c(1.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            check_mixed_schwarz(&t, &[(x.clone(), x)], &CheckParams::default(), Some((&f, &g))),
            Err(Error::FgProductMismatch { .. })
        ));
    }

    #[test]
    fn mixed_schwarz_rectangular() {
        let t = Matrix::from_fn(2, 3, |i, j| c(i as f64 + 0.5, j as f64 - 1.0));
        let x = vec![c(1.0, 0.0), c(0.0, 1.0), c(0.5, 0.5)];
        let y = vec![c(0.2, -0.3), c(1.0, 0.0)];
        let r = check_mixed_schwarz(&t, &[(x, y)], &CheckParams::default().with_alpha(0.25), None).unwrap();
        assert_eq!(r.status, Status::Pass);
    }

    #[test]
    fn mccarthy_cases() {
        let t = Matrix::diag_real(&[0.25, 4.0]);
        let x = vec![c(0.6, 0.0), c(0.0, 0.8)];
        let r = check_mccarthy(&t, &[x.clone()], &CheckParams::default().with_r(1.0)).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-12);
        for rr in [0.1, 0.5, 2.0, 4.0] {
            let r = check_mccarthy(&t, &[x.clone()], &CheckParams::default().with_r(rr)).unwrap();
            assert_eq!(r.status, Status::Pass);
        }
        let r = check_mccarthy(&Matrix::identity(2), &[x.clone()], &CheckParams::default().with_r(3.0)).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-12);
        let bad = Matrix::diag_real(&[1.0, -1.0]);
        assert!(matches!(
            check_mccarthy(&bad, &[x], &CheckParams::default().with_r(2.0)),
            Err(Error::NotPsd { .. })
        ));
    }
}
