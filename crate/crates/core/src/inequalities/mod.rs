//! Checkers for Berezin-number inequalities.
//!
//! Each checker evaluates the per-λ form of its inequality on a sample of
//! the domain and, in sup mode, the published supremum form. Per-λ forms are
//! sound under finite sampling, so a violation there is a bug (FAIL). The
//! supremum forms compare sampled lower estimates and can at worst be
//! SUSPECT.

mod engine;
mod product;
mod scalar;
mod single;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{Point, SamplePlan};
use crate::matcore::{Matrix, C64};

pub use crate::berezin::RefineConfig;
pub use product::{
    check_diag_prop, check_full_matrix_cor, check_offdiag_fg, check_offdiag_power, check_tuple_berp,
};
pub use scalar::{check_mccarthy, check_mixed_schwarz, check_refined_young, check_young_scalar};
pub use single::{
    check_chain_111, check_prior_commutator, check_prior_product, check_prior_sandwich,
    check_remark_abs, check_remark_split, check_thm_alpha_power, check_thm_heinz,
    check_thm_product_alpha, check_thm_product_young, check_thm_sym, Sign,
};

pub(crate) use engine::{run_product, run_single, ProductForm, SingleForm};

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Maximum number of sample doublings in the SUSPECT protocol.
pub const SUSPECT_RETRIES: u32 = 3;

/// Default cap on product-domain pairs.
pub const DEFAULT_MAX_PAIRS: usize = 2000;

/// Default sample count on disk domains.
pub const DEFAULT_SAMPLES: usize = 400;

/// Tolerance on `f(t)·g(t) = t`.
pub const FG_TOLERANCE: f64 = 1e-10;

/// Slack allowed when comparing hypothesis bounds such as `p·r ≥ 2`.
const HYPOTHESIS_EPS: f64 = 1e-12;

/// Stable checker identifiers, in suite order.
pub const CHECK_IDS: [&str; 22] = [
    "eq111",
    "eq1",
    "commutator",
    "eq4",
    "thm2i",
    "thm2ii",
    "eq5",
    "remark1",
    "remark2",
    "eq10",
    "heinz",
    "eq7",
    "eq7cor",
    "tuple_berp",
    "eq14",
    "full_cor",
    "young",
    "refined_young",
    "mixed_schwarz",
    "mccarthy",
    "lemma9a",
    "lemma9b",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pointwise,
    Sup,
    Both,
}

impl Mode {
    fn wants_pointwise(self) -> bool {
        matches!(self, Mode::Pointwise | Mode::Both)
    }

    fn wants_sup(self) -> bool {
        matches!(self, Mode::Sup | Mode::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Robustness {
    /// Verified through a per-λ form; FAIL means an implementation bug.
    PointwiseRobust,
    /// Only the supremum form is checked; violations are SUSPECT.
    SupEstimated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Suspect,
    Fail,
}

/// Robustness class of a checker id.
pub fn robustness_of(check_id: &str) -> Result<Robustness> {
    match check_id {
        "commutator" | "eq4" | "full_cor" => Ok(Robustness::SupEstimated),
        id if CHECK_IDS.contains(&id) => Ok(Robustness::PointwiseRobust),
        other => Err(Error::UnknownChecker(other.to_string())),
    }
}

/// Exponents, weight, tolerance and mode of a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub r: f64,
    pub p: f64,
    pub q: f64,
    pub alpha: f64,
    pub tolerance: f64,
    pub mode: Mode,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            r: 1.0,
            p: 2.0,
            q: 2.0,
            alpha: 0.5,
            tolerance: DEFAULT_TOLERANCE,
            mode: Mode::Both,
        }
    }
}

impl CheckParams {
    pub fn with_r(self, r: f64) -> Self {
        Self { r, ..self }
    }

    pub fn with_alpha(self, alpha: f64) -> Self {
        Self { alpha, ..self }
    }

    /// Sets `p` and its conjugate `q = p/(p−1)`.
    pub fn with_p(self, p: f64) -> Self {
        Self {
            p,
            q: p / (p - 1.0),
            ..self
        }
    }

    pub fn with_tolerance(self, tolerance: f64) -> Self {
        Self { tolerance, ..self }
    }

    pub fn with_mode(self, mode: Mode) -> Self {
        Self { mode, ..self }
    }

    /// `r₀ = min{α, 1−α}`.
    pub fn r0(&self) -> f64 {
        self.alpha.min(1.0 - self.alpha)
    }

    /// Rejects parameters outside the hypotheses of `check_id`.
    pub fn validate(&self, check_id: &str) -> Result<()> {
        robustness_of(check_id)?;
        let bad = |reason: String| Err(Error::bad_params(check_id, reason));
        let Self { r, p, q, alpha, tolerance, .. } = *self;
        if ![r, p, q, alpha, tolerance].iter().all(|v| v.is_finite()) {
            return bad("parameters must be finite".into());
        }
        if !(tolerance > 0.0) {
            return bad(format!("tolerance {tolerance} must be positive"));
        }
        let uses_alpha = matches!(
            check_id,
            "thm2ii" | "eq5" | "eq10" | "heinz" | "eq7cor" | "tuple_berp" | "young" | "refined_young"
                | "mixed_schwarz"
        );
        if uses_alpha && !(0.0..=1.0).contains(&alpha) {
            return bad(format!("α = {alpha} must lie in [0, 1]"));
        }
        let conjugate = || -> Result<()> {
            if !(p > 1.0 && q > 1.0) || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
                return bad(format!("p = {p}, q = {q} are not conjugate exponents"));
            }
            Ok(())
        };
        let at_least = |name: &str, value: f64, bound: f64| -> Result<()> {
            if value < bound - HYPOTHESIS_EPS {
                return bad(format!("{name} = {value} must be ≥ {bound}"));
            }
            Ok(())
        };
        match check_id {
            "thm2i" => {
                conjugate()?;
                if !(r > 0.0) {
                    return bad(format!("r = {r} must be positive"));
                }
                at_least("p·r", p * r, 2.0)?;
                at_least("q·r", q * r, 2.0)?;
            }
            "eq10" | "heinz" => at_least("r", r, 2.0)?,
            "eq7" => {
                conjugate()?;
                at_least("r", r, 1.0)?;
                if p < q {
                    return bad(format!("p = {p} must be ≥ q = {q}"));
                }
                at_least("p·r", p * r, 2.0)?;
                at_least("q·r", q * r, 2.0)?;
            }
            "eq7cor" | "eq14" => at_least("r", r, 1.0)?,
            "tuple_berp" => at_least("p", p, 2.0)?,
            "young" => {
                conjugate()?;
                at_least("r", r, 1.0)?;
            }
            "mccarthy" => {
                if !(r > 0.0) {
                    return bad(format!("r = {r} must be positive"));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Sampling configuration shared by all checkers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckPlan {
    pub sample: SamplePlan,
    pub refine: RefineConfig,
    /// Cap on product-domain pairs before switching to seeded pairing.
    pub max_pairs: usize,
    pub pair_seed: u64,
}

impl CheckPlan {
    pub fn new(sample: SamplePlan) -> Self {
        Self {
            sample,
            refine: RefineConfig::default(),
            max_pairs: DEFAULT_MAX_PAIRS,
            pair_seed: 0,
        }
    }

    pub fn without_refinement(self) -> Self {
        Self {
            refine: RefineConfig::disabled(),
            ..self
        }
    }
}

impl Default for CheckPlan {
    fn default() -> Self {
        Self::new(SamplePlan::polar_grid(DEFAULT_SAMPLES))
    }
}

/// Where a witness value was attained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessPoint {
    Single(Point),
    Pair(Point, Point),
    Vectors { x: Vec<C64>, y: Vec<C64> },
    Scalars { a: f64, b: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: Matrix,
}

/// Inputs and location of the tightest instance of a check.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Option<WitnessPoint>,
    pub operators: Vec<NamedMatrix>,
}

impl Witness {
    pub(crate) fn with_operators(ops: &[(&str, &Matrix)]) -> Self {
        Self {
            point: None,
            operators: ops
                .iter()
                .map(|(name, m)| NamedMatrix {
                    name: name.to_string(),
                    matrix: (*m).clone(),
                })
                .collect(),
        }
    }
}

/// An auxiliary inequality asserted alongside the main one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
}

impl ChainLink {
    pub(crate) fn new(name: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
        }
    }

    pub fn holds(&self, tolerance: f64) -> bool {
        !violates(self.lhs, self.rhs, tolerance)
    }
}

/// Outcome of one checker invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub check_id: String,
    pub params: CheckParams,
    pub robustness: Robustness,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs`.
    pub slack: f64,
    /// Smallest per-λ slack `rhs_λ − lhs_λ`, when a per-λ form was evaluated.
    pub worst_pointwise_slack: Option<f64>,
    pub status: Status,
    pub links: Vec<ChainLink>,
    pub witness: Witness,
    pub notes: Vec<String>,
}

impl InequalityCheck {
    /// Sharpness ratio `lhs/rhs`; 0 when both sides vanish within tolerance.
    pub fn ratio(&self) -> f64 {
        sharpness_ratio(self.lhs, self.rhs, self.params.tolerance)
    }

    pub fn is_pass(&self) -> bool {
        self.status == Status::Pass
    }
}

/// `lhs − rhs > tol·max(1, |lhs|, |rhs|)`.
pub fn violates(lhs: f64, rhs: f64, tol: f64) -> bool {
    !(lhs - rhs <= tol * tolerance_scale(lhs, rhs))
}

pub fn tolerance_scale(lhs: f64, rhs: f64) -> f64 {
    1f64.max(lhs.abs()).max(rhs.abs())
}

pub fn sharpness_ratio(lhs: f64, rhs: f64, tol: f64) -> f64 {
    let floor = tol * tolerance_scale(lhs, rhs);
    if lhs.abs() <= floor && rhs.abs() <= floor {
        return 0.0;
    }
    lhs / rhs.max(floor)
}

/// Checks `f(t)·g(t) = t` on the given spectrum.
pub fn validate_fg(
    f: &crate::matcore::ScalarFunction,
    g: &crate::matcore::ScalarFunction,
    spectrum: &[f64],
) -> Result<()> {
    for &t in spectrum {
        let t = t.max(0.0);
        let product = f.eval(t) * g.eval(t);
        if !((product - t).abs() <= FG_TOLERANCE * t.max(1.0)) {
            return Err(Error::FgProductMismatch { t, product });
        }
    }
    Ok(())
}

pub(crate) fn check_square_same(check: &str, n: usize, ops: &[(&str, &Matrix)]) -> Result<()> {
    for (name, m) in ops {
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch(format!(
                "{check}: {name} is {}×{}, expected {n}×{n}",
                m.rows(),
                m.cols()
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ids_are_unique_and_classified() {
        let mut ids = CHECK_IDS.to_vec();
        ids.sort_unstable();
        ids.dedup();
        assert_eq!(ids.len(), 22);
        let sup: Vec<_> = CHECK_IDS
            .iter()
            .filter(|id| robustness_of(id).unwrap() == Robustness::SupEstimated)
            .collect();
        assert_eq!(sup, [&"commutator", &"eq4", &"full_cor"]);
        assert!(matches!(robustness_of("nope"), Err(Error::UnknownChecker(_))));
    }

    #[test]
    fn hypothesis_enforcement() {
        let base = CheckParams::default();
        assert!(base.with_r(1.0).validate("eq10").is_err());
        assert!(base.with_r(2.0).validate("eq10").is_ok());
        assert!(base.with_r(1.5).validate("heinz").is_err());
        assert!(base.with_alpha(1.5).validate("thm2ii").is_err());
        assert!(base.with_p(3.0).with_r(1.0).validate("thm2i").is_err());
        assert!(base.with_p(3.0).with_r(2.0).validate("thm2i").is_ok());
        assert!(base.with_p(1.5).with_r(2.0).validate("eq7").is_err());
        assert!(base.with_p(3.0).with_r(1.0).validate("eq7").is_err());
        assert!(base.with_p(3.0).with_r(2.0).validate("eq7").is_ok());
        assert!(base.with_p(1.5).validate("tuple_berp").is_err());
        let mut skew = base;
        skew.q = 3.0;
        assert!(skew.validate("young").is_err());
        assert!(base.with_r(0.0).validate("mccarthy").is_err());
        assert!(base.with_tolerance(0.0).validate("eq1").is_err());
        assert!(base.validate("unknown").is_err());
    }

    #[test]
    fn r0_is_min_weight() {
        assert_eq!(CheckParams::default().with_alpha(0.25).r0(), 0.25);
        assert_eq!(CheckParams::default().with_alpha(1.0).r0(), 0.0);
    }

    #[test]
    fn ratio_conventions() {
        assert_eq!(sharpness_ratio(0.0, 0.0, 1e-9), 0.0);
        assert_eq!(sharpness_ratio(1.0, 2.0, 1e-9), 0.5);
        assert!(!violates(1.0 + 1e-10, 1.0, 1e-9));
        assert!(violates(1.0 + 1e-8, 1.0, 1e-9));
        assert!(violates(f64::NAN, 1.0, 1e-9));
    }
}
