//! Checker registry: metadata, trial configuration, random instances and
//! dispatch.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::blocks::{check_block_diag_bound, check_block_offdiag_bound, DirectSumSpace};
use crate::error::{Error, Result};
use crate::hilbert::{KernelSpace, SamplePlan, DEFAULT_DISK_RADIUS};
use crate::inequalities::{
    self as ineq, robustness_of, CheckParams, CheckPlan, InequalityCheck, Robustness, Sign, CHECK_IDS,
    DEFAULT_MAX_PAIRS, DEFAULT_SAMPLES, DEFAULT_TOLERANCE,
};
use crate::matcore::{Matrix, ScalarFunction, C64};

use super::gen::{gaussian_matrix, gen_with_rng, random_unit_vector, OperatorKind, OperatorRecipe, DEFAULT_SCALE};

/// Kernel-space family used for a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceFamily {
    /// Truncated Hardy space ⊕ truncated Bergman space.
    Hardy,
    /// Truncated Bergman space ⊕ truncated Hardy space.
    Bergman,
    /// Discrete spaces on `2·dim` points with random Gram matrices.
    Discrete,
    /// Discrete spaces with `K = I`.
    Orthonormal,
}

impl SpaceFamily {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "hardy" => Ok(Self::Hardy),
            "bergman" => Ok(Self::Bergman),
            "discrete" => Ok(Self::Discrete),
            "orthonormal" => Ok(Self::Orthonormal),
            other => Err(Error::BadConfig(format!("unknown space family `{other}`"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Hardy => "hardy",
            Self::Bergman => "bergman",
            Self::Discrete => "discrete",
            Self::Orthonormal => "orthonormal",
        }
    }
}

/// Parameter grids; each checker uses the hypothesis-valid combinations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamGrids {
    pub alpha: Vec<f64>,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
    pub mccarthy_r: Vec<f64>,
}

impl Default for ParamGrids {
    fn default() -> Self {
        Self {
            alpha: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            r: vec![1.0, 2.0, 3.0],
            p: vec![1.5, 2.0, 3.0],
            mccarthy_r: vec![0.1, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0],
        }
    }
}

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 32;

/// Everything that determines a suite run. `jobs` only affects speed and is
/// not part of the serialized echo.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub families: Vec<SpaceFamily>,
    pub dims: Vec<usize>,
    /// Trials per (checker, family, dimension).
    pub trials: usize,
    pub seed: u64,
    /// Sample count on disk domains (finite domains are enumerated).
    pub samples: usize,
    pub disk_radius: f64,
    pub tolerance: f64,
    pub grids: ParamGrids,
    pub scale: (f64, f64),
    pub max_pairs: usize,
    pub refine: bool,
    /// Scalar pairs or vectors per trial for the scalar-layer checkers.
    pub scalar_samples: usize,
    #[serde(skip)]
    pub jobs: usize,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            families: vec![SpaceFamily::Hardy, SpaceFamily::Discrete],
            dims: vec![2, 3, 4, 8],
            trials: 100,
            seed: 1,
            samples: DEFAULT_SAMPLES,
            disk_radius: DEFAULT_DISK_RADIUS,
            tolerance: DEFAULT_TOLERANCE,
            grids: ParamGrids::default(),
            scale: DEFAULT_SCALE,
            max_pairs: DEFAULT_MAX_PAIRS,
            refine: true,
            scalar_samples: 20,
            jobs: 1,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::BadConfig(m));
        if self.trials == 0 {
            return bad("trial count must be at least 1".into());
        }
        if self.families.is_empty() || self.dims.is_empty() {
            return bad("at least one space family and one dimension are required".into());
        }
        if let Some(d) = self.dims.iter().find(|d| !(MIN_DIM..=MAX_DIM).contains(*d)) {
            return bad(format!("dimension {d} outside {MIN_DIM}–{MAX_DIM}"));
        }
        if self.samples == 0 || self.scalar_samples == 0 {
            return bad("sample counts must be positive".into());
        }
        if !(self.disk_radius > 0.0 && self.disk_radius < 1.0) {
            return bad(format!("disk radius {} must lie in (0, 1)", self.disk_radius));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return bad(format!("tolerance {} must be positive", self.tolerance));
        }
        let (lo, hi) = self.scale;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return bad(format!("scale range ({lo}, {hi}) is invalid"));
        }
        let g = &self.grids;
        if g.alpha.is_empty() || g.r.is_empty() || g.p.is_empty() || g.mccarthy_r.is_empty() {
            return bad("parameter grids must be non-empty".into());
        }
        for id in CHECK_IDS {
            if param_combos(id, self)?.is_empty() {
                return bad(format!("no parameter combination satisfies the hypotheses of {id}"));
            }
        }
        Ok(())
    }
}

/// What a checker operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckDomain {
    Single,
    Product,
    Scalar,
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CheckerInfo {
    pub id: &'static str,
    pub robustness: Robustness,
    pub domain: CheckDomain,
    pub statement: &'static str,
    pub hypotheses: &'static str,
}

const INFO: [(&str, CheckDomain, &str, &str); 22] = [
    ("eq111", CheckDomain::Single, "ber(A) ≤ w(A) ≤ ‖A‖", "A square"),
    ("eq1", CheckDomain::Single, "ber(A*XB) ≤ ½ber(B*|X|B + A*|X*|A)", "A, B, X square"),
    ("commutator", CheckDomain::Single, "ber(AX ± XA) ≤ ber^½(A*A + AA*)·ber^½(X*X + XX*)", "A, X square"),
    ("eq4", CheckDomain::Single, "ber(A*XB + B*YA) ≤ 2√(‖X‖‖Y‖)·ber^½(B*B)·ber^½(AA*)", "A, B, X, Y square"),
    ("thm2i", CheckDomain::Single, "ber^r(A*XB) ≤ ‖X‖^r·ber((A*A)^{pr/2}/p + (B*B)^{qr/2}/q)", "1/p + 1/q = 1, r > 0, pr ≥ 2, qr ≥ 2"),
    ("thm2ii", CheckDomain::Single, "ber(A*XB) ≤ ½ber(B*|X|^{2α}B + A*|X*|^{2(1−α)}A)", "0 ≤ α ≤ 1"),
    ("eq5", CheckDomain::Single, "ber(A*XB + B*YA) ≤ ½ber(B*|X|^{2α}B + A*|X*|^{2(1−α)}A + A*|Y|^{2α}A + B*|Y*|^{2(1−α)}B)", "0 ≤ α ≤ 1"),
    ("remark1", CheckDomain::Single, "ber(A*XB + B*YA) ≤ ½ber(B*|X|B + A*|X*|A) + ½ber(A*|Y|A + B*|Y*|B)", "α = 1/2"),
    ("remark2", CheckDomain::Single, "ber(AB + B*A) ≤ ½ber(|A| + |A*|) + ½ber(B*(|A| + |A*|)B)", "A, B square"),
    ("eq10", CheckDomain::Single, "ber^r(A^αXB^{1−α}) ≤ ‖X‖^r(ber(αA^r + (1−α)B^r) − inf η)", "A, B ≥ 0, r ≥ 2, 0 ≤ α ≤ 1"),
    ("heinz", CheckDomain::Single, "ber^r(H_α) ≤ ½‖X‖^r·ber(A^r + B^r)", "A, B ≥ 0, r ≥ 2, 0 ≤ α ≤ 1"),
    ("eq7", CheckDomain::Product, "ber^r([[0,B],[C,0]]) ≤ max{ber(f^{pr}(|C|)/p + g^{qr}(|B*|)/q), ber(f^{pr}(|B|)/p + g^{qr}(|C*|)/q)}", "f·g = id, p ≥ q > 1 conjugate, r ≥ 1, pr ≥ 2, qr ≥ 2"),
    ("eq7cor", CheckDomain::Product, "ber^r([[0,B],[C,0]]) ≤ ½max{ber(|C|^{2rα} + |B*|^{2r(1−α)}), ber(|B|^{2rα} + |C*|^{2r(1−α)})}", "r ≥ 1, 0 ≤ α ≤ 1"),
    ("tuple_berp", CheckDomain::Product, "ber_p^p(T₁,…,T_n) ≤ max{ber(Σ α|Cᵢ|^p + (1−α)|Bᵢ*|^p), ber(Σ α|Bᵢ|^p + (1−α)|Cᵢ*|^p)}", "p ≥ 2, 0 ≤ α ≤ 1"),
    ("eq14", CheckDomain::Product, "ber^r(diag(A,D)) ≤ ½max{ber(|A|^r + |A*|^r), ber(|D|^r + |D*|^r)}", "r ≥ 1"),
    ("full_cor", CheckDomain::Product, "ber([[A,B],[C,D]]) ≤ ½max{ber(|C| + |B*|), ber(|B| + |C*|)} + ½max{ber(|A| + |A*|), ber(|D| + |D*|)}", "block dimensions consistent"),
    ("young", CheckDomain::Scalar, "a^αb^{1−α} ≤ αa + (1−α)b ≤ (αa^r + (1−α)b^r)^{1/r}; ab ≤ a^p/p + b^q/q ≤ (a^{pr}/p + b^{qr}/q)^{1/r}", "a, b ≥ 0, r ≥ 1, 1/p + 1/q = 1"),
    ("refined_young", CheckDomain::Scalar, "a^αb^{1−α} ≤ αa + (1−α)b − r₀(√a − √b)²", "a, b ≥ 0, 0 ≤ α ≤ 1"),
    ("mixed_schwarz", CheckDomain::Vector, "|⟨Tx,y⟩|² ≤ ⟨|T|^{2α}x,x⟩⟨|T*|^{2(1−α)}y,y⟩; |⟨Tx,y⟩| ≤ ‖f(|T|)x‖‖g(|T*|)y‖", "0 ≤ α ≤ 1, f·g = id"),
    ("mccarthy", CheckDomain::Vector, "⟨Tx,x⟩^r ≤ ⟨T^r x,x⟩ (r ≥ 1), reversed for 0 < r ≤ 1", "T ≥ 0, ‖x‖ = 1, r > 0"),
    ("lemma9a", CheckDomain::Product, "ber(diag(A,D)) ≤ max{ber(A), ber(D)}", "block dimensions consistent"),
    ("lemma9b", CheckDomain::Product, "ber([[0,B],[C,0]]) ≤ (‖B‖ + ‖C‖)/2", "block dimensions consistent"),
];

pub fn checkers() -> Vec<CheckerInfo> {
    INFO.iter()
        .map(|&(id, domain, statement, hypotheses)| CheckerInfo {
            id,
            robustness: robustness_of(id).expect("registered id"),
            domain,
            statement,
            hypotheses,
        })
        .collect()
}

pub fn checker_info(id: &str) -> Result<CheckerInfo> {
    checkers()
        .into_iter()
        .find(|c| c.id == id)
        .ok_or_else(|| Error::UnknownChecker(id.to_string()))
}

/// Hypothesis-valid parameter combinations for a checker.
pub fn param_combos(id: &str, cfg: &TrialConfig) -> Result<Vec<CheckParams>> {
    let base = CheckParams::default().with_tolerance(cfg.tolerance);
    let g = &cfg.grids;
    let mut out = Vec::new();
    match id {
        "thm2i" | "young" | "eq7" => {
            let alphas: &[f64] = if id == "thm2i" { &[0.5] } else { &g.alpha };
            for &p in &g.p {
                for &r in &g.r {
                    for &alpha in alphas {
                        out.push(base.with_p(p).with_r(r).with_alpha(alpha));
                    }
                }
            }
        }
        "thm2ii" | "eq5" | "refined_young" | "mixed_schwarz" => {
            out.extend(g.alpha.iter().map(|&a| base.with_alpha(a)));
        }
        "eq10" | "heinz" | "eq7cor" => {
            for &r in &g.r {
                for &a in &g.alpha {
                    out.push(base.with_r(r).with_alpha(a));
                }
            }
        }
        "tuple_berp" => {
            for &p in &g.p {
                for &a in &g.alpha {
                    out.push(base.with_p(p).with_alpha(a));
                }
            }
        }
        "eq14" => out.extend(g.r.iter().map(|&r| base.with_r(r))),
        "mccarthy" => out.extend(g.mccarthy_r.iter().map(|&r| base.with_r(r))),
        other => {
            checker_info(other)?;
            out.push(base);
        }
    }
    out.retain(|p| p.validate(id).is_ok());
    Ok(out)
}

/// A named operator together with the property it must keep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSlot {
    pub name: String,
    pub kind: OperatorKind,
    pub matrix: Matrix,
}

/// Random inputs of one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub params: CheckParams,
    pub operators: Vec<OperatorSlot>,
    /// Unit vectors: `(x, y)` pairs for mixed Schwarz, single `x` for McCarthy.
    pub vectors: Vec<(Vec<C64>, Vec<C64>)>,
    pub scalars: Vec<(f64, f64)>,
    pub sign: Sign,
    /// `[[A,B],[B,A]]` variant of the full-matrix check on `H ⊕ H`.
    pub symmetric: bool,
}

impl Instance {
    fn op(&self, i: usize) -> &Matrix {
        &self.operators[i].matrix
    }
}

/// Spaces and sampling of one trial.
#[derive(Debug, Clone)]
pub struct Setting {
    pub space: KernelSpace,
    pub dsum: DirectSumSpace,
    pub plan: CheckPlan,
}

fn random_discrete<R: Rng>(n: usize, rng: &mut R) -> Result<KernelSpace> {
    let m = 2 * n;
    let f = gaussian_matrix(n, m, rng);
    let gram = &f.adjoint() * &f;
    KernelSpace::discrete((0..m).map(|i| format!("p{i}")).collect(), &gram.hermitian_part())
}

fn family_space<R: Rng>(family: SpaceFamily, n: usize, first: bool, cfg: &TrialConfig, rng: &mut R) -> Result<KernelSpace> {
    let rho = cfg.disk_radius;
    match (family, first) {
        (SpaceFamily::Hardy, true) | (SpaceFamily::Bergman, false) => KernelSpace::hardy(n, rho),
        (SpaceFamily::Hardy, false) | (SpaceFamily::Bergman, true) => KernelSpace::bergman(n, rho),
        (SpaceFamily::Discrete, _) => random_discrete(n, rng),
        (SpaceFamily::Orthonormal, _) => KernelSpace::orthonormal_discrete(n),
    }
}

impl Setting {
    /// `H(n)` plus the direct sum `H(n) ⊕ H'(max(2, n−1))`, or `H(n) ⊕ H(n)`
    /// when `symmetric`.
    pub fn build<R: Rng>(family: SpaceFamily, n: usize, cfg: &TrialConfig, symmetric: bool, rng: &mut R) -> Result<Self> {
        let space = family_space(family, n, true, cfg, rng)?;
        let second = if symmetric {
            space.clone()
        } else {
            family_space(family, (n - 1).max(2), false, cfg, rng)?
        };
        let sample = match family {
            SpaceFamily::Hardy | SpaceFamily::Bergman => SamplePlan::polar_grid(cfg.samples),
            SpaceFamily::Discrete | SpaceFamily::Orthonormal => SamplePlan::exhaustive(),
        };
        let mut plan = CheckPlan::new(sample);
        plan.max_pairs = cfg.max_pairs;
        plan.pair_seed = rng.random();
        if !cfg.refine {
            plan = plan.without_refinement();
        }
        Ok(Self {
            dsum: crate::blocks::DirectSumSpace::new(space.clone(), second),
            space,
            plan,
        })
    }
}

/// Number of operator pairs in the tuple check.
pub const TUPLE_LEN: usize = 3;

/// Whether trial `trial` of `id` uses the symmetric direct sum.
pub fn uses_symmetric(id: &str, trial: usize) -> bool {
    id == "full_cor" && trial % 2 == 1
}

/// Random inputs for trial `trial` of `id`; `n` is the single-space
/// dimension and `(n1, n2)` the direct-sum dimensions.
pub fn gen_instance<R: Rng>(
    id: &str,
    cfg: &TrialConfig,
    n: usize,
    (n1, n2): (usize, usize),
    trial: usize,
    kind_override: Option<OperatorKind>,
    rng: &mut R,
) -> Result<Instance> {
    let combos = param_combos(id, cfg)?;
    if combos.is_empty() {
        return Err(Error::BadConfig(format!("no valid parameters for {id}")));
    }
    let params = combos[trial % combos.len()];
    let scale = cfg.scale;
    let mut slot = |name: &str, kind: OperatorKind, rows: usize, cols: usize| {
        let kind = if rows == cols { kind_override.unwrap_or(kind) } else { OperatorKind::General };
        let recipe = OperatorRecipe { kind, rows, cols, scale };
        OperatorSlot {
            name: name.to_string(),
            kind,
            matrix: gen_with_rng(&recipe, rng),
        }
    };
    use OperatorKind::{General, Hermitian, Positive};
    let mut operators = Vec::new();
    match id {
        "eq111" => operators.push(slot("A", OperatorKind::ALL[trial % OperatorKind::ALL.len()], n, n)),
        "eq1" | "thm2i" | "thm2ii" => {
            for name in ["A", "B", "X"] {
                operators.push(slot(name, General, n, n));
            }
        }
        "commutator" | "remark2" => {
            let second = if id == "commutator" { "X" } else { "B" };
            operators.push(slot("A", General, n, n));
            operators.push(slot(second, General, n, n));
        }
        "eq4" | "eq5" | "remark1" => {
            for name in ["A", "B", "X", "Y"] {
                operators.push(slot(name, General, n, n));
            }
        }
        "eq10" | "heinz" => {
            operators.push(slot("A", Positive, n, n));
            operators.push(slot("B", Positive, n, n));
            operators.push(slot("X", General, n, n));
        }
        "eq7" | "eq7cor" | "lemma9b" => {
            operators.push(slot("B", General, n1, n2));
            operators.push(slot("C", General, n2, n1));
        }
        "tuple_berp" => {
            for i in 1..=TUPLE_LEN {
                operators.push(slot(&format!("B{i}"), General, n1, n2));
                operators.push(slot(&format!("C{i}"), General, n2, n1));
            }
        }
        "eq14" => {
            operators.push(slot("A", General, n1, n1));
            operators.push(slot("D", General, n2, n2));
        }
        "lemma9a" => {
            operators.push(slot("A", Hermitian, n1, n1));
            operators.push(slot("D", Hermitian, n2, n2));
        }
        "full_cor" => {
            if uses_symmetric(id, trial) {
                operators.push(slot("A", General, n1, n1));
                operators.push(slot("B", General, n1, n1));
            } else {
                operators.push(slot("A", General, n1, n1));
                operators.push(slot("B", General, n1, n2));
                operators.push(slot("C", General, n2, n1));
                operators.push(slot("D", General, n2, n2));
            }
        }
        "mixed_schwarz" => operators.push(slot("T", General, n, n)),
        "mccarthy" => operators.push(slot("T", Positive, n, n)),
        "young" | "refined_young" => {}
        other => return Err(Error::UnknownChecker(other.to_string())),
    }

    let k = cfg.scalar_samples;
    let vectors = match id {
        "mixed_schwarz" => (0..k)
            .map(|_| (random_unit_vector(n, rng), random_unit_vector(n, rng)))
            .collect(),
        "mccarthy" => (0..k).map(|_| (random_unit_vector(n, rng), Vec::new())).collect(),
        _ => Vec::new(),
    };
    let scalars = match id {
        "young" | "refined_young" => (0..k)
            .map(|_| (10.0 * rng.random::<f64>(), 10.0 * rng.random::<f64>()))
            .collect(),
        _ => Vec::new(),
    };
    Ok(Instance {
        params,
        operators,
        vectors,
        scalars,
        sign: if trial % 2 == 0 { Sign::Plus } else { Sign::Minus },
        symmetric: uses_symmetric(id, trial),
    })
}

/// Runs checker `id` on an instance.
pub fn evaluate(id: &str, setting: &Setting, inst: &Instance) -> Result<InequalityCheck> {
    let (s, d, plan, p) = (&setting.space, &setting.dsum, &setting.plan, &inst.params);
    let o = |i| inst.op(i);
    match id {
        "eq111" => ineq::check_chain_111(s, o(0), p, plan),
        "eq1" => ineq::check_prior_product(s, o(0), o(1), o(2), p, plan),
        "commutator" => ineq::check_prior_commutator(s, o(0), o(1), inst.sign, p, plan),
        "eq4" => ineq::check_prior_sandwich(s, o(0), o(1), o(2), o(3), p, plan),
        "thm2i" => ineq::check_thm_product_young(s, o(0), o(1), o(2), p, plan),
        "thm2ii" => ineq::check_thm_product_alpha(s, o(0), o(1), o(2), p, plan),
        "eq5" => ineq::check_thm_sym(s, o(0), o(1), o(2), o(3), p, plan),
        "remark1" => ineq::check_remark_split(s, o(0), o(1), o(2), o(3), p, plan),
        "remark2" => ineq::check_remark_abs(s, o(0), o(1), p, plan),
        "eq10" => ineq::check_thm_alpha_power(s, o(0), o(1), o(2), p, plan),
        "heinz" => ineq::check_thm_heinz(s, o(0), o(1), o(2), p, plan),
        "eq7" => {
            let f = ScalarFunction::power(p.alpha);
            let g = ScalarFunction::power(1.0 - p.alpha);
            ineq::check_offdiag_fg(d, o(0), o(1), &f, &g, p, plan)
        }
        "eq7cor" => ineq::check_offdiag_power(d, o(0), o(1), p, plan),
        "tuple_berp" => {
            let pairs: Vec<(Matrix, Matrix)> = inst
                .operators
                .chunks(2)
                .map(|c| (c[0].matrix.clone(), c[1].matrix.clone()))
                .collect();
            ineq::check_tuple_berp(d, &pairs, p, plan)
        }
        "eq14" => ineq::check_diag_prop(d, o(0), o(1), p, plan),
        "full_cor" => {
            if inst.symmetric {
                ineq::check_full_matrix_cor(d, o(0), o(1), o(1), o(0), p, plan)
            } else {
                ineq::check_full_matrix_cor(d, o(0), o(1), o(2), o(3), p, plan)
            }
        }
        "young" => ineq::check_young_scalar(&inst.scalars, p),
        "refined_young" => ineq::check_refined_young(&inst.scalars, p),
        "mixed_schwarz" => ineq::check_mixed_schwarz(o(0), &inst.vectors, p, None),
        "mccarthy" => {
            let xs: Vec<Vec<C64>> = inst.vectors.iter().map(|(x, _)| x.clone()).collect();
            ineq::check_mccarthy(o(0), &xs, p)
        }
        "lemma9a" => check_block_diag_bound(d, o(0), o(1), p, plan),
        "lemma9b" => check_block_offdiag_bound(d, o(0), o(1), p, plan),
        other => Err(Error::UnknownChecker(other.to_string())),
    }
}
