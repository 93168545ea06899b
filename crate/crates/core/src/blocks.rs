//! Direct sums `H₁ ⊕ H₂`, 2×2 block operators and normalized kernels on the
//! product domain `Ω₁ × Ω₂`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::berezin::{KernelSample, RefineConfig};
use crate::error::{Error, Result};
use crate::hilbert::{normalize, DomainSpec, KernelSpace, Point, SamplePlan, SampleStrategy};
use crate::inequalities::{run_product, CheckParams, CheckPlan, InequalityCheck, ProductForm};
use crate::matcore::{spectral_norm, vec_norm, Matrix, C64};

/// `H₁ ⊕ H₂` with kernel `[k_{λ₁}; k_{λ₂}]` at `(λ₁, λ₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectSumSpace {
    first: KernelSpace,
    second: KernelSpace,
}

impl DirectSumSpace {
    pub fn new(first: KernelSpace, second: KernelSpace) -> Self {
        Self { first, second }
    }

    pub fn first(&self) -> &KernelSpace {
        &self.first
    }

    pub fn second(&self) -> &KernelSpace {
        &self.second
    }

    /// `(n₁, n₂)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.first.dim(), self.second.dim())
    }

    pub fn dim(&self) -> usize {
        self.first.dim() + self.second.dim()
    }
}

/// `[[A, B], [C, D]]` with `A: n₁×n₁`, `B: n₁×n₂`, `C: n₂×n₁`, `D: n₂×n₂`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockOperator {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
}

impl BlockOperator {
    pub fn new(a: Matrix, b: Matrix, c: Matrix, d: Matrix) -> Result<Self> {
        let blk = Self { a, b, c, d };
        blk.check_dims()?;
        Ok(blk)
    }

    /// `[[0, B], [C, 0]]`.
    pub fn offdiag(b: Matrix, c: Matrix) -> Result<Self> {
        let (n1, n2) = (b.rows(), b.cols());
        Self::new(Matrix::zeros(n1, n1), b, c, Matrix::zeros(n2, n2))
    }

    /// `diag(A, D)`.
    pub fn diag(a: Matrix, d: Matrix) -> Result<Self> {
        let (n1, n2) = (a.rows(), d.rows());
        Self::new(a, Matrix::zeros(n1, n2), Matrix::zeros(n2, n1), d)
    }

    /// `(n₁, n₂)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.a.rows(), self.d.rows())
    }

    fn check_dims(&self) -> Result<()> {
        let (n1, n2) = (self.a.rows(), self.d.rows());
        let expected = [
            ("A", &self.a, n1, n1),
            ("B", &self.b, n1, n2),
            ("C", &self.c, n2, n1),
            ("D", &self.d, n2, n2),
        ];
        for (name, m, r, c) in expected {
            if m.shape() != (r, c) {
                return Err(Error::DimensionMismatch(format!(
                    "block {name} is {}×{}, expected {r}×{c}",
                    m.rows(),
                    m.cols()
                )));
            }
        }
        Ok(())
    }

    pub fn assemble(&self) -> Matrix {
        let (n1, n2) = self.dims();
        let mut out = Matrix::zeros(n1 + n2, n1 + n2);
        out.set_block(0, 0, &self.a);
        out.set_block(0, n1, &self.b);
        out.set_block(n1, 0, &self.c);
        out.set_block(n1, n1, &self.d);
        out
    }

    /// Inverse of `assemble` for a split after the first `n1` coordinates.
    pub fn split(m: &Matrix, n1: usize) -> Result<Self> {
        if !m.is_square() || n1 > m.rows() {
            return Err(Error::DimensionMismatch(format!(
                "cannot split a {}×{} matrix after {n1}",
                m.rows(),
                m.cols()
            )));
        }
        let n2 = m.rows() - n1;
        Ok(Self {
            a: m.submatrix(0, 0, n1, n1),
            b: m.submatrix(0, n1, n1, n2),
            c: m.submatrix(n1, 0, n2, n1),
            d: m.submatrix(n1, n1, n2, n2),
        })
    }
}

/// Checked `BlockOperator::assemble`.
pub fn assemble(blk: &BlockOperator) -> Result<Matrix> {
    blk.check_dims()?;
    Ok(blk.assemble())
}

/// Normalized direct-sum kernel and the mass `t = ‖k_{λ₁}‖²/(‖k_{λ₁}‖²+‖k_{λ₂}‖²)`
/// carried by the first component.
#[derive(Debug, Clone, PartialEq)]
pub struct PairKernel {
    pub vector: Vec<C64>,
    pub mass: f64,
}

pub fn direct_sum_kernel(space: &DirectSumSpace, l1: &Point, l2: &Point) -> Result<PairKernel> {
    let k1 = space.first.kernel_at(l1)?;
    let k2 = space.second.kernel_at(l2)?;
    pair_kernel(k1, k2).ok_or_else(|| Error::DegenerateKernel(format!("({l1}, {l2})")))
}

fn pair_kernel(k1: Vec<C64>, k2: Vec<C64>) -> Option<PairKernel> {
    let m1 = vec_norm(&k1).powi(2);
    let m2 = vec_norm(&k2).powi(2);
    let mut v = k1;
    v.extend(k2);
    let vector = normalize(v)?;
    Some(PairKernel {
        vector,
        mass: m1 / (m1 + m2),
    })
}

/// Component plans and the pairing rule for the product domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductPlan {
    pub first: SamplePlan,
    pub second: SamplePlan,
    /// Full cross product when it has at most this many pairs.
    pub max_pairs: usize,
    pub seed: u64,
}

impl ProductPlan {
    /// Adapts a single-space plan to each component's domain.
    pub fn for_space(space: &DirectSumSpace, base: &SamplePlan, max_pairs: usize, seed: u64) -> Self {
        Self {
            first: adapt_plan(base, space.first.domain(), 0),
            second: adapt_plan(base, space.second.domain(), 1),
            max_pairs,
            seed,
        }
    }

    pub fn scaled(&self, factor: usize) -> Self {
        Self {
            first: self.first.scaled(factor),
            second: self.second.scaled(factor),
            ..*self
        }
    }
}

fn adapt_plan(base: &SamplePlan, domain: &DomainSpec, salt: u64) -> SamplePlan {
    match (base.strategy, domain) {
        (SampleStrategy::UniformRandom, _) => SamplePlan::uniform(
            base.count,
            base.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15),
        ),
        (SampleStrategy::Exhaustive, DomainSpec::Disk { .. }) => {
            SamplePlan::polar_grid(crate::inequalities::DEFAULT_SAMPLES)
        }
        (_, d) => SamplePlan::default_for(d, base.count),
    }
}

/// Index pairs into the component samples.
fn pair_indices(n1: usize, n2: usize, max_pairs: usize, seed: u64) -> Vec<(usize, usize)> {
    if n1.saturating_mul(n2) <= max_pairs {
        return (0..n1).flat_map(|i| (0..n2).map(move |j| (i, j))).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = max_pairs.max(n1.max(n2));
    (0..count)
        .map(|idx| {
            if n1 >= n2 {
                (idx % n1, rng.random_range(0..n2))
            } else {
                (rng.random_range(0..n1), idx % n2)
            }
        })
        .collect()
}

/// Pairs `(λ₁, λ₂)`, each component drawn from that component's sample set.
pub fn sample_product_domain(space: &DirectSumSpace, plan: &ProductPlan) -> Result<Vec<(Point, Point)>> {
    let s1 = space.first.sample_domain(&plan.first)?;
    let s2 = space.second.sample_domain(&plan.second)?;
    Ok(pair_indices(s1.len(), s2.len(), plan.max_pairs, plan.seed)
        .into_iter()
        .map(|(i, j)| (s1[i], s2[j]))
        .collect())
}

/// Direct-sum kernel at one pair, with the normalized component kernels.
#[derive(Debug, Clone, Copy)]
pub struct PairView<'s> {
    pub kernel: &'s [C64],
    pub first: &'s [C64],
    pub second: &'s [C64],
    pub mass: f64,
}

/// Component samples plus the pairs drawn from them.
#[derive(Debug, Clone)]
pub struct ProductSample<'a> {
    first: KernelSample<'a>,
    second: KernelSample<'a>,
    pairs: Vec<(usize, usize)>,
    kernels: Vec<PairKernel>,
}

impl<'a> ProductSample<'a> {
    pub fn new(space: &'a DirectSumSpace, plan: &ProductPlan) -> Result<Self> {
        let first = KernelSample::new(&space.first, &plan.first)?;
        let second = KernelSample::new(&space.second, &plan.second)?;
        let raw1 = raw_kernels(&space.first, first.points())?;
        let raw2 = raw_kernels(&space.second, second.points())?;
        let pairs = pair_indices(first.len(), second.len(), plan.max_pairs, plan.seed);
        let kernels = pairs
            .iter()
            .map(|&(i, j)| {
                pair_kernel(raw1[i].clone(), raw2[j].clone()).ok_or_else(|| {
                    Error::DegenerateKernel(format!("({}, {})", first.points()[i], second.points()[j]))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            first,
            second,
            pairs,
            kernels,
        })
    }

    pub fn first(&self) -> &KernelSample<'a> {
        &self.first
    }

    pub fn second(&self) -> &KernelSample<'a> {
        &self.second
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair_points(&self, idx: usize) -> (Point, Point) {
        let (i, j) = self.pairs[idx];
        (self.first.points()[i], self.second.points()[j])
    }

    pub fn view(&self, idx: usize) -> PairView<'_> {
        let (i, j) = self.pairs[idx];
        PairView {
            kernel: &self.kernels[idx].vector,
            first: &self.first.kernels()[i],
            second: &self.second.kernels()[j],
            mass: self.kernels[idx].mass,
        }
    }

    /// Evaluates `f` at every pair, in pair order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        F: Fn(PairView<'_>) -> T,
    {
        (0..self.len()).map(|idx| f(self.view(idx))).collect()
    }
}

fn raw_kernels(space: &KernelSpace, points: &[Point]) -> Result<Vec<Vec<C64>>> {
    points.iter().map(|p| space.kernel_at(p)).collect()
}

pub(crate) fn check_blocks(space: &DirectSumSpace, blk: &BlockOperator) -> Result<()> {
    blk.check_dims()?;
    if blk.dims() != space.dims() {
        return Err(Error::DimensionMismatch(format!(
            "block operator has dims {:?}, direct sum has {:?}",
            blk.dims(),
            space.dims()
        )));
    }
    Ok(())
}

/// Sampled `ber` of a component operator, as used on the right-hand side of
/// block bounds.
pub(crate) fn component_ber(sample: &KernelSample<'_>, m: &Matrix, refine: &RefineConfig) -> Result<f64> {
    let plan = SamplePlan::exhaustive();
    Ok(crate::berezin::estimate_sup(sample, &plan, refine, |k| m.quad_form(k).norm())?.value)
}

/// `ber(diag(A, D)) ≤ max{ber(A), ber(D)}`, per pair via
/// `|⟨diag(A,D)k̂,k̂⟩| ≤ t|Ã(λ₁)| + (1−t)|D̃(λ₂)|`.
pub fn check_block_diag_bound(
    space: &DirectSumSpace,
    a: &Matrix,
    d: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    let blk = BlockOperator::diag(a.clone(), d.clone())?;
    check_blocks(space, &blk)?;
    let t = blk.assemble();
    let lhs = |v: PairView<'_>| t.quad_form(v.kernel).norm();
    let pointwise = |v: PairView<'_>| {
        let rhs = v.mass * a.quad_form(v.first).norm() + (1.0 - v.mass) * d.quad_form(v.second).norm();
        (lhs(v), rhs)
    };
    let sup_rhs = |s1: &KernelSample<'_>, s2: &KernelSample<'_>, refine: &RefineConfig| -> Result<f64> {
        Ok(component_ber(s1, a, refine)?.max(component_ber(s2, d, refine)?))
    };
    let (check, _) = run_product(
        space,
        plan,
        ProductForm {
            id: "lemma9a",
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &[("A", a), ("D", d)],
        },
    )?;
    Ok(check)
}

/// `ber([[0,B],[C,0]]) ≤ (‖B‖+‖C‖)/2` with the right side computed exactly.
pub fn check_block_offdiag_bound(
    space: &DirectSumSpace,
    b: &Matrix,
    c: &Matrix,
    params: &CheckParams,
    plan: &CheckPlan,
) -> Result<InequalityCheck> {
    let blk = BlockOperator::offdiag(b.clone(), c.clone())?;
    check_blocks(space, &blk)?;
    let t = blk.assemble();
    let bound = 0.5 * (spectral_norm(b) + spectral_norm(c));
    let lhs = |v: PairView<'_>| t.quad_form(v.kernel).norm();
    let pointwise = |v: PairView<'_>| (lhs(v), bound);
    let sup_rhs = |_: &KernelSample<'_>, _: &KernelSample<'_>, _: &RefineConfig| -> Result<f64> { Ok(bound) };
    let (check, _) = run_product(
        space,
        plan,
        ProductForm {
            id: "lemma9b",
            params: *params,
            pointwise: Some(&pointwise),
            sup_lhs: &lhs,
            sup_rhs: &sup_rhs,
            operators: &[("B", b), ("C", c)],
        },
    )?;
    Ok(check)
}
