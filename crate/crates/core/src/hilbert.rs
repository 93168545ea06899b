//! Finite-dimensional reproducing-kernel Hilbert space models.
//!
//! Three families are provided:
//! * truncated Hardy space on a disk of radius `ρ < 1`, `k_λ = (λ̄ʲ)_{j<n}`;
//! * truncated Bergman space on the same disk, `k_λ = (√(j+1)·λ̄ʲ)_{j<n}`;
//! * a discrete space over a finite point set with a positive semidefinite
//!   Gram matrix `K`, realized by an embedding `G` with `G*G = K`.
//!
//! Kernel vectors are coefficient vectors in the orthonormal basis of the
//! model, so `⟨f, k_λ⟩ = f(λ)` becomes an ordinary `ℂⁿ` inner product.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{hermitian_eigen, vec_norm, Matrix, C64};

pub const DEFAULT_DISK_RADIUS: f64 = 0.95;

/// Kernels with norm at or below this are rejected as degenerate.
pub const ZERO_KERNEL_EPS: f64 = 1e-14;

/// Gram eigenvalues below this fraction of ‖K‖ are dropped.
pub const GRAM_RANK_TOL: f64 = 1e-12;

/// Hermitian/PSD tolerance applied to Gram matrices read from disk.
pub const GRAM_LOAD_TOL: f64 = 1e-10;

/// A point of a kernel domain: a complex number for disks, an index for
/// finite point sets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Point {
    Disk(C64),
    Index(usize),
}

impl Point {
    /// `(re, im)` coordinates; finite points map to `(index, 0)`.
    pub fn coordinates(&self) -> (f64, f64) {
        match *self {
            Point::Disk(z) => (z.re, z.im),
            Point::Index(i) => (i as f64, 0.0),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Disk(z) => write!(f, "{:.6}{:+.6}i", z.re, z.im),
            Point::Index(i) => write!(f, "#{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainSpec {
    Disk { radius: f64 },
    FinitePoints { labels: Vec<String> },
}

impl DomainSpec {
    pub fn contains(&self, point: &Point) -> bool {
        match (self, point) {
            (DomainSpec::Disk { radius }, Point::Disk(z)) => z.norm() <= radius * (1.0 + 1e-12),
            (DomainSpec::FinitePoints { labels }, Point::Index(i)) => *i < labels.len(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SampleStrategy {
    PolarGrid,
    UniformRandom,
    Exhaustive,
}

/// How to discretize the supremum over the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub strategy: SampleStrategy,
    pub count: usize,
    pub seed: u64,
}

impl SamplePlan {
    pub fn polar_grid(count: usize) -> Self {
        Self {
            strategy: SampleStrategy::PolarGrid,
            count,
            seed: 0,
        }
    }

    pub fn uniform(count: usize, seed: u64) -> Self {
        Self {
            strategy: SampleStrategy::UniformRandom,
            count,
            seed,
        }
    }

    pub fn exhaustive() -> Self {
        Self {
            strategy: SampleStrategy::Exhaustive,
            count: 1,
            seed: 0,
        }
    }

    /// The plan natural for a domain: exhaustive on finite sets, a polar
    /// grid of `count` points on disks.
    pub fn default_for(domain: &DomainSpec, count: usize) -> Self {
        match domain {
            DomainSpec::Disk { .. } => Self::polar_grid(count),
            DomainSpec::FinitePoints { .. } => Self::exhaustive(),
        }
    }

    /// Same strategy with `factor` times as many points (exhaustive plans
    /// are already complete and stay unchanged).
    pub fn scaled(&self, factor: usize) -> Self {
        match self.strategy {
            SampleStrategy::Exhaustive => *self,
            _ => Self {
                count: self.count.saturating_mul(factor),
                ..*self
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum KernelModel {
    Hardy,
    Bergman,
    /// Columns of the embedding are the kernel vectors.
    Discrete { embedding: Matrix },
}

/// A finite-dimensional RKHS model: dimension, domain and kernel map.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpace {
    dim: usize,
    domain: DomainSpec,
    model: KernelModel,
}

impl KernelSpace {
    pub fn hardy(dim: usize, radius: f64) -> Result<Self> {
        Self::disk_model(dim, radius, KernelModel::Hardy)
    }

    pub fn bergman(dim: usize, radius: f64) -> Result<Self> {
        Self::disk_model(dim, radius, KernelModel::Bergman)
    }

    fn disk_model(dim: usize, radius: f64, model: KernelModel) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidPlan("kernel space dimension must be positive".into()));
        }
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::OutOfDomain(format!("disk radius {radius} must lie in (0, 1)")));
        }
        Ok(Self {
            dim,
            domain: DomainSpec::Disk { radius },
            model,
        })
    }

    /// Discrete space over `labels` with Gram matrix `gram` (validated
    /// Hermitian PSD within `GRAM_LOAD_TOL`). The dimension is the numerical
    /// rank of `gram`.
    pub fn discrete(labels: Vec<String>, gram: &Matrix) -> Result<Self> {
        if gram.rows() != labels.len() || !gram.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels but a {}×{} Gram matrix",
                labels.len(),
                gram.rows(),
                gram.cols()
            )));
        }
        let embedding = gram_embed(gram, GRAM_LOAD_TOL)?;
        Ok(Self {
            dim: embedding.rows(),
            domain: DomainSpec::FinitePoints { labels },
            model: KernelModel::Discrete { embedding },
        })
    }

    /// Discrete space with `K = I`: orthonormal kernels.
    pub fn orthonormal_discrete(m: usize) -> Result<Self> {
        let labels = (0..m).map(|i| format!("p{i}")).collect();
        Self::discrete(labels, &Matrix::identity(m))
    }

    /// Reads `{"points": [...], "gram_re": [[...]], "gram_im": [[...]]}`.
    pub fn from_gram_json(text: &str) -> Result<Self> {
        let file: GramFile = serde_json::from_str(text)?;
        let labels: Vec<String> = file
            .points
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => s.clone(),
                other => other.to_string(),
            })
            .collect();
        let im = file.gram_im.unwrap_or_else(|| {
            file.gram_re.iter().map(|r| vec![0.0; r.len()]).collect()
        });
        let gram = Matrix::from_re_im(&file.gram_re, &im)?;
        Self::discrete(labels, &gram)
    }

    pub fn load_gram_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_gram_json(&std::fs::read_to_string(path)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn kind(&self) -> &'static str {
        match self.model {
            KernelModel::Hardy => "hardy",
            KernelModel::Bergman => "bergman",
            KernelModel::Discrete { .. } => "discrete",
        }
    }

    pub fn is_disk(&self) -> bool {
        matches!(self.domain, DomainSpec::Disk { .. })
    }

    pub fn disk_radius(&self) -> Option<f64> {
        match self.domain {
            DomainSpec::Disk { radius } => Some(radius),
            DomainSpec::FinitePoints { .. } => None,
        }
    }

    /// Number of points of a finite domain.
    pub fn point_count(&self) -> Option<usize> {
        match &self.domain {
            DomainSpec::FinitePoints { labels } => Some(labels.len()),
            DomainSpec::Disk { .. } => None,
        }
    }

    /// Coefficient vector of `k_λ`.
    pub fn kernel_at(&self, point: &Point) -> Result<Vec<C64>> {
        if !self.domain.contains(point) {
            return Err(Error::OutOfDomain(point.to_string()));
        }
        Ok(match (&self.model, point) {
            (KernelModel::Hardy, Point::Disk(z)) => {
                let zc = z.conj();
                let mut out = Vec::with_capacity(self.dim);
                let mut term = C64::new(1.0, 0.0);
                for _ in 0..self.dim {
                    out.push(term);
                    term *= zc;
                }
                out
            }
            (KernelModel::Bergman, Point::Disk(z)) => {
                let zc = z.conj();
                let mut out = Vec::with_capacity(self.dim);
                let mut term = C64::new(1.0, 0.0);
                for j in 0..self.dim {
                    out.push(term * ((j + 1) as f64).sqrt());
                    term *= zc;
                }
                out
            }
            (KernelModel::Discrete { embedding }, Point::Index(i)) => embedding.col(*i),
            _ => unreachable!("domain containment checked above"),
        })
    }

    /// `k̂_λ = k_λ / ‖k_λ‖`.
    pub fn normalized_kernel_at(&self, point: &Point) -> Result<Vec<C64>> {
        let k = self.kernel_at(point)?;
        normalize(k).ok_or_else(|| Error::DegenerateKernel(point.to_string()))
    }

    /// Discretizes the domain according to `plan`. Deterministic given the
    /// plan's seed.
    pub fn sample_domain(&self, plan: &SamplePlan) -> Result<Vec<Point>> {
        if plan.count == 0 {
            return Err(Error::InvalidPlan("sample count must be at least 1".into()));
        }
        match (&self.domain, plan.strategy) {
            (DomainSpec::FinitePoints { labels }, SampleStrategy::Exhaustive) => {
                Ok((0..labels.len()).map(Point::Index).collect())
            }
            (DomainSpec::FinitePoints { labels }, SampleStrategy::UniformRandom) => {
                let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
                Ok((0..plan.count)
                    .map(|_| Point::Index(rng.random_range(0..labels.len())))
                    .collect())
            }
            (DomainSpec::Disk { radius }, SampleStrategy::PolarGrid) => {
                Ok(polar_grid(*radius, plan.count))
            }
            (DomainSpec::Disk { radius }, SampleStrategy::UniformRandom) => {
                let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
                Ok((0..plan.count)
                    .map(|_| {
                        let r = radius * rng.random::<f64>().sqrt();
                        let theta = 2.0 * PI * rng.random::<f64>();
                        Point::Disk(C64::from_polar(r, theta))
                    })
                    .collect())
            }
            (DomainSpec::Disk { .. }, SampleStrategy::Exhaustive) => Err(Error::InvalidPlan(
                "exhaustive sampling needs a finite domain".into(),
            )),
            (DomainSpec::FinitePoints { .. }, SampleStrategy::PolarGrid) => Err(Error::InvalidPlan(
                "polar grid sampling needs a disk domain".into(),
            )),
        }
    }
}

#[derive(Deserialize)]
struct GramFile {
    points: Vec<serde_json::Value>,
    gram_re: Vec<Vec<f64>>,
    #[serde(default)]
    gram_im: Option<Vec<Vec<f64>>>,
}

/// Unit vector in the direction of `k`, or `None` if `‖k‖ ≤ ZERO_KERNEL_EPS`.
pub fn normalize(mut k: Vec<C64>) -> Option<Vec<C64>> {
    let norm = vec_norm(&k);
    if !(norm > ZERO_KERNEL_EPS) {
        return None;
    }
    for z in &mut k {
        *z /= norm;
    }
    Some(k)
}

/// `⌈√count⌉` equal-area rings × `⌈√count⌉` angles, filled from the outer
/// ring inward and truncated to exactly `count` points. Odd rings are
/// rotated by half an angular step.
fn polar_grid(radius: f64, count: usize) -> Vec<Point> {
    let m = (count as f64).sqrt().ceil() as usize;
    let mut out = Vec::with_capacity(m * m);
    for ring in (0..m).rev() {
        let r = radius * ((ring + 1) as f64 / m as f64).sqrt();
        let offset = if ring % 2 == 1 { PI / m as f64 } else { 0.0 };
        for a in 0..m {
            let theta = offset + 2.0 * PI * a as f64 / m as f64;
            out.push(Point::Disk(C64::from_polar(r, theta)));
        }
    }
    out.truncate(count);
    out
}

/// Embedding `G` (rank × m) with `G*G = K` for a Hermitian PSD Gram matrix.
///
/// Eigenvalues below `GRAM_RANK_TOL·‖K‖` are dropped, so `G` has as many
/// rows as the numerical rank of `K`.
pub fn gram_embed(gram: &Matrix, tol: f64) -> Result<Matrix> {
    let eig = hermitian_eigen(gram, tol.max(1e-14))?;
    let norm = eig.eigenvalues.iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    let min = eig.min_eigenvalue();
    if min < -tol * norm.max(f64::MIN_POSITIVE) {
        return Err(Error::NotPsd {
            eigenvalue: min,
            floor: -tol * norm,
        });
    }
    let mut keep: Vec<usize> = (0..eig.eigenvalues.len())
        .filter(|&i| eig.eigenvalues[i] > GRAM_RANK_TOL * norm)
        .collect();
    // descending; the stable sort keeps `K = I` embedded as the identity
    keep.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    if keep.is_empty() {
        return Err(Error::DegenerateKernel("Gram matrix has rank zero".into()));
    }
    let v = &eig.eigenvectors;
    let m = gram.rows();
    // row r of G is √w_r · v_r*
    Ok(Matrix::from_fn(keep.len(), m, |r, i| {
        let idx = keep[r];
        v[(i, idx)].conj() * eig.eigenvalues[idx].sqrt()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::inner;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn assert_vec_close(a: &[C64], b: &[C64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() <= tol, "{x} vs {y}");
        }
    }

    #[test]
    fn hardy_kernel_examples() {
        let h = KernelSpace::hardy(3, 0.95).unwrap();
        assert_vec_close(&h.kernel_at(&Point::Disk(c(0.0, 0.0))).unwrap(), &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0);

        let k = h.kernel_at(&Point::Disk(c(0.5, 0.0))).unwrap();
        assert_vec_close(&k, &[c(1.0, 0.0), c(0.5, 0.0), c(0.25, 0.0)], 0.0);
        assert!((vec_norm(&k).powi(2) - 21.0 / 16.0).abs() < 1e-15);

        let kn = h.normalized_kernel_at(&Point::Disk(c(0.5, 0.0))).unwrap();
        let s = (16.0_f64 / 21.0).sqrt();
        assert_vec_close(&kn, &[c(s, 0.0), c(0.5 * s, 0.0), c(0.25 * s, 0.0)], 1e-15);

        // the coefficient vector carries λ̄
        let k = h.kernel_at(&Point::Disk(c(0.0, 0.5))).unwrap();
        assert_vec_close(&k, &[c(1.0, 0.0), c(0.0, -0.5), c(-0.25, 0.0)], 1e-16);
    }

    #[test]
    fn bergman_kernel_example() {
        let b = KernelSpace::bergman(2, 0.95).unwrap();
        let k = b.kernel_at(&Point::Disk(c(0.5, 0.0))).unwrap();
        assert_vec_close(&k, &[c(1.0, 0.0), c(2f64.sqrt() / 2.0, 0.0)], 1e-15);
    }

    #[test]
    fn out_of_domain_points() {
        let h = KernelSpace::hardy(3, 0.9).unwrap();
        assert!(matches!(h.kernel_at(&Point::Disk(c(0.95, 0.0))), Err(Error::OutOfDomain(_))));
        assert!(matches!(h.kernel_at(&Point::Index(0)), Err(Error::OutOfDomain(_))));
        let d = KernelSpace::orthonormal_discrete(3).unwrap();
        assert!(matches!(d.kernel_at(&Point::Index(3)), Err(Error::OutOfDomain(_))));
        assert!(KernelSpace::hardy(3, 1.0).is_err());
    }

    #[test]
    fn degenerate_discrete_kernel() {
        // third point carries no kernel mass
        let gram = Matrix::diag_real(&[1.0, 2.0, 0.0]);
        let d = KernelSpace::discrete(vec!["a".into(), "b".into(), "c".into()], &gram).unwrap();
        assert_eq!(d.dim(), 2);
        assert!(matches!(
            d.normalized_kernel_at(&Point::Index(2)),
            Err(Error::DegenerateKernel(_))
        ));
    }

    #[test]
    fn sampling_plans() {
        let d = KernelSpace::orthonormal_discrete(5).unwrap();
        assert_eq!(d.sample_domain(&SamplePlan::exhaustive()).unwrap().len(), 5);
        assert!(d.sample_domain(&SamplePlan::polar_grid(10)).is_err());

        let h = KernelSpace::hardy(4, 0.9).unwrap();
        let pts = h.sample_domain(&SamplePlan::polar_grid(100)).unwrap();
        assert_eq!(pts.len(), 100);
        assert!(pts.iter().all(|p| matches!(p, Point::Disk(z) if z.norm() <= 0.9 + 1e-15)));
        assert_eq!(h.sample_domain(&SamplePlan::polar_grid(7)).unwrap().len(), 7);
        assert!(h.sample_domain(&SamplePlan::exhaustive()).is_err());
        assert!(h.sample_domain(&SamplePlan::polar_grid(0)).is_err());

        let a = h.sample_domain(&SamplePlan::uniform(50, 3)).unwrap();
        let b = h.sample_domain(&SamplePlan::uniform(50, 3)).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, h.sample_domain(&SamplePlan::uniform(50, 4)).unwrap());
    }

    #[test]
    fn gram_embed_examples() {
        let g = gram_embed(&Matrix::identity(3), 1e-12).unwrap();
        assert!((&(&g.adjoint() * &g) - &Matrix::identity(3)).frobenius_norm() < 1e-14);

        let g = gram_embed(&Matrix::diag_real(&[4.0]), 1e-12).unwrap();
        assert!((g[(0, 0)].norm() - 2.0).abs() < 1e-15);

        assert!(matches!(
            gram_embed(&Matrix::diag_real(&[1.0, -1.0]), 1e-12),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn reproducing_property_on_discrete_space() {
        let gram = Matrix::from_rows(&[
            vec![c(2.0, 0.0), c(0.5, 0.5), c(0.0, 0.0)],
            vec![c(0.5, -0.5), c(1.0, 0.0), c(0.2, 0.0)],
            vec![c(0.0, 0.0), c(0.2, 0.0), c(1.5, 0.0)],
        ]);
        let d = KernelSpace::discrete(vec!["x".into(), "y".into(), "z".into()], &gram).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let ki = d.kernel_at(&Point::Index(i)).unwrap();
                let kj = d.kernel_at(&Point::Index(j)).unwrap();
                assert!((inner(&ki, &kj) - gram[(j, i)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gram_json_ingestion() {
        let text = r#"{"points": ["a", 2, "c"], "gram_re": [[1,0,0],[0,1,0],[0,0,1]], "gram_im": [[0,0,0],[0,0,0],[0,0,0]]}"#;
        let d = KernelSpace::from_gram_json(text).unwrap();
        assert_eq!(d.dim(), 3);
        assert_eq!(d.point_count(), Some(3));

        let not_psd = r#"{"points": ["a", "b"], "gram_re": [[1,2],[2,1]]}"#;
        assert!(matches!(KernelSpace::from_gram_json(not_psd), Err(Error::NotPsd { .. })));

        let not_herm = r#"{"points": ["a", "b"], "gram_re": [[1,0],[0,1]], "gram_im": [[0,0.5],[0.5,0]]}"#;
        assert!(matches!(KernelSpace::from_gram_json(not_herm), Err(Error::NotHermitian { .. })));
    }
}
