//! Random operator generators.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::matcore::{eigen_unchecked, inner, spectral_norm, vec_norm, Matrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    General,
    Hermitian,
    Positive,
    Contraction,
    Unitary,
    NilpotentShift,
    Diagonal,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 7] = [
        OperatorKind::General,
        OperatorKind::Hermitian,
        OperatorKind::Positive,
        OperatorKind::Contraction,
        OperatorKind::Unitary,
        OperatorKind::NilpotentShift,
        OperatorKind::Diagonal,
    ];
}

/// Kind, shape and operator-norm range of a random operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorRecipe {
    pub kind: OperatorKind,
    pub rows: usize,
    pub cols: usize,
    /// Target range of `‖A‖` (contractions are additionally capped at 1).
    pub scale: (f64, f64),
}

pub const DEFAULT_SCALE: (f64, f64) = (0.25, 2.0);

impl OperatorRecipe {
    pub fn square(kind: OperatorKind, dim: usize) -> Self {
        Self {
            kind,
            rows: dim,
            cols: dim,
            scale: DEFAULT_SCALE,
        }
    }

    /// A rectangular general operator.
    pub fn rect(rows: usize, cols: usize) -> Self {
        Self {
            kind: OperatorKind::General,
            rows,
            cols,
            scale: DEFAULT_SCALE,
        }
    }

    pub fn with_scale(self, scale: (f64, f64)) -> Self {
        Self { scale, ..self }
    }
}

/// Deterministic in `(recipe, seed)`.
pub fn gen_operator(recipe: &OperatorRecipe, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    gen_with_rng(recipe, &mut rng)
}

pub(crate) fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub(crate) fn gaussian_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Uniformly distributed unit vector in `ℂⁿ`.
pub fn random_unit_vector<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
    loop {
        let v: Vec<C64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = vec_norm(&v);
        if norm > 1e-12 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

pub(crate) fn gen_with_rng<R: Rng>(recipe: &OperatorRecipe, rng: &mut R) -> Matrix {
    let (rows, cols) = (recipe.rows, recipe.cols);
    let raw = match recipe.kind {
        OperatorKind::General | OperatorKind::Contraction => gaussian_matrix(rows, cols, rng),
        OperatorKind::Hermitian => {
            let g = gaussian_matrix(rows, rows, rng);
            (&g + &g.adjoint()).scale(0.5)
        }
        OperatorKind::Positive => {
            let g = gaussian_matrix(rows, rows, rng);
            &g.adjoint() * &g
        }
        OperatorKind::Unitary => return gram_schmidt(&gaussian_matrix(rows, rows, rng)),
        OperatorKind::NilpotentShift => {
            let w: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
            Matrix::from_fn(rows, rows, |i, j| if i == j + 1 { w[j] } else { C64::new(0.0, 0.0) })
        }
        OperatorKind::Diagonal => {
            let d: Vec<C64> = (0..rows).map(|_| gaussian(rng)).collect();
            Matrix::diag(&d)
        }
    };
    let (lo, hi) = target_range(recipe);
    let target = lo + (hi - lo) * rng.random::<f64>();
    rescale(&raw, target)
}

fn target_range(recipe: &OperatorRecipe) -> (f64, f64) {
    let (lo, hi) = recipe.scale;
    if recipe.kind == OperatorKind::Contraction {
        (lo.min(1.0), hi.min(1.0))
    } else {
        (lo, hi)
    }
}

fn rescale(m: &Matrix, target: f64) -> Matrix {
    let norm = spectral_norm(m);
    if norm > 0.0 {
        m.scale(target / norm)
    } else {
        m.clone()
    }
}

/// Orthonormalizes the columns (modified Gram–Schmidt); the result is unitary.
pub fn gram_schmidt(m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..m.cols() {
        let mut v = m.col(j);
        for _ in 0..2 {
            for u in &cols {
                let proj = inner(&v, u);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-12 {
            cols.push(v.into_iter().map(|z| z / norm).collect());
        } else {
            // dependent column: take the first basis vector orthogonal to the rest
            let e = (0..n)
                .map(|k| {
                    let mut e = vec![C64::new(0.0, 0.0); n];
                    e[k] = C64::new(1.0, 0.0);
                    for u in &cols {
                        let proj = inner(&e, u);
                        for (ei, ui) in e.iter_mut().zip(u) {
                            *ei -= proj * ui;
                        }
                    }
                    e
                })
                .max_by(|a, b| vec_norm(a).total_cmp(&vec_norm(b)))
                .expect("n > 0");
            let norm = vec_norm(&e);
            cols.push(e.into_iter().map(|z| z / norm).collect());
        }
    }
    Matrix::from_fn(n, cols.len(), |i, j| cols[j][i])
}

/// Nearest matrix (in a cheap sense) having the kind's defining property.
pub fn project(kind: OperatorKind, m: &Matrix) -> Matrix {
    match kind {
        OperatorKind::General => m.clone(),
        OperatorKind::Hermitian => m.hermitian_part(),
        OperatorKind::Positive => {
            let eig = eigen_unchecked(&m.hermitian_part());
            eig.reconstruct_with(|w| w.max(0.0))
        }
        OperatorKind::Contraction => {
            let norm = spectral_norm(m);
            if norm > 1.0 {
                m.scale(1.0 / norm)
            } else {
                m.clone()
            }
        }
        OperatorKind::Unitary => gram_schmidt(m),
        OperatorKind::NilpotentShift => Matrix::from_fn(m.rows(), m.cols(), |i, j| {
            if i == j + 1 {
                m[(i, j)]
            } else {
                C64::new(0.0, 0.0)
            }
        }),
        OperatorKind::Diagonal => {
            Matrix::from_fn(m.rows(), m.cols(), |i, j| if i == j { m[(i, j)] } else { C64::new(0.0, 0.0) })
        }
    }
}

/// Whether `m` has the kind's property within `tol` (relative to its scale).
pub fn conforms(kind: OperatorKind, m: &Matrix, tol: f64) -> bool {
    let scale = spectral_norm(m).max(1.0);
    match kind {
        OperatorKind::General => true,
        OperatorKind::Hermitian => m.hermitian_defect() <= tol * scale,
        OperatorKind::Positive => {
            m.hermitian_defect() <= tol * scale
                && eigen_unchecked(&m.hermitian_part()).min_eigenvalue() >= -tol * scale
        }
        OperatorKind::Contraction => spectral_norm(m) <= 1.0 + tol,
        OperatorKind::Unitary => {
            let g = &m.adjoint() * m;
            (&g - &Matrix::identity(m.cols())).max_abs() <= tol
        }
        OperatorKind::NilpotentShift => {
            (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j + 1 || m[(i, j)].norm() == 0.0))
        }
        OperatorKind::Diagonal => (0..m.rows()).all(|i| (0..m.cols()).all(|j| i == j || m[(i, j)].norm() == 0.0)),
    }
}
