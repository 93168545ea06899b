//! Berezin symbols `Ã(λ) = ⟨A k̂_λ, k̂_λ⟩`, sampled Berezin sets and lower
//! estimates of the Berezin number `sup_λ |Ã(λ)|`.
//!
//! Every estimate is a maximum over finitely many attained values, hence a
//! lower bound on the true supremum. On finite domains with an exhaustive
//! plan the estimate is exact.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{KernelSpace, Point, SamplePlan};
use crate::matcore::{Matrix, C64};

/// Below this many points symbols are evaluated on the calling thread.
const PARALLEL_THRESHOLD: usize = 2048;

/// Local polish of a sampled supremum on disk domains.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefineConfig {
    pub enabled: bool,
    /// Number of best grid points used as simplex seeds.
    pub starts: usize,
    pub iterations: usize,
    pub tolerance: f64,
    /// Keep per-point values in the estimate.
    pub keep_pointwise: bool,
}

impl Default for RefineConfig {
    fn default() -> Self {
        Self {
            enabled: true,
            starts: 5,
            iterations: 50,
            tolerance: 1e-10,
            keep_pointwise: false,
        }
    }
}

impl RefineConfig {
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            ..Self::default()
        }
    }
}

/// Lower estimate of a Berezin-type supremum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerezinEstimate {
    pub value: f64,
    pub argmax: Point,
    pub plan: SamplePlan,
    pub refined: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pointwise_values: Option<Vec<(Point, f64)>>,
}

/// Sampled Berezin set: `(λ, Ã(λ))` for each sampled λ.
#[derive(Debug, Clone, PartialEq)]
pub struct BerezinSetSample {
    pub entries: Vec<(Point, C64)>,
}

impl BerezinSetSample {
    /// Writes the `symbol-dump` CSV (`λ_re,λ_im,sym_re,sym_im,abs`).
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "λ_re,λ_im,sym_re,sym_im,abs")?;
        for (point, sym) in &self.entries {
            let (x, y) = point.coordinates();
            writeln!(out, "{},{},{},{},{}", x, y, sym.re, sym.im, sym.norm())?;
        }
        Ok(())
    }
}

/// Sample points of one space with their normalized kernels, shared by all
/// operators evaluated on the same discretization.
#[derive(Debug, Clone)]
pub struct KernelSample<'a> {
    space: &'a KernelSpace,
    points: Vec<Point>,
    kernels: Vec<Vec<C64>>,
}

impl<'a> KernelSample<'a> {
    pub fn new(space: &'a KernelSpace, plan: &SamplePlan) -> Result<Self> {
        Self::from_points(space, space.sample_domain(plan)?)
    }

    pub fn from_points(space: &'a KernelSpace, points: Vec<Point>) -> Result<Self> {
        let kernels = points
            .iter()
            .map(|p| space.normalized_kernel_at(p))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            space,
            points,
            kernels,
        })
    }

    pub fn push(&mut self, point: Point) -> Result<()> {
        self.kernels.push(self.space.normalized_kernel_at(&point)?);
        self.points.push(point);
        Ok(())
    }

    pub fn space(&self) -> &'a KernelSpace {
        self.space
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn kernels(&self) -> &[Vec<C64>] {
        &self.kernels
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Evaluates `f` at every normalized kernel, in sample order.
    pub fn map<T, F>(&self, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(&[C64]) -> T + Sync + Send,
    {
        if self.kernels.len() >= PARALLEL_THRESHOLD {
            self.kernels.par_iter().map(|k| f(k)).collect()
        } else {
            self.kernels.iter().map(|k| f(k)).collect()
        }
    }

    /// `Ã(λ)` at every sample point.
    pub fn symbols(&self, a: &Matrix) -> Result<Vec<C64>> {
        check_operator(self.space, a)?;
        Ok(self.map(|k| a.quad_form(k)))
    }

    /// Largest value of `f` and the first index attaining it.
    pub fn sup_by<F>(&self, f: F) -> (f64, usize)
    where
        F: Fn(&[C64]) -> f64 + Sync + Send,
    {
        argmax(&self.map(f))
    }
}

pub(crate) fn check_operator(space: &KernelSpace, a: &Matrix) -> Result<()> {
    if a.rows() != space.dim() || a.cols() != space.dim() {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}×{} but the space has dimension {}",
            a.rows(),
            a.cols(),
            space.dim()
        )));
    }
    Ok(())
}

/// First index of the largest value (NaN never wins).
pub(crate) fn argmax(values: &[f64]) -> (f64, usize) {
    let mut best = f64::NEG_INFINITY;
    let mut idx = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            idx = i;
        }
    }
    (best, idx)
}

/// `Ã(λ) = ⟨A k̂_λ, k̂_λ⟩`.
pub fn symbol(space: &KernelSpace, a: &Matrix, point: &Point) -> Result<C64> {
    check_operator(space, a)?;
    let k = space.normalized_kernel_at(point)?;
    Ok(a.quad_form(&k))
}

pub fn berezin_set(space: &KernelSpace, a: &Matrix, plan: &SamplePlan) -> Result<BerezinSetSample> {
    let sample = KernelSample::new(space, plan)?;
    let symbols = sample.symbols(a)?;
    Ok(BerezinSetSample {
        entries: sample.points.into_iter().zip(symbols).collect(),
    })
}

pub fn berezin_number(
    space: &KernelSpace,
    a: &Matrix,
    plan: &SamplePlan,
    refine: &RefineConfig,
) -> Result<BerezinEstimate> {
    check_operator(space, a)?;
    let sample = KernelSample::new(space, plan)?;
    estimate_sup(&sample, plan, refine, |k| a.quad_form(k).norm())
}

/// Generalized Euclidean Berezin number `sup_λ (Σᵢ |Ãᵢ(λ)|^p)^{1/p}`.
pub fn euclidean_berezin(
    space: &KernelSpace,
    ops: &[Matrix],
    p: f64,
    plan: &SamplePlan,
) -> Result<BerezinEstimate> {
    if !(p >= 1.0) {
        return Err(Error::BadExponent(p));
    }
    if ops.is_empty() {
        return Err(Error::DimensionMismatch("empty operator tuple".into()));
    }
    for op in ops {
        check_operator(space, op)?;
    }
    let sample = KernelSample::new(space, plan)?;
    estimate_sup(&sample, plan, &RefineConfig::disabled(), |k| euclidean_symbol_norm(ops, k, p))
}

/// `(Σᵢ |⟨Tᵢ k, k⟩|^p)^{1/p}`; a single operator gives `|⟨T k, k⟩|` exactly.
pub fn euclidean_symbol_norm(ops: &[Matrix], k: &[C64], p: f64) -> f64 {
    if ops.len() == 1 {
        return ops[0].quad_form(k).norm();
    }
    ops.iter()
        .map(|t| t.quad_form(k).norm().powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Sampled supremum of `objective(k̂_λ)` with optional refinement on disks.
pub(crate) fn estimate_sup<F>(
    sample: &KernelSample<'_>,
    plan: &SamplePlan,
    refine: &RefineConfig,
    objective: F,
) -> Result<BerezinEstimate>
where
    F: Fn(&[C64]) -> f64 + Sync + Send,
{
    if sample.is_empty() {
        return Err(Error::InvalidPlan("empty sample".into()));
    }
    let values = sample.map(&objective);
    let (mut value, idx) = argmax(&values);
    let mut argmax_point = sample.points[idx];
    let mut pointwise = refine
        .keep_pointwise
        .then(|| sample.points.iter().copied().zip(values.iter().copied()).collect::<Vec<_>>());

    let mut refined = false;
    if refine.enabled && sample.space.is_disk() {
        refined = true;
        let seeds = top_seeds(sample.points(), &values, refine.starts);
        let step = initial_step(sample.space, sample.len());
        if let Some((p, v)) = refine_sup(sample.space, &seeds, step, refine, &objective) {
            if v > value {
                value = v;
                argmax_point = p;
                if let Some(pw) = pointwise.as_mut() {
                    pw.push((p, v));
                }
            }
        }
    }
    Ok(BerezinEstimate {
        value,
        argmax: argmax_point,
        plan: *plan,
        refined,
        pointwise_values: pointwise,
    })
}

/// The `count` best points, ties broken by sample order.
pub(crate) fn top_seeds(points: &[Point], values: &[f64], count: usize) -> Vec<(Point, f64)> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    order
        .into_iter()
        .take(count)
        .map(|i| (points[i], values[i]))
        .collect()
}

pub(crate) fn initial_step(space: &KernelSpace, count: usize) -> f64 {
    let radius = space.disk_radius().unwrap_or(1.0);
    radius / (count.max(1) as f64).sqrt()
}

/// Nelder–Mead maximization of `objective(k̂_λ)` over the disk, started from
/// each seed; iterates are projected radially back into the disk. Returns
/// the best point found (seeds included).
pub(crate) fn refine_sup<F>(
    space: &KernelSpace,
    seeds: &[(Point, f64)],
    step: f64,
    cfg: &RefineConfig,
    objective: &F,
) -> Option<(Point, f64)>
where
    F: Fn(&[C64]) -> f64,
{
    let radius = space.disk_radius()?;
    let project = |x: [f64; 2]| -> C64 {
        let z = C64::new(x[0], x[1]);
        let r = z.norm();
        if r > radius {
            z * (radius / r)
        } else {
            z
        }
    };
    let eval = |x: [f64; 2]| -> (C64, f64) {
        let z = project(x);
        let v = space
            .normalized_kernel_at(&Point::Disk(z))
            .map(|k| objective(&k))
            .unwrap_or(f64::NEG_INFINITY);
        (z, if v.is_nan() { f64::NEG_INFINITY } else { v })
    };

    let mut best: Option<(Point, f64)> = None;
    let mut consider = |z: C64, v: f64| {
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((Point::Disk(z), v));
        }
    };
    for &(seed, seed_value) in seeds {
        let Point::Disk(z0) = seed else { continue };
        consider(z0, seed_value);
        let (z, v) = nelder_mead_max(
            [z0.re, z0.im],
            step,
            cfg.iterations,
            cfg.tolerance,
            |x| eval(x),
        );
        consider(z, v);
    }
    best
}

/// Maximizes `f` in two variables. `f` returns the projected point with its
/// value so the optimum is reported at an admissible location.
fn nelder_mead_max<F>(start: [f64; 2], step: f64, iterations: usize, tol: f64, f: F) -> (C64, f64)
where
    F: Fn([f64; 2]) -> (C64, f64),
{
    let mut simplex: Vec<([f64; 2], C64, f64)> = [
        start,
        [start[0] + step, start[1]],
        [start[0], start[1] + step],
    ]
    .into_iter()
    .map(|x| {
        let (z, v) = f(x);
        ([z.re, z.im], z, v)
    })
    .collect();

    for _ in 0..iterations {
        // descending by value: simplex[0] best, simplex[2] worst
        simplex.sort_by(|a, b| b.2.total_cmp(&a.2));
        let spread = simplex[0].2 - simplex[2].2;
        let size = simplex
            .iter()
            .map(|v| (v.0[0] - simplex[0].0[0]).hypot(v.0[1] - simplex[0].0[1]))
            .fold(0.0, f64::max);
        if spread.abs() <= tol * simplex[0].2.abs().max(1.0) && size <= tol {
            break;
        }
        let centroid = [
            0.5 * (simplex[0].0[0] + simplex[1].0[0]),
            0.5 * (simplex[0].0[1] + simplex[1].0[1]),
        ];
        let worst = simplex[2].0;
        let along = |t: f64| {
            [
                centroid[0] + t * (centroid[0] - worst[0]),
                centroid[1] + t * (centroid[1] - worst[1]),
            ]
        };
        let (zr, fr) = f(along(1.0));
        if fr > simplex[0].2 {
            let (ze, fe) = f(along(2.0));
            simplex[2] = if fe > fr {
                ([ze.re, ze.im], ze, fe)
            } else {
                ([zr.re, zr.im], zr, fr)
            };
        } else if fr > simplex[1].2 {
            simplex[2] = ([zr.re, zr.im], zr, fr);
        } else {
            let (zc, fc) = if fr > simplex[2].2 { f(along(0.5)) } else { f(along(-0.5)) };
            if fc > simplex[2].2.max(fr) {
                simplex[2] = ([zc.re, zc.im], zc, fc);
            } else {
                let best = simplex[0].0;
                for v in simplex.iter_mut().skip(1) {
                    let x = [0.5 * (best[0] + v.0[0]), 0.5 * (best[1] + v.0[1])];
                    let (z, val) = f(x);
                    *v = ([z.re, z.im], z, val);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.2.total_cmp(&a.2));
    (simplex[0].1, simplex[0].2)
}
