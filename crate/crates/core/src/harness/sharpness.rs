//! Adversarial search for near-equality cases.
//!
//! Starting from a random instance, the inputs are perturbed with Gaussian
//! noise, projected back onto their operator classes and kept whenever the
//! sharpness ratio `lhs/rhs` grows. The kernel space stays fixed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::inequalities::InequalityCheck;
use crate::matcore::{vec_norm, Matrix, C64};

use super::gen::{gaussian, project, OperatorKind};
use super::registry::{checker_info, evaluate, gen_instance, uses_symmetric, Instance, Setting, SpaceFamily, TrialConfig};
use super::suite::trial_seed;

/// Initial perturbation size relative to the RMS entry.
pub const INITIAL_STEP: f64 = 0.3;
/// Consecutive non-improving steps before the step is halved.
pub const PATIENCE: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessResult {
    pub check_id: String,
    pub family: SpaceFamily,
    pub dim: usize,
    /// Best ratio after each step.
    pub trajectory: Vec<f64>,
    pub best_ratio: f64,
    pub best: InequalityCheck,
    pub instance: Instance,
}

fn rms(m: &Matrix) -> f64 {
    let n = (m.rows() * m.cols()).max(1) as f64;
    (m.frobenius_norm() / n.sqrt()).max(1e-3)
}

fn perturb<R: Rng>(inst: &Instance, step: f64, rng: &mut R) -> Instance {
    let mut next = inst.clone();
    for slot in &mut next.operators {
        let s = step * rms(&slot.matrix);
        let noise = Matrix::from_fn(slot.matrix.rows(), slot.matrix.cols(), |_, _| gaussian(rng) * s);
        let noisy = &slot.matrix + &noise;
        slot.matrix = project(slot.kind, &noisy);
    }
    let unit = |v: &[C64], rng: &mut R| -> Vec<C64> {
        if v.is_empty() {
            return Vec::new();
        }
        let w: Vec<C64> = v.iter().map(|&z| z + gaussian(rng) * step).collect();
        let n = vec_norm(&w);
        if n > 1e-12 {
            w.into_iter().map(|z| z / n).collect()
        } else {
            v.to_vec()
        }
    };
    for (x, y) in &mut next.vectors {
        *x = unit(x, rng);
        *y = unit(y, rng);
    }
    for (a, b) in &mut next.scalars {
        *a = (*a * (1.0 + step * rng.random::<f64>() - 0.5 * step)).max(0.0);
        *b = (*b * (1.0 + step * rng.random::<f64>() - 0.5 * step)).max(0.0);
    }
    next
}

/// Hill-climbs the sharpness ratio of `id` for `steps` steps on the first
/// family and dimension of `config`.
pub fn sharpness_search(id: &str, config: &TrialConfig, steps: usize) -> Result<SharpnessResult> {
    sharpness_search_with(id, config, steps, None)
}

/// As [`sharpness_search`], forcing every square operator to `kind`.
pub fn sharpness_search_with(
    id: &str,
    config: &TrialConfig,
    steps: usize,
    kind: Option<OperatorKind>,
) -> Result<SharpnessResult> {
    config.validate()?;
    checker_info(id)?;
    let family = config.families[0];
    let dim = config.dims[0];
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(config.seed, id, family, dim, usize::MAX));
    let setting = Setting::build(family, dim, config, uses_symmetric(id, 0), &mut rng)?;
    let mut inst = gen_instance(id, config, dim, setting.dsum.dims(), 0, kind, &mut rng)?;
    let mut best = evaluate(id, &setting, &inst)?;
    let mut best_ratio = best.ratio();
    let mut step = INITIAL_STEP;
    let mut stale = 0;
    let mut trajectory = Vec::with_capacity(steps);
    for _ in 0..steps {
        let candidate = perturb(&inst, step, &mut rng);
        // a candidate the checker rejects (e.g. a degenerate f·g) is skipped
        match evaluate(id, &setting, &candidate) {
            Ok(check) if check.ratio() > best_ratio => {
                best_ratio = check.ratio();
                best = check;
                inst = candidate;
                stale = 0;
            }
            _ => {
                stale += 1;
                if stale >= PATIENCE {
                    step *= 0.5;
                    stale = 0;
                }
            }
        }
        trajectory.push(best_ratio);
    }
    Ok(SharpnessResult {
        check_id: id.to_string(),
        family,
        dim,
        trajectory,
        best_ratio,
        best,
        instance: inst,
    })
}
