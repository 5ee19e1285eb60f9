//! Primal-side analyses: searching translations that witness approximate
//! alpha-stationarity and bracketing the transversality modulus.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dual::SolveOptions;
use super::search::{dual_alpha_sup, require_common_point, AlphaSupForm};
use crate::error::{Error, Result};
use crate::geometry::project::direction_grid;
use crate::geometry::{dist_point_set, Norm, NormalKind, SetRep};
use crate::linalg::scale;
use crate::translation::{check_primal_condition, random_in_ball, shifted_intersection_distance, translate, PrimalCheck, PrimalInstance, PrimalKind};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum StationarityOutcome {
    /// Translations satisfying the metric condition, verified by the primal checker.
    Found { shifts: Vec<Vec<f64>>, check: Box<PrimalCheck> },
    /// Nothing found; the property quantifies over every epsilon, so this is not a refutation.
    NotFoundAtBudget { best_gap: f64, samples: usize },
}

/// `alpha d(x, cap (set_i - a_i)) - max d(x, set_i - a_i)`; positive means the metric
/// condition holds. `inf` when the translated intersection is empty.
fn metric_gap(sets: &[SetRep], x: &[f64], shifts: &[Vec<f64>], alpha: f64, norm: Norm) -> Result<f64> {
    let cap = shifted_intersection_distance(x, sets, shifts, norm)?;
    let mut worst = 0.0_f64;
    for (s, a) in sets.iter().zip(shifts) {
        worst = worst.max(dist_point_set(x, &translate(s, a), norm)?);
    }
    Ok(if cap.is_infinite() { f64::INFINITY } else { alpha * cap - worst })
}

fn unit_dirs(d: usize, norm: Norm) -> Vec<Vec<f64>> {
    direction_grid(d, 16).into_iter().map(|u| scale(&u, 1.0 / norm.norm(&u))).collect()
}

/// Searches translations shorter than `eps` with
/// `alpha d(x_bar, cap (set_i - a_i)) > max d(x_bar, set_i - a_i)`: every set moves along a
/// grid direction at a few lengths, then random translations, then random refinement of
/// the best candidate. A returned witness has passed [`check_primal_condition`].
#[allow(clippy::too_many_arguments)]
pub fn alpha_stationarity_test(
    sets: &[SetRep],
    x_bar: &[f64],
    alpha: f64,
    eps: f64,
    norm: Norm,
    budget: usize,
    seed: u64,
) -> Result<StationarityOutcome> {
    require_common_point(sets, x_bar)?;
    if !(alpha > 0.0 && eps > 0.0) {
        return Err(Error::invalid("alpha and epsilon must be positive"));
    }
    let n = sets.len();
    let d = x_bar.len();
    let dirs = unit_dirs(d, norm);
    let mut cands: Vec<Vec<Vec<f64>>> = Vec::new();
    let combos = dirs.len().saturating_pow(n.min(3) as u32);
    'grid: for len in [0.999, 0.5, 0.1] {
        for k in 0..combos {
            if cands.len() >= budget / 2 {
                break 'grid;
            }
            let mut t = k;
            let tuple: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    if i >= 3 {
                        return vec![0.0; d];
                    }
                    let u = scale(&dirs[t % dirs.len()], len * eps);
                    t /= dirs.len();
                    u
                })
                .collect();
            cands.push(tuple);
        }
    }
    let zero = vec![0.0; d];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while cands.len() < budget {
        cands.push((0..n).map(|_| random_in_ball(&mut rng, &zero, eps * 0.999, norm)).collect());
    }
    let gaps = cands
        .par_iter()
        .map(|s| metric_gap(sets, x_bar, s, alpha, norm))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = (f64::NEG_INFINITY, 0usize);
    for (k, &g) in gaps.iter().enumerate() {
        if g > best.0 {
            best = (g, k);
        }
    }
    let mut current = cands.get(best.1).cloned().unwrap_or_else(|| vec![zero.clone(); n]);
    let mut gap = best.0;
    let mut samples = cands.len();
    let mut step = 0.25 * eps;
    for _ in 0..budget.min(400) {
        if gap > 0.0 {
            break;
        }
        let trial: Vec<Vec<f64>> = current
            .iter()
            .map(|a| {
                let v = random_in_ball(&mut rng, a, step, norm);
                let nv = norm.norm(&v);
                if nv < eps * 0.999 { v } else { scale(&v, eps * 0.999 / nv) }
            })
            .collect();
        samples += 1;
        let g = metric_gap(sets, x_bar, &trial, alpha, norm)?;
        if g > gap {
            gap = g;
            current = trial;
        } else {
            step *= 0.97;
        }
    }
    if gap > 0.0 {
        let inst = PrimalInstance {
            kind: PrimalKind::P9,
            sets: sets.to_vec(),
            norm,
            x_bar: x_bar.to_vec(),
            shifts: current.clone(),
            points: None,
            x: None,
            rho: f64::INFINITY,
            eps,
            alpha: Some(alpha),
        };
        let check = check_primal_condition(&inst)?;
        if check.holds {
            return Ok(StationarityOutcome::Found { shifts: current, check: Box::new(check) });
        }
    }
    Ok(StationarityOutcome::NotFoundAtBudget { best_gap: gap, samples })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusWitness {
    pub x: Vec<f64>,
    pub shifts: Vec<Vec<f64>>,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusReport {
    pub lower: f64,
    pub upper: f64,
    /// Source of the lower end: `dual-exact`, `dual-sampled` or `none`.
    pub lower_method: String,
    pub witness: Option<ModulusWitness>,
    pub samples: usize,
    /// Samples whose translated intersection contained the base point.
    pub skipped: usize,
    pub seed: u64,
}

/// Brackets the transversality modulus at scale `eps`: the upper end is the smallest
/// sampled ratio `max_i d(x, set_i - a_i) / d(x, cap (set_i - a_i))` over `x` within `eps`
/// of `x_bar` and translations shorter than `eps` (ratio 0 when the translated sets do not
/// meet), the lower end the dual sum-norm infimum when normal cones are available.
pub fn transversality_modulus(sets: &[SetRep], x_bar: &[f64], eps: f64, samples: usize, seed: u64, norm: Norm) -> Result<ModulusReport> {
    require_common_point(sets, x_bar)?;
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    let n = sets.len();
    let zero = vec![0.0; x_bar.len()];
    let ratios = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<Option<(f64, Vec<f64>, Vec<Vec<f64>>)>> {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let x = if k == 0 { x_bar.to_vec() } else { random_in_ball(&mut rng, x_bar, eps, norm) };
            let shifts: Vec<Vec<f64>> = (0..n).map(|_| random_in_ball(&mut rng, &zero, eps, norm)).collect();
            let cap = shifted_intersection_distance(&x, sets, &shifts, norm)?;
            if cap.is_infinite() {
                return Ok(Some((0.0, x, shifts)));
            }
            if cap <= 1e-9 * eps.max(1e-300) {
                return Ok(None);
            }
            let mut worst = 0.0_f64;
            for (s, a) in sets.iter().zip(&shifts) {
                worst = worst.max(dist_point_set(&x, &translate(s, a), norm)?);
            }
            Ok(Some((worst / cap, x, shifts)))
        })
        .collect::<Result<Vec<_>>>()?;
    let skipped = ratios.iter().filter(|r| r.is_none()).count();
    let witness = ratios
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(ratio, x, shifts)| ModulusWitness { x, shifts, ratio });
    let upper = witness.as_ref().map_or(f64::INFINITY, |w| w.ratio);
    let (lower, lower_method) = match dual_alpha_sup(sets, x_bar, eps, AlphaSupForm::SumNorm, NormalKind::Frechet, norm, &SolveOptions::default()) {
        Ok(r) if r.exact => (r.lower, "dual-exact"),
        Ok(r) => (r.lower, "dual-sampled"),
        Err(Error::Unsupported(_)) => (0.0, "none"),
        Err(e) => return Err(e),
    };
    Ok(ModulusReport { lower, upper, lower_method: lower_method.to_string(), witness, samples, skipped, seed })
}
