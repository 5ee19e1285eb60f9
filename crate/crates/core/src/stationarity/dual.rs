//! One dual program per tuple of normal cones: minimize a weighted combination of
//! `||sum x_i*||` and `d(x_i*, K_i)` under membership, zero-sum, normalization and pairing
//! constraints. Exact by sign-pattern LPs under polyhedral norms, sampled otherwise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::lp::{Lp, LpStatus, Sense};
use crate::geometry::project::{add_norm_epigraph, direction_grid};
use crate::geometry::{ConeRep, Norm};
use crate::linalg::{add, dot, norm2, orthonormal_basis, scale, sum_vectors};

/// Which vectors enter `sum ||x_i*|| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Full,
    Head,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualProgram {
    pub cones: Vec<ConeRep>,
    /// Primal norm.
    pub norm: Norm,
    /// `x_i* ∈ K_i` is imposed.
    pub membership: Vec<bool>,
    /// Objective weight of `d(x_i*, K_i)`; ignored under membership.
    pub dist_weights: Vec<f64>,
    /// `None` imposes `sum x_i* = 0`, `Some(w)` adds `w ||sum x_i*||` to the objective.
    pub sum_weight: Option<f64>,
    pub normalization: Normalization,
    /// `sum <x_i*, w_i> >= rhs`
    pub pairing: Option<(Vec<Vec<f64>>, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualSolution {
    pub value: f64,
    /// Certified lower bound for the minimum (equal to `value` when exact).
    pub lower: f64,
    pub vectors: Vec<Vec<f64>>,
    pub exact: bool,
    pub evaluated: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub circle: usize,
    pub sphere: usize,
    pub simplex_steps: usize,
    pub cap: usize,
    pub seed: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { circle: 64, sphere: 256, simplex_steps: 32, cap: 200_000, seed: 0 }
    }
}

const MAX_PATTERNS: usize = 4096;

/// Extreme points of the primal unit ball: the dual norm is their pointwise maximum.
fn dual_functionals(norm: Norm, d: usize) -> Result<Vec<Vec<f64>>> {
    if norm.is_maximum() {
        Ok((0..1usize << d)
            .map(|mask| (0..d).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect())
            .collect())
    } else if norm.is_sum() {
        let mut out = Vec::with_capacity(2 * d);
        for j in 0..d {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; d];
                e[j] = s;
                out.push(e);
            }
        }
        Ok(out)
    } else {
        Err(Error::unsupported(format!("sign patterns for the {} norm", norm.label())))
    }
}

impl DualProgram {
    pub fn n(&self) -> usize {
        self.cones.len()
    }

    fn dim(&self) -> usize {
        self.cones[0].dim
    }

    fn normalized(&self, i: usize) -> bool {
        self.normalization == Normalization::Full || i + 1 < self.n()
    }

    /// Objective value of given vectors (constraints are not checked).
    pub fn objective(&self, xs: &[Vec<f64>]) -> Result<f64> {
        let dn = self.norm.dual();
        let mut v = 0.0;
        for (i, x) in xs.iter().enumerate() {
            if !self.membership[i] && self.dist_weights[i] != 0.0 {
                v += self.dist_weights[i] * self.cones[i].dist(x, dn)?;
            }
        }
        if let Some(w) = self.sum_weight {
            v += w * dn.norm(&sum_vectors(xs, self.dim()));
        }
        Ok(v)
    }

    /// Checks all constraints with tolerance `tol`.
    pub fn feasible(&self, xs: &[Vec<f64>], tol: f64) -> Result<bool> {
        let dn = self.norm.dual();
        for (i, x) in xs.iter().enumerate() {
            if self.membership[i] && self.cones[i].dist(x, dn)? > tol {
                return Ok(false);
            }
        }
        if self.sum_weight.is_none() && dn.norm(&sum_vectors(xs, self.dim())) > tol {
            return Ok(false);
        }
        let total: f64 = xs.iter().enumerate().filter(|(i, _)| self.normalized(*i)).map(|(_, x)| dn.norm(x)).sum();
        if (total - 1.0).abs() > tol {
            return Ok(false);
        }
        if let Some((w, rhs)) = &self.pairing {
            let p: f64 = xs.iter().zip(w).map(|(x, wi)| dot(x, wi)).sum();
            if p < rhs - tol {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Minimizes the objective; `None` when the constraints cannot be met.
    pub fn solve(&self, opts: &SolveOptions) -> Result<Option<DualSolution>> {
        if self.norm.is_polyhedral() {
            self.solve_patterns()
        } else if self.norm.is_euclidean() {
            self.solve_sampled(opts)
        } else {
            Err(Error::unsupported(format!("dual programs under the {} norm", self.norm.label())))
        }
    }

    fn solve_patterns(&self) -> Result<Option<DualSolution>> {
        let n = self.n();
        let d = self.dim();
        let dn = self.norm.dual();
        let funcs = dual_functionals(self.norm, d)?;
        let normed: Vec<usize> = (0..n).filter(|&i| self.normalized(i)).collect();
        let total = funcs.len().checked_pow(normed.len() as u32).filter(|&t| t <= MAX_PATTERNS);
        let total = total.ok_or_else(|| Error::unsupported("too many sign patterns for the normalization"))?;
        let best = (0..total)
            .into_par_iter()
            .map(|code| -> Result<Option<(f64, usize, Vec<Vec<f64>>)>> {
                let mut c = code;
                let mut pattern = vec![0usize; n];
                for &i in &normed {
                    pattern[i] = c % funcs.len();
                    c /= funcs.len();
                }
                Ok(self.pattern_lp(&funcs, &pattern, dn)?.map(|(v, xs)| (v, code, xs)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let Some((lp_value, _, xs)) = best else { return Ok(None) };
        let xs = self.polish(xs)?;
        let value = self.objective(&xs)?;
        Ok(Some(DualSolution { value, lower: lp_value.min(value) - 1e-9, vectors: xs, exact: true, evaluated: total }))
    }

    /// Removes LP round-off: snaps member vectors onto their cones, restores an exact zero
    /// sum through the last vector and rescales to the normalization.
    fn polish(&self, mut xs: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
        let n = self.n();
        let dn = self.norm.dual();
        for i in 0..n {
            if self.membership[i] {
                xs[i] = self.cones[i].nearest(&xs[i], dn)?.0;
            }
        }
        if self.sum_weight.is_none() && !self.membership[n - 1] {
            xs[n - 1] = scale(&sum_vectors(&xs[..n - 1], self.dim()), -1.0);
        }
        let total: f64 = (0..n).filter(|&i| self.normalized(i)).map(|i| dn.norm(&xs[i])).sum();
        if !(total > 0.0) {
            return Err(Error::numerical("dual program solution vanished"));
        }
        Ok(xs.iter().map(|x| scale(x, 1.0 / total)).collect())
    }

    fn pattern_lp(&self, funcs: &[Vec<f64>], pattern: &[usize], dn: Norm) -> Result<Option<(f64, Vec<Vec<f64>>)>> {
        let n = self.n();
        let d = self.dim();
        let mut lp = Lp::new(n * d);
        for j in 0..n * d {
            lp.free(j);
        }
        for i in 0..n {
            let cone = &self.cones[i];
            let weighted = !self.membership[i] && self.dist_weights[i] != 0.0;
            if !self.membership[i] && !weighted {
                continue;
            }
            let gens = if cone.is_zero() { Vec::new() } else { cone.conic_generators() };
            let mu: Vec<usize> = gens.iter().map(|_| lp.add_var(0.0, 0.0, f64::INFINITY)).collect();
            let diff = |j: usize| -> (Vec<(usize, f64)>, f64) {
                let mut e = vec![(i * d + j, 1.0)];
                e.extend(gens.iter().zip(&mu).map(|(g, &m)| (m, -g[j])));
                (e, 0.0)
            };
            if self.membership[i] {
                for j in 0..d {
                    let (e, _) = diff(j);
                    lp.add_sparse_row(&e, Sense::Eq, 0.0);
                }
            } else {
                let ts = add_norm_epigraph(&mut lp, dn, d, diff)?;
                for t in ts {
                    lp.objective[t] = self.dist_weights[i];
                }
            }
        }
        match self.sum_weight {
            None => {
                for j in 0..d {
                    let e: Vec<(usize, f64)> = (0..n).map(|i| (i * d + j, 1.0)).collect();
                    lp.add_sparse_row(&e, Sense::Eq, 0.0);
                }
            }
            Some(w) => {
                let ts = add_norm_epigraph(&mut lp, dn, d, |j| ((0..n).map(|i| (i * d + j, 1.0)).collect(), 0.0))?;
                for t in ts {
                    lp.objective[t] = w;
                }
            }
        }
        let mut norm_row = Vec::new();
        for i in (0..n).filter(|&i| self.normalized(i)) {
            let vi = &funcs[pattern[i]];
            for (k, v) in funcs.iter().enumerate() {
                if k == pattern[i] {
                    continue;
                }
                let e: Vec<(usize, f64)> = (0..d).map(|j| (i * d + j, vi[j] - v[j])).collect();
                lp.add_sparse_row(&e, Sense::Ge, 0.0);
            }
            norm_row.extend((0..d).map(|j| (i * d + j, vi[j])));
        }
        lp.add_sparse_row(&norm_row, Sense::Eq, 1.0);
        if let Some((w, rhs)) = &self.pairing {
            let e: Vec<(usize, f64)> = (0..n).flat_map(|i| (0..d).map(move |j| (i * d + j, w[i][j]))).collect();
            lp.add_sparse_row(&e, Sense::Ge, *rhs);
        }
        let s = lp.solve()?;
        match s.status {
            LpStatus::Optimal => {
                let xs: Vec<Vec<f64>> = (0..n).map(|i| s.x[i * d..(i + 1) * d].to_vec()).collect();
                Ok(Some((s.value, xs)))
            }
            LpStatus::Infeasible => Ok(None),
            LpStatus::Unbounded => Err(Error::numerical("dual program LP is unbounded")),
        }
    }

    /// Unit directions available to `x_i*`: inside the cone under membership, all otherwise.
    fn directions(&self, i: usize, opts: &SolveOptions) -> Vec<Vec<f64>> {
        let d = self.dim();
        let grid = |k: usize| direction_grid(k, if k == 2 { opts.circle } else { opts.sphere });
        if !self.membership[i] {
            return grid(d);
        }
        let cone = &self.cones[i];
        if cone.is_zero() {
            return Vec::new();
        }
        if cone.subspace {
            let q = orthonormal_basis(&cone.generators);
            return match q.len() {
                1 => vec![q[0].clone(), scale(&q[0], -1.0)],
                k if k <= 3 => grid(k)
                    .into_iter()
                    .map(|c| c.iter().zip(&q).fold(vec![0.0; d], |acc, (ci, v)| add(&acc, &scale(v, *ci))))
                    .collect(),
                _ => grid(d),
            };
        }
        let gens: Vec<Vec<f64>> = cone.generators.iter().filter(|g| norm2(g) > 0.0).map(|g| scale(g, 1.0 / norm2(g))).collect();
        let mut out = gens.clone();
        if gens.len() >= 2 {
            for a in 0..gens.len() {
                for b in a + 1..gens.len() {
                    for k in 1..16 {
                        let t = k as f64 / 16.0;
                        let v = add(&scale(&gens[a], 1.0 - t), &scale(&gens[b], t));
                        if norm2(&v) > 1e-12 {
                            out.push(scale(&v, 1.0 / norm2(&v)));
                        }
                    }
                }
            }
            for u in grid(d) {
                if cone.contains(&u, 1e-12).unwrap_or(false) {
                    out.push(u);
                }
            }
        }
        out
    }

    /// Enumerates `x_i* = t_i u_i` over direction grids and a simplex grid of weights (the
    /// last vector is `-sum` under the zero-sum constraint), rescaled to the normalization.
    /// Cone distances and pairings of the free vectors are positively homogeneous, so they
    /// are computed once per direction.
    fn solve_sampled(&self, opts: &SolveOptions) -> Result<Option<DualSolution>> {
        let n = self.n();
        let d = self.dim();
        let dn = self.norm.dual();
        let zero_sum = self.sum_weight.is_none();
        let free: Vec<usize> = if zero_sum { (0..n - 1).collect() } else { (0..n).collect() };
        let mut slots = Vec::with_capacity(free.len());
        for &i in &free {
            let mut dirs = self.directions(i, opts);
            if dirs.is_empty() {
                dirs.push(vec![0.0; d]);
            }
            let weighted = !self.membership[i] && self.dist_weights[i] != 0.0;
            let mut cost = Vec::with_capacity(dirs.len());
            let mut pair = Vec::with_capacity(dirs.len());
            for u in &dirs {
                cost.push(if weighted { self.dist_weights[i] * self.cones[i].dist(u, dn)? } else { 0.0 });
                pair.push(self.pairing.as_ref().map_or(0.0, |(w, _)| dot(u, &w[i])));
            }
            let size: Vec<f64> = dirs.iter().map(|u| dn.norm(u)).collect();
            slots.push((i, dirs, cost, pair, size));
        }
        let weights = simplex_grid(free.len(), if free.len() == 1 { 1 } else { opts.simplex_steps });
        let dir_count = slots.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.1.len()));
        let total = dir_count.and_then(|c| c.checked_mul(weights.len()));
        let exhaustive = matches!(total, Some(t) if t <= opts.cap);
        let count = if exhaustive { total.unwrap_or(0) } else { opts.cap };
        let choice = |code: usize| -> (Vec<usize>, usize) {
            let (mut c, wk) = if exhaustive {
                (code / weights.len(), code % weights.len())
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (code as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let c: usize = rng.gen_range(0..usize::MAX);
                (c, rng.gen_range(0..weights.len()))
            };
            let ks = slots
                .iter()
                .map(|s| {
                    let k = c % s.1.len();
                    c /= s.1.len();
                    k
                })
                .collect();
            (ks, wk)
        };
        let assemble = |ks: &[usize], wk: usize| -> Vec<Vec<f64>> {
            let mut xs = vec![vec![0.0; d]; n];
            for (slot, s) in slots.iter().enumerate() {
                xs[s.0] = scale(&s.1[ks[slot]], weights[wk][slot]);
            }
            if zero_sum {
                xs[n - 1] = scale(&sum_vectors(&xs[..n - 1], d), -1.0);
            }
            xs
        };
        let evaluate = |code: usize| -> Option<(f64, usize)> {
            let (ks, wk) = choice(code);
            let mut value = 0.0;
            let mut pairing = 0.0;
            let mut norm_total = 0.0;
            let mut sum = vec![0.0; d];
            for (slot, s) in slots.iter().enumerate() {
                let t = weights[wk][slot];
                if t == 0.0 {
                    continue;
                }
                let k = ks[slot];
                value += t * s.2[k];
                pairing += t * s.3[k];
                if self.normalized(s.0) {
                    norm_total += t * s.4[k];
                }
                for (acc, u) in sum.iter_mut().zip(&s.1[k]) {
                    *acc += t * u;
                }
            }
            if zero_sum {
                let last: Vec<f64> = sum.iter().map(|v| -v).collect();
                if !self.membership[n - 1] && self.dist_weights[n - 1] != 0.0 {
                    value += self.dist_weights[n - 1] * self.cones[n - 1].dist(&last, dn).ok()?;
                }
                if let Some((w, _)) = &self.pairing {
                    pairing += dot(&last, &w[n - 1]);
                }
                if self.normalized(n - 1) {
                    norm_total += dn.norm(&last);
                }
            } else if let Some(sw) = self.sum_weight {
                value += sw * dn.norm(&sum);
            }
            if !(norm_total > 1e-12) {
                return None;
            }
            if let Some((_, rhs)) = &self.pairing {
                if pairing / norm_total < *rhs {
                    return None;
                }
            }
            Some((value / norm_total, code))
        };
        let best = (0..count)
            .into_par_iter()
            .filter_map(evaluate)
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let Some((_, code)) = best else { return Ok(None) };
        let (ks, wk) = choice(code);
        let xs = assemble(&ks, wk);
        let total: f64 = (0..n).filter(|&i| self.normalized(i)).map(|i| dn.norm(&xs[i])).sum();
        let vectors: Vec<Vec<f64>> = xs.iter().map(|x| scale(x, 1.0 / total)).collect();
        let value = self.objective(&vectors)?;
        Ok(Some(DualSolution { value, lower: 0.0, vectors, exact: false, evaluated: count }))
    }
}

/// Nonnegative weight vectors of length `k` summing to one with denominators `steps`.
fn simplex_grid(k: usize, steps: usize) -> Vec<Vec<f64>> {
    fn rec(k: usize, left: usize, steps: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<f64>>) {
        if k == 1 {
            cur.push(left);
            out.push(cur.iter().map(|&c| c as f64 / steps as f64).collect());
            cur.pop();
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(k - 1, left - c, steps, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        rec(k, steps, steps, &mut Vec::new(), &mut out);
    }
    out
}
