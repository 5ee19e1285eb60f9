//! Brute-force verifiers: dense-grid distances, exhaustive emptiness decisions,
//! clause-by-clause Ekeland checks and raw re-evaluation of inequalities.
//!
//! These avoid the projection and search code of the main path wherever a direct
//! enumeration is affordable (dimension at most 3, finite spaces).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ekeland::{EvpResult, FiniteMetricSpace, GeometricResult};
use crate::error::{check_dim, Error, Result};
use crate::geometry::lp::{Lp, LpStatus, Sense};
use crate::geometry::{dist_point_set, Norm, Piece, Polyhedron, SetRep};
use crate::linalg::{dot, mean};
use crate::perturbation::DualFamily;
use crate::tol;

/// Default number of grid cells along the longest side of a region.
pub const GRID_CELLS: usize = 128;
const MAX_GRID_POINTS: usize = 8_000_000;

/// Bracketed value produced by a grid sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridBracket {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub spacing: f64,
    pub grid_points: usize,
}

impl GridBracket {
    pub fn contains(&self, v: f64, slack: f64) -> bool {
        v >= self.lower - slack && v <= self.upper + slack
    }
}

/// Axis-aligned grid over `[lo, hi]` with spacing at most `h`.
struct Grid {
    lo: Vec<f64>,
    counts: Vec<usize>,
    steps: Vec<f64>,
}

impl Grid {
    fn new(lo: &[f64], hi: &[f64], h: f64) -> Result<Grid> {
        let counts: Vec<usize> = lo.iter().zip(hi).map(|(a, b)| (((b - a) / h).ceil() as usize).max(1) + 1).collect();
        let total = counts.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
        if total.map_or(true, |t| t > MAX_GRID_POINTS) {
            return Err(Error::unsupported("grid too fine for the region"));
        }
        let steps = lo.iter().zip(hi).zip(&counts).map(|((a, b), &c)| (b - a) / (c - 1) as f64).collect();
        Ok(Grid { lo: lo.to_vec(), counts, steps })
    }

    fn len(&self) -> usize {
        self.counts.iter().product()
    }

    fn point(&self, mut k: usize) -> Vec<f64> {
        (0..self.lo.len())
            .map(|j| {
                let i = k % self.counts[j];
                k /= self.counts[j];
                self.lo[j] + i as f64 * self.steps[j]
            })
            .collect()
    }

    /// Euclidean covering radius.
    fn cover(&self) -> f64 {
        0.5 * self.steps.iter().map(|s| s * s).sum::<f64>().sqrt()
    }
}

fn require_low_dim(d: usize) -> Result<()> {
    if d == 0 || d > 3 {
        return Err(Error::unsupported("grid oracles are limited to dimensions 1 to 3"));
    }
    Ok(())
}

fn region_of(set: &SetRep) -> Result<(Vec<f64>, Vec<f64>)> {
    set.bounding_box()?.ok_or_else(|| Error::precondition("the set is unbounded; grid oracles need a bounded region"))
}

/// `d(x, set)` by a sweep over a grid of the bounding box of `set`. Every set point has a
/// grid point within the membership band `tol::FEAS + cover`, so the band minimum minus the
/// band (in `norm`) is a lower end; the upper end is the minimum over grid points that are
/// members up to `tol::FEAS`. Sets without such grid points (no interior at this spacing)
/// fall back to the band minimum plus the band, which is only approximate near sharp
/// corners. `spacing` defaults to the box diameter over [`GRID_CELLS`]. Finite sets are
/// enumerated directly.
pub fn grid_distance_oracle(x: &[f64], set: &SetRep, spacing: Option<f64>, norm: Norm) -> Result<GridBracket> {
    let d = set.dim();
    check_dim(d, x.len())?;
    require_low_dim(d)?;
    if let Some(pts) = set.finite_points() {
        let v = pts.iter().map(|p| norm.dist(x, p)).fold(f64::INFINITY, f64::min);
        return Ok(GridBracket { value: v, lower: v, upper: v, spacing: 0.0, grid_points: pts.len() });
    }
    let (lo, hi) = region_of(set)?;
    let diam = lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt();
    let h = spacing.unwrap_or(diam / GRID_CELLS as f64).max(1e-9 * diam.max(1.0));
    let pad = h;
    let lo: Vec<f64> = lo.iter().map(|v| v - pad).collect();
    let hi: Vec<f64> = hi.iter().map(|v| v + pad).collect();
    let grid = Grid::new(&lo, &hi, h)?;
    let band = tol::FEAS + grid.cover();
    let (value, inner) = (0..grid.len())
        .into_par_iter()
        .filter_map(|k| {
            let g = grid.point(k);
            if !set.contains(&g, band) {
                return None;
            }
            let v = norm.dist(x, &g);
            Some((v, if set.contains(&g, tol::FEAS) { v } else { f64::INFINITY }))
        })
        .reduce(|| (f64::INFINITY, f64::INFINITY), |a, b| (a.0.min(b.0), a.1.min(b.1)));
    if value.is_infinite() {
        return Err(Error::numerical("no grid point falls in the membership band"));
    }
    let w = norm.euclid_factor(d) * band;
    let upper = if inner.is_finite() { inner } else { value + w };
    Ok(GridBracket { value, lower: (value - w).max(0.0), upper, spacing: h, grid_points: grid.len() })
}

/// Verdict of [`emptiness_oracle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Emptiness {
    Empty { method: String },
    Witness { point: Vec<f64>, method: String },
    /// A grid point is within the membership band of every set but in none exactly.
    Inconclusive { point: Vec<f64>, band: f64 },
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty { .. })
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, Emptiness::Witness { .. })
    }
}

fn box_intersection(sets: &[SetRep], region: Option<&(Vec<f64>, Vec<f64>)>) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
    let mut out: Option<(Vec<f64>, Vec<f64>)> = region.cloned();
    for s in sets {
        if let Some((lo, hi)) = s.bounding_box()? {
            out = Some(match out {
                None => (lo, hi),
                Some((a, b)) => (
                    a.iter().zip(&lo).map(|(x, y)| x.max(*y)).collect(),
                    b.iter().zip(&hi).map(|(x, y)| x.min(*y)).collect(),
                ),
            });
        }
    }
    Ok(out)
}

/// A point of one combination of polyhedral pieces inside the box, by LP.
fn poly_combo_point(polys: &[&Polyhedron], lo: &[f64], hi: &[f64]) -> Result<Option<Vec<f64>>> {
    let d = lo.len();
    let mut lp = Lp::new(d);
    for j in 0..d {
        lp.free(j);
        lp.add_sparse_row(&[(j, 1.0)], Sense::Ge, lo[j]);
        lp.add_sparse_row(&[(j, 1.0)], Sense::Le, hi[j]);
    }
    for p in polys {
        p.add_to_lp(&mut lp, 0);
    }
    let sol = lp.solve()?;
    Ok((sol.status == LpStatus::Optimal).then(|| sol.x[..d].to_vec()))
}

/// LP decision when every piece is polyhedral, enumerating piece combinations:
/// `Some(None)` when empty, `Some(Some(p))` with a common point.
fn lp_emptiness(sets: &[SetRep], lo: &[f64], hi: &[f64]) -> Result<Option<Option<Vec<f64>>>> {
    let lists: Vec<Vec<Piece>> = sets.iter().map(|s| s.pieces()).collect();
    let mut polys: Vec<Vec<Polyhedron>> = Vec::new();
    for l in &lists {
        let mut v = Vec::new();
        for p in l {
            match p {
                Piece::Poly(q) => v.push(q.clone()),
                Piece::Ball { .. } => return Ok(None),
            }
        }
        polys.push(v);
    }
    let total = polys.iter().map(|v| v.len()).product::<usize>();
    if total > 100_000 {
        return Ok(None);
    }
    for mut k in 0..total {
        let combo: Vec<&Polyhedron> = polys
            .iter()
            .map(|v| {
                let q = &v[k % v.len()];
                k /= v.len();
                q
            })
            .collect();
        if let Some(p) = poly_combo_point(&combo, lo, hi)? {
            return Ok(Some(Some(p)));
        }
    }
    Ok(Some(None))
}

/// Decides whether `cap sets` meets the box `region` (or the common bounding box of the
/// bounded sets). A finite set is enumerated exactly. Otherwise a grid with spacing
/// `spacing` (default box diameter over [`GRID_CELLS`]) is swept: a point inside every set
/// is a witness, no point within the band `tol::FEAS + cover` of every set proves
/// emptiness. Band-only hits are inconclusive unless the LP path decides polyhedral data.
pub fn emptiness_oracle(sets: &[SetRep], region: Option<(Vec<f64>, Vec<f64>)>, spacing: Option<f64>) -> Result<Emptiness> {
    let d = sets.first().ok_or_else(|| Error::invalid("no sets"))?.dim();
    for s in sets {
        check_dim(d, s.dim())?;
    }
    require_low_dim(d)?;
    let member_tol = |p: &[f64]| tol::FEAS * crate::linalg::norm2(p).max(1.0);
    let in_region = |p: &[f64]| {
        region.as_ref().map_or(true, |(lo, hi)| p.iter().zip(lo.iter().zip(hi)).all(|(x, (a, b))| *x >= a - tol::FEAS && *x <= b + tol::FEAS))
    };
    if let Some(k) = sets.iter().position(|s| s.finite_points().is_some()) {
        let pts = sets[k].finite_points().unwrap_or_default();
        for p in pts {
            if in_region(&p) && sets.iter().all(|s| s.contains(&p, member_tol(&p))) {
                return Ok(Emptiness::Witness { point: p, method: "exhaustive".into() });
            }
        }
        return Ok(Emptiness::Empty { method: "exhaustive".into() });
    }
    let (lo, hi) = box_intersection(sets, region.as_ref())?
        .ok_or_else(|| Error::precondition("unbounded data needs an explicit region"))?;
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return Ok(Emptiness::Empty { method: "bounding-box".into() });
    }
    let diam = lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt();
    let h = spacing.unwrap_or(diam / GRID_CELLS as f64).max(1e-9 * diam.max(1.0)).max(1e-12);
    let grid = Grid::new(&lo, &hi, h)?;
    let band = tol::FEAS + grid.cover();
    // 0: exact hit, 1: band hit
    let hit = (0..grid.len())
        .into_par_iter()
        .filter_map(|k| {
            let g = grid.point(k);
            if !sets.iter().all(|s| s.contains(&g, band)) {
                return None;
            }
            let exact = sets.iter().all(|s| s.contains(&g, member_tol(&g)));
            Some((if exact { 0u8 } else { 1u8 }, k))
        })
        .min();
    let lp = lp_emptiness(sets, &lo, &hi)?;
    Ok(match (hit, lp) {
        (Some((0, k)), Some(None)) => Emptiness::Inconclusive { point: grid.point(k), band },
        (Some((0, k)), _) => Emptiness::Witness { point: grid.point(k), method: "grid".into() },
        (_, Some(Some(p))) => Emptiness::Witness { point: p, method: "lp".into() },
        (_, Some(None)) => Emptiness::Empty { method: "lp".into() },
        (None, None) => Emptiness::Empty { method: "grid".into() },
        (Some((_, k)), None) => Emptiness::Inconclusive { point: grid.point(k), band },
    })
}

/// Clause-by-clause evaluation of an Ekeland result on a finite space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvpCheck {
    /// `d(x_hat, x_bar) < lambda`
    pub clause_i: bool,
    /// `f(x_hat) <= f(x_bar)`
    pub clause_ii: bool,
    /// `f(x) + (eps/lambda) d(x, x_hat) > f(x_hat)` for every `x != x_hat`.
    pub clause_iii: bool,
    /// Smallest `f(x) + (eps/lambda) d(x, x_hat) - f(x_hat)` over `x != x_hat`.
    pub clause_iii_margin: f64,
    pub holds: bool,
}

fn evp_clauses(len: usize, f: &[f64], dist: &dyn Fn(usize, usize) -> f64, x_bar: usize, x_hat: usize, eps: f64, lambda: f64) -> EvpCheck {
    let slope = eps / lambda;
    let clause_i = dist(x_hat, x_bar) < lambda;
    let clause_ii = f[x_hat] <= f[x_bar];
    let mut margin = f64::INFINITY;
    for x in (0..len).filter(|&x| x != x_hat) {
        margin = margin.min(f[x] + slope * dist(x, x_hat) - f[x_hat]);
    }
    let clause_iii = margin > 0.0;
    EvpCheck { clause_i, clause_ii, clause_iii, clause_iii_margin: margin, holds: clause_i && clause_ii && clause_iii }
}

/// Checks all three conclusions of an [`EvpResult`] by full enumeration.
pub fn evp_exhaustive_check(space: &FiniteMetricSpace, f: &[f64], x_bar: usize, result: &EvpResult, eps: f64, lambda: f64) -> Result<EvpCheck> {
    check_dim(space.len(), f.len())?;
    if x_bar >= f.len() || result.x_hat >= f.len() {
        return Err(Error::invalid("index out of range"));
    }
    Ok(evp_clauses(f.len(), f, &|i, j| space.d(i, j), x_bar, result.x_hat, eps, lambda))
}

/// Rebuilds the product space of a geometric principle on point clouds (metric
/// `max_i d_i / r_i` with `r_i = lambda` for `i < n` and `rho` for the last cloud,
/// `f = d1` of the tuple) and checks the Ekeland conclusions at rate `eps_inner` and
/// radius 1 for the reported points.
pub fn geometric_evp_check(clouds: &[Vec<Vec<f64>>], start: &[Vec<f64>], result: &GeometricResult, lambda: f64, rho: f64, norm: Norm) -> Result<EvpCheck> {
    let n = clouds.len();
    if start.len() != n || result.points.len() != n {
        return Err(Error::invalid("one point per cloud is required"));
    }
    let sizes: Vec<usize> = clouds.iter().map(|c| c.len()).collect();
    let len = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).filter(|&l| l <= 4_000_000);
    let len = len.ok_or_else(|| Error::unsupported("product space too large"))?;
    let decode = |mut k: usize| -> Vec<usize> {
        sizes
            .iter()
            .map(|&s| {
                let i = k % s;
                k /= s;
                i
            })
            .collect()
    };
    let locate = |pts: &[Vec<f64>]| -> Result<usize> {
        let mut k = 0;
        for i in (0..n).rev() {
            let j = clouds[i]
                .iter()
                .position(|p| norm.dist(p, &pts[i]) <= 1e-12)
                .ok_or_else(|| Error::invalid("a point is not in its cloud"))?;
            k = k * sizes[i] + j;
        }
        Ok(k)
    };
    let d1 = |idx: &[usize]| -> f64 { (0..n - 1).map(|i| norm.dist(&clouds[i][idx[i]], &clouds[n - 1][idx[n - 1]])).fold(0.0, f64::max) };
    let f: Vec<f64> = (0..len).into_par_iter().map(|k| d1(&decode(k))).collect();
    let radius = |i: usize| if i + 1 < n { lambda } else { rho };
    let dist = |a: usize, b: usize| -> f64 {
        let (ia, ib) = (decode(a), decode(b));
        (0..n).map(|i| norm.dist(&clouds[i][ia[i]], &clouds[i][ib[i]]) / radius(i)).fold(0.0, f64::max)
    };
    let x_bar = locate(start)?;
    let x_hat = locate(&result.points)?;
    Ok(evp_clauses(len, &f, &dist, x_bar, x_hat, result.eps_inner, 1.0))
}

/// Raw data for [`inequality_replay`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "lemma", rename_all = "kebab-case")]
pub enum ReplayInstance {
    /// Rebalancing lemma: input family, its output and the constants. `zero_sum` selects
    /// the part; `primal` with `tau` adds the pairing clause.
    Rebalance {
        family: DualFamily,
        output: Vec<Vec<f64>>,
        eps: f64,
        lambda: f64,
        rho: f64,
        zero_sum: bool,
        #[serde(default)]
        primal: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        tau: Option<f64>,
    },
    /// Distance chains for points, with a claimed enclosing-ball center.
    DistanceChain { points: Vec<Vec<f64>>, center: Vec<f64>, norm: Norm },
    /// Metric clause from local emptiness: `alpha d(x_bar, cap(set_i - a_i)) > max d(x_bar, set_i - a_i)`
    /// with `alpha = eps / rho`, given the nearest point of the translated intersection.
    MetricForm {
        sets: Vec<SetRep>,
        x_bar: Vec<f64>,
        shifts: Vec<Vec<f64>>,
        eps: f64,
        rho: f64,
        /// Distance from `x_bar` to the translated intersection (`inf` when empty).
        intersection_distance: f64,
        norm: Norm,
    },
}

/// `lhs < rhs` (or `<=` when `strict` is false) with its margin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayItem {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub strict: bool,
    pub holds: bool,
    /// Strict inequality met with equality up to `tol::STRICT`.
    pub boundary: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplayReport {
    pub items: Vec<ReplayItem>,
    pub all_hold: bool,
}

fn item(name: &str, lhs: f64, rhs: f64, strict: bool) -> ReplayItem {
    let margin = if lhs == rhs { 0.0 } else { rhs - lhs };
    let holds = if strict { margin > 0.0 } else { margin >= -tol::OBJ * rhs.abs().max(1.0) };
    ReplayItem { name: name.into(), lhs, rhs, margin, strict, holds, boundary: strict && margin.abs() <= tol::STRICT }
}

/// Recomputes both sides of each inequality from the raw fields and reports margins.
pub fn inequality_replay(inst: &ReplayInstance) -> Result<ReplayReport> {
    let mut items = Vec::new();
    match inst {
        ReplayInstance::Rebalance { family, output, eps, lambda, rho, zero_sum, primal, tau } => {
            let dn = family.norm.dual();
            let dists = family.cone_distances()?;
            items.push(item("lambda sum d(z_i, K_i) + rho ||sum z_i|| < eps", lambda * dists.iter().sum::<f64>() + rho * family.sum_norm(), *eps, true));
            let out = family.with_vectors(output.clone());
            let out_d = out.cone_distances()?;
            items.push(item("sum ||z_hat_i|| = 1 (upper)", out.total_norm(), 1.0 + 1e-12, false));
            items.push(item("sum ||z_hat_i|| = 1 (lower)", 1.0 - 1e-12, out.total_norm(), false));
            if *zero_sum {
                items.push(item("||sum z_hat_i|| = 0", out.sum_norm(), 1e-12, false));
                items.push(item("sum d(z_hat_i, K_i) < eps / lambda", out_d.iter().sum(), eps / lambda, true));
            } else {
                items.push(item("max d(z_hat_i, K_i) = 0", out_d.iter().copied().fold(0.0, f64::max), tol::FEAS, false));
                items.push(item("||sum z_hat_i|| < eps / rho", dn.norm(&out.sum()), eps / rho, true));
            }
            if let (Some(xs), Some(t)) = (primal, tau) {
                let max_x = xs.iter().map(|x| family.norm.norm(x)).fold(0.0, f64::max);
                let pairing: f64 = output.iter().zip(xs).map(|(z, x)| dot(z, x)).sum();
                let tau_hat = if *zero_sum { (t * rho - eps) / (rho + eps) } else { (t * lambda - eps) / (lambda + eps) };
                items.push(item("tau_hat max ||x_i|| < sum <z_hat_i, x_i>", tau_hat * max_x, pairing, true));
            }
        }
        ReplayInstance::DistanceChain { points, center, norm } => {
            let n = points.len();
            if n < 2 {
                return Err(Error::precondition("at least two points are required"));
            }
            let last = &points[n - 1];
            let d1 = points[..n - 1].iter().map(|p| norm.dist(p, last)).fold(0.0, f64::max);
            let r_up = points.iter().map(|p| norm.dist(p, center)).fold(0.0, f64::max);
            let mut diam = 0.0_f64;
            for a in points {
                for b in points {
                    diam = diam.max(norm.dist(a, b));
                }
            }
            let r_lo = 0.5 * diam;
            let bary = mean(points, last.len());
            let d3 = points.iter().map(|p| norm.dist(p, &bary)).fold(0.0, f64::max);
            items.push(item("d2 <= d1", r_lo, d1, false));
            items.push(item("d1 <= 2 d2", d1, 2.0 * r_up, false));
            items.push(item("d2 <= d3", r_lo, d3, false));
            items.push(item("d3 <= 2 d2", d3, 2.0 * r_up, false));
        }
        ReplayInstance::MetricForm { sets, x_bar, shifts, eps, rho, intersection_distance, norm } => {
            let mut worst = 0.0_f64;
            for (s, a) in sets.iter().zip(shifts) {
                let moved = crate::translation::translate(s, a);
                worst = worst.max(dist_point_set(x_bar, &moved, *norm)?);
            }
            let lhs = if intersection_distance.is_infinite() { f64::INFINITY } else { eps / rho * intersection_distance };
            items.push(item("max d(x_bar, set_i - a_i) < alpha d(x_bar, cap)", worst, lhs, true));
            let max_shift = shifts.iter().map(|a| norm.norm(a)).fold(0.0, f64::max);
            items.push(item("max ||a_i|| < eps", max_shift, *eps, true));
        }
    }
    let all_hold = items.iter().all(|i| i.holds);
    Ok(ReplayReport { items, all_hold })
}

/// `sum <z_i, x_i>`, exposed for replays built outside this module.
pub fn pairing(duals: &[Vec<f64>], primal: &[Vec<f64>]) -> f64 {
    duals.iter().zip(primal).map(|(z, x)| dot(z, x)).sum()
}

/// Midpoint of a box, used to seed regions around a point.
pub fn box_around(center: &[f64], r: f64) -> (Vec<f64>, Vec<f64>) {
    (center.iter().map(|c| c - r).collect(), center.iter().map(|c| c + r).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ekeland::evp;

    fn interval(a: f64, b: f64) -> SetRep {
        SetRep::HPolyhedron { a: vec![vec![1.0], vec![-1.0]], b: vec![b, -a] }
    }

    fn bx(x0: f64, x1: f64, y0: f64, y1: f64) -> SetRep {
        SetRep::HPolyhedron {
            a: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            b: vec![x1, -x0, y1, -y0],
        }
    }

    #[test]
    fn grid_distance_to_interval() {
        let r = grid_distance_oracle(&[5.0], &interval(0.0, 1.0), Some(1e-3), Norm::Euclidean).unwrap();
        assert!(r.contains(4.0, 0.0) && r.lower >= 3.998 && r.upper <= 4.002, "{r:?}");
    }

    #[test]
    fn unbounded_set_is_rejected() {
        let line = SetRep::line(vec![0.0, 0.0], vec![1.0, 0.0]);
        assert!(matches!(grid_distance_oracle(&[0.0, 1.0], &line, None, Norm::Euclidean), Err(Error::PreconditionFailed(_))));
    }

    #[test]
    fn emptiness_verdicts() {
        let a = bx(0.0, 1.0, 0.0, 1.0);
        assert!(emptiness_oracle(&[a.clone(), a.clone()], None, None).unwrap().is_witness());
        let far = bx(2.0, 3.0, 0.0, 1.0);
        assert!(emptiness_oracle(&[a.clone(), far], None, None).unwrap().is_empty());
        // triangles separated by 1e-6 along the diagonal: the grid sees band hits, the LP decides
        let lower = SetRep::HPolyhedron { a: vec![vec![1.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]], b: vec![1.0, 0.0, 0.0] };
        let upper = SetRep::HPolyhedron { a: vec![vec![-1.0, -1.0], vec![1.0, 0.0], vec![0.0, 1.0]], b: vec![-1.0 - 1e-6, 1.0, 1.0] };
        let v = emptiness_oracle(&[lower, upper], None, Some(0.01)).unwrap();
        assert_eq!(v, Emptiness::Empty { method: "lp".into() });
    }

    #[test]
    fn curved_near_touch_is_flagged() {
        let c = std::f64::consts::FRAC_1_SQRT_2;
        let disk = |x: f64| SetRep::Ball { center: vec![x, x], radius: 1.0, norm: Norm::Euclidean };
        let v = emptiness_oracle(&[disk(-c), disk(c + 1e-6)], None, Some(0.01)).unwrap();
        assert!(matches!(v, Emptiness::Inconclusive { .. }), "{v:?}");
    }

    #[test]
    fn evp_check_detects_corruption() {
        let space = FiniteMetricSpace::from_points((0..6).map(|i| vec![i as f64]).collect(), Norm::Euclidean).unwrap();
        let f = vec![3.0, 2.0, 1.5, 1.0, 1.2, 2.0];
        let r = evp(&space, &f, 0, 2.5, 4.0).unwrap();
        assert!(evp_exhaustive_check(&space, &f, 0, &r, 2.5, 4.0).unwrap().holds);
        let mut bad = r.clone();
        bad.x_hat = 5;
        assert!(!evp_exhaustive_check(&space, &f, 0, &bad, 2.5, 4.0).unwrap().holds);
    }

    #[test]
    fn replay_flags_boundary() {
        let r = inequality_replay(&ReplayInstance::DistanceChain {
            points: vec![vec![0.0], vec![1.0], vec![5.0]],
            center: vec![2.5],
            norm: Norm::Euclidean,
        })
        .unwrap();
        assert!(r.all_hold);
        // with n = 3 and these points d1 = 5 = 2 d2 exactly
        assert_eq!(r.items[1].margin, 0.0);
        let s = item("x < 1", 1.0, 1.0, true);
        assert!(s.boundary && !s.holds);
    }
}
