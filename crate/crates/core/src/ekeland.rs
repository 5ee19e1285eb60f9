//! Ekeland-type variational principles on finite metric spaces, where every infimum is
//! attained and all conclusions can be checked exhaustively.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{Norm, SetRep};
use crate::linalg::{add, sub};
use crate::tol;
use crate::translation::{translations_from_near_closest, PrimalCheck, PrimalInstance, PrimalKind};

/// Finite metric space given by its distance matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiniteMetricSpace {
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    pub metric: Vec<Vec<f64>>,
}

impl FiniteMetricSpace {
    pub fn from_points(points: Vec<Vec<f64>>, norm: Norm) -> Result<Self> {
        let metric = points.iter().map(|p| points.iter().map(|q| norm.dist(p, q)).collect()).collect();
        let space = FiniteMetricSpace { points: Some(points), metric };
        space.validate()?;
        Ok(space)
    }

    pub fn from_matrix(metric: Vec<Vec<f64>>) -> Result<Self> {
        let space = FiniteMetricSpace { points: None, metric };
        space.validate()?;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.metric.len()
    }

    pub fn is_empty(&self) -> bool {
        self.metric.is_empty()
    }

    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.metric[i][j]
    }

    /// Symmetry, zero diagonal, positivity off the diagonal and the triangle inequality.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        if n == 0 {
            return Err(Error::invalid("empty metric space"));
        }
        let t = 1e-9;
        for (i, row) in self.metric.iter().enumerate() {
            check_dim(n, row.len())?;
            if row[i].abs() > t {
                return Err(Error::invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = row[j];
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::invalid(format!("bad distance at ({i},{j})")));
                }
                if (v - self.metric[j][i]).abs() > t {
                    return Err(Error::invalid(format!("asymmetric distance at ({i},{j})")));
                }
                if i != j && v <= 0.0 {
                    return Err(Error::invalid(format!("points {i} and {j} coincide")));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if self.metric[i][k] > self.metric[i][j] + self.metric[j][k] + t {
                        return Err(Error::invalid(format!("triangle inequality fails for ({i},{j},{k})")));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Output of [`evp`] with the margins of the three conclusions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvpResult {
    pub x_hat: usize,
    pub path: Vec<usize>,
    /// `lambda - d(x_hat, x_bar)`, positive when clause (i) holds.
    pub clause_i_margin: f64,
    /// `f(x_bar) - f(x_hat)`, nonnegative when clause (ii) holds.
    pub clause_ii_margin: f64,
    /// `min_{x != x_hat} f(x) + (eps/lambda) d(x, x_hat) - f(x_hat)`.
    pub clause_iii_margin: f64,
    /// Same minimum taken over `x != x_bar`, the literal reading of the statement.
    pub clause_iii_literal_margin: f64,
    pub clause_iii_holds: bool,
    pub clause_iii_literal_holds: bool,
}

impl EvpResult {
    pub fn holds(&self) -> bool {
        self.clause_i_margin > 0.0 && self.clause_ii_margin >= 0.0 && self.clause_iii_holds
    }
}

struct Trace {
    x_hat: usize,
    path: Vec<usize>,
}

/// Descent `x_{k+1} = argmin f` over `{x != x_k : f(x) + (eps/lambda) d(x, x_k) <= f(x_k)}`,
/// lowest index on ties, until that set is empty.
fn descend(len: usize, f: &[f64], dist: &(dyn Fn(usize, usize) -> f64 + Sync), start: usize, slope: f64) -> Trace {
    let mut path = vec![start];
    let mut cur = start;
    loop {
        let fc = f[cur];
        let best = (0..len)
            .into_par_iter()
            .filter(|&x| x != cur && f[x] + slope * dist(x, cur) <= fc)
            .map(|x| (f[x], x))
            .reduce_with(|a, b| if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
        match best {
            Some((_, x)) => {
                cur = x;
                path.push(x);
            }
            None => return Trace { x_hat: cur, path },
        }
    }
}

fn check_evp_inputs(f: &[f64], x_bar: usize, eps: f64, lambda: f64) -> Result<f64> {
    if !(eps > 0.0) || !(lambda > 0.0) {
        return Err(Error::precondition("epsilon and lambda must be positive"));
    }
    if x_bar >= f.len() {
        return Err(Error::invalid("starting point out of range"));
    }
    if f.iter().any(|v| v.is_nan() || *v == f64::NEG_INFINITY) {
        return Err(Error::invalid("f must take values in (-inf, +inf]"));
    }
    if !f[x_bar].is_finite() {
        return Err(Error::precondition("f must be finite at the starting point"));
    }
    let inf = f.iter().copied().fold(f64::INFINITY, f64::min);
    if !(f[x_bar] < inf + eps) {
        return Err(Error::precondition(format!("f(x_bar) = {} is not below inf f + eps = {}", f[x_bar], inf + eps)));
    }
    Ok(inf)
}

/// Clause (iii) minima over `x != x_hat` and over `x != x_bar`.
pub fn clause_iii_margins(
    len: usize,
    f: &[f64],
    dist: &(dyn Fn(usize, usize) -> f64 + Sync),
    x_hat: usize,
    x_bar: usize,
    slope: f64,
) -> (f64, f64) {
    let fh = f[x_hat];
    (0..len)
        .into_par_iter()
        .map(|x| {
            let v = f[x] + slope * dist(x, x_hat) - fh;
            let a = if x != x_hat { v } else { f64::INFINITY };
            let b = if x != x_bar { v } else { f64::INFINITY };
            (a, b)
        })
        .reduce(|| (f64::INFINITY, f64::INFINITY), |p, q| (p.0.min(q.0), p.1.min(q.1)))
}

fn evp_generic(
    len: usize,
    f: &[f64],
    dist: &(dyn Fn(usize, usize) -> f64 + Sync),
    x_bar: usize,
    eps: f64,
    lambda: f64,
) -> Result<EvpResult> {
    check_evp_inputs(f, x_bar, eps, lambda)?;
    let slope = eps / lambda;
    let trace = descend(len, f, dist, x_bar, slope);
    let x_hat = trace.x_hat;
    let (m, lit) = clause_iii_margins(len, f, dist, x_hat, x_bar, slope);
    let res = EvpResult {
        x_hat,
        path: trace.path,
        clause_i_margin: lambda - dist(x_hat, x_bar),
        clause_ii_margin: f[x_bar] - f[x_hat],
        clause_iii_margin: m,
        clause_iii_literal_margin: lit,
        clause_iii_holds: m > 0.0,
        clause_iii_literal_holds: lit > 0.0,
    };
    if !res.holds() {
        return Err(Error::numerical("Ekeland descent produced a point violating its conclusions"));
    }
    Ok(res)
}

/// Ekeland principle on a finite metric space.
pub fn evp(space: &FiniteMetricSpace, f: &[f64], x_bar: usize, eps: f64, lambda: f64) -> Result<EvpResult> {
    check_dim(space.len(), f.len())?;
    evp_generic(space.len(), f, &|i, j| space.d(i, j), x_bar, eps, lambda)
}

/// Exact scan of the localized-distance clause over all breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiScan {
    pub breakpoints: usize,
    /// `min_k D(xi_k+) + slack(xi_k) - d1(hat)`; clause (ii) holds iff this is `>= 0`.
    pub min_margin: f64,
    /// Same quantity at interval midpoints (strictly positive when the clause holds).
    pub min_mid_margin: f64,
    pub holds: bool,
}

/// Result of the geometric principles for `n >= 2` point clouds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricResult {
    /// Index of the chosen point in each cloud.
    pub indices: Vec<usize>,
    pub points: Vec<Vec<f64>>,
    pub d1_start: f64,
    pub d1_hat: f64,
    pub d1_sets: f64,
    /// Epsilon actually passed to the Ekeland descent on the product.
    pub eps_inner: f64,
    /// `radius_i - d(hat_i, start_i)` for every cloud.
    pub localization_margins: Vec<f64>,
    pub clause_i_holds: bool,
    pub clause_ii: XiScan,
    pub evp_steps: usize,
}

impl GeometricResult {
    pub fn holds(&self) -> bool {
        self.clause_i_holds && self.clause_ii.holds && self.localization_margins.iter().all(|m| *m > 0.0)
    }
}

fn clouds_of(sets: &[SetRep]) -> Result<Vec<Vec<Vec<f64>>>> {
    sets.iter()
        .map(|s| s.finite_points().ok_or_else(|| Error::unsupported("the geometric principles need point clouds")))
        .collect()
}

fn index_in(cloud: &[Vec<f64>], p: &[f64], norm: Norm) -> Result<usize> {
    cloud
        .iter()
        .position(|q| q.len() == p.len() && norm.dist(q, p) <= tol::FEAS * 10.0)
        .ok_or_else(|| Error::precondition("every starting point must belong to its cloud"))
}

/// `d1` of subsets of clouds: `min_{y in last} max_{i<n} min_{x in S_i} ||x - y||`.
fn d1_indexed(clouds: &[Vec<Vec<f64>>], members: &[Vec<usize>], norm: Norm) -> f64 {
    let n = clouds.len();
    let last = &clouds[n - 1];
    members[n - 1]
        .iter()
        .map(|&y| {
            (0..n - 1)
                .map(|i| members[i].iter().map(|&x| norm.dist(&clouds[i][x], &last[y])).fold(f64::INFINITY, f64::min))
                .fold(0.0, f64::max)
        })
        .fold(f64::INFINITY, f64::min)
}

fn tuple_d1(clouds: &[Vec<Vec<f64>>], idx: &[usize], norm: Norm) -> f64 {
    let n = clouds.len();
    let y = &clouds[n - 1][idx[n - 1]];
    (0..n - 1).map(|i| norm.dist(&clouds[i][idx[i]], y)).fold(0.0, f64::max)
}

/// Checks `d1(S_i ∩ B_{xi r_i}(hat_i)) + xi * rate > d1(hat)` for all `xi > 0`, open balls.
/// The localized distance is constant between consecutive breakpoints `d(x, hat_i)/r_i`,
/// so it is enough to test the left end of every interval.
pub fn scan_localized_clause(clouds: &[Vec<Vec<f64>>], hat: &[usize], radii: &[f64], rate: f64, norm: Norm) -> XiScan {
    let n = clouds.len();
    let m = tuple_d1(clouds, hat, norm);
    let scaled: Vec<Vec<f64>> = (0..n)
        .map(|i| clouds[i].iter().map(|x| norm.dist(x, &clouds[i][hat[i]]) / radii[i]).collect())
        .collect();
    let mut breaks: Vec<f64> = scaled.iter().flatten().copied().collect();
    breaks.push(0.0);
    breaks.sort_by(|a, b| a.total_cmp(b));
    breaks.dedup();
    let localized_at = |xi: f64| -> f64 {
        let members: Vec<Vec<usize>> = (0..n).map(|i| (0..clouds[i].len()).filter(|&x| scaled[i][x] <= xi).collect()).collect();
        d1_indexed(clouds, &members, norm)
    };
    let (min_margin, min_mid) = (0..breaks.len())
        .into_par_iter()
        .map(|k| {
            let xi = breaks[k];
            let dk = localized_at(xi);
            let next = if k + 1 < breaks.len() { breaks[k + 1] } else { xi + 1.0 };
            let mid = 0.5 * (xi + next);
            (dk + xi * rate - m, dk + mid * rate - m)
        })
        .reduce(|| (f64::INFINITY, f64::INFINITY), |a, b| (a.0.min(b.0), a.1.min(b.1)));
    XiScan {
        breakpoints: breaks.len(),
        min_margin,
        min_mid_margin: min_mid,
        holds: min_margin >= -tol::OBJ && min_mid > 0.0,
    }
}

const MAX_PRODUCT: usize = 4_000_000;

/// Asymmetric principle for `n` point clouds: localization radius `lambda` for the first
/// `n - 1` clouds and `rho` for the last one. Runs the Ekeland descent on the product with
/// metric `max(max_{i<n} d_i / lambda, d_n / rho)` and `f = d1`.
pub fn agevp_n(sets: &[SetRep], start: &[Vec<f64>], eps: f64, lambda: f64, rho: f64, norm: Norm) -> Result<GeometricResult> {
    let n = sets.len();
    if n < 2 || start.len() != n {
        return Err(Error::invalid("one starting point per cloud and at least two clouds are required"));
    }
    if !(eps > 0.0 && lambda > 0.0 && rho > 0.0) {
        return Err(Error::precondition("epsilon, lambda and rho must be positive"));
    }
    let clouds = clouds_of(sets)?;
    let idx0: Vec<usize> = clouds.iter().zip(start).map(|(c, p)| index_in(c, p, norm)).collect::<Result<_>>()?;
    let sizes: Vec<usize> = clouds.iter().map(|c| c.len()).collect();
    let len = sizes.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).filter(|&l| l <= MAX_PRODUCT);
    let len = len.ok_or_else(|| Error::unsupported("product space too large for exhaustive search"))?;
    let decode = |mut k: usize| -> Vec<usize> {
        let mut out = vec![0; n];
        for i in 0..n {
            out[i] = k % sizes[i];
            k /= sizes[i];
        }
        out
    };
    let encode = |idx: &[usize]| -> usize { idx.iter().rev().zip(sizes.iter().rev()).fold(0, |acc, (&x, &s)| acc * s + x) };
    let f: Vec<f64> = (0..len).into_par_iter().map(|k| tuple_d1(&clouds, &decode(k), norm)).collect();
    let d1_sets = f.iter().copied().fold(f64::INFINITY, f64::min);
    let start_k = encode(&idx0);
    let d1_start = f[start_k];
    if !(d1_start < d1_sets + eps) {
        return Err(Error::precondition(format!("d1 of the points ({d1_start}) is not below d1 of the sets ({d1_sets}) plus epsilon")));
    }
    let gap = (d1_start - d1_sets).max(0.0);
    let eps_inner = 0.5 * (gap + eps);
    let radius = |i: usize| if i + 1 < n { lambda } else { rho };
    let dist = |a: usize, b: usize| -> f64 {
        let (ia, ib) = (decode(a), decode(b));
        (0..n).map(|i| norm.dist(&clouds[i][ia[i]], &clouds[i][ib[i]]) / radius(i)).fold(0.0, f64::max)
    };
    let res = evp_generic(len, &f, &dist, start_k, eps_inner, 1.0)?;
    let hat = decode(res.x_hat);
    let radii: Vec<f64> = (0..n).map(radius).collect();
    let clause_ii = scan_localized_clause(&clouds, &hat, &radii, eps, norm);
    let localization_margins = (0..n).map(|i| radii[i] - norm.dist(&clouds[i][hat[i]], &start[i])).collect();
    let d1_hat = f[res.x_hat];
    Ok(GeometricResult {
        points: (0..n).map(|i| clouds[i][hat[i]].clone()).collect(),
        indices: hat,
        d1_start,
        d1_hat,
        d1_sets,
        eps_inner,
        localization_margins,
        clause_i_holds: d1_hat <= d1_start,
        clause_ii,
        evp_steps: res.path.len() - 1,
    })
}

/// Asymmetric two-set principle.
pub fn agevp(a_set: &SetRep, b_set: &SetRep, a: &[f64], b: &[f64], eps: f64, lambda: f64, rho: f64, norm: Norm) -> Result<GeometricResult> {
    agevp_n(&[a_set.clone(), b_set.clone()], &[a.to_vec(), b.to_vec()], eps, lambda, rho, norm)
}

/// Symmetric two-set principle; clause (ii) is rescanned in its own parametrization
/// `d(A ∩ B_xi(a), B ∩ B_xi(b)) + xi eps / lambda > d(a, b)`.
pub fn gevp(a_set: &SetRep, b_set: &SetRep, a: &[f64], b: &[f64], eps: f64, lambda: f64, norm: Norm) -> Result<GeometricResult> {
    let mut r = agevp(a_set, b_set, a, b, eps, lambda, lambda, norm)?;
    let clouds = clouds_of(&[a_set.clone(), b_set.clone()])?;
    r.clause_ii = scan_localized_clause(&clouds, &r.indices, &[1.0, 1.0], eps / lambda, norm);
    Ok(r)
}

/// Translations for one localization scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleTranslation {
    pub xi: f64,
    pub shifts: Vec<Vec<f64>>,
    pub max_shift: f64,
    pub limit: f64,
    /// Translated localizations have empty intersection (exhaustive on clouds).
    pub separated: bool,
}

/// Localized non-intersection for disjoint clouds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonintersectLocalization {
    pub principle: GeometricResult,
    pub scales: Vec<ScaleTranslation>,
}

fn localize(cloud: &[Vec<f64>], center: &[f64], r: f64, norm: Norm) -> SetRep {
    SetRep::PointCloud { points: cloud.iter().filter(|p| norm.dist(p, center) < r).cloned().collect() }
}

/// For clouds with empty intersection and near-closest points: runs [`agevp_n`], then for
/// each `xi` builds translations of the localizations `Ω_i ∩ B_{xi λ}(hat_i)` (last one with
/// `xi ρ`) of size `< xi eps` that separate them.
pub fn nonintersect_localize(
    sets: &[SetRep],
    start: &[Vec<f64>],
    eps: f64,
    lambda: f64,
    rho: f64,
    xis: &[f64],
    norm: Norm,
) -> Result<NonintersectLocalization> {
    let clouds = clouds_of(sets)?;
    if crate::geometry::nearest_in_intersection(&start[0], sets, norm)?.is_some() {
        return Err(Error::precondition("the clouds have a common point"));
    }
    let principle = agevp_n(sets, start, eps, lambda, rho, norm)?;
    let n = sets.len();
    let mut scales = Vec::with_capacity(xis.len());
    for &xi in xis {
        if !(xi > 0.0) {
            return Err(Error::invalid("xi must be positive"));
        }
        let local: Vec<SetRep> = (0..n)
            .map(|i| localize(&clouds[i], &principle.points[i], xi * if i + 1 < n { lambda } else { rho }, norm))
            .collect();
        let t = translations_from_near_closest(&local, &principle.points, xi * eps, norm)?;
        scales.push(ScaleTranslation { xi, max_shift: t.max_shift, limit: xi * eps, separated: t.separated, shifts: t.shifts });
    }
    Ok(NonintersectLocalization { principle, scales })
}

/// Data of the localized extremality statement for one `xi`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalScale {
    pub xi: f64,
    pub shifts: Vec<Vec<f64>>,
    pub max_shift: f64,
    pub limit: f64,
    /// `cap ((Ω_i - ω_i) ∩ xi λ B - a_i') ∩ xi ρ B` is empty.
    pub localized_empty: bool,
    /// Without the localizations of the sets; reported when `λ >= ρ + eps`.
    pub unlocalized_empty: Option<bool>,
    /// Without the ball; reported when `λ + eps <= ρ`.
    pub ballless_empty: Option<bool>,
}

/// Output of [`extremal_localize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalLocalization {
    pub p2: PrimalCheck,
    pub points: Vec<Vec<f64>>,
    /// Chosen point of the discretized ball `B_{rho'}(x_bar)`.
    pub ball_point: Vec<f64>,
    pub rho_prime: f64,
    pub delta: f64,
    pub principle: GeometricResult,
    pub scales: Vec<ExtremalScale>,
    /// Requested scales not below `delta`, skipped.
    pub skipped: Vec<f64>,
}

/// Grid points strictly inside `B_r(center)`, `per_axis` points per coordinate.
pub fn ball_grid(center: &[f64], r: f64, per_axis: usize, norm: Norm) -> Vec<Vec<f64>> {
    let d = center.len();
    let k = per_axis.max(2);
    let step = 2.0 * r / (k - 1) as f64;
    let total = k.pow(d as u32);
    (0..total)
        .filter_map(|mut t| {
            let off: Vec<f64> = (0..d)
                .map(|_| {
                    let c = t % k;
                    t /= k;
                    -r + step * c as f64
                })
                .collect();
            (norm.norm(&off) < r * (1.0 - 1e-9)).then(|| add(center, &off))
        })
        .collect()
}

fn on_cloud(cloud: &[Vec<f64>], p: &[f64], norm: Norm) -> bool {
    cloud.iter().any(|q| norm.dist(q, p) <= tol::FEAS * 10.0)
}

/// Finite check of `cap_i ((S_i ∩ rB) - a_i) ∩ sB = ∅` for clouds `S_i` (already centered);
/// `r` or `s` infinite drops the corresponding ball.
fn translated_clouds_empty(centered: &[Vec<Vec<f64>>], shifts: &[Vec<f64>], r: f64, s: f64, norm: Norm) -> bool {
    let n = centered.len();
    let local: Vec<Vec<Vec<f64>>> = centered.iter().map(|c| c.iter().filter(|p| norm.norm(p) < r).cloned().collect()).collect();
    !local[0].iter().any(|p| {
        let y = sub(p, &shifts[0]);
        norm.norm(&y) < s && (1..n).all(|i| on_cloud(&local[i], &add(&y, &shifts[i]), norm))
    })
}

/// From local extremality (P2) of point clouds at `x_bar` with translations `a_i`: the set
/// `Ω_{n+1} = B_{ρ'}(x_bar)`, `ρ' = ρ/2`, is discretized by a grid, [`nonintersect_localize`]
/// runs on `Ω_i - a_i` and the grid, and the conclusion is verified on the original sets.
#[allow(clippy::too_many_arguments)]
pub fn extremal_localize(
    sets: &[SetRep],
    x_bar: &[f64],
    shifts: &[Vec<f64>],
    eps: f64,
    rho: f64,
    lambda: f64,
    xis: &[f64],
    grid_per_axis: usize,
    norm: Norm,
) -> Result<ExtremalLocalization> {
    let n = sets.len();
    let clouds = clouds_of(sets)?;
    let p2 = crate::translation::check_primal_condition(&PrimalInstance {
        kind: PrimalKind::P2,
        sets: sets.to_vec(),
        norm,
        x_bar: x_bar.to_vec(),
        shifts: shifts.to_vec(),
        points: None,
        x: None,
        rho,
        eps,
        alpha: None,
    })?;
    if !p2.holds {
        return Err(Error::precondition("(P2) is not certified for the given translations"));
    }
    if !clouds.iter().all(|c| on_cloud(c, x_bar, norm)) {
        return Err(Error::precondition("x_bar must belong to every cloud"));
    }
    let rho_prime = if rho.is_finite() {
        0.5 * rho
    } else {
        // any finite ball works globally; take one containing every translated cloud
        let far = clouds.iter().zip(shifts).flat_map(|(c, a)| c.iter().map(move |p| norm.dist(&sub(p, a), x_bar))).fold(0.0, f64::max);
        far + eps + 1.0
    };
    let mut ext: Vec<SetRep> = clouds
        .iter()
        .zip(shifts)
        .map(|(c, a)| SetRep::PointCloud { points: c.iter().map(|p| sub(p, a)).collect() })
        .collect();
    ext.push(SetRep::PointCloud { points: ball_grid(x_bar, rho_prime, grid_per_axis, norm) });
    let mut start: Vec<Vec<f64>> = shifts.iter().map(|a| sub(x_bar, a)).collect();
    start.push(x_bar.to_vec());
    let ball_radius = if rho.is_finite() { rho } else { rho_prime };
    let principle = agevp_n(&ext, &start, eps, lambda, ball_radius, norm)?;
    let ball_point = principle.points[n].clone();
    let points: Vec<Vec<f64>> = (0..n).map(|i| add(&principle.points[i], &shifts[i])).collect();
    let delta = if rho.is_finite() { ((rho_prime - norm.dist(&ball_point, x_bar)) / rho).min(0.5) } else { 0.5 };
    let ext_clouds = clouds_of(&ext)?;
    let centered: Vec<Vec<Vec<f64>>> = (0..n).map(|i| clouds[i].iter().map(|p| sub(p, &points[i])).collect()).collect();
    let mut scales = Vec::new();
    let mut skipped = Vec::new();
    for &xi in xis {
        if !(xi > 0.0 && xi < delta) {
            skipped.push(xi);
            continue;
        }
        let local: Vec<SetRep> = (0..=n)
            .map(|i| localize(&ext_clouds[i], &principle.points[i], xi * if i < n { lambda } else { ball_radius }, norm))
            .collect();
        let t = translations_from_near_closest(&local, &principle.points, xi * eps, norm)?;
        let new_shifts = t.shifts;
        let r_ball = xi * rho;
        let localized_empty = translated_clouds_empty(&centered, &new_shifts, xi * lambda, r_ball, norm);
        let unlocalized_empty = (lambda >= rho + eps).then(|| translated_clouds_empty(&centered, &new_shifts, f64::INFINITY, r_ball, norm));
        let ballless_empty = (lambda + eps <= rho).then(|| translated_clouds_empty(&centered, &new_shifts, xi * lambda, f64::INFINITY, norm));
        scales.push(ExtremalScale {
            xi,
            max_shift: t.max_shift,
            limit: xi * eps,
            shifts: new_shifts,
            localized_empty,
            unlocalized_empty,
            ballless_empty,
        });
    }
    Ok(ExtremalLocalization { p2, points, ball_point, rho_prime, delta, principle, scales, skipped })
}
