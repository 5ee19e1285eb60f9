//! Three distances between n points and their set versions.
//!
//! For points `w_1..w_n`:
//! - `d1` is the largest distance from the last point to the others (asymmetric),
//! - `d2` is the Chebyshev radius (smallest enclosing ball),
//! - `d3` is the largest distance to the barycenter.
//!
//! The set versions take the infimum over points of the sets. `d2` of sets equals `d1` of
//! the sets with the whole space appended.

use crate::error::{check_dim, Error, Result};
use crate::geometry::lp::{Lp, LpStatus, Sense};
use crate::geometry::project::{add_norm_epigraph, merge_min, nearest_in_pieces, piece_distance, project, Method};
use crate::geometry::{DistanceReport, Norm, Piece, SetRep};
use crate::linalg::{axpy, mean, norm2, solve, sub};
use crate::tol;
use serde::{Deserialize, Serialize};

const MAX_TUPLES: usize = 100_000;

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    if points.len() < 2 {
        return Err(Error::precondition("at least two points are required"));
    }
    let d = points[0].len();
    for p in points {
        check_dim(d, p.len())?;
    }
    Ok(d)
}

/// `max_{i<n} ||w_i - w_n||`
pub fn d1_points(points: &[Vec<f64>], norm: Norm) -> Result<f64> {
    check_points(points)?;
    let last = points.last().expect("nonempty");
    Ok(points[..points.len() - 1].iter().map(|p| norm.dist(p, last)).fold(0.0, f64::max))
}

/// Chebyshev radius and a center: `min_x max_i ||w_i - x||`.
pub fn d2_points(points: &[Vec<f64>], norm: Norm) -> Result<(f64, Vec<f64>)> {
    let d = check_points(points)?;
    if norm.is_euclidean() {
        let (c, r) = min_enclosing_ball(points);
        return Ok((r, c));
    }
    if norm.is_maximum() {
        let mut center = vec![0.0; d];
        let mut r = 0.0_f64;
        for j in 0..d {
            let lo = points.iter().map(|p| p[j]).fold(f64::INFINITY, f64::min);
            let hi = points.iter().map(|p| p[j]).fold(f64::NEG_INFINITY, f64::max);
            center[j] = 0.5 * (lo + hi);
            r = r.max(0.5 * (hi - lo));
        }
        return Ok((r, center));
    }
    if norm.is_sum() {
        let mut lp = Lp::new(d + 1);
        for j in 0..d {
            lp.free(j);
        }
        lp.objective[d] = 1.0;
        for p in points {
            let ts = add_norm_epigraph(&mut lp, norm, d, |j| (vec![(j, -1.0)], p[j]))?;
            let mut e: Vec<(usize, f64)> = ts.iter().map(|&t| (t, 1.0)).collect();
            e.push((d, -1.0));
            lp.add_sparse_row(&e, Sense::Le, 0.0);
        }
        let s = lp.solve()?;
        if s.status != LpStatus::Optimal {
            return Err(Error::numerical("Chebyshev center LP failed"));
        }
        let c = s.x[..d].to_vec();
        let r = points.iter().map(|p| norm.dist(p, &c)).fold(0.0, f64::max);
        return Ok((r, c));
    }
    Err(Error::unsupported(format!("Chebyshev center under the {} norm", norm.label())))
}

/// `max_i ||w_i - mean||`
pub fn d3_points(points: &[Vec<f64>], norm: Norm) -> Result<f64> {
    let d = check_points(points)?;
    let m = mean(points, d);
    Ok(points.iter().map(|p| norm.dist(p, &m)).fold(0.0, f64::max))
}

/// Welzl's smallest enclosing Euclidean ball.
fn min_enclosing_ball(points: &[Vec<f64>]) -> (Vec<f64>, f64) {
    let d = points[0].len();
    let mut boundary: Vec<Vec<f64>> = Vec::new();
    welzl(points, points.len(), &mut boundary, d)
}

fn welzl(pts: &[Vec<f64>], n: usize, boundary: &mut Vec<Vec<f64>>, d: usize) -> (Vec<f64>, f64) {
    if n == 0 || boundary.len() == d + 1 {
        return ball_through(boundary, d);
    }
    let p = &pts[n - 1];
    let (c, r) = welzl(pts, n - 1, boundary, d);
    if r >= 0.0 && norm2(&sub(p, &c)) <= r * (1.0 + 1e-12) + 1e-14 {
        return (c, r);
    }
    boundary.push(p.clone());
    let out = welzl(pts, n - 1, boundary, d);
    boundary.pop();
    out
}

/// Smallest ball with all of `b` on its boundary (circumcenter within their affine hull).
fn ball_through(b: &[Vec<f64>], d: usize) -> (Vec<f64>, f64) {
    match b.len() {
        0 => (vec![0.0; d], -1.0),
        1 => (b[0].clone(), 0.0),
        k => {
            let p0 = &b[0];
            let vs: Vec<Vec<f64>> = b[1..].iter().map(|p| sub(p, p0)).collect();
            let m: Vec<Vec<f64>> = vs
                .iter()
                .map(|vi| vs.iter().map(|vj| 2.0 * crate::linalg::dot(vi, vj)).collect())
                .collect();
            let rhs: Vec<f64> = vs.iter().map(|v| crate::linalg::dot(v, v)).collect();
            match solve(m, rhs) {
                Some(lam) => {
                    let mut c = p0.clone();
                    for (l, v) in lam.iter().zip(&vs) {
                        c = axpy(&c, *l, v);
                    }
                    let r = b.iter().map(|p| norm2(&sub(p, &c))).fold(0.0, f64::max);
                    (c, r)
                }
                None => {
                    // affinely dependent boundary: use the diameter pair
                    let mut best = (0, 0, -1.0);
                    for i in 0..k {
                        for j in i + 1..k {
                            let dd = norm2(&sub(&b[i], &b[j]));
                            if dd > best.2 {
                                best = (i, j, dd);
                            }
                        }
                    }
                    let c: Vec<f64> = b[best.0].iter().zip(&b[best.1]).map(|(x, y)| 0.5 * (x + y)).collect();
                    let r = b.iter().map(|p| norm2(&sub(p, &c))).fold(0.0, f64::max);
                    (c, r)
                }
            }
        }
    }
}

fn check_sets(sets: &[SetRep]) -> Result<usize> {
    if sets.len() < 2 {
        return Err(Error::precondition("at least two sets are required"));
    }
    let d = sets[0].dim();
    for s in sets {
        check_dim(d, s.dim())?;
        s.validate()?;
    }
    Ok(d)
}

/// `d1(sets) = inf { max_{i<n} ||w_i - w_n|| : w_i in set_i }`, computed in the product space.
pub fn d1_sets(sets: &[SetRep], norm: Norm) -> Result<DistanceReport> {
    check_sets(sets)?;
    let n = sets.len();
    // last set finite: enumerate it and project onto the others
    if let Some(last) = sets[n - 1].finite_points() {
        let mut best: Option<(f64, Vec<Vec<f64>>)> = None;
        let mut all_exact = true;
        for y in &last {
            let mut worst = 0.0_f64;
            let mut tuple = Vec::with_capacity(n);
            let mut empty = false;
            for s in &sets[..n - 1] {
                all_exact &= s.finite_points().is_some() || norm.is_polyhedral() || s.is_polyhedral();
                match project(y, s, norm)? {
                    Some((p, dd)) => {
                        worst = worst.max(dd);
                        tuple.push(p);
                    }
                    None => empty = true,
                }
            }
            if empty {
                continue;
            }
            tuple.push(y.clone());
            if best.as_ref().map_or(true, |b| worst < b.0) {
                best = Some((worst, tuple));
            }
        }
        let method = if all_exact { Method::Exhaustive } else { Method::Alternating };
        return Ok(match best {
            None => DistanceReport::infinite(),
            Some((v, w)) => DistanceReport::exact(v, method, Some(w)),
        });
    }
    let lists: Vec<Vec<Piece>> = sets.iter().map(|s| s.pieces()).collect();
    let total = lists.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len()));
    match total {
        Some(0) => return Ok(DistanceReport::infinite()),
        Some(t) if t <= MAX_TUPLES => {}
        _ => return Err(Error::unsupported("too many convex piece combinations for d1")),
    }
    let mut best: Option<DistanceReport> = None;
    let mut idx = vec![0usize; n];
    loop {
        let combo: Vec<&Piece> = idx.iter().zip(&lists).map(|(&i, l)| &l[i]).collect();
        let r = d1_pieces(&combo, norm)?;
        best = Some(match best {
            None => r,
            Some(cur) => merge_min(cur, r),
        });
        let mut k = 0;
        loop {
            if k == n {
                return Ok(best.unwrap_or_else(DistanceReport::infinite));
            }
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn piece_point(p: &Piece) -> Option<Vec<f64>> {
    match p {
        Piece::Poly(q) if q.a.is_empty() && q.eq_a.len() == q.dim => {
            let sys = crate::linalg::AffineSystem::new(&q.eq_a, &q.eq_b)?;
            if sys.rank() == q.dim {
                Some(sys.project(&vec![0.0; q.dim]))
            } else {
                None
            }
        }
        _ => None,
    }
}

fn is_whole(p: &Piece) -> bool {
    match p {
        Piece::Poly(q) => q.a.is_empty() && q.eq_a.is_empty(),
        Piece::Ball { radius, .. } => radius.is_infinite(),
    }
}

/// `d1` for one choice of convex pieces.
fn d1_pieces(pieces: &[&Piece], norm: Norm) -> Result<DistanceReport> {
    let n = pieces.len();
    let d = pieces[0].dim();
    let head = &pieces[..n - 1];
    let pts: Option<Vec<Vec<f64>>> = head.iter().map(|p| piece_point(p)).collect();
    if let Some(pts) = &pts {
        if is_whole(pieces[n - 1]) {
            let (r, c) = d2_points(pts, norm)?;
            let mut w = pts.clone();
            w.push(c);
            let method = if norm.is_euclidean() || norm.is_maximum() { Method::Exhaustive } else { Method::ExactLp };
            return Ok(DistanceReport::exact(r, method, Some(w)));
        }
    }
    if norm.is_polyhedral() && pieces.iter().all(|p| p.is_polyhedral()) {
        let mut lp = Lp::new(n * d);
        for j in 0..n * d {
            lp.free(j);
        }
        for (i, p) in pieces.iter().enumerate() {
            if let Piece::Poly(q) = p {
                q.add_to_lp(&mut lp, i * d);
            }
        }
        let t = lp.add_var(1.0, 0.0, f64::INFINITY);
        for i in 0..n - 1 {
            let ts = add_norm_epigraph(&mut lp, norm, d, |j| (vec![(i * d + j, 1.0), ((n - 1) * d + j, -1.0)], 0.0))?;
            let mut e: Vec<(usize, f64)> = ts.iter().map(|&s| (s, 1.0)).collect();
            e.push((t, -1.0));
            lp.add_sparse_row(&e, Sense::Le, 0.0);
        }
        let s = lp.solve()?;
        return match s.status {
            LpStatus::Optimal => {
                let w: Vec<Vec<f64>> = (0..n).map(|i| s.x[i * d..(i + 1) * d].to_vec()).collect();
                let v = d1_points(&w, norm)?;
                Ok(DistanceReport::exact(v, Method::ExactLp, Some(w)))
            }
            LpStatus::Infeasible => Ok(DistanceReport::infinite()),
            LpStatus::Unbounded => Err(Error::numerical("d1 LP reported unbounded")),
        };
    }
    if !norm.is_euclidean() {
        return Err(Error::unsupported(format!("d1 of non-polyhedral pieces under the {} norm", norm.label())));
    }
    d1_pieces_euclidean(pieces)
}

/// Euclidean `d1` of convex pieces: bisection on the level `t` with cyclic projections onto
/// the last piece and the `t`-enlargements of the others. The lower end comes from pairwise
/// separation bounds.
fn d1_pieces_euclidean(pieces: &[&Piece]) -> Result<DistanceReport> {
    let n = pieces.len();
    let d = pieces[0].dim();
    let norm = Norm::Euclidean;
    if n == 2 {
        return piece_distance(pieces[0], pieces[1], norm);
    }
    let last = pieces[n - 1];
    let mut lower = 0.0_f64;
    for p in &pieces[..n - 1] {
        let r = piece_distance(p, last, norm)?;
        if r.value.is_infinite() {
            return Ok(DistanceReport::infinite());
        }
        lower = lower.max(r.lower);
    }
    let others = &pieces[..n - 1];
    let components = |y: &[f64]| -> Result<Vec<(f64, Vec<f64>)>> {
        others
            .iter()
            .map(|p| {
                let q = nearest_in_pieces(y, &[*p], norm)?.ok_or_else(|| Error::numerical("empty piece"))?;
                let diff = sub(y, &q);
                let v = norm2(&diff);
                Ok((v, if v > 0.0 { diff.iter().map(|x| x / v).collect() } else { vec![0.0; d] }))
            })
            .collect()
    };
    let seed = nearest_in_pieces(&vec![0.0; d], &[pieces[0]], norm)?.ok_or_else(|| Error::numerical("empty piece"))?;
    let y0 = nearest_in_pieces(&seed, &[last], norm)?.ok_or_else(|| Error::numerical("empty piece"))?;
    let (upper, lp_lower, y) = cutting_planes(&[last], d, &components, y0)?;
    let mut w = Vec::with_capacity(n);
    for p in others {
        w.push(nearest_in_pieces(&y, &[*p], norm)?.ok_or_else(|| Error::numerical("empty piece"))?);
    }
    w.push(y);
    Ok(DistanceReport { value: upper, lower: lower.max(lp_lower).min(upper), upper, method: Method::Alternating, witness: Some(w) })
}

const CUT_ROUNDS: usize = 400;

/// Kelley cutting planes for `min max_k g_k(x)` over `x = (x_1, .., x_m)` with `x_j` in the
/// convex piece `blocks[j]`, each block of dimension `d`. `components` returns the values and
/// gradients of the `g_k`. Polyhedral blocks enter the LP directly, balls through tangent
/// cuts. Returns `(upper, lower, best)`; `lower` is only raised by LP optima strictly inside
/// the trust box.
fn cutting_planes(
    blocks: &[&Piece],
    d: usize,
    components: &dyn Fn(&[f64]) -> Result<Vec<(f64, Vec<f64>)>>,
    x0: Vec<f64>,
) -> Result<(f64, f64, Vec<f64>)> {
    let m = blocks.len() * d;
    let eval = |x: &[f64]| -> Result<(f64, Vec<(f64, Vec<f64>)>)> {
        let c = components(x)?;
        Ok((c.iter().map(|g| g.0).fold(0.0, f64::max), c))
    };
    let feasible = |x: &[f64]| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(m);
        for (j, b) in blocks.iter().enumerate() {
            let q = nearest_in_pieces(&x[j * d..(j + 1) * d], &[*b], Norm::Euclidean)?.ok_or_else(|| Error::numerical("empty piece"))?;
            out.extend(q);
        }
        Ok(out)
    };
    let (mut upper, c0) = eval(&x0)?;
    let mut best = x0.clone();
    let mut lower = 0.0_f64;
    let mut cuts: Vec<(Vec<f64>, f64)> = Vec::new();
    let add_cuts = |cuts: &mut Vec<(Vec<f64>, f64)>, x: &[f64], comps: Vec<(f64, Vec<f64>)>| {
        for (v, g) in comps {
            // t >= v + g.(y - x)
            let c = v - g.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            cuts.push((g, c));
        }
    };
    add_cuts(&mut cuts, &x0, c0);
    let mut ball_cuts: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    let mut radius = 2.0 * upper + 1.0;
    let mut center = x0;
    for _ in 0..CUT_ROUNDS {
        if upper - lower <= 1e-11 * upper.max(1.0) {
            break;
        }
        let mut lp = Lp::new(m);
        for j in 0..m {
            lp.lower[j] = center[j] - radius;
            lp.upper[j] = center[j] + radius;
        }
        let t = lp.add_var(1.0, 0.0, f64::INFINITY);
        for (j, b) in blocks.iter().enumerate() {
            if let Piece::Poly(q) = b {
                q.add_to_lp(&mut lp, j * d);
            }
        }
        for (j, a, b) in &ball_cuts {
            let e: Vec<(usize, f64)> = a.iter().enumerate().map(|(k, &v)| (j * d + k, v)).collect();
            lp.add_sparse_row(&e, Sense::Le, *b);
        }
        for (g, c) in &cuts {
            let mut e: Vec<(usize, f64)> = g.iter().enumerate().filter(|(_, v)| **v != 0.0).map(|(k, &v)| (k, v)).collect();
            e.push((t, -1.0));
            lp.add_sparse_row(&e, Sense::Le, -c);
        }
        // an ill-conditioned cut set ends the refinement; the bracket stays valid
        let Ok(s) = lp.solve() else { break };
        if s.status != LpStatus::Optimal {
            break;
        }
        let x = s.x[..m].to_vec();
        let on_box = x.iter().zip(&center).any(|(a, c)| (a - c).abs() >= radius * (1.0 - 1e-9));
        if on_box {
            radius *= 4.0;
        } else {
            lower = lower.max(s.x[t].min(upper));
        }
        let xf = feasible(&x)?;
        let (v, comps) = eval(&xf)?;
        if v < upper {
            upper = v;
            best = xf.clone();
            center = xf.clone();
        }
        add_cuts(&mut cuts, &xf, comps);
        let (_, comps) = eval(&x)?;
        add_cuts(&mut cuts, &x, comps);
        for (j, b) in blocks.iter().enumerate() {
            if let Piece::Ball { .. } = b {
                let xj = &x[j * d..(j + 1) * d];
                let pj = &xf[j * d..(j + 1) * d];
                let a = sub(xj, pj);
                if norm2(&a) > 1e-14 {
                    let rhs = a.iter().zip(pj).map(|(u, v)| u * v).sum();
                    ball_cuts.push((j, a, rhs));
                }
            }
        }
    }
    Ok((upper, lower, best))
}

/// `d2(sets)`: the set version of the Chebyshev radius.
pub fn d2_sets(sets: &[SetRep], norm: Norm) -> Result<DistanceReport> {
    let d = check_sets(sets)?;
    let mut ext = sets.to_vec();
    ext.push(SetRep::whole(d));
    d1_sets(&ext, norm)
}

/// `d3(sets) = inf { max_i ||w_i - mean(w)|| : w_i in set_i }`.
pub fn d3_sets(sets: &[SetRep], norm: Norm) -> Result<DistanceReport> {
    let d = check_sets(sets)?;
    let n = sets.len();
    let lists: Vec<Vec<Piece>> = sets.iter().map(|s| s.pieces()).collect();
    let total = lists.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len()));
    match total {
        Some(0) => return Ok(DistanceReport::infinite()),
        Some(t) if t <= MAX_TUPLES => {}
        _ => return Err(Error::unsupported("too many convex piece combinations for d3")),
    }
    let mut best: Option<DistanceReport> = None;
    let mut idx = vec![0usize; n];
    loop {
        let combo: Vec<&Piece> = idx.iter().zip(&lists).map(|(&i, l)| &l[i]).collect();
        let r = d3_pieces(&combo, norm, d)?;
        best = Some(match best {
            None => r,
            Some(cur) => merge_min(cur, r),
        });
        let mut k = 0;
        loop {
            if k == n {
                return Ok(best.unwrap_or_else(DistanceReport::infinite));
            }
            idx[k] += 1;
            if idx[k] < lists[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

fn d3_pieces(pieces: &[&Piece], norm: Norm, d: usize) -> Result<DistanceReport> {
    let n = pieces.len();
    let pts: Option<Vec<Vec<f64>>> = pieces.iter().map(|p| piece_point(p)).collect();
    if let Some(pts) = pts {
        let v = d3_points(&pts, norm)?;
        return Ok(DistanceReport::exact(v, Method::Exhaustive, Some(pts)));
    }
    if norm.is_polyhedral() && pieces.iter().all(|p| p.is_polyhedral()) {
        let mut lp = Lp::new(n * d);
        for j in 0..n * d {
            lp.free(j);
        }
        for (i, p) in pieces.iter().enumerate() {
            if let Piece::Poly(q) = p {
                q.add_to_lp(&mut lp, i * d);
            }
        }
        let t = lp.add_var(1.0, 0.0, f64::INFINITY);
        let inv = 1.0 / n as f64;
        for i in 0..n {
            let ts = add_norm_epigraph(&mut lp, norm, d, |j| {
                let mut e: Vec<(usize, f64)> = (0..n).map(|k| (k * d + j, -inv)).collect();
                e.push((i * d + j, 1.0));
                (e, 0.0)
            })?;
            let mut e: Vec<(usize, f64)> = ts.iter().map(|&s| (s, 1.0)).collect();
            e.push((t, -1.0));
            lp.add_sparse_row(&e, Sense::Le, 0.0);
        }
        let s = lp.solve()?;
        return match s.status {
            LpStatus::Optimal => {
                let w: Vec<Vec<f64>> = (0..n).map(|i| s.x[i * d..(i + 1) * d].to_vec()).collect();
                let v = d3_points(&w, norm)?;
                Ok(DistanceReport::exact(v, Method::ExactLp, Some(w)))
            }
            LpStatus::Infeasible => Ok(DistanceReport::infinite()),
            LpStatus::Unbounded => Err(Error::numerical("d3 LP reported unbounded")),
        };
    }
    if !norm.is_euclidean() {
        return Err(Error::unsupported(format!("d3 of non-polyhedral pieces under the {} norm", norm.label())));
    }
    // start from the d2 configuration and alternate barycenter / projections
    let mut ext: Vec<&Piece> = pieces.to_vec();
    let whole = Piece::Poly(crate::geometry::Polyhedron::whole(d));
    ext.push(&whole);
    let r2 = d1_pieces(&ext, norm)?;
    let Some(mut w) = r2.witness.clone() else { return Ok(DistanceReport::infinite()) };
    w.pop();
    let x0: Vec<f64> = w.concat();
    let inv = 1.0 / n as f64;
    let components = |x: &[f64]| -> Result<Vec<(f64, Vec<f64>)>> {
        let ws: Vec<Vec<f64>> = x.chunks(d).map(|c| c.to_vec()).collect();
        let c = mean(&ws, d);
        Ok(ws
            .iter()
            .enumerate()
            .map(|(i, wi)| {
                let diff = sub(wi, &c);
                let v = norm2(&diff);
                let mut g = vec![0.0; n * d];
                if v > 0.0 {
                    for k in 0..n {
                        let f = if k == i { 1.0 - inv } else { -inv };
                        for j in 0..d {
                            g[k * d + j] = f * diff[j] / v;
                        }
                    }
                }
                (v, g)
            })
            .collect())
    };
    let (upper, lower, x) = cutting_planes(pieces, d, &components, x0)?;
    let best: Vec<Vec<f64>> = x.chunks(d).map(|c| c.to_vec()).collect();
    Ok(DistanceReport { value: upper, lower: r2.lower.max(lower).min(upper), upper, method: Method::Alternating, witness: Some(best) })
}

/// `d1` of `sets` with `anchor` appended as the last set.
pub fn localized_distance(sets: &[SetRep], anchor: &SetRep, norm: Norm) -> Result<DistanceReport> {
    let mut ext = sets.to_vec();
    ext.push(anchor.clone());
    d1_sets(&ext, norm)
}

/// Input of [`check_distance_inequalities`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistanceInput {
    Points(Vec<Vec<f64>>),
    Sets(Vec<SetRep>),
}

/// One inequality `lhs <= rhs` of the distance chains.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainCheck {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs - rhs`; positive values beyond tolerance are violations.
    pub excess: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub d1: DistanceReport,
    pub d2: DistanceReport,
    pub d3: DistanceReport,
    pub checks: Vec<ChainCheck>,
    pub all_hold: bool,
}

fn chain(name: &str, lhs: &DistanceReport, rhs: &DistanceReport, factor: f64) -> ChainCheck {
    let (lo, hi) = (lhs.lower, factor * rhs.upper);
    let holds = lo == hi || lo <= hi + tol::OBJ * hi.abs().max(1.0);
    ChainCheck {
        name: name.to_string(),
        lhs: lhs.value,
        rhs: factor * rhs.value,
        excess: if lhs.value == factor * rhs.value { 0.0 } else { lhs.value - factor * rhs.value },
        holds,
    }
}

/// Evaluates `d2 <= d1 <= 2 d2` and `d2 <= d3 <= 2 d2`, plus `d1 = 2 d2` and `d2 = d3` for
/// two inputs. Comparisons use the brackets of the reports with tolerance `tol::OBJ`.
pub fn check_distance_inequalities(input: &DistanceInput, norm: Norm) -> Result<InequalityReport> {
    let (d1, d2, d3) = match input {
        DistanceInput::Points(p) => {
            let e = |v: f64| DistanceReport::exact(v, Method::Exhaustive, None);
            (e(d1_points(p, norm)?), e(d2_points(p, norm)?.0), e(d3_points(p, norm)?))
        }
        DistanceInput::Sets(s) => (d1_sets(s, norm)?, d2_sets(s, norm)?, d3_sets(s, norm)?),
    };
    let n = match input {
        DistanceInput::Points(p) => p.len(),
        DistanceInput::Sets(s) => s.len(),
    };
    let mut checks = vec![
        chain("d2 <= d1", &d2, &d1, 1.0),
        chain("d1 <= 2 d2", &d1, &d2, 2.0),
        chain("d2 <= d3", &d2, &d3, 1.0),
        chain("d3 <= 2 d2", &d3, &d2, 2.0),
    ];
    if n == 2 {
        checks.push(chain("2 d2 <= d1", &d2, &d1, 0.5));
        checks.push(chain("d3 <= d2", &d3, &d2, 1.0));
    }
    let all_hold = checks.iter().all(|c| c.holds);
    Ok(InequalityReport { d1, d2, d3, checks, all_hold })
}
