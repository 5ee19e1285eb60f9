//! Nearest points, point-to-set and set-to-set distances.

use serde::{Deserialize, Serialize};

use super::lp::{Lp, LpStatus, Sense};
use super::norm::Norm;
use super::set::{Piece, Polyhedron, SetRep};
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, scale, sub, AffineSystem};
use crate::tol;

pub const DYKSTRA_MAX_SWEEPS: usize = 10_000;
const MAX_COMBINATIONS: usize = 200_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExactLp,
    Alternating,
    Exhaustive,
    GridOracle,
}

/// A distance value together with a bracket `lower <= value <= upper`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub method: Method,
    /// Attaining points, one per set, when available.
    pub witness: Option<Vec<Vec<f64>>>,
}

impl DistanceReport {
    pub fn exact(value: f64, method: Method, witness: Option<Vec<Vec<f64>>>) -> Self {
        DistanceReport { value, lower: value, upper: value, method, witness }
    }

    pub fn infinite() -> Self {
        DistanceReport {
            value: f64::INFINITY,
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            method: Method::Exhaustive,
            witness: None,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

impl Piece {
    /// `sup_{x in piece} <u, x>`.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        match self {
            Piece::Ball { center, radius, norm } => {
                let du = norm.dual_norm(u);
                if du == 0.0 {
                    Ok(dot(center, u))
                } else if radius.is_infinite() {
                    Ok(f64::INFINITY)
                } else {
                    Ok(dot(center, u) + radius * du)
                }
            }
            Piece::Poly(p) => {
                let mut lp = Lp::new(p.dim);
                for j in 0..p.dim {
                    lp.free(j);
                }
                lp.objective = u.iter().map(|x| -x).collect();
                p.add_to_lp(&mut lp, 0);
                let s = lp.solve()?;
                Ok(match s.status {
                    LpStatus::Optimal => -s.value,
                    LpStatus::Unbounded => f64::INFINITY,
                    LpStatus::Infeasible => f64::NEG_INFINITY,
                })
            }
        }
    }
}

/// Adds `||x - p|| <= t` style epigraph rows for the LP norms.
/// `diff(j)` lists the sparse entries of coordinate `j` of the difference, plus a constant.
/// Returns the epigraph variable (for the maximum norm) or the sum of per-coordinate variables.
pub(crate) fn add_norm_epigraph(
    lp: &mut Lp,
    norm: Norm,
    d: usize,
    diff: impl Fn(usize) -> (Vec<(usize, f64)>, f64),
) -> Result<Vec<usize>> {
    if norm.is_maximum() {
        let t = lp.add_var(0.0, 0.0, f64::INFINITY);
        for j in 0..d {
            let (mut e, c) = diff(j);
            e.push((t, -1.0));
            lp.add_sparse_row(&e, Sense::Le, -c);
            let (e2, c2) = diff(j);
            let mut neg: Vec<(usize, f64)> = e2.iter().map(|&(k, v)| (k, -v)).collect();
            neg.push((t, -1.0));
            lp.add_sparse_row(&neg, Sense::Le, c2);
        }
        Ok(vec![t])
    } else if norm.is_sum() {
        let mut ts = Vec::with_capacity(d);
        for j in 0..d {
            let t = lp.add_var(0.0, 0.0, f64::INFINITY);
            let (mut e, c) = diff(j);
            e.push((t, -1.0));
            lp.add_sparse_row(&e, Sense::Le, -c);
            let (e2, c2) = diff(j);
            let mut neg: Vec<(usize, f64)> = e2.iter().map(|&(k, v)| (k, -v)).collect();
            neg.push((t, -1.0));
            lp.add_sparse_row(&neg, Sense::Le, c2);
            ts.push(t);
        }
        Ok(ts)
    } else {
        Err(Error::unsupported(format!("LP epigraph for the {} norm", norm.label())))
    }
}

/// Nearest point of a polyhedron under a polyhedral norm.
fn lp_nearest(x: &[f64], poly: &Polyhedron, norm: Norm) -> Result<Option<Vec<f64>>> {
    let d = x.len();
    let mut lp = Lp::new(d);
    for j in 0..d {
        lp.free(j);
    }
    poly.add_to_lp(&mut lp, 0);
    let ts = add_norm_epigraph(&mut lp, norm, d, |j| (vec![(j, -1.0)], x[j]))?;
    for t in ts {
        lp.objective[t] = 1.0;
    }
    let s = lp.solve()?;
    match s.status {
        LpStatus::Optimal => Ok(Some(s.x[..d].to_vec())),
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(Error::numerical("distance LP reported unbounded")),
    }
}

enum Block {
    Affine(AffineSystem),
    Half(Vec<f64>, f64),
    Ball(Vec<f64>, f64),
}

impl Block {
    fn project(&self, z: &[f64]) -> Vec<f64> {
        match self {
            Block::Affine(s) => s.project(z),
            Block::Half(a, b) => {
                let v = dot(a, z) - b;
                if v <= 0.0 {
                    z.to_vec()
                } else {
                    axpy(z, -v / dot(a, a), a)
                }
            }
            Block::Ball(c, r) => {
                let diff = sub(z, c);
                let n = norm2(&diff);
                if n <= *r {
                    z.to_vec()
                } else {
                    axpy(c, r / n, &diff)
                }
            }
        }
    }

    fn violation(&self, z: &[f64]) -> f64 {
        match self {
            Block::Affine(s) => norm2(&sub(&s.project(z), z)),
            Block::Half(a, b) => ((dot(a, z) - b) / norm2(a)).max(0.0),
            Block::Ball(c, r) => (norm2(&sub(z, c)) - r).max(0.0),
        }
    }
}

/// Euclidean projection onto an intersection of convex blocks by Dykstra's algorithm.
fn dykstra(x: &[f64], blocks: &[Block]) -> Result<Option<Vec<f64>>> {
    if blocks.is_empty() {
        return Ok(Some(x.to_vec()));
    }
    if blocks.len() == 1 {
        return Ok(Some(blocks[0].project(x)));
    }
    let scale_ref = norm2(x).max(1.0);
    let mut y = x.to_vec();
    let mut incr = vec![vec![0.0; x.len()]; blocks.len()];
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        let start = y.clone();
        // the iterate can stall for a sweep while the increments still move
        let mut inc_change = 0.0;
        for (blk, inc) in blocks.iter().zip(incr.iter_mut()) {
            let z: Vec<f64> = y.iter().zip(inc.iter()).map(|(a, b)| a + b).collect();
            let p = blk.project(&z);
            let next = sub(&z, &p);
            inc_change += norm2(&sub(&next, inc)).powi(2);
            *inc = next;
            y = p;
        }
        let change = norm2(&sub(&y, &start));
        let viol = blocks.iter().map(|b| b.violation(&y)).fold(0.0, f64::max);
        if change <= 1e-14 * scale_ref && inc_change.sqrt() <= 1e-12 * scale_ref && viol <= 1e-11 * scale_ref {
            return Ok(Some(y));
        }
    }
    let viol = blocks.iter().map(|b| b.violation(&y)).fold(0.0, f64::max);
    if viol <= 1e-8 * scale_ref {
        Ok(Some(y))
    } else {
        Ok(None)
    }
}

/// Nearest point to `x` in the intersection of convex pieces; `None` when empty.
pub fn nearest_in_pieces(x: &[f64], pieces: &[&Piece], norm: Norm) -> Result<Option<Vec<f64>>> {
    let d = x.len();
    let mut poly = Polyhedron::whole(d);
    let mut balls: Vec<(&Vec<f64>, f64, Norm)> = Vec::new();
    for p in pieces {
        match p {
            Piece::Poly(q) => poly = poly.intersect(q),
            Piece::Ball { center, radius, norm: bn } => balls.push((center, *radius, *bn)),
        }
    }
    let poly_trivial = poly.a.is_empty() && poly.eq_a.is_empty();
    if balls.is_empty() {
        if norm.is_polyhedral() {
            return lp_nearest(x, &poly, norm);
        }
        if !norm.is_euclidean() {
            return Err(Error::unsupported(format!("projection onto polyhedra under the {} norm", norm.label())));
        }
        let Some(aff) = AffineSystem::new(&poly.eq_a, &poly.eq_b) else { return Ok(None) };
        if poly.a.is_empty() {
            return Ok(Some(aff.project(x)));
        }
        if poly.is_empty()? {
            return Ok(None);
        }
        let mut blocks = vec![Block::Affine(aff)];
        for (a, &b) in poly.a.iter().zip(&poly.b) {
            if norm2(a) > 0.0 {
                blocks.push(Block::Half(a.clone(), b));
            } else if b < 0.0 {
                return Ok(None);
            }
        }
        return dykstra(x, &blocks);
    }
    if balls.len() == 1 && poly_trivial && balls[0].2 == norm {
        let (c, r, bn) = balls[0];
        let diff = sub(x, c);
        let n = bn.norm(&diff);
        return Ok(Some(if n <= r { x.to_vec() } else { axpy(c, r / n, &diff) }));
    }
    if norm.is_euclidean() && balls.iter().all(|b| b.2.is_euclidean()) {
        let mut blocks = Vec::new();
        if !poly.eq_a.is_empty() {
            let Some(aff) = AffineSystem::new(&poly.eq_a, &poly.eq_b) else { return Ok(None) };
            blocks.push(Block::Affine(aff));
        }
        for (a, &b) in poly.a.iter().zip(&poly.b) {
            blocks.push(Block::Half(a.clone(), b));
        }
        for (c, r, _) in &balls {
            blocks.push(Block::Ball((*c).clone(), *r));
        }
        return dykstra(x, &blocks);
    }
    Err(Error::unsupported(format!(
        "projection onto balls of a different norm under the {} norm",
        norm.label()
    )))
}

/// Nearest point of `set` to `x`, with the distance; `None` for the empty set.
pub fn project(x: &[f64], set: &SetRep, norm: Norm) -> Result<Option<(Vec<f64>, f64)>> {
    if let Some(pts) = set.finite_points() {
        return Ok(nearest_of(x, &pts, norm));
    }
    match set {
        SetRep::Shifted { inner, offset } => Ok(project(&sub(x, offset), inner, norm)?
            .map(|(p, dd)| (p.iter().zip(offset).map(|(a, b)| a + b).collect(), dd))),
        SetRep::Union { branches, .. } => {
            let mut best: Option<(Vec<f64>, f64)> = None;
            for b in branches {
                if let Some((p, dd)) = project(x, b, norm)? {
                    if best.as_ref().map_or(true, |bb| dd < bb.1) {
                        best = Some((p, dd));
                    }
                }
            }
            Ok(best)
        }
        _ => {
            let pieces = set.pieces();
            let mut best: Option<(Vec<f64>, f64)> = None;
            for pc in &pieces {
                if let Some(p) = nearest_in_pieces(x, &[pc], norm)? {
                    let dd = norm.dist(x, &p);
                    if best.as_ref().map_or(true, |bb| dd < bb.1) {
                        best = Some((p, dd));
                    }
                }
            }
            Ok(best)
        }
    }
}

pub(crate) fn nearest_of(x: &[f64], pts: &[Vec<f64>], norm: Norm) -> Option<(Vec<f64>, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in pts.iter().enumerate() {
        let dd = norm.dist(x, p);
        if best.map_or(true, |b| dd < b.1) {
            best = Some((i, dd));
        }
    }
    best.map(|(i, dd)| (pts[i].clone(), dd))
}

/// `d(x, set)`, `+inf` for the empty set.
pub fn dist_point_set(x: &[f64], set: &SetRep, norm: Norm) -> Result<f64> {
    Ok(project(x, set, norm)?.map_or(f64::INFINITY, |(_, dd)| dd))
}

/// One convex-piece choice per set, or a finite candidate list.
fn piece_lists(sets: &[SetRep]) -> Vec<Vec<Piece>> {
    sets.iter().map(|s| s.pieces()).collect()
}

fn for_each_combination(
    lists: &[Vec<Piece>],
    mut f: impl FnMut(&[&Piece]) -> Result<()>,
) -> Result<()> {
    let total = lists.iter().try_fold(1usize, |acc, l| acc.checked_mul(l.len()));
    match total {
        Some(0) => return Ok(()),
        Some(t) if t <= MAX_COMBINATIONS => {}
        _ => return Err(Error::unsupported("too many convex piece combinations")),
    }
    let mut idx = vec![0usize; lists.len()];
    loop {
        let combo: Vec<&Piece> = idx.iter().zip(lists).map(|(&i, l)| &l[i]).collect();
        f(&combo)?;
        let mut k = 0;
        loop {
            if k == lists.len() {
                return Ok(());
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

/// Nearest point of `x` to `set_1 ∩ ... ∩ set_m`, with the distance; `None` when empty.
pub fn nearest_in_intersection(x: &[f64], sets: &[SetRep], norm: Norm) -> Result<Option<(Vec<f64>, f64)>> {
    if sets.is_empty() {
        return Ok(Some((x.to_vec(), 0.0)));
    }
    if let Some((k, pts)) = sets.iter().enumerate().find_map(|(k, s)| s.finite_points().map(|p| (k, p))) {
        let common: Vec<Vec<f64>> = pts
            .into_iter()
            .filter(|p| sets.iter().enumerate().all(|(j, s)| j == k || s.contains(p, tol::FEAS)))
            .collect();
        return Ok(nearest_of(x, &common, norm));
    }
    let lists = piece_lists(sets);
    let mut best: Option<(Vec<f64>, f64)> = None;
    for_each_combination(&lists, |combo| {
        if let Some(p) = nearest_in_pieces(x, combo, norm)? {
            let dd = norm.dist(x, &p);
            if best.as_ref().map_or(true, |b| dd < b.1) {
                best = Some((p, dd));
            }
        }
        Ok(())
    })?;
    Ok(best)
}

/// Is `set_1 ∩ ... ∩ set_m` empty? Exact for finite and polyhedral data.
pub fn intersection_is_empty(sets: &[SetRep]) -> Result<bool> {
    let d = sets.first().map_or(0, |s| s.dim());
    let origin = vec![0.0; d];
    let norm = if sets.iter().all(|s| s.is_polyhedral()) { Norm::Maximum } else { Norm::Euclidean };
    Ok(nearest_in_intersection(&origin, sets, norm)?.is_none())
}

/// Lower bound `-h_A(-g) - h_B(g)` on `d(A, B)` for a functional with `||g||_* = 1`.
fn separation_bound(a: &[&Piece], b: &[&Piece], g: &[f64]) -> Result<f64> {
    let neg: Vec<f64> = g.iter().map(|x| -x).collect();
    let mut ha = f64::INFINITY;
    for p in a {
        ha = ha.min(p.support(&neg)?);
    }
    let mut hb = f64::INFINITY;
    for p in b {
        hb = hb.min(p.support(g)?);
    }
    Ok((-ha - hb).max(0.0))
}

/// Distance between two convex pieces.
pub(crate) fn piece_distance(pa: &Piece, pb: &Piece, norm: Norm) -> Result<DistanceReport> {
    let d = pa.dim();
    if let (Piece::Poly(a), Piece::Poly(b)) = (pa, pb) {
        if norm.is_polyhedral() {
            let mut lp = Lp::new(2 * d);
            for j in 0..2 * d {
                lp.free(j);
            }
            a.add_to_lp(&mut lp, 0);
            b.add_to_lp(&mut lp, d);
            let ts = add_norm_epigraph(&mut lp, norm, d, |j| (vec![(j, 1.0), (d + j, -1.0)], 0.0))?;
            for t in ts {
                lp.objective[t] = 1.0;
            }
            let s = lp.solve()?;
            return match s.status {
                LpStatus::Optimal => {
                    let p = s.x[..d].to_vec();
                    let q = s.x[d..2 * d].to_vec();
                    let v = norm.dist(&p, &q);
                    Ok(DistanceReport::exact(v, Method::ExactLp, Some(vec![p, q])))
                }
                LpStatus::Infeasible => Ok(DistanceReport::infinite()),
                LpStatus::Unbounded => Err(Error::numerical("distance LP reported unbounded")),
            };
        }
    }
    // alternating projections between the two pieces
    let start = match nearest_in_pieces(&vec![0.0; d], &[pa], norm)? {
        Some(p) => p,
        None => return Ok(DistanceReport::infinite()),
    };
    let mut p = start;
    let Some(mut q) = nearest_in_pieces(&p, &[pb], norm)? else {
        return Ok(DistanceReport::infinite());
    };
    let mut prev = f64::INFINITY;
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        p = nearest_in_pieces(&q, &[pa], norm)?.ok_or_else(|| Error::numerical("lost feasibility"))?;
        q = nearest_in_pieces(&p, &[pb], norm)?.ok_or_else(|| Error::numerical("lost feasibility"))?;
        let v = norm.dist(&p, &q);
        if (prev - v).abs() <= 1e-15 * v.max(1.0) {
            break;
        }
        prev = v;
    }
    let upper = norm.dist(&p, &q);
    let g = norm.subgradient(&sub(&p, &q));
    let lower = if upper > 0.0 { separation_bound(&[pa], &[pb], &g)?.min(upper) } else { 0.0 };
    Ok(DistanceReport { value: upper, lower, upper, method: Method::Alternating, witness: Some(vec![p, q]) })
}

/// `d(A, B) = inf ||a - b||` with a bracket.
pub fn dist_set_set(a: &SetRep, b: &SetRep, norm: Norm) -> Result<DistanceReport> {
    if let Some(pts) = a.finite_points() {
        return finite_to_set(&pts, b, norm, false);
    }
    if let Some(pts) = b.finite_points() {
        return finite_to_set(&pts, a, norm, true);
    }
    let la = a.pieces();
    let lb = b.pieces();
    let mut best: Option<DistanceReport> = None;
    for pa in &la {
        for pb in &lb {
            let r = piece_distance(pa, pb, norm)?;
            best = Some(match best {
                None => r,
                Some(cur) => merge_min(cur, r),
            });
        }
    }
    Ok(best.unwrap_or_else(DistanceReport::infinite))
}

fn finite_to_set(pts: &[Vec<f64>], other: &SetRep, norm: Norm, swap: bool) -> Result<DistanceReport> {
    let mut best: Option<(Vec<f64>, Vec<f64>, f64)> = None;
    for p in pts {
        if let Some((q, dd)) = project(p, other, norm)? {
            if best.as_ref().map_or(true, |b| dd < b.2) {
                best = Some((p.clone(), q, dd));
            }
        }
    }
    let method = if other.finite_points().is_some() || norm.is_polyhedral() {
        Method::Exhaustive
    } else {
        Method::Alternating
    };
    Ok(match best {
        None => DistanceReport::infinite(),
        Some((p, q, dd)) => {
            let w = if swap { vec![q, p] } else { vec![p, q] };
            DistanceReport::exact(dd, method, Some(w))
        }
    })
}

/// Keeps the report with the smaller value; the bracket becomes the min of both brackets.
pub(crate) fn merge_min(a: DistanceReport, b: DistanceReport) -> DistanceReport {
    let lower = a.lower.min(b.lower);
    let upper = a.upper.min(b.upper);
    let method = if a.method == b.method { a.method } else { Method::Alternating };
    let mut r = if b.value < a.value { b } else { a };
    r.lower = lower;
    r.upper = upper;
    r.method = method;
    r
}

/// Points of `set` within distance `radius` of `center`: the finite points themselves, or
/// projections of a direction grid.
pub fn sample_near(set: &SetRep, center: &[f64], radius: f64, norm: Norm, per_radius: usize) -> Result<Vec<Vec<f64>>> {
    if let Some(pts) = set.finite_points() {
        return Ok(pts.into_iter().filter(|p| norm.dist(p, center) < radius).collect());
    }
    let d = center.len();
    let dirs = direction_grid(d, per_radius);
    let mut out: Vec<Vec<f64>> = Vec::new();
    if let Some((p, dd)) = project(center, set, norm)? {
        if dd < radius {
            out.push(p);
        }
    }
    let r0 = if radius.is_finite() { radius } else { 1.0 };
    for frac in [0.25, 0.5, 0.9] {
        for u in &dirs {
            let z = axpy(center, frac * r0, u);
            if let Some((p, _)) = project(&z, set, norm)? {
                if norm.dist(&p, center) < radius && !out.iter().any(|q| norm2(&sub(q, &p)) <= 1e-12) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// Unit (Euclidean) directions: an angular grid in 2-D, a Fibonacci sphere in 3-D and
/// signed coordinate plus diagonal directions otherwise.
pub fn direction_grid(d: usize, count: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / count as f64;
                vec![t.cos(), t.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
            (0..count)
                .map(|k| {
                    let y = 1.0 - 2.0 * (k as f64 + 0.5) / count as f64;
                    let r = (1.0 - y * y).sqrt();
                    let t = golden * k as f64;
                    vec![r * t.cos(), y, r * t.sin()]
                })
                .collect()
        }
        _ => {
            let mut v = Vec::new();
            for j in 0..d {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; d];
                    e[j] = s;
                    v.push(e);
                }
            }
            for s in [1.0, -1.0] {
                v.push(scale(&vec![s; d], 1.0 / (d as f64).sqrt()));
            }
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(c: [f64; 2], r: f64) -> SetRep {
        SetRep::HPolyhedron {
            a: vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            b: vec![c[0] + r, r - c[0], c[1] + r, r - c[1]],
        }
    }

    #[test]
    fn projection_onto_square_all_norms() {
        let s = square([0.0, 0.0], 1.0);
        let (p, dd) = project(&[3.0, 2.0], &s, Norm::Euclidean).unwrap().unwrap();
        assert!((p[0] - 1.0).abs() < 1e-9 && (p[1] - 1.0).abs() < 1e-9);
        assert!((dd - 5.0_f64.sqrt()).abs() < 1e-9);
        assert!((dist_point_set(&[3.0, 2.0], &s, Norm::Maximum).unwrap() - 2.0).abs() < 1e-9);
        assert!((dist_point_set(&[3.0, 2.0], &s, Norm::SUM).unwrap() - 3.0).abs() < 1e-9);
    }

    #[test]
    fn projection_onto_ball_and_line() {
        let b = SetRep::Ball { center: vec![0.0, 1.0], radius: 1.0, norm: Norm::Euclidean };
        assert!((dist_point_set(&[0.0, -1.0], &b, Norm::Euclidean).unwrap() - 1.0).abs() < 1e-12);
        let l = SetRep::line(vec![0.0, 0.0], vec![1.0, 1.0]);
        assert!((dist_point_set(&[1.0, -1.0], &l, Norm::Euclidean).unwrap() - 2.0_f64.sqrt()).abs() < 1e-12);
        assert!((dist_point_set(&[1.0, -1.0], &l, Norm::Maximum).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn squares_distance_brackets() {
        let a = square([0.0, 0.0], 1.0);
        let b = square([4.0, 1.0], 1.0);
        let r = dist_set_set(&a, &b, Norm::Maximum).unwrap();
        assert_eq!(r.method, Method::ExactLp);
        assert!((r.value - 2.0).abs() < 1e-9);
        let r = dist_set_set(&a, &b, Norm::Euclidean).unwrap();
        assert!((r.value - 2.0).abs() < 1e-7, "{r:?}");
        assert!(r.lower <= r.value + 1e-12 && r.lower > 1.99);
    }

    #[test]
    fn crossing_lines_intersection() {
        let sets = vec![SetRep::line(vec![0.0, 0.5], vec![1.0, 0.0]), SetRep::line(vec![0.3, 0.0], vec![0.0, 1.0])];
        let (p, dd) = nearest_in_intersection(&[0.0, 0.0], &sets, Norm::Euclidean).unwrap().unwrap();
        assert!((p[0] - 0.3).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
        assert!((dd - (0.34_f64).sqrt()).abs() < 1e-12);
        let par = vec![SetRep::line(vec![0.0, 0.5], vec![1.0, 0.0]), SetRep::line(vec![0.0, 0.0], vec![1.0, 0.0])];
        assert!(intersection_is_empty(&par).unwrap());
    }
}
