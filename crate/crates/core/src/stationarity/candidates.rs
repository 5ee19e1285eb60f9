//! Candidate base points near a reference point, grouped by their normal cones.

use crate::error::Result;
use crate::geometry::project::{direction_grid, nearest_in_pieces};
use crate::geometry::{normal_cone, ConeRep, Norm, NormalKind, Piece, Polyhedron, SetRep};
use crate::linalg::{add, norm2, scale, sub};

const MAX_FACES: usize = 20_000;
const BOUNDARY_GRID: usize = 64;

/// A point of a set together with its normal cone there.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeCandidate {
    pub point: Vec<f64>,
    pub cone: ConeRep,
}

fn push_unique(out: &mut Vec<Vec<f64>>, p: Vec<f64>) {
    if !out.iter().any(|q| norm2(&sub(q, &p)) <= 1e-10 * norm2(&p).max(1.0)) {
        out.push(p);
    }
}

fn subsets(m: usize, k: usize, cap: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, cap: usize, out: &mut Vec<Vec<usize>>) {
        if out.len() >= cap {
            return;
        }
        out.push(cur.clone());
        if cur.len() == k {
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, cap, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut Vec::new(), cap, out);
}

/// Nearest points of every face of `poly` to `center`.
fn face_points(poly: &Polyhedron, center: &[f64], norm: Norm) -> Result<Vec<Vec<f64>>> {
    let mut faces = Vec::new();
    subsets(poly.a.len(), poly.dim, MAX_FACES, &mut faces);
    let mut out = Vec::new();
    for rows in faces {
        let mut face = poly.clone();
        for &r in &rows {
            face.eq_a.push(poly.a[r].clone());
            face.eq_b.push(poly.b[r]);
        }
        if let Some(p) = nearest_in_pieces(center, &[&Piece::Poly(face)], norm)? {
            if poly.contains(&p, 1e-8 * norm2(&p).max(1.0)) {
                out.push(p);
            }
        }
    }
    Ok(out)
}

/// Points of `set` at distance `< radius` from `center` at which the normal cone can change:
/// nearest points of all faces of polyhedral pieces, a boundary grid of curved pieces,
/// nearest points of pairwise piece intersections, or the points of a finite set.
pub fn candidate_points(set: &SetRep, center: &[f64], radius: f64, norm: Norm) -> Result<Vec<Vec<f64>>> {
    if let Some(pts) = set.finite_points() {
        return Ok(pts.into_iter().filter(|p| norm.dist(p, center) < radius).collect());
    }
    let d = center.len();
    let pieces = set.pieces();
    let mut raw = Vec::new();
    for pc in &pieces {
        match pc {
            Piece::Poly(poly) => raw.extend(face_points(poly, center, norm)?),
            Piece::Ball { center: c, radius: r, norm: bn } => {
                if let Some(p) = nearest_in_pieces(center, &[pc], norm)? {
                    raw.push(p);
                }
                if r.is_finite() {
                    for u in direction_grid(d, if d == 2 { BOUNDARY_GRID } else { 4 * BOUNDARY_GRID }) {
                        raw.push(add(c, &scale(&u, r / bn.norm(&u))));
                    }
                }
            }
        }
    }
    for a in 0..pieces.len() {
        for b in a + 1..pieces.len() {
            if let Ok(Some(p)) = nearest_in_pieces(center, &[&pieces[a], &pieces[b]], norm) {
                raw.push(p);
            }
        }
    }
    let mut out = Vec::new();
    for p in raw {
        if norm.dist(&p, center) < radius && set.contains(&p, 1e-8 * norm2(&p).max(1.0)) {
            push_unique(&mut out, p);
        }
    }
    Ok(out)
}

/// `a ⊆ b`, tested on the generators of `a`.
pub(crate) fn cone_within(a: &ConeRep, b: &ConeRep) -> Result<bool> {
    if a.is_zero() || b.is_full() {
        return Ok(true);
    }
    for g in a.conic_generators() {
        let s = norm2(&g);
        if s > 0.0 && !b.contains(&scale(&g, 1.0 / s), 1e-9)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Candidates of `set` near `center` with their normal cones. With `prune`, points with
/// an already seen cone are skipped and a cone contained in another candidate's cone is
/// dropped (a larger cone never raises a dual minimum), which keeps the zero cone only
/// when nothing else is available. Without it every candidate point is kept.
pub fn cone_candidates(
    set: &SetRep,
    center: &[f64],
    radius: f64,
    norm: Norm,
    kind: NormalKind,
    prune: bool,
) -> Result<Vec<ConeCandidate>> {
    let mut out: Vec<ConeCandidate> = Vec::new();
    for p in candidate_points(set, center, radius, norm)? {
        let cone = normal_cone(set, &p, kind)?;
        let mut dup = false;
        for c in out.iter().filter(|_| prune) {
            if cone_within(&cone, &c.cone)? && cone_within(&c.cone, &cone)? {
                dup = true;
                break;
            }
        }
        if !dup {
            out.push(ConeCandidate { point: p, cone });
        }
    }
    if prune && out.len() > 1 {
        let mut keep = vec![true; out.len()];
        for i in 0..out.len() {
            for j in 0..out.len() {
                if i != j && keep[j] && cone_within(&out[i].cone, &out[j].cone)? {
                    keep[i] = false;
                    break;
                }
            }
        }
        out = out.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect();
    }
    Ok(out)
}

/// Cartesian product of per-set candidate lists in mixed-radix order, at most `cap` tuples.
pub(crate) fn tuples(per_set: &[Vec<ConeCandidate>], cap: usize) -> Vec<Vec<usize>> {
    if per_set.iter().any(|v| v.is_empty()) {
        return Vec::new();
    }
    let total = per_set.iter().try_fold(1usize, |acc, v| acc.checked_mul(v.len())).unwrap_or(usize::MAX);
    (0..total.min(cap))
        .map(|mut code| {
            per_set
                .iter()
                .map(|v| {
                    let k = code % v.len();
                    code /= v.len();
                    k
                })
                .collect()
        })
        .collect()
}
