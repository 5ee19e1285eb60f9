use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::lp::{Lp, LpStatus, Sense};
use super::norm::Norm;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{dot, norm2, orthogonal_complement, orthonormal_basis, sub, unit};

/// A closed subset of R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum SetRep {
    PointCloud {
        points: Vec<Vec<f64>>,
    },
    /// `{x : a x <= b}`
    HPolyhedron {
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    /// Closed ball; an infinite radius is the whole space.
    Ball {
        center: Vec<f64>,
        #[serde(serialize_with = "ser_ext", deserialize_with = "de_ext")]
        radius: f64,
        norm: Norm,
    },
    /// `base + span(directions)`
    Affine {
        base: Vec<f64>,
        #[serde(default)]
        directions: Vec<Vec<f64>>,
    },
    Shifted {
        inner: Box<SetRep>,
        offset: Vec<f64>,
    },
    /// Finite union; an empty branch list is the empty set.
    Union {
        dim: usize,
        branches: Vec<SetRep>,
    },
}

fn ser_ext<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

fn de_ext<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Ext {
        Num(f64),
        Str(String),
    }
    match Ext::deserialize(d)? {
        Ext::Num(x) => Ok(x),
        Ext::Str(s) if s == "inf" => Ok(f64::INFINITY),
        Ext::Str(s) => Err(serde::de::Error::custom(format!("expected number or \"inf\", got {s}"))),
    }
}

/// `{x : a x <= b, eq_a x = eq_b}`
#[derive(Debug, Clone, PartialEq)]
pub struct Polyhedron {
    pub dim: usize,
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub eq_a: Vec<Vec<f64>>,
    pub eq_b: Vec<f64>,
}

impl Polyhedron {
    pub fn whole(dim: usize) -> Self {
        Polyhedron { dim, a: vec![], b: vec![], eq_a: vec![], eq_b: vec![] }
    }

    pub fn point(p: &[f64]) -> Self {
        let d = p.len();
        Polyhedron {
            dim: d,
            a: vec![],
            b: vec![],
            eq_a: (0..d).map(|j| unit(d, j)).collect(),
            eq_b: p.to_vec(),
        }
    }

    pub fn shifted(&self, t: &[f64]) -> Self {
        Polyhedron {
            dim: self.dim,
            a: self.a.clone(),
            b: self.a.iter().zip(&self.b).map(|(r, bi)| bi + dot(r, t)).collect(),
            eq_a: self.eq_a.clone(),
            eq_b: self.eq_a.iter().zip(&self.eq_b).map(|(r, bi)| bi + dot(r, t)).collect(),
        }
    }

    pub fn intersect(&self, other: &Polyhedron) -> Polyhedron {
        Polyhedron {
            dim: self.dim,
            a: [self.a.clone(), other.a.clone()].concat(),
            b: [self.b.clone(), other.b.clone()].concat(),
            eq_a: [self.eq_a.clone(), other.eq_a.clone()].concat(),
            eq_b: [self.eq_b.clone(), other.eq_b.clone()].concat(),
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        self.a.iter().zip(&self.b).all(|(r, &b)| dot(r, x) <= b + tol * norm2(r).max(1e-300))
            && self
                .eq_a
                .iter()
                .zip(&self.eq_b)
                .all(|(r, &b)| (dot(r, x) - b).abs() <= tol * norm2(r).max(1e-300))
    }

    /// Appends the constraints `x in self` on the variable block starting at `offset`.
    pub fn add_to_lp(&self, lp: &mut Lp, offset: usize) {
        for (r, &b) in self.a.iter().zip(&self.b) {
            let entries: Vec<(usize, f64)> = r.iter().enumerate().map(|(j, &v)| (offset + j, v)).collect();
            lp.add_sparse_row(&entries, Sense::Le, b);
        }
        for (r, &b) in self.eq_a.iter().zip(&self.eq_b) {
            let entries: Vec<(usize, f64)> = r.iter().enumerate().map(|(j, &v)| (offset + j, v)).collect();
            lp.add_sparse_row(&entries, Sense::Eq, b);
        }
    }

    /// LP feasibility test.
    pub fn is_empty(&self) -> Result<bool> {
        let mut lp = Lp::new(self.dim);
        for j in 0..self.dim {
            lp.free(j);
        }
        self.add_to_lp(&mut lp, 0);
        Ok(lp.solve()?.status == LpStatus::Infeasible)
    }
}

/// Convex building block of a [`SetRep`].
#[derive(Debug, Clone, PartialEq)]
pub enum Piece {
    Poly(Polyhedron),
    Ball { center: Vec<f64>, radius: f64, norm: Norm },
}

impl Piece {
    pub fn dim(&self) -> usize {
        match self {
            Piece::Poly(p) => p.dim,
            Piece::Ball { center, .. } => center.len(),
        }
    }

    pub fn shifted(&self, t: &[f64]) -> Piece {
        match self {
            Piece::Poly(p) => Piece::Poly(p.shifted(t)),
            Piece::Ball { center, radius, norm } => Piece::Ball {
                center: center.iter().zip(t).map(|(c, s)| c + s).collect(),
                radius: *radius,
                norm: *norm,
            },
        }
    }

    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            Piece::Poly(p) => p.contains(x, tol),
            Piece::Ball { center, radius, norm } => {
                norm.dist(x, center) <= radius + tol * norm.euclid_factor(x.len())
            }
        }
    }

    pub fn is_polyhedral(&self) -> bool {
        matches!(self, Piece::Poly(_))
    }
}

/// Polyhedral description of a ball when the norm allows it.
fn ball_polyhedron(center: &[f64], radius: f64, norm: Norm) -> Option<Polyhedron> {
    let d = center.len();
    if radius.is_infinite() {
        return Some(Polyhedron::whole(d));
    }
    if norm.is_maximum() {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for j in 0..d {
            let e = unit(d, j);
            a.push(e.clone());
            b.push(center[j] + radius);
            a.push(e.iter().map(|x| -x).collect());
            b.push(radius - center[j]);
        }
        return Some(Polyhedron { dim: d, a, b, eq_a: vec![], eq_b: vec![] });
    }
    if norm.is_sum() && d <= 12 {
        let mut a = Vec::new();
        let mut b = Vec::new();
        for mask in 0..(1usize << d) {
            let s: Vec<f64> = (0..d).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect();
            b.push(radius + dot(&s, center));
            a.push(s);
        }
        return Some(Polyhedron { dim: d, a, b, eq_a: vec![], eq_b: vec![] });
    }
    None
}

impl SetRep {
    pub fn whole(dim: usize) -> SetRep {
        SetRep::Ball { center: vec![0.0; dim], radius: f64::INFINITY, norm: Norm::Euclidean }
    }

    pub fn point(p: Vec<f64>) -> SetRep {
        SetRep::PointCloud { points: vec![p] }
    }

    /// Line through `base` along `dir`.
    pub fn line(base: Vec<f64>, dir: Vec<f64>) -> SetRep {
        SetRep::Affine { base, directions: vec![dir] }
    }

    pub fn shifted_by(&self, t: &[f64]) -> SetRep {
        SetRep::Shifted { inner: Box::new(self.clone()), offset: t.to_vec() }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetRep::PointCloud { points } => points.first().map_or(0, |p| p.len()),
            SetRep::HPolyhedron { a, .. } => a.first().map_or(0, |r| r.len()),
            SetRep::Ball { center, .. } => center.len(),
            SetRep::Affine { base, .. } => base.len(),
            SetRep::Shifted { offset, .. } => offset.len(),
            SetRep::Union { dim, .. } => *dim,
        }
    }

    /// Structural checks: consistent dimensions, nonempty clouds, positive radii.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        if d == 0 {
            return Err(Error::invalid("set of dimension zero"));
        }
        match self {
            SetRep::PointCloud { points } => {
                for p in points {
                    check_dim(d, p.len())?;
                    if p.iter().any(|x| !x.is_finite()) {
                        return Err(Error::invalid("point cloud entry is not finite"));
                    }
                }
            }
            SetRep::HPolyhedron { a, b } => {
                if a.len() != b.len() {
                    return Err(Error::invalid("polyhedron rows and right-hand side differ in length"));
                }
                for r in a {
                    check_dim(d, r.len())?;
                }
            }
            SetRep::Ball { radius, .. } => {
                if !(*radius >= 0.0) {
                    return Err(Error::invalid("ball radius must be nonnegative"));
                }
            }
            SetRep::Affine { directions, .. } => {
                for v in directions {
                    check_dim(d, v.len())?;
                }
            }
            SetRep::Shifted { inner, .. } => {
                check_dim(d, inner.dim())?;
                inner.validate()?;
            }
            SetRep::Union { branches, .. } => {
                for br in branches {
                    check_dim(d, br.dim())?;
                    br.validate()?;
                }
            }
        }
        Ok(())
    }

    /// Membership within a Euclidean slack `tol`.
    pub fn contains(&self, x: &[f64], tol: f64) -> bool {
        match self {
            SetRep::PointCloud { points } => points.iter().any(|p| norm2(&sub(x, p)) <= tol),
            SetRep::HPolyhedron { a, b } => {
                a.iter().zip(b).all(|(r, &bi)| dot(r, x) <= bi + tol * norm2(r))
            }
            SetRep::Ball { center, radius, norm } => {
                radius.is_infinite() || norm.dist(x, center) <= radius + tol * norm.euclid_factor(x.len())
            }
            SetRep::Affine { base, directions } => {
                let q = orthonormal_basis(directions);
                let mut r = sub(x, base);
                for v in &q {
                    let c = dot(&r, v);
                    r = r.iter().zip(v).map(|(a, b)| a - c * b).collect();
                }
                norm2(&r) <= tol
            }
            SetRep::Shifted { inner, offset } => inner.contains(&sub(x, offset), tol),
            SetRep::Union { branches, .. } => branches.iter().any(|b| b.contains(x, tol)),
        }
    }

    /// Convex pieces whose union is the set.
    pub fn pieces(&self) -> Vec<Piece> {
        match self {
            SetRep::PointCloud { points } => points.iter().map(|p| Piece::Poly(Polyhedron::point(p))).collect(),
            SetRep::HPolyhedron { a, b } => vec![Piece::Poly(Polyhedron {
                dim: self.dim(),
                a: a.clone(),
                b: b.clone(),
                eq_a: vec![],
                eq_b: vec![],
            })],
            SetRep::Ball { center, radius, norm } => match ball_polyhedron(center, *radius, *norm) {
                Some(p) => vec![Piece::Poly(p)],
                None => vec![Piece::Ball { center: center.clone(), radius: *radius, norm: *norm }],
            },
            SetRep::Affine { base, directions } => {
                let comp = orthogonal_complement(directions, base.len());
                let eq_b = comp.iter().map(|q| dot(q, base)).collect();
                vec![Piece::Poly(Polyhedron { dim: base.len(), a: vec![], b: vec![], eq_a: comp, eq_b })]
            }
            SetRep::Shifted { inner, offset } => inner.pieces().iter().map(|p| p.shifted(offset)).collect(),
            SetRep::Union { branches, .. } => branches.iter().flat_map(|b| b.pieces()).collect(),
        }
    }

    pub fn is_convex_class(&self) -> bool {
        match self {
            SetRep::PointCloud { points } => points.len() == 1,
            SetRep::Union { branches, .. } => branches.len() == 1 && branches[0].is_convex_class(),
            SetRep::Shifted { inner, .. } => inner.is_convex_class(),
            _ => true,
        }
    }

    /// True when every piece is polyhedral.
    pub fn is_polyhedral(&self) -> bool {
        self.pieces().iter().all(Piece::is_polyhedral)
    }

    pub fn is_whole_space(&self) -> bool {
        match self {
            SetRep::Ball { radius, .. } => radius.is_infinite(),
            SetRep::HPolyhedron { a, b } => {
                a.iter().zip(b).all(|(r, &bi)| r.iter().all(|&v| v == 0.0) && bi >= 0.0)
            }
            SetRep::Affine { base, directions } => orthonormal_basis(directions).len() == base.len(),
            SetRep::Shifted { inner, .. } => inner.is_whole_space(),
            SetRep::Union { branches, .. } => branches.iter().any(|b| b.is_whole_space()),
            SetRep::PointCloud { .. } => false,
        }
    }

    /// `sup_{x in set} <u, x>`; `+inf` when unbounded in direction `u`, `-inf` when empty.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        match self {
            SetRep::PointCloud { points } => {
                Ok(points.iter().map(|p| dot(p, u)).fold(f64::NEG_INFINITY, f64::max))
            }
            SetRep::HPolyhedron { a, b } => {
                let d = u.len();
                let mut lp = Lp::new(d);
                for j in 0..d {
                    lp.free(j);
                }
                lp.objective = u.iter().map(|x| -x).collect();
                for (r, &bi) in a.iter().zip(b) {
                    lp.add_row(r.clone(), Sense::Le, bi);
                }
                let s = lp.solve()?;
                Ok(match s.status {
                    LpStatus::Optimal => -s.value,
                    LpStatus::Unbounded => f64::INFINITY,
                    LpStatus::Infeasible => f64::NEG_INFINITY,
                })
            }
            SetRep::Ball { center, radius, norm } => {
                let du = norm.dual_norm(u);
                if du == 0.0 {
                    Ok(dot(center, u))
                } else if radius.is_infinite() {
                    Ok(f64::INFINITY)
                } else {
                    Ok(dot(center, u) + radius * du)
                }
            }
            SetRep::Affine { base, directions } => {
                let scale = norm2(u).max(1e-300);
                if orthonormal_basis(directions).iter().all(|q| dot(q, u).abs() <= 1e-12 * scale) {
                    Ok(dot(base, u))
                } else {
                    Ok(f64::INFINITY)
                }
            }
            SetRep::Shifted { inner, offset } => Ok(inner.support(u)? + dot(u, offset)),
            SetRep::Union { branches, .. } => {
                let mut best = f64::NEG_INFINITY;
                for b in branches {
                    best = best.max(b.support(u)?);
                }
                Ok(best)
            }
        }
    }

    /// Axis-aligned bounding box, `None` when unbounded or empty.
    pub fn bounding_box(&self) -> Result<Option<(Vec<f64>, Vec<f64>)>> {
        let d = self.dim();
        let mut lo = vec![0.0; d];
        let mut hi = vec![0.0; d];
        for j in 0..d {
            let e = unit(d, j);
            let up = self.support(&e)?;
            let down = -self.support(&e.iter().map(|x| -x).collect::<Vec<_>>())?;
            if !up.is_finite() || !down.is_finite() {
                return Ok(None);
            }
            lo[j] = down;
            hi[j] = up;
        }
        Ok(Some((lo, hi)))
    }

    /// Finite point list when the set is a finite union of points.
    pub fn finite_points(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            SetRep::PointCloud { points } => Some(points.clone()),
            SetRep::Shifted { inner, offset } => inner
                .finite_points()
                .map(|ps| ps.iter().map(|p| p.iter().zip(offset).map(|(a, b)| a + b).collect()).collect()),
            SetRep::Union { branches, .. } => {
                let mut all = Vec::new();
                for b in branches {
                    all.extend(b.finite_points()?);
                }
                Some(all)
            }
            SetRep::Ball { center, radius, .. } if *radius == 0.0 => Some(vec![center.clone()]),
            _ => None,
        }
    }
}
