//! Finitely generated cones and normal cones of the supported set classes.

use serde::{Deserialize, Serialize};

use super::lp::{Lp, LpStatus};
use super::norm::Norm;
use super::project::add_norm_epigraph;
use super::set::SetRep;
use crate::error::{Error, Result};
use crate::linalg::{dot, nnls, norm2, orthogonal_complement, orthonormal_basis, scale, sub, unit};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalKind {
    Frechet,
    Clarke,
    Convex,
}

/// `{ sum_k c_k g_k : c >= 0 }`. When `subspace` is set the cone is the span of the generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeRep {
    pub dim: usize,
    pub generators: Vec<Vec<f64>>,
    pub subspace: bool,
}

impl ConeRep {
    pub fn zero(dim: usize) -> Self {
        ConeRep { dim, generators: vec![], subspace: true }
    }

    pub fn full(dim: usize) -> Self {
        ConeRep::span((0..dim).map(|j| unit(dim, j)).collect(), dim)
    }

    pub fn ray(g: Vec<f64>) -> Self {
        let dim = g.len();
        ConeRep { dim, generators: vec![g], subspace: false }
    }

    pub fn span(vs: Vec<Vec<f64>>, dim: usize) -> Self {
        ConeRep { dim, generators: orthonormal_basis(&vs), subspace: true }
    }

    pub fn is_zero(&self) -> bool {
        self.generators.iter().all(|g| norm2(g) == 0.0)
    }

    pub fn is_full(&self) -> bool {
        self.subspace && orthonormal_basis(&self.generators).len() == self.dim
    }

    /// Generators as nonnegative combinations (a subspace contributes `±g`).
    pub fn conic_generators(&self) -> Vec<Vec<f64>> {
        if self.subspace {
            self.generators
                .iter()
                .flat_map(|g| [g.clone(), g.iter().map(|x| -x).collect()])
                .collect()
        } else {
            self.generators.clone()
        }
    }

    /// Nearest point of the cone to `z` and the distance in `norm`.
    pub fn nearest(&self, z: &[f64], norm: Norm) -> Result<(Vec<f64>, f64)> {
        let d = z.len();
        if self.is_zero() {
            return Ok((vec![0.0; d], norm.norm(z)));
        }
        if norm.is_euclidean() {
            let p = if self.subspace {
                let q = orthonormal_basis(&self.generators);
                q.iter().fold(vec![0.0; d], |acc, v| {
                    let c = dot(z, v);
                    acc.iter().zip(v).map(|(a, b)| a + c * b).collect()
                })
            } else {
                let gens = self.conic_generators();
                let c = nnls(&gens, z);
                gens.iter().zip(&c).fold(vec![0.0; d], |acc, (g, &ci)| {
                    acc.iter().zip(g).map(|(a, b)| a + ci * b).collect()
                })
            };
            let dd = norm.dist(z, &p);
            return Ok((p, dd));
        }
        if norm.is_polyhedral() {
            let gens = self.conic_generators();
            let k = gens.len();
            let mut lp = Lp::new(k);
            let ts = add_norm_epigraph(&mut lp, norm, d, |j| {
                let e: Vec<(usize, f64)> = gens.iter().enumerate().map(|(i, g)| (i, -g[j])).collect();
                (e, z[j])
            })?;
            for t in ts {
                lp.objective[t] = 1.0;
            }
            let s = lp.solve()?;
            if s.status != LpStatus::Optimal {
                return Err(Error::numerical("cone distance LP did not reach optimality"));
            }
            let p = gens.iter().zip(&s.x[..k]).fold(vec![0.0; d], |acc, (g, &ci)| {
                acc.iter().zip(g).map(|(a, b)| a + ci * b).collect()
            });
            let dd = norm.dist(z, &p);
            return Ok((p, dd));
        }
        Err(Error::unsupported(format!("cone distance under the {} norm", norm.label())))
    }

    pub fn dist(&self, z: &[f64], norm: Norm) -> Result<f64> {
        Ok(self.nearest(z, norm)?.1)
    }

    pub fn contains(&self, z: &[f64], tol: f64) -> Result<bool> {
        Ok(self.dist(z, Norm::Euclidean)? <= tol * norm2(z).max(1.0))
    }
}

/// `d(z, K)` in the given norm.
pub fn dist_to_cone(z: &[f64], cone: &ConeRep, norm: Norm) -> Result<f64> {
    cone.dist(z, norm)
}

/// Normal cone of `set` at `omega`.
pub fn normal_cone(set: &SetRep, omega: &[f64], kind: NormalKind) -> Result<ConeRep> {
    let d = set.dim();
    let scale_ref = norm2(omega).max(1.0);
    if !set.contains(omega, 1e-7 * scale_ref) {
        return Err(Error::precondition("normal cone requested at a point outside the set"));
    }
    let active_tol = 1e-8 * scale_ref;
    match set {
        SetRep::PointCloud { points } => {
            if kind == NormalKind::Convex && points.len() > 1 {
                return Err(Error::unsupported("convex normal cone of a finite set with several points"));
            }
            Ok(ConeRep::full(d))
        }
        SetRep::HPolyhedron { a, b } => {
            let gens: Vec<Vec<f64>> = a
                .iter()
                .zip(b)
                .filter(|(r, &bi)| norm2(r) > 0.0 && dot(r, omega) >= bi - active_tol * norm2(r))
                .map(|(r, _)| r.clone())
                .collect();
            if gens.is_empty() {
                Ok(ConeRep::zero(d))
            } else {
                Ok(ConeRep { dim: d, generators: gens, subspace: false })
            }
        }
        SetRep::Ball { center, radius, norm } => {
            if radius.is_infinite() {
                return Ok(ConeRep::zero(d));
            }
            let v = sub(omega, center);
            let nv = norm.norm(&v);
            if nv < radius - active_tol {
                return Ok(ConeRep::zero(d));
            }
            if *radius == 0.0 {
                return Ok(ConeRep::full(d));
            }
            if norm.is_maximum() {
                let gens = (0..d)
                    .filter(|&j| v[j].abs() >= radius - active_tol)
                    .map(|j| scale(&unit(d, j), v[j].signum()))
                    .collect();
                return Ok(ConeRep { dim: d, generators: gens, subspace: false });
            }
            if norm.is_sum() {
                let zero: Vec<usize> = (0..d).filter(|&j| v[j].abs() <= active_tol).collect();
                if zero.len() > 12 {
                    return Err(Error::unsupported("sum-norm ball normal cone with too many zero coordinates"));
                }
                let mut gens = Vec::new();
                for mask in 0..(1usize << zero.len()) {
                    let mut s: Vec<f64> = v.iter().map(|x| x.signum()).collect();
                    for (k, &j) in zero.iter().enumerate() {
                        s[j] = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
                    }
                    gens.push(s);
                }
                return Ok(ConeRep { dim: d, generators: gens, subspace: false });
            }
            Ok(ConeRep::ray(norm.subgradient(&v)))
        }
        SetRep::Affine { directions, .. } => Ok(ConeRep::span(orthogonal_complement(directions, d), d)),
        SetRep::Shifted { inner, offset } => normal_cone(inner, &sub(omega, offset), kind),
        SetRep::Union { branches, .. } => {
            let active: Vec<&SetRep> = branches.iter().filter(|b| b.contains(omega, 1e-7 * scale_ref)).collect();
            if active.len() == 1 {
                return normal_cone(active[0], omega, kind);
            }
            match kind {
                NormalKind::Convex => Err(Error::unsupported("convex normal cone of a union with several active branches")),
                NormalKind::Frechet => {
                    let cones = active
                        .iter()
                        .map(|b| normal_cone(b, omega, NormalKind::Frechet))
                        .collect::<Result<Vec<_>>>()?;
                    intersect_cones(&cones, d)
                }
                NormalKind::Clarke => {
                    // tangent cones of affine branches are their direction spaces; the Clarke
                    // tangent cone is their intersection, the normal cone its complement
                    let mut dir_spaces = Vec::new();
                    for b in &active {
                        match affine_directions(b) {
                            Some(ds) => dir_spaces.push(ds),
                            None => {
                                return Err(Error::unsupported("Clarke normal cone of a union with non-affine active branches"))
                            }
                        }
                    }
                    let mut normals = Vec::new();
                    for ds in &dir_spaces {
                        normals.extend(orthogonal_complement(ds, d));
                    }
                    Ok(ConeRep::span(normals, d))
                }
            }
        }
    }
}

fn affine_directions(s: &SetRep) -> Option<Vec<Vec<f64>>> {
    match s {
        SetRep::Affine { directions, .. } => Some(directions.clone()),
        SetRep::Shifted { inner, .. } => affine_directions(inner),
        SetRep::Ball { radius, center, .. } if radius.is_infinite() => {
            let d = center.len();
            Some((0..d).map(|j| unit(d, j)).collect())
        }
        _ => None,
    }
}

/// Intersection of cones that are subspaces, or where all but one are full.
fn intersect_cones(cones: &[ConeRep], d: usize) -> Result<ConeRep> {
    let proper: Vec<&ConeRep> = cones.iter().filter(|c| !c.is_full()).collect();
    if proper.is_empty() {
        return Ok(ConeRep::full(d));
    }
    if proper.len() == 1 {
        return Ok(proper[0].clone());
    }
    if proper.iter().any(|c| c.is_zero()) {
        return Ok(ConeRep::zero(d));
    }
    if proper.iter().all(|c| c.subspace) {
        let mut comps = Vec::new();
        for c in &proper {
            comps.extend(orthogonal_complement(&c.generators, d));
        }
        let inter = orthogonal_complement(&comps, d);
        return Ok(if inter.is_empty() { ConeRep::zero(d) } else { ConeRep::span(inter, d) });
    }
    Err(Error::unsupported("intersection of non-subspace normal cones"))
}

/// Membership of a functional in a cone with the global feasibility tolerance.
pub fn in_cone(z: &[f64], cone: &ConeRep) -> Result<bool> {
    cone.contains(z, tol::FEAS * 10.0)
}
