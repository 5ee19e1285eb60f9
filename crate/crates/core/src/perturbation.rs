//! Perturbations of families of dual vectors: trading a small sum for small distances to
//! cones and back, with the normalization restored.
//!
//! All vectors live in the dual space; lengths and cone distances use the dual of the
//! primal norm stored in the family.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::geometry::{ConeRep, Norm};
use crate::linalg::{dot, scale, sub, sum_vectors};

/// Vectors `z_1..z_n` paired with cones `K_1..K_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualFamily {
    pub vectors: Vec<Vec<f64>>,
    pub cones: Vec<ConeRep>,
    /// Norm of the primal space.
    pub norm: Norm,
}

/// Output of a perturbation with the verified inequality `residual < bound`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbed {
    pub vectors: Vec<Vec<f64>>,
    pub residual: f64,
    pub bound: f64,
    /// `||sum z_i||` of the output.
    pub sum_norm: f64,
    /// Largest distance from an output vector to its cone among those claimed to lie in it.
    pub cone_error: f64,
    /// Sum of norms used for the normalization.
    pub normalization: f64,
}

impl Perturbed {
    pub fn margin(&self) -> f64 {
        self.bound - self.residual
    }
}

/// Which half of the rebalancing lemma produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Part {
    ZeroSum,
    InCones,
}

/// Pairing guarantee for a perturbed family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingReport {
    pub part: Part,
    pub tau: f64,
    /// Threshold from the lemma statement.
    pub tau_hat: f64,
    /// Threshold obtained in the last step of the printed proof for the in-cones part.
    pub tau_hat_proof: f64,
    /// `sum <z_hat_i, x_i>`
    pub pairing: f64,
    /// `max ||x_i||`
    pub max_primal: f64,
    pub holds: bool,
    pub holds_proof_variant: bool,
}

impl DualFamily {
    pub fn new(vectors: Vec<Vec<f64>>, cones: Vec<ConeRep>, norm: Norm) -> Result<Self> {
        let f = DualFamily { vectors, cones, norm };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vectors.len() < 2 {
            return Err(Error::precondition("at least two vectors are required"));
        }
        if self.vectors.len() != self.cones.len() {
            return Err(Error::invalid("vector and cone counts differ"));
        }
        let d = self.vectors[0].len();
        for (v, k) in self.vectors.iter().zip(&self.cones) {
            check_dim(d, v.len())?;
            check_dim(d, k.dim)?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.vectors.len()
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn dual(&self) -> Norm {
        self.norm.dual()
    }

    /// `sum_i ||z_i||_*`
    pub fn total_norm(&self) -> f64 {
        self.vectors.iter().map(|v| self.dual().norm(v)).sum()
    }

    /// `sum_{i<n} ||z_i||_*`
    pub fn head_norm(&self) -> f64 {
        let n = self.n();
        self.vectors[..n - 1].iter().map(|v| self.dual().norm(v)).sum()
    }

    pub fn sum(&self) -> Vec<f64> {
        sum_vectors(&self.vectors, self.dim())
    }

    pub fn sum_norm(&self) -> f64 {
        self.dual().norm(&self.sum())
    }

    pub fn cone_distances(&self) -> Result<Vec<f64>> {
        self.vectors.iter().zip(&self.cones).map(|(v, k)| k.dist(v, self.dual())).collect()
    }

    pub fn with_vectors(&self, vectors: Vec<Vec<f64>>) -> DualFamily {
        DualFamily { vectors, cones: self.cones.clone(), norm: self.norm }
    }
}

fn check_normalized(value: f64, what: &str) -> Result<()> {
    if (value - 1.0).abs() > 1e-9 {
        return Err(Error::precondition(format!("{what} must equal 1, got {value}")));
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::precondition(format!("{name} must be positive and finite")));
    }
    Ok(())
}

fn check_rebalance_pre(f: &DualFamily, eps: f64, lambda: f64, rho: f64) -> Result<Vec<f64>> {
    f.validate()?;
    positive("epsilon", eps)?;
    positive("lambda", lambda)?;
    positive("rho", rho)?;
    check_normalized(f.total_norm(), "sum of norms")?;
    let dists = f.cone_distances()?;
    let lhs = lambda * dists.iter().sum::<f64>() + rho * f.sum_norm();
    if !(lhs < eps) {
        return Err(Error::precondition(format!(
            "lambda * sum d(z_i, K_i) + rho * ||sum z_i|| = {lhs} is not below epsilon = {eps}"
        )));
    }
    Ok(dists)
}

fn finish(f: &DualFamily, vectors: Vec<Vec<f64>>, residual: f64, bound: f64, cone_error: f64, normalization: f64) -> Result<Perturbed> {
    let out = f.with_vectors(vectors);
    let p = Perturbed { sum_norm: out.sum_norm(), vectors: out.vectors, residual, bound, cone_error, normalization };
    if !(p.residual < p.bound) {
        return Err(Error::numerical(format!("postcondition {} < {} failed", p.residual, p.bound)));
    }
    Ok(p)
}

/// Subtracts the mean of the sum from every vector, then renormalizes.
/// Requires `eps + lambda <= rho`; the output sums to zero with
/// `sum d(z_hat_i, K_i) < eps / lambda`.
pub fn rebalance_to_zero_sum(f: &DualFamily, eps: f64, lambda: f64, rho: f64) -> Result<Perturbed> {
    check_rebalance_pre(f, eps, lambda, rho)?;
    if eps + lambda > rho {
        return Err(Error::precondition("rebalancing needs eps + lambda <= rho"));
    }
    let s = f.sum();
    let n = f.n() as f64;
    let v: Vec<Vec<f64>> = f.vectors.iter().map(|z| sub(z, &scale(&s, 1.0 / n))).collect();
    let total: f64 = v.iter().map(|x| f.dual().norm(x)).sum();
    if !(total > 0.0) {
        return Err(Error::numerical("rebalanced vectors vanish"));
    }
    let zh: Vec<Vec<f64>> = v.iter().map(|x| scale(x, 1.0 / total)).collect();
    let out = f.with_vectors(zh.clone());
    let residual: f64 = out.cone_distances()?.iter().sum();
    let normalization = out.total_norm();
    finish(f, zh, residual, eps / lambda, 0.0, normalization)
}

/// Replaces every vector by its nearest cone point, then renormalizes.
/// Requires `eps + rho <= lambda`; the output lies in the cones with `||sum|| < eps / rho`.
pub fn snap_to_cones(f: &DualFamily, eps: f64, lambda: f64, rho: f64) -> Result<Perturbed> {
    check_rebalance_pre(f, eps, lambda, rho)?;
    if eps + rho > lambda {
        return Err(Error::precondition("snapping needs eps + rho <= lambda"));
    }
    let v = nearest_cone_points(f)?;
    let total: f64 = v.iter().map(|x| f.dual().norm(x)).sum();
    if !(total > 0.0) {
        return Err(Error::numerical("snapped vectors vanish"));
    }
    let zh: Vec<Vec<f64>> = v.iter().map(|x| scale(x, 1.0 / total)).collect();
    let out = f.with_vectors(zh.clone());
    let cone_error = out.cone_distances()?.into_iter().fold(0.0, f64::max);
    let residual = out.sum_norm();
    let normalization = out.total_norm();
    finish(f, zh, residual, eps / rho, cone_error, normalization)
}

fn nearest_cone_points(f: &DualFamily) -> Result<Vec<Vec<f64>>> {
    f.vectors
        .iter()
        .zip(&f.cones)
        .map(|(z, k)| k.nearest(z, f.dual()).map(|(p, _)| p))
        .collect()
}

/// Runs the requested part and checks the pairing guarantee against primal vectors `xs`.
/// The input must satisfy `sum <z_i, x_i> >= tau max ||x_i||`.
pub fn pairing_bound(
    f: &DualFamily,
    xs: &[Vec<f64>],
    eps: f64,
    lambda: f64,
    rho: f64,
    tau: f64,
    part: Part,
) -> Result<(Perturbed, PairingReport)> {
    if xs.len() != f.n() {
        return Err(Error::invalid("primal and dual vector counts differ"));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::precondition("tau must lie in ]0, 1]"));
    }
    let max_primal = xs.iter().map(|x| f.norm.norm(x)).fold(0.0, f64::max);
    if max_primal == 0.0 {
        return Err(Error::precondition("primal vectors are all zero"));
    }
    let pair_in: f64 = f.vectors.iter().zip(xs).map(|(z, x)| dot(z, x)).sum();
    if pair_in < tau * max_primal - 1e-12 * max_primal {
        return Err(Error::precondition(format!(
            "pairing {pair_in} is below tau * max ||x_i|| = {}",
            tau * max_primal
        )));
    }
    let (out, tau_hat, tau_hat_proof) = match part {
        Part::ZeroSum => {
            let t = (tau * rho - eps) / (rho + eps);
            (rebalance_to_zero_sum(f, eps, lambda, rho)?, t, t)
        }
        Part::InCones => (
            snap_to_cones(f, eps, lambda, rho)?,
            (tau * lambda - eps) / (lambda + eps),
            (tau * lambda - eps) / (rho + lambda),
        ),
    };
    let pairing: f64 = out.vectors.iter().zip(xs).map(|(z, x)| dot(z, x)).sum();
    let report = PairingReport {
        part,
        tau,
        tau_hat,
        tau_hat_proof,
        pairing,
        max_primal,
        holds: pairing > tau_hat * max_primal,
        holds_proof_variant: pairing > tau_hat_proof * max_primal,
    };
    Ok((out, report))
}

fn check_unit_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::precondition("epsilon must lie in ]0, 1["));
    }
    Ok(())
}

/// Vectors in the cones with a small sum become a zero-sum family close to the cones:
/// `sum d(z_hat_i, K_i) < eps / (1 - eps)`.
pub fn normalize_then_rebalance(f: &DualFamily, eps: f64) -> Result<Perturbed> {
    check_unit_eps(eps)?;
    rebalance_to_zero_sum(f, eps, 1.0 - eps, 1.0)
}

/// A zero-sum family close to the cones becomes a family in the cones with
/// `||sum z_hat_i|| < eps / (1 - eps)`.
pub fn normalize_then_snap(f: &DualFamily, eps: f64) -> Result<Perturbed> {
    check_unit_eps(eps)?;
    snap_to_cones(f, eps, 1.0, 1.0 - eps)
}

/// Two vectors in their cones with `||z_1 + z_2|| < eps` become `z_hat_1 = -z_hat_2` with
/// `z_hat_1` in its cone and `d(z_hat_2, K_2) < eps`. The vector of larger norm keeps its
/// cone; ties keep the input order.
pub fn two_set_exact_flip(f: &DualFamily, eps: f64) -> Result<Perturbed> {
    f.validate()?;
    positive("epsilon", eps)?;
    if f.n() != 2 {
        return Err(Error::precondition("the flip applies to exactly two vectors"));
    }
    check_normalized(f.total_norm(), "sum of norms")?;
    let dists = f.cone_distances()?;
    if dists.iter().any(|&dd| dd > 1e-9) {
        return Err(Error::precondition("input vectors must lie in their cones"));
    }
    if !(f.sum_norm() < eps) {
        return Err(Error::precondition("||z_1 + z_2|| must be below epsilon"));
    }
    let dn = f.dual();
    let (big, small) = if dn.norm(&f.vectors[0]) >= dn.norm(&f.vectors[1]) { (0, 1) } else { (1, 0) };
    let nb = dn.norm(&f.vectors[big]);
    let keep = scale(&f.vectors[big], 0.5 / nb);
    let flip = scale(&keep, -1.0);
    let mut zh = vec![Vec::new(), Vec::new()];
    zh[big] = keep;
    zh[small] = flip;
    let out = f.with_vectors(zh.clone());
    let ds = out.cone_distances()?;
    let normalization = out.total_norm();
    finish(f, zh, ds[small], eps, ds[big], normalization)
}

/// Asymmetric snap: from a zero-sum family close to the cones (normalized over the first
/// `n - 1` vectors) to one whose first `n - 1` vectors lie in their cones and whose last
/// vector satisfies `d(z_hat_n, K_n) < eps / (1 - eps)`.
pub fn asymmetric_snap(f: &DualFamily, eps: f64) -> Result<Perturbed> {
    f.validate()?;
    check_unit_eps(eps)?;
    check_normalized(f.head_norm(), "sum of the first n-1 norms")?;
    if f.sum_norm() > 1e-9 {
        return Err(Error::precondition("vectors must sum to zero"));
    }
    let dists = f.cone_distances()?;
    let total: f64 = dists.iter().sum();
    if !(total < eps) {
        return Err(Error::precondition(format!("sum of cone distances {total} is not below epsilon")));
    }
    let n = f.n();
    let y = nearest_cone_points(f)?;
    let head: f64 = y[..n - 1].iter().map(|v| f.dual().norm(v)).sum();
    if !(head > 0.0) {
        return Err(Error::numerical("snapped head vectors vanish"));
    }
    let mut zh: Vec<Vec<f64>> = y[..n - 1].iter().map(|v| scale(v, 1.0 / head)).collect();
    let last = scale(&sum_vectors(&zh, f.dim()), -1.0);
    zh.push(last);
    let out = f.with_vectors(zh.clone());
    let ds = out.cone_distances()?;
    let cone_error = ds[..n - 1].iter().copied().fold(0.0, f64::max);
    let normalization = out.head_norm();
    finish(f, zh, ds[n - 1], eps / (1.0 - eps), cone_error, normalization)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lines_family(z1: Vec<f64>, z2: Vec<f64>) -> DualFamily {
        let k1 = ConeRep::span(vec![vec![0.0, 1.0]], 2);
        let k2 = ConeRep::span(vec![vec![1.0, 0.0]], 2);
        DualFamily::new(vec![z1, z2], vec![k1, k2], Norm::Maximum).unwrap()
    }

    #[test]
    fn rebalance_opposite_rays() {
        let k1 = ConeRep::ray(vec![0.0, 1.0]);
        let k2 = ConeRep::ray(vec![0.0, -1.0]);
        let f = DualFamily::new(vec![vec![0.0, 0.55], vec![0.0, -0.45]], vec![k1, k2], Norm::Euclidean).unwrap();
        let r = normalize_then_rebalance(&f, 0.2).unwrap();
        assert!(r.sum_norm < 1e-15);
        assert!((r.normalization - 1.0).abs() < 1e-12);
        assert!(r.residual < 0.2 / 0.8);
        assert_eq!(r.vectors[0], vec![0.0, 0.5]);
    }

    #[test]
    fn snap_near_a_line_in_sum_norm() {
        let k = ConeRep::span(vec![vec![0.0, 1.0]], 2);
        let f = DualFamily::new(vec![vec![0.05, 0.45], vec![-0.05, -0.45]], vec![k.clone(), k], Norm::Maximum).unwrap();
        let r = normalize_then_snap(&f, 0.15).unwrap();
        assert!(r.cone_error < 1e-12);
        assert!(r.residual < 1e-12 && r.margin() > 0.15);
        assert!((r.normalization - 1.0).abs() < 1e-12);
    }

    #[test]
    fn flip_keeps_larger_vector() {
        let k = ConeRep::full(2);
        let f = DualFamily::new(vec![vec![0.3, 0.0], vec![-0.7, 0.0]], vec![k.clone(), k], Norm::Euclidean).unwrap();
        let r = two_set_exact_flip(&f, 0.5).unwrap();
        assert_eq!(r.vectors[1], vec![-0.5, 0.0]);
        assert_eq!(r.vectors[0], vec![0.5, 0.0]);
    }

    #[test]
    fn preconditions_are_enforced() {
        let f = lines_family(vec![0.0, 0.5], vec![0.5, 0.0]);
        assert!(matches!(normalize_then_rebalance(&f, 0.1), Err(Error::PreconditionFailed(_))));
        assert!(matches!(rebalance_to_zero_sum(&f, 0.9, 0.5, 1.0), Err(Error::PreconditionFailed(_))));
    }
}
