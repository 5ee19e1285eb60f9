//! Approximate stationarity and transversality: dual certificate search and verification,
//! primal tests, the transversality modulus and certificate conversion.

mod candidates;
mod dual;
mod primal;
mod search;

pub use candidates::{candidate_points, cone_candidates, ConeCandidate};
pub use dual::{DualProgram, DualSolution, Normalization, SolveOptions};
pub use primal::{alpha_stationarity_test, transversality_modulus, ModulusReport, ModulusWitness, StationarityOutcome};
pub use search::{
    certificate_convert, dual_alpha_sup, dual_certificate_search, separation_certificate_t51, separation_certificate_t57,
    zheng_ng_certificate, AlphaSupForm, AlphaSupReport, Conversion, SearchOutcome, SeparationParams,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normal_cone, ConeRep, Norm, NormalKind, SetRep};
use crate::linalg::{dot, sum_vectors};
use crate::tol;

/// The six dual separation forms plus the conclusions of the separation theorems.
/// D1/D3/D5 keep the vectors in the cones and bound the sum, D2/D4/D6 make them sum to
/// zero and bound the distances to the cones; D5/D6 normalize only the first `n - 1`
/// vectors. `Separation` is the asymmetric theorem (zero sum, head normalization,
/// weighted cone distances), `SymmetricSeparation` the symmetric one (full
/// normalization, weighted cone distances plus a weighted sum norm).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DualForm {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    Separation,
    SymmetricSeparation,
}

impl DualForm {
    pub fn zero_sum(self) -> bool {
        matches!(self, DualForm::D2 | DualForm::D4 | DualForm::D6 | DualForm::Separation)
    }

    pub fn membership(self) -> bool {
        matches!(self, DualForm::D1 | DualForm::D3 | DualForm::D5)
    }

    pub fn normalization(self) -> Normalization {
        if matches!(self, DualForm::D5 | DualForm::D6 | DualForm::Separation) {
            Normalization::Head
        } else {
            Normalization::Full
        }
    }
}

/// Pairing clause `sum <x_i*, w_i> > tau max ||w_i||`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairingClause {
    pub primal: Vec<Vec<f64>>,
    /// Extra primal point the `w_i` were built from, if any.
    #[serde(default)]
    pub anchor: Option<Vec<f64>>,
    pub tau: f64,
    pub value: f64,
    pub max_primal: f64,
    pub holds: bool,
}

impl PairingClause {
    pub fn evaluate(duals: &[Vec<f64>], primal: Vec<Vec<f64>>, tau: f64, norm: Norm) -> Self {
        let value: f64 = duals.iter().zip(&primal).map(|(x, w)| dot(x, w)).sum();
        let max_primal = primal.iter().map(|w| norm.norm(w)).fold(0.0, f64::max);
        PairingClause { holds: value > tau * max_primal, primal, anchor: None, tau, value, max_primal }
    }
}

/// Points, dual vectors and all recomputable residuals of a separation certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertBundle {
    pub form: DualForm,
    pub kind: NormalKind,
    /// Primal norm; dual vectors are measured in its dual.
    pub norm: Norm,
    pub points: Vec<Vec<f64>>,
    pub duals: Vec<Vec<f64>>,
    pub normalization: f64,
    pub sum_norm: f64,
    pub cone_distances: Vec<f64>,
    pub cone_distance_sum: f64,
    /// Residual compared with the threshold: `||sum||`, `sum d(x_i*, N_i)` or the weighted
    /// combination of the separation forms.
    pub residual: f64,
    pub threshold: f64,
    /// Weights of the cone distances in the separation forms.
    #[serde(default)]
    pub cone_weights: Option<Vec<f64>>,
    /// Weight of `||sum||` in the symmetric separation form.
    #[serde(default)]
    pub sum_weight: Option<f64>,
    #[serde(default)]
    pub pairing: Option<PairingClause>,
}

/// Result of recomputing a bundle from its points and vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleCheck {
    pub normalization_ok: bool,
    pub membership_ok: bool,
    pub zero_sum_ok: bool,
    pub residual: f64,
    pub residual_matches: bool,
    pub below_threshold: bool,
    pub points_in_sets: bool,
    pub pairing_ok: bool,
    pub valid: bool,
}

pub(crate) fn cones_at(sets: &[SetRep], points: &[Vec<f64>], kind: NormalKind) -> Result<Vec<ConeRep>> {
    sets.iter().zip(points).map(|(s, p)| normal_cone(s, p, kind)).collect()
}

impl CertBundle {
    /// Builds a bundle from raw data, computing every residual.
    pub fn assemble(
        sets: &[SetRep],
        form: DualForm,
        kind: NormalKind,
        norm: Norm,
        points: Vec<Vec<f64>>,
        duals: Vec<Vec<f64>>,
        threshold: f64,
    ) -> Result<CertBundle> {
        Self::assemble_weighted(sets, form, kind, norm, points, duals, threshold, None, None)
    }

    /// [`CertBundle::assemble`] with the weights of the separation forms.
    #[allow(clippy::too_many_arguments)]
    pub fn assemble_weighted(
        sets: &[SetRep],
        form: DualForm,
        kind: NormalKind,
        norm: Norm,
        points: Vec<Vec<f64>>,
        duals: Vec<Vec<f64>>,
        threshold: f64,
        cone_weights: Option<Vec<f64>>,
        sum_weight: Option<f64>,
    ) -> Result<CertBundle> {
        if sets.len() != points.len() || sets.len() != duals.len() || sets.len() < 2 {
            return Err(Error::invalid("one point and one dual vector per set are required"));
        }
        let cones = cones_at(sets, &points, kind)?;
        let dn = norm.dual();
        let cone_distances: Vec<f64> = duals.iter().zip(&cones).map(|(x, k)| k.dist(x, dn)).collect::<Result<_>>()?;
        let cone_distance_sum = cone_distances.iter().sum();
        let d = duals[0].len();
        let sum_norm = dn.norm(&sum_vectors(&duals, d));
        let n = duals.len();
        let normalization = match form.normalization() {
            Normalization::Full => duals.iter().map(|x| dn.norm(x)).sum(),
            Normalization::Head => duals[..n - 1].iter().map(|x| dn.norm(x)).sum(),
        };
        let weighted: f64 = match &cone_weights {
            Some(w) if w.len() == n => w.iter().zip(&cone_distances).map(|(a, b)| a * b).sum(),
            Some(_) => return Err(Error::invalid("one cone weight per set is required")),
            None => cone_distance_sum,
        };
        let residual = match form {
            DualForm::Separation => weighted,
            DualForm::SymmetricSeparation => weighted + sum_weight.unwrap_or(1.0) * sum_norm,
            f if f.zero_sum() => cone_distance_sum,
            _ => sum_norm,
        };
        Ok(CertBundle {
            form,
            kind,
            norm,
            points,
            duals,
            normalization,
            sum_norm,
            cone_distances,
            cone_distance_sum,
            residual,
            threshold,
            cone_weights,
            sum_weight,
            pairing: None,
        })
    }

    /// Recomputes every residual from `(points, duals)` and checks the form's clauses.
    pub fn verify(&self, sets: &[SetRep]) -> Result<BundleCheck> {
        let fresh = CertBundle::assemble_weighted(
            sets,
            self.form,
            self.kind,
            self.norm,
            self.points.clone(),
            self.duals.clone(),
            self.threshold,
            self.cone_weights.clone(),
            self.sum_weight,
        )?;
        let normalization_ok = (fresh.normalization - 1.0).abs() <= 1e-9;
        let membership_ok = !self.form.membership() || fresh.cone_distances.iter().all(|&d| d <= 1e-9);
        let zero_sum_ok = !self.form.zero_sum() || fresh.sum_norm <= 1e-12;
        let residual_matches = (fresh.residual - self.residual).abs() <= 1e-9 * self.residual.abs().max(1.0);
        let below_threshold = fresh.residual <= self.threshold - tol::STRICT;
        let points_in_sets = sets.iter().zip(&self.points).all(|(s, p)| s.contains(p, tol::FEAS * 10.0));
        let pairing_ok = match &self.pairing {
            Some(p) => {
                let again = PairingClause::evaluate(&self.duals, p.primal.clone(), p.tau, self.norm);
                again.holds && (again.value - p.value).abs() <= 1e-9 * p.value.abs().max(1.0)
            }
            None => true,
        };
        let valid = normalization_ok && membership_ok && zero_sum_ok && residual_matches && below_threshold && points_in_sets && pairing_ok;
        Ok(BundleCheck {
            normalization_ok,
            membership_ok,
            zero_sum_ok,
            residual: fresh.residual,
            residual_matches,
            below_threshold,
            points_in_sets,
            pairing_ok,
            valid,
        })
    }
}
