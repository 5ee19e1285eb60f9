//! Certificate search over tuples of candidate points: the dual forms, the supremum of
//! admissible `alpha`, conversion between forms and the separation theorems.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::candidates::{cone_candidates, tuples, ConeCandidate};
use super::dual::{DualProgram, DualSolution, Normalization, SolveOptions};
use super::{cones_at, CertBundle, DualForm, PairingClause};
use crate::distance::{d1_points, d1_sets, localized_distance};
use crate::error::{Error, Result};
use crate::geometry::project::direction_grid;
use crate::geometry::{intersection_is_empty, nearest_in_intersection, ConeRep, Norm, NormalKind, SetRep};
use crate::linalg::{add, norm2, scale, sub, sum_vectors};
use crate::perturbation::{asymmetric_snap, normalize_then_rebalance, normalize_then_snap, DualFamily};
use crate::tol;
use crate::translation::translate;

const MAX_TUPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum SearchOutcome {
    Found { bundle: Box<CertBundle> },
    /// Nothing below the threshold on the candidate grid; not a proof that none exists.
    InfeasibleAtGrid { best_value: Option<f64>, tuples: usize },
}

impl SearchOutcome {
    pub fn bundle(&self) -> Option<&CertBundle> {
        match self {
            SearchOutcome::Found { bundle } => Some(bundle),
            SearchOutcome::InfeasibleAtGrid { .. } => None,
        }
    }
}

/// Which dual quantity of the transversality criteria is minimized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSupForm {
    /// `||sum x_i*||` with `x_i*` in the cones.
    SumNorm,
    /// `sum d(x_i*, N_i)` with a zero sum.
    ConeDistance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSupReport {
    pub form: AlphaSupForm,
    /// Smallest value found over all candidate tuples (`inf` when no tuple is feasible).
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub exact: bool,
    pub tuples: usize,
    pub points: Option<Vec<Vec<f64>>>,
    pub duals: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Conversion {
    /// D1 to D2, or D3 to D4.
    D1ToD2,
    /// D2 to D1, or D4 to D3.
    D2ToD1,
    D5ToD6,
    D6ToD5,
}

/// Parameters shared by the separation-theorem searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationParams {
    pub eps: f64,
    pub lambda: f64,
    pub rho: f64,
    pub tau: f64,
    pub kind: NormalKind,
    pub norm: Norm,
    pub opts: SolveOptions,
    /// Directions per radius of the grid for the free point of the symmetric theorem.
    pub anchors: usize,
}

impl SeparationParams {
    pub fn new(eps: f64, lambda: f64, rho: f64, tau: f64, norm: Norm) -> Self {
        SeparationParams { eps, lambda, rho, tau, kind: NormalKind::Frechet, norm, opts: SolveOptions::default(), anchors: 16 }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [("epsilon", self.eps), ("lambda", self.lambda), ("rho", self.rho)] {
            if !(v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::precondition("tau must lie in ]0, 1["));
        }
        Ok(())
    }
}

pub(crate) fn require_common_point(sets: &[SetRep], x_bar: &[f64]) -> Result<()> {
    if sets.len() < 2 {
        return Err(Error::invalid("at least two sets are required"));
    }
    for s in sets {
        s.validate()?;
        crate::error::check_dim(s.dim(), x_bar.len())?;
        if !s.contains(x_bar, tol::FEAS * norm2(x_bar).max(1.0)) {
            return Err(Error::precondition("the reference point is not in every set"));
        }
    }
    Ok(())
}

fn program_for(form: DualForm, cones: Vec<ConeRep>, norm: Norm) -> DualProgram {
    let n = cones.len();
    let zero_sum = form.zero_sum();
    DualProgram {
        cones,
        norm,
        membership: vec![!zero_sum; n],
        dist_weights: vec![if zero_sum { 1.0 } else { 0.0 }; n],
        sum_weight: if zero_sum { None } else { Some(1.0) },
        normalization: form.normalization(),
        pairing: None,
    }
}

struct Best {
    value: f64,
    index: usize,
    solution: DualSolution,
}

/// Solves one program per candidate tuple; the minimum by value then tuple index.
fn best_over<F>(count: usize, build: F, opts: &SolveOptions) -> Result<Option<Best>>
where
    F: Fn(usize) -> Option<DualProgram> + Sync,
{
    let found = (0..count)
        .into_par_iter()
        .map(|k| -> Result<Option<Best>> {
            let Some(p) = build(k) else { return Ok(None) };
            Ok(p.solve(opts)?.map(|s| Best { value: s.value, index: k, solution: s }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(found.into_iter().flatten().min_by(|a, b| a.value.total_cmp(&b.value).then(a.index.cmp(&b.index))))
}

fn per_set_candidates(sets: &[SetRep], x_bar: &[f64], radii: &[f64], norm: Norm, kind: NormalKind, prune: bool) -> Result<Vec<Vec<ConeCandidate>>> {
    sets.iter().zip(radii).map(|(s, &r)| cone_candidates(s, x_bar, r, norm, kind, prune)).collect()
}

fn points_of(per_set: &[Vec<ConeCandidate>], t: &[usize]) -> Vec<Vec<f64>> {
    t.iter().enumerate().map(|(i, &k)| per_set[i][k].point.clone()).collect()
}

fn cones_of(per_set: &[Vec<ConeCandidate>], t: &[usize]) -> Vec<ConeRep> {
    t.iter().enumerate().map(|(i, &k)| per_set[i][k].cone.clone()).collect()
}

fn checked(bundle: CertBundle, sets: &[SetRep]) -> Result<SearchOutcome> {
    let check = bundle.verify(sets)?;
    if !check.valid {
        return Err(Error::numerical(format!("assembled certificate fails re-verification: {check:?}")));
    }
    Ok(SearchOutcome::Found { bundle: Box::new(bundle) })
}

/// Searches points `omega_i` of the sets within `eps` of `x_bar` and dual vectors
/// satisfying `form`. The threshold is `eps` for D1/D2 and `alpha` for D3 to D6.
#[allow(clippy::too_many_arguments)]
pub fn dual_certificate_search(
    sets: &[SetRep],
    x_bar: &[f64],
    eps: f64,
    alpha: f64,
    form: DualForm,
    kind: NormalKind,
    norm: Norm,
    opts: &SolveOptions,
) -> Result<SearchOutcome> {
    require_common_point(sets, x_bar)?;
    if matches!(form, DualForm::Separation | DualForm::SymmetricSeparation) {
        return Err(Error::invalid("separation forms have their own search"));
    }
    if !(eps > 0.0 && alpha > 0.0) {
        return Err(Error::invalid("epsilon and alpha must be positive"));
    }
    let threshold = if matches!(form, DualForm::D1 | DualForm::D2) { eps } else { alpha };
    let per_set = per_set_candidates(sets, x_bar, &vec![eps; sets.len()], norm, kind, true)?;
    let ts = tuples(&per_set, MAX_TUPLES);
    let best = best_over(ts.len(), |k| Some(program_for(form, cones_of(&per_set, &ts[k]), norm)), opts)?;
    match best {
        Some(b) if b.value <= threshold - tol::STRICT => {
            let bundle = CertBundle::assemble(sets, form, kind, norm, points_of(&per_set, &ts[b.index]), b.solution.vectors, threshold)?;
            checked(bundle, sets)
        }
        other => Ok(SearchOutcome::InfeasibleAtGrid { best_value: other.map(|b| b.value), tuples: ts.len() }),
    }
}

/// Infimum over `omega_i` within `eps` of `x_bar` of the dual quantity of `form`. The value
/// does not increase with `eps`; as `eps` shrinks it approaches the supremum of admissible
/// `alpha` in the corresponding criterion, so every value is a lower estimate of it.
pub fn dual_alpha_sup(
    sets: &[SetRep],
    x_bar: &[f64],
    eps: f64,
    form: AlphaSupForm,
    kind: NormalKind,
    norm: Norm,
    opts: &SolveOptions,
) -> Result<AlphaSupReport> {
    require_common_point(sets, x_bar)?;
    let dform = match form {
        AlphaSupForm::SumNorm => DualForm::D1,
        AlphaSupForm::ConeDistance => DualForm::D2,
    };
    let per_set = per_set_candidates(sets, x_bar, &vec![eps; sets.len()], norm, kind, true)?;
    let ts = tuples(&per_set, MAX_TUPLES);
    let all = (0..ts.len())
        .into_par_iter()
        .map(|k| program_for(dform, cones_of(&per_set, &ts[k]), norm).solve(opts).map(|s| s.map(|s| (k, s))))
        .collect::<Result<Vec<_>>>()?;
    let solved: Vec<(usize, DualSolution)> = all.into_iter().flatten().collect();
    let exact = norm.is_polyhedral() && ts.len() < MAX_TUPLES;
    let lower = solved.iter().map(|(_, s)| s.lower.max(0.0)).fold(f64::INFINITY, f64::min);
    let best = solved.iter().min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)));
    Ok(match best {
        Some((k, s)) => AlphaSupReport {
            form,
            value: s.value,
            lower: if exact { lower.min(s.value) } else { 0.0 },
            upper: s.value,
            exact,
            tuples: ts.len(),
            points: Some(points_of(&per_set, &ts[*k])),
            duals: Some(s.vectors.clone()),
        },
        None => AlphaSupReport {
            form,
            value: f64::INFINITY,
            lower: if exact { f64::INFINITY } else { 0.0 },
            upper: f64::INFINITY,
            exact,
            tuples: ts.len(),
            points: None,
            duals: None,
        },
    })
}

/// Converts a certificate between forms. With input threshold `eps < 1` the output
/// residual stays below `eps / (1 - eps)`, which becomes the output threshold.
pub fn certificate_convert(sets: &[SetRep], bundle: &CertBundle, conversion: Conversion) -> Result<CertBundle> {
    let (target, ok) = match (conversion, bundle.form) {
        (Conversion::D1ToD2, DualForm::D1) => (DualForm::D2, true),
        (Conversion::D1ToD2, DualForm::D3) => (DualForm::D4, true),
        (Conversion::D2ToD1, DualForm::D2) => (DualForm::D1, true),
        (Conversion::D2ToD1, DualForm::D4) => (DualForm::D3, true),
        (Conversion::D5ToD6, DualForm::D5) => (DualForm::D6, true),
        (Conversion::D6ToD5, DualForm::D6) => (DualForm::D5, true),
        (_, f) => (f, false),
    };
    if !ok {
        return Err(Error::invalid(format!("{conversion:?} does not apply to a {:?} certificate", bundle.form)));
    }
    let eps = bundle.threshold;
    if !(eps < 1.0) {
        return Err(Error::precondition("conversion needs a threshold below one"));
    }
    let check = bundle.verify(sets)?;
    if !check.valid {
        return Err(Error::precondition("input certificate does not verify"));
    }
    let eff = 0.5 * (check.residual + eps);
    let cones = cones_at(sets, &bundle.points, bundle.kind)?;
    let family = DualFamily::new(bundle.duals.clone(), cones.clone(), bundle.norm)?;
    let n = family.n();
    let dn = bundle.norm.dual();
    let vectors = match conversion {
        Conversion::D1ToD2 => normalize_then_rebalance(&family, eff)?.vectors,
        Conversion::D2ToD1 => normalize_then_snap(&family, eff)?.vectors,
        Conversion::D5ToD6 => {
            let mut v = bundle.duals.clone();
            v[n - 1] = scale(&sum_vectors(&v[..n - 1], family.dim()), -1.0);
            v
        }
        Conversion::D6ToD5 => {
            let mut v = asymmetric_snap(&family, eff)?.vectors;
            v[n - 1] = cones[n - 1].nearest(&v[n - 1], dn)?.0;
            v
        }
    };
    let out = CertBundle::assemble(sets, target, bundle.kind, bundle.norm, bundle.points.clone(), vectors, eps / (1.0 - eps))?;
    let check = out.verify(sets)?;
    if !check.valid {
        return Err(Error::numerical(format!("converted certificate fails re-verification: {check:?}")));
    }
    Ok(out)
}

fn open_ball_empty(sets: &[SetRep], center: &[f64], radius: f64, norm: Norm) -> Result<bool> {
    Ok(match nearest_in_intersection(center, sets, norm)? {
        None => true,
        Some((_, d)) => d >= radius - tol::FEAS * radius.max(1.0),
    })
}

/// Asymmetric separation: given shifts `a_1..a_{n-1}` pulling the first sets off the last
/// one, finds `omega_i` within `lambda` (first sets) or `rho` (last set) of `x_bar` and
/// zero-sum duals with head normalization, `lambda sum_{i<n} d_i + rho d_n < eps` and
/// `sum <x_i*, omega_n + a_i - omega_i> > tau max ||omega_n + a_i - omega_i||`.
pub fn separation_certificate_t51(sets: &[SetRep], x_bar: &[f64], shifts: &[Vec<f64>], p: &SeparationParams) -> Result<SearchOutcome> {
    require_common_point(sets, x_bar)?;
    p.validate()?;
    let n = sets.len();
    if shifts.len() != n - 1 {
        return Err(Error::invalid("one shift per set except the last is required"));
    }
    let mut moved: Vec<SetRep> = sets[..n - 1].iter().zip(shifts).map(|(s, a)| translate(s, a)).collect();
    moved.push(sets[n - 1].clone());
    if !intersection_is_empty(&moved)? {
        return Err(Error::precondition("the shifted sets still intersect"));
    }
    let max_shift = shifts.iter().map(|a| p.norm.norm(a)).fold(0.0, f64::max);
    if max_shift >= p.eps && max_shift >= d1_sets(&moved, p.norm)?.upper + p.eps {
        return Err(Error::precondition("shifts are too long for the distance between the shifted sets"));
    }
    let mut radii = vec![p.lambda; n];
    radii[n - 1] = p.rho;
    let per_set = per_set_candidates(sets, x_bar, &radii, p.norm, p.kind, false)?;
    let ts = tuples(&per_set, MAX_TUPLES);
    let primal = |t: &[usize]| -> Vec<Vec<f64>> {
        let om = points_of(&per_set, t);
        let mut w: Vec<Vec<f64>> = (0..n - 1).map(|i| sub(&add(&om[n - 1], &shifts[i]), &om[i])).collect();
        w.push(vec![0.0; x_bar.len()]);
        w
    };
    let mut weights = vec![p.lambda; n];
    weights[n - 1] = p.rho;
    let best = best_over(
        ts.len(),
        |k| {
            let w = primal(&ts[k]);
            let m = w.iter().map(|v| p.norm.norm(v)).fold(0.0, f64::max);
            (m > 0.0).then(|| DualProgram {
                cones: cones_of(&per_set, &ts[k]),
                norm: p.norm,
                membership: vec![false; n],
                dist_weights: weights.clone(),
                sum_weight: None,
                normalization: Normalization::Head,
                pairing: Some((w, (p.tau + tol::STRICT) * m)),
            })
        },
        &p.opts,
    )?;
    match best {
        Some(b) if b.value <= p.eps - tol::STRICT => {
            let mut bundle = CertBundle::assemble_weighted(
                sets,
                DualForm::Separation,
                p.kind,
                p.norm,
                points_of(&per_set, &ts[b.index]),
                b.solution.vectors,
                p.eps,
                Some(weights),
                None,
            )?;
            bundle.pairing = Some(PairingClause::evaluate(&bundle.duals, primal(&ts[b.index]), p.tau, p.norm));
            checked(bundle, sets)
        }
        other => Ok(SearchOutcome::InfeasibleAtGrid { best_value: other.map(|b| b.value), tuples: ts.len() }),
    }
}

/// Symmetric separation: given shifts `a_1..a_n` with the shifted sets not meeting in the
/// open `rho`-ball around `x_bar`, finds `omega_i` within `lambda` of `x_bar`, a point `x`
/// within `rho` of it and duals with full normalization,
/// `lambda sum d_i + rho ||sum x_i*|| < eps` and
/// `sum <x_i*, x + a_i - omega_i> > tau max ||x + a_i - omega_i||`.
pub fn separation_certificate_t57(sets: &[SetRep], x_bar: &[f64], shifts: &[Vec<f64>], p: &SeparationParams) -> Result<SearchOutcome> {
    require_common_point(sets, x_bar)?;
    p.validate()?;
    let n = sets.len();
    let d = x_bar.len();
    if shifts.len() != n {
        return Err(Error::invalid("one shift per set is required"));
    }
    let moved: Vec<SetRep> = sets.iter().zip(shifts).map(|(s, a)| translate(s, a)).collect();
    if !open_ball_empty(&moved, x_bar, p.rho, p.norm)? {
        return Err(Error::precondition("the shifted sets meet inside the rho-ball"));
    }
    let max_shift = shifts.iter().map(|a| p.norm.norm(a)).fold(0.0, f64::max);
    if max_shift >= p.eps {
        let ball = SetRep::Ball { center: x_bar.to_vec(), radius: p.rho, norm: p.norm };
        if max_shift >= localized_distance(&moved, &ball, p.norm)?.upper + p.eps {
            return Err(Error::precondition("shifts are too long for the localized distance"));
        }
    }
    let mut groups = vec![vec![x_bar.to_vec()]];
    let r0 = if p.rho.is_finite() { p.rho } else { 1.0 };
    for frac in [0.25, 0.5, 0.9] {
        groups.push(direction_grid(d, p.anchors.max(2)).iter().map(|u| add(x_bar, &scale(u, frac * r0 / p.norm.norm(u)))).collect());
    }
    let per_set = per_set_candidates(sets, x_bar, &vec![p.lambda; n], p.norm, p.kind, false)?;
    let ts = tuples(&per_set, MAX_TUPLES);
    let mut evaluated = 0;
    let mut best_value: Option<f64> = None;
    // anchor groups run in order of distance from x_bar; the first group that certifies wins
    for anchors in &groups {
        let primal = |k: usize| -> Vec<Vec<f64>> {
            let om = points_of(&per_set, &ts[k / anchors.len()]);
            let x = &anchors[k % anchors.len()];
            (0..n).map(|i| sub(&add(x, &shifts[i]), &om[i])).collect()
        };
        let count = ts.len() * anchors.len();
        evaluated += count;
        let best = best_over(
            count,
            |k| {
                let w = primal(k);
                let m = w.iter().map(|v| p.norm.norm(v)).fold(0.0, f64::max);
                (m > 0.0).then(|| DualProgram {
                    cones: cones_of(&per_set, &ts[k / anchors.len()]),
                    norm: p.norm,
                    membership: vec![false; n],
                    dist_weights: vec![p.lambda; n],
                    sum_weight: Some(p.rho),
                    normalization: Normalization::Full,
                    pairing: Some((w, (p.tau + tol::STRICT) * m)),
                })
            },
            &p.opts,
        )?;
        let Some(b) = best else { continue };
        best_value = Some(best_value.map_or(b.value, |v: f64| v.min(b.value)));
        if b.value <= p.eps - tol::STRICT {
            let mut bundle = CertBundle::assemble_weighted(
                sets,
                DualForm::SymmetricSeparation,
                p.kind,
                p.norm,
                points_of(&per_set, &ts[b.index / anchors.len()]),
                b.solution.vectors,
                p.eps,
                Some(vec![p.lambda; n]),
                Some(p.rho),
            )?;
            let mut clause = PairingClause::evaluate(&bundle.duals, primal(b.index), p.tau, p.norm);
            clause.anchor = Some(anchors[b.index % anchors.len()].clone());
            bundle.pairing = Some(clause);
            return checked(bundle, sets);
        }
    }
    Ok(SearchOutcome::InfeasibleAtGrid { best_value, tuples: evaluated })
}

/// Separation of disjoint sets from nearly closest points `omega_i`: points `omega'_i`
/// within `lambda` of `omega_i` and zero-sum duals with head normalization,
/// `sum d(x_i*, N_i(omega'_i)) < eps / lambda` and
/// `sum_{i<n} <x_i*, omega'_n - omega'_i> > tau max ||omega'_i - omega'_n||`.
pub fn zheng_ng_certificate(sets: &[SetRep], omegas: &[Vec<f64>], p: &SeparationParams) -> Result<SearchOutcome> {
    let n = sets.len();
    if omegas.len() != n || n < 2 {
        return Err(Error::invalid("one point per set and at least two sets are required"));
    }
    p.validate()?;
    for (s, w) in sets.iter().zip(omegas) {
        if !s.contains(w, tol::FEAS * norm2(w).max(1.0)) {
            return Err(Error::precondition("a base point lies outside its set"));
        }
    }
    if !intersection_is_empty(sets)? {
        return Err(Error::precondition("the sets intersect"));
    }
    if d1_points(omegas, p.norm)? >= d1_sets(sets, p.norm)?.upper + p.eps {
        return Err(Error::precondition("the base points are not nearly closest"));
    }
    let local: Vec<SetRep> = sets.iter().zip(omegas).map(|(s, w)| translate(s, w)).collect();
    let shifts: Vec<Vec<f64>> = omegas[..n - 1].iter().map(|w| sub(&omegas[n - 1], w)).collect();
    let origin = vec![0.0; omegas[0].len()];
    let inner = SeparationParams { rho: p.lambda, ..*p };
    let found = separation_certificate_t51(&local, &origin, &shifts, &inner)?;
    let Some(b) = found.bundle() else { return Ok(found) };
    let points: Vec<Vec<f64>> = b.points.iter().zip(omegas).map(|(q, w)| add(q, w)).collect();
    let mut bundle = CertBundle::assemble(sets, DualForm::D6, p.kind, p.norm, points.clone(), b.duals.clone(), p.eps / p.lambda)?;
    let mut w: Vec<Vec<f64>> = (0..n - 1).map(|i| sub(&points[n - 1], &points[i])).collect();
    w.push(origin);
    bundle.pairing = Some(PairingClause::evaluate(&bundle.duals, w, p.tau, p.norm));
    checked(bundle, sets)
}
