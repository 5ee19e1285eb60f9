//! Primal translation conditions: checking them, building translations that separate
//! sets, and converting between the metric and the translation forms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{d1_points, d1_sets};
use crate::error::{check_dim, Error, Result};
use crate::geometry::project::{direction_grid, nearest_in_intersection, project, sample_near, Method};
use crate::geometry::{normal_cone, ConeRep, DistanceReport, Norm, NormalKind, SetRep};
use crate::linalg::{add, dot, norm2, scale, sub};
use crate::tol;

/// The ten primal conditions. Odd/even pairs differ by global versus local emptiness,
/// P4-P6 and P8 translate only the first `n - 1` sets, P9 and P10 are metric forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PrimalKind {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
    P9,
    P10,
}

impl PrimalKind {
    fn asymmetric(self) -> bool {
        matches!(self, PrimalKind::P4 | PrimalKind::P5 | PrimalKind::P6 | PrimalKind::P8)
    }

    fn uses_points(self) -> bool {
        matches!(self, PrimalKind::P3 | PrimalKind::P6 | PrimalKind::P7 | PrimalKind::P8)
    }
}

/// Data for one primal condition. Unused fields are ignored by the checker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalInstance {
    pub kind: PrimalKind,
    pub sets: Vec<SetRep>,
    pub norm: Norm,
    pub x_bar: Vec<f64>,
    /// `n` vectors, or `n - 1` for the asymmetric conditions.
    pub shifts: Vec<Vec<f64>>,
    #[serde(default)]
    pub points: Option<Vec<Vec<f64>>>,
    /// Base point of P10.
    #[serde(default)]
    pub x: Option<Vec<f64>>,
    pub rho: f64,
    pub eps: f64,
    #[serde(default)]
    pub alpha: Option<f64>,
}

/// Outcome of [`check_primal_condition`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalCheck {
    pub kind: PrimalKind,
    pub holds: bool,
    pub emptiness_holds: bool,
    pub shift_ok: bool,
    pub points_ok: bool,
    pub max_shift: f64,
    pub shift_limit: f64,
    /// Distance from the ball center to the translated intersection (`inf` when empty).
    pub intersection_distance: f64,
    pub radius: f64,
    /// For P9/P10: `alpha d(x, cap)` and `max d(x, set_i - a_i)`.
    pub metric_lhs: Option<f64>,
    pub metric_rhs: Option<f64>,
    pub method: Method,
}

/// Certificate strength for emptiness decisions on these sets.
pub fn emptiness_method(sets: &[SetRep], norm: Norm) -> Method {
    if sets.iter().any(|s| s.finite_points().is_some()) {
        Method::Exhaustive
    } else if sets.iter().all(|s| s.is_polyhedral()) && norm.is_polyhedral() {
        Method::ExactLp
    } else {
        Method::Alternating
    }
}

/// `set - t`
pub fn translate(set: &SetRep, t: &[f64]) -> SetRep {
    set.shifted_by(&scale(t, -1.0))
}

/// `d(center, cap_i (set_i - a_i))`, `inf` when the intersection is empty.
pub fn shifted_intersection_distance(center: &[f64], sets: &[SetRep], shifts: &[Vec<f64>], norm: Norm) -> Result<f64> {
    let moved: Vec<SetRep> = sets.iter().zip(shifts).map(|(s, a)| translate(s, a)).collect();
    Ok(nearest_in_intersection(center, &moved, norm)?.map_or(f64::INFINITY, |(_, dd)| dd))
}

fn check_common(inst: &PrimalInstance) -> Result<usize> {
    let n = inst.sets.len();
    if n < 2 {
        return Err(Error::precondition("at least two sets are required"));
    }
    let d = inst.x_bar.len();
    for s in &inst.sets {
        check_dim(d, s.dim())?;
        s.validate()?;
    }
    let want = if inst.kind.asymmetric() { n - 1 } else { n };
    if inst.shifts.len() != want {
        return Err(Error::invalid(format!("{:?} needs {want} shift vectors", inst.kind)));
    }
    for a in &inst.shifts {
        check_dim(d, a.len())?;
    }
    Ok(n)
}

/// Checks one of the primal conditions exactly as written, with open balls.
pub fn check_primal_condition(inst: &PrimalInstance) -> Result<PrimalCheck> {
    let n = check_common(inst)?;
    let d = inst.x_bar.len();
    let norm = inst.norm;
    let kind = inst.kind;
    let mut shifts = inst.shifts.clone();
    if kind.asymmetric() {
        shifts.push(vec![0.0; d]);
    }
    let max_shift = inst.shifts.iter().map(|a| norm.norm(a)).fold(0.0, f64::max);
    let alpha = inst.alpha.unwrap_or(inst.eps);
    let shift_limit = match kind {
        PrimalKind::P1 | PrimalKind::P2 | PrimalKind::P4 | PrimalKind::P5 | PrimalKind::P9 | PrimalKind::P10 => inst.eps,
        PrimalKind::P3 | PrimalKind::P6 => inst.eps * inst.rho,
        PrimalKind::P7 | PrimalKind::P8 => alpha * inst.rho,
    };
    let shift_ok = max_shift < shift_limit;
    let mut points_ok = true;
    let mut sets = inst.sets.clone();
    if kind.uses_points() {
        let pts = inst.points.as_ref().ok_or_else(|| Error::invalid(format!("{kind:?} needs the points w_i")))?;
        if pts.len() != n {
            return Err(Error::invalid("one point per set is required"));
        }
        for (s, w) in inst.sets.iter().zip(pts) {
            check_dim(d, w.len())?;
            points_ok &= s.contains(w, tol::FEAS * 10.0) && norm.dist(w, &inst.x_bar) < inst.eps;
        }
        sets = inst.sets.iter().zip(pts).map(|(s, w)| translate(s, w)).collect();
    }
    let method = emptiness_method(&sets, norm);
    match kind {
        PrimalKind::P9 | PrimalKind::P10 => {
            let base = if kind == PrimalKind::P10 {
                let x = inst.x.clone().ok_or_else(|| Error::invalid("P10 needs the point x"))?;
                points_ok &= norm.dist(&x, &inst.x_bar) < inst.eps;
                x
            } else {
                inst.x_bar.clone()
            };
            let di = shifted_intersection_distance(&base, &sets, &shifts, norm)?;
            let mut rhs = 0.0_f64;
            for (s, a) in sets.iter().zip(&shifts) {
                let (_, dd) = project(&add(&base, a), s, norm)?.ok_or_else(|| Error::precondition("empty set"))?;
                rhs = rhs.max(dd);
            }
            let lhs = if di.is_infinite() { f64::INFINITY } else { alpha * di };
            let metric_ok = lhs > rhs;
            Ok(PrimalCheck {
                kind,
                holds: metric_ok && shift_ok && points_ok,
                emptiness_holds: metric_ok,
                shift_ok,
                points_ok,
                max_shift,
                shift_limit,
                intersection_distance: di,
                radius: f64::NAN,
                metric_lhs: Some(lhs),
                metric_rhs: Some(rhs),
                method,
            })
        }
        _ => {
            let (center, radius) = match kind {
                PrimalKind::P1 | PrimalKind::P4 => (inst.x_bar.clone(), f64::INFINITY),
                PrimalKind::P2 | PrimalKind::P5 => (inst.x_bar.clone(), inst.rho),
                _ => (vec![0.0; d], inst.rho),
            };
            let di = shifted_intersection_distance(&center, &sets, &shifts, norm)?;
            let empty = if radius.is_infinite() { di.is_infinite() } else { di >= radius - tol::FEAS * radius.max(1.0) };
            Ok(PrimalCheck {
                kind,
                holds: empty && shift_ok && points_ok,
                emptiness_holds: empty,
                shift_ok,
                points_ok,
                max_shift,
                shift_limit,
                intersection_distance: di,
                radius,
                metric_lhs: None,
                metric_rhs: None,
                method,
            })
        }
    }
}

/// Translations separating a collection from a near-closest tuple of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearClosestTranslation {
    /// `n - 1` translations of the first sets.
    pub shifts: Vec<Vec<f64>>,
    pub eps_prime: f64,
    /// `d1` of the points.
    pub m: f64,
    pub d1_sets: DistanceReport,
    pub max_shift: f64,
    /// `cap_{i<n} (set_i - w_i - a_i) ∩ (set_n - w_n)` is empty.
    pub separated: bool,
    pub method: Method,
}

/// Given points `w_i` of sets with empty intersection and `d1(w) < d1(sets) + eps`, shrinks
/// the differences `w_n - w_i` towards zero:
/// `a_i = (eps'/M)(w_n - w_i)` with `M = d1(w)` and `eps'` the midpoint of
/// `]M - d1(sets), min(eps, M)]` (or `eps' = M` when `d1(sets) = 0`).
pub fn translations_from_near_closest(
    sets: &[SetRep],
    points: &[Vec<f64>],
    eps: f64,
    norm: Norm,
) -> Result<NearClosestTranslation> {
    let n = sets.len();
    if n < 2 || points.len() != n {
        return Err(Error::invalid("one point per set and at least two sets are required"));
    }
    if !(eps > 0.0) {
        return Err(Error::precondition("epsilon must be positive"));
    }
    for (s, w) in sets.iter().zip(points) {
        if !s.contains(w, tol::FEAS * 10.0) {
            return Err(Error::precondition("every point must belong to its set"));
        }
    }
    let m = d1_points(points, norm)?;
    let dsets = d1_sets(sets, norm)?;
    if nearest_in_intersection(&points[0], sets, norm)?.is_some() {
        return Err(Error::precondition("the sets have a common point"));
    }
    if !(m < dsets.lower + eps) {
        return Err(Error::precondition(format!(
            "d1 of the points ({m}) is not below d1 of the sets ({}) plus epsilon",
            dsets.lower
        )));
    }
    if !(m > 0.0) {
        return Err(Error::numerical("d1 of the points vanishes although the sets are disjoint"));
    }
    let eps_prime = if dsets.upper <= tol::OBJ {
        m
    } else {
        let lo = (m - dsets.lower).max(0.0);
        let hi = eps.min(m);
        0.5 * (lo + hi)
    };
    let c = eps_prime / m;
    let wn = &points[n - 1];
    let shifts: Vec<Vec<f64>> = points[..n - 1].iter().map(|w| scale(&sub(wn, w), c)).collect();
    let max_shift = shifts.iter().map(|a| norm.norm(a)).fold(0.0, f64::max);
    let moved: Vec<SetRep> = (0..n)
        .map(|i| {
            let t = if i < n - 1 { add(&points[i], &shifts[i]) } else { wn.clone() };
            translate(&sets[i], &t)
        })
        .collect();
    let separated = nearest_in_intersection(&vec![0.0; wn.len()], &moved, norm)?.is_none();
    let method = emptiness_method(&moved, norm);
    Ok(NearClosestTranslation { shifts, eps_prime, m, d1_sets: dsets, max_shift, separated, method })
}

/// Metric form obtained from a local emptiness certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricWitness {
    pub alpha: f64,
    pub p2: PrimalCheck,
    pub p9: PrimalCheck,
}

/// From (P2) with radius `rho` to (P9) with `alpha = eps / rho`.
pub fn p2_to_p9(sets: &[SetRep], x_bar: &[f64], shifts: &[Vec<f64>], eps: f64, rho: f64, norm: Norm) -> Result<MetricWitness> {
    let base = PrimalInstance {
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
    };
    check_point_in_all(sets, x_bar)?;
    let p2 = check_primal_condition(&base)?;
    if !p2.holds {
        return Err(Error::precondition("(P2) does not hold for the given translations"));
    }
    let alpha = eps / rho;
    let p9 = check_primal_condition(&PrimalInstance { kind: PrimalKind::P9, alpha: Some(alpha), ..base })?;
    if !p9.holds {
        return Err(Error::numerical("(P9) failed although (P2) holds"));
    }
    Ok(MetricWitness { alpha, p2, p9 })
}

fn check_point_in_all(sets: &[SetRep], x: &[f64]) -> Result<()> {
    if sets.iter().all(|s| s.contains(x, tol::FEAS * 10.0)) {
        Ok(())
    } else {
        Err(Error::precondition("the reference point must lie in every set"))
    }
}

/// Local translation form rebuilt from the metric form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalTranslation {
    pub rho_prime: f64,
    pub points: Vec<Vec<f64>>,
    pub shifts: Vec<Vec<f64>>,
    pub p7: PrimalCheck,
    /// Largest `||w_i - x_bar||`; the construction only guarantees `< 2 eps`.
    pub max_point_distance: f64,
    pub points_within_eps: bool,
}

/// From (P9) with `alpha = eps / rho` to (P7) at a radius `rho' < rho`: picks `rho'` between
/// `max d(x_bar, set_i - a_i) / alpha` and `min(d(x_bar, cap), rho)`, takes `w_i` nearest to
/// `x_bar + a_i` and `a_i' = a_i + x_bar - w_i`.
pub fn p9_to_p7(sets: &[SetRep], x_bar: &[f64], shifts: &[Vec<f64>], eps: f64, rho: f64, norm: Norm) -> Result<LocalTranslation> {
    check_point_in_all(sets, x_bar)?;
    let alpha = eps / rho;
    let p9 = check_primal_condition(&PrimalInstance {
        kind: PrimalKind::P9,
        sets: sets.to_vec(),
        norm,
        x_bar: x_bar.to_vec(),
        shifts: shifts.to_vec(),
        points: None,
        x: None,
        rho,
        eps,
        alpha: Some(alpha),
    })?;
    if !p9.holds {
        return Err(Error::precondition("(P9) does not hold for the given translations"));
    }
    let rhs = p9.metric_rhs.unwrap_or(0.0);
    let lo = rhs / alpha;
    let hi = p9.intersection_distance.min(rho);
    if !(lo < hi) {
        return Err(Error::numerical("empty interval for the new radius"));
    }
    let rho_prime = 0.5 * (lo + hi);
    let mut points = Vec::with_capacity(sets.len());
    let mut new_shifts = Vec::with_capacity(sets.len());
    for (s, a) in sets.iter().zip(shifts) {
        let target = add(x_bar, a);
        let (w, _) = project(&target, s, norm)?.ok_or_else(|| Error::precondition("empty set"))?;
        new_shifts.push(sub(&target, &w));
        points.push(w);
    }
    let max_point_distance = points.iter().map(|w| norm.dist(w, x_bar)).fold(0.0, f64::max);
    let p7 = check_primal_condition(&PrimalInstance {
        kind: PrimalKind::P7,
        sets: sets.to_vec(),
        norm,
        x_bar: x_bar.to_vec(),
        shifts: new_shifts.clone(),
        points: Some(points.clone()),
        x: None,
        rho: rho_prime,
        // the point condition is reported separately
        eps: f64::INFINITY,
        alpha: Some(alpha),
    })?;
    if !p7.holds {
        return Err(Error::numerical("(P7) failed for the rebuilt translations"));
    }
    Ok(LocalTranslation {
        rho_prime,
        points,
        shifts: new_shifts,
        p7,
        max_point_distance,
        points_within_eps: max_point_distance < eps,
    })
}

/// Bracket for the largest shift size that keeps the sets intersecting near `x_bar`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    /// Largest tested size for which no separating shift was found.
    pub lower: f64,
    /// Smallest size with an exhibited separating shift (`inf` if none).
    pub upper: f64,
    pub witness: Option<Vec<Vec<f64>>>,
    pub samples: usize,
}

/// Estimates `sup { r : cap (set_i - a_i) ∩ B_rho(x_bar) != ∅ for all ||a_i|| < r }` by
/// bisection with an adversarial search over grid and random directions.
pub fn theta_rho(sets: &[SetRep], x_bar: &[f64], rho: f64, norm: Norm, budget: usize, seed: u64) -> Result<ThetaReport> {
    let n = sets.len();
    if n < 2 {
        return Err(Error::precondition("at least two sets are required"));
    }
    check_point_in_all(sets, x_bar)?;
    if sets.iter().all(|s| s.is_whole_space()) {
        return Ok(ThetaReport { lower: f64::INFINITY, upper: f64::INFINITY, witness: None, samples: 0 });
    }
    let d = x_bar.len();
    let dirs: Vec<Vec<f64>> = direction_grid(d, 16).into_iter().map(|u| scale(&u, 1.0 / norm.norm(&u))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut samples = 0usize;
    let mut candidates: Vec<Vec<Vec<f64>>> = Vec::new();
    // structured: every set moves along a grid direction, sets paired with distinct directions
    let combos = dirs.len().pow(n.min(3) as u32);
    for k in 0..combos.min(budget) {
        let mut t = k;
        let mut tuple = Vec::with_capacity(n);
        for _ in 0..n {
            tuple.push(dirs[t % dirs.len()].clone());
            t /= dirs.len();
        }
        candidates.push(tuple);
    }
    while candidates.len() < budget {
        let tuple = (0..n)
            .map(|_| {
                let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let nv = norm.norm(&v).max(1e-12);
                scale(&v, 1.0 / nv)
            })
            .collect();
        candidates.push(tuple);
    }
    let separates = |r: f64, samples: &mut usize| -> Result<Option<Vec<Vec<f64>>>> {
        let rr = r * (1.0 - 1e-9);
        for tuple in &candidates {
            *samples += 1;
            let shifts: Vec<Vec<f64>> = tuple.iter().map(|u| scale(u, rr)).collect();
            let di = shifted_intersection_distance(x_bar, sets, &shifts, norm)?;
            let empty = if rho.is_infinite() { di.is_infinite() } else { di >= rho };
            if empty {
                return Ok(Some(shifts));
            }
        }
        Ok(None)
    };
    let scale_ref = if rho.is_finite() { rho } else { 1.0 };
    let mut lo = 0.0_f64;
    let mut hi = scale_ref;
    let mut witness = separates(hi, &mut samples)?;
    let mut grow = 0;
    while witness.is_none() && grow < 20 {
        lo = hi;
        hi *= 2.0;
        witness = separates(hi, &mut samples)?;
        grow += 1;
    }
    if witness.is_none() {
        return Ok(ThetaReport { lower: lo, upper: f64::INFINITY, witness: None, samples });
    }
    for _ in 0..40 {
        if hi - lo <= 1e-9 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match separates(mid, &mut samples)? {
            Some(w) => {
                hi = mid;
                witness = Some(w);
            }
            None => lo = mid,
        }
    }
    Ok(ThetaReport { lower: lo, upper: hi, witness, samples })
}

/// Translations built from a dual certificate, with every clause re-checked.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reversal {
    pub shifts: Vec<Vec<f64>>,
    pub delta: f64,
    pub rho: f64,
    pub eps_prime: f64,
    pub eps1: f64,
    pub eps2: f64,
    pub halvings: usize,
    /// `sum <x_i*, a_i>` and the required bound `tau eps rho`.
    pub pairing: f64,
    pub pairing_bound: f64,
    pub pairing_holds: bool,
    pub max_shift: f64,
    pub shift_ok: bool,
    /// Emptiness with the open `rho`-ball.
    pub separated: bool,
    /// Emptiness with the closed `rho`-ball.
    pub closed_ball_separated: bool,
    pub method: Method,
}

impl Reversal {
    pub fn holds(&self) -> bool {
        self.pairing_holds && self.shift_ok && self.separated
    }
}

const MAX_HALVINGS: usize = 40;

fn reversal_guard(sets: &[SetRep], points: &[Vec<f64>], duals: &[Vec<f64>], eps: f64, tau: f64) -> Result<usize> {
    let n = sets.len();
    if n < 2 || points.len() != n || duals.len() != n {
        return Err(Error::invalid("one point and one dual vector per set, at least two sets"));
    }
    if !(eps > 0.0) {
        return Err(Error::invalid("epsilon must be positive"));
    }
    if !(tau > 0.0 && tau < 1.0) {
        return Err(Error::precondition("tau must lie in ]0, 1["));
    }
    for (s, w) in sets.iter().zip(points) {
        check_dim(s.dim(), w.len())?;
        if !s.contains(w, tol::FEAS * 10.0 * norm2(w).max(1.0)) {
            return Err(Error::precondition("a base point lies outside its set"));
        }
    }
    Ok(n)
}

fn head_and_sum(duals: &[Vec<f64>], norm: Norm) -> Result<()> {
    let n = duals.len();
    let dn = norm.dual();
    let head: f64 = duals[..n - 1].iter().map(|x| dn.norm(x)).sum();
    if (head - 1.0).abs() > 1e-9 {
        return Err(Error::precondition("the first n - 1 dual vectors must have norms summing to one"));
    }
    let d = duals[0].len();
    let mut sum = vec![0.0; d];
    for x in duals {
        sum = add(&sum, x);
    }
    if dn.norm(&sum) > 1e-9 {
        return Err(Error::precondition("the dual vectors must sum to zero"));
    }
    Ok(())
}

/// Largest `delta` in `1, 1/2, 1/4, ...` such that `<y_i, w - w_i> <= c_i ||w - w_i||` on
/// sampled points `w` of `set_i` within `r_i delta` of `w_i`.
fn frechet_radius(sets: &[SetRep], points: &[Vec<f64>], ys: &[Vec<f64>], slopes: &[f64], reach: &[f64], norm: Norm) -> Result<(f64, usize)> {
    let mut delta = 1.0;
    for k in 0..=MAX_HALVINGS {
        let mut ok = true;
        'sets: for i in 0..sets.len() {
            for w in sample_near(&sets[i], &points[i], reach[i] * delta, norm, 64)? {
                let v = sub(&w, &points[i]);
                if dot(&ys[i], &v) > slopes[i] * norm.norm(&v) + 1e-12 {
                    ok = false;
                    break 'sets;
                }
            }
        }
        if ok {
            return Ok((delta, k));
        }
        delta *= 0.5;
    }
    Err(Error::numerical("no radius certifies the normal cone inequalities within the halving budget"))
}

fn aligned_shifts(duals: &[Vec<f64>], scale_len: f64, norm: Norm) -> Vec<Vec<f64>> {
    duals.iter().map(|x| scale(&norm.aligned(x), scale_len)).collect()
}

/// Emptiness of `cap_i (sets_i - a_i) ∩ rB` with the open and the closed ball.
fn ball_emptiness(moved: &[SetRep], r: f64, norm: Norm) -> Result<(bool, bool)> {
    let d = moved[0].dim();
    let origin = vec![0.0; d];
    let di = nearest_in_intersection(&origin, moved, norm)?.map_or(f64::INFINITY, |(_, dd)| dd);
    Ok((di >= r - tol::FEAS * r.max(1.0), di > r + tol::FEAS * r.max(1.0)))
}

/// From points `w_i` and duals with `x_i*` in the Frechet normal cones for `i < n`,
/// `d(x_n*, N_n) < eps`, zero sum and head normalization, builds `a_1..a_{n-1}` with
/// `||a_i|| < eps rho`, `sum <x_i*, a_i> > tau eps rho` and
/// `cap_{i<n}(set_i - w_i - a_i) ∩ (set_n - w_n) ∩ rho B = ∅`. `rho` defaults to half the
/// certified radius.
pub fn dual_to_primal_translations(
    sets: &[SetRep],
    points: &[Vec<f64>],
    duals: &[Vec<f64>],
    eps: f64,
    rho: Option<f64>,
    tau: f64,
    norm: Norm,
) -> Result<Reversal> {
    let n = reversal_guard(sets, points, duals, eps, tau)?;
    head_and_sum(duals, norm)?;
    let dn = norm.dual();
    let cones: Vec<ConeRep> = sets.iter().zip(points).map(|(s, w)| normal_cone(s, w, NormalKind::Frechet)).collect::<Result<_>>()?;
    for i in 0..n - 1 {
        if cones[i].dist(&duals[i], dn)? > 1e-9 {
            return Err(Error::precondition("a head dual vector is outside its normal cone"));
        }
    }
    let (y, e0) = cones[n - 1].nearest(&duals[n - 1], dn)?;
    if !(e0 < eps) {
        return Err(Error::precondition("the last dual vector is not within epsilon of its normal cone"));
    }
    let m = (n - 1) as f64;
    let eps_prime = 0.5 * (e0 + eps);
    let eps2 = ((eps - eps_prime) / (2.0 * m)).min(eps * (1.0 - tau) / (2.0 * m));
    let eps1 = (eps - eps_prime - m * eps2) / (2.0 * n as f64);
    let mut ys: Vec<Vec<f64>> = duals[..n - 1].to_vec();
    ys.push(y);
    let mut slopes = vec![eps1 / (eps + 1.0); n];
    slopes[n - 1] = eps1;
    let mut reach = vec![eps + 1.0; n];
    reach[n - 1] = 1.0;
    let (delta, halvings) = frechet_radius(sets, points, &ys, &slopes, &reach, norm)?;
    let rho = rho.unwrap_or(0.5 * delta);
    if !(rho > 0.0 && rho < delta) {
        return Err(Error::precondition(format!("rho must lie in ]0, {delta}[")));
    }
    let eta = eps2 / (2.0 * eps);
    let shifts = aligned_shifts(&duals[..n - 1], eps * rho * (1.0 - eta), norm);
    let pairing: f64 = duals.iter().zip(&shifts).map(|(x, a)| dot(x, a)).sum();
    let max_shift = shifts.iter().map(|a| norm.norm(a)).fold(0.0, f64::max);
    let mut moved: Vec<SetRep> = (0..n - 1).map(|i| translate(&sets[i], &add(&points[i], &shifts[i]))).collect();
    moved.push(translate(&sets[n - 1], &points[n - 1]));
    let (separated, closed_ball_separated) = ball_emptiness(&moved, rho, norm)?;
    Ok(Reversal {
        pairing_bound: tau * eps * rho,
        pairing_holds: pairing > tau * eps * rho,
        shift_ok: max_shift < eps * rho,
        method: emptiness_method(&moved, norm),
        shifts,
        delta,
        rho,
        eps_prime,
        eps1,
        eps2,
        halvings,
        pairing,
        max_shift,
        separated,
        closed_ball_separated,
    })
}

/// Symmetric variant: duals in the Frechet normal cones with `||sum x_i*|| < eps` and
/// `sum ||x_i*|| = 1` give `a_1..a_n` with `||a_i|| < eps rho`,
/// `sum <x_i*, a_i> > tau eps rho` and `cap_i (set_i - w_i - a_i) ∩ rho B = ∅`. The whole
/// space is appended as an extra set carrying `-sum x_i*`.
pub fn dual_to_primal_symmetric(
    sets: &[SetRep],
    points: &[Vec<f64>],
    duals: &[Vec<f64>],
    eps: f64,
    rho: Option<f64>,
    tau: f64,
    norm: Norm,
) -> Result<Reversal> {
    reversal_guard(sets, points, duals, eps, tau)?;
    let d = points[0].len();
    let mut all_sets = sets.to_vec();
    all_sets.push(SetRep::whole(d));
    let mut all_points = points.to_vec();
    all_points.push(vec![0.0; d]);
    let mut all_duals = duals.to_vec();
    let mut sum = vec![0.0; d];
    for x in duals {
        sum = add(&sum, x);
    }
    all_duals.push(scale(&sum, -1.0));
    dual_to_primal_translations(&all_sets, &all_points, &all_duals, eps, rho, tau, norm)
}

/// From points `w_i` and duals satisfying the asymmetric zero-sum form
/// (`sum d(x_i*, N_i) < eps`, head normalization) builds `a_1..a_{n-1}` with
/// `||a_i|| < eps rho`, `sum <x_i*, a_i> > tau eps rho` and
/// `cap_{i<n}((set_i - w_i) ∩ rho B - a_i) ∩ (set_n - w_n) ∩ rho B = ∅`.
pub fn localized_reversal(
    sets: &[SetRep],
    points: &[Vec<f64>],
    duals: &[Vec<f64>],
    eps: f64,
    rho: Option<f64>,
    tau: f64,
    norm: Norm,
) -> Result<Reversal> {
    let n = reversal_guard(sets, points, duals, eps, tau)?;
    head_and_sum(duals, norm)?;
    let dn = norm.dual();
    let mut ys = Vec::with_capacity(n);
    let mut e0 = 0.0;
    for (i, (s, w)) in sets.iter().zip(points).enumerate() {
        let (y, e) = normal_cone(s, w, NormalKind::Frechet)?.nearest(&duals[i], dn)?;
        ys.push(y);
        e0 += e;
    }
    if !(e0 < eps) {
        return Err(Error::precondition("the dual vectors are not within epsilon of the normal cones"));
    }
    let eps_prime = 0.5 * (e0 + eps);
    let eps1 = (eps - eps_prime) / 3.0;
    let eps2 = ((eps - eps_prime) / 3.0).min((1.0 - tau) * eps / 2.0);
    let slopes = vec![eps1 / n as f64; n];
    let (delta, halvings) = frechet_radius(sets, points, &ys, &slopes, &vec![1.0; n], norm)?;
    let rho = rho.unwrap_or(0.5 * delta);
    if !(rho > 0.0 && rho < delta) {
        return Err(Error::precondition(format!("rho must lie in ]0, {delta}[")));
    }
    let eta = eps2 / (2.0 * eps * (n - 1) as f64);
    let shifts = aligned_shifts(&duals[..n - 1], eps * rho * (1.0 - eta), norm);
    let pairing: f64 = duals.iter().zip(&shifts).map(|(x, a)| dot(x, a)).sum();
    let max_shift = shifts.iter().map(|a| norm.norm(a)).fold(0.0, f64::max);
    let d = points[0].len();
    let emptiness = |r: f64| -> Result<bool> {
        let mut parts = Vec::with_capacity(2 * n);
        for i in 0..n - 1 {
            parts.push(translate(&sets[i], &add(&points[i], &shifts[i])));
            parts.push(SetRep::Ball { center: scale(&shifts[i], -1.0), radius: r, norm });
        }
        parts.push(translate(&sets[n - 1], &points[n - 1]));
        parts.push(SetRep::Ball { center: vec![0.0; d], radius: r, norm });
        Ok(nearest_in_intersection(&vec![0.0; d], &parts, norm)?.is_none())
    };
    let separated = emptiness(rho * (1.0 - tol::FEAS))?;
    let closed_ball_separated = emptiness(rho)?;
    Ok(Reversal {
        pairing_bound: tau * eps * rho,
        pairing_holds: pairing > tau * eps * rho,
        shift_ok: max_shift < eps * rho,
        method: emptiness_method(sets, norm),
        shifts,
        delta,
        rho,
        eps_prime,
        eps1,
        eps2,
        halvings,
        pairing,
        max_shift,
        separated,
        closed_ball_separated,
    })
}

/// Uniform random point of the `norm`-ball of radius `r` (rejection in the bounding box).
pub fn random_in_ball(rng: &mut impl Rng, center: &[f64], r: f64, norm: Norm) -> Vec<f64> {
    loop {
        let v: Vec<f64> = center.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        if norm.norm(&v) < 1.0 {
            return add(center, &scale(&v, r));
        }
    }
}

/// Largest Euclidean length among vectors.
pub fn max_euclid(vs: &[Vec<f64>]) -> f64 {
    vs.iter().map(|v| norm2(v)).fold(0.0, f64::max)
}
