//! Seeded instance generators shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use transversal::geometry::{ConeRep, Norm, SetRep};
use transversal::perturbation::DualFamily;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn any_norm(r: &mut ChaCha8Rng) -> Norm {
    match r.gen_range(0..3) {
        0 => Norm::Euclidean,
        1 => Norm::Maximum,
        _ => Norm::P(1.0),
    }
}

pub fn gauss(r: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u: f64 = r.gen_range(1e-12..1.0);
    let v: f64 = r.gen_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

pub fn unit(r: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gauss(r)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn sum(vs: &[Vec<f64>], d: usize) -> Vec<f64> {
    vs.iter().fold(vec![0.0; d], |acc, v| add(&acc, v))
}

/// Pointed cone spanned by up to `max_gens` generators near a random axis.
pub fn pointed_cone(r: &mut ChaCha8Rng, d: usize, max_gens: usize) -> ConeRep {
    let axis = unit(r, d);
    let k = r.gen_range(1..=max_gens);
    let generators = (0..k)
        .map(|_| {
            let g = add(&axis, &scale(&unit(r, d), r.gen_range(0.0..0.8)));
            let n = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            scale(&g, 1.0 / n)
        })
        .collect();
    ConeRep { dim: d, generators, subspace: false }
}

pub fn in_cone(r: &mut ChaCha8Rng, k: &ConeRep) -> Vec<f64> {
    let mut v = vec![0.0; k.dim];
    for g in &k.generators {
        v = add(&v, &scale(g, r.gen_range(0.05..1.0)));
    }
    v
}

pub fn with_generator(k: &ConeRep, g: Vec<f64>) -> ConeRep {
    let mut out = k.clone();
    out.generators.push(g);
    out
}

/// In-cone vectors `z_1..z_n` summing to zero exactly: the last cone is extended by the
/// negated sum of the others.
pub fn zero_sum_in_cones(r: &mut ChaCha8Rng, n: usize, d: usize) -> (Vec<Vec<f64>>, Vec<ConeRep>) {
    let mut cones: Vec<ConeRep> = (0..n).map(|_| pointed_cone(r, d, 6)).collect();
    let mut zs: Vec<Vec<f64>> = cones[..n - 1].iter().map(|k| in_cone(r, k)).collect();
    let last = scale(&sum(&zs, d), -1.0);
    let mut kn = cones[n - 1].clone();
    kn.generators.truncate(5);
    cones[n - 1] = with_generator(&kn, last.clone());
    zs.push(last);
    (zs, cones)
}

pub fn normalize(vs: &[Vec<f64>], norm: Norm, head_only: bool) -> Vec<Vec<f64>> {
    let dn = norm.dual();
    let n = vs.len();
    let upto = if head_only { n - 1 } else { n };
    let t: f64 = vs[..upto].iter().map(|v| dn.norm(v)).sum();
    vs.iter().map(|v| scale(v, 1.0 / t)).collect()
}

pub fn family(vs: Vec<Vec<f64>>, cones: Vec<ConeRep>, norm: Norm) -> DualFamily {
    DualFamily::new(vs, cones, norm).expect("valid family")
}

/// `{x : <u, x - p> <= 0}`
pub fn halfspace(u: &[f64], p: &[f64]) -> SetRep {
    SetRep::HPolyhedron { a: vec![u.to_vec()], b: vec![dot(u, p)] }
}

pub fn boxed(lo: &[f64], hi: &[f64]) -> SetRep {
    let d = lo.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..d {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        a.push(e.clone());
        b.push(hi[j]);
        a.push(scale(&e, -1.0));
        b.push(-lo[j]);
    }
    SetRep::HPolyhedron { a, b }
}

pub fn cloud(r: &mut ChaCha8Rng, center: &[f64], spread: f64, count: usize) -> SetRep {
    let points = (0..count).map(|_| center.iter().map(|c| c + r.gen_range(-spread..spread)).collect()).collect();
    SetRep::PointCloud { points }
}

/// Norm for a ball that stays projectable under `space`: curved balls need the
/// Euclidean space norm.
pub fn ball_norm(r: &mut ChaCha8Rng, space: Norm) -> Norm {
    if space.is_euclidean() {
        any_norm(r)
    } else if r.gen_bool(0.5) {
        Norm::Maximum
    } else {
        Norm::P(1.0)
    }
}

/// Random convex set of one of the supported classes, in `[-2, 2]^d`.
pub fn convex_set(r: &mut ChaCha8Rng, d: usize) -> SetRep {
    convex_set_for(r, d, Norm::Euclidean)
}

/// As [`convex_set`], restricted to sets supported under the space norm `space`.
pub fn convex_set_for(r: &mut ChaCha8Rng, d: usize, space: Norm) -> SetRep {
    let c: Vec<f64> = (0..d).map(|_| r.gen_range(-1.5..1.5)).collect();
    match r.gen_range(0..3) {
        0 => {
            let h: Vec<f64> = (0..d).map(|_| r.gen_range(0.1..0.6)).collect();
            boxed(&sub(&c, &h), &add(&c, &h))
        }
        1 => SetRep::Ball { center: c, radius: r.gen_range(0.1..0.6), norm: ball_norm(r, space) },
        _ => {
            // simplex-like polytope around c
            let mut a = Vec::new();
            let mut b = Vec::new();
            for _ in 0..(d + 2) {
                let u = unit(r, d);
                b.push(dot(&u, &c) + r.gen_range(0.2..0.6));
                a.push(u);
            }
            let bb = boxed(&scale(&c, 1.0).iter().map(|x| x - 0.7).collect::<Vec<_>>(), &c.iter().map(|x| x + 0.7).collect::<Vec<_>>());
            if let SetRep::HPolyhedron { a: a2, b: b2 } = bb {
                a.extend(a2);
                b.extend(b2);
            }
            SetRep::HPolyhedron { a, b }
        }
    }
}
