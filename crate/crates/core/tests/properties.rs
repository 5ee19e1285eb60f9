mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use transversal::distance::{d1_sets, d2_sets, d3_sets};
use transversal::ekeland::nonintersect_localize;
use transversal::geometry::{dist_point_set, project, Norm, NormalKind, SetRep};
use transversal::oracle::grid_distance_oracle;
use transversal::perturbation::{normalize_then_rebalance, normalize_then_snap, rebalance_to_zero_sum};
use transversal::stationarity::{dual_alpha_sup, dual_certificate_search, AlphaSupForm, DualForm, SolveOptions};
use transversal::translation::{dual_to_primal_translations, theta_rho};

fn norm_of(k: u8) -> Norm {
    match k % 4 {
        0 => Norm::Euclidean,
        1 => Norm::Maximum,
        2 => Norm::P(1.0),
        _ => Norm::P(3.0),
    }
}

fn vec_of(d: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn norm_is_definite_and_homogeneous(k in 0u8..4, v in vec_of(4), a in -5.0..5.0f64) {
        let n = norm_of(k);
        prop_assert_eq!(n.norm(&v) == 0.0, v.iter().all(|x| *x == 0.0));
        prop_assert_eq!(n.norm(&[0.0; 4]), 0.0);
        let sv: Vec<f64> = v.iter().map(|x| a * x).collect();
        prop_assert!((n.norm(&sv) - a.abs() * n.norm(&v)).abs() <= 1e-9 * (1.0 + n.norm(&v)));
    }

    #[test]
    fn holder_inequality(k in 0u8..4, z in vec_of(5), v in vec_of(5)) {
        let n = norm_of(k);
        let pair: f64 = z.iter().zip(&v).map(|(a, b)| a * b).sum();
        prop_assert!(pair.abs() <= n.dual_norm(&z) * n.norm(&v) * (1.0 + 1e-12) + 1e-12);
        // the aligned vector attains the bound
        let u = n.aligned(&z);
        let at: f64 = z.iter().zip(&u).map(|(a, b)| a * b).sum();
        prop_assert!((at - n.dual_norm(&z)).abs() <= 1e-9 * (1.0 + n.dual_norm(&z)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), k in 0u8..3) {
        let mut r = rng(seed);
        let norm = norm_of(k);
        let d = r.gen_range(1..=3);
        let set = convex_set_for(&mut r, d, norm);
        let x: Vec<f64> = (0..d).map(|_| r.gen_range(-3.0..3.0)).collect();
        let (p, _) = project(&x, &set, norm).unwrap().unwrap();
        let (q, dq) = project(&p, &set, norm).unwrap().unwrap();
        prop_assert!(dq <= 1e-8, "second projection moved by {}", dq);
        prop_assert!(norm.dist(&p, &q) <= 1e-8);
    }

    #[test]
    fn positivity_agrees_across_distances(seed in any::<u64>(), k in 0u8..3) {
        let mut r = rng(seed);
        let norm = norm_of(k);
        let d = r.gen_range(1..=2);
        let sets: Vec<SetRep> = (0..3).map(|_| if r.gen_bool(0.3) { cloud(&mut r, &vec![0.0; d], 1.0, 3) } else { convex_set_for(&mut r, d, norm) }).collect();
        let tol = 1e-6;
        let p1 = d1_sets(&sets, norm).unwrap().value > tol;
        prop_assert_eq!(p1, d2_sets(&sets, norm).unwrap().value > tol);
        prop_assert_eq!(p1, d3_sets(&sets, norm).unwrap().value > tol);
        let rotated = vec![sets[1].clone(), sets[2].clone(), sets[0].clone()];
        prop_assert_eq!(p1, d1_sets(&rotated, norm).unwrap().value > tol);
        let mut ext = sets.clone();
        ext.push(SetRep::whole(d));
        prop_assert!((d1_sets(&ext, norm).unwrap().value - d2_sets(&sets, norm).unwrap().value).abs() <= 1e-8);
    }

    #[test]
    fn rebalancing_is_exactly_zero_sum(seed in any::<u64>()) {
        let mut r = rng(seed);
        let norm = any_norm(&mut r);
        let (n, d) = (r.gen_range(2..=5), r.gen_range(2..=6));
        let (zs, cones) = zero_sum_in_cones(&mut r, n, d);
        let noisy: Vec<Vec<f64>> = zs.iter().map(|z| add(z, &scale(&unit(&mut r, z.len()), 1e-3))).collect();
        let f = family(normalize(&noisy, norm, false), cones, norm);
        let dsum: f64 = f.cone_distances().unwrap().iter().sum();
        let (lambda, rho) = (0.5, 2.0);
        let eps = (lambda * dsum + rho * f.sum_norm()).max(1e-6) * 1.5;
        prop_assume!(eps + lambda <= rho);
        let p = rebalance_to_zero_sum(&f, eps, lambda, rho).unwrap();
        prop_assert!(p.sum_norm <= 1e-12);
    }

    #[test]
    fn membership_to_zero_sum_and_back(seed in any::<u64>()) {
        let mut r = rng(seed);
        let norm = any_norm(&mut r);
        let n = r.gen_range(2..=4);
        let d = r.gen_range(2..=4);
        let (zs, cones) = zero_sum_in_cones(&mut r, n, d);
        // in cones with a small sum
        let mut v = zs.clone();
        v[0] = scale(&v[0], 1.0 + r.gen_range(0.01..0.1));
        let f = family(normalize(&v, norm, false), cones, norm);
        let eps = f.sum_norm() * 1.5 + 1e-6;
        prop_assume!(eps < 0.3);
        let p = normalize_then_rebalance(&f, eps).unwrap();
        prop_assert!(p.margin() > 0.0);
        prop_assert!(p.bound <= eps / (1.0 - eps) * (1.0 + 1e-12));
        let g = f.with_vectors(p.vectors.clone());
        let back = normalize_then_snap(&g, p.bound).unwrap();
        prop_assert!(back.margin() > 0.0);
        prop_assert!(back.cone_error <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn zero_distance_is_membership(seed in any::<u64>(), k in 0u8..3) {
        let mut r = rng(seed);
        let norm = norm_of(k);
        let d = r.gen_range(1..=2);
        let set = if r.gen_bool(0.3) { cloud(&mut r, &vec![0.0; d], 1.0, 4) } else { convex_set_for(&mut r, d, norm) };
        let far: Vec<f64> = (0..d).map(|_| r.gen_range(-3.0..3.0)).collect();
        let inside = project(&far, &set, norm).unwrap().unwrap().0;
        for x in [far, inside] {
            let dist = dist_point_set(&x, &set, norm).unwrap();
            prop_assert_eq!(dist <= 1e-9, set.contains(&x, 1e-8), "dist {} at {:?}", dist, x);
            let g = grid_distance_oracle(&x, &set, Some(0.05), norm).unwrap();
            prop_assert!(g.contains(dist, 1e-9), "oracle [{}, {}] vs {}", g.lower, g.upper, dist);
        }
    }
}

fn perpendicular() -> Vec<SetRep> {
    vec![SetRep::line(vec![0.0, 0.0], vec![1.0, 0.0]), SetRep::line(vec![0.0, 0.0], vec![0.0, 1.0])]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn theta_grows_with_the_ball(seed in 0u64..1000, rho in 0.1..1.0f64, grow in 1.0..3.0f64) {
        let sets = perpendicular();
        let a = theta_rho(&sets, &[0.0, 0.0], rho, Norm::Maximum, 300, seed).unwrap();
        let b = theta_rho(&sets, &[0.0, 0.0], rho * grow, Norm::Maximum, 300, seed).unwrap();
        prop_assert!(a.upper <= b.upper + 1e-9, "{} > {}", a.upper, b.upper);
        let again = theta_rho(&sets, &[0.0, 0.0], rho, Norm::Maximum, 300, seed).unwrap();
        prop_assert_eq!(a, again);
    }

    #[test]
    fn reversal_pairing_margin(seed in any::<u64>(), tau in 0.1..0.95f64, eps in 0.05..0.5f64) {
        let mut r = rng(seed);
        let norm = any_norm(&mut r);
        let u = unit(&mut r, 2);
        let o = vec![0.0, 0.0];
        let sets = vec![halfspace(&u, &o), halfspace(&scale(&u, -1.0), &o)];
        let dn = norm.dual();
        let z1 = scale(&u, 1.0 / dn.norm(&u));
        let duals = vec![z1.clone(), scale(&z1, -1.0)];
        let rev = dual_to_primal_translations(&sets, &[o.clone(), o.clone()], &duals, eps, None, tau, norm).unwrap();
        let pairing: f64 = duals.iter().zip(&rev.shifts).map(|(z, a)| dot(z, a)).sum();
        let need = tau * eps * rev.rho;
        prop_assert!(pairing - need >= (1.0 - tau) * eps * rev.rho / 2.0 - 1e-12, "pairing {} vs {}", pairing, need);
        prop_assert!(rev.holds());
    }

    #[test]
    fn found_bundles_reverify(seed in any::<u64>()) {
        let mut r = rng(seed);
        let norm = if r.gen_bool(0.5) { Norm::Maximum } else { Norm::P(1.0) };
        let u = unit(&mut r, 2);
        let v = vec![-u[1], u[0]];
        let o = vec![0.0, 0.0];
        let tilt = r.gen_range(0.0..0.2);
        let sets = vec![halfspace(&u, &o), halfspace(&add(&scale(&u, -1.0), &scale(&v, tilt)), &o)];
        for form in [DualForm::D1, DualForm::D2] {
            let out = dual_certificate_search(&sets, &o, 0.3, 0.3, form, NormalKind::Frechet, norm, &SolveOptions::default()).unwrap();
            if let Some(b) = out.bundle() {
                let c = b.verify(&sets).unwrap();
                prop_assert!(c.valid, "{:?}", c);
            }
        }
    }

    #[test]
    fn alpha_sup_does_not_grow_with_the_radius(seed in any::<u64>(), e1 in 0.05..0.5f64, grow in 1.0..2.0f64) {
        let mut r = rng(seed);
        let norm = if r.gen_bool(0.5) { Norm::Maximum } else { Norm::P(1.0) };
        let u = unit(&mut r, 2);
        let o = vec![0.0, 0.0];
        let sets = vec![halfspace(&u, &o), boxed(&[-0.3, -0.3], &[0.2, 0.4])];
        let o2 = SolveOptions::default();
        let a = dual_alpha_sup(&sets, &o, e1, AlphaSupForm::SumNorm, NormalKind::Frechet, norm, &o2).unwrap();
        let b = dual_alpha_sup(&sets, &o, e1 * grow, AlphaSupForm::SumNorm, NormalKind::Frechet, norm, &o2).unwrap();
        prop_assume!(a.exact && b.exact);
        prop_assert!(b.value <= a.value + 1e-9, "{} then {}", a.value, b.value);
        let again = dual_alpha_sup(&sets, &o, e1, AlphaSupForm::SumNorm, NormalKind::Frechet, norm, &o2).unwrap();
        prop_assert_eq!(a, again);
    }

    #[test]
    fn localized_separation_scales(seed in any::<u64>()) {
        let mut r = rng(seed);
        let norm = any_norm(&mut r);
        let sets = vec![cloud(&mut r, &[0.0, 0.0], 0.4, 5), cloud(&mut r, &[1.5, 0.0], 0.4, 5)];
        let start = vec![sets[0].finite_points().unwrap()[0].clone(), sets[1].finite_points().unwrap()[0].clone()];
        let best = d1_sets(&sets, norm).unwrap().value;
        let eps = norm.dist(&start[0], &start[1]) - best + 0.2;
        let out = nonintersect_localize(&sets, &start, eps, 1.0, 1.0, &[0.25, 0.5, 1.0], norm).unwrap();
        for s in &out.scales {
            prop_assert!(s.max_shift < s.limit, "{} >= {}", s.max_shift, s.limit);
            prop_assert!(s.separated);
        }
    }
}
