use std::collections::HashSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use weyl_lab::brown::{boundary_point_at, in_good_region, in_good_region_sweep, is_good_point, mu, ConeParams};
use weyl_lab::cone::{ConeExperiment, ConeSide};
use weyl_lab::geometry::{inner_parallel_set, theta, ConvexPolygon, Domain, Point};
use weyl_lab::localization::{bump_value, classify, BumpProfile, Classifier, LengthScale, RegionLabel};
use weyl_lab::spectral::{check_berezin, exact_rectangle_spectrum, exact_spectrum};
use weyl_lab::weyl::{constants, two_term_counting, two_term_riesz};

fn hull(points: usize, seed: u64) -> Domain {
    Domain::ConvexPolygon(ConvexPolygon::random_hull(points, seed).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn inner_perimeter_sandwich(points in 5usize..30, seed in 0u64..10_000, frac in 0.01f64..0.99) {
        let d = hull(points, seed);
        let r = d.inradius();
        let p = d.perimeter();
        let inner = inner_parallel_set(&d, frac * r).unwrap();
        let q = inner.perimeter();
        prop_assert!(q <= p * (1.0 + 1e-10));
        prop_assert!(q >= p * (1.0 - frac) * (1.0 - 1e-10));
    }

    #[test]
    fn inradius_between_area_ratios(points in 5usize..30, seed in 0u64..10_000) {
        let d = hull(points, seed);
        let ratio = d.area() / d.perimeter();
        let r = d.inradius();
        prop_assert!(ratio <= r * (1.0 + 1e-10));
        prop_assert!(r <= 2.0 * ratio * (1.0 + 1e-10));
    }

    #[test]
    fn theta_bar_is_nondecreasing(points in 5usize..20, seed in 0u64..10_000) {
        let d = hull(points, seed);
        let r = d.inradius();
        let mut last = f64::NEG_INFINITY;
        for k in 1..8 {
            let tb = theta(&d, r * k as f64 / 8.0).unwrap().theta_bar;
            prop_assert!(tb >= last - 1e-12);
            last = tb;
        }
    }

    #[test]
    fn signed_distance_has_unit_gradient(points in 5usize..20, seed in 0u64..10_000, x in -0.2f64..1.2, y in -0.2f64..1.2) {
        let d = hull(points, seed);
        let u = Point::new(x, y);
        let (_, ambiguous) = d.signed_distance_gradient(u);
        prop_assume!(d.distance_to_boundary(u) > 1e-3 && !ambiguous);
        let h = 1e-5;
        let g = Point::new(
            d.signed_distance(u + Point::new(h, 0.0)) - d.signed_distance(u - Point::new(h, 0.0)),
            d.signed_distance(u + Point::new(0.0, h)) - d.signed_distance(u - Point::new(0.0, h)),
        ) / (2.0 * h);
        prop_assert!((g.norm() - 1.0).abs() < 1e-6, "|grad| = {}", g.norm());
    }

    #[test]
    fn good_points_are_monotone(s in 0.0f64..4.0, eps in 0.05f64..0.9, r in 0.05f64..0.6, de in 0.0f64..0.1, shrink in 0.1f64..1.0) {
        let d = Domain::unit_square();
        prop_assume!(boundary_point_at(&d, s).is_ok());
        let p = boundary_point_at(&d, s).unwrap();
        let c = ConeParams::new(eps, r).unwrap();
        if is_good_point(&d, &p, &c).unwrap() {
            prop_assert!(is_good_point(&d, &p, &ConeParams::new((eps + de).min(1.0), r).unwrap()).unwrap());
            prop_assert!(is_good_point(&d, &p, &ConeParams::new(eps, shrink * r).unwrap()).unwrap());
        }
    }

    #[test]
    fn good_region_witness_lies_in_its_cone(x in -0.1f64..1.1, y in -0.1f64..1.1, eps in 0.1f64..0.9) {
        let c = ConeParams::new(eps, 0.2).unwrap();
        if let Some(w) = in_good_region(&Domain::unit_square(), Point::new(x, y), c) {
            prop_assert!(c.in_cone(w.position, w.normal, Point::new(x, y)));
        }
    }

    #[test]
    fn sweep_witness_implies_exact_witness(points in 5usize..12, seed in 0u64..1000, x in 0.0f64..1.0, y in 0.0f64..1.0, eps in 0.2f64..0.8) {
        let d = hull(points, seed);
        let c = ConeParams::new(eps, 0.15).unwrap();
        let u = Point::new(x, y);
        if in_good_region_sweep(&d, u, c, 256.0, false).is_some() {
            prop_assert!(in_good_region(&d, u, c).is_some());
        }
    }

    #[test]
    fn square_counting_below_dilated_square(lambda in 1.0f64..2e3) {
        let small = exact_rectangle_spectrum(0.9, 0.9, 2e3).unwrap();
        let big = exact_rectangle_spectrum(1.0, 1.0, 2e3).unwrap();
        prop_assert!(small.counting(lambda).unwrap() <= big.counting(lambda).unwrap());
    }

    #[test]
    fn berezin_holds_on_oracles(lambda in 1.0f64..5e3, radius in 0.3f64..1.5) {
        for d in [Domain::unit_square(), Domain::disk(radius).unwrap(), Domain::rectangle(2.0, radius).unwrap()] {
            let spec = exact_spectrum(&d, 5e3).unwrap();
            prop_assert!(check_berezin(&spec, d.area(), lambda).unwrap().pass);
        }
    }

    #[test]
    fn counting_prediction_is_riesz_derivative(lambda in 10.0f64..1e4) {
        let s = Domain::disk(0.7).unwrap().summary();
        let h = 1e-4 * lambda;
        let fd = (two_term_riesz(&s, lambda + h).unwrap() - two_term_riesz(&s, lambda - h).unwrap()) / (2.0 * h);
        let n = two_term_counting(&s, lambda).unwrap();
        prop_assert!((fd - n).abs() <= 1e-7 * n.abs().max(1.0));
    }

    #[test]
    fn length_scale_is_half_lipschitz(ax in -0.3f64..1.3, ay in -0.3f64..1.3, bx in -0.3f64..1.3, by in -0.3f64..1.3) {
        let ls = LengthScale::new(Domain::unit_square(), 0.03).unwrap();
        let (a, b) = (Point::new(ax, ay), Point::new(bx, by));
        prop_assert!((ls.value(a) - ls.value(b)).abs() <= 0.5 * (a - b).norm() + 1e-15);
    }

    #[test]
    fn bump_support_and_sup(ux in -0.2f64..1.2, uy in -0.2f64..1.2, angle in 0.0f64..(2.0 * PI), rho in 0.0f64..1.0) {
        let ls = LengthScale::new(Domain::unit_square(), 0.03).unwrap();
        let p = BumpProfile::default();
        let u = Point::new(ux, uy);
        let l = ls.value(u);
        let e = Point::new(angle.cos(), angle.sin());
        prop_assert_eq!(bump_value(&p, &ls, u, u + 1.001 * l * e), 0.0);
        prop_assert!(bump_value(&p, &ls, u, u + rho * l * e) <= 2f64.sqrt() * p.sup() + 1e-12);
    }

    #[test]
    fn labels_partition_the_collar(x in -0.2f64..1.2, y in -0.2f64..1.2) {
        let cone = ConeParams::new(0.5, 0.2).unwrap();
        let c = Classifier::new(&Domain::unit_square(), cone, 0.05).unwrap();
        let u = Point::new(x, y);
        let label = c.classify(u);
        prop_assert_eq!(label, classify(&Domain::unit_square(), u, cone, 0.05).unwrap());
        prop_assert_eq!(matches!(label, RegionLabel::Good | RegionLabel::Bad), c.in_collar(u));
    }
}

#[test]
fn square_mu_is_linear_in_r() {
    for eps in [0.3, 0.6] {
        for r in [0.2, 0.1, 0.05, 0.025] {
            let m = mu(&Domain::unit_square(), ConeParams::new(eps, r).unwrap());
            assert!((m - 2.0 * r * (1.0f64 - eps * eps).sqrt()).abs() < 1e-9, "{eps} {r} {m}");
        }
    }
}

#[test]
fn constant_identity_for_counting_coefficient() {
    for d in 1..=16 {
        let c = constants(d).unwrap();
        let lhs = (1.0 + d as f64 / 2.0) * c.l_d;
        assert!((lhs - c.counting_coefficient()).abs() <= 1e-13 * lhs);
    }
}

fn cone_exp(eps: f64, side: ConeSide, center: Point, l: f64, h: f64) -> ConeExperiment {
    ConeExperiment::new(eps, side, center, l, vec![h]).unwrap()
}

fn node_set(exp: &ConeExperiment, h_grid: f64) -> HashSet<(i32, i32)> {
    exp.grid(h_grid).unwrap().coords.into_iter().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cone_trace_grows_with_epsilon(cx in -0.3f64..0.3, cy in -0.3f64..0.3) {
        let (l, h) = (1.0, 0.25);
        let hg = h / 8.0;
        let mut last = f64::NEG_INFINITY;
        for eps in [0.0, 0.1, 0.3, 0.5] {
            let t = cone_exp(eps, ConeSide::Cone, Point::new(cx, cy), l, h).measure(h, hg).unwrap();
            prop_assert!(t >= last - 1e-9 * t.abs());
            last = t;
        }
    }

    #[test]
    fn complement_trace_monotone_under_inclusion(cx in -0.3f64..0.3, cy in -0.3f64..0.3, e1 in 0.0f64..0.5, de in 0.0f64..0.3) {
        let (l, h) = (1.0, 0.25);
        let hg = h / 8.0;
        let center = Point::new(cx, cy);
        let narrow = cone_exp((e1 + de).min(0.5), ConeSide::Complement, center, l, h);
        let wide = cone_exp(e1, ConeSide::Complement, center, l, h);
        prop_assert!(node_set(&narrow, hg).is_subset(&node_set(&wide, hg)));
        prop_assert!(narrow.measure(h, hg).unwrap() <= wide.measure(h, hg).unwrap() * (1.0 + 1e-9));
    }

    #[test]
    fn normalized_cone_remainder_is_scale_invariant(scale in 0.25f64..4.0, eps in 0.0f64..0.5) {
        let base = cone_exp(eps, ConeSide::Cone, Point::zeros(), 1.0, 0.25);
        let scaled = cone_exp(eps, ConeSide::Cone, Point::zeros(), scale, 0.25 * scale);
        let a = weyl_lab::cone::cone_trace_experiment(&base).unwrap().rows[0];
        let b = weyl_lab::cone::cone_trace_experiment(&scaled).unwrap().rows[0];
        prop_assert!((a.normalized - b.normalized).abs() <= 1e-6 * a.normalized.abs().max(1e-3));
    }
}

#[test]
fn vertex_centred_complement_below_cone() {
    for eps in [0.0, 0.25, 0.5] {
        let h = 0.25;
        let cone = cone_exp(eps, ConeSide::Cone, Point::zeros(), 1.0, h).measure(h, h / 8.0).unwrap();
        let comp = cone_exp(eps, ConeSide::Complement, Point::zeros(), 1.0, h).measure(h, h / 8.0).unwrap();
        assert!(comp <= cone * (1.0 + 1e-9), "{eps}: {comp} > {cone}");
    }
}
