use std::sync::Arc;

use num_integer::Integer;
use proptest::prelude::*;

use seifert_rt::arith::{
    cf_expand_with, decompose_sl2z, decompose_sl2z_with, dedekind_sum, rademacher_phi, CfStrategy, ContinuedFraction,
    SL2Z,
};
use seifert_rt::asymptotics::{cs_phase_set, lens_expansion};
use seifert_rt::invariants::{tau_closed_form, tau_lens, tau_matrix_form, LensMethod, DEFAULT_TERM_BUDGET};
use seifert_rt::{Family, ModularData64, Orientation, Rational, RootSystem, SeifertPresentation, WeightVec};

fn small_algebra() -> impl Strategy<Value = (Family, usize)> {
    prop_oneof![(1usize..=4).prop_map(|l| (Family::A, l)), Just((Family::D, 4))]
}

fn sl2z() -> impl Strategy<Value = SL2Z> {
    (prop::collection::vec(-4i64..=4, 0..7), -5i64..=5, prop::bool::ANY).prop_map(|(terms, n, neg)| {
        let u = ContinuedFraction::new(terms).word_product() * SL2Z::theta(n);
        if neg {
            -u
        } else {
            u
        }
    })
}

fn coprime_pair(max: i64) -> impl Strategy<Value = (i64, i64)> {
    (1..=max, -3 * max..=3 * max).prop_filter("coprime, nonzero β", |(a, b)| *b != 0 && a.gcd(b) == 1)
}

proptest! {
    #[test]
    fn weyl_group_preserves_inner_product((f, l) in small_algebra(), x in prop::collection::vec(-5i64..=5, 4), y in prop::collection::vec(-5i64..=5, 4)) {
        let rs = RootSystem::new(f, l).unwrap();
        let (x, y) = (WeightVec(x[..l].to_vec()), WeightVec(y[..l].to_vec()));
        for w in rs.weyl_elements().unwrap() {
            prop_assert_eq!(rs.inner_scaled(&w.apply(&x), &w.apply(&y)), rs.inner_scaled(&x, &y));
        }
    }

    #[test]
    fn dedekind_matches_cotangent_sum(q in 1i64..=200, s in -400i64..=400) {
        prop_assume!(s.gcd(&q) == 1);
        let exact = dedekind_sum(s, q).unwrap();
        let pi = std::f64::consts::PI;
        let cot = |x: f64| x.cos() / x.sin();
        let direct: f64 = (1..q).map(|j| cot(pi * j as f64 / q as f64) * cot(pi * (s * j) as f64 / q as f64)).sum::<f64>() / (4 * q) as f64;
        let e = *exact.numer() as f64 / *exact.denom() as f64;
        prop_assert!((e - direct).abs() < 1e-9 * (q as f64), "s={} q={}: {} vs {}", s, q, e, direct);
        prop_assert_eq!(dedekind_sum(-s, q).unwrap(), -exact);
        prop_assert_eq!(dedekind_sum(s + q, q).unwrap(), exact);
    }

    #[test]
    fn phi_is_even(u in sl2z()) {
        prop_assert_eq!(rademacher_phi(&-u), rademacher_phi(&u));
    }

    #[test]
    fn decomposition_round_trips(u in sl2z()) {
        for d in [decompose_sl2z(&u), decompose_sl2z_with(&u, CfStrategy::Nearest)] {
            prop_assert_eq!(d.reconstruct(), u);
            prop_assert!(u.a == 0 || d.cf.pivots_nonzero());
            prop_assert!(d.eps == 1 || d.eps == -1);
        }
    }

    #[test]
    fn b_recurrences_match_word(terms in prop::collection::vec(-6i64..=6, 0..8)) {
        let cf = ContinuedFraction::new(terms);
        let b = cf.b_matrix();
        prop_assert_eq!(b, cf.word_product());
        prop_assert_eq!(b.a * b.d - b.b * b.c, 1);
        if let Some(x) = cf.evaluate() {
            if b.c != 0 {
                prop_assert_eq!(x, Rational::new(b.a, b.c));
            }
        }
    }

    #[test]
    fn expansions_evaluate_back((a, b) in coprime_pair(60)) {
        for s in [CfStrategy::Ceiling, CfStrategy::Nearest] {
            let cf = cf_expand_with(a, b, s).unwrap();
            prop_assert_eq!(cf.evaluate(), Some(Rational::new(a, b)));
            let m = cf.b_matrix();
            prop_assert_eq!(Rational::new(m.a, m.c), Rational::new(a, b));
        }
    }

    #[test]
    fn presentation_text_round_trips(
        orient in prop::bool::ANY,
        g in 0u32..4,
        b in prop::option::of(-5i64..=5),
        fibers in prop::collection::vec(coprime_pair(12), 0..4),
    ) {
        let eps = if orient || g == 0 { Orientation::O } else { Orientation::N };
        let m = SeifertPresentation::new(eps, g, b, fibers).unwrap();
        let back: SeifertPresentation = m.to_string().parse().unwrap();
        prop_assert_eq!(back, m);
    }

    #[test]
    fn cs_phases_are_coset_invariant(p in 1i64..=6, q in -12i64..=12, mu in prop::collection::vec(-3i64..=3, 2)) {
        prop_assume!(p.gcd(&q) == 1);
        let rs = RootSystem::new(Family::A, 2).unwrap();
        let nd = rs.det_cartan();
        let phases = cs_phase_set(&rs, p, q).unwrap();
        // μ in root coordinates, mapped to weight coordinates through the Cartan matrix
        let c = rs.cartan();
        let pmu = WeightVec((0..2).map(|i| p * (0..2).map(|j| c[i][j] * mu[j]).sum::<i64>()).collect());
        for nu in rs.coset_reps_root_lattice(p).unwrap() {
            let shifted = &nu + &pmu;
            let x = Rational::new(q * rs.inner_scaled(&shifted, &shifted), 2 * p * nd);
            prop_assert!(phases.contains(&(x - x.floor())));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn alcove_is_closed_under_duality(l in 1usize..=3, extra in 0i64..6) {
        let rs = RootSystem::new(Family::A, l).unwrap();
        let r = rs.dual_coxeter() + extra;
        let alc = rs.alcove_weights(r).unwrap();
        for x in &alc {
            prop_assert!(alc.contains(&rs.dual_weight(x)));
        }
    }

    #[test]
    fn matrix_and_closed_forms_agree(
        r in 2i64..=7,
        b in -2i64..=1,
        fibers in prop::collection::vec(coprime_pair(5), 0..3),
        g in 0u32..2,
    ) {
        let m = ModularData64::new(Arc::new(RootSystem::new(Family::A, 1).unwrap()), r).unwrap();
        let x = SeifertPresentation::new(Orientation::O, g, Some(b), fibers).unwrap();
        let u = tau_matrix_form(&m, &x, None, CfStrategy::Ceiling).unwrap();
        let v = tau_closed_form(&m, &x, None, DEFAULT_TERM_BUDGET).unwrap();
        prop_assert!((u - v).norm() <= 1e-9 * u.norm().max(1.0), "{}: {} vs {}", x, u, v);
    }

    #[test]
    fn lens_routes_agree(r in 3i64..=9, p in -9i64..=9, q in -9i64..=9) {
        prop_assume!(p != 0 && p.gcd(&q) == 1);
        let m = ModularData64::new(Arc::new(RootSystem::new(Family::A, 1).unwrap()), r).unwrap();
        let a = tau_lens(&m, p, q, LensMethod::ContinuedFraction).unwrap();
        let b = tau_lens(&m, p, q, LensMethod::Representation).unwrap();
        let c = tau_lens(&m, p, q, LensMethod::LatticeSum).unwrap();
        prop_assert!((a - b).norm() < 1e-10 && (a - c).norm() < 1e-10, "L({},{}) r={}: {} {} {}", p, q, r, a, b, c);
    }

    #[test]
    fn higher_order_never_hurts(p in 2i64..=7, q in 1i64..=7) {
        prop_assume!(p.gcd(&q) == 1);
        let rs = Arc::new(RootSystem::new(Family::A, 1).unwrap());
        let e = lens_expansion::<f64>(&rs, p, q, 3).unwrap();
        let m = ModularData64::new(rs, 100).unwrap();
        let exact = tau_lens(&m, p, q, LensMethod::LatticeSum).unwrap();
        let res: Vec<f64> = (0..=3).map(|n| (exact - e.evaluate_truncated(100, n)).norm()).collect();
        for w in res.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-13, "{:?}", res);
        }
    }
}
