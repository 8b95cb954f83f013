use hypiso_core::arith::{int, Rational};
use hypiso_core::geometry::exact_to_f64;
use hypiso_core::sampling::{random_isometry, random_rational, random_sl2, rng, Wanted};
use hypiso_core::{
    compose, distance, estimate_translation_length, gromov_product, ExactValue, Isometry, IsometryClass, Mat2,
    Point, SpaceModel,
};
use num_traits::Zero;
use proptest::prelude::*;

fn model(which: usize) -> SpaceModel {
    match which {
        0 => SpaceModel::half_plane(),
        1 => SpaceModel::bass_serre(2, 3, 6).unwrap(),
        _ => SpaceModel::cayley_tree(2, 6).unwrap(),
    }
}

fn exact_tau(model: &SpaceModel, g: &Isometry) -> ExactValue {
    match model.classify(g).unwrap() {
        IsometryClass::Hyperbolic(h) => h.translation_length.exact_value.unwrap(),
        other => panic!("expected hyperbolic, got {other:?}"),
    }
}

fn conjugate(h: &Isometry, g: &Isometry) -> Isometry {
    compose(&compose(h, g).unwrap(), &h.inverse()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn translation_length_is_homogeneous(seed in any::<u64>(), which in 0usize..3) {
        let model = model(which);
        let g = random_isometry(&mut rng(seed), &model, Wanted::Hyperbolic);
        let t1 = exact_tau(&model, &g);
        let t2 = exact_tau(&model, &g.pow(2));
        let t3 = exact_tau(&model, &g.pow(3));
        match t1 {
            ExactValue::Cosh(c) => {
                // cosh 2τ = 2c² − 1, cosh 3τ = 4c³ − 3c
                prop_assert_eq!(t2, ExactValue::Cosh(int(2) * &c * &c - int(1)));
                prop_assert_eq!(t3, ExactValue::Cosh(int(4) * &c * &c * &c - int(3) * &c));
            }
            ExactValue::Integer(n) => {
                prop_assert_eq!(t2, ExactValue::Integer(2 * n));
                prop_assert_eq!(t3, ExactValue::Integer(3 * n));
            }
        }
    }

    #[test]
    fn classification_is_conjugation_invariant(seed in any::<u64>(), which in 0usize..3) {
        let model = model(which);
        let mut r = rng(seed);
        let wanted = if seed % 2 == 0 { Wanted::Hyperbolic } else { Wanted::Elliptic };
        let g = random_isometry(&mut r, &model, wanted);
        let h = random_isometry(&mut r, &model, Wanted::Any);
        let a = model.classify(&g).unwrap();
        let b = model.classify(&conjugate(&h, &g)).unwrap();
        prop_assert_eq!(a.tag(), b.tag());
        if a.is_hyperbolic() {
            prop_assert_eq!(exact_tau(&model, &g), exact_tau(&model, &conjugate(&h, &g)));
        }
    }

    #[test]
    fn fixed_points_are_fixed_and_attract(seed in any::<u64>(), which in 0usize..3) {
        let model = model(which);
        let g = random_isometry(&mut rng(seed), &model, Wanted::Hyperbolic);
        let (plus, minus) = model.fixed_points(&g).unwrap();
        prop_assert_ne!(&plus, &minus);
        prop_assert_eq!(model.apply_boundary(&g, &plus).unwrap(), plus.clone());
        prop_assert_eq!(model.apply_boundary(&g, &minus).unwrap(), minus.clone());
        let (p2, m2) = model.fixed_points(&g.inverse()).unwrap();
        prop_assert_eq!((p2, m2), (minus, plus.clone()));
        // ⟨ξ₊|gⁿx⟩_x grows with n
        let x = model.basepoint();
        let mut y = x.clone();
        let mut last = model.gromov_boundary(&plus, &y, &x).unwrap();
        for _ in 0..6 {
            y = model.apply(&g, &y).unwrap();
            let next = model.gromov_boundary(&plus, &y, &x).unwrap();
            prop_assert!(next >= last - 1e-9, "{} then {}", last, next);
            last = next;
        }
        prop_assert!(last > model.gromov_boundary(&plus, &x, &x).unwrap());
    }

    #[test]
    fn parabolics_are_rejected(seed in any::<u64>()) {
        let mut r = rng(seed);
        let a = random_sl2(&mut r, 6, Wanted::Any);
        let t = loop {
            let t = random_rational(&mut r, 9);
            if !t.is_zero() {
                break t;
            }
        };
        let p = Mat2::new(int(1), t, Rational::zero(), int(1)).unwrap();
        let m = a.mul(&p).mul(&a.inverse());
        let neg = Mat2::new(-m.a.clone(), -m.b.clone(), -m.c.clone(), -m.d.clone()).unwrap();
        let h = SpaceModel::half_plane();
        for x in [m, neg] {
            let class = h.classify(&Isometry::Mobius(x)).unwrap();
            let flagged = matches!(class, IsometryClass::HypothesisViolation { .. });
            prop_assert!(flagged);
        }
    }

    #[test]
    fn tree_elements_are_never_flagged(seed in any::<u64>(), which in 1usize..3) {
        let model = model(which);
        let g = random_isometry(&mut rng(seed), &model, Wanted::Any);
        let flagged = matches!(model.classify(&g).unwrap(), IsometryClass::HypothesisViolation { .. });
        prop_assert!(!flagged);
    }

    #[test]
    fn elliptic_orbits_stay_within_the_witness_diameter(seed in any::<u64>(), which in 0usize..2) {
        let model = model(which);
        let g = random_isometry(&mut rng(seed), &model, Wanted::Elliptic);
        let IsometryClass::Elliptic(w) = model.classify(&g).unwrap() else {
            return Err(TestCaseError::fail("expected elliptic"));
        };
        if let (Some(period), Some(x)) = (w.period, w.orbit_point.clone()) {
            prop_assert!(model.apply(&g.pow(period as i64), &x).unwrap() == x || w.centre.is_some());
            let mut y = x.clone();
            for _ in 1..=4 * period {
                y = model.apply(&g, &y).unwrap();
                let d = distance(&model, &x, &y).unwrap();
                match (&d.exact, &w.orbit_diameter.exact) {
                    (Some(ExactValue::Cosh(a)), Some(ExactValue::Cosh(b))) => prop_assert!(a <= b),
                    (Some(ExactValue::Integer(a)), Some(ExactValue::Integer(b))) => prop_assert!(a <= b),
                    _ => return Err(TestCaseError::fail("missing exact lengths")),
                }
            }
        }
    }
}

/// Minimal displacement over a BFS ball, computed with in-ball BFS distances.
fn bfs_translation_length(model: &SpaceModel, g: &Isometry) -> u64 {
    let ball = model.ball().unwrap();
    ball.vertices
        .iter()
        .filter_map(|v| {
            let gv = model.apply(g, v).unwrap();
            ball.contains(&gv).then(|| ball.bfs_distance(v, &gv).unwrap())
        })
        .min()
        .unwrap()
}

#[test]
fn tree_translation_lengths_match_bfs_displacement() {
    use hypiso_core::models::free_product::{Factor, Syllable};
    let bs = SpaceModel::bass_serre(2, 3, 6).unwrap();
    let s = |exp| Syllable { factor: Factor::S, exp };
    let t = |exp| Syllable { factor: Factor::T, exp };
    let cases = [
        vec![s(1), t(1)],
        vec![s(1), t(2)],
        vec![t(1), s(1), t(1)],
        vec![s(1), t(1), s(1), t(2)],
        vec![t(2), s(1), t(1), s(1), t(1)],
        vec![t(1)],
        vec![s(1)],
    ];
    for word in cases {
        let g = Isometry::FreeProduct { m: 2, n: 3, word };
        let exact = match bs.classify(&g).unwrap() {
            IsometryClass::Hyperbolic(h) => h.translation_length.exact_value.unwrap(),
            IsometryClass::Elliptic(_) => ExactValue::Integer(0),
            other => panic!("{other:?}"),
        };
        assert_eq!(exact, ExactValue::Integer(bfs_translation_length(&bs, &g)), "{g}");
    }
    let cayley = SpaceModel::cayley_tree(2, 6).unwrap();
    for word in [vec![1], vec![1, 2], vec![1, 2, -1], vec![2, 1, 1, -2], vec![1, -2, -1, -2], vec![2, -1, -1, 2, 2]] {
        let g = Isometry::Free { rank: 2, word };
        let exact = match cayley.classify(&g).unwrap() {
            IsometryClass::Hyperbolic(h) => h.translation_length.exact_value.unwrap(),
            other => panic!("{other:?}"),
        };
        assert_eq!(exact, ExactValue::Integer(bfs_translation_length(&cayley, &g)), "{g}");
    }
}

#[test]
fn plane_translation_length_is_minimal_displacement() {
    // [[2,1],[1,1]] has trace 3: cosh τ = 7/2
    let h = SpaceModel::half_plane();
    let g = Isometry::Mobius(Mat2::from_ints(2, 1, 1, 1).unwrap());
    let ExactValue::Cosh(c) = exact_tau(&h, &g) else { panic!() };
    assert_eq!(c, Rational::new(7.into(), 2.into()));
    let tau = 3.5f64.acosh();
    let mut r = rng(5);
    for _ in 0..200 {
        let p = Point::Plane(hypiso_core::sampling::random_plane_point(&mut r, 10));
        let d = distance(&h, &p, &h.apply(&g, &p).unwrap()).unwrap().value;
        assert!(d >= tau - 1e-12);
    }
}

#[test]
fn orbit_growth_agrees_with_exact_lengths() {
    for which in 0..3 {
        let model = model(which);
        let mut r = rng(900 + which as u64);
        let x = model.basepoint();
        for _ in 0..200 {
            let g = random_isometry(&mut r, &model, Wanted::Hyperbolic);
            let est = estimate_translation_length(&model, &g, &x, 64).unwrap();
            let tau = exact_to_f64(est.exact_value.as_ref().unwrap());
            assert!((est.value - tau).abs() <= 0.1, "{g}: {} vs {tau}", est.value);
            let e = random_isometry(&mut r, &model, Wanted::Elliptic);
            let IsometryClass::Elliptic(w) = model.classify(&e).unwrap() else { panic!() };
            let est = estimate_translation_length(&model, &e, &x, 64).unwrap();
            assert!(est.value < 0.1 * w.orbit_diameter.value + 0.1, "{e}: {}", est.value);
        }
    }
}

#[test]
fn gromov_product_with_base_on_geodesic_vanishes() {
    let t = SpaceModel::cayley_tree(2, 6).unwrap();
    let x = Point::Cayley { rank: 2, word: vec![1, 1] };
    let y = Point::Cayley { rank: 2, word: vec![-2, -1] };
    let gp = gromov_product(&t, &x, &y, &t.basepoint()).unwrap();
    assert_eq!(gp.exact_integer(), Some(0));
}
