use hypiso_core::combiner::witness_for;
use hypiso_core::sampling::{random_isometry, random_system, rng, SystemParams, Wanted};
use hypiso_core::{
    boundary_equal, check_hypotheses, normalize_powers, simultaneous_hyperbolic, verify_certificate, Action,
    ActionSystem, ExactValue, GroupWord, IsometryClass, SearchSchedule, SpaceModel,
};
use proptest::prelude::*;
use std::collections::BTreeMap;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn certificates_are_sound_monotone_and_deterministic(seed in any::<u64>()) {
        let sys = random_system(&mut rng(seed), &SystemParams::default());
        let schedule = SearchSchedule::default();
        let cert = simultaneous_hyperbolic(&sys, &schedule).unwrap();
        prop_assert!(verify_certificate(&sys, &cert).valid);
        for stage in &cert.stages {
            for i in 0..=stage.action {
                let c = sys.actions()[i].model.classify(&sys.evaluate(i, &stage.word).unwrap()).unwrap();
                prop_assert!(c.is_hyperbolic(), "stage {} word {} in action {}", stage.action, stage.word, i);
            }
        }
        let again = simultaneous_hyperbolic(&sys, &schedule).unwrap();
        prop_assert_eq!(serde_json::to_string(&cert).unwrap(), serde_json::to_string(&again).unwrap());
    }

    #[test]
    fn power_normalization_preserves_hyperbolic_data(seed in any::<u64>()) {
        let sys = random_system(&mut rng(seed), &SystemParams::default());
        let k = sys.actions().len() - 1;
        let f = witness_for(&sys, 0, 4).unwrap();
        let g = witness_for(&sys, k, 4).unwrap();
        let (fp, gq, p, q, profile) = normalize_powers(&sys, &f, &g, k).unwrap();
        prop_assert_eq!(profile.entries.len(), k + 1);
        for (word, power, normalized) in [(&f, p, &fp), (&g, q, &gq)] {
            prop_assert_eq!(normalized, &word.pow(power as i64));
            for (i, action) in sys.actions().iter().enumerate().take(k + 1) {
                let before = action.evaluate(word).unwrap();
                let after = action.evaluate(normalized).unwrap();
                if !before.is_hyperbolic() {
                    if let Some(o) = before.order() {
                        prop_assert_eq!(power % o, 0, "power {} misses order {} in action {}", power, o, i);
                    }
                    continue;
                }
                let (IsometryClass::Hyperbolic(a), IsometryClass::Hyperbolic(b)) =
                    (action.model.classify(&before).unwrap(), action.model.classify(&after).unwrap())
                else {
                    return Err(TestCaseError::fail("power of a hyperbolic is not hyperbolic"));
                };
                prop_assert!(boundary_equal(&a.fixed_plus, &b.fixed_plus).unwrap());
                prop_assert!(boundary_equal(&a.fixed_minus, &b.fixed_minus).unwrap());
                let scaled = (b.translation_length.value - power as f64 * a.translation_length.value).abs();
                prop_assert!(scaled <= 1e-9 * b.translation_length.value.max(1.0));
                if let (Some(ExactValue::Integer(x)), Some(ExactValue::Integer(y))) =
                    (&a.translation_length.exact_value, &b.translation_length.exact_value)
                {
                    prop_assert_eq!(*y, power * x);
                }
            }
        }
    }

    #[test]
    fn all_tree_systems_pass_the_hypothesis_check(seed in any::<u64>()) {
        let mut r = rng(seed);
        let mut actions = Vec::new();
        for (i, model) in [SpaceModel::bass_serre(2, 3, 4).unwrap(), SpaceModel::cayley_tree(2, 4).unwrap()]
            .into_iter()
            .enumerate()
        {
            let images = BTreeMap::from([
                ("f".to_string(), random_isometry(&mut r, &model, Wanted::Any)),
                ("g".to_string(), random_isometry(&mut r, &model, Wanted::Any)),
            ]);
            actions.push(Action::new(format!("t{i}"), model, images).unwrap());
        }
        let sys = ActionSystem::without_witnesses(vec!["f".into(), "g".into()], actions).unwrap();
        prop_assert!(check_hypotheses(&sys, 3).unwrap().passed());
    }
}

#[test]
fn tampered_certificates_fail_verification() {
    let sys = random_system(&mut rng(11), &SystemParams::default());
    let cert = simultaneous_hyperbolic(&sys, &SearchSchedule::default()).unwrap();
    assert!(verify_certificate(&sys, &cert).valid);

    let mut short = cert.clone();
    short.per_action.pop();
    assert!(!verify_certificate(&sys, &short).valid);

    let mut stale = cert.clone();
    let last = stale.per_action.len() - 1;
    stale.per_action.swap(0, last);
    if stale.per_action != cert.per_action {
        assert!(!verify_certificate(&sys, &stale).valid);
    }

    let mut foreign = cert;
    foreign.word = GroupWord::parse("h^2").unwrap();
    let v = verify_certificate(&sys, &foreign);
    assert!(!v.valid);
    assert!(v.diagnostic.unwrap().contains("unknown generator"));
}
