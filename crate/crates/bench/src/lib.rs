//! Fixtures shared by the benchmarks.

use std::collections::BTreeMap;

use hypiso_core::{Action, ActionSystem, Isometry, Mat2, SpaceModel};

fn mobius(a: i64, b: i64, c: i64, d: i64) -> Isometry {
    Isometry::Mobius(Mat2::from_ints(a, b, c, d).expect("determinant one"))
}

/// Two half-plane actions where each generator is hyperbolic in one action
/// and a half-turn in the other.
pub fn worked_system() -> ActionSystem {
    let hyp = mobius(2, 1, 1, 1);
    let rot = mobius(0, -1, 1, 0);
    let action = |name: &str, f: &Isometry, g: &Isometry| {
        let images = BTreeMap::from([("f".to_string(), f.clone()), ("g".to_string(), g.clone())]);
        Action::new(name.to_string(), SpaceModel::half_plane(), images).expect("valid action")
    };
    let actions = vec![action("first", &hyp, &rot), action("second", &rot, &hyp)];
    ActionSystem::without_witnesses(vec!["f".into(), "g".into()], actions).expect("valid system")
}
