//! Seeded random points, isometries and action systems.
//!
//! All generators take an explicit RNG; [`rng`] builds the ChaCha8 stream used
//! throughout so runs are reproducible from a `u64` seed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::action::{Action, ActionSystem, GroupWord};
use crate::arith::{height, int, Rational};
use crate::combiner::{check_hypotheses, witness_for};
use crate::models::free_group::FreeGroup;
use crate::models::free_product::{Factor, FreeProduct, Syllable};
use crate::models::plane::{Mat2, PlanePoint};
use crate::models::tree::TreeGroup;
use crate::models::{Isometry, ModelKind, Point, SpaceModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rational `p/q` with `|p| <= h` and `1 <= q <= h`.
pub fn random_rational<R: Rng>(rng: &mut R, h: i64) -> Rational {
    Rational::new(BigInt::from(rng.random_range(-h..=h)), BigInt::from(rng.random_range(1..=h)))
}

pub fn random_plane_point<R: Rng>(rng: &mut R, h: i64) -> PlanePoint {
    let x = random_rational(rng, h);
    let y = loop {
        let y = random_rational(rng, h).abs();
        if y.is_positive() {
            break y;
        }
    };
    PlanePoint { x, y }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wanted {
    Hyperbolic,
    Elliptic,
    Any,
}

fn fits(iso: &Isometry, wanted: Wanted) -> bool {
    match wanted {
        Wanted::Hyperbolic => iso.is_hyperbolic(),
        Wanted::Elliptic => !iso.is_hyperbolic(),
        Wanted::Any => true,
    }
}

/// Determinant-one matrix with entries of height `<= h` and `|tr| != 2`.
pub fn random_sl2<R: Rng>(rng: &mut R, h: i64, wanted: Wanted) -> Mat2 {
    let bound = BigInt::from(h);
    loop {
        let a = random_rational(rng, h);
        if a.is_zero() {
            continue;
        }
        let b = random_rational(rng, h);
        let c = random_rational(rng, h);
        let d = (Rational::one() + &b * &c) / &a;
        if height(&d) > bound {
            continue;
        }
        let Ok(m) = Mat2::new(a, b, c, d) else { continue };
        let t = m.abs_trace();
        let ok = match wanted {
            Wanted::Hyperbolic => t > int(2),
            Wanted::Elliptic => t < int(2),
            Wanted::Any => t != int(2) || m.is_identity(),
        };
        if ok {
            return m;
        }
    }
}

fn random_free_word<R: Rng>(rng: &mut R, rank: u32, max_len: usize) -> Vec<i32> {
    let g = FreeGroup { rank };
    let len = rng.random_range(1..=max_len);
    let mut w: Vec<i32> = Vec::new();
    while w.len() < len {
        let k = rng.random_range(1..=rank as i32);
        let l = if rng.random_bool(0.5) { k } else { -k };
        w = g.reduce(&[w.as_slice(), &[l]].concat());
    }
    w
}

fn random_fp_word<R: Rng>(rng: &mut R, g: &FreeProduct, syllables: usize) -> Vec<Syllable> {
    let mut factor = if rng.random_bool(0.5) { Factor::S } else { Factor::T };
    let mut w = Vec::new();
    for _ in 0..syllables {
        let exp = rng.random_range(1..g.order(factor));
        w.push(Syllable { factor, exp });
        factor = factor.other();
    }
    w
}

/// Random isometry of `model` of the requested type.
///
/// Cayley trees have no nontrivial elliptic elements, so an elliptic request
/// there yields the identity. Bass–Serre elliptics are conjugates `h x h⁻¹` of
/// a factor element by at most two syllables.
pub fn random_isometry<R: Rng>(rng: &mut R, model: &SpaceModel, wanted: Wanted) -> Isometry {
    match model.kind() {
        ModelKind::HalfPlane => Isometry::Mobius(random_sl2(rng, 10, wanted)),
        ModelKind::CayleyTree { rank } => match wanted {
            Wanted::Elliptic => Isometry::identity(model.kind()),
            _ => Isometry::Free { rank, word: random_free_word(rng, rank, 5) },
        },
        ModelKind::BassSerre { m, n } => {
            let g = FreeProduct { m, n };
            loop {
                let word = match wanted {
                    Wanted::Elliptic => {
                        let len = rng.random_range(0..=2);
                        let h = random_fp_word(rng, &g, len);
                        let f = if rng.random_bool(0.5) { Factor::S } else { Factor::T };
                        let x = g.syllable(f, rng.random_range(1..i64::from(g.order(f))));
                        g.mul(&g.mul(&h, &x), &g.inverse(&h))
                    }
                    _ => {
                        let len = rng.random_range(1..=5);
                        random_fp_word(rng, &g, len)
                    }
                };
                let iso = Isometry::FreeProduct { m, n, word };
                if fits(&iso, wanted) {
                    return iso;
                }
            }
        }
    }
}

/// Random rational point of the plane, or a random vertex of a tree within
/// distance `radius` of the basepoint.
pub fn random_point<R: Rng>(rng: &mut R, model: &SpaceModel, radius: usize) -> Point {
    match model.kind() {
        ModelKind::HalfPlane => Point::Plane(random_plane_point(rng, 10)),
        ModelKind::CayleyTree { rank } => {
            let len = rng.random_range(0..=radius);
            let word = if len == 0 { Vec::new() } else { random_free_word(rng, rank, len) };
            Point::Cayley { rank, word }
        }
        ModelKind::BassSerre { m, n } => {
            let g = FreeProduct { m, n };
            let len = rng.random_range(0..=radius);
            let w = random_fp_word(rng, &g, len);
            let iso = Isometry::FreeProduct { m, n, word: w };
            let mut p = model.apply(&iso, &model.basepoint()).expect("same model");
            if rng.random_bool(0.5) {
                let nbs = model.neighbors(&p).expect("tree");
                p = nbs[rng.random_range(0..nbs.len())].clone();
            }
            p
        }
    }
}

fn random_model<R: Rng>(rng: &mut R, ball_radius: u32) -> SpaceModel {
    match rng.random_range(0..3) {
        0 => SpaceModel::half_plane(),
        1 => SpaceModel::bass_serre(rng.random_range(2..=4), rng.random_range(2..=4), ball_radius).unwrap(),
        _ => SpaceModel::cayley_tree(2, ball_radius).unwrap(),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SystemParams {
    pub min_actions: usize,
    pub max_actions: usize,
    pub hypothesis_depth: usize,
    pub witness_depth: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams { min_actions: 2, max_actions: 4, hypothesis_depth: 4, witness_depth: 4 }
    }
}

/// Random two-generator action system with explicit witnesses; every action
/// passes the hypothesis check up to `hypothesis_depth`.
pub fn random_system<R: Rng>(rng: &mut R, params: &SystemParams) -> ActionSystem {
    let gens = vec!["f".to_string(), "g".to_string()];
    let n = rng.random_range(params.min_actions..=params.max_actions);
    let mut actions = Vec::new();
    let mut witnesses = Vec::new();
    while actions.len() < n {
        let model = random_model(rng, 8);
        let images: BTreeMap<String, Isometry> = gens
            .iter()
            .map(|g| {
                let wanted = if rng.random_bool(0.5) { Wanted::Hyperbolic } else { Wanted::Elliptic };
                (g.clone(), random_isometry(rng, &model, wanted))
            })
            .collect();
        let action = Action::new(format!("a{}", actions.len() + 1), model, images).expect("matching models");
        let single = ActionSystem::without_witnesses(gens.clone(), vec![action.clone()]).expect("valid");
        let Ok(report) = check_hypotheses(&single, params.hypothesis_depth) else { continue };
        if !report.passed() {
            continue;
        }
        let Ok(w) = witness_for(&single, 0, params.witness_depth) else { continue };
        actions.push(action);
        witnesses.push(Some(w));
    }
    ActionSystem::new(gens, actions, witnesses).expect("valid system")
}

/// Identity-free random word, used for conjugators.
pub fn random_group_word<R: Rng>(rng: &mut R, generators: &[String], max_len: usize) -> GroupWord {
    loop {
        let len = rng.random_range(1..=max_len);
        let mut w = GroupWord::identity();
        for _ in 0..len {
            let g = &generators[rng.random_range(0..generators.len())];
            w = w.mul(&GroupWord::power_of(g, if rng.random_bool(0.5) { 1 } else { -1 }));
        }
        if !w.is_identity() {
            return w;
        }
    }
}
