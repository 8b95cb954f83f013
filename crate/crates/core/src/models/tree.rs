//! Shared machinery for the two tree models: normal forms and boundary rays.

use std::fmt::Debug;
use std::hash::Hash;

use serde::{Deserialize, Serialize};

/// A group acting on a tree, presented by normal forms over a list of atoms
/// (letters of a free group, syllables of a free product).
pub trait TreeGroup {
    type Atom: Clone + Eq + Hash + Debug;

    /// Normal form of `x·y` for normal-form inputs.
    fn mul(&self, x: &[Self::Atom], y: &[Self::Atom]) -> Vec<Self::Atom>;

    fn inverse(&self, x: &[Self::Atom]) -> Vec<Self::Atom>;

    /// Returns `(h, c)` with `x = h·c·h⁻¹` and `c` cyclically reduced.
    fn cyclic_reduction(&self, x: &[Self::Atom]) -> (Vec<Self::Atom>, Vec<Self::Atom>);

    /// Translation length of a cyclically reduced element.
    fn core_translation_length(&self, core: &[Self::Atom]) -> u64;

    fn pow(&self, x: &[Self::Atom], n: i64) -> Vec<Self::Atom> {
        let base = if n < 0 { self.inverse(x) } else { x.to_vec() };
        let mut acc = Vec::new();
        let mut sq = base;
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &sq);
            }
            e >>= 1;
            if e > 0 {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }
}

/// Eventually periodic end `prefix · period · period · …` of the tree.
///
/// Canonical form: `period` is primitive and `prefix` is as short as possible,
/// so two rays name the same end iff they are structurally equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Ray<A> {
    pub prefix: Vec<A>,
    pub period: Vec<A>,
}

/// Canonical ray for the end `lim prefix·rep^n`. `rep` must act hyperbolically.
pub fn canonical_ray<G: TreeGroup>(group: &G, prefix: &[G::Atom], rep: &[G::Atom]) -> Ray<G::Atom> {
    let (h, core) = group.cyclic_reduction(rep);
    assert!(group.core_translation_length(&core) > 0, "ray period must be hyperbolic");
    let head = group.mul(prefix, &h);
    let copies = head.len() / core.len() + 2;
    let mut word = head;
    for _ in 0..copies {
        word = group.mul(&word, &core);
    }
    // cancellation only touches the first copies of `core`
    let p = core.len();
    let mut end = word.len();
    while end >= p && word[end - p..end] == core[..] {
        end -= p;
    }
    let mut prefix: Vec<G::Atom> = word[..end].to_vec();
    let mut period = core;
    while let (Some(u), Some(r)) = (prefix.last(), period.last()) {
        if u != r {
            break;
        }
        prefix.pop();
        period.rotate_right(1);
    }
    Ray { prefix, period: primitive_root(period) }
}

fn primitive_root<A: Eq + Clone>(w: Vec<A>) -> Vec<A> {
    let n = w.len();
    for p in 1..n {
        if n % p == 0 && (p..n).all(|i| w[i] == w[i - p]) {
            return w[..p].to_vec();
        }
    }
    w
}

/// The group element `prefix · period^n` whose orbit point approximates the end.
pub fn ray_element<G: TreeGroup>(group: &G, ray: &Ray<G::Atom>, n: usize) -> Vec<G::Atom> {
    let mut w = ray.prefix.clone();
    for _ in 0..n {
        w = group.mul(&w, &ray.period);
    }
    w
}

pub fn translate_ray<G: TreeGroup>(group: &G, g: &[G::Atom], ray: &Ray<G::Atom>) -> Ray<G::Atom> {
    let head = group.mul(g, &ray.prefix);
    canonical_ray(group, &head, &ray.period)
}

/// Length of the longest common prefix of the infinite atom sequences of two rays.
/// `None` when the rays coincide.
pub fn ray_divergence<A: Eq + Clone>(x: &Ray<A>, y: &Ray<A>) -> Option<usize> {
    if x == y {
        return None;
    }
    let at = |r: &Ray<A>, i: usize| -> A {
        if i < r.prefix.len() {
            r.prefix[i].clone()
        } else {
            r.period[(i - r.prefix.len()) % r.period.len()].clone()
        }
    };
    let bound = x.prefix.len().max(y.prefix.len()) + 2 * x.period.len() * y.period.len() + 2;
    (0..bound).find(|&i| at(x, i) != at(y, i)).or(Some(bound))
}
