//! Vertices of the Bass–Serre tree of `⟨s⟩ * ⟨t⟩`.
//!
//! Vertices are cosets `w⟨s⟩` and `w⟨t⟩`; edges are the group elements, the edge
//! `w` joining `w⟨s⟩` to `w⟨t⟩`. A coset is labelled by the normal form of its
//! representative that does not end in a syllable of its own factor.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::free_product::{DisplayFp, Factor, FpWord, FreeProduct, Syllable};
use super::tree::TreeGroup;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BsVertex {
    pub word: FpWord,
    pub factor: Factor,
}

impl BsVertex {
    /// The basepoint, the coset `⟨s⟩`.
    pub fn root() -> Self {
        BsVertex { word: Vec::new(), factor: Factor::S }
    }

    pub fn canonical(mut word: FpWord, factor: Factor) -> Self {
        if word.last().is_some_and(|s| s.factor == factor) {
            word.pop();
        }
        BsVertex { word, factor }
    }

    pub fn is_canonical(&self) -> bool {
        self.word.last().is_none_or(|s| s.factor != self.factor)
    }
}

impl fmt::Display for BsVertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gen = match self.factor {
            Factor::S => "s",
            Factor::T => "t",
        };
        write!(f, "{}⟨{gen}⟩", DisplayFp(&self.word))
    }
}

pub(crate) fn act(group: &FreeProduct, g: &[Syllable], v: &BsVertex) -> BsVertex {
    BsVertex::canonical(group.mul(g, &v.word), v.factor)
}

/// Vertices on the geodesic from the root to `v`, both ends included.
pub(crate) fn root_path(v: &BsVertex) -> Vec<BsVertex> {
    let mut path = vec![BsVertex::root()];
    let w = &v.word;
    if let Some(first) = w.first() {
        if first.factor == Factor::T {
            path.push(BsVertex { word: Vec::new(), factor: Factor::T });
        }
        for k in 1..w.len() {
            path.push(BsVertex { word: w[..k].to_vec(), factor: w[k].factor });
        }
        path.push(v.clone());
    } else if v.factor == Factor::T {
        path.push(v.clone());
    }
    path
}

#[cfg(test)]
pub(crate) fn depth(v: &BsVertex) -> u64 {
    let lead_t = v.word.first().map(|s| s.factor == Factor::T).unwrap_or(v.factor == Factor::T);
    v.word.len() as u64 + u64::from(lead_t)
}

pub(crate) fn distance(u: &BsVertex, v: &BsVertex) -> u64 {
    let pu = root_path(u);
    let pv = root_path(v);
    let common = pu.iter().zip(&pv).take_while(|(a, b)| a == b).count() as u64;
    pu.len() as u64 + pv.len() as u64 - 2 * common
}

/// The vertex at distance `t` from `u` on the geodesic to `v`.
pub(crate) fn geodesic_vertex(u: &BsVertex, v: &BsVertex, t: u64) -> BsVertex {
    let pu = root_path(u);
    let pv = root_path(v);
    let common = pu.iter().zip(&pv).take_while(|(a, b)| a == b).count();
    let up = (pu.len() - common) as u64;
    if t <= up {
        pu[pu.len() - 1 - t as usize].clone()
    } else {
        let down = (t - up) as usize;
        pv[(common - 1 + down).min(pv.len() - 1)].clone()
    }
}

pub(crate) fn neighbors(group: &FreeProduct, v: &BsVertex) -> Vec<BsVertex> {
    let other = v.factor.other();
    let mut out = vec![BsVertex::canonical(v.word.clone(), other)];
    for e in 1..group.order(v.factor) {
        let mut w = v.word.clone();
        w.push(Syllable { factor: v.factor, exp: e });
        out.push(BsVertex { word: w, factor: other });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_path_and_depth_agree() {
        let g = FreeProduct::new(2, 3).unwrap();
        for text in ["st", "ts", "t^2st", "s"] {
            for f in [Factor::S, Factor::T] {
                let v = BsVertex::canonical(g.parse(text).unwrap(), f);
                assert_eq!(root_path(&v).len() as u64 - 1, depth(&v), "{v}");
                assert_eq!(distance(&BsVertex::root(), &v), depth(&v));
            }
        }
    }

    #[test]
    fn neighbors_are_adjacent() {
        let g = FreeProduct::new(2, 3).unwrap();
        let v = BsVertex::canonical(g.parse("st").unwrap(), Factor::T);
        let ns = neighbors(&g, &v);
        assert_eq!(ns.len(), 3);
        for n in &ns {
            assert!(n.is_canonical());
            assert_eq!(distance(&v, n), 1);
        }
    }
}
