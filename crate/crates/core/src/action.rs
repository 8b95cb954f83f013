//! Abstract group words and their interpretation by actions on models.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_same, Error, Result};
use crate::models::{compose, Isometry, SpaceModel};

/// A generator or its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub generator: String,
    pub inverse: bool,
}

impl Letter {
    pub fn new(generator: impl Into<String>, inverse: bool) -> Self {
        Letter { generator: generator.into(), inverse }
    }

    pub fn inv(&self) -> Letter {
        Letter { generator: self.generator.clone(), inverse: !self.inverse }
    }
}

/// A freely reduced word over named generators.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupWord {
    letters: Vec<Letter>,
}

impl GroupWord {
    pub fn identity() -> Self {
        GroupWord::default()
    }

    pub fn generator(name: impl Into<String>) -> Self {
        GroupWord { letters: vec![Letter::new(name, false)] }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last().is_some_and(|last| *last == l.inv()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord { letters: out }
    }

    /// `name^exp` as a word; the identity when `exp == 0`.
    pub fn power_of(name: &str, exp: i64) -> Self {
        let l = Letter::new(name, exp < 0);
        GroupWord { letters: vec![l; exp.unsigned_abs() as usize] }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        GroupWord::from_letters(self.letters.iter().chain(&other.letters).cloned())
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord { letters: self.letters.iter().rev().map(Letter::inv).collect() }
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// Maximal runs `(generator, signed exponent)`.
    pub fn runs(&self) -> Vec<(&str, i64)> {
        let mut out: Vec<(&str, i64)> = Vec::new();
        for l in &self.letters {
            let s = if l.inverse { -1 } else { 1 };
            match out.last_mut() {
                Some((g, e)) if *g == l.generator && e.signum() == s => *e += s,
                _ => out.push((&l.generator, s)),
            }
        }
        out
    }

    /// Parses whitespace-separated `name` or `name^k` tokens; `1` is the identity.
    pub fn parse(text: &str) -> Result<GroupWord> {
        let t = text.trim();
        if t.is_empty() || t == "1" {
            return Ok(GroupWord::identity());
        }
        let mut letters = Vec::new();
        for tok in t.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => {
                    let e: i64 = e.parse().map_err(|_| {
                        Error::InvalidArgument(format!("bad exponent in {tok:?} of word {text:?}"))
                    })?;
                    (n, e)
                }
                None => (tok, 1),
            };
            if !is_identifier(name) {
                return Err(Error::InvalidArgument(format!("bad generator name {name:?} in word {text:?}")));
            }
            letters.extend(GroupWord::power_of(name, exp).letters);
        }
        Ok(GroupWord::from_letters(letters))
    }

    pub fn generators(&self) -> impl Iterator<Item = &str> {
        self.letters.iter().map(|l| l.generator.as_str())
    }
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (i, (g, e)) in self.runs().into_iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if e == 1 {
                write!(f, "{g}")?;
            } else {
                write!(f, "{g}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for GroupWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for GroupWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        GroupWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A homomorphism from the free group on the system's generators to the
/// isometries of one model.
#[derive(Clone, Debug, PartialEq)]
pub struct Action {
    pub name: String,
    pub model: SpaceModel,
    images: BTreeMap<String, Isometry>,
}

impl Action {
    pub fn new(name: impl Into<String>, model: SpaceModel, images: BTreeMap<String, Isometry>) -> Result<Self> {
        for iso in images.values() {
            check_same(model.kind(), iso.model())?;
        }
        Ok(Action { name: name.into(), model, images })
    }

    pub fn image(&self, generator: &str) -> Option<&Isometry> {
        self.images.get(generator)
    }

    pub fn images(&self) -> &BTreeMap<String, Isometry> {
        &self.images
    }

    /// `ρ(word)`, using fast powers on runs of a repeated letter.
    pub fn evaluate(&self, word: &GroupWord) -> Result<Isometry> {
        let mut acc = Isometry::identity(self.model.kind());
        for (g, e) in word.runs() {
            let img = self
                .images
                .get(g)
                .ok_or_else(|| Error::InvalidArgument(format!("generator {g:?} has no image in action {}", self.name)))?;
            acc = compose(&acc, &img.pow(e))?;
        }
        Ok(acc)
    }
}

/// Generators, actions interpreting them, and optional hyperbolic witnesses.
#[derive(Clone, Debug, PartialEq)]
pub struct ActionSystem {
    generators: Vec<String>,
    actions: Vec<Action>,
    witnesses: Vec<Option<GroupWord>>,
}

impl ActionSystem {
    pub fn new(generators: Vec<String>, actions: Vec<Action>, witnesses: Vec<Option<GroupWord>>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("a system needs at least one generator".into()));
        }
        if actions.is_empty() {
            return Err(Error::InvalidArgument("a system needs at least one action".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if !is_identifier(g) {
                return Err(Error::InvalidArgument(format!("bad generator name {g:?}")));
            }
            if generators[..i].contains(g) {
                return Err(Error::InvalidArgument(format!("duplicate generator {g:?}")));
            }
        }
        for a in &actions {
            for g in &generators {
                if a.image(g).is_none() {
                    return Err(Error::InvalidArgument(format!("generator {g:?} has no image in action {}", a.name)));
                }
            }
            if let Some(extra) = a.images.keys().find(|k| !generators.contains(k)) {
                return Err(Error::InvalidArgument(format!("unknown generator {extra:?} in action {}", a.name)));
            }
        }
        if witnesses.len() != actions.len() {
            return Err(Error::InvalidArgument(format!(
                "{} witnesses given for {} actions",
                witnesses.len(),
                actions.len()
            )));
        }
        for w in witnesses.iter().flatten() {
            if let Some(g) = w.generators().find(|g| !generators.iter().any(|x| x == g)) {
                return Err(Error::InvalidArgument(format!("unknown generator {g:?} in witness {w}")));
            }
        }
        Ok(ActionSystem { generators, actions, witnesses })
    }

    pub fn without_witnesses(generators: Vec<String>, actions: Vec<Action>) -> Result<Self> {
        let n = actions.len();
        Self::new(generators, actions, vec![None; n])
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn witnesses(&self) -> &[Option<GroupWord>] {
        &self.witnesses
    }

    pub fn evaluate(&self, action: usize, word: &GroupWord) -> Result<Isometry> {
        self.actions[action].evaluate(word)
    }

    /// All reduced words of length `1..=depth` in shortlex order.
    pub fn words_up_to(&self, depth: usize) -> Vec<GroupWord> {
        let letters: Vec<Letter> = self
            .generators
            .iter()
            .flat_map(|g| [Letter::new(g.clone(), false), Letter::new(g.clone(), true)])
            .collect();
        let mut out = Vec::new();
        let mut layer = vec![GroupWord::identity()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in &layer {
                for l in &letters {
                    if w.letters.last().is_some_and(|last| *last == l.inv()) {
                        continue;
                    }
                    let mut v = w.clone();
                    v.letters.push(l.clone());
                    next.push(v);
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::plane::Mat2;

    #[test]
    fn words_reduce_and_display() {
        let w = GroupWord::parse("f^2 g g^-1 f g^2").unwrap();
        assert_eq!(w.to_string(), "f^3 g^2");
        assert_eq!(w.inverse().to_string(), "g^-2 f^-3");
        assert!(w.mul(&w.inverse()).is_identity());
        assert_eq!(GroupWord::parse("1").unwrap(), GroupWord::identity());
        assert_eq!(GroupWord::parse(&w.to_string()).unwrap(), w);
        assert!(GroupWord::parse("f^x").is_err());
    }

    #[test]
    fn evaluate_matches_matrix_product() {
        let m = |a, b, c, d| Isometry::Mobius(Mat2::from_ints(a, b, c, d).unwrap());
        let images = BTreeMap::from([("f".to_string(), m(2, 1, 1, 1)), ("g".to_string(), m(0, -1, 1, 0))]);
        let act = Action::new("a", SpaceModel::half_plane(), images).unwrap();
        let w = GroupWord::parse("f^2 g^-1").unwrap();
        let expect = compose(&m(5, 3, 3, 2), &m(0, 1, -1, 0)).unwrap();
        assert_eq!(act.evaluate(&w).unwrap(), expect);
    }

    #[test]
    fn shortlex_enumeration_counts() {
        let act = Action::new("a", SpaceModel::half_plane(), BTreeMap::new()).unwrap();
        let mut images = BTreeMap::new();
        images.insert("f".to_string(), Isometry::identity(act.model.kind()));
        images.insert("g".to_string(), Isometry::identity(act.model.kind()));
        let act = Action::new("a", SpaceModel::half_plane(), images).unwrap();
        let sys = ActionSystem::without_witnesses(vec!["f".into(), "g".into()], vec![act]).unwrap();
        // 4 + 12 + 36 + 108
        assert_eq!(sys.words_up_to(4).len(), 160);
    }

    #[test]
    fn missing_image_rejected() {
        let act = Action::new("a", SpaceModel::half_plane(), BTreeMap::new()).unwrap();
        assert!(ActionSystem::without_witnesses(vec!["f".into()], vec![act]).is_err());
    }
}
