//! Free group `F_r` acting on its Cayley tree.

use std::fmt;

use super::tree::TreeGroup;
use crate::error::{Error, Result};

/// Letters are `±k` for generator `k` in `1..=rank`; always freely reduced.
pub type FreeWord = Vec<i32>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FreeGroup {
    pub rank: u32,
}

impl FreeGroup {
    pub fn new(rank: u32) -> Result<Self> {
        if rank == 0 || rank > 26 {
            return Err(Error::InvalidModel(format!("cayley tree rank must be in 1..=26, got {rank}")));
        }
        Ok(FreeGroup { rank })
    }

    pub fn reduce(&self, letters: &[i32]) -> FreeWord {
        let mut out: FreeWord = Vec::with_capacity(letters.len());
        for &l in letters {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        out
    }

    pub fn check(&self, w: &[i32]) -> Result<()> {
        for &l in w {
            if l == 0 || l.unsigned_abs() > self.rank {
                return Err(Error::InvalidIsometry(format!("letter {l} outside rank {}", self.rank)));
            }
        }
        Ok(())
    }

    /// Parses `"a b^-1 a^2"`, `"abA"` (uppercase = inverse) or `"1"` for the identity.
    pub fn parse(&self, text: &str) -> Result<FreeWord> {
        let mut letters = Vec::new();
        for (ch, exp) in tokenize(text)? {
            let (gen, inv) = if ch.is_ascii_lowercase() {
                (ch as u8 - b'a' + 1, false)
            } else if ch.is_ascii_uppercase() {
                (ch as u8 - b'A' + 1, true)
            } else {
                return Err(Error::InvalidIsometry(format!("bad letter {ch:?} in {text:?}")));
            };
            if u32::from(gen) > self.rank {
                return Err(Error::InvalidIsometry(format!(
                    "letter {ch:?} outside rank {} in {text:?}",
                    self.rank
                )));
            }
            let l = if inv { -i32::from(gen) } else { i32::from(gen) };
            let l = if exp < 0 { -l } else { l };
            letters.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
        }
        Ok(self.reduce(&letters))
    }
}

/// Splits `"a^2 b c^-1"`/`"abc"` into letters with integer exponents.
pub(crate) fn tokenize(text: &str) -> Result<Vec<(char, i64)>> {
    let t = text.trim();
    if t.is_empty() || t == "1" || t == "ε" || t == "e" {
        return Ok(Vec::new());
    }
    let chars: Vec<char> = t.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if !ch.is_alphabetic() {
            return Err(Error::InvalidIsometry(format!("unexpected {ch:?} in word {text:?}")));
        }
        i += 1;
        let mut exp = 1i64;
        if i < chars.len() && chars[i] == '^' {
            i += 1;
            let start = i;
            if i < chars.len() && (chars[i] == '-' || chars[i] == '+') {
                i += 1;
            }
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            exp = s
                .parse()
                .map_err(|_| Error::InvalidIsometry(format!("bad exponent {s:?} in word {text:?}")))?;
        }
        out.push((ch, exp));
    }
    Ok(out)
}

impl TreeGroup for FreeGroup {
    type Atom = i32;

    fn mul(&self, x: &[i32], y: &[i32]) -> FreeWord {
        let mut k = 0;
        while k < x.len().min(y.len()) && x[x.len() - 1 - k] == -y[k] {
            k += 1;
        }
        let mut out = x[..x.len() - k].to_vec();
        out.extend_from_slice(&y[k..]);
        out
    }

    fn inverse(&self, x: &[i32]) -> FreeWord {
        x.iter().rev().map(|l| -l).collect()
    }

    fn cyclic_reduction(&self, x: &[i32]) -> (FreeWord, FreeWord) {
        let mut k = 0;
        while x.len() >= 2 * k + 2 && x[k] == -x[x.len() - 1 - k] {
            k += 1;
        }
        (x[..k].to_vec(), x[k..x.len() - k].to_vec())
    }

    fn core_translation_length(&self, core: &[i32]) -> u64 {
        core.len() as u64
    }
}

pub struct DisplayFree<'a>(pub &'a [i32]);

impl fmt::Display for DisplayFree<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for &l in self.0 {
            let base = if l > 0 { b'a' } else { b'A' };
            write!(f, "{}", (base + (l.unsigned_abs() as u8 - 1)) as char)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let g = FreeGroup::new(2).unwrap();
        assert_eq!(g.parse("a b^-1 a^2").unwrap(), vec![1, -2, 1, 1]);
        assert_eq!(g.parse("abBA").unwrap(), Vec::<i32>::new());
        assert_eq!(DisplayFree(&g.parse("a^-1 b").unwrap()).to_string(), "Ab");
        assert!(g.parse("c").is_err());
    }

    #[test]
    fn cyclic_reduction_splits_conjugator() {
        let g = FreeGroup::new(2).unwrap();
        let w = g.parse("ab a B^-1 A").unwrap(); // a·(bab)·A
        let (h, c) = g.cyclic_reduction(&w);
        assert_eq!(h, vec![1]);
        assert_eq!(c, vec![2, 1, 2]);
        assert_eq!(g.mul(&g.mul(&h, &c), &g.inverse(&h)), w);
    }
}
