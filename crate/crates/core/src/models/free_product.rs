//! Free product `Z/m * Z/n = ⟨s⟩ * ⟨t⟩` acting on its Bass–Serre tree.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::free_group::tokenize;
use super::tree::TreeGroup;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Factor {
    S,
    T,
}

impl Factor {
    pub fn other(self) -> Factor {
        match self {
            Factor::S => Factor::T,
            Factor::T => Factor::S,
        }
    }
}

/// `generator(factor)^exp` with `1 <= exp < order(factor)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Syllable {
    pub factor: Factor,
    pub exp: u32,
}

/// Alternating syllables; the empty word is the identity.
pub type FpWord = Vec<Syllable>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FreeProduct {
    pub m: u32,
    pub n: u32,
}

impl FreeProduct {
    pub fn new(m: u32, n: u32) -> Result<Self> {
        if m < 2 || n < 2 {
            return Err(Error::InvalidModel(format!("factor orders must be >= 2, got ({m}, {n})")));
        }
        Ok(FreeProduct { m, n })
    }

    pub fn order(&self, f: Factor) -> u32 {
        match f {
            Factor::S => self.m,
            Factor::T => self.n,
        }
    }

    fn push(&self, out: &mut FpWord, syl: Syllable) {
        match out.last_mut() {
            Some(last) if last.factor == syl.factor => {
                let e = (last.exp + syl.exp) % self.order(syl.factor);
                if e == 0 {
                    out.pop();
                } else {
                    last.exp = e;
                }
            }
            _ => out.push(syl),
        }
    }

    pub fn syllable(&self, factor: Factor, exp: i64) -> FpWord {
        let e = exp.rem_euclid(i64::from(self.order(factor))) as u32;
        if e == 0 { Vec::new() } else { vec![Syllable { factor, exp: e }] }
    }

    pub fn check(&self, w: &[Syllable]) -> Result<()> {
        for (i, s) in w.iter().enumerate() {
            if s.exp == 0 || s.exp >= self.order(s.factor) {
                return Err(Error::InvalidIsometry(format!("syllable exponent {} out of range", s.exp)));
            }
            if i > 0 && w[i - 1].factor == s.factor {
                return Err(Error::InvalidIsometry("syllables must alternate".into()));
            }
        }
        Ok(())
    }

    /// Parses words in `s` and `t` such as `"s t^2 s"`, `"st"`, `"t^-1 s^-1"`.
    pub fn parse(&self, text: &str) -> Result<FpWord> {
        let mut out = Vec::new();
        for (ch, exp) in tokenize(text)? {
            let factor = match ch {
                's' => Factor::S,
                't' => Factor::T,
                _ => {
                    return Err(Error::InvalidIsometry(format!(
                        "bad letter {ch:?} in {text:?}; free product words use s and t"
                    )))
                }
            };
            for syl in self.syllable(factor, exp) {
                self.push(&mut out, syl);
            }
        }
        Ok(out)
    }

    /// Order of an element, `None` when it has infinite order.
    pub fn element_order(&self, w: &[Syllable]) -> Option<u64> {
        let (_, core) = self.cyclic_reduction(w);
        match core.as_slice() {
            [] => Some(1),
            [s] => {
                let o = self.order(s.factor);
                Some(u64::from(o / o.gcd(&s.exp)))
            }
            _ => None,
        }
    }
}

impl TreeGroup for FreeProduct {
    type Atom = Syllable;

    fn mul(&self, x: &[Syllable], y: &[Syllable]) -> FpWord {
        let mut out = x.to_vec();
        for &s in y {
            self.push(&mut out, s);
        }
        out
    }

    fn inverse(&self, x: &[Syllable]) -> FpWord {
        x.iter()
            .rev()
            .map(|s| Syllable { factor: s.factor, exp: self.order(s.factor) - s.exp })
            .collect()
    }

    fn cyclic_reduction(&self, x: &[Syllable]) -> (FpWord, FpWord) {
        let mut h: FpWord = Vec::new();
        let mut c = x.to_vec();
        while c.len() >= 2 && c[0].factor == c[c.len() - 1].factor {
            // c = s·c'  ⇒  c = s·(c'·s)·s⁻¹
            let first = c[0];
            self.push(&mut h, first);
            let mut rest = c[1..].to_vec();
            self.push(&mut rest, first);
            c = rest;
        }
        (h, c)
    }

    fn core_translation_length(&self, core: &[Syllable]) -> u64 {
        if core.len() >= 2 { core.len() as u64 } else { 0 }
    }
}

pub struct DisplayFp<'a>(pub &'a [Syllable]);

impl fmt::Display for DisplayFp<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for s in self.0 {
            let ch = match s.factor {
                Factor::S => 's',
                Factor::T => 't',
            };
            if s.exp == 1 {
                write!(f, "{ch}")?;
            } else {
                write!(f, "{ch}^{}", s.exp)?;
            }
        }
        Ok(())
    }
}
