//! Exact rational helpers and the real quadratic field arithmetic used for
//! boundary points of the half-plane.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad rational {text:?}: {reason}")]
pub struct ParseRationalError {
    pub text: String,
    pub reason: &'static str,
}

/// Parses `"p"` or `"p/q"` with integer `p`, `q` and `q != 0`.
pub fn parse_rational(text: &str) -> Result<Rational, ParseRationalError> {
    let err = |reason| ParseRationalError { text: text.to_string(), reason };
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err("numerator is not an integer"))?;
    let den: BigInt = den.parse().map_err(|_| err("denominator is not an integer"))?;
    if den.is_zero() {
        return Err(err("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

/// Always `p/q`, including integers (`3/1`).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Largest of |numerator| and denominator.
pub fn height(r: &Rational) -> BigInt {
    let n = r.numer().abs();
    let d = r.denom().clone();
    if n > d { n } else { d }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn ln_bigint(n: &BigInt) -> f64 {
    debug_assert!(n.sign() == Sign::Plus);
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a positive rational without overflowing `f64`.
pub fn ln_rational(r: &Rational) -> f64 {
    assert!(r.is_positive(), "ln of non-positive rational");
    ln_bigint(r.numer()) - ln_bigint(r.denom())
}

/// `arccosh(1 + e)` for an exact excess `e >= 0`.
pub fn acosh_one_plus(e: &Rational) -> f64 {
    if e.is_zero() {
        return 0.0;
    }
    let ef = to_f64(e);
    if ef.is_finite() && ef < 1e12 {
        (ef + (ef * (2.0 + ef)).sqrt()).ln_1p()
    } else {
        // acosh(c) = ln(2c) up to 1/(4c^2)
        ln_rational(&(e + Rational::one())) + std::f64::consts::LN_2
    }
}

pub fn is_square(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer();
    let d = r.denom();
    let sn = n.sqrt();
    let sd = d.sqrt();
    if &(&sn * &sn) == n && &(&sd * &sd) == d {
        Some(Rational::new(sn, sd))
    } else {
        None
    }
}

/// `r + s·√d`, with `d > 0` not a rational square whenever `s != 0`.
/// Rational values are stored with `s = 0, d = 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Quadratic {
    #[serde(with = "serde_rational")]
    pub r: Rational,
    #[serde(with = "serde_rational")]
    pub s: Rational,
    #[serde(with = "serde_rational")]
    pub d: Rational,
}

impl Quadratic {
    pub fn rational(r: Rational) -> Self {
        Quadratic { r, s: Rational::zero(), d: Rational::zero() }
    }

    /// Builds `r + s·√d`, folding the root when `d` is a square.
    pub fn new(r: Rational, s: Rational, d: Rational) -> Self {
        assert!(!d.is_negative(), "negative radicand");
        if s.is_zero() || d.is_zero() {
            return Self::rational(r);
        }
        match is_square(&d) {
            Some(root) => Self::rational(r + s * root),
            None => Quadratic { r, s, d },
        }
    }

    pub fn is_rational(&self) -> bool {
        self.s.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.r.is_zero() && self.s.is_zero()
    }

    /// Both operands must live in the same field (same radicand) unless one is rational.
    fn radicand_with(&self, other: &Quadratic) -> Rational {
        match (self.is_rational(), other.is_rational()) {
            (true, _) => other.d.clone(),
            (_, true) => self.d.clone(),
            _ => {
                assert_eq!(self.d, other.d, "mixed quadratic fields");
                self.d.clone()
            }
        }
    }

    pub fn add(&self, other: &Quadratic) -> Quadratic {
        let d = self.radicand_with(other);
        Quadratic::new(&self.r + &other.r, &self.s + &other.s, d)
    }

    pub fn sub(&self, other: &Quadratic) -> Quadratic {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Quadratic {
        Quadratic { r: -&self.r, s: -&self.s, d: self.d.clone() }
    }

    pub fn mul(&self, other: &Quadratic) -> Quadratic {
        let d = self.radicand_with(other);
        let r = &self.r * &other.r + &self.s * &other.s * &d;
        let s = &self.r * &other.s + &self.s * &other.r;
        Quadratic::new(r, s, d)
    }

    pub fn scale(&self, k: &Rational) -> Quadratic {
        Quadratic::new(&self.r * k, &self.s * k, self.d.clone())
    }

    pub fn conj(&self) -> Quadratic {
        Quadratic { r: self.r.clone(), s: -&self.s, d: self.d.clone() }
    }

    /// Field norm `r² − s²d`.
    pub fn norm(&self) -> Rational {
        &self.r * &self.r - &self.s * &self.s * &self.d
    }

    pub fn recip(&self) -> Option<Quadratic> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        Some(self.conj().scale(&n.recip()))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_rational() {
            to_f64(&self.r)
        } else {
            to_f64(&self.r) + to_f64(&self.s) * to_f64(&self.d).sqrt()
        }
    }

    pub fn signum(&self) -> Ordering {
        // sign of r + s√d, decided exactly
        let sr = self.r.cmp(&Rational::zero());
        let ss = self.s.cmp(&Rational::zero());
        if ss == Ordering::Equal {
            return sr;
        }
        if sr == Ordering::Equal || sr == ss {
            return ss;
        }
        // opposite signs: compare r² with s²d
        let lhs = &self.r * &self.r;
        let rhs = &self.s * &self.s * &self.d;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sr,
            Ordering::Less => ss,
            Ordering::Equal => Ordering::Equal,
        }
    }
}

impl PartialEq for Quadratic {
    /// Exact equality of real numbers, valid across different radicands.
    fn eq(&self, other: &Self) -> bool {
        match (self.is_rational(), other.is_rational()) {
            (true, true) => self.r == other.r,
            (false, false) => {
                self.r == other.r
                    && self.s.signum() == other.s.signum()
                    && &self.s * &self.s * &self.d == &other.s * &other.s * &other.d
            }
            _ => false,
        }
    }
}

impl Eq for Quadratic {}

impl fmt::Display for Quadratic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            return write!(f, "{}", self.r);
        }
        let sign = if self.s.is_negative() { '-' } else { '+' };
        write!(f, "{} {} {}·√({})", self.r, sign, self.s.abs(), self.d)
    }
}

/// Serializes a `BigRational` as a `"p/q"` string.
pub mod serde_rational {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(D::Error::custom)
    }
}

pub mod serde_rational_opt {
    use super::{format_rational, parse_rational, Rational};
    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        r.as_ref().map(format_rational).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let text = Option::<String>::deserialize(d)?;
        text.map(|t| parse_rational(&t).map_err(D::Error::custom)).transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_formats() {
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x/2").is_err());
        assert_eq!(format_rational(&int(3)), "3/1");
    }

    #[test]
    fn quadratic_equality_across_radicands() {
        // √8 = 2√2
        let a = Quadratic::new(int(1), int(1), int(8));
        let b = Quadratic::new(int(1), int(2), int(2));
        assert_eq!(a, b);
        let c = Quadratic::new(int(1), int(-2), int(2));
        assert_ne!(a, c);
        let sq = Quadratic::new(int(1), int(1), int(9));
        assert!(sq.is_rational());
        assert_eq!(sq.r, int(4));
    }

    #[test]
    fn quadratic_sign_and_inverse() {
        // 1 - √2 < 0
        let q = Quadratic::new(int(1), int(-1), int(2));
        assert_eq!(q.signum(), Ordering::Less);
        let inv = q.recip().unwrap();
        let one = q.mul(&inv);
        assert_eq!(one, Quadratic::rational(int(1)));
    }

    #[test]
    fn acosh_matches_float() {
        let e = rat(9, 8);
        assert!((acosh_one_plus(&e) - (17.0f64 / 8.0).acosh()).abs() < 1e-15);
        let huge = Rational::from_integer(BigInt::from(10).pow(400));
        let v = acosh_one_plus(&huge);
        assert!((v - (400.0 * 10f64.ln() + 2f64.ln())).abs() < 1e-9);
    }
}
