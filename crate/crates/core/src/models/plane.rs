//! Upper half-plane model: exact rational points, `PSL(2, Q)` Möbius maps and
//! boundary points in real quadratic fields.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{acosh_one_plus, int, is_square, ln_rational, serde_rational, Quadratic, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PlanePoint {
    #[serde(with = "serde_rational")]
    pub x: Rational,
    #[serde(with = "serde_rational")]
    pub y: Rational,
}

impl PlanePoint {
    pub fn new(x: Rational, y: Rational) -> Result<Self> {
        if !y.is_positive() {
            return Err(Error::InvalidPoint(format!("half-plane point needs y > 0, got {y}")));
        }
        Ok(PlanePoint { x, y })
    }

    pub fn i() -> Self {
        PlanePoint { x: Rational::zero(), y: Rational::one() }
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (crate::arith::to_f64(&self.x), crate::arith::to_f64(&self.y))
    }

    /// `cosh d(p, q) - 1`, exactly.
    pub fn cosh_excess(&self, other: &PlanePoint) -> Rational {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        (&dx * &dx + &dy * &dy) / (int(2) * &self.y * &other.y)
    }

    pub fn distance(&self, other: &PlanePoint) -> f64 {
        acosh_one_plus(&self.cosh_excess(other))
    }
}

impl fmt::Display for PlanePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A point of the real projective line: `∞` or a real quadratic number.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PlaneBoundary {
    Infinity,
    Finite(Quadratic),
}

impl PlaneBoundary {
    pub fn rational(r: Rational) -> Self {
        PlaneBoundary::Finite(Quadratic::rational(r))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            PlaneBoundary::Infinity => f64::INFINITY,
            PlaneBoundary::Finite(q) => q.to_f64(),
        }
    }
}

impl fmt::Display for PlaneBoundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaneBoundary::Infinity => write!(f, "∞"),
            PlaneBoundary::Finite(q) => write!(f, "{q}"),
        }
    }
}

/// Determinant-one rational matrix, identified with its negation.
///
/// The stored representative has its first nonzero entry of the top row positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2 {
    #[serde(with = "serde_rational")]
    pub a: Rational,
    #[serde(with = "serde_rational")]
    pub b: Rational,
    #[serde(with = "serde_rational")]
    pub c: Rational,
    #[serde(with = "serde_rational")]
    pub d: Rational,
}

impl Mat2 {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        let det = &a * &d - &b * &c;
        if !det.is_one() {
            return Err(Error::InvalidIsometry(format!("determinant is {det}, expected 1")));
        }
        Ok(Mat2 { a, b, c, d }.normalized())
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(int(a), int(b), int(c), int(d))
    }

    pub fn identity() -> Self {
        Mat2 { a: Rational::one(), b: Rational::zero(), c: Rational::zero(), d: Rational::one() }
    }

    fn normalized(self) -> Self {
        let lead = if self.a.is_zero() { &self.b } else { &self.a };
        if lead.is_negative() {
            Mat2 { a: -self.a, b: -self.b, c: -self.c, d: -self.d }
        } else {
            self
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat2::identity()
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        Mat2 {
            a: &self.a * &o.a + &self.b * &o.c,
            b: &self.a * &o.b + &self.b * &o.d,
            c: &self.c * &o.a + &self.d * &o.c,
            d: &self.c * &o.b + &self.d * &o.d,
        }
        .normalized()
    }

    pub fn inverse(&self) -> Mat2 {
        Mat2 { a: self.d.clone(), b: -&self.b, c: -&self.c, d: self.a.clone() }.normalized()
    }

    pub fn trace(&self) -> Rational {
        &self.a + &self.d
    }

    /// `|tr|`, well defined projectively.
    pub fn abs_trace(&self) -> Rational {
        self.trace().abs()
    }

    /// Trace of `self · other` without forming the product.
    pub fn trace_of_product(&self, o: &Mat2) -> Rational {
        &self.a * &o.a + &self.b * &o.c + &self.c * &o.b + &self.d * &o.d
    }

    pub fn pow(&self, n: i64) -> Mat2 {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut e = n.unsigned_abs();
        let mut acc = Mat2::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// Möbius action `z ↦ (az + b)/(cz + d)`.
    pub fn apply(&self, p: &PlanePoint) -> PlanePoint {
        let cx_d = &self.c * &p.x + &self.d;
        let cy = &self.c * &p.y;
        let den = &cx_d * &cx_d + &cy * &cy;
        let ax_b = &self.a * &p.x + &self.b;
        let re = (&ax_b * &cx_d + &self.a * &self.c * &p.y * &p.y) / &den;
        let im = &p.y / &den;
        PlanePoint { x: re, y: im }
    }

    pub fn apply_boundary(&self, xi: &PlaneBoundary) -> PlaneBoundary {
        match xi {
            PlaneBoundary::Infinity => {
                if self.c.is_zero() {
                    PlaneBoundary::Infinity
                } else {
                    PlaneBoundary::rational(&self.a / &self.c)
                }
            }
            PlaneBoundary::Finite(q) => {
                let num = q.scale(&self.a).add(&Quadratic::rational(self.b.clone()));
                let den = q.scale(&self.c).add(&Quadratic::rational(self.d.clone()));
                match den.recip() {
                    None => PlaneBoundary::Infinity,
                    Some(inv) => PlaneBoundary::Finite(num.mul(&inv)),
                }
            }
        }
    }

    /// Exact test of the fixed-point equation `cξ² + (d − a)ξ − b = 0`.
    pub fn fixes_boundary(&self, xi: &PlaneBoundary) -> bool {
        match xi {
            PlaneBoundary::Infinity => self.c.is_zero(),
            PlaneBoundary::Finite(q) => {
                let lhs = q
                    .mul(q)
                    .scale(&self.c)
                    .add(&q.scale(&(&self.d - &self.a)))
                    .sub(&Quadratic::rational(self.b.clone()));
                lhs.is_zero()
            }
        }
    }

    /// Attracting and repelling fixed points of a hyperbolic matrix (`|tr| > 2`).
    pub fn hyperbolic_fixed_points(&self) -> (PlaneBoundary, PlaneBoundary) {
        let tr = self.trace();
        debug_assert!(tr.abs() > int(2));
        if self.c.is_zero() {
            // z ↦ a²z + ab
            let finite = PlaneBoundary::rational(&self.b / (&self.d - &self.a));
            return if self.a.abs() > Rational::one() {
                (PlaneBoundary::Infinity, finite)
            } else {
                (finite, PlaneBoundary::Infinity)
            };
        }
        // Eigenvalue at the fixed point z is cz + d = (tr ± √disc)/2; the one of
        // larger modulus has the sign of tr and gives the attracting point.
        let disc = &tr * &tr - int(4);
        let two_c = int(2) * &self.c;
        let centre = (&self.a - &self.d) / &two_c;
        let coeff = Rational::one() / &two_c;
        let sign = if tr.is_positive() { Rational::one() } else { -Rational::one() };
        let plus = Quadratic::new(centre.clone(), &coeff * &sign, disc.clone());
        let minus = Quadratic::new(centre, -(&coeff * &sign), disc);
        (PlaneBoundary::Finite(plus), PlaneBoundary::Finite(minus))
    }

    /// Fixed point in ℍ² of an elliptic matrix (`|tr| < 2`).
    pub fn elliptic_centre(&self) -> EllipticCentre {
        let tr = self.trace();
        let two_c = int(2) * &self.c;
        EllipticCentre {
            re: (&self.a - &self.d) / &two_c,
            im_sq: (int(4) - &tr * &tr) / (&two_c * &two_c),
        }
    }

    /// Order in `PSL(2, R)` of an elliptic or identity element, when finite.
    ///
    /// Rational traces of finite-order rotations are 0 and ±1 only.
    pub fn projective_order(&self) -> Option<u64> {
        if self.is_identity() {
            return Some(1);
        }
        let t = self.abs_trace();
        if t.is_zero() {
            Some(2)
        } else if t.is_one() {
            Some(3)
        } else {
            None
        }
    }
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{}, {}], [{}, {}]]", self.a, self.b, self.c, self.d)
    }
}

/// Exact fixed point `re + i·√im_sq` of an elliptic Möbius map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllipticCentre {
    #[serde(with = "serde_rational")]
    pub re: Rational,
    #[serde(with = "serde_rational")]
    pub im_sq: Rational,
}

impl EllipticCentre {
    pub fn rational_point(&self) -> Option<PlanePoint> {
        is_square(&self.im_sq).map(|y| PlanePoint { x: self.re.clone(), y })
    }

    /// Real and imaginary parts of `c z² + (d − a) z − b` vanish.
    pub fn is_fixed_by(&self, m: &Mat2) -> bool {
        let real = &m.c * (&self.re * &self.re - &self.im_sq) + (&m.d - &m.a) * &self.re - &m.b;
        let imag = int(2) * &m.c * &self.re + (&m.d - &m.a);
        real.is_zero() && imag.is_zero() && self.im_sq.is_positive()
    }
}

/// `ln |q|` for a nonzero quadratic number, robust to cancellation and overflow.
pub(crate) fn ln_abs_quadratic(q: &Quadratic) -> f64 {
    assert!(!q.is_zero());
    if q.is_rational() {
        return ln_rational(&q.r.abs());
    }
    let lse = |x: f64, y: f64| {
        let (hi, lo) = if x > y { (x, y) } else { (y, x) };
        hi + (lo - hi).exp().ln_1p()
    };
    let ln_s_root = ln_rational(&q.s.abs()) + 0.5 * ln_rational(&q.d);
    if q.r.is_zero() {
        return ln_s_root;
    }
    let ln_r = ln_rational(&q.r.abs());
    let same_sign = q.r.signum() == q.s.signum();
    if same_sign {
        lse(ln_r, ln_s_root)
    } else {
        // |r + s√d| = |r² − s²d| / (|r| + |s|√d)
        ln_rational(&q.norm().abs()) - lse(ln_r, ln_s_root)
    }
}

fn sq_dist_to_boundary(p: &PlanePoint, xi: &Quadratic) -> Quadratic {
    // (x − ξ)² + y²
    let dx = Quadratic::rational(p.x.clone()).sub(xi);
    dx.mul(&dx).add(&Quadratic::rational(&p.y * &p.y))
}

/// Gromov product `⟨ξ|y⟩_w` for a boundary point ξ, via the Busemann function.
pub fn gromov_boundary_point(xi: &PlaneBoundary, y: &PlanePoint, w: &PlanePoint) -> f64 {
    let busemann = match xi {
        PlaneBoundary::Infinity => ln_rational(&w.y) - ln_rational(&y.y),
        PlaneBoundary::Finite(q) => {
            (ln_rational(&w.y) - ln_abs_quadratic(&sq_dist_to_boundary(w, q)))
                - (ln_rational(&y.y) - ln_abs_quadratic(&sq_dist_to_boundary(y, q)))
        }
    };
    (0.5 * (w.distance(y) - busemann)).max(0.0)
}

/// Gromov product of two boundary points seen from `w`; infinite when equal.
pub fn gromov_boundary_boundary(xi: &PlaneBoundary, eta: &PlaneBoundary, w: &PlanePoint) -> f64 {
    if xi == eta {
        return f64::INFINITY;
    }
    let ln_v = ln_rational(&w.y);
    let v = match (xi, eta) {
        (PlaneBoundary::Infinity, PlaneBoundary::Finite(q))
        | (PlaneBoundary::Finite(q), PlaneBoundary::Infinity) => {
            0.5 * (ln_abs_quadratic(&sq_dist_to_boundary(w, q)) - 2.0 * ln_v)
        }
        (PlaneBoundary::Finite(p), PlaneBoundary::Finite(q)) => {
            let ln_gap = if p.is_rational() || q.is_rational() || p.d == q.d {
                ln_abs_quadratic(&p.sub(q))
            } else {
                (p.to_f64() - q.to_f64()).abs().ln()
            };
            0.5 * (ln_abs_quadratic(&sq_dist_to_boundary(w, p))
                + ln_abs_quadratic(&sq_dist_to_boundary(w, q))
                - 2.0 * ln_gap
                - 2.0 * ln_v)
        }
        (PlaneBoundary::Infinity, PlaneBoundary::Infinity) => unreachable!(),
    };
    v.max(0.0)
}

/// Orders boundary points by exact real value, with ∞ last.
pub fn boundary_cmp(a: &PlaneBoundary, b: &PlaneBoundary) -> Ordering {
    match (a, b) {
        (PlaneBoundary::Infinity, PlaneBoundary::Infinity) => Ordering::Equal,
        (PlaneBoundary::Infinity, _) => Ordering::Greater,
        (_, PlaneBoundary::Infinity) => Ordering::Less,
        (PlaneBoundary::Finite(p), PlaneBoundary::Finite(q)) => {
            if p == q {
                Ordering::Equal
            } else if p.is_rational() || q.is_rational() || p.d == q.d {
                p.sub(q).signum()
            } else {
                p.to_f64().total_cmp(&q.to_f64())
            }
        }
    }
}
