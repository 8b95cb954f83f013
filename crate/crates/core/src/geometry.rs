//! Model-independent primitives: distances, Gromov products, δ estimation and
//! translation-length estimation.

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{acosh_one_plus, serde_rational, Rational};
use crate::error::{check_same, Error, Result};
use crate::models::bass_serre;
use crate::models::free_group::FreeGroup;
use crate::models::plane::PlanePoint;
use crate::models::tree::TreeGroup;
use crate::models::{Isometry, IsometryClass, Point, SpaceModel};

/// Exact companion of a length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExactValue {
    /// `cosh` of the length, as an exact rational (half-plane).
    Cosh(#[serde(with = "serde_rational")] Rational),
    /// Integer edge count (trees).
    Integer(u64),
}

impl ExactValue {
    pub fn to_f64(&self) -> f64 {
        match self {
            ExactValue::Cosh(c) => acosh_one_plus(&(c - Rational::one())),
            ExactValue::Integer(n) => *n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Length {
    /// Floating-point value, for display only.
    #[serde(rename = "approx")]
    pub value: f64,
    pub exact: Option<ExactValue>,
}

impl Length {
    pub fn integer(n: u64) -> Self {
        Length { value: n as f64, exact: Some(ExactValue::Integer(n)) }
    }

    /// The length whose hyperbolic cosine is `c >= 1`.
    pub fn cosh(c: Rational) -> Self {
        let value = acosh_one_plus(&(&c - Rational::one()));
        Length { value, exact: Some(ExactValue::Cosh(c)) }
    }

    pub fn approx(value: f64) -> Self {
        Length { value, exact: None }
    }

    pub fn exact_cosh(&self) -> Option<&Rational> {
        match &self.exact {
            Some(ExactValue::Cosh(c)) => Some(c),
            _ => None,
        }
    }

    pub fn exact_integer(&self) -> Option<u64> {
        match &self.exact {
            Some(ExactValue::Integer(n)) => Some(*n),
            _ => None,
        }
    }

    /// Zero, decided exactly when an exact companion is present.
    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(ExactValue::Cosh(c)) => c.is_one(),
            Some(ExactValue::Integer(n)) => *n == 0,
            None => self.value == 0.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaCondition {
    Slim,
    Insize,
    FourPoint,
}

/// Largest defect seen over a sample: a lower bound on the true constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: f64,
    pub condition: DeltaCondition,
    pub sample_size: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TranslationLengthEstimate {
    pub value: f64,
    pub n_used: u32,
    /// Set when `value` came from an exact model formula.
    pub exact: bool,
    pub exact_value: Option<ExactValue>,
    /// A certified `t > 0` with `t|m - n| <= d(f^m x, f^n x)`.
    pub lower_bound_t: Option<f64>,
}

impl TranslationLengthEstimate {
    pub fn exact(value: f64, exact_value: ExactValue, n_used: u32) -> Self {
        TranslationLengthEstimate {
            value,
            n_used,
            exact: true,
            exact_value: Some(exact_value),
            lower_bound_t: (value > 0.0).then_some(value),
        }
    }
}

pub fn distance(model: &SpaceModel, x: &Point, y: &Point) -> Result<Length> {
    check_same(model.kind(), x.model())?;
    check_same(model.kind(), y.model())?;
    Ok(match (x, y) {
        (Point::Plane(p), Point::Plane(q)) => Length::cosh(p.cosh_excess(q) + Rational::one()),
        (Point::Cayley { rank, word: u }, Point::Cayley { word: v, .. }) => {
            let g = FreeGroup { rank: *rank };
            Length::integer(g.mul(&g.inverse(u), v).len() as u64)
        }
        (Point::BassSerre { vertex: u, .. }, Point::BassSerre { vertex: v, .. }) => {
            Length::integer(bass_serre::distance(u, v))
        }
        _ => unreachable!(),
    })
}

/// `⟨x|y⟩_w = ½(d(x,w) + d(w,y) − d(x,y))`; exact integers in trees.
pub fn gromov_product(model: &SpaceModel, x: &Point, y: &Point, w: &Point) -> Result<Length> {
    let a = distance(model, x, w)?;
    let b = distance(model, w, y)?;
    let c = distance(model, x, y)?;
    if let (Some(a), Some(b), Some(c)) = (a.exact_integer(), b.exact_integer(), c.exact_integer()) {
        return Ok(Length::integer((a + b - c) / 2));
    }
    Ok(Length::approx((0.5 * (a.value + b.value - c.value)).max(0.0)))
}

fn distance_matrix(model: &SpaceModel, points: &[Point]) -> Result<Vec<Vec<f64>>> {
    for p in points {
        check_same(model.kind(), p.model())?;
    }
    Ok((0..points.len())
        .into_par_iter()
        .map(|i| {
            (0..points.len())
                .map(|j| distance(model, &points[i], &points[j]).expect("checked").value)
                .collect()
        })
        .collect())
}

fn four_point_defect(dist: &[Vec<f64>], w: usize) -> f64 {
    let n = dist.len();
    let gp: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (dist[i][w] + dist[w][j] - dist[i][j])).collect())
        .collect();
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            let gxy = gp[x][y];
            for z in 0..n {
                let d = gxy.min(gp[y][z]) - gp[x][z];
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    worst
}

/// Four-point δ over ordered triples of `sample`, seen from `base`.
pub fn estimate_delta_four_point(model: &SpaceModel, sample: &[Point], base: &Point) -> Result<DeltaEstimate> {
    if sample.len() < 3 {
        return Err(Error::InsufficientSample { got: sample.len(), need: 3 });
    }
    let mut points = sample.to_vec();
    points.push(base.clone());
    let dist = distance_matrix(model, &points)?;
    let n = sample.len() as u64;
    Ok(DeltaEstimate {
        delta: four_point_defect(&dist, sample.len()).max(0.0),
        condition: DeltaCondition::FourPoint,
        sample_size: n * n * n,
    })
}

/// Four-point δ with every sample point used in turn as the base.
pub fn estimate_delta_four_point_all_bases(model: &SpaceModel, sample: &[Point]) -> Result<DeltaEstimate> {
    if sample.len() < 3 {
        return Err(Error::InsufficientSample { got: sample.len(), need: 3 });
    }
    let dist = distance_matrix(model, sample)?;
    let delta = (0..sample.len())
        .into_par_iter()
        .map(|w| four_point_defect(&dist, w))
        .reduce(|| 0.0, f64::max);
    let n = sample.len() as u64;
    Ok(DeltaEstimate { delta, condition: DeltaCondition::FourPoint, sample_size: n * n * n * n })
}

// Float hyperboloid coordinates for geodesics in the half-plane.
fn to_hyperboloid(x: f64, y: f64) -> [f64; 3] {
    let r2 = x * x + y * y;
    [(r2 + 1.0) / (2.0 * y), (r2 - 1.0) / (2.0 * y), x / y]
}

fn from_hyperboloid(h: [f64; 3]) -> (f64, f64) {
    let y = 1.0 / (h[0] - h[1]);
    (h[2] * y, y)
}

fn float_distance(p: (f64, f64), q: (f64, f64)) -> f64 {
    let dx = p.0 - q.0;
    let dy = p.1 - q.1;
    let e = (dx * dx + dy * dy) / (2.0 * p.1 * q.1);
    (e + (e * (2.0 + e)).sqrt()).ln_1p()
}

/// Float point at distance `s` from `p` towards `q`.
pub(crate) fn float_geodesic(p: (f64, f64), q: (f64, f64), s: f64) -> (f64, f64) {
    let d = float_distance(p, q);
    if d == 0.0 {
        return p;
    }
    let (hp, hq) = (to_hyperboloid(p.0, p.1), to_hyperboloid(q.0, q.1));
    let sd = d.sinh();
    let (u, v) = ((d - s).sinh() / sd, s.sinh() / sd);
    from_hyperboloid([u * hp[0] + v * hq[0], u * hp[1] + v * hq[1], u * hp[2] + v * hq[2]])
}

/// Rational point on the geodesic `[p, q]` at distance `t` from `p`, accurate
/// to double precision.
pub fn plane_geodesic_point(p: &PlanePoint, q: &PlanePoint, t: f64) -> PlanePoint {
    let d = p.distance(q);
    if t <= 0.0 || d == 0.0 {
        return p.clone();
    }
    if t >= d {
        return q.clone();
    }
    let (x, y) = float_geodesic(p.to_f64(), q.to_f64(), t);
    let y = if y > 0.0 { y } else { f64::MIN_POSITIVE };
    PlanePoint {
        x: Rational::from_float(x).unwrap_or_default(),
        y: Rational::from_float(y).expect("finite"),
    }
}

/// Distance from `p` to the geodesic segment `[a, b]`.
pub fn distance_to_segment(model: &SpaceModel, p: &Point, a: &Point, b: &Point) -> Result<f64> {
    if model.kind().is_tree() {
        return Ok(gromov_product(model, a, b, p)?.value);
    }
    check_same(model.kind(), p.model())?;
    check_same(model.kind(), a.model())?;
    check_same(model.kind(), b.model())?;
    let (pf, af, bf) = match (p, a, b) {
        (Point::Plane(p), Point::Plane(a), Point::Plane(b)) => (p.to_f64(), a.to_f64(), b.to_f64()),
        _ => unreachable!(),
    };
    let len = float_distance(af, bf);
    // distance to a point moving along a geodesic is convex in the parameter
    let f = |s: f64| float_distance(pf, float_geodesic(af, bf, s));
    let (mut lo, mut hi) = (0.0, len);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..80 {
        let m1 = hi - phi * (hi - lo);
        let m2 = lo + phi * (hi - lo);
        if f(m1) <= f(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    Ok(f(0.5 * (lo + hi)).min(f(0.0)).min(f(len)))
}

/// Slim-triangle δ: the largest distance from a point of one side to the union
/// of the other two, over the given triangles. `resolution` points per side are
/// tested in the plane; trees test every vertex.
pub fn estimate_delta_slim(
    model: &SpaceModel,
    triangles: &[(Point, Point, Point)],
    resolution: usize,
) -> Result<DeltaEstimate> {
    let per: Vec<(f64, u64)> = triangles
        .par_iter()
        .map(|(x, y, z)| -> Result<(f64, u64)> {
            let mut worst = 0.0f64;
            let mut count = 0u64;
            for (a, b, c) in [(x, y, z), (y, z, x), (z, x, y)] {
                let len = distance(model, a, b)?;
                let steps = match len.exact_integer() {
                    Some(n) => n as usize,
                    None => resolution.max(1),
                };
                for k in 0..=steps {
                    let t = len.value * k as f64 / steps.max(1) as f64;
                    let p = model.geodesic_point(a, b, t)?;
                    let d = distance_to_segment(model, &p, b, c)?.min(distance_to_segment(model, &p, c, a)?);
                    worst = worst.max(d);
                    count += 1;
                }
            }
            Ok((worst, count))
        })
        .collect::<Result<_>>()?;
    Ok(DeltaEstimate {
        delta: per.iter().map(|p| p.0).fold(0.0, f64::max),
        condition: DeltaCondition::Slim,
        sample_size: per.iter().map(|p| p.1).sum(),
    })
}

/// Orbit estimate `d(x, gⁿx)/n` at `n = n_max`, with the exact translation
/// length attached when classification provides one.
pub fn estimate_translation_length(
    model: &SpaceModel,
    g: &Isometry,
    basepoint: &Point,
    n_max: u32,
) -> Result<TranslationLengthEstimate> {
    if n_max < 1 {
        return Err(Error::InvalidArgument("n_max must be positive".into()));
    }
    let gn = g.pow(i64::from(n_max));
    let moved = model.apply(&gn, basepoint)?;
    let d = distance(model, basepoint, &moved)?;
    let exact_value = match model.classify(g)? {
        IsometryClass::Hyperbolic(h) => h.translation_length.exact_value,
        IsometryClass::Elliptic(_) if model.kind().is_tree() => Some(ExactValue::Integer(0)),
        IsometryClass::Elliptic(_) => Some(ExactValue::Cosh(Rational::one())),
        IsometryClass::HypothesisViolation { .. } => None,
    };
    Ok(TranslationLengthEstimate {
        value: d.value / f64::from(n_max),
        n_used: n_max,
        exact: false,
        exact_value,
        lower_bound_t: None,
    })
}

/// Float value of an exact length, for tolerance checks.
pub fn exact_to_f64(v: &ExactValue) -> f64 {
    match v {
        ExactValue::Cosh(c) => acosh_one_plus(&(c - Rational::one())),
        ExactValue::Integer(n) => n.to_f64().unwrap_or(f64::INFINITY),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, rat};
    use crate::models::plane::Mat2;

    fn pp(x: i64, y: i64) -> Point {
        Point::plane(int(x), int(y)).unwrap()
    }

    #[test]
    fn plane_distance_exact_cosh() {
        let h = SpaceModel::half_plane();
        let d = distance(&h, &pp(0, 1), &pp(0, 4)).unwrap();
        assert_eq!(d.exact_cosh(), Some(&rat(17, 8)));
        assert!((d.value - 4f64.ln()).abs() < 1e-14);
        assert!((d.value - (17.0f64 / 8.0).acosh()).abs() < 1e-14);
        assert!(distance(&h, &pp(3, 2), &pp(3, 2)).unwrap().is_zero());
    }

    #[test]
    fn plane_gromov_on_geodesic() {
        let h = SpaceModel::half_plane();
        let g = gromov_product(&h, &pp(0, 1), &pp(0, 4), &pp(0, 2)).unwrap();
        // w on the geodesic: the product is zero, and d(x,w) = d(w,y) = ln 2
        assert!(g.value.abs() < 1e-12);
        let dxw = distance(&h, &pp(0, 1), &pp(0, 2)).unwrap().value;
        assert!((dxw - 2f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn cayley_distance_and_gromov() {
        let t = SpaceModel::cayley_tree(2, 4).unwrap();
        let x = Point::Cayley { rank: 2, word: FreeGroup { rank: 2 }.parse("ab").unwrap() };
        let y = Point::Cayley { rank: 2, word: FreeGroup { rank: 2 }.parse("aab").unwrap() };
        assert_eq!(distance(&t, &x, &y).unwrap().exact_integer(), Some(3));
        let ball = t.ball().unwrap();
        assert_eq!(ball.bfs_distance(&x, &y).unwrap(), 3);
        let g = gromov_product(&t, &x, &y, &t.basepoint()).unwrap();
        assert_eq!(g.exact_integer(), Some(1));
    }

    #[test]
    fn four_point_needs_three() {
        let h = SpaceModel::half_plane();
        let err = estimate_delta_four_point(&h, &[pp(0, 1), pp(0, 2)], &pp(0, 1)).unwrap_err();
        assert_eq!(err, Error::InsufficientSample { got: 2, need: 3 });
    }

    #[test]
    fn collinear_sample_has_zero_delta() {
        let h = SpaceModel::half_plane();
        let s = [pp(0, 1), pp(0, 3), pp(0, 9)];
        let d = estimate_delta_four_point(&h, &s, &pp(0, 1)).unwrap();
        assert!(d.delta < 1e-12);
    }

    #[test]
    fn geodesic_point_hits_the_right_distance() {
        let (p, q) = (PlanePoint::i(), PlanePoint::new(int(6), int(1)).unwrap());
        let d = p.distance(&q);
        for k in 1..8 {
            let t = d * f64::from(k) / 8.0;
            let m = plane_geodesic_point(&p, &q, t);
            assert!((p.distance(&m) - t).abs() < 1e-9);
            assert!((m.distance(&q) - (d - t)).abs() < 1e-9);
        }
    }

    #[test]
    fn orbit_estimate_for_golden_matrix() {
        let h = SpaceModel::half_plane();
        let g = Isometry::Mobius(Mat2::from_ints(2, 1, 1, 1).unwrap());
        let e = estimate_translation_length(&h, &g, &h.basepoint(), 64).unwrap();
        let tau = 2.0 * 1.5f64.acosh();
        assert!((e.value - tau).abs() < 0.1);
        assert!(e.value >= tau - 1e-12);
        assert_eq!(e.exact_value, Some(ExactValue::Cosh(rat(7, 2))));
    }

    #[test]
    fn slim_tree_is_zero() {
        let t = SpaceModel::bass_serre(2, 3, 4).unwrap();
        let p = |s: &str| t.apply(&t.parse_isometry(s).unwrap(), &t.basepoint()).unwrap();
        let tri = vec![(p("tst"), p("t^2st"), p("st^2s"))];
        assert_eq!(estimate_delta_slim(&t, &tri, 8).unwrap().delta, 0.0);
    }
}
