//! Executable checks of the boundary dynamics behind the combination theorem:
//! North–South dynamics, neighborhood separation, internal points of
//! triangles, local quasi-geodesics and orbit projections.
//!
//! Everything here is sampling-based and diagnostic; the combiner never calls it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::action::{Action, GroupWord};
use crate::error::{check_same, Error, Result};
use crate::geometry::{distance, gromov_product, DeltaCondition, DeltaEstimate, Length};
use crate::models::{BoundaryPoint, Isometry, IsometryClass, Point, SpaceModel};

/// The boundary neighborhood `{y : ⟨center|y⟩_base > threshold}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NeighborhoodSpec {
    pub center: BoundaryPoint,
    pub threshold: f64,
    pub base: Point,
}

impl NeighborhoodSpec {
    pub fn new(center: BoundaryPoint, threshold: f64, base: Point) -> Result<Self> {
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(Error::InvalidArgument(format!("threshold must be finite and >= 0, got {threshold}")));
        }
        check_same(center.model(), base.model())?;
        Ok(NeighborhoodSpec { center, threshold, base })
    }

    pub fn contains(&self, model: &SpaceModel, y: &Point) -> Result<bool> {
        Ok(model.gromov_boundary(&self.center, y, &self.base)? > self.threshold)
    }

    pub fn contains_boundary(&self, model: &SpaceModel, eta: &BoundaryPoint) -> Result<bool> {
        Ok(model.gromov_boundaries(&self.center, eta, &self.base)? > self.threshold)
    }
}

fn check_disjoint(model: &SpaceModel, u: &NeighborhoodSpec, v: &NeighborhoodSpec, sample: &[Point]) -> Result<()> {
    let centers = model.gromov_boundaries(&u.center, &v.center, &u.base)?;
    if centers >= u.threshold.min(v.threshold) {
        return Err(Error::InvalidArgument(format!(
            "neighborhoods are not disjoint: centers have Gromov product {centers:.4}"
        )));
    }
    for y in sample {
        if u.contains(model, y)? && v.contains(model, y)? {
            return Err(Error::InvalidArgument(format!("neighborhoods overlap at {y}")));
        }
    }
    Ok(())
}

fn hyperbolic_image(action: &Action, word: &GroupWord) -> Result<Isometry> {
    let iso = action.evaluate(word)?;
    if !iso.is_hyperbolic() {
        return Err(Error::NotHyperbolic(format!("{word} in action {}", action.name)));
    }
    Ok(iso)
}

/// Least `N <= n_max` such that `fⁿ` maps every sampled point outside `U₋`
/// into `U₊` for all `N <= n <= n_max`.
pub fn ns_dynamics_check(
    action: &Action,
    word: &GroupWord,
    u_plus: &NeighborhoodSpec,
    u_minus: &NeighborhoodSpec,
    sample: &[Point],
    n_max: u32,
) -> Result<u32> {
    let model = &action.model;
    let f = hyperbolic_image(action, word)?;
    if n_max == 0 {
        return Err(Error::NoPassingN { n_max });
    }
    check_disjoint(model, u_plus, u_minus, sample)?;
    let last_fail: Vec<u32> = sample
        .par_iter()
        .map(|y| -> Result<u32> {
            if u_minus.contains(model, y)? {
                return Ok(0);
            }
            let mut last = 0;
            let mut p = y.clone();
            for n in 1..=n_max {
                p = model.apply(&f, &p)?;
                if !u_plus.contains(model, &p)? {
                    last = n;
                }
            }
            Ok(last)
        })
        .collect::<Result<_>>()?;
    let n = last_fail.into_iter().max().unwrap_or(0) + 1;
    if n > n_max {
        return Err(Error::NoPassingN { n_max });
    }
    Ok(n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub passed: bool,
    /// A sampled point of `U₊` mapped into `U₋`.
    pub witness: Option<Point>,
    /// Number of sampled points lying in `U₊`.
    pub tested: usize,
}

/// Sampled test of `g·U₊ ∩ U₋ = ∅`.
pub fn separation_check(
    action: &Action,
    g: &GroupWord,
    u_plus: &NeighborhoodSpec,
    u_minus: &NeighborhoodSpec,
    sample: &[Point],
) -> Result<SeparationResult> {
    let model = &action.model;
    check_same(model.kind(), u_plus.center.model())?;
    check_same(model.kind(), u_minus.center.model())?;
    let iso = action.evaluate(g)?;
    let mut tested = 0;
    for y in sample {
        if !u_plus.contains(model, y)? {
            continue;
        }
        tested += 1;
        let gy = model.apply(&iso, y)?;
        if u_minus.contains(model, &gy)? {
            return Ok(SeparationResult { passed: false, witness: Some(y.clone()), tested });
        }
    }
    Ok(SeparationResult { passed: true, witness: None, tested })
}

/// Neighborhoods and power bound realizing separation for an independent pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentSetup {
    /// Around the fixed points of `f`.
    pub u_plus: NeighborhoodSpec,
    pub u_minus: NeighborhoodSpec,
    /// Around the fixed points of `g`.
    pub v_plus: NeighborhoodSpec,
    pub v_minus: NeighborhoodSpec,
    /// `gᵏ U₊ ∩ U₋ = ∅` on the sample for `k >= n`.
    pub n: u32,
}

/// Builds neighborhoods of the four fixed points of an independent pair and
/// finds a power `N` after which `gᵏ` separates `U₊` from `U₋`.
pub fn independent_separation(
    action: &Action,
    f: &GroupWord,
    g: &GroupWord,
    sample: &[Point],
    n_max: u32,
) -> Result<IndependentSetup> {
    let model = &action.model;
    if !crate::combiner::independent(action, f, g)? {
        return Err(Error::InvalidArgument(format!("{f} and {g} are not independent")));
    }
    let (a_plus, a_minus) = model.fixed_points(&action.evaluate(f)?)?;
    let (b_plus, b_minus) = model.fixed_points(&action.evaluate(g)?)?;
    let base = model.basepoint();
    let pts = [&a_plus, &a_minus, &b_plus, &b_minus];
    let mut worst = 0.0f64;
    for i in 0..4 {
        for j in i + 1..4 {
            worst = worst.max(model.gromov_boundaries(pts[i], pts[j], &base)?);
        }
    }
    // a point deep in two neighborhoods would force their centers' product up
    let k = worst + 2.0 * plane_delta(model) + 1.0;
    let nb = |c: &BoundaryPoint| NeighborhoodSpec::new(c.clone(), k, base.clone());
    let setup_sample: Vec<Point> = {
        let u_plus = nb(&a_plus)?;
        sample.iter().filter(|y| u_plus.contains(model, y).unwrap_or(false)).cloned().collect()
    };
    let (v_plus, v_minus) = (nb(&b_plus)?, nb(&b_minus)?);
    let n = ns_dynamics_check(action, g, &v_plus, &v_minus, &setup_sample, n_max)?;
    Ok(IndependentSetup { u_plus: nb(&a_plus)?, u_minus: nb(&a_minus)?, v_plus, v_minus, n })
}

/// Four-point constant used for threshold margins: `ln 2` in the plane, 0 in trees.
pub fn plane_delta(model: &SpaceModel) -> f64 {
    if model.kind().is_tree() {
        0.0
    } else {
        std::f64::consts::LN_2
    }
}

/// Internal points of a geodesic triangle and its insize.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriangleInternals {
    pub x: Point,
    pub y: Point,
    pub z: Point,
    /// On `[x, y]`, `[y, z]`, `[z, x]` respectively.
    pub on_xy: Point,
    pub on_yz: Point,
    pub on_zx: Point,
    pub insize: Length,
}

pub fn internal_points(model: &SpaceModel, x: &Point, y: &Point, z: &Point) -> Result<TriangleInternals> {
    for (p, q) in [(x, y), (y, z), (z, x)] {
        if p == q {
            return Err(Error::DegenerateTriangle(format!("repeated vertex {p}")));
        }
    }
    let on_xy = model.geodesic_point(x, y, gromov_product(model, y, z, x)?.value)?;
    let on_yz = model.geodesic_point(y, z, gromov_product(model, x, z, y)?.value)?;
    let on_zx = model.geodesic_point(z, x, gromov_product(model, x, y, z)?.value)?;
    let d = [
        distance(model, &on_xy, &on_yz)?,
        distance(model, &on_yz, &on_zx)?,
        distance(model, &on_zx, &on_xy)?,
    ];
    let insize = if model.kind().is_tree() {
        Length::integer(d.iter().filter_map(Length::exact_integer).max().unwrap_or(0))
    } else {
        Length::approx(d.iter().map(|l| l.value).fold(0.0, f64::max))
    };
    Ok(TriangleInternals { x: x.clone(), y: y.clone(), z: z.clone(), on_xy, on_yz, on_zx, insize })
}

/// Largest insize over the given triangles.
pub fn estimate_delta_insize(model: &SpaceModel, triangles: &[(Point, Point, Point)]) -> Result<DeltaEstimate> {
    let sizes: Vec<f64> = triangles
        .par_iter()
        .map(|(x, y, z)| internal_points(model, x, y, z).map(|t| t.insize.value))
        .collect::<Result<_>>()?;
    Ok(DeltaEstimate {
        delta: sizes.into_iter().fold(0.0, f64::max),
        condition: DeltaCondition::Insize,
        sample_size: triangles.len() as u64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QgVerdict {
    pub lambda: f64,
    pub epsilon: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiGeodesicReport {
    /// Smallest tested `λ` that passes with some tested `ε`, and the least such `ε`.
    pub lambda: Option<f64>,
    pub epsilon: Option<f64>,
    /// Length of one period `d(x, f^a g x)`.
    pub scale: Length,
    pub pairs_tested: usize,
    pub verdicts: Vec<QgVerdict>,
}

impl QuasiGeodesicReport {
    pub fn passed(&self) -> bool {
        self.lambda.is_some()
    }
}

pub const QG_LAMBDAS: [f64; 8] = [1.0, 1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0];
pub const QG_EPSILONS: [f64; 9] = [0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0];

/// Samples the broken path through `(f^a g)^j x`, `|j| <= periods`, joined by
/// geodesics and parameterized by cumulative length, and tests
/// `|s − t|/λ − ε <= d(γ(s), γ(t))` on a grid of `(λ, ε)`.
pub fn local_quasigeodesic_check(
    action: &Action,
    f: &GroupWord,
    g: &GroupWord,
    a: u32,
    basepoint: &Point,
    periods: u32,
) -> Result<QuasiGeodesicReport> {
    let model = &action.model;
    let h = action.evaluate(&f.pow(i64::from(a)).mul(g))?;
    let p = i64::from(periods);
    let hinv = h.inverse();
    let mut verts = vec![basepoint.clone()];
    for _ in 0..p {
        verts.push(model.apply(&h, verts.last().unwrap())?);
    }
    let mut back = vec![basepoint.clone()];
    for _ in 0..p {
        back.push(model.apply(&hinv, back.last().unwrap())?);
    }
    back.reverse();
    back.pop();
    back.extend(verts);
    let verts = back;
    let scale = distance(model, &verts[p as usize], &verts[p as usize + 1])?;

    // (parameter, point) samples along the path
    let per_segment = if model.kind().is_tree() { usize::MAX } else { 4 };
    let mut samples: Vec<(f64, Point)> = Vec::new();
    let mut s0 = 0.0;
    for w in verts.windows(2) {
        let len = distance(model, &w[0], &w[1])?;
        let steps = match len.exact_integer() {
            Some(n) => (n as usize).min(per_segment).max(1),
            None => per_segment,
        };
        for k in 0..steps {
            let t = len.value * k as f64 / steps as f64;
            samples.push((s0 + t, model.geodesic_point(&w[0], &w[1], t)?));
        }
        s0 += len.value;
    }
    samples.push((s0, verts.last().unwrap().clone()));

    let mut verdicts = Vec::new();
    if scale.is_zero() {
        for &lambda in &QG_LAMBDAS {
            for &epsilon in &QG_EPSILONS {
                verdicts.push(QgVerdict { lambda, epsilon, pass: false });
            }
        }
        return Ok(QuasiGeodesicReport { lambda: None, epsilon: None, scale, pairs_tested: 0, verdicts });
    }
    let pairs: Vec<(f64, f64)> = (0..samples.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let samples = &samples;
            (i + 1..samples.len()).map(move |j| {
                let d = distance(model, &samples[i].1, &samples[j].1).expect("same model").value;
                ((samples[j].0 - samples[i].0).abs(), d)
            })
        })
        .collect();
    let slack = if model.kind().is_tree() { 0.0 } else { 1e-9 };
    let mut best: Option<(f64, f64)> = None;
    for &lambda in &QG_LAMBDAS {
        for &epsilon in &QG_EPSILONS {
            let pass = pairs.iter().all(|&(st, d)| st / lambda - epsilon <= d + slack);
            if pass && best.is_none() {
                best = Some((lambda, epsilon));
            }
            verdicts.push(QgVerdict { lambda, epsilon, pass });
        }
    }
    Ok(QuasiGeodesicReport {
        lambda: best.map(|b| b.0),
        epsilon: best.map(|b| b.1),
        scale,
        pairs_tested: pairs.len(),
        verdicts,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitProjection {
    /// Exponents `n` with `fⁿx` nearest to `z`, ascending.
    pub nearest: Vec<i64>,
    pub nearest_points: Vec<Point>,
    pub distance_to_orbit: f64,
    /// `d(x, x_z) + d(x_z, z) − d(x, z)` for the first nearest point `x_z`.
    pub defect: f64,
}

/// Nearest points of the orbit segment `{fⁿx : |n| <= range}` to `z`.
pub fn orbit_projection(action: &Action, f: &GroupWord, basepoint: &Point, z: &Point, range: u32) -> Result<OrbitProjection> {
    let model = &action.model;
    let iso = hyperbolic_image(action, f)?;
    let r = i64::from(range);
    let orbit: Vec<(i64, Point)> = (-r..=r)
        .map(|n| Ok((n, model.apply(&iso.pow(n), basepoint)?)))
        .collect::<Result<_>>()?;
    let dists: Vec<Length> = orbit.iter().map(|(_, p)| distance(model, p, z)).collect::<Result<_>>()?;
    // compare exactly: cosh in the plane, integers in trees
    let key = |l: &Length| -> (Option<crate::Rational>, u64) {
        (l.exact_cosh().cloned(), l.exact_integer().unwrap_or(0))
    };
    let best = dists.iter().map(key).min().expect("nonempty orbit");
    let nearest_idx: Vec<usize> = (0..orbit.len()).filter(|&i| key(&dists[i]) == best).collect();
    let xz = &orbit[nearest_idx[0]].1;
    let defect = distance(model, basepoint, xz)?.value + dists[nearest_idx[0]].value - distance(model, basepoint, z)?.value;
    Ok(OrbitProjection {
        nearest: nearest_idx.iter().map(|&i| orbit[i].0).collect(),
        nearest_points: nearest_idx.iter().map(|&i| orbit[i].1.clone()).collect(),
        distance_to_orbit: dists[nearest_idx[0]].value,
        defect: defect.max(0.0),
    })
}

/// Distance from `x` to the axis of a hyperbolic isometry.
pub fn axis_offset(model: &SpaceModel, g: &Isometry, x: &Point) -> Result<f64> {
    let tau = match model.classify(g)? {
        IsometryClass::Hyperbolic(h) => h.translation_length.value,
        _ => return Err(Error::NotHyperbolic(g.to_string())),
    };
    let d = distance(model, x, &model.apply(g, x)?)?.value;
    Ok(if model.kind().is_tree() {
        ((d - tau) / 2.0).max(0.0)
    } else {
        // sinh(d/2) = cosh(R) sinh(τ/2)
        ((d / 2.0).sinh() / (tau / 2.0).sinh()).max(1.0).acosh()
    })
}

/// A point on (or, in the plane, within double precision of) the axis of a
/// hyperbolic isometry.
pub fn axis_point(model: &SpaceModel, g: &Isometry) -> Result<Point> {
    use crate::models::free_group::FreeGroup;
    use crate::models::free_product::FreeProduct;
    use crate::models::plane::PlaneBoundary;
    use crate::models::tree::TreeGroup;
    if !g.is_hyperbolic() {
        return Err(Error::NotHyperbolic(g.to_string()));
    }
    // a cyclically reduced tree element has the basepoint on its axis
    let conj = match g {
        Isometry::Free { rank, word } => {
            let h = FreeGroup { rank: *rank }.cyclic_reduction(word).0;
            Isometry::Free { rank: *rank, word: h }
        }
        Isometry::FreeProduct { m, n, word } => {
            let h = FreeProduct { m: *m, n: *n }.cyclic_reduction(word).0;
            Isometry::FreeProduct { m: *m, n: *n, word: h }
        }
        Isometry::Mobius(_) => {
            let (a, r) = model.fixed_points(g)?;
            let (x, y) = match (&a, &r) {
                (BoundaryPoint::Plane(PlaneBoundary::Infinity), BoundaryPoint::Plane(p))
                | (BoundaryPoint::Plane(p), BoundaryPoint::Plane(PlaneBoundary::Infinity)) => (p.to_f64(), 1.0),
                (BoundaryPoint::Plane(p), BoundaryPoint::Plane(q)) => {
                    let (p, q) = (p.to_f64(), q.to_f64());
                    (0.5 * (p + q), 0.5 * (p - q).abs())
                }
                _ => unreachable!(),
            };
            return Point::plane(float_rational(x), float_rational(y));
        }
    };
    model.apply(&conj, &model.basepoint())
}

fn float_rational(v: f64) -> crate::Rational {
    crate::Rational::from_float(v).unwrap_or_default()
}

/// Sample around `center`: the radius-3 ball in trees; in the plane, points at
/// distances `0.5, 1, 2, 3` in 16 directions, plus the center itself.
pub fn standard_sample(model: &SpaceModel, center: &Point) -> Result<Vec<Point>> {
    if model.kind().is_tree() {
        return Ok(model.ball_around(center, 3)?.vertices);
    }
    let (cx, cy) = center.as_plane().expect("plane point").to_f64();
    let mut out = vec![center.clone()];
    for r in [0.5f64, 1.0, 2.0, 3.0] {
        let rho = (r / 2.0).tanh();
        for k in 0..16 {
            let th = std::f64::consts::TAU * f64::from(k) / 16.0;
            let (wr, wi) = (rho * th.cos(), rho * th.sin());
            // disk to half-plane: z = i(1 + w)/(1 − w)
            let den = (1.0 - wr).powi(2) + wi * wi;
            let (zx, zy) = (-2.0 * wi / den, (1.0 - wr * wr - wi * wi) / den);
            out.push(Point::plane(float_rational(cx + cy * zx), float_rational(cy * zy))?);
        }
    }
    Ok(out)
}
