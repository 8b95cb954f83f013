//! Concrete δ-hyperbolic spaces with exact isometry classification.
//!
//! Three models are supported:
//!
//! * the upper half-plane with `PSL(2, Q)` acting by Möbius maps;
//! * the Bass–Serre tree of `Z/m * Z/n`;
//! * the Cayley tree of the free group `F_r`.
//!
//! Classification is exact in every model: the plane uses the trace, the trees
//! use cyclically reduced normal forms.

pub mod bass_serre;
pub mod free_group;
pub mod free_product;
pub mod plane;
pub mod tree;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{int, Rational};
use crate::error::{check_same, Error, Result};
use crate::geometry::{distance, ExactValue, Length, TranslationLengthEstimate};
use bass_serre::BsVertex;
use free_group::{DisplayFree, FreeGroup, FreeWord};
use free_product::{DisplayFp, FpWord, FreeProduct, Syllable};
use plane::{EllipticCentre, Mat2, PlaneBoundary, PlanePoint};
use tree::{Ray, TreeGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ModelKind {
    HalfPlane,
    BassSerre { m: u32, n: u32 },
    CayleyTree { rank: u32 },
}

impl ModelKind {
    pub fn is_tree(self) -> bool {
        !matches!(self, ModelKind::HalfPlane)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelKind::HalfPlane => write!(f, "half-plane"),
            ModelKind::BassSerre { m, n } => write!(f, "bass-serre({m},{n})"),
            ModelKind::CayleyTree { rank } => write!(f, "cayley-tree({rank})"),
        }
    }
}

/// A point of some model: an exact half-plane point or a tree vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Point {
    Plane(PlanePoint),
    Cayley { rank: u32, word: FreeWord },
    BassSerre { m: u32, n: u32, vertex: BsVertex },
}

impl Point {
    pub fn model(&self) -> ModelKind {
        match self {
            Point::Plane(_) => ModelKind::HalfPlane,
            Point::Cayley { rank, .. } => ModelKind::CayleyTree { rank: *rank },
            Point::BassSerre { m, n, .. } => ModelKind::BassSerre { m: *m, n: *n },
        }
    }

    pub fn plane(x: Rational, y: Rational) -> Result<Point> {
        PlanePoint::new(x, y).map(Point::Plane)
    }

    pub fn as_plane(&self) -> Option<&PlanePoint> {
        match self {
            Point::Plane(p) => Some(p),
            _ => None,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Plane(p) => write!(f, "{p}"),
            Point::Cayley { word, .. } => write!(f, "{}", DisplayFree(word)),
            Point::BassSerre { vertex, .. } => write!(f, "{vertex}"),
        }
    }
}

/// An isometry of a model, tagged with the model it belongs to.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum Isometry {
    Mobius(Mat2),
    Free { rank: u32, word: FreeWord },
    FreeProduct { m: u32, n: u32, word: FpWord },
}

impl Isometry {
    pub fn model(&self) -> ModelKind {
        match self {
            Isometry::Mobius(_) => ModelKind::HalfPlane,
            Isometry::Free { rank, .. } => ModelKind::CayleyTree { rank: *rank },
            Isometry::FreeProduct { m, n, .. } => ModelKind::BassSerre { m: *m, n: *n },
        }
    }

    pub fn identity(kind: ModelKind) -> Isometry {
        match kind {
            ModelKind::HalfPlane => Isometry::Mobius(Mat2::identity()),
            ModelKind::CayleyTree { rank } => Isometry::Free { rank, word: Vec::new() },
            ModelKind::BassSerre { m, n } => Isometry::FreeProduct { m, n, word: Vec::new() },
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            Isometry::Mobius(m) => m.is_identity(),
            Isometry::Free { word, .. } => word.is_empty(),
            Isometry::FreeProduct { word, .. } => word.is_empty(),
        }
    }

    pub fn inverse(&self) -> Isometry {
        match self {
            Isometry::Mobius(m) => Isometry::Mobius(m.inverse()),
            Isometry::Free { rank, word } => Isometry::Free {
                rank: *rank,
                word: FreeGroup { rank: *rank }.inverse(word),
            },
            Isometry::FreeProduct { m, n, word } => Isometry::FreeProduct {
                m: *m,
                n: *n,
                word: FreeProduct { m: *m, n: *n }.inverse(word),
            },
        }
    }

    pub fn pow(&self, e: i64) -> Isometry {
        match self {
            Isometry::Mobius(m) => Isometry::Mobius(m.pow(e)),
            Isometry::Free { rank, word } => Isometry::Free {
                rank: *rank,
                word: FreeGroup { rank: *rank }.pow(word, e),
            },
            Isometry::FreeProduct { m, n, word } => Isometry::FreeProduct {
                m: *m,
                n: *n,
                word: FreeProduct { m: *m, n: *n }.pow(word, e),
            },
        }
    }

    /// Quick exact hyperbolicity test, without building a witness.
    pub fn is_hyperbolic(&self) -> bool {
        match self {
            Isometry::Mobius(m) => m.abs_trace() > int(2),
            Isometry::Free { rank, word } => !FreeGroup { rank: *rank }.cyclic_reduction(word).1.is_empty(),
            Isometry::FreeProduct { m, n, word } => {
                let g = FreeProduct { m: *m, n: *n };
                g.core_translation_length(&g.cyclic_reduction(word).1) > 0
            }
        }
    }

    /// Finite order, `None` for infinite order.
    pub fn order(&self) -> Option<u64> {
        match self {
            Isometry::Mobius(m) => {
                if m.abs_trace() < int(2) || m.is_identity() {
                    m.projective_order()
                } else {
                    None
                }
            }
            Isometry::Free { word, .. } => word.is_empty().then_some(1),
            Isometry::FreeProduct { m, n, word } => FreeProduct { m: *m, n: *n }.element_order(word),
        }
    }
}

impl fmt::Display for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Isometry::Mobius(m) => write!(f, "{m}"),
            Isometry::Free { word, .. } => write!(f, "{}", DisplayFree(word)),
            Isometry::FreeProduct { word, .. } => write!(f, "{}", DisplayFp(word)),
        }
    }
}

/// `iso1 ∘ iso2`: matrix product, or concatenation followed by reduction.
pub fn compose(iso1: &Isometry, iso2: &Isometry) -> Result<Isometry> {
    check_same(iso1.model(), iso2.model())?;
    Ok(match (iso1, iso2) {
        (Isometry::Mobius(a), Isometry::Mobius(b)) => Isometry::Mobius(a.mul(b)),
        (Isometry::Free { rank, word: x }, Isometry::Free { word: y, .. }) => Isometry::Free {
            rank: *rank,
            word: FreeGroup { rank: *rank }.mul(x, y),
        },
        (Isometry::FreeProduct { m, n, word: x }, Isometry::FreeProduct { word: y, .. }) => {
            Isometry::FreeProduct { m: *m, n: *n, word: FreeProduct { m: *m, n: *n }.mul(x, y) }
        }
        _ => unreachable!(),
    })
}

/// A point at infinity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum BoundaryPoint {
    Plane(PlaneBoundary),
    Cayley { rank: u32, ray: Ray<i32> },
    BassSerre { m: u32, n: u32, ray: Ray<Syllable> },
}

impl BoundaryPoint {
    pub fn model(&self) -> ModelKind {
        match self {
            BoundaryPoint::Plane(_) => ModelKind::HalfPlane,
            BoundaryPoint::Cayley { rank, .. } => ModelKind::CayleyTree { rank: *rank },
            BoundaryPoint::BassSerre { m, n, .. } => ModelKind::BassSerre { m: *m, n: *n },
        }
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryPoint::Plane(p) => write!(f, "{p}"),
            BoundaryPoint::Cayley { ray, .. } => {
                write!(f, "{}·({})^∞", DisplayFree(&ray.prefix), DisplayFree(&ray.period))
            }
            BoundaryPoint::BassSerre { ray, .. } => {
                write!(f, "{}·({})^∞", DisplayFp(&ray.prefix), DisplayFp(&ray.period))
            }
        }
    }
}

/// Exact equality of boundary points.
pub fn boundary_equal(p: &BoundaryPoint, q: &BoundaryPoint) -> Result<bool> {
    check_same(p.model(), q.model())?;
    Ok(p == q)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipticWitness {
    /// Order of the element, when finite.
    pub order: Option<u64>,
    /// Period of `orbit_point`; absent for infinite-order rotations.
    pub period: Option<u64>,
    pub orbit_point: Option<Point>,
    pub orbit_diameter: Length,
    /// Exact centre of a plane rotation.
    pub centre: Option<EllipticCentre>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicWitness {
    pub translation_length: TranslationLengthEstimate,
    /// Attracting fixed point.
    pub fixed_plus: BoundaryPoint,
    /// Repelling fixed point.
    pub fixed_minus: BoundaryPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "kebab-case")]
pub enum IsometryClass {
    Elliptic(EllipticWitness),
    Hyperbolic(HyperbolicWitness),
    HypothesisViolation { reason: String },
}

impl IsometryClass {
    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, IsometryClass::Hyperbolic(_))
    }

    pub fn is_elliptic(&self) -> bool {
        matches!(self, IsometryClass::Elliptic(_))
    }

    pub fn tag(&self) -> &'static str {
        match self {
            IsometryClass::Elliptic(_) => "elliptic",
            IsometryClass::Hyperbolic(_) => "hyperbolic",
            IsometryClass::HypothesisViolation { .. } => "hypothesis-violation",
        }
    }

    pub fn translation_length(&self) -> Option<&TranslationLengthEstimate> {
        match self {
            IsometryClass::Hyperbolic(h) => Some(&h.translation_length),
            _ => None,
        }
    }
}

/// BFS ball of a tree model.
#[derive(Debug)]
pub struct Ball {
    pub center: Point,
    pub radius: u32,
    pub vertices: Vec<Point>,
    index: HashMap<Point, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl Ball {
    pub fn contains(&self, p: &Point) -> bool {
        self.index.contains_key(p)
    }

    fn locate(&self, p: &Point) -> Result<usize> {
        self.index.get(p).copied().ok_or_else(|| Error::NotInBall {
            vertex: p.to_string(),
            radius: self.radius,
        })
    }

    /// Edge count between two ball vertices, by BFS inside the ball.
    pub fn bfs_distance(&self, x: &Point, y: &Point) -> Result<u64> {
        let (s, t) = (self.locate(x)?, self.locate(y)?);
        let mut dist = vec![u64::MAX; self.vertices.len()];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                return Ok(dist[v]);
            }
            for &w in &self.adjacency[v] {
                if dist[w] == u64::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        Err(Error::NotInBall { vertex: y.to_string(), radius: self.radius })
    }
}

/// A concrete δ-hyperbolic space.
#[derive(Clone, Debug)]
pub struct SpaceModel {
    kind: ModelKind,
    ball_radius: u32,
    ball: Arc<OnceLock<Ball>>,
}

impl PartialEq for SpaceModel {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.ball_radius == other.ball_radius
    }
}

impl SpaceModel {
    pub const DEFAULT_BALL_RADIUS: u32 = 8;

    pub fn new(kind: ModelKind, ball_radius: u32) -> Result<Self> {
        match kind {
            ModelKind::HalfPlane => {}
            ModelKind::BassSerre { m, n } => {
                FreeProduct::new(m, n)?;
            }
            ModelKind::CayleyTree { rank } => {
                FreeGroup::new(rank)?;
            }
        }
        Ok(SpaceModel { kind, ball_radius, ball: Arc::new(OnceLock::new()) })
    }

    pub fn half_plane() -> Self {
        Self::new(ModelKind::HalfPlane, 0).unwrap()
    }

    pub fn bass_serre(m: u32, n: u32, ball_radius: u32) -> Result<Self> {
        Self::new(ModelKind::BassSerre { m, n }, ball_radius)
    }

    pub fn cayley_tree(rank: u32, ball_radius: u32) -> Result<Self> {
        Self::new(ModelKind::CayleyTree { rank }, ball_radius)
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn ball_radius(&self) -> u32 {
        self.ball_radius
    }

    pub fn basepoint(&self) -> Point {
        match self.kind {
            ModelKind::HalfPlane => Point::Plane(PlanePoint::i()),
            ModelKind::CayleyTree { rank } => Point::Cayley { rank, word: Vec::new() },
            ModelKind::BassSerre { m, n } => Point::BassSerre { m, n, vertex: BsVertex::root() },
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        check_same(self.kind, p.model())
    }

    fn check_iso(&self, g: &Isometry) -> Result<()> {
        check_same(self.kind, g.model())
    }

    pub fn parse_isometry(&self, text: &str) -> Result<Isometry> {
        match self.kind {
            ModelKind::HalfPlane => Err(Error::InvalidIsometry(
                "half-plane isometries are matrices, not words".into(),
            )),
            ModelKind::CayleyTree { rank } => {
                Ok(Isometry::Free { rank, word: FreeGroup::new(rank)?.parse(text)? })
            }
            ModelKind::BassSerre { m, n } => {
                Ok(Isometry::FreeProduct { m, n, word: FreeProduct::new(m, n)?.parse(text)? })
            }
        }
    }

    pub fn apply(&self, g: &Isometry, x: &Point) -> Result<Point> {
        self.check_iso(g)?;
        self.check_point(x)?;
        Ok(match (g, x) {
            (Isometry::Mobius(m), Point::Plane(p)) => Point::Plane(m.apply(p)),
            (Isometry::Free { rank, word }, Point::Cayley { word: v, .. }) => Point::Cayley {
                rank: *rank,
                word: FreeGroup { rank: *rank }.mul(word, v),
            },
            (Isometry::FreeProduct { m, n, word }, Point::BassSerre { vertex, .. }) => Point::BassSerre {
                m: *m,
                n: *n,
                vertex: bass_serre::act(&FreeProduct { m: *m, n: *n }, word, vertex),
            },
            _ => unreachable!(),
        })
    }

    pub fn apply_boundary(&self, g: &Isometry, xi: &BoundaryPoint) -> Result<BoundaryPoint> {
        self.check_iso(g)?;
        check_same(self.kind, xi.model())?;
        Ok(match (g, xi) {
            (Isometry::Mobius(m), BoundaryPoint::Plane(p)) => BoundaryPoint::Plane(m.apply_boundary(p)),
            (Isometry::Free { rank, word }, BoundaryPoint::Cayley { ray, .. }) => BoundaryPoint::Cayley {
                rank: *rank,
                ray: tree::translate_ray(&FreeGroup { rank: *rank }, word, ray),
            },
            (Isometry::FreeProduct { m, n, word }, BoundaryPoint::BassSerre { ray, .. }) => {
                BoundaryPoint::BassSerre {
                    m: *m,
                    n: *n,
                    ray: tree::translate_ray(&FreeProduct { m: *m, n: *n }, word, ray),
                }
            }
            _ => unreachable!(),
        })
    }

    /// Exact classification: elliptic, hyperbolic, or a parabolic hypothesis violation.
    pub fn classify(&self, g: &Isometry) -> Result<IsometryClass> {
        self.check_iso(g)?;
        match g {
            Isometry::Mobius(m) => Ok(self.classify_mobius(m)),
            Isometry::Free { rank, word } => {
                let group = FreeGroup { rank: *rank };
                let (_, core) = group.cyclic_reduction(word);
                if core.is_empty() {
                    return Ok(self.tree_elliptic(Some(1), self.basepoint()));
                }
                let tau = group.core_translation_length(&core);
                let (att, rep) = self.fixed_points_unchecked(g);
                Ok(self.tree_hyperbolic(tau, att, rep))
            }
            Isometry::FreeProduct { m, n, word } => {
                let group = FreeProduct { m: *m, n: *n };
                let (h, core) = group.cyclic_reduction(word);
                let tau = group.core_translation_length(&core);
                if tau == 0 {
                    // g = h·x·h⁻¹ with x in a factor fixes the coset h⟨x⟩
                    let vertex = match core.first() {
                        Some(x) => BsVertex::canonical(h, x.factor),
                        None => BsVertex::root(),
                    };
                    let fixed = Point::BassSerre { m: *m, n: *n, vertex };
                    return Ok(self.tree_elliptic(group.element_order(word), fixed));
                }
                let (att, rep) = self.fixed_points_unchecked(g);
                Ok(self.tree_hyperbolic(tau, att, rep))
            }
        }
    }

    fn tree_elliptic(&self, order: Option<u64>, fixed: Point) -> IsometryClass {
        IsometryClass::Elliptic(EllipticWitness {
            order,
            period: Some(1),
            orbit_point: Some(fixed),
            orbit_diameter: Length::integer(0),
            centre: None,
        })
    }

    fn tree_hyperbolic(&self, tau: u64, attracting: BoundaryPoint, repelling: BoundaryPoint) -> IsometryClass {
        IsometryClass::Hyperbolic(HyperbolicWitness {
            translation_length: TranslationLengthEstimate::exact(
                tau as f64,
                ExactValue::Integer(tau),
                0,
            ),
            fixed_plus: attracting,
            fixed_minus: repelling,
        })
    }

    fn classify_mobius(&self, m: &Mat2) -> IsometryClass {
        let t = m.abs_trace();
        let two = int(2);
        if t > two {
            let (attracting, repelling) = m.hyperbolic_fixed_points();
            // cosh τ = tr²/2 − 1
            let cosh_tau = &t * &t / &two - Rational::one();
            let tau = 2.0 * crate::arith::acosh_one_plus(&(&t / &two - Rational::one()));
            return IsometryClass::Hyperbolic(HyperbolicWitness {
                translation_length: TranslationLengthEstimate::exact(tau, ExactValue::Cosh(cosh_tau), 0),
                fixed_plus: BoundaryPoint::Plane(attracting),
                fixed_minus: BoundaryPoint::Plane(repelling),
            });
        }
        if m.is_identity() {
            return IsometryClass::Elliptic(EllipticWitness {
                order: Some(1),
                period: Some(1),
                orbit_point: Some(self.basepoint()),
                orbit_diameter: Length::cosh(Rational::one()),
                centre: None,
            });
        }
        if t == two {
            return IsometryClass::HypothesisViolation {
                reason: format!("parabolic: |trace| = 2 for {m}"),
            };
        }
        let centre = m.elliptic_centre();
        let order = m.projective_order();
        let (orbit_point, diameter) = match (centre.rational_point(), order) {
            (Some(p), _) => (Some(Point::Plane(p)), Length::cosh(Rational::one())),
            (None, Some(k)) => {
                let base = PlanePoint::i();
                let mut best = Rational::zero();
                let mut orbit = vec![base.clone()];
                for _ in 1..k {
                    let next = m.apply(orbit.last().unwrap());
                    orbit.push(next);
                }
                for (i, p) in orbit.iter().enumerate() {
                    for q in &orbit[i + 1..] {
                        let e = p.cosh_excess(q);
                        if e > best {
                            best = e;
                        }
                    }
                }
                (Some(Point::Plane(base)), Length::cosh(best + Rational::one()))
            }
            (None, None) => (None, Length::cosh(Rational::one())),
        };
        IsometryClass::Elliptic(EllipticWitness {
            order,
            period: order,
            orbit_point,
            orbit_diameter: diameter,
            centre: Some(centre),
        })
    }

    /// `(attracting, repelling)` boundary fixed points of a hyperbolic isometry.
    pub fn fixed_points(&self, g: &Isometry) -> Result<(BoundaryPoint, BoundaryPoint)> {
        self.check_iso(g)?;
        if !g.is_hyperbolic() {
            return Err(Error::NotHyperbolic(g.to_string()));
        }
        Ok(self.fixed_points_unchecked(g))
    }

    fn fixed_points_unchecked(&self, g: &Isometry) -> (BoundaryPoint, BoundaryPoint) {
        match g {
            Isometry::Mobius(m) => {
                let (a, r) = m.hyperbolic_fixed_points();
                (BoundaryPoint::Plane(a), BoundaryPoint::Plane(r))
            }
            Isometry::Free { rank, word } => {
                let group = FreeGroup { rank: *rank };
                let att = tree::canonical_ray(&group, &[], word);
                let rep = tree::canonical_ray(&group, &[], &group.inverse(word));
                (
                    BoundaryPoint::Cayley { rank: *rank, ray: att },
                    BoundaryPoint::Cayley { rank: *rank, ray: rep },
                )
            }
            Isometry::FreeProduct { m, n, word } => {
                let group = FreeProduct { m: *m, n: *n };
                let att = tree::canonical_ray(&group, &[], word);
                let rep = tree::canonical_ray(&group, &[], &group.inverse(word));
                (
                    BoundaryPoint::BassSerre { m: *m, n: *n, ray: att },
                    BoundaryPoint::BassSerre { m: *m, n: *n, ray: rep },
                )
            }
        }
    }

    /// Orbit point `prefix·period^k·basepoint` approximating a tree end.
    fn ray_vertex(&self, xi: &BoundaryPoint, k: usize) -> Point {
        match xi {
            BoundaryPoint::Cayley { rank, ray } => Point::Cayley {
                rank: *rank,
                word: tree::ray_element(&FreeGroup { rank: *rank }, ray, k),
            },
            BoundaryPoint::BassSerre { m, n, ray } => {
                let group = FreeProduct { m: *m, n: *n };
                let w = tree::ray_element(&group, ray, k);
                Point::BassSerre { m: *m, n: *n, vertex: BsVertex::canonical(w, free_product::Factor::S) }
            }
            BoundaryPoint::Plane(_) => unreachable!(),
        }
    }

    /// A power `k` whose ray vertex is already about `need` deep.
    fn ray_start(&self, xi: &BoundaryPoint, need: u64) -> usize {
        let period = match xi {
            BoundaryPoint::Cayley { ray, .. } => ray.period.len(),
            BoundaryPoint::BassSerre { ray, .. } => ray.period.len(),
            BoundaryPoint::Plane(_) => unreachable!(),
        };
        need as usize / period + 1
    }

    fn tree_dist(&self, x: &Point, y: &Point) -> u64 {
        match distance(self, x, y).expect("same model").exact {
            Some(ExactValue::Integer(d)) => d,
            _ => unreachable!(),
        }
    }

    /// Gromov product `⟨ξ|y⟩_w` of a boundary point with a point of the space.
    pub fn gromov_boundary(&self, xi: &BoundaryPoint, y: &Point, w: &Point) -> Result<f64> {
        check_same(self.kind, xi.model())?;
        self.check_point(y)?;
        self.check_point(w)?;
        if let (BoundaryPoint::Plane(b), Point::Plane(yp), Point::Plane(wp)) = (xi, y, w) {
            return Ok(plane::gromov_boundary_point(b, yp, wp));
        }
        // Ray vertices lie on the geodesic ray from the basepoint; the product
        // is constant once they pass the projections of y and w.
        let v0 = self.basepoint();
        let need = self.tree_dist(&v0, y) + self.tree_dist(&v0, w) + 1;
        let mut k = self.ray_start(xi, need);
        loop {
            let x = self.ray_vertex(xi, k);
            if self.tree_dist(&v0, &x) > need {
                let twice = self.tree_dist(&x, w) + self.tree_dist(w, y) - self.tree_dist(&x, y);
                return Ok(twice as f64 / 2.0);
            }
            k += 1;
        }
    }

    /// Gromov product of two boundary points; `+∞` when they coincide.
    pub fn gromov_boundaries(&self, xi: &BoundaryPoint, eta: &BoundaryPoint, w: &Point) -> Result<f64> {
        check_same(self.kind, xi.model())?;
        check_same(self.kind, eta.model())?;
        self.check_point(w)?;
        if xi == eta {
            return Ok(f64::INFINITY);
        }
        let common = match (xi, eta, w) {
            (BoundaryPoint::Plane(a), BoundaryPoint::Plane(b), Point::Plane(wp)) => {
                return Ok(plane::gromov_boundary_boundary(a, b, wp));
            }
            (BoundaryPoint::Cayley { ray: a, .. }, BoundaryPoint::Cayley { ray: b, .. }, _) => {
                tree::ray_divergence(a, b)
            }
            (BoundaryPoint::BassSerre { ray: a, .. }, BoundaryPoint::BassSerre { ray: b, .. }, _) => {
                tree::ray_divergence(a, b)
            }
            _ => unreachable!(),
        }
        .unwrap_or(0) as u64;
        let v0 = self.basepoint();
        let need = self.tree_dist(&v0, w) + common + 2;
        let mut k = self.ray_start(xi, need).max(self.ray_start(eta, need));
        loop {
            let x = self.ray_vertex(xi, k);
            let y = self.ray_vertex(eta, k);
            if self.tree_dist(&v0, &x) > need && self.tree_dist(&v0, &y) > need {
                let twice = self.tree_dist(&x, w) + self.tree_dist(w, &y) - self.tree_dist(&x, &y);
                return Ok(twice as f64 / 2.0);
            }
            k += 1;
        }
    }

    /// Neighbors of a tree vertex.
    pub fn neighbors(&self, x: &Point) -> Result<Vec<Point>> {
        self.check_point(x)?;
        Ok(match x {
            Point::Cayley { rank, word } => {
                let g = FreeGroup { rank: *rank };
                (1..=*rank as i32)
                    .flat_map(|l| [l, -l])
                    .map(|l| Point::Cayley { rank: *rank, word: g.mul(word, &[l]) })
                    .collect()
            }
            Point::BassSerre { m, n, vertex } => bass_serre::neighbors(&FreeProduct { m: *m, n: *n }, vertex)
                .into_iter()
                .map(|v| Point::BassSerre { m: *m, n: *n, vertex: v })
                .collect(),
            Point::Plane(_) => {
                return Err(Error::InvalidModel("the half-plane has no vertex neighbors".into()));
            }
        })
    }

    /// BFS ball of the given radius around `center`.
    pub fn ball_around(&self, center: &Point, radius: u32) -> Result<Ball> {
        self.check_point(center)?;
        if !self.kind.is_tree() {
            return Err(Error::InvalidModel("balls are materialized for tree models only".into()));
        }
        let mut vertices = vec![center.clone()];
        let mut index = HashMap::from([(center.clone(), 0usize)]);
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new()];
        let mut depth = vec![0u32];
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            if depth[v] == radius {
                continue;
            }
            for nb in self.neighbors(&vertices[v])? {
                let w = match index.get(&nb) {
                    Some(&w) => w,
                    None => {
                        let w = vertices.len();
                        index.insert(nb.clone(), w);
                        vertices.push(nb);
                        adjacency.push(Vec::new());
                        depth.push(depth[v] + 1);
                        queue.push_back(w);
                        w
                    }
                };
                if !adjacency[v].contains(&w) {
                    adjacency[v].push(w);
                    adjacency[w].push(v);
                }
            }
        }
        Ok(Ball { center: center.clone(), radius, vertices, index, adjacency })
    }

    /// The materialized ball of `ball_radius` around the basepoint, built once.
    pub fn ball(&self) -> Result<&Ball> {
        if let Some(b) = self.ball.get() {
            return Ok(b);
        }
        let b = self.ball_around(&self.basepoint(), self.ball_radius)?;
        Ok(self.ball.get_or_init(|| b))
    }

    /// Point at distance `t` from `x` along the geodesic to `y`.
    ///
    /// Tree models round `t` to the nearest vertex; the plane returns a rational
    /// point within `2⁻⁴⁰` of the true geodesic point.
    pub fn geodesic_point(&self, x: &Point, y: &Point, t: f64) -> Result<Point> {
        self.check_point(x)?;
        self.check_point(y)?;
        match (x, y) {
            (Point::Plane(p), Point::Plane(q)) => Ok(Point::Plane(crate::geometry::plane_geodesic_point(p, q, t))),
            (Point::Cayley { rank, word: u }, Point::Cayley { word: v, .. }) => {
                let g = FreeGroup { rank: *rank };
                let path = g.mul(&g.inverse(u), v);
                let k = (t.round().max(0.0) as usize).min(path.len());
                Ok(Point::Cayley { rank: *rank, word: g.mul(u, &path[..k]) })
            }
            (Point::BassSerre { m, n, vertex: u }, Point::BassSerre { vertex: v, .. }) => {
                let d = bass_serre::distance(u, v);
                let k = (t.round().max(0.0) as u64).min(d);
                Ok(Point::BassSerre { m: *m, n: *n, vertex: bass_serre::geodesic_vertex(u, v, k) })
            }
            _ => unreachable!(),
        }
    }
}
