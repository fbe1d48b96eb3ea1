//! The pointed-metric-space oracle: distances, spheres `S_a(r)`, annuli
//! `A_a(r, k)` and the radius set `R_a`.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{Exact, Real};
use crate::sequence::{NormalizingSequence, PointSequence};
use crate::spaces::lacunary::LacunaryAtom;
use crate::spaces::SpaceSpec;

/// Default relative band for sphere sampling in continuum spaces.
pub const DEFAULT_BAND: f64 = 1e-4;

/// Default number of points drawn per sampled sphere.
pub const DEFAULT_SPHERE_BUDGET: usize = 256;

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "kebab-case")]
pub enum Point {
    /// A coordinate on the real line (half-line, Cantor set, rays, finite
    /// subsets of the line).
    Line { x: Exact },
    /// An atom of the lacunary set.
    Lacunary { atom: LacunaryAtom },
    /// Distance `radius` from the origin along ray `ray`.
    Ray { ray: usize, radius: Exact },
    /// Parameter `t` on branch `branch` of a parametric curve.
    Curve { branch: usize, t: f64 },
    /// Ambient Euclidean coordinates.
    Euclid { coords: Vec<f64> },
}

impl Point {
    pub fn line(x: Exact) -> Self {
        Point::Line { x }
    }

    pub fn tag(&self) -> PointTag {
        match self {
            Point::Line { .. } => PointTag::Line,
            Point::Lacunary { .. } => PointTag::Lacunary,
            Point::Ray { .. } => PointTag::Ray,
            Point::Curve { .. } => PointTag::Curve,
            Point::Euclid { .. } => PointTag::Euclid,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Line { x } => write!(f, "{x}"),
            Point::Lacunary { atom } => write!(f, "{atom}"),
            Point::Ray { ray, radius } => write!(f, "ray{ray}:{radius}"),
            Point::Curve { branch, t } => write!(f, "F{branch}({t})"),
            Point::Euclid { coords } => write!(f, "{coords:?}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointTag {
    Line,
    Lacunary,
    Ray,
    Curve,
    Euclid,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKind {
    HalfLine,
    Cantor,
    Lacunary,
    PlanarRays,
    Curve,
    CurveFamily,
    RegionBetweenGraphs,
    RotationBody,
    Ray,
    LineSubset,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Exactness {
    Exact,
    Sampled,
}

/// A metric space with a marked point, seen through distance evaluation and
/// sphere enumeration.
///
/// Implementations are immutable after construction.
pub trait PointedSpace: Send + Sync + fmt::Debug {
    fn kind(&self) -> SpaceKind;

    fn exactness(&self) -> Exactness;

    fn point_tag(&self) -> PointTag;

    /// The point `a`.
    fn marked_point(&self) -> Point;

    /// Whether `p` (already of the right tag) lies in the space.
    fn contains(&self, p: &Point) -> bool;

    /// `d(p, q) / scale`. Exact spaces compute the quotient exactly before
    /// rounding; tags are already checked.
    fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> f64;

    /// `d(p, a)`, exact where the space is exact.
    fn radial(&self, p: &Point) -> Real;

    /// Points of `S_a(r)`: all of them for exact spaces, up to `budget`
    /// points with `|d(p,a) - r| <= band * r` for sampled spaces.
    fn sphere(&self, r: &Real, band: f64, budget: usize) -> Vec<Point>;

    /// A finite subset of `A_a(r, k)` containing a farthest pair of the
    /// annulus (exact spaces) or a sample of it (sampled spaces).
    fn annulus_witnesses(&self, r: &Real, k: &Real, budget: usize) -> Vec<Point>;

    /// Smallest radius `>= target` with a nonempty sphere, if any.
    fn radius_at_or_above(&self, target: &Real) -> Option<Real>;

    /// A point whose distance to `a` is as close as possible to `target`.
    fn point_near_radius(&self, target: &Real) -> Option<Point>;

    /// Decreasing radii with nonempty spheres, suited to probing `r -> 0`.
    fn radius_ladder(&self, count: usize) -> Vec<Real>;

    /// Signed offset `x - a` for subsets of the real line.
    fn line_offset(&self, _p: &Point) -> Option<Exact> {
        None
    }

    /// Coordinates in the ambient Euclidean space, when embedded.
    fn embed(&self, _p: &Point) -> Option<Vec<f64>> {
        None
    }

    /// `inf_{y in X} |x - y|` for an ambient point `x`.
    fn distance_to_set(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    /// Space-specific candidate sequences for pretangent libraries along
    /// `scale` (digit patterns, atoms, per-ray sequences).
    fn special_candidates(&self, _scale: &NormalizingSequence, _depth: u32) -> Vec<PointSequence> {
        Vec::new()
    }
}

/// Nonempty-sphere sample at one radius.
#[derive(Clone, Debug, Serialize)]
pub struct SphereSample {
    pub radius: Real,
    pub band: f64,
    pub points: Vec<Point>,
    /// Every point satisfies `d(p, a) = r` exactly.
    pub exact: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RadiusProbe {
    pub grid: Vec<Real>,
    pub nonempty: Vec<Real>,
}

impl RadiusProbe {
    pub fn is_nonempty(&self, r: &Real) -> bool {
        self.nonempty.iter().any(|x| x == r)
    }
}

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Exact(e) => e.serialize(serializer),
            Real::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

/// A built space together with the spec it came from.
#[derive(Clone)]
pub struct SpaceOracle {
    spec: SpaceSpec,
    space: Arc<dyn PointedSpace>,
    strict: bool,
}

impl fmt::Debug for SpaceOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceOracle")
            .field("id", &self.id())
            .field("space", &self.space)
            .finish()
    }
}

impl SpaceOracle {
    pub fn new(spec: SpaceSpec, space: Arc<dyn PointedSpace>) -> Self {
        SpaceOracle {
            spec,
            space,
            strict: true,
        }
    }

    /// Allows banded sphere requests on exact spaces (the band is ignored).
    pub fn lenient(mut self) -> Self {
        self.strict = false;
        self
    }

    pub fn spec(&self) -> &SpaceSpec {
        &self.spec
    }

    pub fn space(&self) -> &dyn PointedSpace {
        self.space.as_ref()
    }

    /// Stable identity used to match reports to spaces.
    pub fn id(&self) -> String {
        serde_json::to_string(&self.spec).unwrap_or_else(|_| format!("{:?}", self.spec))
    }

    pub fn kind(&self) -> SpaceKind {
        self.space.kind()
    }

    pub fn exactness(&self) -> Exactness {
        self.space.exactness()
    }

    pub fn is_exact(&self) -> bool {
        self.exactness() == Exactness::Exact
    }

    pub fn marked_point(&self) -> Point {
        self.space.marked_point()
    }

    fn check(&self, p: &Point) -> Result<()> {
        if p.tag() != self.space.point_tag() {
            return Err(Error::InvalidPoint(format!(
                "{p} has tag {:?}, space {:?} expects {:?}",
                p.tag(),
                self.kind(),
                self.space.point_tag()
            )));
        }
        if !self.space.contains(p) {
            return Err(Error::InvalidPoint(format!("{p} is not a point of {:?}", self.kind())));
        }
        Ok(())
    }

    /// `d(p, q)`.
    pub fn distance(&self, p: &Point, q: &Point) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.space.scaled_distance(p, q, &Real::Exact(Exact::one())))
    }

    /// `d(p, q) / scale`, exact before rounding on exact spaces.
    pub fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> Result<f64> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.space.scaled_distance(p, q, scale))
    }

    pub fn radial(&self, p: &Point) -> Result<Real> {
        self.check(p)?;
        Ok(self.space.radial(p))
    }

    /// `S_a(r)` within relative band `band`, at most `budget` points for
    /// sampled spaces and all points for exact spaces.
    pub fn sphere_sample(&self, r: &Real, band: f64, budget: usize) -> Result<SphereSample> {
        if !r.is_positive() {
            return Err(Error::Contract(format!("sphere radius must be positive, got {r}")));
        }
        if budget == 0 {
            return Err(Error::Contract("sphere budget must be at least 1".into()));
        }
        if !(band >= 0.0) {
            return Err(Error::Contract(format!("band must be nonnegative, got {band}")));
        }
        let exact = self.is_exact();
        if exact && band > 0.0 && self.strict {
            return Err(Error::Contract(format!(
                "band {band} requested on exact space {:?}",
                self.kind()
            )));
        }
        let band = if exact { 0.0 } else { band };
        let points = self.space.sphere(r, band, budget);
        Ok(SphereSample {
            radius: r.clone(),
            band,
            points,
            exact,
        })
    }

    /// Radii of `grid` whose sphere is nonempty (exactly for exact spaces,
    /// within [`DEFAULT_BAND`] for sampled ones).
    pub fn radius_probe(&self, grid: &[Real]) -> Result<RadiusProbe> {
        if grid.is_empty() {
            return Err(Error::Contract("radius grid is empty".into()));
        }
        let band = if self.is_exact() { 0.0 } else { DEFAULT_BAND };
        let mut nonempty = Vec::new();
        for r in grid {
            if !r.is_positive() {
                return Err(Error::Contract(format!("grid radius {r} is not positive")));
            }
            if !self.sphere_sample(r, band, 1)?.points.is_empty() {
                nonempty.push(r.clone());
            }
        }
        Ok(RadiusProbe {
            grid: grid.to_vec(),
            nonempty,
        })
    }
}

/// Outcome of a random-triple audit of the metric axioms.
#[derive(Clone, Debug, Serialize)]
pub struct MetricAudit {
    pub triples: usize,
    pub max_asymmetry: f64,
    pub max_triangle_excess: f64,
    pub max_self_distance: f64,
    pub negative_distances: usize,
}

impl MetricAudit {
    /// Holds within `slack` (0 for exact spaces).
    pub fn holds(&self, slack: f64) -> bool {
        self.negative_distances == 0
            && self.max_self_distance <= slack
            && self.max_asymmetry <= slack
            && self.max_triangle_excess <= slack
    }
}

/// Draws `triples` random triples from sphere samples along the space's
/// radius ladder (plus the marked point) and measures axiom violations.
pub fn metric_axiom_audit(oracle: &SpaceOracle, triples: usize, seed: u64) -> Result<MetricAudit> {
    let band = if oracle.is_exact() { 0.0 } else { DEFAULT_BAND };
    let mut pool = vec![oracle.marked_point()];
    for r in oracle.space().radius_ladder(24) {
        pool.extend(oracle.sphere_sample(&r, band, 8)?.points);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = MetricAudit {
        triples,
        max_asymmetry: 0.0,
        max_triangle_excess: 0.0,
        max_self_distance: 0.0,
        negative_distances: 0,
    };
    for _ in 0..triples {
        let p = &pool[rng.random_range(0..pool.len())];
        let q = &pool[rng.random_range(0..pool.len())];
        let s = &pool[rng.random_range(0..pool.len())];
        let pq = oracle.distance(p, q)?;
        let qp = oracle.distance(q, p)?;
        let ps = oracle.distance(p, s)?;
        let sq = oracle.distance(s, q)?;
        for d in [pq, ps, sq] {
            if d < 0.0 {
                audit.negative_distances += 1;
            }
        }
        let scale = pq.max(ps).max(sq).max(f64::MIN_POSITIVE);
        audit.max_self_distance = audit.max_self_distance.max(oracle.distance(p, p)?);
        audit.max_asymmetry = audit.max_asymmetry.max((pq - qp).abs() / scale);
        audit.max_triangle_excess = audit.max_triangle_excess.max((pq - ps - sq) / scale);
    }
    Ok(audit)
}
