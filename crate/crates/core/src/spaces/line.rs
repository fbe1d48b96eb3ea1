//! Subsets of the real line with the metric `|x - y|`: the half-line, the
//! Cantor set, finite sets and rays embedded in Euclidean space.

use std::fmt;

use crate::exact::{Exact, Real};
use crate::metric::{Exactness, Point, PointTag, PointedSpace, SpaceKind};
use crate::sequence::{NormalizingSequence, PointSequence};
use crate::ternary::{self, ceil_in_cantor, floor_in_cantor, Membership};

/// A closed subset of the real line, queried through order.
pub trait LineSet: Send + Sync + fmt::Debug {
    fn contains(&self, x: &Exact) -> bool;

    /// Largest member `<= x`.
    fn floor(&self, x: &Exact) -> Option<Exact>;

    /// Smallest member `>= x`.
    fn ceil(&self, x: &Exact) -> Option<Exact>;
}

#[derive(Debug, Clone, Copy)]
pub struct HalfLineSet;

impl LineSet for HalfLineSet {
    fn contains(&self, x: &Exact) -> bool {
        !x.is_negative()
    }

    fn floor(&self, x: &Exact) -> Option<Exact> {
        (!x.is_negative()).then(|| x.clone())
    }

    fn ceil(&self, x: &Exact) -> Option<Exact> {
        Some(x.clone().max(Exact::zero()))
    }
}

/// The middle-thirds Cantor set `C ⊂ [0, 1]`.
#[derive(Debug, Clone, Copy)]
pub struct CantorSet;

impl LineSet for CantorSet {
    fn contains(&self, x: &Exact) -> bool {
        if x.is_negative() || *x > Exact::one() {
            return false;
        }
        // C = 1 - C; points near 1 have short expansions after reflection
        let reflected = &Exact::one() - x;
        let probe = if reflected < *x { &reflected } else { x };
        matches!(
            ternary::is_cantor(probe, ternary::ROUNDING_DEPTH).map(|v| v.answer),
            Ok(Membership::In)
        )
    }

    fn floor(&self, x: &Exact) -> Option<Exact> {
        if x.is_negative() {
            None
        } else {
            Some(floor_in_cantor(x))
        }
    }

    fn ceil(&self, x: &Exact) -> Option<Exact> {
        ceil_in_cantor(x)
    }
}

/// A finite set of reals, kept sorted.
#[derive(Debug, Clone)]
pub struct FiniteSet {
    points: Vec<Exact>,
}

impl FiniteSet {
    pub fn new(mut points: Vec<Exact>) -> Self {
        points.sort();
        points.dedup();
        FiniteSet { points }
    }

    pub fn points(&self) -> &[Exact] {
        &self.points
    }
}

impl LineSet for FiniteSet {
    fn contains(&self, x: &Exact) -> bool {
        self.points.binary_search(x).is_ok()
    }

    fn floor(&self, x: &Exact) -> Option<Exact> {
        match self.points.binary_search(x) {
            Ok(i) => Some(self.points[i].clone()),
            Err(0) => None,
            Err(i) => Some(self.points[i - 1].clone()),
        }
    }

    fn ceil(&self, x: &Exact) -> Option<Exact> {
        match self.points.binary_search(x) {
            Ok(i) => Some(self.points[i].clone()),
            Err(i) => self.points.get(i).cloned(),
        }
    }
}

/// Affine placement of a line space in `E^n`: `x ↦ origin + x * direction`.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub origin: Vec<f64>,
    /// Unit vector.
    pub direction: Vec<f64>,
}

/// A pointed subset of the line. Candidate sequences approach the marked
/// point from `side` (`+1` or `-1`).
#[derive(Debug)]
pub struct LineSpace<S: LineSet> {
    kind: SpaceKind,
    set: S,
    marked: Exact,
    side: i8,
    embedding: Option<Embedding>,
    cantor_marked: Option<u8>,
}

impl<S: LineSet> LineSpace<S> {
    pub fn new(kind: SpaceKind, set: S, marked: Exact, side: i8) -> Self {
        LineSpace {
            kind,
            set,
            marked,
            side,
            embedding: None,
            cantor_marked: None,
        }
    }

    pub fn with_embedding(mut self, embedding: Embedding) -> Self {
        self.embedding = Some(embedding);
        self
    }

    pub fn set(&self) -> &S {
        &self.set
    }

    fn coord<'a>(&self, p: &'a Point) -> &'a Exact {
        match p {
            Point::Line { x } => x,
            other => panic!("line space received {other}"),
        }
    }

    fn exact_radius(r: &Real) -> Option<Exact> {
        r.to_exact()
    }

    fn offset_point(&self, s: &Exact) -> Exact {
        &self.marked + s
    }

    /// Members at signed offsets `±r` from the marked point.
    fn at_offset(&self, r: &Exact) -> Vec<Point> {
        let mut out = Vec::new();
        for x in [&self.marked - r, &self.marked + r] {
            if self.set.contains(&x) && !out.iter().any(|p: &Point| p == &Point::line(x.clone())) {
                out.push(Point::line(x));
            }
        }
        out
    }

    /// Nearest member to the marked point at offset `side * target`,
    /// ties resolved towards the marked point.
    fn nearest_on_side(&self, target: &Exact) -> Option<Exact> {
        let want = if self.side >= 0 {
            self.offset_point(target)
        } else {
            &self.marked - target
        };
        let lo = self.set.floor(&want);
        let hi = self.set.ceil(&want);
        match (lo, hi) {
            (Some(lo), Some(hi)) => {
                let dl = (&want - &lo).abs();
                let dh = (&hi - &want).abs();
                let toward_a_is_lo = self.side >= 0;
                Some(match dl.cmp(&dh) {
                    std::cmp::Ordering::Less => lo,
                    std::cmp::Ordering::Greater => hi,
                    std::cmp::Ordering::Equal => {
                        if toward_a_is_lo {
                            lo
                        } else {
                            hi
                        }
                    }
                })
            }
            (Some(x), None) | (None, Some(x)) => Some(x),
            (None, None) => None,
        }
    }
}

impl LineSpace<CantorSet> {
    pub fn cantor(marked: u8) -> Self {
        let a = ternary::fixed_point(marked);
        let side = if marked == 0 { 1 } else { -1 };
        let mut space = LineSpace::new(SpaceKind::Cantor, CantorSet, a, side);
        space.cantor_marked = Some(marked);
        space
    }
}

impl LineSpace<HalfLineSet> {
    pub fn half_line() -> Self {
        LineSpace::new(SpaceKind::HalfLine, HalfLineSet, Exact::zero(), 1)
    }

    pub fn ray(embedding: Embedding) -> Self {
        LineSpace::new(SpaceKind::Ray, HalfLineSet, Exact::zero(), 1).with_embedding(embedding)
    }
}

impl LineSpace<FiniteSet> {
    /// A finite subspace of the half-line; `0` is always included and marked.
    pub fn finite(mut points: Vec<Exact>) -> Self {
        points.push(Exact::zero());
        LineSpace::new(SpaceKind::LineSubset, FiniteSet::new(points), Exact::zero(), 1)
    }
}

impl<S: LineSet> PointedSpace for LineSpace<S> {
    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn point_tag(&self) -> PointTag {
        PointTag::Line
    }

    fn marked_point(&self) -> Point {
        Point::line(self.marked.clone())
    }

    fn contains(&self, p: &Point) -> bool {
        self.set.contains(self.coord(p))
    }

    fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> f64 {
        let diff = (self.coord(p) - self.coord(q)).abs();
        match scale {
            Real::Exact(s) => (&diff / s).to_f64(),
            Real::Float(s) => diff.to_f64() / s,
        }
    }

    fn radial(&self, p: &Point) -> Real {
        Real::Exact((self.coord(p) - &self.marked).abs())
    }

    fn sphere(&self, r: &Real, _band: f64, _budget: usize) -> Vec<Point> {
        match Self::exact_radius(r) {
            Some(r) => self.at_offset(&r),
            None => Vec::new(),
        }
    }

    fn annulus_witnesses(&self, r: &Real, k: &Real, _budget: usize) -> Vec<Point> {
        let (Some(r), Some(k)) = (Self::exact_radius(r), Self::exact_radius(k)) else {
            return Vec::new();
        };
        let inner = &r / &k;
        let outer = &r * &k;
        let a = &self.marked;
        let mut out: Vec<Exact> = Vec::new();
        // right side [a + inner, a + outer]
        let (lo, hi) = (a + &inner, a + &outer);
        for x in [self.set.ceil(&lo), self.set.floor(&hi)].into_iter().flatten() {
            if x >= lo && x <= hi {
                out.push(x);
            }
        }
        // left side [a - outer, a - inner]
        let (lo, hi) = (a - &outer, a - &inner);
        for x in [self.set.ceil(&lo), self.set.floor(&hi)].into_iter().flatten() {
            if x >= lo && x <= hi {
                out.push(x);
            }
        }
        out.sort();
        out.dedup();
        out.into_iter().map(Point::line).collect()
    }

    fn radius_at_or_above(&self, target: &Real) -> Option<Real> {
        let t = Self::exact_radius(target)?;
        let right = self.set.ceil(&(&self.marked + &t)).map(|x| &x - &self.marked);
        let left = self.set.floor(&(&self.marked - &t)).map(|x| &self.marked - &x);
        let best = match (right, left) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        best.map(Real::Exact)
    }

    fn point_near_radius(&self, target: &Real) -> Option<Point> {
        let t = Self::exact_radius(target)?;
        self.nearest_on_side(&t).map(Point::line)
    }

    fn radius_ladder(&self, count: usize) -> Vec<Real> {
        let mut out: Vec<Exact> = Vec::new();
        let ratio = Exact::ratio(1, 2);
        let mut probe = Exact::ratio(1, 2);
        for _ in 0..count {
            if let Some(Real::Exact(r)) = self.radius_at_or_above(&Real::Exact(probe.clone())) {
                if r.is_positive() && out.last() != Some(&r) {
                    out.push(r);
                }
            }
            probe = &probe * &ratio;
        }
        out.into_iter().map(Real::Exact).collect()
    }

    fn line_offset(&self, p: &Point) -> Option<Exact> {
        Some(self.coord(p) - &self.marked)
    }

    fn embed(&self, p: &Point) -> Option<Vec<f64>> {
        let e = self.embedding.as_ref()?;
        let x = self.coord(p).to_f64();
        Some(e.origin.iter().zip(&e.direction).map(|(o, d)| o + x * d).collect())
    }

    fn distance_to_set(&self, x: &[f64]) -> Option<f64> {
        let e = self.embedding.as_ref()?;
        let rel: Vec<f64> = x.iter().zip(&e.origin).map(|(x, o)| x - o).collect();
        let along: f64 = rel.iter().zip(&e.direction).map(|(r, d)| r * d).sum::<f64>().max(0.0);
        let sq: f64 = rel
            .iter()
            .zip(&e.direction)
            .map(|(r, d)| (r - along * d).powi(2))
            .sum();
        Some(sq.sqrt())
    }

    fn special_candidates(&self, scale: &NormalizingSequence, depth: u32) -> Vec<PointSequence> {
        let Some(m) = self.cantor_marked else {
            return Vec::new();
        };
        // digit patterns: v * r_n snapped into C, for v in the truncated C^e
        let Ok(values) = ternary::ce_truncation(&Exact::from_integer(8), depth, 0) else {
            return Vec::new();
        };
        let a = self.marked.clone();
        values
            .into_iter()
            .map(|v| {
                let label = format!("cantor[{}]*r_n", v.to_fraction_string());
                let scale = scale.clone();
                let a = a.clone();
                PointSequence::new(label, move |n| {
                    let Some(r) = scale.at(n).to_exact() else {
                        return Point::line(a.clone());
                    };
                    let s = &v * &r;
                    let x = if m == 0 {
                        floor_in_cantor(&s)
                    } else {
                        &Exact::one() - &floor_in_cantor(&s)
                    };
                    Point::line(x)
                })
            })
            .collect()
    }
}
