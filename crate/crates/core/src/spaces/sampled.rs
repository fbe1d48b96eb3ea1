//! Continuum subsets of Euclidean space, seen through sampled spheres:
//! parametric curves, unions of graphs, the region between two graphs and
//! a body of rotation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exact::Real;
use crate::metric::{Exactness, Point, PointTag, PointedSpace, SpaceKind};
use crate::sequence::{NormalizingSequence, PointSequence};

/// Polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial(pub Vec<f64>);

impl Polynomial {
    pub fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    pub fn at_zero(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }

    pub fn derivative_at_zero(&self) -> f64 {
        self.0.get(1).copied().unwrap_or(0.0)
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Geometric parameter grid from `t_max` down to `t_max * 1e-18`.
fn log_grid(t_max: f64) -> Vec<f64> {
    let steps = 420;
    let ratio = 10f64.powf(-18.0 / steps as f64);
    let mut t = t_max;
    let mut out = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        out.push(t);
        t *= ratio;
    }
    out.reverse();
    out
}

fn bisect(h: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut h_lo = h(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h(mid);
        if (h_mid <= 0.0) == (h_lo <= 0.0) {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
        }
    }
    if h(lo).abs() <= h(hi).abs() {
        lo
    } else {
        hi
    }
}

/// Roots of `h` on `(0, t_max]` located by sign changes on a log grid.
fn roots(h: impl Fn(f64) -> f64, t_max: f64) -> Vec<f64> {
    let grid = log_grid(t_max);
    let mut out = Vec::new();
    let mut prev_t = 0.0;
    let mut prev_h = h(0.0);
    for &t in &grid {
        let ht = h(t);
        if ht == 0.0 {
            out.push(t);
        } else if prev_h != 0.0 && (ht > 0.0) != (prev_h > 0.0) {
            out.push(bisect(&h, prev_t, t));
        }
        prev_t = t;
        prev_h = ht;
    }
    out
}

/// Minimizes `f` on `[lo, hi]` by golden-section search.
fn golden_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo <= 1e-17 * hi.abs().max(1e-300) {
            break;
        }
    }
    f(lo).min(f(hi)).min(f1).min(f2)
}

fn band_ok(d: f64, r: f64, band: f64) -> bool {
    (d - r).abs() <= band.max(1e-12) * r
}

fn seed_for(seed: u64, r: f64) -> u64 {
    seed ^ r.to_bits().rotate_left(17)
}

fn scaled_float(d: f64, scale: &Real) -> f64 {
    d / scale.to_f64()
}

/// A finite union of polynomial curves `F_b : [0, 1] → E^n` with
/// `F_b(0) = a` for every branch.
#[derive(Debug, Clone)]
pub struct CurveSpace {
    kind: SpaceKind,
    branches: Vec<Vec<Polynomial>>,
    origin: Vec<f64>,
}

impl CurveSpace {
    /// One curve given coordinate-wise.
    pub fn curve(coordinates: Vec<Vec<f64>>) -> Self {
        let branch: Vec<Polynomial> = coordinates.into_iter().map(Polynomial).collect();
        let origin = branch.iter().map(Polynomial::at_zero).collect();
        CurveSpace {
            kind: SpaceKind::Curve,
            branches: vec![branch],
            origin,
        }
    }

    /// The union of the graphs `t ↦ (t, f_i(t))`.
    pub fn graphs(functions: Vec<Vec<f64>>) -> Self {
        let branches: Vec<Vec<Polynomial>> = functions
            .into_iter()
            .map(|f| vec![Polynomial(vec![0.0, 1.0]), Polynomial(f)])
            .collect();
        let origin = branches[0].iter().map(Polynomial::at_zero).collect();
        CurveSpace {
            kind: SpaceKind::CurveFamily,
            branches,
            origin,
        }
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    /// `F_b'(0)`.
    pub fn derivative_at_zero(&self, branch: usize) -> Vec<f64> {
        self.branches[branch].iter().map(Polynomial::derivative_at_zero).collect()
    }

    pub fn eval(&self, branch: usize, t: f64) -> Vec<f64> {
        self.branches[branch].iter().map(|p| p.eval(t)).collect()
    }

    fn parts(&self, p: &Point) -> (usize, f64) {
        match p {
            Point::Curve { branch, t } => (*branch, *t),
            other => panic!("curve space received {other}"),
        }
    }

    fn radius_of(&self, branch: usize, t: f64) -> f64 {
        dist(&self.eval(branch, t), &self.origin)
    }

    fn sphere_on(&self, branch: usize, r: f64) -> Vec<f64> {
        roots(|t| self.radius_of(branch, t) - r, 1.0)
    }
}

impl PointedSpace for CurveSpace {
    fn kind(&self) -> SpaceKind {
        self.kind
    }

    fn exactness(&self) -> Exactness {
        Exactness::Sampled
    }

    fn point_tag(&self) -> PointTag {
        PointTag::Curve
    }

    fn marked_point(&self) -> Point {
        Point::Curve { branch: 0, t: 0.0 }
    }

    fn contains(&self, p: &Point) -> bool {
        let (b, t) = self.parts(p);
        b < self.branches.len() && (0.0..=1.0).contains(&t)
    }

    fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> f64 {
        let (bp, tp) = self.parts(p);
        let (bq, tq) = self.parts(q);
        scaled_float(dist(&self.eval(bp, tp), &self.eval(bq, tq)), scale)
    }

    fn radial(&self, p: &Point) -> Real {
        let (b, t) = self.parts(p);
        Real::Float(self.radius_of(b, t))
    }

    fn sphere(&self, r: &Real, band: f64, budget: usize) -> Vec<Point> {
        let r = r.to_f64();
        let mut out = Vec::new();
        for branch in 0..self.branches.len() {
            for t in self.sphere_on(branch, r) {
                if out.len() < budget && band_ok(self.radius_of(branch, t), r, band) {
                    out.push(Point::Curve { branch, t });
                }
            }
        }
        out
    }

    fn annulus_witnesses(&self, r: &Real, k: &Real, budget: usize) -> Vec<Point> {
        let (r, k) = (r.to_f64(), k.to_f64());
        let mut out = Vec::new();
        for radius in [r / k, r, r * k] {
            out.extend(self.sphere(&Real::Float(radius), 1e-9, budget));
        }
        out
    }

    fn radius_at_or_above(&self, target: &Real) -> Option<Real> {
        let t = target.to_f64();
        (!self.sphere(&Real::Float(t), 1e-9, 1).is_empty()).then_some(Real::Float(t))
    }

    fn point_near_radius(&self, target: &Real) -> Option<Point> {
        let r = target.to_f64();
        if r <= 0.0 {
            return Some(self.marked_point());
        }
        self.sphere_on(0, r).first().map(|&t| Point::Curve { branch: 0, t })
    }

    fn radius_ladder(&self, count: usize) -> Vec<Real> {
        (1..=count as i32)
            .map(|j| Real::Float(0.5f64.powi(j)))
            .filter(|r| self.radius_at_or_above(r).is_some())
            .collect()
    }

    fn embed(&self, p: &Point) -> Option<Vec<f64>> {
        let (b, t) = self.parts(p);
        Some(self.eval(b, t))
    }

    fn distance_to_set(&self, x: &[f64]) -> Option<f64> {
        let grid = log_grid(1.0);
        let mut best = dist(x, &self.origin);
        for branch in 0..self.branches.len() {
            let f = |t: f64| dist(x, &self.eval(branch, t));
            let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
            let (i, _) = values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
            let lo = if i == 0 { 0.0 } else { grid[i - 1] };
            let hi = grid[(i + 1).min(grid.len() - 1)];
            best = best.min(golden_min(&f, lo, hi)).min(values[i]);
        }
        Some(best)
    }

    fn special_candidates(&self, scale: &NormalizingSequence, _depth: u32) -> Vec<PointSequence> {
        (1..self.branches.len())
            .map(|branch| {
                let space = self.clone();
                let scale = scale.clone();
                PointSequence::new(format!("branch{branch}*r_n"), move |n| {
                    let r = scale.at(n).to_f64();
                    match space.sphere_on(branch, r).first() {
                        Some(&t) => Point::Curve { branch, t },
                        None => Point::Curve { branch: 0, t: 0.0 },
                    }
                })
            })
            .collect()
    }
}

/// `{(x, y) : 0 <= x <= 1, min(f, g)(x) <= y <= max(f, g)(x)}`, marked at
/// `(0, f(0))`. Boundary graphs are included.
#[derive(Debug, Clone)]
pub struct RegionBetweenGraphs {
    lower: Polynomial,
    upper: Polynomial,
    c: f64,
    seed: u64,
}

impl RegionBetweenGraphs {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, seed: u64) -> Self {
        let lower = Polynomial(lower);
        let c = lower.at_zero();
        RegionBetweenGraphs {
            lower,
            upper: Polynomial(upper),
            c,
            seed,
        }
    }

    fn member(&self, x: f64, y: f64, slack: f64) -> bool {
        if !(0.0..=1.0).contains(&x) {
            return false;
        }
        let (a, b) = (self.lower.eval(x), self.upper.eval(x));
        y >= a.min(b) - slack && y <= a.max(b) + slack
    }

    /// Angle at which the circle of radius `r` about `a` meets a graph.
    fn crossing_angle(&self, f: &Polynomial, r: f64) -> Option<f64> {
        let h = |x: f64| (x * x + (f.eval(x) - self.c).powi(2)).sqrt() - r;
        let x = *roots(h, 1.0).first()?;
        Some((f.eval(x) - self.c).atan2(x))
    }

    fn coords(p: &Point) -> &[f64] {
        match p {
            Point::Euclid { coords } => coords,
            other => panic!("euclidean space received {other}"),
        }
    }
}

impl PointedSpace for RegionBetweenGraphs {
    fn kind(&self) -> SpaceKind {
        SpaceKind::RegionBetweenGraphs
    }

    fn exactness(&self) -> Exactness {
        Exactness::Sampled
    }

    fn point_tag(&self) -> PointTag {
        PointTag::Euclid
    }

    fn marked_point(&self) -> Point {
        Point::Euclid {
            coords: vec![0.0, self.c],
        }
    }

    fn contains(&self, p: &Point) -> bool {
        let c = Self::coords(p);
        c.len() == 2 && self.member(c[0], c[1], 1e-12 * (1.0 + c[0].abs()))
    }

    fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> f64 {
        scaled_float(dist(Self::coords(p), Self::coords(q)), scale)
    }

    fn radial(&self, p: &Point) -> Real {
        let c = Self::coords(p);
        Real::Float(dist(c, &[0.0, self.c]))
    }

    fn sphere(&self, r: &Real, band: f64, budget: usize) -> Vec<Point> {
        let r = r.to_f64();
        let (Some(p), Some(q)) = (
            self.crossing_angle(&self.lower, r),
            self.crossing_angle(&self.upper, r),
        ) else {
            return Vec::new();
        };
        let (lo, hi) = (p.min(q), p.max(q));
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(self.seed, r));
        let mut angles = vec![lo, hi];
        while angles.len() < budget.max(2) {
            angles.push(if hi > lo { rng.random_range(lo..=hi) } else { lo });
        }
        angles.truncate(budget);
        angles
            .into_iter()
            .map(|phi| vec![r * phi.cos(), self.c + r * phi.sin()])
            .filter(|v| self.member(v[0], v[1], 1e-12 * r) && band_ok(dist(v, &[0.0, self.c]), r, band))
            .map(|coords| Point::Euclid { coords })
            .collect()
    }

    fn annulus_witnesses(&self, r: &Real, k: &Real, budget: usize) -> Vec<Point> {
        let (r, k) = (r.to_f64(), k.to_f64());
        let mut out = Vec::new();
        for radius in [r / k, r * k] {
            out.extend(self.sphere(&Real::Float(radius), 1e-9, budget / 2 + 2));
        }
        out
    }

    fn radius_at_or_above(&self, target: &Real) -> Option<Real> {
        let t = target.to_f64();
        (!self.sphere(&Real::Float(t), 1e-9, 2).is_empty()).then_some(Real::Float(t))
    }

    fn point_near_radius(&self, target: &Real) -> Option<Point> {
        let r = target.to_f64();
        if r <= 0.0 {
            return Some(self.marked_point());
        }
        self.sphere(&Real::Float(r), 1e-9, 1).into_iter().next()
    }

    fn radius_ladder(&self, count: usize) -> Vec<Real> {
        (1..=count as i32)
            .map(|j| Real::Float(0.5f64.powi(j)))
            .filter(|r| self.radius_at_or_above(r).is_some())
            .collect()
    }

    fn embed(&self, p: &Point) -> Option<Vec<f64>> {
        Some(Self::coords(p).to_vec())
    }
}

/// `{(x, y, z) : x >= 0, sqrt(y^2 + z^2) <= x^(1 + α)}`, marked at the origin.
#[derive(Debug, Clone)]
pub struct RotationBody {
    alpha: f64,
    seed: u64,
}

impl RotationBody {
    pub fn new(alpha: f64, seed: u64) -> Self {
        RotationBody { alpha, seed }
    }

    fn coords(p: &Point) -> &[f64] {
        match p {
            Point::Euclid { coords } => coords,
            other => panic!("euclidean space received {other}"),
        }
    }

    fn member(&self, v: &[f64], slack: f64) -> bool {
        v.len() == 3 && v[0] >= 0.0 && (v[1] * v[1] + v[2] * v[2]).sqrt() <= v[0].powf(1.0 + self.alpha) + slack
    }

    /// Smallest `x` on the sphere of radius `r`: `x^2 + x^(2+2α) = r^2`.
    fn x_min(&self, r: f64) -> f64 {
        let h = |x: f64| x * x + x.powf(2.0 + 2.0 * self.alpha) - r * r;
        bisect(&h, 0.0, r)
    }
}

impl PointedSpace for RotationBody {
    fn kind(&self) -> SpaceKind {
        SpaceKind::RotationBody
    }

    fn exactness(&self) -> Exactness {
        Exactness::Sampled
    }

    fn point_tag(&self) -> PointTag {
        PointTag::Euclid
    }

    fn marked_point(&self) -> Point {
        Point::Euclid {
            coords: vec![0.0; 3],
        }
    }

    fn contains(&self, p: &Point) -> bool {
        let v = Self::coords(p);
        self.member(v, 1e-12 * (1.0 + norm(v)))
    }

    fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> f64 {
        scaled_float(dist(Self::coords(p), Self::coords(q)), scale)
    }

    fn radial(&self, p: &Point) -> Real {
        Real::Float(norm(Self::coords(p)))
    }

    fn sphere(&self, r: &Real, band: f64, budget: usize) -> Vec<Point> {
        let r = r.to_f64();
        if r <= 0.0 {
            return Vec::new();
        }
        let x0 = self.x_min(r);
        let rho0 = (r * r - x0 * x0).max(0.0).sqrt();
        let mut pts = vec![
            vec![r, 0.0, 0.0],
            vec![x0, rho0, 0.0],
            vec![x0, -rho0, 0.0],
            vec![x0, 0.0, rho0],
            vec![x0, 0.0, -rho0],
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(self.seed, r));
        while pts.len() < budget {
            let x = if r > x0 { rng.random_range(x0..=r) } else { r };
            let rho = (r * r - x * x).max(0.0).sqrt();
            let psi = rng.random_range(0.0..2.0 * PI);
            pts.push(vec![x, rho * psi.cos(), rho * psi.sin()]);
        }
        pts.truncate(budget);
        pts.into_iter()
            .filter(|v| self.member(v, 1e-12 * r) && band_ok(norm(v), r, band))
            .map(|coords| Point::Euclid { coords })
            .collect()
    }

    fn annulus_witnesses(&self, r: &Real, k: &Real, budget: usize) -> Vec<Point> {
        let (r, k) = (r.to_f64(), k.to_f64());
        let mut out = Vec::new();
        for radius in [r / k, r * k] {
            out.extend(self.sphere(&Real::Float(radius), 1e-9, budget / 2 + 5));
        }
        out
    }

    fn radius_at_or_above(&self, target: &Real) -> Option<Real> {
        let t = target.to_f64();
        (t > 0.0).then_some(Real::Float(t))
    }

    fn point_near_radius(&self, target: &Real) -> Option<Point> {
        let r = target.to_f64().max(0.0);
        Some(Point::Euclid {
            coords: vec![r, 0.0, 0.0],
        })
    }

    fn radius_ladder(&self, count: usize) -> Vec<Real> {
        (1..=count as i32).map(|j| Real::Float(0.5f64.powi(j))).collect()
    }

    fn embed(&self, p: &Point) -> Option<Vec<f64>> {
        Some(Self::coords(p).to_vec())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_sphere_root() {
        let c = CurveSpace::curve(vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0]]);
        let s = c.sphere(&Real::Float(0.1), 1e-4, 8);
        assert_eq!(s.len(), 1);
        let r = c.radial(&s[0]).to_f64();
        assert!((r - 0.1).abs() < 1e-15);
    }

    #[test]
    fn radial_derivative_matches_speed() {
        // d(F(t), a) / t -> |F'(0)| for F(t) = (2t, t^2)
        let c = CurveSpace::curve(vec![vec![0.0, 2.0], vec![0.0, 0.0, 1.0]]);
        let t = 1e-6;
        let ratio = c.radial(&Point::Curve { branch: 0, t }).to_f64() / t;
        assert!((ratio - 2.0).abs() < 1e-5);
    }

    #[test]
    fn distance_to_parabola() {
        let c = CurveSpace::curve(vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0]]);
        // nearest point to (0.1, 0): u + 2u^3 = 0.1
        let d = c.distance_to_set(&[0.1, 0.0]).unwrap();
        let u = bisect(&|u: f64| u + 2.0 * u.powi(3) - 0.1, 0.0, 0.1);
        let want = ((u - 0.1).powi(2) + u.powi(4)).sqrt();
        assert!((d - want).abs() < 1e-12, "{d} vs {want}");
    }

    #[test]
    fn region_sphere_stays_inside() {
        let x = RegionBetweenGraphs::new(vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 0.0], 3);
        let pts = x.sphere(&Real::Float(0.01), 1e-4, 64);
        assert!(pts.len() >= 2);
        for p in &pts {
            assert!(x.contains(p));
            assert!((x.radial(p).to_f64() - 0.01).abs() <= 1e-4 * 0.01);
        }
    }

    #[test]
    fn rotation_body_sphere_stays_inside() {
        let x = RotationBody::new(0.5, 1);
        for p in x.sphere(&Real::Float(0.02), 1e-4, 64) {
            assert!(x.contains(&p));
        }
    }
}
