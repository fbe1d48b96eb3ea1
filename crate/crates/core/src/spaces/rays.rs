//! Two rays from the origin of the plane at angle `θ`, marked at the origin.

use std::f64::consts::PI;

use crate::exact::{Exact, Real};
use crate::metric::{Exactness, Point, PointTag, PointedSpace, SpaceKind};
use crate::sequence::{NormalizingSequence, PointSequence};

#[derive(Debug, Clone)]
pub struct PlanarRays {
    theta: f64,
    /// `sin^2(θ/2)`, with the right-angle and straight cases pinned.
    half_sin_sq: f64,
}

impl PlanarRays {
    pub fn new(theta: f64) -> Self {
        let half_sin_sq = if theta == PI {
            1.0
        } else if theta == PI / 2.0 {
            0.5
        } else {
            (theta / 2.0).sin().powi(2)
        };
        PlanarRays { theta, half_sin_sq }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    fn parts<'a>(&self, p: &'a Point) -> (usize, &'a Exact) {
        match p {
            Point::Ray { ray, radius } => (*ray, radius),
            other => panic!("planar rays received {other}"),
        }
    }

    fn scaled(x: &Exact, scale: &Real) -> f64 {
        match scale {
            Real::Exact(s) => (x / s).to_f64(),
            Real::Float(s) => x.to_f64() / s,
        }
    }
}

impl PointedSpace for PlanarRays {
    fn kind(&self) -> SpaceKind {
        SpaceKind::PlanarRays
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn point_tag(&self) -> PointTag {
        PointTag::Ray
    }

    fn marked_point(&self) -> Point {
        Point::Ray {
            ray: 0,
            radius: Exact::zero(),
        }
    }

    fn contains(&self, p: &Point) -> bool {
        let (ray, radius) = self.parts(p);
        ray < 2 && !radius.is_negative() && (ray == 0 || !radius.is_zero())
    }

    fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> f64 {
        // canonical order keeps the float evaluation symmetric
        let (p, q) = if (self.parts(p).0, self.parts(p).1) <= (self.parts(q).0, self.parts(q).1) {
            (p, q)
        } else {
            (q, p)
        };
        let (rp, xp) = self.parts(p);
        let (rq, xq) = self.parts(q);
        if rp == rq || xp.is_zero() || xq.is_zero() {
            let same_side = if rp == rq { xp - xq } else { xp + xq };
            return Self::scaled(&same_side.abs(), scale);
        }
        let a = Self::scaled(xp, scale);
        let b = Self::scaled(xq, scale);
        ((a - b).powi(2) + 4.0 * a * b * self.half_sin_sq).sqrt()
    }

    fn radial(&self, p: &Point) -> Real {
        Real::Exact(self.parts(p).1.clone())
    }

    fn sphere(&self, r: &Real, _band: f64, _budget: usize) -> Vec<Point> {
        match r.to_exact() {
            Some(radius) if radius.is_positive() => (0..2)
                .map(|ray| Point::Ray {
                    ray,
                    radius: radius.clone(),
                })
                .collect(),
            _ => Vec::new(),
        }
    }

    fn annulus_witnesses(&self, r: &Real, k: &Real, _budget: usize) -> Vec<Point> {
        let (Some(r), Some(k)) = (r.to_exact(), k.to_exact()) else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for radius in [&r / &k, &r * &k] {
            for ray in 0..2 {
                out.push(Point::Ray {
                    ray,
                    radius: radius.clone(),
                });
            }
        }
        out
    }

    fn radius_at_or_above(&self, target: &Real) -> Option<Real> {
        target.to_exact().map(|t| Real::Exact(t.max(Exact::zero())))
    }

    fn point_near_radius(&self, target: &Real) -> Option<Point> {
        let radius = target.to_exact()?.max(Exact::zero());
        Some(Point::Ray { ray: 0, radius })
    }

    fn radius_ladder(&self, count: usize) -> Vec<Real> {
        (1..=count as i64)
            .map(|j| Real::Exact(Exact::ratio(1, 1 << j.min(62))))
            .collect()
    }

    fn special_candidates(&self, scale: &NormalizingSequence, _depth: u32) -> Vec<PointSequence> {
        // the mesh on the second ray
        (0..=16)
            .map(|j| {
                let c = Exact::ratio(j, 2);
                let scale = scale.clone();
                PointSequence::new(format!("ray1[{}]*r_n", c.to_fraction_string()), move |n| {
                    let radius = match scale.at(n).to_exact() {
                        Some(r) => &c * &r,
                        None => Exact::zero(),
                    };
                    if radius.is_zero() {
                        Point::Ray { ray: 0, radius }
                    } else {
                        Point::Ray { ray: 1, radius }
                    }
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_angle_distances() {
        let x = PlanarRays::new(PI / 2.0);
        let p = Point::Ray {
            ray: 0,
            radius: Exact::ratio(1, 5),
        };
        let q = Point::Ray {
            ray: 1,
            radius: Exact::ratio(1, 10),
        };
        let one = Real::Exact(Exact::one());
        let d = x.scaled_distance(&p, &q, &one);
        assert!((d - 0.05f64.sqrt()).abs() < 1e-15);
        assert_eq!(d, x.scaled_distance(&q, &p, &one));
    }

    #[test]
    fn straight_angle_is_a_line() {
        let x = PlanarRays::new(PI);
        let p = Point::Ray {
            ray: 0,
            radius: Exact::ratio(1, 5),
        };
        let q = Point::Ray {
            ray: 1,
            radius: Exact::ratio(1, 10),
        };
        let d = x.scaled_distance(&p, &q, &Real::Exact(Exact::ratio(1, 10)));
        assert!((d - 3.0).abs() < 1e-15);
    }

    #[test]
    fn origin_has_a_single_representation() {
        let x = PlanarRays::new(1.0);
        assert!(!x.contains(&Point::Ray {
            ray: 1,
            radius: Exact::zero()
        }));
    }
}
