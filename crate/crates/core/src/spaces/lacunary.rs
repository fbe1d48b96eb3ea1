//! The lacunary set `X = {r_n} ∪ {2 r_{2n}} ∪ {0}` with
//! `r_n = 3^{-n(n+1)/2}`, marked at `0`.

use std::fmt;

use serde::Serialize;

use crate::exact::{Exact, Real};
use crate::metric::{Exactness, Point, PointTag, PointedSpace, SpaceKind};
use crate::sequence::{NormalizingSequence, PointSequence};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "atom", content = "n", rename_all = "kebab-case")]
pub enum LacunaryAtom {
    Zero,
    /// `r_n`
    Single(u64),
    /// `2 r_{2n}`
    Double(u64),
}

impl fmt::Display for LacunaryAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LacunaryAtom::Zero => write!(f, "0"),
            LacunaryAtom::Single(n) => write!(f, "r_{n}"),
            LacunaryAtom::Double(n) => write!(f, "2r_{}", 2 * n),
        }
    }
}

fn triangular(n: u64) -> i64 {
    (n * (n + 1) / 2) as i64
}

/// `r_n = 3^{-n(n+1)/2}`.
pub fn r(n: u64) -> Exact {
    Exact::pow3(-triangular(n))
}

impl LacunaryAtom {
    pub fn value(&self) -> Exact {
        match *self {
            LacunaryAtom::Zero => Exact::zero(),
            LacunaryAtom::Single(n) => r(n),
            LacunaryAtom::Double(n) => &r(2 * n) * &Exact::from_integer(2),
        }
    }

    pub fn is_valid(&self) -> bool {
        !matches!(self, LacunaryAtom::Single(0) | LacunaryAtom::Double(0))
    }

    /// The atom with the given value, if any.
    pub fn from_value(v: &Exact) -> Option<LacunaryAtom> {
        if v.is_zero() {
            return Some(LacunaryAtom::Zero);
        }
        let e = -v.exp3();
        if e <= 0 {
            return None;
        }
        let m = v.mantissa();
        let n = inverse_triangular(e)?;
        if m == Exact::one().mantissa() {
            return Some(LacunaryAtom::Single(n));
        }
        if m == Exact::from_integer(2).mantissa() && n % 2 == 0 {
            return Some(LacunaryAtom::Double(n / 2));
        }
        None
    }
}

fn inverse_triangular(e: i64) -> Option<u64> {
    let guess = ((((8 * e + 1) as f64).sqrt() - 1.0) / 2.0).round() as i64;
    (guess - 1..=guess + 1)
        .filter(|&n| n >= 1)
        .find(|&n| triangular(n as u64) == e)
        .map(|n| n as u64)
}

/// Approximate index `n` with `n(n+1)/2 ≈ e`.
fn approx_index(e: f64) -> i64 {
    if e <= 0.0 {
        return 0;
    }
    (((8.0 * e + 1.0).sqrt() - 1.0) / 2.0).floor() as i64
}

/// The normalizing sequence `{r_n}`.
pub fn scale_sequence() -> NormalizingSequence {
    NormalizingSequence::new("r_n", |n| Real::Exact(r(n as u64)))
}

#[derive(Debug, Default, Clone, Copy)]
pub struct LacunarySpace;

impl LacunarySpace {
    pub fn new() -> Self {
        LacunarySpace
    }

    fn atom<'a>(&self, p: &'a Point) -> &'a LacunaryAtom {
        match p {
            Point::Lacunary { atom } => atom,
            other => panic!("lacunary space received {other}"),
        }
    }

    /// Atoms with `lo <= value <= hi`, decreasing, for `lo > 0`.
    pub fn atoms_between(&self, lo: &Exact, hi: &Exact) -> Vec<LacunaryAtom> {
        if !lo.is_positive() || hi < lo {
            return Vec::new();
        }
        // value 3^{-e}: e ranges over [-log3 hi, -log3 lo], widened by one
        let e_lo = -hi.log3_abs() - 1.0;
        let e_hi = -lo.log3_abs() + 1.0;
        let n_lo = (approx_index(e_lo) - 1).max(1) as u64;
        let n_hi = (approx_index(e_hi) + 2).max(1) as u64;
        let mut out: Vec<LacunaryAtom> = Vec::new();
        for n in n_lo..=n_hi {
            out.push(LacunaryAtom::Single(n));
            if n % 2 == 0 {
                out.push(LacunaryAtom::Double(n / 2));
            }
        }
        let mut out: Vec<(Exact, LacunaryAtom)> = out
            .into_iter()
            .map(|a| (a.value(), a))
            .filter(|(v, _)| v >= lo && v <= hi)
            .collect();
        out.sort_by(|a, b| b.0.cmp(&a.0));
        out.into_iter().map(|(_, a)| a).collect()
    }

    /// Atoms whose exponent is close to `-log3 t`, enough to contain the
    /// neighbours of `t` on both sides.
    fn atoms_near(&self, t: &Exact) -> Vec<LacunaryAtom> {
        let n0 = approx_index(-t.log3_abs());
        let mut out = Vec::new();
        for n in (n0 - 2).max(1)..=(n0 + 3).max(1) {
            let n = n as u64;
            out.push(LacunaryAtom::Single(n));
            if n % 2 == 0 {
                out.push(LacunaryAtom::Double(n / 2));
            }
        }
        out
    }

    /// Smallest atom `>= t` for `t > 0`.
    fn ceil_atom(&self, t: &Exact) -> Option<LacunaryAtom> {
        self.atoms_near(t)
            .into_iter()
            .map(|a| (a.value(), a))
            .filter(|(v, _)| v >= t)
            .min_by(|a, b| a.0.cmp(&b.0))
            .map(|(_, a)| a)
    }

    /// Largest atom `<= t`, or `Zero`.
    fn floor_atom(&self, t: &Exact) -> LacunaryAtom {
        if !t.is_positive() {
            return LacunaryAtom::Zero;
        }
        self.atoms_near(t)
            .into_iter()
            .map(|a| (a.value(), a))
            .filter(|(v, _)| v <= t)
            .max_by(|a, b| a.0.cmp(&b.0))
            .map(|(_, a)| a)
            .unwrap_or(LacunaryAtom::Zero)
    }
}

impl PointedSpace for LacunarySpace {
    fn kind(&self) -> SpaceKind {
        SpaceKind::Lacunary
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn point_tag(&self) -> PointTag {
        PointTag::Lacunary
    }

    fn marked_point(&self) -> Point {
        Point::Lacunary {
            atom: LacunaryAtom::Zero,
        }
    }

    fn contains(&self, p: &Point) -> bool {
        self.atom(p).is_valid()
    }

    fn scaled_distance(&self, p: &Point, q: &Point, scale: &Real) -> f64 {
        // atoms are at least a factor 2 apart, so the float difference of the
        // scaled values loses nothing and skips subtracting huge powers of 3
        let (a, b) = (self.atom(p).value(), self.atom(q).value());
        let (a, b) = match scale {
            Real::Exact(s) => ((&a / s).to_f64(), (&b / s).to_f64()),
            Real::Float(s) => (a.to_f64() / s, b.to_f64() / s),
        };
        (a - b).abs()
    }

    fn radial(&self, p: &Point) -> Real {
        Real::Exact(self.atom(p).value())
    }

    fn sphere(&self, r: &Real, _band: f64, _budget: usize) -> Vec<Point> {
        r.to_exact()
            .and_then(|r| LacunaryAtom::from_value(&r))
            .filter(|a| *a != LacunaryAtom::Zero)
            .map(|atom| vec![Point::Lacunary { atom }])
            .unwrap_or_default()
    }

    fn annulus_witnesses(&self, r: &Real, k: &Real, _budget: usize) -> Vec<Point> {
        let (Some(r), Some(k)) = (r.to_exact(), k.to_exact()) else {
            return Vec::new();
        };
        self.atoms_between(&(&r / &k), &(&r * &k))
            .into_iter()
            .map(|atom| Point::Lacunary { atom })
            .collect()
    }

    fn radius_at_or_above(&self, target: &Real) -> Option<Real> {
        let t = target.to_exact()?;
        if !t.is_positive() {
            return Some(Real::Exact(Exact::zero()));
        }
        self.ceil_atom(&t).map(|a| Real::Exact(a.value()))
    }

    fn point_near_radius(&self, target: &Real) -> Option<Point> {
        let t = target.to_exact()?;
        let below = self.floor_atom(&t);
        let atom = match self.ceil_atom(&t) {
            Some(above) => {
                let da = (&above.value() / &t).to_f64() - 1.0;
                let db = 1.0 - (&below.value() / &t).to_f64();
                let closer_above = if (da - db).abs() > 1e-9 {
                    da < db
                } else {
                    &above.value() - &t < &t - &below.value()
                };
                if closer_above {
                    above
                } else {
                    below
                }
            }
            None => below,
        };
        Some(Point::Lacunary { atom })
    }

    fn radius_ladder(&self, count: usize) -> Vec<Real> {
        let mut out = Vec::new();
        let mut n = 1u64;
        while out.len() < count {
            if n % 2 == 0 {
                out.push(Real::Exact(LacunaryAtom::Double(n / 2).value()));
            }
            if out.len() < count {
                out.push(Real::Exact(r(n)));
            }
            n += 1;
        }
        out
    }

    fn line_offset(&self, p: &Point) -> Option<Exact> {
        Some(self.atom(p).value())
    }

    fn special_candidates(&self, _scale: &NormalizingSequence, _depth: u32) -> Vec<PointSequence> {
        vec![
            PointSequence::new("r_n", |n| Point::Lacunary {
                atom: LacunaryAtom::Single(n as u64),
            }),
            PointSequence::new("2r_2n", |n| Point::Lacunary {
                atom: LacunaryAtom::Double(n as u64),
            }),
        ]
    }
}
