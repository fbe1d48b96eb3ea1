//! The corpus of concrete spaces and the declarative [`SpaceSpec`].

pub mod lacunary;
pub mod line;
pub mod rays;
pub mod sampled;

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::Exact;
use crate::metric::{PointedSpace, SpaceOracle};

pub use lacunary::{LacunaryAtom, LacunarySpace};
pub use line::{Embedding, LineSpace};
pub use rays::PlanarRays;
pub use sampled::{CurveSpace, Polynomial, RegionBetweenGraphs, RotationBody};

/// Maximum polynomial degree accepted in curve specs.
pub const MAX_DEGREE: usize = 8;

fn default_band() -> f64 {
    crate::metric::DEFAULT_BAND
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceSpec {
    HalfLine {},
    Cantor {
        #[serde(default)]
        marked: u8,
    },
    Lacunary {},
    PlanarRays {
        theta: f64,
    },
    /// `F(t) = (p_1(t), ..., p_n(t))`, coefficients ascending.
    Curve {
        coordinates: Vec<Vec<f64>>,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_band")]
        band: f64,
    },
    /// Union of the graphs `t ↦ (t, f_i(t))`.
    CurveFamily {
        functions: Vec<Vec<f64>>,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_band")]
        band: f64,
    },
    RegionBetweenGraphs {
        lower: Vec<f64>,
        upper: Vec<f64>,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_band")]
        band: f64,
    },
    RotationBody {
        alpha: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_band")]
        band: f64,
    },
    /// `{origin + s * direction : s >= 0}`.
    Ray {
        origin: Vec<f64>,
        direction: Vec<f64>,
    },
    /// A finite subset of the half-line; `0` is added and marked.
    LineSubset {
        points: Vec<Exact>,
    },
}

fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidSpec {
        field,
        reason: reason.into(),
    }
}

fn check_poly(field: &'static str, p: &[f64]) -> Result<()> {
    if p.is_empty() {
        return Err(invalid(field, "empty coefficient list"));
    }
    if p.len() > MAX_DEGREE + 1 {
        return Err(invalid(field, format!("degree {} exceeds {MAX_DEGREE}", p.len() - 1)));
    }
    if p.iter().any(|c| !c.is_finite()) {
        return Err(invalid(field, "coefficients must be finite"));
    }
    Ok(())
}

fn check_band(band: f64) -> Result<()> {
    if !(band > 0.0 && band < 0.5) {
        return Err(invalid("band", format!("expected 0 < band < 0.5, got {band}")));
    }
    Ok(())
}

/// Graphs through a common point with a common right derivative.
fn check_common_tangent(field: &'static str, fs: &[&[f64]]) -> Result<()> {
    let p0 = Polynomial(fs[0].to_vec());
    for f in &fs[1..] {
        let p = Polynomial(f.to_vec());
        if p.at_zero() != p0.at_zero() {
            return Err(invalid(field, "all graphs must share the value at 0"));
        }
        if p.derivative_at_zero() != p0.derivative_at_zero() {
            return Err(invalid(field, "all graphs must share the derivative at 0"));
        }
    }
    Ok(())
}

impl SpaceSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            SpaceSpec::HalfLine {} | SpaceSpec::Lacunary {} => Ok(()),
            SpaceSpec::Cantor { marked } => {
                if *marked > 1 {
                    return Err(invalid("marked", format!("expected 0 or 1, got {marked}")));
                }
                Ok(())
            }
            SpaceSpec::PlanarRays { theta } => {
                if !(*theta > 0.0 && *theta <= PI) {
                    return Err(invalid("theta", format!("expected 0 < theta <= pi, got {theta}")));
                }
                Ok(())
            }
            SpaceSpec::Curve {
                coordinates, band, ..
            } => {
                if coordinates.len() < 2 {
                    return Err(invalid("coordinates", "a curve needs at least two coordinates"));
                }
                for c in coordinates {
                    check_poly("coordinates", c)?;
                }
                check_band(*band)
            }
            SpaceSpec::CurveFamily { functions, band, .. } => {
                if functions.is_empty() {
                    return Err(invalid("functions", "at least one function is required"));
                }
                for f in functions {
                    check_poly("functions", f)?;
                }
                let fs: Vec<&[f64]> = functions.iter().map(Vec::as_slice).collect();
                check_common_tangent("functions", &fs)?;
                check_band(*band)
            }
            SpaceSpec::RegionBetweenGraphs {
                lower, upper, band, ..
            } => {
                check_poly("lower", lower)?;
                check_poly("upper", upper)?;
                check_common_tangent("upper", &[lower, upper])?;
                check_band(*band)
            }
            SpaceSpec::RotationBody { alpha, band, .. } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(invalid("alpha", format!("expected alpha > 0, got {alpha}")));
                }
                check_band(*band)
            }
            SpaceSpec::Ray { origin, direction } => {
                if origin.is_empty() || origin.len() != direction.len() {
                    return Err(invalid("direction", "origin and direction must have equal, nonzero length"));
                }
                if origin.iter().chain(direction).any(|c| !c.is_finite()) {
                    return Err(invalid("direction", "coordinates must be finite"));
                }
                if direction.iter().all(|&c| c == 0.0) {
                    return Err(invalid("direction", "direction must be nonzero"));
                }
                Ok(())
            }
            SpaceSpec::LineSubset { points } => {
                if points.iter().any(Exact::is_negative) {
                    return Err(invalid("points", "points must be nonnegative"));
                }
                Ok(())
            }
        }
    }

    /// Sampling band of sampled kinds.
    pub fn band(&self) -> Option<f64> {
        match self {
            SpaceSpec::Curve { band, .. }
            | SpaceSpec::CurveFamily { band, .. }
            | SpaceSpec::RegionBetweenGraphs { band, .. }
            | SpaceSpec::RotationBody { band, .. } => Some(*band),
            _ => None,
        }
    }
}

fn unit(v: &[f64]) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / n).collect()
}

pub fn build_space(spec: &SpaceSpec) -> Result<SpaceOracle> {
    spec.validate()?;
    let space: Arc<dyn PointedSpace> = match spec {
        SpaceSpec::HalfLine {} => Arc::new(LineSpace::half_line()),
        SpaceSpec::Cantor { marked } => Arc::new(LineSpace::cantor(*marked)),
        SpaceSpec::Lacunary {} => Arc::new(LacunarySpace::new()),
        SpaceSpec::PlanarRays { theta } => Arc::new(PlanarRays::new(*theta)),
        SpaceSpec::Curve { coordinates, .. } => Arc::new(CurveSpace::curve(coordinates.clone())),
        SpaceSpec::CurveFamily { functions, .. } => Arc::new(CurveSpace::graphs(functions.clone())),
        SpaceSpec::RegionBetweenGraphs {
            lower, upper, seed, ..
        } => Arc::new(RegionBetweenGraphs::new(lower.clone(), upper.clone(), *seed)),
        SpaceSpec::RotationBody { alpha, seed, .. } => Arc::new(RotationBody::new(*alpha, *seed)),
        SpaceSpec::Ray { origin, direction } => Arc::new(LineSpace::ray(Embedding {
            origin: origin.clone(),
            direction: unit(direction),
        })),
        SpaceSpec::LineSubset { points } => Arc::new(LineSpace::finite(points.clone())),
    };
    Ok(SpaceOracle::new(spec.clone(), space))
}

/// The ray `{a + s F'(0) : s >= 0}` tangent to a curve at `a = F(0)`.
pub fn curve_tangent_ray(spec: &SpaceSpec) -> Result<SpaceOracle> {
    let SpaceSpec::Curve { coordinates, .. } = spec else {
        return Err(Error::UnsupportedSpace(format!(
            "tangent ray needs a curve spec, got {}",
            serde_json::to_string(spec)?
        )));
    };
    spec.validate()?;
    let curve = CurveSpace::curve(coordinates.clone());
    let derivative = curve.derivative_at_zero(0);
    if derivative.iter().all(|&d| d == 0.0) {
        return Err(Error::DegenerateRay);
    }
    build_space(&SpaceSpec::Ray {
        origin: curve.origin().to_vec(),
        direction: derivative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Real;
    use crate::metric::Point;

    #[test]
    fn tangent_rays() {
        let spec = |coordinates: Vec<Vec<f64>>| SpaceSpec::Curve {
            coordinates,
            seed: 0,
            band: 1e-4,
        };
        let ray = curve_tangent_ray(&spec(vec![vec![0.0, 1.0], vec![0.0, 0.0, 1.0]])).unwrap();
        let p = Point::line(Exact::one());
        assert_eq!(ray.space().embed(&p), Some(vec![1.0, 0.0]));

        let diag = curve_tangent_ray(&spec(vec![vec![0.0, 1.0], vec![0.0, 1.0]])).unwrap();
        let e = diag.space().embed(&p).unwrap();
        assert!((e[0] - 0.5f64.sqrt()).abs() < 1e-15 && (e[1] - 0.5f64.sqrt()).abs() < 1e-15);

        let space3 = spec(vec![vec![0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0], vec![0.0, 0.0, 1.0]]);
        let e = curve_tangent_ray(&space3).unwrap().space().embed(&p).unwrap();
        assert_eq!(e, vec![1.0, 0.0, 0.0]);

        let flat = spec(vec![vec![0.0, 0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]]);
        assert!(matches!(curve_tangent_ray(&flat), Err(Error::DegenerateRay)));
    }

    #[test]
    fn validation_names_the_field() {
        let err = build_space(&SpaceSpec::PlanarRays { theta: 4.0 }).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { field: "theta", .. }));
        let err = build_space(&SpaceSpec::RotationBody {
            alpha: 0.0,
            seed: 0,
            band: 1e-4,
        })
        .unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { field: "alpha", .. }));
        let err = build_space(&SpaceSpec::Cantor { marked: 2 }).unwrap_err();
        assert!(matches!(err, Error::InvalidSpec { field: "marked", .. }));
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"kind": "cantor", "marked": 1}"#;
        let spec: SpaceSpec = serde_json::from_str(text).unwrap();
        assert_eq!(spec, SpaceSpec::Cantor { marked: 1 });
        let back: SpaceSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<SpaceSpec>(r#"{"kind": "half-line", "x": 1}"#).is_err());
    }

    #[test]
    fn lacunary_point_set() {
        let x = build_space(&SpaceSpec::Lacunary {}).unwrap();
        let grid = [
            Real::Exact(lacunary::r(1)),
            Real::Exact(&(&lacunary::r(1) + &lacunary::r(2)) / &Exact::from_integer(2)),
            Real::Exact(lacunary::r(2)),
        ];
        let probe = x.radius_probe(&grid).unwrap();
        assert_eq!(probe.nonempty, vec![grid[0].clone(), grid[2].clone()]);
    }
}
