//! JSON space specifications.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::flatcone::FlatCone;
use crate::invariants::{ConeSpace, HalfPlaneTriangle, SurfaceSpace};
use crate::revsurface::{Family, ProfileSurface};

/// Family tag and parameters of a space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceKind {
    Plane,
    Hyperboloid {
        a: f64,
    },
    Paraboloid {
        a: f64,
    },
    /// `profile` must be `"sin"`; without `axis_ratio` this is the round unit
    /// sphere.
    Spheroid {
        profile: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        axis_ratio: Option<f64>,
    },
    ProfileTable {
        r: Vec<f64>,
        m: Vec<f64>,
    },
    FlatCone {
        length: f64,
    },
    HyperbolicIdealTriangle,
}

/// A validated space specification.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub kind: SpaceKind,
    pub scale: f64,
}

/// A space ready for the estimators.
pub enum SpaceHandle {
    Surface(Box<SurfaceSpace>),
    Cone(ConeSpace),
    Triangle(HalfPlaneTriangle),
}

/// Parse and validate a JSON space specification.
///
/// ```
/// use obtuse::cli::{parse_space_spec, SpaceKind};
/// let spec = parse_space_spec(r#"{"type":"hyperboloid","a":1.0}"#).unwrap();
/// assert_eq!(spec.kind, SpaceKind::Hyperboloid { a: 1.0 });
/// assert!(parse_space_spec(r#"{"type":"flat_cone","length":7.0}"#).is_err());
/// ```
pub fn parse_space_spec(text: &str) -> Result<SpaceSpec> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| Error::Spec(format!("malformed JSON: {e}")))?;
    let obj = doc
        .as_object_mut()
        .ok_or_else(|| Error::Spec("a space spec must be a JSON object".into()))?;
    let scale = match obj.remove("scale") {
        None => 1.0,
        Some(v) => v
            .as_f64()
            .ok_or_else(|| Error::Spec("field `scale`: expected a number".into()))?,
    };
    let kind: SpaceKind = serde_json::from_value(doc).map_err(|e| Error::Spec(e.to_string()))?;
    let spec = SpaceSpec { kind, scale };
    spec.validate()?;
    Ok(spec)
}

fn invalid(field: &str, reason: &str) -> Error {
    Error::Spec(format!("field `{field}`: {reason}"))
}

impl SpaceSpec {
    pub fn new(kind: SpaceKind) -> Self {
        Self { kind, scale: 1.0 }
    }

    fn validate(&self) -> Result<()> {
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(invalid("scale", "must be positive and finite"));
        }
        match &self.kind {
            SpaceKind::Hyperboloid { a } if !(a.is_finite() && *a >= 0.0) => Err(invalid("a", "hyperboloid requires a >= 0")),
            SpaceKind::Paraboloid { a } if !(a.is_finite() && *a > 0.0) => Err(invalid("a", "paraboloid requires a > 0")),
            SpaceKind::Spheroid { profile, .. } if profile != "sin" => Err(invalid("profile", "only \"sin\" is supported")),
            SpaceKind::Spheroid { axis_ratio: Some(c), .. } if !(c.is_finite() && *c > 0.0) => {
                Err(invalid("axis_ratio", "must be positive and finite"))
            }
            SpaceKind::ProfileTable { r, m } => {
                if r.len() != m.len() || r.len() < 2 {
                    return Err(invalid("r", "r and m need the same length, at least 2"));
                }
                if r[0] != 0.0 || m[0] != 0.0 {
                    return Err(invalid("m", "table must start at r = 0 with m(0) = 0"));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(invalid("r", "must be strictly increasing"));
                }
                Ok(())
            }
            SpaceKind::FlatCone { length } if !(*length > 0.0 && *length <= 2.0 * std::f64::consts::PI) => {
                Err(invalid("length", "flat cone requires 0 < length <= 2 pi"))
            }
            SpaceKind::FlatCone { .. } | SpaceKind::HyperbolicIdealTriangle if self.scale != 1.0 => Err(invalid(
                "scale",
                "flat cones are dilation invariant and the ideal triangle has fixed curvature; scale must be 1",
            )),
            _ => Ok(()),
        }
    }

    /// The spec as a normalised JSON document.
    pub fn to_json(&self) -> Value {
        let mut v = serde_json::to_value(&self.kind).expect("spec serializes");
        v["scale"] = Value::from(self.scale);
        v
    }

    pub fn is_surface(&self) -> bool {
        !matches!(self.kind, SpaceKind::FlatCone { .. } | SpaceKind::HyperbolicIdealTriangle)
    }

    pub fn surface(&self) -> Result<ProfileSurface> {
        let family = match &self.kind {
            SpaceKind::Plane => Family::Plane,
            SpaceKind::Hyperboloid { a } => Family::Hyperboloid { a: *a },
            SpaceKind::Paraboloid { a } => Family::Paraboloid { a: *a },
            SpaceKind::Spheroid { axis_ratio: None, .. } => Family::Sphere,
            SpaceKind::Spheroid {
                axis_ratio: Some(c), ..
            } => Family::Spheroid { axis_ratio: *c },
            SpaceKind::ProfileTable { r, m } => Family::Table {
                r: r.clone(),
                m: m.clone(),
            },
            _ => return Err(Error::Capability("surface of revolution")),
        };
        ProfileSurface::new(family)?.with_scale(self.scale)
    }

    pub fn build(&self) -> Result<SpaceHandle> {
        Ok(match &self.kind {
            SpaceKind::FlatCone { length } => SpaceHandle::Cone(ConeSpace::new(FlatCone::new(*length)?)),
            SpaceKind::HyperbolicIdealTriangle => SpaceHandle::Triangle(HalfPlaneTriangle::new()),
            _ => SpaceHandle::Surface(Box::new(SurfaceSpace::new(self.surface()?))),
        })
    }

    /// Far radii used when `--rfar` is absent.
    pub fn default_far_radii(&self) -> Vec<f64> {
        match self.kind {
            SpaceKind::FlatCone { .. } => vec![1e3, 1e4, 1e5, 1e6],
            SpaceKind::HyperbolicIdealTriangle => vec![4.0, 8.0, 16.0],
            _ => vec![10.0 * self.scale, 100.0 * self.scale, 1000.0 * self.scale],
        }
    }

    /// Pair separations used when `--separations` is absent.
    pub fn default_separations(&self) -> Vec<f64> {
        [0.1, 0.03, 0.01].iter().map(|d| d * self.scale).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_parse() {
        let s = parse_space_spec(r#"{"type":"plane"}"#).unwrap();
        assert_eq!(s.kind, SpaceKind::Plane);
        let s = parse_space_spec(r#"{"type":"spheroid","profile":"sin","scale":2}"#).unwrap();
        assert_eq!(s.scale, 2.0);
        assert!(matches!(s.build().unwrap(), SpaceHandle::Surface(_)));
        let s = parse_space_spec(r#"{"type":"profile_table","r":[0,1],"m":[0,1]}"#).unwrap();
        let surf = s.surface().unwrap();
        assert!((surf.m(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(parse_space_spec(r#"{"type":"hyperbolic_ideal_triangle"}"#).is_ok());
    }

    #[test]
    fn diagnostics_name_the_field() {
        let e = parse_space_spec(r#"{"type":"flat_cone","length":7.0}"#).unwrap_err().to_string();
        assert!(e.contains("length"), "{e}");
        let e = parse_space_spec(r#"{"type":"hyperboloid"}"#).unwrap_err().to_string();
        assert!(e.contains("`a`"), "{e}");
        let e = parse_space_spec(r#"{"type":"hyperboloid","a":1,"b":2}"#).unwrap_err().to_string();
        assert!(e.contains("`b`"), "{e}");
        let e = parse_space_spec("{\n\"type\":").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
        let e = parse_space_spec(r#"{"type":"hyperboloid","a":-1}"#).unwrap_err().to_string();
        assert!(e.contains("a >= 0"), "{e}");
        let e = parse_space_spec(r#"{"type":"profile_table","r":[0,2,1],"m":[0,1,2]}"#).unwrap_err().to_string();
        assert!(e.contains("increasing"), "{e}");
        assert!(parse_space_spec(r#"{"type":"torus"}"#).is_err());
    }

    #[test]
    fn round_trip() {
        let s = parse_space_spec(r#"{"type":"hyperboloid","a":0.5,"scale":3}"#).unwrap();
        let again = parse_space_spec(&s.to_json().to_string()).unwrap();
        assert_eq!(s, again);
    }
}
