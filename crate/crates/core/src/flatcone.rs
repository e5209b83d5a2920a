//! Euclidean cones over circles.
//!
//! A cone with link length `ℓ ≤ 2π` is the plane sector of angle `ℓ` with
//! its edges glued. Geodesics are straight segments in an unrolling; since
//! the angular gap between two points never exceeds `ℓ/2 ≤ π`, a minimizer
//! meets the apex only on the plane itself (`ℓ = 2π`, gap `π`).
//!
//! Directions at a point other than the apex are angles in `(−π, π]`
//! measured from the outward radial direction, positive toward increasing
//! `φ`. At the apex a direction is the `φ` of the link circle.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::{circle_gap, wrap_pi};

/// Relative tolerance for a tie between the two lifts at gap `ℓ/2`.
const TIE_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatCone {
    link_length: f64,
}

/// Polar coordinates on a cone; `phi` is reduced into `[0, ℓ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub rho: f64,
    pub phi: f64,
}

impl FlatCone {
    pub fn new(link_length: f64) -> Result<Self> {
        if !(link_length > 0.0 && link_length <= 2.0 * PI * (1.0 + 1e-15)) {
            return Err(Error::param("length", format!("need 0 < length <= 2π, got {link_length}")));
        }
        Ok(Self {
            link_length: link_length.min(2.0 * PI),
        })
    }

    /// The Euclidean plane.
    pub fn plane() -> Self {
        Self { link_length: 2.0 * PI }
    }

    pub fn link_length(&self) -> f64 {
        self.link_length
    }

    pub fn point(&self, rho: f64, phi: f64) -> Result<ConePoint> {
        if !(rho >= 0.0 && rho.is_finite() && phi.is_finite()) {
            return Err(Error::Domain(format!("invalid cone point ({rho}, {phi})")));
        }
        let phi = if rho == 0.0 { 0.0 } else { phi.rem_euclid(self.link_length) };
        Ok(ConePoint { rho, phi })
    }

    /// `lim area(B(o, R)) / R²`, exactly `ℓ/2`.
    pub fn v_inf(&self) -> f64 {
        0.5 * self.link_length
    }

    /// Curvature concentrated at the apex, `2π − ℓ`.
    pub fn total_curvature(&self) -> f64 {
        2.0 * PI - self.link_length
    }

    /// Area of the ball of radius `radius` about the apex.
    pub fn ball_area(&self, radius: f64) -> f64 {
        0.5 * self.link_length * radius * radius
    }

    /// Signed lift of `phi_q − phi_p` into `(−ℓ/2, ℓ/2]`.
    fn signed_gap(&self, from: f64, to: f64) -> f64 {
        let l = self.link_length;
        let mut d = (to - from).rem_euclid(l);
        if d > 0.5 * l {
            d -= l;
        }
        d
    }
}

pub fn cone_distance(cone: &FlatCone, p: &ConePoint, q: &ConePoint) -> f64 {
    let psi = circle_gap(p.phi, q.phi, cone.link_length);
    if psi >= PI {
        return p.rho + q.rho;
    }
    // half-angle form, exact for collinear points
    let d = p.rho - q.rho;
    let s = (0.5 * psi).sin();
    (d * d + 4.0 * p.rho * q.rho * s * s).sqrt()
}

/// Minimizers between two cone points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeConnection {
    pub distance: f64,
    /// Initial directions at `p`, one per minimizer.
    pub directions: Vec<f64>,
    /// Directions at `q` pointing back toward `p`.
    pub terminal_directions: Vec<f64>,
    pub through_apex: bool,
}

pub fn cone_connect(cone: &FlatCone, p: &ConePoint, q: &ConePoint) -> Result<ConeConnection> {
    let distance = cone_distance(cone, p, q);
    if distance == 0.0 {
        return Err(Error::Domain("cone_connect needs p != q".into()));
    }
    let l = cone.link_length;
    if p.rho == 0.0 || q.rho == 0.0 {
        // radial segment; the apex end carries a link direction
        let dir = |at: &ConePoint, other: &ConePoint| if at.rho == 0.0 { other.phi } else { PI };
        return Ok(ConeConnection {
            distance,
            directions: vec![dir(p, q)],
            terminal_directions: vec![dir(q, p)],
            through_apex: false,
        });
    }
    let s = cone.signed_gap(p.phi, q.phi);
    if s.abs() >= PI {
        return Ok(ConeConnection {
            distance,
            directions: vec![PI],
            terminal_directions: vec![PI],
            through_apex: true,
        });
    }
    let lifts = if (s.abs() - 0.5 * l).abs() <= TIE_EPS * l {
        vec![-0.5 * l, 0.5 * l]
    } else {
        vec![s]
    };
    let mut directions = Vec::new();
    let mut terminal_directions = Vec::new();
    for s in lifts {
        let (vx, vy) = (q.rho * s.cos() - p.rho, q.rho * s.sin());
        directions.push(vy.atan2(vx));
        terminal_directions.push(wrap_pi((-vy).atan2(-vx) - s));
    }
    Ok(ConeConnection {
        distance,
        directions,
        terminal_directions,
        through_apex: false,
    })
}

/// Both flavours of the obtuse constant from infinity of a pair on a cone,
/// each already reduced by `π/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeObtuse {
    /// From `∠(⇑_p^q, ↑_p^x)` and its mirror at `q`.
    pub angle: f64,
    /// From the flat comparison angles `∠̃ xpq`, `∠̃ xqp`.
    pub comparison: f64,
}

/// Exact `limsup_{x→∞}` of both obtuse quantities for the pair `(p, q)`.
///
/// Far points escape along link angles `β`. Seen from a point off the apex
/// they arrive from the limit directions `[−ℓ/2, ℓ/2]`, and the flat
/// comparison angles converge to `arccos(±(b_p − b_q)/|p,q|)` with the
/// Busemann function `b_β(y) = −ρ_y cos(gap(φ_y, β))`.
pub fn cone_obtuse_inf_exact(cone: &FlatCone, p: &ConePoint, q: &ConePoint) -> Result<ConeObtuse> {
    let pq = cone_connect(cone, p, q)?;
    let a_p = far_angle(cone, p, &pq.directions);
    let a_q = far_angle(cone, q, &pq.terminal_directions);
    let angle = a_p.max(a_q) - 0.5 * PI;
    let spread = max_busemann_gap(cone, p, q);
    let comparison = (spread / pq.distance).clamp(0.0, 1.0).asin();
    Ok(ConeObtuse { angle, comparison })
}

/// `sup` over limit directions `ξ` at `c` of `inf_{u ∈ dirs} ∠(u, ξ)`.
fn far_angle(cone: &FlatCone, c: &ConePoint, dirs: &[f64]) -> f64 {
    let l = cone.link_length;
    if c.rho == 0.0 {
        return (0.5 * l).min(PI);
    }
    let half = 0.5 * l;
    let value = |xi: f64| dirs.iter().map(|&u| circle_gap(u, xi, 2.0 * PI)).fold(f64::INFINITY, f64::min);
    let mut cands = vec![-half, half];
    for &u in dirs {
        cands.push(u + PI);
        for &v in dirs {
            cands.push(0.5 * (u + v));
            cands.push(0.5 * (u + v) + PI);
        }
    }
    cands
        .into_iter()
        .map(wrap_pi)
        // wrapping costs a few ulps of 2π, enough to push ±ℓ/2 outside
        .filter(|x| x.abs() <= half + 1e-13)
        .map(|x| value(x.clamp(-half, half)))
        .fold(0.0, f64::max)
}

/// `max_β |b_β(p) − b_β(q)|` from the finitely many critical link angles.
fn max_busemann_gap(cone: &FlatCone, p: &ConePoint, q: &ConePoint) -> f64 {
    let l = cone.link_length;
    let b = |y: &ConePoint, beta: f64| -y.rho * circle_gap(y.phi, beta, l).min(PI).cos();
    let h = |beta: f64| (b(p, beta) - b(q, beta)).abs();
    let mut cands = vec![p.phi, q.phi, p.phi + 0.5 * l, q.phi + 0.5 * l];
    for i in -1..=1 {
        for j in -1..=1 {
            let a = p.phi + i as f64 * l;
            let c = q.phi + j as f64 * l;
            // on a smooth piece, b_p − b_q = X cos β + Y sin β
            let x = -p.rho * a.cos() + q.rho * c.cos();
            let y = -p.rho * a.sin() + q.rho * c.sin();
            let beta = y.atan2(x);
            cands.push(beta);
            cands.push(beta + PI);
        }
    }
    cands.into_iter().map(|x| h(x.rem_euclid(l))).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn distances_by_unrolling() {
        let plane = FlatCone::plane();
        let d = cone_distance(&plane, &plane.point(1.0, 0.0).unwrap(), &plane.point(1.0, PI).unwrap());
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-15);
        let c = FlatCone::new(PI).unwrap();
        let d = cone_distance(&c, &c.point(1.0, 0.0).unwrap(), &c.point(1.0, 0.5 * PI).unwrap());
        assert_abs_diff_eq!(d, 2f64.sqrt(), epsilon = 1e-15);
        let c = FlatCone::new(1.5 * PI).unwrap();
        let d = cone_distance(&c, &c.point(1.0, 0.0).unwrap(), &c.point(1.0, 0.75 * PI).unwrap());
        assert_abs_diff_eq!(d, (2.0 - 2.0 * (0.75 * PI).cos()).sqrt(), epsilon = 1e-15);
        assert!(FlatCone::new(7.0).is_err());
        assert!(FlatCone::new(0.0).is_err());
    }

    #[test]
    fn radial_pair_on_plane() {
        let plane = FlatCone::plane();
        let c = cone_connect(&plane, &plane.point(1.0, 0.3).unwrap(), &plane.point(2.0, 0.3).unwrap()).unwrap();
        assert_eq!(c.directions, vec![0.0]);
        assert!(!c.through_apex);
        let c = cone_connect(&plane, &plane.point(1.0, 0.3).unwrap(), &plane.point(2.0, 0.3 + PI).unwrap()).unwrap();
        assert!(c.through_apex);
        assert_abs_diff_eq!(c.distance, 3.0, epsilon = 1e-15);
        assert_eq!(c.directions, vec![PI]);
    }

    #[test]
    fn tie_returns_two_symmetric_minimizers() {
        let c = FlatCone::new(PI).unwrap();
        let p = c.point(1.0, 0.0).unwrap();
        let q = c.point(1.0, 0.5 * PI).unwrap();
        let conn = cone_connect(&c, &p, &q).unwrap();
        assert_eq!(conn.directions.len(), 2);
        assert_abs_diff_eq!(conn.directions[0], -conn.directions[1], epsilon = 1e-15);
        assert_abs_diff_eq!(conn.directions[1], 0.75 * PI, epsilon = 1e-15);
    }

    #[test]
    fn plane_and_radial_pairs_are_right_angles() {
        let plane = FlatCone::plane();
        let v = cone_obtuse_inf_exact(&plane, &plane.point(1.0, 0.2).unwrap(), &plane.point(0.7, 2.9).unwrap()).unwrap();
        assert_abs_diff_eq!(v.angle, 0.5 * PI, epsilon = 1e-12);
        assert_abs_diff_eq!(v.comparison, 0.5 * PI, epsilon = 1e-7);
        for l in [0.3, 1.0, PI, 5.0] {
            let c = FlatCone::new(l).unwrap();
            let v = cone_obtuse_inf_exact(&c, &c.point(1.0, 0.1).unwrap(), &c.point(2.5, 0.1).unwrap()).unwrap();
            assert_abs_diff_eq!(v.angle, 0.5 * PI, epsilon = 1e-12);
            assert_abs_diff_eq!(v.comparison, 0.5 * PI, epsilon = 1e-7);
        }
    }

    #[test]
    fn apex_distance_matches_tangent_cone() {
        use crate::model::{tangent_cone_distance, Curvature};
        let c = FlatCone::new(1.2 * PI).unwrap();
        let p = c.point(1.3, 0.4).unwrap();
        let q = c.point(0.6, 1.1).unwrap();
        let psi = circle_gap(p.phi, q.phi, c.link_length());
        let t = tangent_cone_distance(Curvature::FLAT, p.rho, q.rho, psi).unwrap();
        assert_abs_diff_eq!(cone_distance(&c, &p, &q), t, epsilon = 1e-14);
    }

    #[test]
    fn obtuse_constants_scale_invariant() {
        let c = FlatCone::new(0.5 * PI).unwrap();
        let p = c.point(1.0, 0.2).unwrap();
        let q = c.point(1.7, 1.3).unwrap();
        let v = cone_obtuse_inf_exact(&c, &p, &q).unwrap();
        for lam in [1e-3, 4.0, 1e5] {
            let ps = c.point(lam * p.rho, p.phi).unwrap();
            let qs = c.point(lam * q.rho, q.phi).unwrap();
            let w = cone_obtuse_inf_exact(&c, &ps, &qs).unwrap();
            assert_abs_diff_eq!(v.angle, w.angle, epsilon = 1e-12);
            assert_abs_diff_eq!(v.comparison, w.comparison, epsilon = 1e-12);
        }
    }

    #[test]
    fn limit_direction_at_the_lower_edge() {
        // the sup sits at ξ = −ℓ/2, which wrapping nudges just outside
        let l = 0.3867398655820962;
        let c = FlatCone::new(l).unwrap();
        let p = c.point(2.2678992314969996, 0.0).unwrap();
        let q = c.point(1.7555664810821449, 0.34149788291701577 * l).unwrap();
        let e = cone_obtuse_inf_exact(&c, &p, &q).unwrap();
        let u = cone_connect(&c, &p, &q).unwrap().directions[0];
        assert_abs_diff_eq!(e.angle, u + 0.5 * l - 0.5 * PI, epsilon = 1e-12);
        assert!(e.comparison <= e.angle);
    }
}
