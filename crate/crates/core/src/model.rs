//! Trigonometry of the model planes of constant curvature `kappa`, the
//! half-plane model of the hyperbolic plane, and the explicit constants used
//! by the volume-based obtuse-constant estimates.
//!
//! Side and angle computations go through half-angle forms of the law of
//! cosines, e.g. for `kappa < 0` with `s = sqrt(-kappa)`
//!
//! ```text
//! sinh^2(s c / 2) = sinh^2(s (a - b) / 2) + sinh(s a) sinh(s b) sin^2(gamma / 2)
//! ```
//!
//! which stay accurate for thin and degenerate triangles where the plain
//! `arccos` form loses half of the available digits.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::simpson;

/// Below this magnitude a curvature is treated as exactly flat.
pub const FLAT_EPS: f64 = 1e-12;

/// Default cap on `sqrt(-kappa) * s` for hyperbolic evaluations.
pub const DEFAULT_OVERFLOW_CAP: f64 = 700.0;

/// Curvature of a model plane `M_kappa`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Curvature(f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(kappa: f64) -> Result<Self> {
        if !kappa.is_finite() {
            return Err(Error::Domain(format!("curvature must be finite, got {kappa}")));
        }
        Ok(Curvature(kappa))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_flat(self) -> bool {
        self.0.abs() < FLAT_EPS
    }

    /// `sqrt(|kappa|)`, the inverse length scale of the model plane.
    fn root(self) -> f64 {
        self.0.abs().sqrt()
    }

    /// Upper bound on triangle perimeters: `2 pi / sqrt(kappa)` for positive
    /// curvature, infinite otherwise.
    pub fn perimeter_bound(self) -> f64 {
        if self.0 > FLAT_EPS {
            2.0 * PI / self.root()
        } else {
            f64::INFINITY
        }
    }
}

/// Side lengths of a model triangle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SideTriple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

/// A side of a [`SideTriple`]; a vertex is named by the side it faces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
    C,
}

impl SideTriple {
    /// Validate lengths against the triangle inequality and, for positive
    /// curvature, the perimeter bound.
    pub fn new(a: f64, b: f64, c: f64, kappa: Curvature) -> Result<Self> {
        let sides = SideTriple { a, b, c };
        sides.validate(kappa)?;
        Ok(sides)
    }

    pub fn validate(&self, kappa: Curvature) -> Result<()> {
        let [a, b, c] = [self.a, self.b, self.c];
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidTriangle(format!(
                "sides must be positive and finite: ({a}, {b}, {c})"
            )));
        }
        let slack = 1e-12 * (a + b + c);
        if a > b + c + slack || b > a + c + slack || c > a + b + slack {
            return Err(Error::InvalidTriangle(format!(
                "triangle inequality violated: ({a}, {b}, {c})"
            )));
        }
        if a + b + c >= kappa.perimeter_bound() {
            return Err(Error::InvalidTriangle(format!(
                "perimeter {} reaches 2pi/sqrt(kappa) = {}",
                a + b + c,
                kappa.perimeter_bound()
            )));
        }
        Ok(())
    }

    /// `(adjacent, adjacent, opposite)` for the vertex facing `side`.
    fn around(&self, side: Side) -> (f64, f64, f64) {
        match side {
            Side::A => (self.b, self.c, self.a),
            Side::B => (self.a, self.c, self.b),
            Side::C => (self.a, self.b, self.c),
        }
    }
}

fn check_hyperbolic_cap(kappa: Curvature, lengths: &[f64], cap: f64) -> Result<()> {
    if kappa.value() < -FLAT_EPS {
        let s = kappa.root();
        for &l in lengths {
            if s * l > cap {
                return Err(Error::Overflow { value: s * l, cap });
            }
        }
    }
    Ok(())
}

/// Third side of the `kappa`-plane triangle with sides `a`, `b` enclosing
/// the angle `gamma`.
pub fn model_side(kappa: Curvature, a: f64, b: f64, gamma: f64) -> Result<f64> {
    model_side_capped(kappa, a, b, gamma, DEFAULT_OVERFLOW_CAP)
}

/// [`model_side`] with an explicit overflow cap on `sqrt(-kappa) * s`.
pub fn model_side_capped(kappa: Curvature, a: f64, b: f64, gamma: f64, cap: f64) -> Result<f64> {
    if !(a >= 0.0 && b >= 0.0) {
        return Err(Error::Domain(format!("side lengths must be nonnegative: a={a}, b={b}")));
    }
    if !(0.0..=PI).contains(&gamma) {
        return Err(Error::Domain(format!("angle {gamma} outside [0, pi]")));
    }
    check_hyperbolic_cap(kappa, &[a, b], cap)?;
    let half = (0.5 * gamma).sin().powi(2);
    let k = kappa.value();
    let c = if kappa.is_flat() {
        let d = 0.5 * (a - b);
        2.0 * (d * d + a * b * half).sqrt()
    } else if k < 0.0 {
        let s = kappa.root();
        let d = (0.5 * s * (a - b)).sinh();
        2.0 * (d * d + (s * a).sinh() * (s * b).sinh() * half).sqrt().asinh() / s
    } else {
        let s = kappa.root();
        let lim = PI / s;
        if a > lim * (1.0 + 1e-12) || b > lim * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "sides must not exceed pi/sqrt(kappa) = {lim}: a={a}, b={b}"
            )));
        }
        let d = (0.5 * s * (a - b)).sin();
        let v = (d * d + (s * a).sin() * (s * b).sin() * half).clamp(0.0, 1.0);
        2.0 * v.sqrt().asin() / s
    };
    Ok(c.clamp((a - b).abs(), a + b))
}

/// The `kappa`-comparison angle: the angle of the model triangle with the
/// given side lengths at the vertex facing `opposite`.
pub fn comparison_angle(kappa: Curvature, sides: &SideTriple, opposite: Side) -> Result<f64> {
    sides.validate(kappa)?;
    check_hyperbolic_cap(kappa, &[sides.a, sides.b, sides.c], DEFAULT_OVERFLOW_CAP)?;
    let (x, y, z) = sides.around(opposite);
    let p = 0.5 * (z - x + y);
    let q = 0.5 * (z + x - y);
    let ratio = if kappa.is_flat() {
        (p * q) / (x * y)
    } else if kappa.value() < 0.0 {
        let s = kappa.root();
        (s * p).sinh() * (s * q).sinh() / ((s * x).sinh() * (s * y).sinh())
    } else {
        let s = kappa.root();
        (s * p).sin() * (s * q).sin() / ((s * x).sin() * (s * y).sin())
    };
    if !ratio.is_finite() {
        return Err(Error::InvalidTriangle(format!(
            "comparison angle undefined for ({}, {}, {})",
            sides.a, sides.b, sides.c
        )));
    }
    // slight negativity from roundoff at degenerate triangles is clamped
    Ok(2.0 * ratio.clamp(0.0, 1.0).sqrt().asin())
}

/// Distance in the `kappa`-cone over a space of directions between
/// `(xi, s)` and `(eta, t)` with `angle(xi, eta) = alpha`, via
/// `f'(d) = f'(s) f'(t) + kappa f(s) f(t) cos(alpha)`, `f(s) = sinh(sqrt(-kappa) s)/sqrt(-kappa)`.
pub fn tangent_cone_distance(kappa: Curvature, s: f64, t: f64, alpha: f64) -> Result<f64> {
    if kappa.value() > FLAT_EPS {
        return Err(Error::Domain(format!(
            "tangent cone metric needs kappa <= 0, got {}",
            kappa.value()
        )));
    }
    if !(s >= 0.0 && t >= 0.0) {
        return Err(Error::Domain(format!("radii must be nonnegative: s={s}, t={t}")));
    }
    if !(0.0..=PI).contains(&alpha) {
        return Err(Error::Domain(format!("angle {alpha} outside [0, pi]")));
    }
    if kappa.is_flat() {
        let v = s * s + t * t - 2.0 * s * t * alpha.cos();
        return Ok(v.max(0.0).sqrt());
    }
    check_hyperbolic_cap(kappa, &[s, t], DEFAULT_OVERFLOW_CAP)?;
    let r = kappa.root();
    let k = kappa.value();
    let f = |x: f64| (r * x).sinh() / r;
    let fp = |x: f64| (r * x).cosh();
    let v = fp(s) * fp(t) + k * f(s) * f(t) * alpha.cos();
    Ok(v.max(1.0).acosh() / r)
}

/// `H^k` measure of the unit `k`-sphere.
pub fn sphere_measure(k: u32) -> f64 {
    match k {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (k as f64 - 1.0) * sphere_measure(k - 2),
    }
}

/// Measure of a metric ball of radius `r` in the unit `(n-1)`-sphere, up to
/// the constant factor `|S^{n-2}|`.
fn cap_profile(n: u32, r: f64) -> f64 {
    let p = (n - 2) as i32;
    if p == 0 {
        return r;
    }
    simpson(|t| t.sin().powi(p), 0.0, r, 1e-10)
}

/// Relative measure of the band `pi/2 - eps < d(o, .) <= pi/2 + eps` inside
/// the ball of radius `pi/2 + eps` of the unit `(n-1)`-sphere.
pub fn theta_n(n: u32, eps: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
    }
    if !(0.0..=PI / 2.0).contains(&eps) {
        return Err(Error::Domain(format!("eps {eps} outside [0, pi/2]")));
    }
    if eps == 0.0 {
        return Ok(0.0);
    }
    let outer = cap_profile(n, PI / 2.0 + eps);
    let inner = cap_profile(n, PI / 2.0 - eps);
    Ok(((outer - inner) / outer).clamp(0.0, 1.0))
}

/// The integral constant and the angle threshold derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StrainerConstants {
    pub c1: f64,
    pub eps: f64,
}

/// `c1 = int_{r_min/2}^1 (sinh(D s)/D)^(n-1) ds` and the largest
/// `eps in [0, pi/2]` with `c1 |S^(n-1)| theta_n(eps) <= v1 / 2`.
pub fn strainer_constants(n: u32, d_bound: f64, r_min: f64, v1: f64) -> Result<StrainerConstants> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension must be >= 2, got {n}")));
    }
    if !(d_bound > 0.0 && d_bound.is_finite()) {
        return Err(Error::Domain(format!("D must be positive, got {d_bound}")));
    }
    if !(0.5..=1.0).contains(&r_min) {
        return Err(Error::Domain(format!("r_min must lie in [1/2, 1], got {r_min}")));
    }
    if !(v1 > 0.0) {
        return Err(Error::Domain(format!("v1 must be positive, got {v1}")));
    }
    let p = (n - 1) as i32;
    let c1 = simpson(|s| ((d_bound * s).sinh() / d_bound).powi(p), 0.5 * r_min, 1.0, 1e-10);
    let area = sphere_measure(n - 1);
    let holds = |eps: f64| -> Result<bool> { Ok(c1 * area * theta_n(n, eps)? <= 0.5 * v1) };
    let eps = if holds(PI / 2.0)? {
        PI / 2.0
    } else {
        let (mut lo, mut hi) = (0.0, PI / 2.0);
        while hi - lo > 1e-9 {
            let mid = 0.5 * (lo + hi);
            if holds(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    };
    Ok(StrainerConstants { c1, eps })
}

/// A point of the upper half-plane model of the hyperbolic plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub x: f64,
    pub y: f64,
}

impl HPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0 && x.is_finite() && y.is_finite()) {
            return Err(Error::Domain(format!("half-plane point needs y > 0, got ({x}, {y})")));
        }
        Ok(HPoint { x, y })
    }
}

/// Hyperbolic distance, `cosh d = 1 + |p - q|^2 / (2 y_p y_q)`.
pub fn halfplane_distance(p: &HPoint, q: &HPoint) -> f64 {
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (p.y * q.y).sqrt())).asinh()
}

/// Membership in the closed ideal triangle with vertices `0`, `1`, `infinity`.
pub fn ideal_triangle_contains(p: &HPoint) -> bool {
    (0.0..=1.0).contains(&p.x) && (p.x - 0.5).powi(2) + p.y * p.y >= 0.25
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn k(v: f64) -> Curvature {
        Curvature::new(v).unwrap()
    }

    #[test]
    fn model_side_examples() {
        assert_abs_diff_eq!(model_side(k(0.0), 3.0, 4.0, PI / 2.0).unwrap(), 5.0, epsilon = 1e-14);
        assert_abs_diff_eq!(model_side(k(-1.0), 2.5, 0.75, 0.0).unwrap(), 1.75, epsilon = 1e-12);
        // oracle: plain hyperbolic law of cosines
        let oracle = (1f64.cosh().powi(2) - 1f64.sinh().powi(2) * (PI / 3.0).cos()).acosh();
        assert_abs_diff_eq!(model_side(k(-1.0), 1.0, 1.0, PI / 3.0).unwrap(), oracle, epsilon = 1e-12);
    }

    #[test]
    fn model_side_spherical() {
        // octant triangle on the unit sphere
        assert_abs_diff_eq!(
            model_side(k(1.0), PI / 2.0, PI / 2.0, PI / 2.0).unwrap(),
            PI / 2.0,
            epsilon = 1e-12
        );
        assert!(model_side(k(1.0), 4.0, 1.0, 0.3).is_err());
    }

    #[test]
    fn model_side_errors() {
        assert!(matches!(model_side(k(0.0), -1.0, 1.0, 0.1), Err(Error::Domain(_))));
        assert!(matches!(model_side(k(0.0), 1.0, 1.0, 4.0), Err(Error::Domain(_))));
        assert!(matches!(
            model_side_capped(k(-1.0), 20.0, 1.0, 0.1, 10.0),
            Err(Error::Overflow { .. })
        ));
    }

    #[test]
    fn comparison_angle_examples() {
        let s = SideTriple::new(3.0, 4.0, 5.0, k(0.0)).unwrap();
        assert_abs_diff_eq!(comparison_angle(k(0.0), &s, Side::C).unwrap(), PI / 2.0, epsilon = 1e-14);
        let s = SideTriple::new(1.0, 1.0, 2.0, k(0.0)).unwrap();
        assert_abs_diff_eq!(comparison_angle(k(0.0), &s, Side::C).unwrap(), PI, epsilon = 1e-14);
        let c = model_side(k(-1.0), 1.0, 1.0, PI / 3.0).unwrap();
        let s = SideTriple::new(1.0, 1.0, c, k(-1.0)).unwrap();
        assert_abs_diff_eq!(comparison_angle(k(-1.0), &s, Side::C).unwrap(), PI / 3.0, epsilon = 1e-10);
    }

    #[test]
    fn invalid_triangles_rejected() {
        assert!(SideTriple::new(1.0, 1.0, 3.0, k(0.0)).is_err());
        assert!(SideTriple::new(0.0, 1.0, 1.0, k(0.0)).is_err());
        // perimeter bound on the unit sphere
        assert!(SideTriple::new(2.0, 2.0, 2.5, k(1.0)).is_err());
        assert!(SideTriple::new(1.0, 1.0, 1.5, k(1.0)).is_ok());
    }

    #[test]
    fn tangent_cone_examples() {
        let (s, t) = (1.3, 0.4);
        assert_abs_diff_eq!(tangent_cone_distance(k(-1.0), s, t, 0.0).unwrap(), s - t, epsilon = 1e-7);
        assert_abs_diff_eq!(tangent_cone_distance(k(-1.0), s, t, PI).unwrap(), s + t, epsilon = 1e-12);
        assert_abs_diff_eq!(
            tangent_cone_distance(k(0.0), 1.0, 1.0, PI / 2.0).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(tangent_cone_distance(k(0.5), 1.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn theta_two_closed_form() {
        for i in 0..=20 {
            let eps = PI / 2.0 * i as f64 / 20.0;
            let v = theta_n(2, eps).unwrap();
            assert_abs_diff_eq!(v, 4.0 * eps / (PI + 2.0 * eps), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(theta_n(2, PI / 2.0).unwrap(), 1.0, epsilon = 1e-15);
        assert!(theta_n(1, 0.1).is_err());
        assert!(theta_n(2, 2.0).is_err());
    }

    #[test]
    fn theta_three_matches_cap_areas() {
        // caps of S^2 have area 2 pi (1 - cos r)
        let eps: f64 = 0.1;
        let expected = ((PI / 2.0 - eps).cos() - (PI / 2.0 + eps).cos()) / (1.0 - (PI / 2.0 + eps).cos());
        assert_abs_diff_eq!(theta_n(3, eps).unwrap(), expected, epsilon = 1e-9);
    }

    #[test]
    fn sphere_measures() {
        assert_abs_diff_eq!(sphere_measure(2), 4.0 * PI, epsilon = 1e-14);
        assert_abs_diff_eq!(sphere_measure(3), 2.0 * PI * PI, epsilon = 1e-13);
    }

    #[test]
    fn strainer_constant_examples() {
        let c = strainer_constants(2, 1.0, 0.5, 0.1).unwrap();
        assert_abs_diff_eq!(c.c1, 1f64.cosh() - 0.25f64.cosh(), epsilon = 1e-9);
        assert!(c.eps > 0.0 && c.eps < PI / 2.0);
        let big = strainer_constants(2, 1.0, 0.5, 1e6).unwrap();
        assert_eq!(big.eps, PI / 2.0);
        let tiny = strainer_constants(2, 1.0, 0.5, 1e-12).unwrap();
        assert!(tiny.eps < 1e-9);
        assert!(strainer_constants(2, 1.0, 0.3, 1.0).is_err());
    }

    #[test]
    fn halfplane_examples() {
        let o = HPoint::new(0.0, 1.0).unwrap();
        let up = HPoint::new(0.0, std::f64::consts::E).unwrap();
        assert_abs_diff_eq!(halfplane_distance(&o, &up), 1.0, epsilon = 1e-14);
        assert_eq!(halfplane_distance(&o, &o), 0.0);
        let side = HPoint::new(1.0, 1.0).unwrap();
        assert_abs_diff_eq!(halfplane_distance(&o, &side), 1.5f64.acosh(), epsilon = 1e-14);
        assert!(HPoint::new(0.0, 0.0).is_err());
    }

    #[test]
    fn ideal_triangle_membership() {
        assert!(ideal_triangle_contains(&HPoint::new(0.5, 10.0).unwrap()));
        assert!(!ideal_triangle_contains(&HPoint::new(0.5, 0.4).unwrap()));
        assert!(ideal_triangle_contains(&HPoint::new(0.0, 1.0).unwrap()));
        assert!(!ideal_triangle_contains(&HPoint::new(1.2, 5.0).unwrap()));
    }
}
