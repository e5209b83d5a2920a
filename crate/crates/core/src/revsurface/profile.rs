//! Warping profiles `m(r)` of rotationally symmetric surfaces
//! `dr² + m(r)² dθ²`.
//!
//! Every family is evaluated in normalised units; a surface with scale `λ`
//! has profile `λ m(r/λ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::simpson;
use crate::ode::{integrate, DenseSolution, Tolerance};

/// Builtin profile families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `m(r) = r`.
    Plane,
    /// Round unit sphere, `m(r) = sin r` on `[0, π]`.
    Sphere,
    /// Ellipsoid of revolution with equatorial radius 1 and polar semi-axis
    /// `axis_ratio`.
    Spheroid { axis_ratio: f64 },
    /// `z = a √(x² + y² + 1)`.
    Hyperboloid { a: f64 },
    /// `z = a (x² + y²)`.
    Paraboloid { a: f64 },
    /// Clamped cubic spline through tabulated `(r, m)`; compact when the last
    /// `m` is zero.
    Table { r: Vec<f64>, m: Vec<f64> },
}

impl Family {
    pub fn label(&self) -> String {
        match self {
            Family::Plane => "plane".into(),
            Family::Sphere => "sphere".into(),
            Family::Spheroid { axis_ratio } => format!("spheroid(c={axis_ratio})"),
            Family::Hyperboloid { a } => format!("hyperboloid(a={a})"),
            Family::Paraboloid { a } => format!("paraboloid(a={a})"),
            Family::Table { r, .. } => format!("profile_table({} nodes)", r.len()),
        }
    }
}

/// Profile values needed by the geodesic equations.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub m: f64,
    pub m1: f64,
}

/// Series data for the Cartesian chart at a pole: with
/// `f(ρ) = (m̃(ρ)² − ρ²)/ρ⁴`, `f ≈ f0 + f2 ρ²`.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct PoleSeries {
    pub f0: f64,
    pub f2: f64,
}

const TABLE_END: f64 = 1e6;

#[derive(Debug, Clone, Copy)]
enum GenKind {
    Hyperboloid { a: f64 },
    Paraboloid { a: f64 },
    Spheroid { c: f64 },
}

impl GenKind {
    fn du_dr(self, u: f64) -> f64 {
        match self {
            GenKind::Hyperboloid { a } => {
                let w = u * u / (1.0 + u * u);
                1.0 / (1.0 + a * a * w).sqrt()
            }
            GenKind::Paraboloid { a } => 1.0 / (1.0 + 4.0 * a * a * u * u).sqrt(),
            GenKind::Spheroid { c } => 1.0 / spheroid_s(c, u),
        }
    }

    fn m(self, u: f64) -> f64 {
        match self {
            GenKind::Spheroid { .. } => u.sin(),
            _ => u,
        }
    }

    fn m1(self, u: f64) -> f64 {
        match self {
            GenKind::Spheroid { c } => u.cos() / spheroid_s(c, u),
            _ => self.du_dr(u),
        }
    }

    fn m2(self, u: f64) -> f64 {
        -self.k(u) * self.m(u)
    }

    fn k(self, u: f64) -> f64 {
        match self {
            GenKind::Hyperboloid { a } => {
                let w = u * u / (1.0 + u * u);
                let q = (1.0 + u * u) * (1.0 + a * a * w);
                a * a / (q * q)
            }
            GenKind::Paraboloid { a } => {
                let q = 1.0 + 4.0 * a * a * u * u;
                4.0 * a * a / (q * q)
            }
            GenKind::Spheroid { c } => {
                let s = spheroid_s(c, u);
                c * c / (s * s * s * s)
            }
        }
    }
}

fn spheroid_s(c: f64, phi: f64) -> f64 {
    let (s, co) = phi.sin_cos();
    (co * co + c * c * s * s).sqrt()
}

#[derive(Debug, Clone)]
struct Generated {
    kind: GenKind,
    table: DenseSolution<1>,
    end_r: f64,
    end_u: f64,
}

impl Generated {
    fn build(kind: GenKind, end_r: f64) -> Result<Self> {
        let tol = Tolerance {
            rtol: 1e-13,
            atol: 1e-15,
            h_max: f64::INFINITY,
            h_min: 1e-16,
        };
        let steps = integrate(move |_, u: &[f64; 1]| [kind.du_dr(u[0])], 0.0, end_r, [0.0], tol)
            .ok_or_else(|| Error::Domain("profile integration failed".into()))?;
        let table = DenseSolution::new(steps);
        let end_u = table.eval(end_r)[0];
        Ok(Self {
            kind,
            table,
            end_r,
            end_u,
        })
    }

    fn u(&self, r: f64) -> f64 {
        if r <= self.end_r {
            self.table.eval(r)[0]
        } else {
            self.end_u + self.kind.du_dr(self.end_u) * (r - self.end_r)
        }
    }
}

/// Natural/clamped cubic spline on a strictly increasing grid.
#[derive(Debug, Clone)]
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    // second derivatives at the nodes
    d2: Vec<f64>,
    end_slope: f64,
    extend: bool,
}

impl Spline {
    fn new(x: Vec<f64>, y: Vec<f64>, start_slope: f64, end_slope: Option<f64>) -> Self {
        let n = x.len();
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];
        let mut d = vec![0.0; n];
        let h0 = x[1] - x[0];
        b[0] = h0 / 3.0;
        c[0] = h0 / 6.0;
        d[0] = (y[1] - y[0]) / h0 - start_slope;
        for i in 1..n - 1 {
            let hl = x[i] - x[i - 1];
            let hr = x[i + 1] - x[i];
            a[i] = hl / 6.0;
            b[i] = (hl + hr) / 3.0;
            c[i] = hr / 6.0;
            d[i] = (y[i + 1] - y[i]) / hr - (y[i] - y[i - 1]) / hl;
        }
        let hn = x[n - 1] - x[n - 2];
        match end_slope {
            Some(s) => {
                a[n - 1] = hn / 6.0;
                b[n - 1] = hn / 3.0;
                d[n - 1] = s - (y[n - 1] - y[n - 2]) / hn;
            }
            None => {
                b[n - 1] = 1.0;
            }
        }
        // Thomas algorithm
        for i in 1..n {
            let w = a[i] / b[i - 1];
            b[i] -= w * c[i - 1];
            d[i] -= w * d[i - 1];
        }
        let mut d2 = vec![0.0; n];
        d2[n - 1] = d[n - 1] / b[n - 1];
        for i in (0..n - 1).rev() {
            d2[i] = (d[i] - c[i] * d2[i + 1]) / b[i];
        }
        let mut s = Self {
            x,
            y,
            d2,
            end_slope: 0.0,
            extend: false,
        };
        s.end_slope = s.eval(s.x[n - 1]).1;
        s.extend = end_slope.is_none();
        s
    }

    /// `(y, y', y'', y''')` at `t`; linear beyond the last node.
    fn eval(&self, t: f64) -> (f64, f64, f64, f64) {
        let n = self.x.len();
        if self.extend && t >= self.x[n - 1] {
            let dt = t - self.x[n - 1];
            return (self.y[n - 1] + self.end_slope * dt, self.end_slope, 0.0, 0.0);
        }
        let i = match self.x.partition_point(|&xi| xi <= t) {
            0 => 0,
            k => (k - 1).min(n - 2),
        };
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        let (m0, m1) = (self.d2[i], self.d2[i + 1]);
        let y = a * self.y[i] + b * self.y[i + 1] + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let dy = (self.y[i + 1] - self.y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0
            + (3.0 * b * b - 1.0) / 6.0 * h * m1;
        let d2 = a * m0 + b * m1;
        let d3 = (m1 - m0) / h;
        (y, dy, d2, d3)
    }
}

#[derive(Debug, Clone)]
enum Shape {
    Plane,
    Sphere,
    Generated(Generated),
    Spline(Spline),
}

/// A rotationally symmetric surface `dr² + m(r)² dθ²` around the vertex
/// `r = 0`.
#[derive(Debug, Clone)]
pub struct ProfileSurface {
    family: Family,
    scale: f64,
    shape: Shape,
    // normalised units
    r_max: f64,
    poles: [PoleSeries; 2],
}

/// Build a surface of the given family at unit scale.
pub fn make_surface(family: Family) -> Result<ProfileSurface> {
    ProfileSurface::new(family)
}

impl ProfileSurface {
    pub fn new(family: Family) -> Result<Self> {
        let (shape, r_max) = match &family {
            Family::Plane => (Shape::Plane, f64::INFINITY),
            Family::Sphere => (Shape::Sphere, std::f64::consts::PI),
            Family::Spheroid { axis_ratio } => {
                let c = *axis_ratio;
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::param("axis_ratio", "must be positive and finite"));
                }
                let r_max = simpson(|phi| spheroid_s(c, phi), 0.0, std::f64::consts::PI, 1e-14);
                let g = Generated::build(GenKind::Spheroid { c }, r_max)?;
                (Shape::Generated(g), r_max)
            }
            Family::Hyperboloid { a } => {
                if !(a.is_finite() && *a >= 0.0) {
                    return Err(Error::param("a", "hyperboloid requires a >= 0"));
                }
                let g = Generated::build(GenKind::Hyperboloid { a: *a }, TABLE_END)?;
                (Shape::Generated(g), f64::INFINITY)
            }
            Family::Paraboloid { a } => {
                if !(a.is_finite() && *a > 0.0) {
                    return Err(Error::param("a", "paraboloid requires a > 0"));
                }
                let g = Generated::build(GenKind::Paraboloid { a: *a }, TABLE_END)?;
                (Shape::Generated(g), f64::INFINITY)
            }
            Family::Table { r, m } => {
                let (s, r_max) = table_spline(r, m)?;
                (Shape::Spline(s), r_max)
            }
        };
        let mut surface = Self {
            family,
            scale: 1.0,
            shape,
            r_max,
            poles: [PoleSeries::default(); 2],
        };
        surface.poles = [surface.pole_series(false), surface.pole_series(true)];
        Ok(surface)
    }

    /// The same surface with its metric multiplied by `lambda²`.
    pub fn with_scale(mut self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::param("scale", "must be positive and finite"));
        }
        self.scale = lambda;
        Ok(self)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn is_compact(&self) -> bool {
        self.r_max.is_finite()
    }

    /// Length of the meridian from the vertex to the opposite pole
    /// (`None` for noncompact surfaces).
    pub fn r_max(&self) -> Option<f64> {
        self.is_compact().then_some(self.r_max * self.scale)
    }

    /// Whether the family is known to have `K ≥ 0`.
    pub fn declares_nonnegative_curvature(&self) -> bool {
        !matches!(self.family, Family::Table { .. })
    }

    fn check(&self, r: f64) -> Result<f64> {
        let u = r / self.scale;
        if !(u >= 0.0) || u > self.r_max * (1.0 + 1e-12) {
            return Err(Error::Domain(format!("r = {r} outside the profile domain")));
        }
        Ok(u.min(self.r_max))
    }

    pub fn m(&self, r: f64) -> Result<f64> {
        let u = self.check(r)?;
        Ok(self.scale * self.jet(u).m)
    }

    pub fn m_prime(&self, r: f64) -> Result<f64> {
        let u = self.check(r)?;
        Ok(self.jet(u).m1)
    }

    pub fn m_second(&self, r: f64) -> Result<f64> {
        let u = self.check(r)?;
        Ok(self.m2(u) / self.scale)
    }

    /// Gaussian curvature `K = −m″/m`, with the limit `−m‴(0)` at the poles.
    pub fn curvature(&self, r: f64) -> Result<f64> {
        let u = self.check(r)?;
        Ok(self.k(u) / (self.scale * self.scale))
    }

    /// Area of the metric ball around the vertex, `2π ∫₀ᴿ m dr`.
    pub fn ball_area(&self, radius: f64) -> Result<f64> {
        let u = self.check(radius)?;
        let integral = match &self.shape {
            Shape::Plane => 0.5 * u * u,
            Shape::Sphere => 1.0 - u.cos(),
            _ => {
                let mut total = 0.0;
                let mut a = 0.0;
                // geometric panels keep the relative tolerance uniform
                while a < u {
                    let b = if a == 0.0 { u.min(1.0) } else { (2.0 * a).min(u) };
                    let rough = 0.5 * (b - a) * (self.jet(a).m + self.jet(b).m);
                    total += simpson(|t| self.jet(t).m, a, b, 1e-12 * rough.abs().max(1e-300));
                    a = b;
                }
                total
            }
        };
        Ok(2.0 * std::f64::consts::PI * integral * self.scale * self.scale)
    }

    // ---- normalised-unit evaluation used by the geodesic code ----

    pub(crate) fn base_r_max(&self) -> f64 {
        self.r_max
    }

    pub(crate) fn pole(&self, south: bool) -> PoleSeries {
        self.poles[south as usize]
    }

    /// `m` and `m′` in normalised units; odd continuation through the poles.
    pub(crate) fn jet(&self, r: f64) -> Jet {
        if r < 0.0 {
            let j = self.jet(-r);
            return Jet { m: -j.m, m1: j.m1 };
        }
        if r > self.r_max {
            let j = self.jet((2.0 * self.r_max - r).max(0.0));
            return Jet { m: -j.m, m1: j.m1 };
        }
        match &self.shape {
            Shape::Plane => Jet { m: r, m1: 1.0 },
            Shape::Sphere => {
                let (s, c) = r.sin_cos();
                Jet { m: s, m1: c }
            }
            Shape::Generated(g) => {
                let u = g.u(r);
                Jet {
                    m: g.kind.m(u),
                    m1: g.kind.m1(u),
                }
            }
            Shape::Spline(s) => {
                let (m, m1, _, _) = s.eval(r);
                Jet { m, m1 }
            }
        }
    }

    pub(crate) fn m2(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Plane => 0.0,
            Shape::Sphere => -r.sin(),
            Shape::Generated(g) => g.kind.m2(g.u(r)),
            Shape::Spline(s) => s.eval(r).2,
        }
    }

    pub(crate) fn k(&self, r: f64) -> f64 {
        match &self.shape {
            Shape::Plane => 0.0,
            Shape::Sphere => 1.0,
            Shape::Generated(g) => g.kind.k(g.u(r)),
            Shape::Spline(s) => {
                let (m, _, m2, m3) = s.eval(r);
                if m.abs() < 1e-12 {
                    let slope = if r < 0.5 * self.r_max.min(1e300) { 1.0 } else { -1.0 };
                    -m3 * slope
                } else {
                    -m2 / m
                }
            }
        }
    }

    fn pole_series(&self, south: bool) -> PoleSeries {
        if south && !self.is_compact() {
            return PoleSeries::default();
        }
        let k0 = self.k(if south { self.r_max } else { 0.0 });
        let rho = if self.is_compact() {
            (self.r_max / 20.0).min(0.05)
        } else {
            0.05
        };
        let m = self.jet(if south { self.r_max - rho } else { rho }).m;
        let f_ref = (m * m - rho * rho) / rho.powi(4);
        PoleSeries {
            f0: -k0 / 3.0,
            f2: (f_ref + k0 / 3.0) / (rho * rho),
        }
    }
}

fn table_spline(r: &[f64], m: &[f64]) -> Result<(Spline, f64)> {
    if r.len() != m.len() {
        return Err(Error::param("m", "must have the same length as r"));
    }
    if r.len() < 2 {
        return Err(Error::param("r", "need at least two nodes"));
    }
    if r[0] != 0.0 {
        return Err(Error::param("r", "must start at 0"));
    }
    if m[0] != 0.0 {
        return Err(Error::param("m", "m(0) must be 0"));
    }
    if r.iter().any(|v| !v.is_finite()) || m.iter().any(|v| !v.is_finite()) {
        return Err(Error::param("r", "values must be finite"));
    }
    if r.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::param("r", "must be strictly increasing"));
    }
    let last = m.len() - 1;
    let compact = m[last] == 0.0;
    let interior = if compact { &m[1..last] } else { &m[1..] };
    if interior.iter().any(|&v| v <= 0.0) {
        return Err(Error::param("m", "must be positive away from the poles"));
    }
    let spline = Spline::new(r.to_vec(), m.to_vec(), 1.0, compact.then_some(-1.0));
    let r_max = if compact { r[last] } else { f64::INFINITY };
    Ok((spline, r_max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn plane_and_sphere() {
        let p = make_surface(Family::Plane).unwrap();
        assert_eq!(p.m(3.0).unwrap(), 3.0);
        assert_eq!(p.curvature(2.0).unwrap(), 0.0);
        let s = make_surface(Family::Sphere).unwrap();
        assert_relative_eq!(s.m(1.0).unwrap(), 1f64.sin());
        assert_relative_eq!(s.curvature(0.3).unwrap(), 1.0);
        assert!(s.m(4.0).is_err());
    }

    #[test]
    fn hyperboloid_slope_limit() {
        let h = make_surface(Family::Hyperboloid { a: 1.0 }).unwrap();
        assert_relative_eq!(h.m_prime(1e5).unwrap(), 0.5f64.sqrt(), epsilon = 1e-9);
        assert_relative_eq!(h.curvature(0.0).unwrap(), 1.0, epsilon = 1e-12);
        assert!(make_surface(Family::Hyperboloid { a: -1.0 }).is_err());
    }

    #[test]
    fn spheroid_closes_up() {
        let s = make_surface(Family::Spheroid { axis_ratio: 0.5 }).unwrap();
        let rm = s.r_max().unwrap();
        assert!(s.m(rm).unwrap().abs() < 1e-9);
        assert_relative_eq!(s.m_prime(rm).unwrap(), -1.0, epsilon = 1e-9);
        let round = make_surface(Family::Spheroid { axis_ratio: 1.0 }).unwrap();
        assert_relative_eq!(round.r_max().unwrap(), PI, epsilon = 1e-12);
        assert_relative_eq!(round.m(1.0).unwrap(), 1f64.sin(), epsilon = 1e-11);
    }

    #[test]
    fn scaling_profile() {
        let s = make_surface(Family::Sphere).unwrap().with_scale(2.0).unwrap();
        assert_relative_eq!(s.m(2.0).unwrap(), 2.0 * 1f64.sin());
        assert_relative_eq!(s.curvature(1.0).unwrap(), 0.25);
        assert_relative_eq!(s.ball_area(2.0 * PI).unwrap(), 16.0 * PI, epsilon = 1e-9);
    }

    #[test]
    fn linear_table_is_plane_like() {
        let t = make_surface(Family::Table {
            r: vec![0.0, 1.0],
            m: vec![0.0, 1.0],
        })
        .unwrap();
        assert_relative_eq!(t.m(0.5).unwrap(), 0.5, epsilon = 1e-14);
        assert_relative_eq!(t.m(7.0).unwrap(), 7.0, epsilon = 1e-12);
        assert!(make_surface(Family::Table {
            r: vec![0.0, 2.0, 1.0],
            m: vec![0.0, 1.0, 2.0]
        })
        .is_err());
    }

    #[test]
    fn pole_series_matches_sphere() {
        let s = make_surface(Family::Sphere).unwrap();
        // sin²ρ − ρ² = −ρ⁴/3 + 2ρ⁶/45
        assert_relative_eq!(s.pole(false).f0, -1.0 / 3.0);
        assert!((s.pole(false).f2 - 2.0 / 45.0).abs() < 1e-4);
        assert!((s.pole(true).f2 - 2.0 / 45.0).abs() < 1e-4);
    }
}
