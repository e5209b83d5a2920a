//! Unit-speed geodesics on surfaces of revolution.
//!
//! Away from the poles the regular system `r̈ = m m′ θ̇²`,
//! `θ̈ = −2 (m′/m) ṙ θ̇` is integrated in polar coordinates. Within
//! `R_CHART` of a pole the integrator switches to the Cartesian chart
//! `x = ρ cos θ, y = ρ sin θ`, where the metric reads
//! `dx² + dy² + f(ρ) (x dy − y dx)²` with `f = (m² − ρ²)/ρ⁴`.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::profile::{PoleSeries, ProfileSurface};
use crate::error::{Error, Result};
use crate::numeric::{brent_root, wrap_pi};
use crate::ode::{DenseStep, OdeSystem, Stepper, Tolerance};

/// Chart switch radius in normalised units.
pub(crate) const R_CHART: f64 = 1e-3;

/// Per-step tolerance relative to the requested global tolerance.
const LOCAL_FACTOR: f64 = 1e-2;

/// A point in geodesic polar coordinates around the vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfacePoint {
    pub r: f64,
    pub theta: f64,
}

impl SurfacePoint {
    /// Build a point with `theta` reduced to `[0, 2π)`.
    pub fn new(r: f64, theta: f64) -> Self {
        Self {
            r,
            theta: theta.rem_euclid(2.0 * PI),
        }
    }
}

/// Coordinate velocity `(ṙ, θ̇)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Velocity {
    pub r_dot: f64,
    pub theta_dot: f64,
}

/// Initial data of a unit-speed geodesic.
///
/// At the vertex (`r = 0`) `point.theta` carries the direction of travel and
/// the velocity is `(1, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicState {
    pub point: SurfacePoint,
    pub velocity: Velocity,
    /// Clairaut constant `m² θ̇`.
    pub nu: f64,
}

impl GeodesicState {
    /// Unit-speed state leaving `point` at angle `alpha` from the outward
    /// meridian, measured towards increasing `θ`.
    pub fn from_direction(surface: &ProfileSurface, point: SurfacePoint, alpha: f64) -> Result<Self> {
        let lam = surface.scale();
        let u = check_r(surface, point.r)?;
        if u == 0.0 {
            return Ok(Self {
                point: SurfacePoint::new(0.0, point.theta + alpha),
                velocity: Velocity {
                    r_dot: 1.0,
                    theta_dot: 0.0,
                },
                nu: 0.0,
            });
        }
        if u >= surface.base_r_max() {
            // at the far pole every direction points back towards the vertex
            return Ok(Self {
                point: SurfacePoint::new(point.r, point.theta + alpha),
                velocity: Velocity {
                    r_dot: -1.0,
                    theta_dot: 0.0,
                },
                nu: 0.0,
            });
        }
        let m = surface.jet(u).m;
        let (s, c) = alpha.sin_cos();
        let theta_dot = s / (m * lam);
        Ok(Self {
            point,
            velocity: Velocity { r_dot: c, theta_dot },
            nu: m * m * lam * lam * theta_dot,
        })
    }

    /// State from an explicit velocity, which must have unit speed within
    /// `1e-8`.
    pub fn new(surface: &ProfileSurface, point: SurfacePoint, velocity: Velocity) -> Result<Self> {
        let u = check_r(surface, point.r)?;
        let m = surface.jet(u).m * surface.scale();
        let speed2 = velocity.r_dot.powi(2) + (m * velocity.theta_dot).powi(2);
        if speed2 == 0.0 {
            return Err(Error::ZeroVelocity);
        }
        if (speed2 - 1.0).abs() > 1e-8 {
            return Err(Error::Domain(format!("velocity is not unit speed (|v|² = {speed2})")));
        }
        Ok(Self {
            point,
            velocity,
            nu: m * m * velocity.theta_dot,
        })
    }

    /// Angle from the outward meridian (the direction itself at the vertex).
    pub fn direction(&self, surface: &ProfileSurface) -> f64 {
        let u = self.point.r / surface.scale();
        if u == 0.0 {
            return self.point.theta;
        }
        let m = surface.jet(u).m * surface.scale();
        (m * self.velocity.theta_dot).atan2(self.velocity.r_dot)
    }

    /// Normalised polar state `[r, θ, ṙ, θ̇]`.
    pub(crate) fn base_state(&self, surface: &ProfileSurface) -> [f64; 4] {
        let lam = surface.scale();
        [
            self.point.r / lam,
            self.point.theta,
            self.velocity.r_dot,
            self.velocity.theta_dot * lam,
        ]
    }
}

fn check_r(surface: &ProfileSurface, r: f64) -> Result<f64> {
    let u = r / surface.scale();
    if !(u >= 0.0) || u > surface.base_r_max() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("r = {r} outside the profile domain")));
    }
    Ok(u.min(surface.base_r_max()))
}

/// One sample along a geodesic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathSample {
    pub s: f64,
    pub point: SurfacePoint,
    /// `θ` without reduction modulo 2π.
    pub theta_unwrapped: f64,
    pub velocity: Velocity,
}

/// An integrated geodesic with its dense representation.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub initial: GeodesicState,
    pub samples: Vec<PathSample>,
    pub length: f64,
    /// Signed number of full turns around the vertex.
    pub winding: i64,
    scale: f64,
    segments: Vec<Segment>,
}

impl GeodesicPath {
    pub fn end(&self) -> &PathSample {
        self.samples.last().expect("paths always carry samples")
    }

    /// Dense evaluation at arclength `s`.
    pub fn at(&self, s: f64) -> PathSample {
        let t = (s / self.scale).clamp(0.0, self.length / self.scale);
        let i = self
            .segments
            .partition_point(|seg| seg.t_end < t)
            .min(self.segments.len() - 1);
        let y = self.segments[i].polar(t);
        sample_from(self.scale, t, &y)
    }

    /// Largest deviation of the Clairaut constant over the samples.
    pub fn clairaut_drift(&self, surface: &ProfileSurface) -> f64 {
        self.dense_samples(4)
            .iter()
            .map(|smp| {
                let m = surface.jet(smp.point.r / self.scale).m * self.scale;
                (m * m * smp.velocity.theta_dot - self.initial.nu).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of `ṙ² + m²θ̇²` from 1.
    pub fn speed_drift(&self, surface: &ProfileSurface) -> f64 {
        self.dense_samples(4)
            .iter()
            .map(|smp| {
                let m = surface.jet(smp.point.r / self.scale).m * self.scale;
                (smp.velocity.r_dot.powi(2) + (m * smp.velocity.theta_dot).powi(2) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Samples at `per_segment` interior points of every step, skipping
    /// chart steps where polar velocities degenerate.
    fn dense_samples(&self, per_segment: usize) -> Vec<PathSample> {
        let mut out = Vec::new();
        for seg in &self.segments {
            if seg.mode != Mode::Polar {
                continue;
            }
            for k in 0..=per_segment {
                let t = seg.step.t0 + (seg.t_end - seg.step.t0) * k as f64 / per_segment as f64;
                out.push(sample_from(self.scale, t, &seg.polar(t)));
            }
        }
        out
    }
}

fn sample_from(lam: f64, t: f64, y: &[f64; 4]) -> PathSample {
    PathSample {
        s: t * lam,
        point: SurfacePoint::new(y[0] * lam, y[1]),
        theta_unwrapped: y[1],
        velocity: Velocity {
            r_dot: y[2],
            theta_dot: y[3] / lam,
        },
    }
}

/// Integrate the unit-speed geodesic with initial data `init` for arclength
/// `length`, with integrator tolerance `tol` (absolute and relative).
pub fn integrate_geodesic(
    surface: &ProfileSurface,
    init: &GeodesicState,
    length: f64,
    tol: f64,
) -> Result<GeodesicPath> {
    if !(length > 0.0 && length.is_finite()) {
        return Err(Error::Domain("geodesic length must be positive".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let lam = surface.scale();
    let state = GeodesicState::new(surface, init.point, init.velocity)?;
    let y0 = state.base_state(surface);
    let t_end = length / lam;
    let mut tracer = Tracer::new(surface, y0, ode_tolerance(LOCAL_FACTOR * tol))?;
    let mut segments = Vec::new();
    let mut samples = vec![sample_from(lam, 0.0, &y0)];
    while let Some(seg) = tracer.next(t_end)? {
        let y = seg.polar(seg.t_end);
        samples.push(sample_from(lam, seg.t_end, &y));
        segments.push(seg);
    }
    let turns = (samples.last().unwrap().theta_unwrapped - samples[0].theta_unwrapped) / (2.0 * PI);
    Ok(GeodesicPath {
        initial: state,
        samples,
        length,
        winding: (turns + 1e-9_f64.copysign(turns)).trunc() as i64,
        scale: lam,
        segments,
    })
}

/// Riemannian angle between two velocities at `at`.
pub fn tangent_angle(surface: &ProfileSurface, at: SurfacePoint, v1: Velocity, v2: Velocity) -> Result<f64> {
    let u = check_r(surface, at.r)?;
    let m = surface.jet(u).m * surface.scale();
    let g = |a: &Velocity, b: &Velocity| a.r_dot * b.r_dot + m * m * a.theta_dot * b.theta_dot;
    let n1 = g(&v1, &v1).sqrt();
    let n2 = g(&v2, &v2).sqrt();
    if n1 == 0.0 || n2 == 0.0 {
        return Err(Error::ZeroVelocity);
    }
    Ok((g(&v1, &v2) / (n1 * n2)).clamp(-1.0, 1.0).acos())
}

pub(crate) fn ode_tolerance(tol: f64) -> Tolerance {
    Tolerance {
        rtol: tol,
        atol: tol,
        h_max: f64::INFINITY,
        h_min: 1e-14,
    }
}

// ---------------------------------------------------------------------------
// tracer (normalised units)

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Mode {
    Polar,
    North,
    South,
}

pub(crate) struct GeoRhs<'a> {
    surface: &'a ProfileSurface,
    mode: Mode,
    pole: PoleSeries,
}

impl OdeSystem<4> for GeoRhs<'_> {
    #[inline]
    fn rhs(&self, _t: f64, y: &[f64; 4]) -> [f64; 4] {
        match self.mode {
            Mode::Polar => {
                let j = self.surface.jet(y[0]);
                [
                    y[2],
                    y[3],
                    j.m * j.m1 * y[3] * y[3],
                    -2.0 * j.m1 / j.m * y[2] * y[3],
                ]
            }
            _ => chart_rhs(self.pole, y),
        }
    }
}

#[inline]
fn chart_rhs(ps: PoleSeries, y: &[f64; 4]) -> [f64; 4] {
    let [x, yy, vx, vy] = *y;
    let rho2 = x * x + yy * yy;
    let f = ps.f0 + ps.f2 * rho2;
    let g = 2.0 * ps.f2;
    let j = x * vy - yy * vx;
    let dot = x * vx + yy * vy;
    let fdot = g * dot;
    let jdot = -(rho2 * fdot * j + 2.0 * f * j * dot) / (1.0 + f * rho2);
    let a = fdot * j + f * jdot;
    let c = 0.5 * g * j * j;
    [
        vx,
        vy,
        yy * a + 2.0 * f * j * vy + c * x,
        -x * a - 2.0 * f * j * vx + c * yy,
    ]
}

/// One accepted integrator step, possibly truncated at a chart switch.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Segment {
    pub step: DenseStep<4>,
    pub t_end: f64,
    pub mode: Mode,
    theta0: f64,
    atan0: f64,
    sgn: f64,
    r_max: f64,
}

impl Segment {
    pub fn t0(&self) -> f64 {
        self.step.t0
    }

    #[inline]
    pub fn r(&self, t: f64) -> f64 {
        match self.mode {
            Mode::Polar => self.step.eval_component(t, 0),
            Mode::North => {
                let y = self.step.eval(t);
                y[0].hypot(y[1])
            }
            Mode::South => {
                let y = self.step.eval(t);
                self.r_max - y[0].hypot(y[1])
            }
        }
    }

    #[inline]
    pub fn theta(&self, t: f64) -> f64 {
        match self.mode {
            Mode::Polar => self.step.eval_component(t, 1),
            _ => {
                let y = self.step.eval(t);
                self.chart_theta(y[0], y[1])
            }
        }
    }

    fn chart_theta(&self, x: f64, y: f64) -> f64 {
        let mut d = wrap_pi(y.atan2(x) - self.atan0);
        if self.sgn > 0.0 && d < -1e-9 {
            d += 2.0 * PI;
        } else if self.sgn < 0.0 && d > 1e-9 {
            d -= 2.0 * PI;
        }
        self.theta0 + d
    }

    /// Polar state `[r, θ (unwrapped), ṙ, θ̇]` at `t`.
    pub fn polar(&self, t: f64) -> [f64; 4] {
        let y = self.step.eval(t);
        match self.mode {
            Mode::Polar => y,
            _ => {
                let theta = self.chart_theta(y[0], y[1]);
                let (r, rd, td) = chart_to_polar_velocity(&y);
                if self.mode == Mode::North {
                    [r, theta, rd, td]
                } else {
                    [self.r_max - r, theta, -rd, td]
                }
            }
        }
    }
}

fn chart_to_polar_velocity(y: &[f64; 4]) -> (f64, f64, f64) {
    let rho = y[0].hypot(y[1]);
    if rho == 0.0 {
        return (0.0, y[2].hypot(y[3]), 0.0);
    }
    let rd = (y[0] * y[2] + y[1] * y[3]) / rho;
    let td = (y[0] * y[3] - y[1] * y[2]) / (rho * rho);
    (rho, rd, td)
}

/// Step-by-step geodesic integration with automatic chart switching.
pub(crate) struct Tracer<'a> {
    surface: &'a ProfileSurface,
    tol: Tolerance,
    stepper: Stepper<GeoRhs<'a>, 4>,
    mode: Mode,
    // unwrapped θ and atan2 angle at the stepper position (chart modes)
    theta: f64,
    atan: f64,
    sgn: f64,
    r_max: f64,
}

impl<'a> Tracer<'a> {
    /// Start from the normalised polar state `[r, θ, ṙ, θ̇]`.
    pub fn new(surface: &'a ProfileSurface, y0: [f64; 4], tol: Tolerance) -> Result<Self> {
        let r_max = surface.base_r_max();
        let nu = {
            let m = surface.jet(y0[0]).m;
            m * m * y0[3]
        };
        let sgn = if nu > 0.0 {
            1.0
        } else if nu < 0.0 {
            -1.0
        } else {
            0.0
        };
        let mode = if y0[0] < R_CHART {
            Mode::North
        } else if r_max - y0[0] < R_CHART {
            Mode::South
        } else {
            Mode::Polar
        };
        let (state, atan) = match mode {
            Mode::Polar => (y0, 0.0),
            _ => polar_to_chart(mode, r_max, &y0),
        };
        let stepper = Stepper::new(rhs_for(surface, mode), 0.0, state, tol);
        Ok(Self {
            surface,
            tol,
            stepper,
            mode,
            theta: y0[1],
            atan,
            sgn,
            r_max,
        })
    }

    /// Advance by one step; `None` once `t_limit` is reached.
    pub fn next(&mut self, t_limit: f64) -> Result<Option<Segment>> {
        if self.stepper.t() >= t_limit {
            return Ok(None);
        }
        let step = self.stepper.step(t_limit).ok_or(Error::NoConvergence { residual: f64::NAN })?;
        let mut seg = Segment {
            step,
            t_end: step.t1(),
            mode: self.mode,
            theta0: self.theta,
            atan0: self.atan,
            sgn: self.sgn,
            r_max: self.r_max,
        };
        match self.mode {
            Mode::Polar => {
                if let Some((t_hit, pole)) = self.find_pole_entry(&seg) {
                    seg.t_end = t_hit;
                    let y = step.eval(t_hit);
                    self.restart(pole, t_hit, &y);
                }
            }
            _ => {
                let y = step.end();
                let theta = seg.chart_theta(y[0], y[1]);
                let rho = y[0].hypot(y[1]);
                self.theta = theta;
                self.atan = y[1].atan2(y[0]);
                if rho > 2.0 * R_CHART {
                    let p = seg.polar(seg.t_end);
                    self.restart(Mode::Polar, seg.t_end, &p);
                }
            }
        }
        Ok(Some(seg))
    }

    fn find_pole_entry(&self, seg: &Segment) -> Option<(f64, Mode)> {
        const PROBES: usize = 8;
        let compact = self.r_max.is_finite();
        let below = |t: f64| {
            let r = seg.r(t);
            if r < R_CHART {
                Some(Mode::North)
            } else if compact && self.r_max - r < R_CHART {
                Some(Mode::South)
            } else {
                None
            }
        };
        let (t0, t1) = (seg.t0(), seg.t_end);
        let mut prev = t0;
        for k in 1..=PROBES {
            let t = t0 + (t1 - t0) * k as f64 / PROBES as f64;
            if let Some(pole) = below(t) {
                let target = match pole {
                    Mode::North => R_CHART,
                    _ => self.r_max - R_CHART,
                };
                let t_hit = brent_root(|s| seg.r(s) - target, prev, t, 1e-15).unwrap_or(t);
                return Some((t_hit.max(t0 + 1e-15).min(t1), pole));
            }
            prev = t;
        }
        None
    }

    fn restart(&mut self, mode: Mode, t: f64, polar_or_chart: &[f64; 4]) {
        let h = self.stepper.suggested_step();
        let state = match mode {
            Mode::Polar => {
                self.theta = polar_or_chart[1];
                *polar_or_chart
            }
            _ => {
                let (c, atan) = polar_to_chart(mode, self.r_max, polar_or_chart);
                self.theta = polar_or_chart[1];
                self.atan = atan;
                c
            }
        };
        self.mode = mode;
        self.stepper = Stepper::new(rhs_for(self.surface, mode), t, state, self.tol);
        self.stepper.set_step(h.min(R_CHART));
    }
}

fn rhs_for(surface: &ProfileSurface, mode: Mode) -> GeoRhs<'_> {
    let pole = match mode {
        Mode::South => surface.pole(true),
        _ => surface.pole(false),
    };
    GeoRhs { surface, mode, pole }
}

/// Convert a polar state to chart coordinates around the given pole.
/// Returns the chart state and the atan2 angle matching `θ`.
fn polar_to_chart(mode: Mode, r_max: f64, y: &[f64; 4]) -> ([f64; 4], f64) {
    let (rho, rho_dot) = match mode {
        Mode::South => (r_max - y[0], -y[2]),
        _ => (y[0], y[2]),
    };
    let (s, c) = y[1].sin_cos();
    let state = [
        rho * c,
        rho * s,
        rho_dot * c - rho * y[3] * s,
        rho_dot * s + rho * y[3] * c,
    ];
    let atan = if rho > 0.0 {
        state[1].atan2(state[0])
    } else {
        s.atan2(c)
    };
    (state, atan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revsurface::profile::{make_surface, Family};

    fn sp(r: f64, t: f64) -> SurfacePoint {
        SurfacePoint::new(r, t)
    }

    #[test]
    fn plane_meridian_through_vertex() {
        let s = make_surface(Family::Plane).unwrap();
        let init = GeodesicState::from_direction(&s, sp(1.0, 0.0), PI).unwrap();
        let path = integrate_geodesic(&s, &init, 2.0, 1e-10).unwrap();
        let end = path.end();
        assert!((end.point.r - 1.0).abs() < 1e-9);
        assert!((end.point.theta - PI).abs() < 1e-9);
    }

    #[test]
    fn equator_closes() {
        let s = make_surface(Family::Sphere).unwrap();
        let init = GeodesicState::from_direction(&s, sp(PI / 2.0, 0.0), PI / 2.0).unwrap();
        let path = integrate_geodesic(&s, &init, 2.0 * PI, 1e-10).unwrap();
        let end = path.end();
        assert!((end.point.r - PI / 2.0).abs() < 1e-9);
        assert!((end.theta_unwrapped - 2.0 * PI).abs() < 1e-8);
        assert_eq!(path.winding, 1);
    }

    #[test]
    fn sphere_great_circle_through_both_poles() {
        let s = make_surface(Family::Sphere).unwrap();
        let init = GeodesicState::from_direction(&s, sp(1.0, 0.3), 0.0).unwrap();
        let path = integrate_geodesic(&s, &init, 2.0 * PI, 1e-10).unwrap();
        let end = path.end();
        assert!((end.point.r - 1.0).abs() < 1e-8, "{:?}", end);
        assert!((end.point.theta - 0.3).abs() < 1e-8);
        // passes the far pole at s = π − 1
        let mid = path.at(PI - 1.0 + 0.5);
        assert!((mid.point.r - (PI - 0.5)).abs() < 1e-8);
    }

    #[test]
    fn plane_straight_line_near_vertex() {
        // line y = 1e-4 passes close to the vertex; checks the chart
        let s = make_surface(Family::Plane).unwrap();
        let p0 = (-1.0f64, 1e-4f64);
        let init = GeodesicState::new(
            &s,
            sp(p0.0.hypot(p0.1), p0.1.atan2(p0.0)),
            Velocity {
                r_dot: p0.0 / p0.0.hypot(p0.1),
                theta_dot: -p0.1 / (p0.0 * p0.0 + p0.1 * p0.1),
            },
        )
        .unwrap();
        let path = integrate_geodesic(&s, &init, 2.0, 1e-10).unwrap();
        let e = path.end();
        let (x, y) = (e.point.r * e.point.theta.cos(), e.point.r * e.point.theta.sin());
        assert!((x - 1.0).abs() < 1e-9 && (y - 1e-4).abs() < 1e-9, "{x} {y}");
    }

    #[test]
    fn hyperboloid_conservation() {
        let s = make_surface(Family::Hyperboloid { a: 1.0 }).unwrap();
        let init = GeodesicState::from_direction(&s, sp(2.0, 0.0), 2.5).unwrap();
        let path = integrate_geodesic(&s, &init, 100.0, 1e-10).unwrap();
        let (c, v) = (path.clairaut_drift(&s), path.speed_drift(&s));
        assert!(c < 1e-8 && v < 1e-8, "clairaut {c:e} speed {v:e}");
    }

    #[test]
    fn tangent_angles() {
        let s = make_surface(Family::Sphere).unwrap();
        let p = sp(1.0, 0.0);
        let v = Velocity {
            r_dot: 1.0,
            theta_dot: 0.0,
        };
        let w = Velocity {
            r_dot: 0.0,
            theta_dot: 1.0,
        };
        assert_eq!(tangent_angle(&s, p, v, v).unwrap(), 0.0);
        assert!((tangent_angle(&s, p, v, w).unwrap() - PI / 2.0).abs() < 1e-15);
        let z = Velocity {
            r_dot: 0.0,
            theta_dot: 0.0,
        };
        assert_eq!(tangent_angle(&s, p, v, z), Err(Error::ZeroVelocity));
    }
}
