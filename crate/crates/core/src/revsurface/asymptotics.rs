//! Large-scale invariants of surfaces of revolution: asymptotic slope of the
//! profile, total curvature, rays from a point and compact extents.

use serde::Serialize;
use std::f64::consts::PI;

use super::geodesic::{ode_tolerance, GeodesicState, SurfacePoint, Tracer};
use super::profile::{Family, ProfileSurface};
use super::shoot::{initial_state, length_bound, ConnectOptions, Fan, FAN_REACH};
use super::sweep::Sweep;
use crate::error::{Error, Result};
use crate::numeric::{golden_max, simpson};

/// Area of the ball of radius `radius` around the vertex, `2π ∫₀ᴿ m dr`.
pub fn ball_area(surface: &ProfileSurface, radius: f64) -> Result<f64> {
    surface.ball_area(radius)
}

/// Asymptotic data of a noncompact surface with `lim m′ = c`.
#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticProfile {
    pub m_prime_limit: f64,
    /// `2π (1 − c)`.
    pub total_curvature: f64,
    /// Length of the ideal boundary, `2π c`.
    pub ideal_boundary_length: f64,
    /// `lim area(B(R)) / R² = π c`.
    pub v_inf: f64,
    /// Independent value of `∬ K dM` from quadrature of `2π ∫ K m dr`.
    pub curvature_quadrature: f64,
    /// `(T, m′(T))` rungs used for the extrapolation.
    pub ladder: Vec<[f64; 2]>,
}

/// Richardson-extrapolated limit of `m′` from `T ∈ {100, 200, 400}·scale`.
///
/// The paraboloid's `m′` carries `log T / T^{3/2}` terms that two levels do
/// not remove; it reports [`Error::NotConverged`] with the spread.
pub fn asymptotic_profile(surface: &ProfileSurface) -> Result<AsymptoticProfile> {
    if surface.is_compact() {
        return Err(Error::Capability("noncompact"));
    }
    let lam = surface.scale();
    let order = match surface.family() {
        Family::Paraboloid { .. } => 0.5,
        _ => 2.0,
    };
    let rungs = [100.0, 200.0, 400.0];
    let slope: Vec<f64> = rungs.iter().map(|&t| surface.jet(t).m1).collect();
    let c = richardson(&slope, order, "m' limit")?;

    // ∫ K m dr over doubling panels, extrapolated with the same order
    let mut quad = Vec::new();
    let mut acc = 0.0;
    let mut a = 0.0;
    for &t in &rungs {
        while a < t {
            let b = if a == 0.0 { 1.0 } else { (2.0 * a).min(t) };
            acc += simpson(|r| surface.k(r) * surface.jet(r).m, a, b, 1e-13);
            a = b;
        }
        quad.push(2.0 * PI * acc);
    }
    let curvature_quadrature = richardson(&quad, order, "curvature quadrature")?;
    Ok(AsymptoticProfile {
        m_prime_limit: c,
        total_curvature: 2.0 * PI * (1.0 - c),
        ideal_boundary_length: 2.0 * PI * c,
        v_inf: PI * c,
        curvature_quadrature,
        ladder: rungs.iter().zip(&slope).map(|(&t, &s)| [t * lam, s]).collect(),
    })
}

/// Two Richardson levels on a doubling ladder with error terms `T^-p` and
/// `T^-(p+1)`; converged when the levels agree to `1e-6`.
fn richardson(v: &[f64], order: f64, what: &str) -> Result<f64> {
    let f = 2f64.powf(order);
    let r1 = (f * v[1] - v[0]) / (f - 1.0);
    let r2 = (f * v[2] - v[1]) / (f - 1.0);
    let g = 2f64.powf(order + 1.0);
    let r = (g * r2 - r1) / (g - 1.0);
    let spread = (r - r2).abs();
    if spread > 1e-6 {
        return Err(Error::NotConverged {
            what: what.into(),
            spread,
            tol: 1e-6,
        });
    }
    Ok(r)
}

/// Minimality checks for geodesics leaving one point, sharing a fan.
pub struct RayProbe<'a> {
    surface: &'a ProfileSurface,
    r0: f64,
    horizon: f64,
    tol: f64,
    fan: Option<Fan<'a>>,
}

impl<'a> RayProbe<'a> {
    /// Prepare probes at `p` up to `horizon` (scaled units).
    pub fn new(surface: &'a ProfileSurface, p: SurfacePoint, horizon: f64, tol: f64) -> Result<Self> {
        let lam = surface.scale();
        let r0 = p.r / lam;
        if !(horizon > 0.0) || !(tol >= 0.0) {
            return Err(Error::Domain("horizon must be positive and tol nonnegative".into()));
        }
        if !(r0 >= 0.0) || r0 > surface.base_r_max() {
            return Err(Error::Domain(format!("r = {} outside the profile domain", p.r)));
        }
        let h = horizon / lam;
        let fan = if r0 > 0.0 && r0 < surface.base_r_max() {
            let len = if surface.is_compact() { h.min(surface.base_r_max()) } else { h };
            Some(Fan::new(surface, r0, FAN_REACH * len, 1440, ode_tolerance(1e-11))?)
        } else {
            None
        };
        Ok(Self {
            surface,
            r0,
            horizon: h,
            tol: tol / lam,
            fan,
        })
    }

    /// Whether the geodesic leaving at angle `alpha` from the outward
    /// meridian stays minimizing at `horizon/4`, `horizon/2` and `horizon`.
    pub fn is_ray(&self, alpha: f64) -> Result<bool> {
        let surface = self.surface;
        let rm = surface.base_r_max();
        if self.horizon > diameter_bound(surface) {
            return Ok(false);
        }
        if self.r0 == 0.0 {
            return Ok(self.horizon <= rm);
        }
        let Some(fan) = &self.fan else {
            // far pole: meridians back to the vertex and beyond
            return Ok(self.horizon <= rm);
        };
        let checkpoints = [self.horizon / 4.0, self.horizon / 2.0, self.horizon];
        let mut tracer = Tracer::new(surface, initial_state(surface, self.r0, alpha), ode_tolerance(1e-12))?;
        let mut idx = 0;
        let opts = ConnectOptions::default();
        while let Some(seg) = tracer.next(self.horizon)? {
            while idx < 3 && checkpoints[idx] <= seg.t_end {
                let t = checkpoints[idx];
                let y = seg.polar(t);
                let bound = length_bound(surface, self.r0, y[0], y[1]);
                if bound < t - self.tol {
                    return Ok(false);
                }
                let d = match fan.connect(y[0], y[1], t * (1.0 + 1e-9), &opts) {
                    Ok(c) => c.distance.min(t),
                    Err(Error::NoConvergence { .. }) => t,
                    Err(e) => return Err(e),
                };
                if d < t - self.tol {
                    return Ok(false);
                }
                idx += 1;
            }
        }
        Ok(true)
    }

    /// Measure of ray directions, bracketed as `(lower, upper)`.
    pub fn measure(&self) -> Result<RayMeasure> {
        const COARSE: usize = 64;
        const RESOLUTION: f64 = 1e-3;
        let h = 2.0 * PI / COARSE as f64;
        let dirs: Vec<f64> = (0..COARSE).map(|i| -PI + i as f64 * h).collect();
        let class: Vec<bool> = dirs.iter().map(|&a| self.is_ray(a)).collect::<Result<_>>()?;
        let mut lower = 0.0;
        let mut upper = 0.0;
        for i in 0..COARSE {
            let j = (i + 1) % COARSE;
            match (class[i], class[j]) {
                (true, true) => {
                    lower += h;
                    upper += h;
                }
                (false, false) => {}
                (ci, _) => {
                    // bisect the boundary inside [a, a + h]
                    let (mut a, mut b) = (dirs[i], dirs[i] + h);
                    while b - a > RESOLUTION {
                        let m = 0.5 * (a + b);
                        if self.is_ray(m)? == ci {
                            a = m;
                        } else {
                            b = m;
                        }
                    }
                    let (lo, hi) = if ci { (a - dirs[i], b - dirs[i]) } else { (dirs[i] + h - b, dirs[i] + h - a) };
                    lower += lo;
                    upper += hi;
                }
            }
        }
        Ok(RayMeasure { lower, upper })
    }
}

fn diameter_bound(surface: &ProfileSurface) -> f64 {
    if surface.is_compact() {
        surface.base_r_max() * (1.0 + 1e-9)
    } else {
        f64::INFINITY
    }
}

/// Whether the geodesic with initial data `init` is minimizing up to
/// `horizon` (checked at `horizon/4`, `horizon/2` and `horizon`).
pub fn is_ray(surface: &ProfileSurface, init: &GeodesicState, horizon: f64, tol: f64) -> Result<bool> {
    let alpha = init.direction(surface);
    let p = if init.point.r == 0.0 {
        SurfacePoint::new(0.0, 0.0)
    } else {
        init.point
    };
    RayProbe::new(surface, p, horizon, tol)?.is_ray(alpha)
}

/// Angular measure of ray directions at a point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RayMeasure {
    pub lower: f64,
    pub upper: f64,
}

/// Measure of the directions at `p` whose geodesics pass [`is_ray`].
pub fn ray_measure(surface: &ProfileSurface, p: SurfacePoint, horizon: f64, tol: f64) -> Result<RayMeasure> {
    RayProbe::new(surface, p, horizon, tol)?.measure()
}

/// Diameter, radius and normalised volume of a compact surface.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CompactExtents {
    pub diameter: f64,
    pub radius: f64,
    pub area: f64,
    pub normalized_volume: f64,
}

/// Sampled `max_p max_q |p,q|` and `min_p max_q |p,q|` on an `(r, θ)` grid
/// with `density` radial steps.
pub fn compact_extents(surface: &ProfileSurface, density: usize) -> Result<CompactExtents> {
    if !surface.is_compact() {
        return Err(Error::Capability("compact"));
    }
    let n = density.max(4);
    let rm = surface.base_r_max();
    let lam = surface.scale();
    let mut reach = vec![rm, rm];
    for i in 1..n {
        reach.push(eccentricity(surface, i as f64 * rm / n as f64, n)?);
    }
    let diameter = reach.iter().cloned().fold(0.0, f64::max) * lam;
    let radius = reach.iter().cloned().fold(f64::INFINITY, f64::min) * lam;
    let area = surface.ball_area(rm * lam)?;
    Ok(CompactExtents {
        diameter,
        radius,
        area,
        normalized_volume: area / (diameter * diameter),
    })
}

/// `sup_q |p, q|` for `p = (r0, 0)` in normalised units.
pub(crate) fn eccentricity(surface: &ProfileSurface, r0: f64, n: usize) -> Result<f64> {
    let rm = surface.base_r_max();
    let levels: Vec<f64> = (1..n).map(|j| j as f64 * rm / n as f64).collect();
    let sweep = Sweep::new(surface, r0, &levels, rm * (1.0 + 1e-6), 720, ode_tolerance(1e-11))?;
    let m = 4 * n;
    let dphi = PI / m as f64;
    let mut best = r0.max(rm - r0);
    let mut tops: Vec<(f64, usize, f64)> = Vec::new();
    for j in 0..levels.len() {
        for k in 0..=m {
            let phi = k as f64 * dphi;
            if let Some(hit) = sweep.coarse(j, phi) {
                tops.push((hit.length, j, phi));
            }
        }
    }
    tops.sort_by(|a, b| b.0.total_cmp(&a.0));
    for &(_, j, phi) in tops.iter().take(4) {
        let (x, _) = golden_max(
            |x| sweep.coarse(j, x).map_or(f64::NEG_INFINITY, |h| h.length),
            (phi - dphi).max(0.0),
            (phi + dphi).min(PI),
            1e-9,
        );
        for y in [x, phi] {
            if let Some(h) = sweep.exact(j, y) {
                best = best.max(h.length);
            }
        }
    }
    Ok(best)
}
