//! Two-point geodesic connection by shooting.
//!
//! A fan of geodesics leaves `p` at evenly spaced angles. Because `θ` is
//! strictly monotone along every non-meridian geodesic, each ray meets the
//! half-plane `θ = θ_q + 2πk` at most once; the residual `r − r_q` at that
//! crossing is continuous in the initial angle and its sign changes bracket
//! the solutions, which Brent's method then refines.

use serde::Serialize;
use std::f64::consts::PI;

use super::geodesic::{ode_tolerance, GeodesicPath, GeodesicState, Segment, SurfacePoint, Tracer};
use super::profile::ProfileSurface;
use crate::error::{Error, Result};
use super::sweep::{level_crossings, shoot_to_level_state};
use crate::numeric::{brent_root, brent_root_with, wrap_pi};
use crate::ode::Tolerance;

/// Tuning of [`connect`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConnectOptions {
    /// Largest number of extra turns `|k|` searched.
    pub winding_bound: i32,
    /// Relative band above the minimum inside which solutions count as
    /// minimal.
    pub min_tol: f64,
    /// Largest accepted endpoint miss, relative to the surface scale.
    pub hit_tol: f64,
    /// Number of initial angles in the scan.
    pub scan: usize,
    /// Integrator tolerance.
    pub tol: f64,
}

impl Default for ConnectOptions {
    fn default() -> Self {
        Self {
            winding_bound: 2,
            min_tol: 1e-6,
            hit_tol: 1e-7,
            scan: 1440,
            tol: 1e-11,
        }
    }
}

/// Result of [`connect`].
#[derive(Debug, Clone)]
pub struct Connection {
    pub distance: f64,
    /// Initial angles (from the outward meridian at `p`) of all minimal
    /// solutions; absolute directions when `p` is a pole.
    pub directions: Vec<f64>,
    /// Angles at `q` of the reversed minimal geodesics, i.e. directions from
    /// `q` towards `p`.
    pub terminal_directions: Vec<f64>,
    pub geodesics: Vec<GeodesicPath>,
    /// Set when the minimizers form a continuum (antipodal points on a
    /// sphere); only representatives are returned.
    pub degenerate: bool,
}

/// A minimal-geodesic solution in normalised units.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Solution {
    pub length: f64,
    pub alpha: f64,
    pub terminal: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct BaseConnection {
    pub distance: f64,
    pub solutions: Vec<Solution>,
    pub degenerate: bool,
}

/// Fans are traced this far past the length bound: a solution just under
/// the bound can have scan neighbours that only reach the target beyond it,
/// and the bracket is lost if those rays stop short.
pub(crate) const FAN_REACH: f64 = 1.5;

/// Shortest geodesics from `p` to `q`.
pub fn connect(surface: &ProfileSurface, p: SurfacePoint, q: SurfacePoint, opts: &ConnectOptions) -> Result<Connection> {
    let lam = surface.scale();
    let (rp, rq) = (p.r / lam, q.r / lam);
    check(surface, rp)?;
    check(surface, rq)?;
    let delta = q.theta - p.theta;
    let bound = length_bound(surface, rp, rq, delta);
    let fan = Fan::new(surface, rp, FAN_REACH * bound, opts.scan, ode_tolerance(opts.tol))?;
    let base = fan.connect(rq, delta, bound, opts)?;
    let mut geodesics = Vec::new();
    for sol in &base.solutions {
        let init = GeodesicState::from_direction(surface, p, sol.alpha)?;
        if sol.length > 0.0 {
            geodesics.push(super::integrate_geodesic(surface, &init, sol.length * lam, opts.tol)?);
        }
    }
    Ok(Connection {
        distance: base.distance * lam,
        directions: base.solutions.iter().map(|s| absolute_if_pole(surface, rp, p.theta, s.alpha)).collect(),
        terminal_directions: base.solutions.iter().map(|s| absolute_if_pole(surface, rq, q.theta, s.terminal)).collect(),
        geodesics,
        degenerate: base.degenerate,
    })
}

fn absolute_if_pole(surface: &ProfileSurface, r: f64, theta: f64, alpha: f64) -> f64 {
    if r == 0.0 || r >= surface.base_r_max() {
        wrap_pi(theta + alpha)
    } else {
        alpha
    }
}

fn check(surface: &ProfileSurface, r: f64) -> Result<()> {
    if !(r >= 0.0) || r > surface.base_r_max() * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("r = {r} outside the profile domain")));
    }
    Ok(())
}

/// An upper bound for `|p, q|` from explicit broken paths (normalised).
pub(crate) fn length_bound(surface: &ProfileSurface, rp: f64, rq: f64, delta: f64) -> f64 {
    let gap = wrap_pi(delta).abs();
    let mut best = rp + rq;
    if surface.is_compact() {
        let rm = surface.base_r_max();
        best = best.min(2.0 * rm - rp - rq);
    }
    let along = |r: f64| surface.jet(r).m.abs() * gap + (rp - rq).abs();
    best.min(along(rp)).min(along(rq))
}

/// Stored geodesic fan from a point `(r0, 0)` (normalised units).
pub(crate) struct Fan<'a> {
    surface: &'a ProfileSurface,
    r0: f64,
    length: f64,
    tol: Tolerance,
    alphas: Vec<f64>,
    rays: Vec<Ray>,
}

struct Ray {
    sgn: f64,
    segments: Vec<Segment>,
    // θ at the end of every segment
    ends: Vec<f64>,
}

impl<'a> Fan<'a> {
    pub fn new(surface: &'a ProfileSurface, r0: f64, length: f64, scan: usize, tol: Tolerance) -> Result<Self> {
        let n = scan.max(8);
        let alphas: Vec<f64> = (0..n).map(|i| -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64).collect();
        let pole = r0 == 0.0 || r0 >= surface.base_r_max();
        let mut rays = Vec::with_capacity(if pole { 0 } else { n });
        if !pole {
            for &a in &alphas {
                let y0 = initial_state(surface, r0, a);
                let mut tracer = Tracer::new(surface, y0, tol)?;
                let mut segments = Vec::new();
                let mut ends = Vec::new();
                while let Some(seg) = tracer.next(length)? {
                    ends.push(seg.theta(seg.t_end));
                    segments.push(seg);
                }
                rays.push(Ray {
                    sgn: a.sin().signum(),
                    segments,
                    ends,
                });
            }
        }
        Ok(Self {
            surface,
            r0,
            length,
            tol,
            alphas,
            rays,
        })
    }

    /// Connect the fan's base point to `(rq, delta)`, keeping solutions no
    /// longer than `bound`.
    pub fn connect(&self, rq: f64, delta: f64, bound: f64, opts: &ConnectOptions) -> Result<BaseConnection> {
        let surface = self.surface;
        let rm = surface.base_r_max();
        let r0 = self.r0;
        let dw = wrap_pi(delta);
        // pole cases have closed forms
        if r0 == 0.0 || r0 >= rm {
            let north = r0 == 0.0;
            let d = if north { rq } else { rm - rq };
            let toward = if north { PI } else { 0.0 };
            if rq == 0.0 || rq >= rm {
                if (rq == 0.0) == north {
                    return Ok(trivial());
                }
                // opposite poles: every meridian is minimal
                let reps = [0.0, PI / 2.0, PI, -PI / 2.0];
                return Ok(BaseConnection {
                    distance: rm,
                    solutions: reps
                        .iter()
                        .map(|&a| Solution {
                            length: rm,
                            alpha: a,
                            terminal: a,
                        })
                        .collect(),
                    degenerate: true,
                });
            }
            return Ok(BaseConnection {
                distance: d,
                solutions: vec![Solution {
                    length: d,
                    alpha: delta,
                    terminal: toward,
                }],
                degenerate: false,
            });
        }
        if rq == 0.0 || rq >= rm {
            let north = rq == 0.0;
            let d = if north { r0 } else { rm - r0 };
            return Ok(BaseConnection {
                distance: d,
                solutions: vec![Solution {
                    length: d,
                    alpha: if north { PI } else { 0.0 },
                    terminal: 0.0,
                }],
                degenerate: false,
            });
        }
        if rq == r0 && dw == 0.0 {
            return Ok(trivial());
        }

        let mut cands: Vec<Solution> = Vec::new();
        if dw == 0.0 {
            let out = rq > r0;
            cands.push(Solution {
                length: (rq - r0).abs(),
                alpha: if out { 0.0 } else { PI },
                terminal: if out { PI } else { 0.0 },
            });
        }
        if dw.abs() == PI {
            cands.push(Solution {
                length: r0 + rq,
                alpha: PI,
                terminal: PI,
            });
            if surface.is_compact() {
                cands.push(Solution {
                    length: 2.0 * rm - r0 - rq,
                    alpha: 0.0,
                    terminal: 0.0,
                });
            }
        }

        let hit_tol = opts.hit_tol;
        let n = self.alphas.len();
        let mut near_zero = 0usize;
        let mut loose: Vec<Solution> = Vec::new();
        let kb = opts.winding_bound;
        for k in -kb..=kb {
            let target = dw + 2.0 * PI * k as f64;
            if target == 0.0 {
                continue;
            }
            let res: Vec<Option<(f64, f64, f64)>> = (0..n)
                .map(|i| {
                    self.cross(i, target).map(|(t, y)| {
                        let m = surface.jet(y[0]).m;
                        let term = (-m * y[3]).atan2(-y[2]);
                        (y[0] - rq, t, term)
                    })
                })
                .collect();
            for i in 0..n {
                if let Some((f, t, term)) = res[i] {
                    if f.abs() <= hit_tol && t <= bound * (1.0 + 1e-9) + 1e-12 {
                        near_zero += 1;
                        loose.push(Solution {
                            length: t,
                            alpha: self.alphas[i],
                            terminal: term,
                        });
                    }
                }
                let j = (i + 1) % n;
                if j == 0 {
                    continue;
                }
                let (Some((fa, _, _)), Some((fb, _, _))) = (res[i], res[j]) else {
                    continue;
                };
                if fa.signum() == fb.signum() || fa == 0.0 || fb == 0.0 {
                    continue;
                }
                if let Some(sol) = self.refine(self.alphas[i], self.alphas[j], fa, fb, target, rq, hit_tol)? {
                    if sol.length <= bound * (1.0 + 1e-9) + 1e-12 {
                        cands.push(sol);
                    }
                }
            }
            // Rays close to a meridian through a pole jump by π there, so any
            // target in (0, π) on their side is crossed at the pole itself.
            // Those limits close brackets that no pair of scan angles spans.
            let first_pos = self.alphas.partition_point(|&a| a <= 0.0);
            let mut edges = vec![(PI, n - 1, -rq), (-PI, 0, -rq)];
            if surface.is_compact() && first_pos > 0 && first_pos < n {
                edges.push((0.0, first_pos, rm - rq));
                edges.push((0.0, first_pos - 1, rm - rq));
            }
            for (edge, i, fb) in edges {
                let sgn = self.alphas[i].sin().signum();
                if !(sgn * target > 0.0 && sgn * target < PI) {
                    continue;
                }
                let Some((fa, _, _)) = res[i] else {
                    continue;
                };
                if fa.signum() == fb.signum() || fa == 0.0 {
                    continue;
                }
                if let Some(sol) = self.refine(self.alphas[i], edge, fa, fb, target, rq, hit_tol)? {
                    if sol.length <= bound * (1.0 + 1e-9) + 1e-12 {
                        cands.push(sol);
                    }
                }
            }
        }

        // near-meridian targets: bracket the first crossing of r = rq by θ
        if (rq - r0).abs() > 1e-12 * (1.0 + r0) {
            let res: Vec<Option<f64>> = (0..n)
                .map(|i| self.first_level(i, rq).map(|(_, th)| wrap_pi(th - dw)))
                .collect();
            for i in 0..n {
                let j = (i + 1) % n;
                let (Some(fa), Some(fb)) = (res[i], res[j]) else {
                    continue;
                };
                if fa.signum() == fb.signum() || fa == 0.0 || fb == 0.0 || (fa - fb).abs() > 1.0 {
                    continue;
                }
                let b = if j == 0 { self.alphas[j] + 2.0 * PI } else { self.alphas[j] };
                if let Some(sol) = self.refine_level(self.alphas[i], b, fa, fb, dw, rq, hit_tol) {
                    if sol.length <= bound * (1.0 + 1e-9) + 1e-12 {
                        cands.push(sol);
                    }
                }
            }
        }

        let degenerate = near_zero > n / 8;
        if degenerate {
            cands.extend(loose);
        }
        if cands.is_empty() {
            return Err(Error::NoConvergence {
                residual: self.best_residual(rq, dw, kb),
            });
        }
        let dmin = cands.iter().map(|c| c.length).fold(f64::INFINITY, f64::min);
        let band = dmin * (1.0 + opts.min_tol) + 1e-14;
        let mut minimal: Vec<Solution> = cands.into_iter().filter(|c| c.length <= band).collect();
        minimal.sort_by(|a, b| a.alpha.total_cmp(&b.alpha));
        minimal.dedup_by(|a, b| (a.alpha - b.alpha).abs() < 1e-9);
        if degenerate && minimal.len() > 8 {
            let step = minimal.len() as f64 / 8.0;
            minimal = (0..8).map(|i| minimal[(i as f64 * step) as usize]).collect();
        }
        Ok(BaseConnection {
            distance: dmin,
            solutions: minimal,
            degenerate,
        })
    }

    fn best_residual(&self, rq: f64, dw: f64, kb: i32) -> f64 {
        let mut best = f64::INFINITY;
        for k in -kb..=kb {
            let target = dw + 2.0 * PI * k as f64;
            for i in 0..self.alphas.len() {
                if let Some((_, y)) = self.cross(i, target) {
                    best = best.min((y[0] - rq).abs());
                }
            }
        }
        best
    }

    /// First crossing of the ray `i` with `θ = target`: `(t, polar state)`.
    fn cross(&self, i: usize, target: f64) -> Option<(f64, [f64; 4])> {
        let ray = &self.rays[i];
        crossing_in(ray.sgn, &ray.segments, &ray.ends, 0.0, target)
    }

    /// First crossing of the ray `i` with `r = level`: `(t, θ)`.
    fn first_level(&self, i: usize, level: f64) -> Option<(f64, f64)> {
        self.rays[i]
            .segments
            .iter()
            .find_map(|seg| level_crossings(seg, level).first().map(|&t| (t, seg.theta(t))))
    }

    #[allow(clippy::too_many_arguments)]
    fn refine_level(&self, a: f64, b: f64, fa: f64, fb: f64, dw: f64, rq: f64, hit_tol: f64) -> Option<Solution> {
        let surface = self.surface;
        let shoot = |alpha: f64| shoot_to_level_state(surface, self.r0, alpha, rq, 0, self.length, self.tol);
        let mut f = |alpha: f64| shoot(alpha).map_or(f64::NAN, |(_, y)| wrap_pi(y[1] - dw));
        let alpha = brent_root_with(&mut f, a, b, fa, fb, 1e-14, 100)?;
        let (t, y) = shoot(alpha)?;
        let m = surface.jet(y[0]).m;
        if m * wrap_pi(y[1] - dw).abs() > hit_tol {
            return None;
        }
        Some(Solution {
            length: t,
            alpha: wrap_pi(alpha),
            terminal: (-m * y[3]).atan2(-y[2]),
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn refine(
        &self,
        a: f64,
        b: f64,
        fa: f64,
        fb: f64,
        target: f64,
        rq: f64,
        hit_tol: f64,
    ) -> Result<Option<Solution>> {
        let surface = self.surface;
        let mut shot = |alpha: f64| -> f64 {
            match shoot_to_theta(surface, self.r0, alpha, target, self.length, self.tol) {
                Ok(Some((_, y))) => y[0] - rq,
                _ => f64::NAN,
            }
        };
        let Some(alpha) = brent_root_with(&mut shot, a, b, fa, fb, 1e-14, 100) else {
            return Ok(None);
        };
        let Some((t, y)) = shoot_to_theta(surface, self.r0, alpha, target, self.length, self.tol)? else {
            return Ok(None);
        };
        if (y[0] - rq).abs() > hit_tol {
            return Ok(None);
        }
        let m = surface.jet(y[0]).m;
        Ok(Some(Solution {
            length: t,
            alpha,
            terminal: (-m * y[3]).atan2(-y[2]),
        }))
    }
}

fn trivial() -> BaseConnection {
    BaseConnection {
        distance: 0.0,
        solutions: vec![Solution {
            length: 0.0,
            alpha: 0.0,
            terminal: 0.0,
        }],
        degenerate: false,
    }
}

/// Normalised initial polar state at `(r0, 0)` in direction `alpha`.
pub(crate) fn initial_state(surface: &ProfileSurface, r0: f64, alpha: f64) -> [f64; 4] {
    let m = surface.jet(r0).m;
    let (s, c) = alpha.sin_cos();
    [r0, 0.0, c, s / m]
}

/// Locate `θ = target` on stored segments whose end values are `ends`.
pub(crate) fn crossing_in(
    sgn: f64,
    segments: &[Segment],
    ends: &[f64],
    theta_start: f64,
    target: f64,
) -> Option<(f64, [f64; 4])> {
    if sgn == 0.0 || sgn * (target - theta_start) <= 0.0 {
        return None;
    }
    let i = ends.partition_point(|&th| sgn * (th - target) < 0.0);
    if i == segments.len() {
        return None;
    }
    let seg = &segments[i];
    let t = brent_root(|t| seg.theta(t) - target, seg.t0(), seg.t_end, 1e-15)?;
    Some((t, seg.polar(t)))
}

/// Integrate from `(r0, 0)` in direction `alpha` until `θ` reaches `target`
/// or the length `t_max` is exhausted.
pub(crate) fn shoot_to_theta(
    surface: &ProfileSurface,
    r0: f64,
    alpha: f64,
    target: f64,
    t_max: f64,
    tol: Tolerance,
) -> Result<Option<(f64, [f64; 4])>> {
    let sgn = alpha.sin().signum();
    if alpha.sin() == 0.0 || sgn * target <= 0.0 {
        return Ok(None);
    }
    let mut tracer = Tracer::new(surface, initial_state(surface, r0, alpha), tol)?;
    while let Some(seg) = tracer.next(t_max)? {
        let th = seg.theta(seg.t_end);
        if sgn * (th - target) >= 0.0 {
            let t = brent_root(|t| seg.theta(t) - target, seg.t0(), seg.t_end, 1e-15);
            return Ok(t.map(|t| (t, seg.polar(t))));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revsurface::profile::{make_surface, Family};

    fn sp(r: f64, t: f64) -> SurfacePoint {
        SurfacePoint::new(r, t)
    }

    #[test]
    fn plane_through_vertex() {
        let s = make_surface(Family::Plane).unwrap();
        let c = connect(&s, sp(1.0, 0.0), sp(1.0, PI), &ConnectOptions::default()).unwrap();
        assert!((c.distance - 2.0).abs() < 1e-12);
        assert_eq!(c.directions.len(), 1);
    }

    #[test]
    fn plane_generic_pair() {
        let s = make_surface(Family::Plane).unwrap();
        let (p, q) = (sp(1.0, 0.2), sp(2.0, 1.4));
        let c = connect(&s, p, q, &ConnectOptions::default()).unwrap();
        let exact = (1.0f64 + 4.0 - 4.0 * 1.2f64.cos()).sqrt();
        assert!((c.distance - exact).abs() < 1e-9, "{} vs {exact}", c.distance);
        assert_eq!(c.directions.len(), 1);
    }

    #[test]
    fn sphere_antipodes_degenerate() {
        let s = make_surface(Family::Sphere).unwrap();
        let c = connect(&s, sp(1.0, 0.0), sp(PI - 1.0, PI), &ConnectOptions::default()).unwrap();
        assert!((c.distance - PI).abs() < 1e-7);
        assert!(c.degenerate);
        assert!(c.directions.len() >= 2);
    }

    #[test]
    fn hyperboloid_opposite_points_symmetric() {
        let s = make_surface(Family::Hyperboloid { a: 1.0 }).unwrap();
        // close to the vertex the meridian through it is the unique minimizer
        let c = connect(&s, sp(2.0, 0.0), sp(2.0, PI), &ConnectOptions::default()).unwrap();
        assert!((c.distance - 4.0).abs() < 1e-12);
        assert_eq!(c.directions, vec![PI]);
        // far out the cone angle is below 2π and two paths wrap around
        let c = connect(&s, sp(20.0, 0.0), sp(20.0, PI), &ConnectOptions::default()).unwrap();
        assert_eq!(c.directions.len(), 2, "{:?}", c.directions);
        assert!((c.directions[0] + c.directions[1]).abs() < 1e-6);
        assert!(c.distance < 40.0);
    }

    #[test]
    fn nearly_opposite_points_past_the_vertex() {
        // the minimizer skims the vertex and is only slightly shorter than
        // the broken path through it
        let s = make_surface(Family::Hyperboloid { a: 1.0 }).unwrap();
        let c = connect(&s, sp(0.7978356, 5.8175097), sp(0.2756925, 2.6262354), &ConnectOptions::default()).unwrap();
        assert!(c.distance < 0.7978356 + 0.2756925);
        assert!((c.directions[0].abs() - PI).abs() < 0.02);
    }

    #[test]
    fn minimizer_within_half_a_scan_step_of_a_meridian() {
        let opts = ConnectOptions::default();
        let h = make_surface(Family::Hyperboloid { a: 1.0 }).unwrap();
        let c = connect(&h, sp(1.1709232, 1.9715696), sp(1.1139758, 5.1152681), &opts).unwrap();
        assert!(c.distance <= 1.1709232 + 1.1139758);
        // through the far pole of the sphere
        let s = make_surface(Family::Sphere).unwrap();
        let (p, q) = (sp(1.2704870, 0.5995765), sp(2.9401452, 3.7464670));
        let want = (p.r.cos() * q.r.cos() + p.r.sin() * q.r.sin() * (p.theta - q.theta).cos()).acos();
        let got = connect(&s, p, q, &opts).unwrap().distance;
        assert!((got - want).abs() < 1e-8, "{got} vs {want}");
    }
}
