//! [`Space`] implementations for surfaces of revolution, flat cones and the
//! ideal triangle of the hyperbolic plane.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use super::{GrowthReport, Hit, Probe, Space};
use crate::error::{Error, Result};
use crate::flatcone::{cone_connect, ConePoint, FlatCone};
use crate::model::{halfplane_distance, ideal_triangle_contains, HPoint};
use crate::numeric::circle_gap;
use crate::revsurface::{
    asymptotic_profile, compact_extents, connect, integrate_geodesic, ode_tolerance, ConnectOptions, GeodesicState,
    ProfileSurface, SurfacePoint, Sweep,
};

/// Relative directions of the second point of a sampled pair: radial,
/// parallel, diagonal.
const PAIR_DIRECTIONS: [f64; 3] = [0.0, 0.5 * PI, 0.25 * PI];
const BASE_POINTS: usize = 12;
/// Rays per crossing-map sweep.
const SWEEP_RAYS: usize = 720;

/// A surface of revolution with cached crossing maps.
pub struct SurfaceSpace {
    surface: ProfileSurface,
    opts: ConnectOptions,
    sweeps: Mutex<HashMap<Vec<u64>, Arc<Sweep>>>,
    radius: OnceLock<f64>,
}

impl SurfaceSpace {
    pub fn new(surface: ProfileSurface) -> Self {
        Self {
            surface,
            opts: ConnectOptions::default(),
            sweeps: Mutex::new(HashMap::new()),
            radius: OnceLock::new(),
        }
    }

    pub fn surface(&self) -> &ProfileSurface {
        &self.surface
    }

    /// Use a known `R_M` instead of sampling it.
    pub fn with_radius(self, radius: f64) -> Self {
        let _ = self.radius.set(radius);
        self
    }

    fn sweep(&self, r0: f64, levels: &[f64], length: f64) -> Result<Arc<Sweep>> {
        let mut key = vec![r0.to_bits(), length.to_bits()];
        key.extend(levels.iter().map(|l| l.to_bits()));
        if let Some(s) = self.sweeps.lock().unwrap().get(&key) {
            return Ok(s.clone());
        }
        let sweep = Arc::new(Sweep::new(&self.surface, r0, levels, length, SWEEP_RAYS, ode_tolerance(1e-11))?);
        let mut cache = self.sweeps.lock().unwrap();
        if cache.len() >= 512 {
            cache.clear();
        }
        cache.insert(key, sweep.clone());
        Ok(sweep)
    }

    fn inner(&self, base: &SurfacePoint) -> Result<f64> {
        let r0 = base.r / self.surface.scale();
        if !(r0 > 0.0 && r0 < self.surface.base_r_max()) {
            return Err(Error::Domain(format!("probes need a base off the poles, got r = {}", base.r)));
        }
        Ok(r0)
    }

    fn base_radii(&self) -> Vec<f64> {
        let lam = self.surface.scale();
        (0..BASE_POINTS)
            .map(|i| {
                if self.surface.is_compact() {
                    (i as f64 + 0.5) / BASE_POINTS as f64 * self.surface.base_r_max() * lam
                } else {
                    0.3 * 1.45f64.powi(i as i32) * lam
                }
            })
            .collect()
    }

    fn exp(&self, p: SurfacePoint, alpha: f64, length: f64) -> Result<SurfacePoint> {
        let init = GeodesicState::from_direction(&self.surface, p, alpha)?;
        Ok(integrate_geodesic(&self.surface, &init, length, 1e-11)?.end().point)
    }

    fn sample(&self, rng: &mut ChaCha8Rng, i: usize, separation: f64) -> Result<(SurfacePoint, SurfacePoint)> {
        let radii = self.base_radii();
        let r = radii[(i / 3) % radii.len()] * (1.0 + rng.gen_range(-0.05..0.05));
        let alpha = PAIR_DIRECTIONS[i % 3] + rng.gen_range(-0.1..0.1);
        let p = SurfacePoint::new(r, rng.gen_range(0.0..2.0 * PI));
        Ok((p, self.exp(p, alpha, separation)?))
    }
}

struct SurfaceProbe {
    sweep: Arc<Sweep>,
    theta0: f64,
    scale: f64,
    levels: usize,
}

impl Probe for SurfaceProbe {
    fn levels(&self) -> usize {
        self.levels
    }

    fn period(&self, _level: usize) -> f64 {
        2.0 * PI
    }

    fn coarse(&self, level: usize, t: f64) -> Option<Hit> {
        let h = self.sweep.coarse(level, t - self.theta0)?;
        Some(Hit {
            distance: h.length * self.scale,
            directions: h.alphas,
        })
    }

    fn exact(&self, level: usize, t: f64) -> Option<Hit> {
        let h = self.sweep.exact(level, t - self.theta0)?;
        Some(Hit {
            distance: h.length * self.scale,
            directions: h.alphas,
        })
    }
}

impl Space for SurfaceSpace {
    type Point = SurfacePoint;

    fn label(&self) -> String {
        self.surface.family().label()
    }

    fn is_compact(&self) -> bool {
        self.surface.is_compact()
    }

    fn distance(&self, p: &SurfacePoint, q: &SurfacePoint) -> Result<f64> {
        if p.r == q.r && (p.theta == q.theta || p.r == 0.0) {
            return Ok(0.0);
        }
        Ok(connect(&self.surface, *p, *q, &self.opts)?.distance)
    }

    fn has_angles(&self) -> bool {
        true
    }

    fn minimal_directions(&self, p: &SurfacePoint, q: &SurfacePoint) -> Result<Vec<f64>> {
        Ok(connect(&self.surface, *p, *q, &self.opts)?.directions)
    }

    fn far_probe<'a>(&'a self, base: &SurfacePoint, radii: &[f64]) -> Result<Box<dyn Probe + 'a>> {
        if self.surface.is_compact() {
            return Err(Error::Capability("noncompact"));
        }
        let r0 = self.inner(base)?;
        let lam = self.surface.scale();
        let levels: Vec<f64> = radii.iter().map(|r| r / lam).collect();
        let top = levels.iter().cloned().fold(0.0, f64::max);
        let sweep = self.sweep(r0, &levels, (top + r0) * (1.0 + 1e-6))?;
        Ok(Box::new(SurfaceProbe {
            sweep,
            theta0: base.theta,
            scale: lam,
            levels: levels.len(),
        }))
    }

    fn region_probe<'a>(&'a self, base: &SurfacePoint, density: usize) -> Result<Box<dyn Probe + 'a>> {
        if !self.surface.is_compact() {
            return Err(Error::Capability("compact"));
        }
        let r0 = self.inner(base)?;
        let rm = self.surface.base_r_max();
        let n = density.max(2);
        let levels: Vec<f64> = (1..n).map(|j| j as f64 * rm / n as f64).collect();
        let sweep = self.sweep(r0, &levels, rm * (1.0 + 1e-6))?;
        Ok(Box::new(SurfaceProbe {
            sweep,
            theta0: base.theta,
            scale: self.surface.scale(),
            levels: levels.len(),
        }))
    }

    fn radius(&self) -> Result<f64> {
        if let Some(r) = self.radius.get() {
            return Ok(*r);
        }
        let r = compact_extents(&self.surface, 12)?.radius;
        Ok(*self.radius.get_or_init(|| r))
    }

    fn pair_samples(&self, separation: f64, count: usize, seed: u64) -> Result<Vec<(SurfacePoint, SurfacePoint)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|i| self.sample(&mut rng, i, separation)).collect()
    }

    fn pair_population(&self, count: usize, seed: u64) -> Result<Vec<(SurfacePoint, SurfacePoint)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lam = self.surface.scale();
        (0..count)
            .map(|i| {
                let sep = lam * 0.05 * 40f64.powf(rng.gen::<f64>());
                self.sample(&mut rng, i, sep)
            })
            .collect()
    }

    fn growth(&self) -> Result<GrowthReport> {
        if self.surface.is_compact() {
            let e = compact_extents(&self.surface, 12)?;
            return Ok(GrowthReport {
                v_inf: Some(0.0),
                ideal_boundary_length: Some(0.0),
                total_curvature: Some(4.0 * PI),
                normalized_volume: Some(e.normalized_volume),
            });
        }
        let a = asymptotic_profile(&self.surface)?;
        Ok(GrowthReport {
            v_inf: Some(a.v_inf),
            ideal_boundary_length: Some(a.ideal_boundary_length),
            total_curvature: Some(a.total_curvature),
            normalized_volume: None,
        })
    }
}

/// A flat cone with exact distances and directions.
pub struct ConeSpace {
    cone: FlatCone,
}

impl ConeSpace {
    pub fn new(cone: FlatCone) -> Self {
        Self { cone }
    }

    pub fn cone(&self) -> &FlatCone {
        &self.cone
    }

    fn random_point(&self, rng: &mut ChaCha8Rng) -> ConePoint {
        let rho = rng.gen_range(0.2..3.0);
        let phi = rng.gen_range(0.0..self.cone.link_length());
        ConePoint { rho, phi }
    }
}

struct ConeProbe {
    cone: FlatCone,
    base: ConePoint,
    radii: Vec<f64>,
}

impl Probe for ConeProbe {
    fn levels(&self) -> usize {
        self.radii.len()
    }

    fn period(&self, _level: usize) -> f64 {
        self.cone.link_length()
    }

    fn coarse(&self, level: usize, t: f64) -> Option<Hit> {
        let x = self.cone.point(self.radii[level], t).ok()?;
        let c = cone_connect(&self.cone, &self.base, &x).ok()?;
        Some(Hit {
            distance: c.distance,
            directions: c.directions,
        })
    }
}

impl Space for ConeSpace {
    type Point = ConePoint;

    fn label(&self) -> String {
        format!("flat_cone({})", self.cone.link_length())
    }

    fn is_compact(&self) -> bool {
        false
    }

    fn distance(&self, p: &ConePoint, q: &ConePoint) -> Result<f64> {
        Ok(crate::flatcone::cone_distance(&self.cone, p, q))
    }

    fn has_angles(&self) -> bool {
        true
    }

    fn minimal_directions(&self, p: &ConePoint, q: &ConePoint) -> Result<Vec<f64>> {
        Ok(cone_connect(&self.cone, p, q)?.directions)
    }

    fn direction_angle(&self, p: &ConePoint, a: f64, b: f64) -> f64 {
        if p.rho == 0.0 {
            circle_gap(a, b, self.cone.link_length()).min(PI)
        } else {
            circle_gap(a, b, 2.0 * PI)
        }
    }

    fn far_probe<'a>(&'a self, base: &ConePoint, radii: &[f64]) -> Result<Box<dyn Probe + 'a>> {
        Ok(Box::new(ConeProbe {
            cone: self.cone,
            base: *base,
            radii: radii.to_vec(),
        }))
    }

    fn pair_samples(&self, separation: f64, count: usize, seed: u64) -> Result<Vec<(ConePoint, ConePoint)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = self.cone.link_length();
        (0..count)
            .map(|i| {
                let rho = 0.5 * 1.3f64.powi(((i / 3) % BASE_POINTS) as i32) * (1.0 + rng.gen_range(-0.05..0.05));
                let beta = PAIR_DIRECTIONS[i % 3] + rng.gen_range(-0.1..0.1);
                let phi = rng.gen_range(0.0..l);
                if separation >= rho {
                    return Err(Error::Domain(format!("separation {separation} too large for cone pair sampling")));
                }
                // unrolled with p on the positive axis
                let (x, y) = (rho + separation * beta.cos(), separation * beta.sin());
                let p = self.cone.point(rho, phi)?;
                let q = self.cone.point(x.hypot(y), phi + y.atan2(x))?;
                Ok((p, q))
            })
            .collect()
    }

    fn pair_population(&self, count: usize, seed: u64) -> Result<Vec<(ConePoint, ConePoint)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Ok((0..count)
            .map(|_| (self.random_point(&mut rng), self.random_point(&mut rng)))
            .collect())
    }

    fn growth(&self) -> Result<GrowthReport> {
        Ok(GrowthReport {
            v_inf: Some(self.cone.v_inf()),
            ideal_boundary_length: Some(self.cone.link_length()),
            total_curvature: Some(self.cone.total_curvature()),
            normalized_volume: None,
        })
    }
}

/// The closed ideal triangle with vertices `0, 1, ∞` in the upper
/// half-plane, a convex subset of the hyperbolic plane.
///
/// Directions are Euclidean angles of tangent vectors; the model is
/// conformal so they measure hyperbolic angles.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfPlaneTriangle;

/// Fixed point of the order-three symmetry `z ↦ 1/(1 − z)`.
const CENTRE: (f64, f64) = (0.5, 0.866_025_403_784_438_6);

impl HalfPlaneTriangle {
    pub fn new() -> Self {
        Self
    }

    /// Point of the horocyclic arc at depth `radius` in cusp `t / 1`:
    /// cusp `∞` for `t ∈ [0, 1)`, then its images under `z ↦ 1/(1 − z)`.
    pub fn far_point(radius: f64, t: f64) -> HPoint {
        let t = t.rem_euclid(3.0);
        let k = t.floor() as usize;
        let mut z = (t - k as f64, CENTRE.1 * radius.exp());
        for _ in 0..k {
            z = rotate(z);
        }
        HPoint { x: z.0, y: z.1 }
    }

    /// Direction at `p` of the geodesic towards `q`.
    pub fn direction(p: &HPoint, q: &HPoint) -> f64 {
        // move p to i; there the disk model straightens geodesics
        let u = (q.x - p.x) / p.y;
        let v = q.y / p.y;
        (-2.0 * u).atan2(u * u + v * v - 1.0) + 0.5 * PI
    }

    /// The point at distance `length` from `p` in direction `beta`.
    pub fn exp(p: &HPoint, beta: f64, length: f64) -> HPoint {
        let (s, c) = (0.5 * (beta - 0.5 * PI)).sin_cos();
        let z = (0.0, length.exp());
        // rotation about i, then back to p
        let w = div(add(scale(z, c), (s, 0.0)), add(scale(z, -s), (c, 0.0)));
        HPoint {
            x: p.x + p.y * w.0,
            y: p.y * w.1,
        }
    }

    /// A point at log-uniform height up to depth 4 in a random cusp.
    fn cusp_point(rng: &mut ChaCha8Rng) -> HPoint {
        loop {
            let mut z = (rng.gen_range(0.0..1.0), rng.gen_range(0.5f64.ln()..4.0 + CENTRE.1.ln()).exp());
            for _ in 0..rng.gen_range(0..3) {
                z = rotate(z);
            }
            let p = HPoint { x: z.0, y: z.1 };
            if ideal_triangle_contains(&p) {
                return p;
            }
        }
    }

    fn random_point(rng: &mut ChaCha8Rng) -> HPoint {
        loop {
            let p = HPoint {
                x: rng.gen_range(0.02..0.98),
                y: rng.gen_range(0.5..2.5),
            };
            if ideal_triangle_contains(&p) {
                return p;
            }
        }
    }
}

fn rotate(z: (f64, f64)) -> (f64, f64) {
    let (a, b) = (1.0 - z.0, -z.1);
    let n = a * a + b * b;
    (a / n, -b / n)
}

fn add(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 + b.0, a.1 + b.1)
}

fn scale(a: (f64, f64), s: f64) -> (f64, f64) {
    (a.0 * s, a.1 * s)
}

fn div(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let n = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / n, (a.1 * b.0 - a.0 * b.1) / n)
}

struct TriangleProbe {
    base: HPoint,
    radii: Vec<f64>,
}

impl Probe for TriangleProbe {
    fn levels(&self) -> usize {
        self.radii.len()
    }

    fn period(&self, _level: usize) -> f64 {
        3.0
    }

    fn coarse(&self, level: usize, t: f64) -> Option<Hit> {
        let x = HalfPlaneTriangle::far_point(self.radii[level], t);
        Some(Hit {
            distance: halfplane_distance(&self.base, &x),
            directions: vec![HalfPlaneTriangle::direction(&self.base, &x)],
        })
    }
}

impl Space for HalfPlaneTriangle {
    type Point = HPoint;

    fn label(&self) -> String {
        "hyperbolic_ideal_triangle".into()
    }

    fn is_compact(&self) -> bool {
        false
    }

    fn distance(&self, p: &HPoint, q: &HPoint) -> Result<f64> {
        Ok(halfplane_distance(p, q))
    }

    fn has_angles(&self) -> bool {
        true
    }

    fn minimal_directions(&self, p: &HPoint, q: &HPoint) -> Result<Vec<f64>> {
        Ok(vec![Self::direction(p, q)])
    }

    fn far_probe<'a>(&'a self, base: &HPoint, radii: &[f64]) -> Result<Box<dyn Probe + 'a>> {
        if !ideal_triangle_contains(base) {
            return Err(Error::Domain(format!("({}, {}) is outside the ideal triangle", base.x, base.y)));
        }
        if radii.iter().any(|&r| r > 600.0) {
            return Err(Error::Domain("far radii above 600 overflow the half-plane model".into()));
        }
        Ok(Box::new(TriangleProbe {
            base: *base,
            radii: radii.to_vec(),
        }))
    }

    fn pair_samples(&self, separation: f64, count: usize, seed: u64) -> Result<Vec<(HPoint, HPoint)>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p = Self::random_point(&mut rng);
            let beta = rng.gen_range(-PI..PI);
            let q = Self::exp(&p, beta, separation);
            if ideal_triangle_contains(&q) {
                out.push((p, q));
            }
        }
        Ok(out)
    }

    fn pair_population(&self, count: usize, seed: u64) -> Result<Vec<(HPoint, HPoint)>> {
        // half independent pairs, half neighbours at log-uniform separation;
        // both reach depth 4 into the cusps, where the infimum is approached
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let p = Self::cusp_point(&mut rng);
            let q = if out.len() % 2 == 0 {
                Self::cusp_point(&mut rng)
            } else {
                let len = rng.gen_range(0.01f64.ln()..3f64.ln()).exp();
                Self::exp(&p, rng.gen_range(-PI..PI), len)
            };
            if ideal_triangle_contains(&q) && halfplane_distance(&p, &q) > 0.0 {
                out.push((p, q));
            }
        }
        Ok(out)
    }

    fn growth(&self) -> Result<GrowthReport> {
        // area π, so balls grow at most linearly in area
        Ok(GrowthReport {
            v_inf: Some(0.0),
            ideal_boundary_length: Some(0.0),
            total_curvature: Some(-PI),
            normalized_volume: None,
        })
    }
}
