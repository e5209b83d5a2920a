//! Obtuse-constant estimators over an abstract [`Space`].
//!
//! Every obtuse quantity is reported reduced by `π/2`, so values lie in
//! `[−π/2, π/2]`. The angle `∠(⇑_p^q, ↑_p^x)` between the set of minimal
//! directions to `q` and a direction to `x` is the infimum over `⇑_p^q`;
//! when `x` is reached by several minimizers the supremum over them is used.
//!
//! Suprema over far sets are taken on sampled curves (one per ladder rung)
//! that all bases parametrize alike, so the distances from `p` and from `q`
//! to a sample are evaluated at the same point `x`.

mod spaces;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};
use crate::model::{comparison_angle, Curvature, Side, SideTriple};
use crate::numeric::{circle_gap, golden_max};

pub use spaces::{ConeSpace, HalfPlaneTriangle, SurfaceSpace};

/// Note attached to every reported obtuse quantity.
pub const CONVENTION_NOTES: &str = "all obtuse quantities are reduced by pi/2 (including the comparison \
     kappa-obtuse constant from infinity); angle(Up_p^q, up_p^x) is the infimum over minimal directions \
     to q and the supremum over minimal directions to x; compact suprema use B(c, R/2)^c centred at \
     the vertex c of each angle";

/// Distance and minimal directions from a base point to a sampled point.
#[derive(Debug, Clone, PartialEq)]
pub struct Hit {
    pub distance: f64,
    pub directions: Vec<f64>,
}

/// Sampled far or region curves as seen from one base point.
///
/// Curve `level` is parametrized by `t ∈ [0, period(level))` and the same
/// `(level, t)` denotes the same point for every base.
pub trait Probe {
    fn levels(&self) -> usize;
    fn period(&self, level: usize) -> f64;
    /// Cheap evaluation, accurate enough to locate maxima.
    fn coarse(&self, level: usize, t: f64) -> Option<Hit>;
    fn exact(&self, level: usize, t: f64) -> Option<Hit> {
        self.coarse(level, t)
    }
}

/// Capabilities of a metric space the estimators can use.
///
/// Only [`Space::distance`] is mandatory; the defaults report the missing
/// capability.
pub trait Space {
    type Point: Clone + std::fmt::Debug;

    fn label(&self) -> String;
    fn is_compact(&self) -> bool;
    fn distance(&self, p: &Self::Point, q: &Self::Point) -> Result<f64>;

    fn has_angles(&self) -> bool {
        false
    }

    /// `⇑_p^q` as direction angles at `p`.
    fn minimal_directions(&self, _p: &Self::Point, _q: &Self::Point) -> Result<Vec<f64>> {
        Err(Error::Capability("angles"))
    }

    /// Angle at `p` between two directions.
    fn direction_angle(&self, _p: &Self::Point, a: f64, b: f64) -> f64 {
        circle_gap(a, b, 2.0 * PI)
    }

    /// One far curve per entry of `radii`, seen from `base`.
    fn far_probe<'a>(&'a self, _base: &Self::Point, _radii: &[f64]) -> Result<Box<dyn Probe + 'a>> {
        Err(Error::Capability("far_sampler"))
    }

    /// Curves covering a compact space, seen from `base`; `density` is the
    /// number of curves.
    fn region_probe<'a>(&'a self, _base: &Self::Point, _density: usize) -> Result<Box<dyn Probe + 'a>> {
        Err(Error::Capability("region_sampler"))
    }

    /// `R_M = inf_p sup_q |p, q|`.
    fn radius(&self) -> Result<f64> {
        Err(Error::Capability("radius"))
    }

    /// Pairs at distance `separation` in the configurations used for the
    /// liminf over shrinking pairs.
    fn pair_samples(&self, separation: f64, count: usize, seed: u64) -> Result<Vec<(Self::Point, Self::Point)>>;

    /// A spread-out population of pairs for infima over all `p ≠ q`.
    fn pair_population(&self, count: usize, seed: u64) -> Result<Vec<(Self::Point, Self::Point)>>;

    fn growth(&self) -> Result<GrowthReport>;
}

/// Which angle enters an obtuse quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Angles between minimal geodesics.
    Angle,
    /// `κ`-comparison angles, from distances only.
    Comparison,
}

/// Sampling parameters shared by every pair of a ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryTemplate {
    pub kappa: Curvature,
    /// Far radii, strictly increasing; ignored on compact spaces.
    pub far_radii: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
}

impl QueryTemplate {
    pub fn new(far_radii: Vec<f64>) -> Self {
        Self {
            kappa: Curvature::FLAT,
            far_radii,
            samples_per_radius: 720,
            seed: 0,
        }
    }

    pub fn at<P>(&self, p: P, q: P) -> ComparisonQuery<P> {
        ComparisonQuery {
            p,
            q,
            kappa: self.kappa,
            far_radii: self.far_radii.clone(),
            samples_per_radius: self.samples_per_radius,
            seed: self.seed,
        }
    }
}

/// A pair together with its far-sampling parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonQuery<P> {
    pub p: P,
    pub q: P,
    pub kappa: Curvature,
    pub far_radii: Vec<f64>,
    pub samples_per_radius: usize,
    pub seed: u64,
}

/// A value with the ladder it was extrapolated from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantEstimate {
    pub value: f64,
    /// Rung parameters (far radii or pair separations).
    pub ladder: Vec<f64>,
    pub ladder_values: Vec<f64>,
    /// Ladder values nondecreasing along the ladder.
    pub monotone: bool,
    /// Half-width from the last two rungs.
    pub uncertainty: f64,
}

impl InvariantEstimate {
    fn from_ladder(ladder: Vec<f64>, ladder_values: Vec<f64>) -> Self {
        let n = ladder_values.len();
        let value = ladder_values[n - 1];
        let uncertainty = if n > 1 { (value - ladder_values[n - 2]).abs() } else { 0.0 };
        let monotone = ladder_values.windows(2).all(|w| w[1] >= w[0] - 1e-9);
        Self {
            value,
            ladder,
            ladder_values,
            monotone,
            uncertainty,
        }
    }
}

/// Separations for the liminf over shrinking pairs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairLadder {
    /// Strictly decreasing separations.
    pub separations: Vec<f64>,
    pub pairs_per_separation: usize,
}

impl PairLadder {
    pub fn new(separations: Vec<f64>) -> Self {
        Self {
            separations,
            pairs_per_separation: 36,
        }
    }
}

/// Growth and curvature data.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct GrowthReport {
    pub v_inf: Option<f64>,
    pub ideal_boundary_length: Option<f64>,
    pub total_curvature: Option<f64>,
    pub normalized_volume: Option<f64>,
}

/// `~ob_κ` of a pair: `limsup_{x→∞} max{∠̃_κ xpq, ∠̃_κ xqp} − π/2` on a
/// noncompact space, the sup over `B(p, R_M/2)^c` (and its mirror at `q`)
/// on a compact one. Uses distances only.
pub fn pair_obtuse_comparison<S: Space>(space: &S, query: &ComparisonQuery<S::Point>) -> Result<InvariantEstimate> {
    pair_estimate(space, query, Variant::Comparison)
}

/// `ob_∞(p, q)` (or `ob(p, q)` on compact spaces) from true angles.
pub fn pair_obtuse_angle<S: Space>(space: &S, query: &ComparisonQuery<S::Point>) -> Result<InvariantEstimate> {
    if !space.has_angles() {
        return Err(Error::Capability("angles"));
    }
    pair_estimate(space, query, Variant::Angle)
}

/// Either pair estimator.
pub fn pair_obtuse<S: Space>(space: &S, query: &ComparisonQuery<S::Point>, variant: Variant) -> Result<InvariantEstimate> {
    match variant {
        Variant::Angle => pair_obtuse_angle(space, query),
        Variant::Comparison => pair_obtuse_comparison(space, query),
    }
}

/// `liminf_{|p,q|→0}` of the pair estimate on a noncompact space: the
/// infimum over sampled pairs per separation, reported along the ladder.
pub fn obtuse_from_infinity<S: Space>(
    space: &S,
    ladder: &PairLadder,
    template: &QueryTemplate,
    variant: Variant,
) -> Result<InvariantEstimate> {
    if space.is_compact() {
        return Err(Error::Capability("noncompact"));
    }
    pair_ladder(space, ladder, template, variant)
}

/// `ob(M)` of a compact space, with far sets `B(c, R_M/2)^c`.
pub fn obtuse_compact<S: Space>(
    space: &S,
    ladder: &PairLadder,
    template: &QueryTemplate,
    variant: Variant,
) -> Result<InvariantEstimate> {
    if !space.is_compact() {
        return Err(Error::Capability("compact"));
    }
    pair_ladder(space, ladder, template, variant)
}

/// `~ob_{κ,∞}(M) = inf_{p≠q} ~ob_{κ,∞}(p, q)` over the given pairs. The
/// ladder is the far-radius ladder with the per-rung infimum over pairs.
pub fn kappa_obtuse_infinity<S: Space>(
    space: &S,
    kappa: Curvature,
    pairs: &[(S::Point, S::Point)],
    template: &QueryTemplate,
) -> Result<InvariantEstimate> {
    if space.is_compact() {
        return Err(Error::Capability("noncompact"));
    }
    if pairs.is_empty() {
        return Err(Error::Domain("empty pair population".into()));
    }
    let mut template = template.clone();
    template.kappa = kappa;
    let mut per_rung = vec![f64::INFINITY; template.far_radii.len()];
    for (p, q) in pairs {
        let est = pair_obtuse_comparison(space, &template.at(p.clone(), q.clone()))?;
        for (m, v) in per_rung.iter_mut().zip(&est.ladder_values) {
            *m = m.min(*v);
        }
    }
    Ok(InvariantEstimate::from_ladder(template.far_radii.clone(), per_rung))
}

pub fn growth_report<S: Space>(space: &S) -> Result<GrowthReport> {
    space.growth()
}

fn pair_ladder<S: Space>(
    space: &S,
    ladder: &PairLadder,
    template: &QueryTemplate,
    variant: Variant,
) -> Result<InvariantEstimate> {
    if ladder.separations.is_empty() || ladder.separations.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Domain("pair separations must be strictly decreasing".into()));
    }
    if ladder.pairs_per_separation == 0 {
        return Err(Error::Domain("need at least one pair per separation".into()));
    }
    let mut values = Vec::new();
    for (j, &sep) in ladder.separations.iter().enumerate() {
        let pairs = space.pair_samples(sep, ladder.pairs_per_separation, template.seed.wrapping_add(j as u64))?;
        let mut inf = f64::INFINITY;
        for (p, q) in pairs {
            inf = inf.min(pair_obtuse(space, &template.at(p, q), variant)?.value);
        }
        values.push(inf);
    }
    Ok(InvariantEstimate::from_ladder(ladder.separations.clone(), values))
}

/// Grid maxima refined by golden section on the coarse map.
const REFINED: usize = 3;

fn pair_estimate<S: Space>(space: &S, query: &ComparisonQuery<S::Point>, variant: Variant) -> Result<InvariantEstimate> {
    if query.samples_per_radius == 0 {
        return Err(Error::Domain("samples_per_radius must be at least 1".into()));
    }
    let delta = space.distance(&query.p, &query.q)?;
    if !(delta > 0.0) {
        return Err(Error::Domain("p and q must be distinct".into()));
    }
    let (dirs_p, dirs_q) = match variant {
        Variant::Angle => (
            space.minimal_directions(&query.p, &query.q)?,
            space.minimal_directions(&query.q, &query.p)?,
        ),
        Variant::Comparison => (Vec::new(), Vec::new()),
    };
    let compact = space.is_compact();
    let (probe_p, probe_q, restrict, ladder) = if compact {
        let density = 12;
        let half = 0.5 * space.radius()?;
        (
            space.region_probe(&query.p, density)?,
            space.region_probe(&query.q, density)?,
            Some(half),
            vec![half],
        )
    } else {
        let r = &query.far_radii;
        if r.is_empty() || r.windows(2).any(|w| !(w[1] > w[0])) || r[0] <= 0.0 {
            return Err(Error::Domain("far radii must be positive and strictly increasing".into()));
        }
        (space.far_probe(&query.p, r)?, space.far_probe(&query.q, r)?, None, r.clone())
    };
    let ctx = PairContext {
        space,
        p: &query.p,
        q: &query.q,
        probe_p: probe_p.as_ref(),
        probe_q: probe_q.as_ref(),
        dirs_p,
        dirs_q,
        delta,
        kappa: query.kappa,
        variant,
        restrict,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(query.seed);
    let levels = probe_p.levels();
    let mut rung_values = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for level in 0..levels {
        let phase: f64 = rng.gen();
        let n = if compact {
            (query.samples_per_radius / 4).max(16)
        } else {
            query.samples_per_radius
        };
        let v = ctx.level_sup(level, n, phase);
        if compact {
            best = best.max(v);
        } else {
            rung_values.push(v);
        }
    }
    if compact {
        rung_values.push(best);
    }
    if rung_values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("no admissible far samples".into()));
    }
    let rung_values = rung_values.into_iter().map(|v| (v - FRAC_PI_2).clamp(-FRAC_PI_2, FRAC_PI_2)).collect();
    Ok(InvariantEstimate::from_ladder(ladder, rung_values))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Vertex {
    P,
    Q,
}

struct PairContext<'a, S: Space> {
    space: &'a S,
    p: &'a S::Point,
    q: &'a S::Point,
    probe_p: &'a dyn Probe,
    probe_q: &'a dyn Probe,
    dirs_p: Vec<f64>,
    dirs_q: Vec<f64>,
    delta: f64,
    kappa: Curvature,
    variant: Variant,
    restrict: Option<f64>,
}

impl<S: Space> PairContext<'_, S> {
    /// `sup_t max` of the two vertex angles on one curve (not reduced).
    fn level_sup(&self, level: usize, n: usize, phase: f64) -> f64 {
        let period = self.probe_p.period(level);
        let h = period / n as f64;
        let ts: Vec<f64> = (0..n).map(|k| (k as f64 + phase) * h).collect();
        let hp: Vec<Option<Hit>> = ts.iter().map(|&t| self.probe_p.coarse(level, t)).collect();
        let hq: Vec<Option<Hit>> = ts.iter().map(|&t| self.probe_q.coarse(level, t)).collect();
        let mut best = f64::NEG_INFINITY;
        for vertex in [Vertex::P, Vertex::Q] {
            let vals: Vec<f64> = (0..n).map(|k| self.vertex_angle(vertex, hp[k].as_ref(), hq[k].as_ref())).collect();
            let mut order: Vec<usize> = (0..n).filter(|&k| vals[k].is_finite()).collect();
            order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
            let mut chosen: Vec<usize> = Vec::new();
            for k in order {
                if chosen.len() == REFINED {
                    break;
                }
                if chosen.iter().all(|&c| {
                    let d = (c as isize - k as isize).unsigned_abs();
                    d.min(n - d) > 1
                }) {
                    chosen.push(k);
                }
            }
            let mut side = f64::NEG_INFINITY;
            for k in chosen {
                let (t, _) = golden_max(|t| self.at(vertex, level, t, false), ts[k] - h, ts[k] + h, 1e-11 * period);
                for x in [t, ts[k]] {
                    side = side.max(self.at(vertex, level, x, true));
                }
                if !side.is_finite() {
                    side = side.max(vals[k]);
                }
            }
            best = best.max(side);
        }
        best
    }

    fn at(&self, vertex: Vertex, level: usize, t: f64, exact: bool) -> f64 {
        let t = t.rem_euclid(self.probe_p.period(level));
        let get = |probe: &dyn Probe| if exact { probe.exact(level, t) } else { probe.coarse(level, t) };
        let need_other = self.variant == Variant::Comparison;
        let (hp, hq) = match vertex {
            Vertex::P => (get(self.probe_p), if need_other { get(self.probe_q) } else { None }),
            Vertex::Q => (if need_other { get(self.probe_p) } else { None }, get(self.probe_q)),
        };
        self.vertex_angle(vertex, hp.as_ref(), hq.as_ref())
    }

    /// Angle at `vertex` towards the sample, or `−∞` if inadmissible.
    fn vertex_angle(&self, vertex: Vertex, hp: Option<&Hit>, hq: Option<&Hit>) -> f64 {
        let (own, other, dirs, centre) = match vertex {
            Vertex::P => (hp, hq, &self.dirs_p, self.p),
            Vertex::Q => (hq, hp, &self.dirs_q, self.q),
        };
        let Some(own) = own else {
            return f64::NEG_INFINITY;
        };
        if let Some(min) = self.restrict {
            if own.distance < min {
                return f64::NEG_INFINITY;
            }
        }
        match self.variant {
            Variant::Angle => own
                .directions
                .iter()
                .map(|&a| {
                    dirs.iter()
                        .map(|&u| self.space.direction_angle(centre, u, a))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::NEG_INFINITY, f64::max),
            Variant::Comparison => match other {
                Some(other) => vertex_comparison(self.kappa, own.distance, self.delta, other.distance),
                None => f64::NEG_INFINITY,
            },
        }
    }
}

/// Comparison angle at a vertex with adjacent sides `a`, `b` and opposite
/// side `c`, after clamping `c` into the triangle range.
pub(crate) fn vertex_comparison(kappa: Curvature, a: f64, b: f64, c: f64) -> f64 {
    if !(a > 0.0 && b > 0.0) {
        return f64::NEG_INFINITY;
    }
    let c = c.clamp((a - b).abs(), a + b);
    if c == 0.0 {
        return 0.0;
    }
    SideTriple::new(a, b, c, kappa)
        .and_then(|s| comparison_angle(kappa, &s, Side::C))
        .unwrap_or(f64::NEG_INFINITY)
}
