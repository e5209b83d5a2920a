//! Crossing maps of a geodesic fan with circles `r = const`.
//!
//! For a base point `b = (r_b, 0)` and a level `R`, every ray `α` of the fan
//! meets the circle `r = R` in a sequence of points `(R, Θ_k(α))` at
//! arclengths `L_k(α)`. Inverting `Θ_k` gives, for a target point on the
//! circle, every fan geodesic ending there; the shortest realizes the
//! distance and its initial angle the direction `↑_b^x`.

use std::f64::consts::PI;

use super::geodesic::{Segment, Tracer};
use super::profile::ProfileSurface;
use super::shoot::initial_state;
use crate::error::Result;
use crate::numeric::{brent_root, brent_root_with};
use crate::ode::Tolerance;

/// Distance and minimal directions from the base to one circle point.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct CircleHit {
    pub length: f64,
    pub alphas: Vec<f64>,
}

pub(crate) struct Sweep {
    surface: ProfileSurface,
    r0: f64,
    length: f64,
    tol: Tolerance,
    levels: Vec<f64>,
    alphas: Vec<f64>,
    // crossings[level][ray] = [(Θ, L)] in order along the ray
    crossings: Vec<Vec<Vec<(f64, f64)>>>,
}

/// Relative width of the band of near-minimal lengths.
const BAND: f64 = 1e-6;

/// Most candidates refined by shooting in [`Sweep::exact`].
const MAX_REFINE: usize = 4;

impl Sweep {
    /// Integrate `scan` rays from `(r0, 0)` up to arclength `length`,
    /// recording all crossings with the given levels (normalised units).
    pub fn new(
        surface: &ProfileSurface,
        r0: f64,
        levels: &[f64],
        length: f64,
        scan: usize,
        tol: Tolerance,
    ) -> Result<Self> {
        let n = scan.max(8);
        let alphas: Vec<f64> = (0..n).map(|i| -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64).collect();
        let mut crossings = vec![vec![Vec::new(); n]; levels.len()];
        for (i, &a) in alphas.iter().enumerate() {
            let mut tracer = Tracer::new(surface, initial_state(surface, r0, a), tol)?;
            while let Some(seg) = tracer.next(length)? {
                for (j, &lv) in levels.iter().enumerate() {
                    for t in level_crossings(&seg, lv) {
                        crossings[j][i].push((seg.theta(t), t));
                    }
                }
            }
        }
        Ok(Self {
            surface: surface.clone(),
            r0,
            length,
            tol,
            levels: levels.to_vec(),
            alphas,
            crossings,
        })
    }

    /// Coarse inversion by cubic interpolation in the initial angle.
    pub fn coarse(&self, level: usize, target: f64) -> Option<CircleHit> {
        let cands = self.candidates(level, target);
        best_of(cands.into_iter().map(|c| (c.length, c.alpha)))
    }

    /// Inversion refined by shooting.
    pub fn exact(&self, level: usize, target: f64) -> Option<CircleHit> {
        let cands = self.candidates(level, target);
        let lmin = cands.iter().map(|c| c.length).fold(f64::INFINITY, f64::min);
        if !lmin.is_finite() {
            return None;
        }
        // interpolation errors are tiny; keep a generous window for refinement
        let window = lmin * 1e-4 + 1e-9;
        let mut near: Vec<&Candidate> = cands.iter().filter(|c| c.length <= lmin + window).collect();
        near.sort_by(|a, b| a.length.total_cmp(&b.length));
        let mut refined: Vec<(f64, f64)> = near.iter().skip(MAX_REFINE).map(|c| (c.length, c.alpha)).collect();
        for c in near.into_iter().take(MAX_REFINE) {
            match self.refine(level, target, c) {
                Some(r) => refined.push(r),
                None => refined.push((c.length, c.alpha)),
            }
        }
        best_of(refined.into_iter())
    }

    fn candidates(&self, level: usize, target: f64) -> Vec<Candidate> {
        let rows = &self.crossings[level];
        let n = rows.len();
        let depth = rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = Vec::new();
        for k in 0..depth {
            let get = |i: isize| -> Option<(f64, f64, f64)> {
                // index may run past either end of the circle of angles
                let (idx, turn) = wrap_index(i, n);
                let &(th, l) = rows[idx].get(k)?;
                Some((self.alphas[idx] + 2.0 * PI * turn as f64, th, l))
            };
            for i in 0..n as isize {
                let (Some(a), Some(b)) = (get(i), get(i + 1)) else {
                    continue;
                };
                let shift = if i + 1 == n as isize { wrap_shift(a.1, b.1) } else { 0.0 };
                let (ta, tb) = (a.1, b.1 + shift);
                let (lo, hi) = if ta <= tb { (ta, tb) } else { (tb, ta) };
                let kmin = ((lo - target) / (2.0 * PI)).ceil() as i64;
                let kmax = ((hi - target) / (2.0 * PI)).floor() as i64;
                for w in kmin..=kmax {
                    let tt = target + 2.0 * PI * w as f64;
                    let prev = get(i - 1).map(|p| (p.0, p.1 + if i == 0 { wrap_shift(p.1, a.1) } else { 0.0 }, p.2));
                    let next = get(i + 2).map(|p| {
                        let s = if i + 2 >= n as isize { shift_to(p.1, tb) } else { 0.0 };
                        (p.0, p.1 + s, p.2)
                    });
                    let (alpha, length) = interpolate(prev, (a.0, ta, a.2), (b.0, tb, b.2), next, tt);
                    out.push(Candidate {
                        length,
                        alpha,
                        ordinal: k,
                        bracket: (a.0, b.0),
                        shift,
                        target: tt,
                    });
                }
            }
        }
        out
    }

    fn refine(&self, level: usize, _target: f64, c: &Candidate) -> Option<(f64, f64)> {
        let lv = self.levels[level];
        let (a, b) = c.bracket;
        let eval = |alpha: f64| -> Option<(f64, f64)> {
            let wrapped = if alpha > PI { alpha - 2.0 * PI } else { alpha };
            let (th, l) = shoot_to_level(&self.surface, self.r0, wrapped, lv, c.ordinal, self.length, self.tol)?;
            let s = if alpha > PI { c.shift } else { 0.0 };
            Some((th + s, l))
        };
        let fa = eval(a)?.0 - c.target;
        let fb = eval(b)?.0 - c.target;
        let mut f = |x: f64| eval(x).map_or(f64::NAN, |(th, _)| th - c.target);
        let alpha = brent_root_with(&mut f, a, b, fa, fb, 1e-13, 100)?;
        let (_, l) = eval(alpha)?;
        let alpha = if alpha > PI { alpha - 2.0 * PI } else { alpha };
        Some((l, alpha))
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    length: f64,
    alpha: f64,
    ordinal: usize,
    bracket: (f64, f64),
    shift: f64,
    target: f64,
}

fn best_of(items: impl Iterator<Item = (f64, f64)>) -> Option<CircleHit> {
    let items: Vec<(f64, f64)> = items.collect();
    let lmin = items.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    if !lmin.is_finite() {
        return None;
    }
    let band = lmin * (1.0 + BAND) + 1e-14;
    let mut alphas: Vec<f64> = items
        .iter()
        .filter(|c| c.0 <= band)
        .map(|c| if c.1 > PI { c.1 - 2.0 * PI } else { c.1 })
        .collect();
    alphas.sort_by(f64::total_cmp);
    alphas.dedup_by(|x, y| (*x - *y).abs() < 1e-9);
    Some(CircleHit { length: lmin, alphas })
}

fn wrap_index(i: isize, n: usize) -> (usize, i64) {
    let n = n as isize;
    (i.rem_euclid(n) as usize, i.div_euclid(n) as i64)
}

/// Multiple of 2π continuing `Θ` from ray `n−1` to ray `0` across `α = π`.
fn wrap_shift(last: f64, first: f64) -> f64 {
    shift_to(first, last)
}

/// Multiple of 2π bringing `x` closest to `reference`.
fn shift_to(x: f64, reference: f64) -> f64 {
    2.0 * PI * ((reference - x) / (2.0 * PI)).round()
}

/// Cubic (or linear at the ends) inversion of `Θ(α) = target` between the
/// samples `a` and `b`, each `(α, Θ, L)`.
fn interpolate(
    prev: Option<(f64, f64, f64)>,
    a: (f64, f64, f64),
    b: (f64, f64, f64),
    next: Option<(f64, f64, f64)>,
    target: f64,
) -> (f64, f64) {
    let lin = |x: f64| {
        let w = (x - a.0) / (b.0 - a.0);
        (a.1 + w * (b.1 - a.1), a.2 + w * (b.2 - a.2))
    };
    let eval: Box<dyn Fn(f64) -> (f64, f64)> = match (prev, next) {
        (Some(p), Some(q)) => {
            let xs = [p.0, a.0, b.0, q.0];
            let th = [p.1, a.1, b.1, q.1];
            let ls = [p.2, a.2, b.2, q.2];
            Box::new(move |x: f64| (lagrange(&xs, &th, x), lagrange(&xs, &ls, x)))
        }
        _ => Box::new(lin),
    };
    let f = |x: f64| eval(x).0 - target;
    let alpha = if (a.1 - target).abs() == 0.0 {
        a.0
    } else if (b.1 - target).abs() == 0.0 {
        b.0
    } else {
        brent_root(f, a.0, b.0, 1e-15).unwrap_or_else(|| {
            let w = (target - a.1) / (b.1 - a.1);
            a.0 + w.clamp(0.0, 1.0) * (b.0 - a.0)
        })
    };
    (alpha, eval(alpha).1)
}

fn lagrange(xs: &[f64; 4], ys: &[f64; 4], x: f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..4 {
        let mut w = 1.0;
        for j in 0..4 {
            if i != j {
                w *= (x - xs[j]) / (xs[i] - xs[j]);
            }
        }
        sum += w * ys[i];
    }
    sum
}

/// Parameters in `seg` where `r` crosses `level`.
pub(crate) fn level_crossings(seg: &Segment, level: f64) -> Vec<f64> {
    const PROBES: usize = 4;
    let (t0, t1) = (seg.t0(), seg.t_end);
    let mut out = Vec::new();
    let mut prev_t = t0;
    let mut prev_f = seg.r(t0) - level;
    for k in 1..=PROBES {
        let t = t0 + (t1 - t0) * k as f64 / PROBES as f64;
        let f = seg.r(t) - level;
        if prev_f < 0.0 && f >= 0.0 || prev_f > 0.0 && f <= 0.0 {
            if let Some(tc) = brent_root(|s| seg.r(s) - level, prev_t, t, 1e-15) {
                out.push(tc);
            }
        }
        prev_t = t;
        prev_f = f;
    }
    out
}

/// Integrate one ray until its `ordinal`-th crossing of `level`;
/// returns `(Θ, L)`.
pub(crate) fn shoot_to_level(
    surface: &ProfileSurface,
    r0: f64,
    alpha: f64,
    level: f64,
    ordinal: usize,
    t_max: f64,
    tol: Tolerance,
) -> Option<(f64, f64)> {
    shoot_to_level_state(surface, r0, alpha, level, ordinal, t_max, tol).map(|(t, y)| (y[1], t))
}

/// [`shoot_to_level`] returning the arclength and the polar state there.
pub(crate) fn shoot_to_level_state(
    surface: &ProfileSurface,
    r0: f64,
    alpha: f64,
    level: f64,
    ordinal: usize,
    t_max: f64,
    tol: Tolerance,
) -> Option<(f64, [f64; 4])> {
    let mut tracer = Tracer::new(surface, initial_state(surface, r0, alpha), tol).ok()?;
    let mut seen = 0;
    while let Some(seg) = tracer.next(t_max).ok()? {
        for t in level_crossings(&seg, level) {
            if seen == ordinal {
                let mut y = seg.polar(t);
                y[1] = seg.theta(t);
                return Some((t, y));
            }
            seen += 1;
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::revsurface::geodesic::ode_tolerance;
    use crate::revsurface::profile::{make_surface, Family};

    #[test]
    fn plane_circle_distances() {
        let s = make_surface(Family::Plane).unwrap();
        let sw = Sweep::new(&s, 1.0, &[10.0], 11.5, 720, ode_tolerance(1e-11)).unwrap();
        for &phi in &[0.0, 0.7, 2.0, PI - 0.01, -2.5] {
            let exact = (1.0f64 + 100.0 - 20.0 * f64::cos(phi)).sqrt();
            let c = sw.coarse(0, phi).unwrap();
            assert!((c.length - exact).abs() < 1e-7, "{phi}: {} vs {exact}", c.length);
            let e = sw.exact(0, phi).unwrap();
            assert!((e.length - exact).abs() < 1e-10, "{phi}: {} vs {exact}", e.length);
            // direction from (1,0) towards x
            let dir = (10.0 * phi.sin()).atan2(10.0 * phi.cos() - 1.0);
            assert!((e.alphas[0] - dir).abs() < 1e-8, "{phi}: {:?} vs {dir}", e.alphas);
        }
        // opposite side: straight through, direction π
        let e = sw.exact(0, PI).unwrap();
        assert!((e.length - 11.0).abs() < 1e-9);
    }

    #[test]
    fn sphere_antipode_is_flat() {
        let s = make_surface(Family::Sphere).unwrap();
        let sw = Sweep::new(&s, 1.0, &[PI - 1.0], PI + 0.01, 360, ode_tolerance(1e-11)).unwrap();
        let c = sw.coarse(0, PI).unwrap();
        assert!((c.length - PI).abs() < 1e-7);
        assert!(c.alphas.len() > 2);
    }
}
