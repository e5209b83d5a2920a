//! Dormand–Prince 5(4) integrator with continuous (dense) output.
//!
//! The stepper is driven one accepted step at a time so that callers can
//! inspect each step, locate events on the dense interpolant and switch
//! coordinate charts between steps.

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Tolerances and step limits for [`Stepper`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub h_min: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-10,
            h_max: f64::INFINITY,
            h_min: 1e-14,
        }
    }
}

/// One accepted step together with its continuous extension.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn start(&self) -> [f64; N] {
        self.cont[0]
    }

    pub fn end(&self) -> [f64; N] {
        let mut y = [0.0; N];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.cont[0][i] + self.cont[1][i];
        }
        y
    }

    /// Evaluate the interpolant at `t` (clamped into the step).
    pub fn eval(&self, t: f64) -> [f64; N] {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let c = &self.cont;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] = c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])));
        }
        y
    }

    /// Evaluate a single component of the interpolant.
    pub fn eval_component(&self, t: f64, i: usize) -> f64 {
        let th = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let th1 = 1.0 - th;
        let c = &self.cont;
        c[0][i] + th * (c[1][i] + th1 * (c[2][i] + th * (c[3][i] + th1 * c[4][i])))
    }
}

/// Right-hand side of an ODE system `y' = f(t, y)`.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N];
}

impl<F, const N: usize> OdeSystem<N> for F
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    fn rhs(&self, t: f64, y: &[f64; N]) -> [f64; N] {
        self(t, y)
    }
}

/// Adaptive Dormand–Prince stepper for `y' = f(t, y)`.
pub struct Stepper<F, const N: usize>
where
    F: OdeSystem<N>,
{
    f: F,
    tol: Tolerance,
    t: f64,
    y: [f64; N],
    k1: [f64; N],
    h: f64,
    pub evaluations: usize,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

impl<F, const N: usize> Stepper<F, N>
where
    F: OdeSystem<N>,
{
    pub fn new(f: F, t0: f64, y0: [f64; N], tol: Tolerance) -> Self {
        let k1 = f.rhs(t0, &y0);
        let h = initial_step(&y0, &k1, &tol);
        Self {
            f,
            tol,
            t: t0,
            y: y0,
            k1,
            h,
            evaluations: 1,
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Suggest the size of the next step (used to seed a new stepper after a
    /// chart change).
    pub fn suggested_step(&self) -> f64 {
        self.h
    }

    pub fn set_step(&mut self, h: f64) {
        self.h = h.clamp(self.tol.h_min, self.tol.h_max);
    }

    /// Take one accepted step, never stepping beyond `t_limit`.
    /// Returns `None` when the step size underflows.
    pub fn step(&mut self, t_limit: f64) -> Option<DenseStep<N>> {
        let f = &self.f;
        let y = self.y;
        let k1 = self.k1;
        let mut reject = false;
        loop {
            let mut h = self.h.min(self.tol.h_max);
            let remaining = t_limit - self.t;
            if remaining <= 0.0 {
                return None;
            }
            let last = h >= remaining;
            if last {
                h = remaining;
            }
            let t = self.t;
            let k2 = f.rhs(t + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
            let k3 = f.rhs(t + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = f.rhs(t + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = f.rhs(
                t + C5 * h,
                &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
            );
            let k6 = f.rhs(
                t + h,
                &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
            );
            let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
            let k7 = f.rhs(t + h, &y1);
            self.evaluations += 6;

            let mut err = 0.0;
            for i in 0..N {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = self.tol.atol + self.tol.rtol * y[i].abs().max(y1[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / N as f64).sqrt();

            if err <= 1.0 && err.is_finite() {
                let mut cont = [[0.0; N]; 5];
                for i in 0..N {
                    let ydiff = y1[i] - y[i];
                    let bspl = h * k1[i] - ydiff;
                    cont[0][i] = y[i];
                    cont[1][i] = ydiff;
                    cont[2][i] = bspl;
                    cont[3][i] = ydiff - h * k7[i] - bspl;
                    cont[4][i] = h
                        * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
                }
                let step = DenseStep { t0: t, h, cont };
                self.t = if last { t_limit } else { t + h };
                self.y = y1;
                self.k1 = k7;
                let mut fac = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 10.0 };
                fac = fac.clamp(0.2, if reject { 1.0 } else { 10.0 });
                if !last || h * fac > self.h {
                    self.h = (h * fac).clamp(self.tol.h_min, self.tol.h_max);
                }
                return Some(step);
            }
            reject = true;
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).max(0.1) } else { 0.1 };
            self.h = h * fac;
            if self.h < self.tol.h_min {
                return None;
            }
        }
    }
}

fn initial_step<const N: usize>(y0: &[f64; N], k1: &[f64; N], tol: &Tolerance) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs();
        d0 += (y0[i] / sc).powi(2);
        d1 += (k1[i] / sc).powi(2);
    }
    let d0 = (d0 / N as f64).sqrt();
    let d1 = (d1 / N as f64).sqrt();
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.clamp(tol.h_min, tol.h_max.min(1e-2))
}

/// Integrate from `t0` to `t1`, collecting every dense step.
pub fn integrate<F, const N: usize>(
    f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    tol: Tolerance,
) -> Option<Vec<DenseStep<N>>>
where
    F: OdeSystem<N>,
{
    let mut stepper = Stepper::new(f, t0, y0, tol);
    let mut steps = Vec::new();
    while stepper.t() < t1 {
        steps.push(stepper.step(t1)?);
    }
    Some(steps)
}

/// Piecewise dense solution assembled from consecutive steps.
#[derive(Debug, Clone)]
pub struct DenseSolution<const N: usize> {
    steps: Vec<DenseStep<N>>,
}

impl<const N: usize> DenseSolution<N> {
    pub fn new(steps: Vec<DenseStep<N>>) -> Self {
        Self { steps }
    }

    pub fn t_start(&self) -> f64 {
        self.steps.first().map_or(0.0, |s| s.t0)
    }

    pub fn t_end(&self) -> f64 {
        self.steps.last().map_or(0.0, |s| s.t1())
    }

    pub fn steps(&self) -> &[DenseStep<N>] {
        &self.steps
    }

    fn locate(&self, t: f64) -> &DenseStep<N> {
        let idx = self.steps.partition_point(|s| s.t1() < t);
        &self.steps[idx.min(self.steps.len() - 1)]
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        self.locate(t).eval(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator_period() {
        let tol = Tolerance {
            rtol: 1e-12,
            atol: 1e-12,
            ..Default::default()
        };
        let two_pi = 2.0 * std::f64::consts::PI;
        let steps = integrate(|_t, y: &[f64; 2]| [y[1], -y[0]], 0.0, two_pi, [1.0, 0.0], tol).unwrap();
        let sol = DenseSolution::new(steps);
        let end = sol.eval(two_pi);
        assert!((end[0] - 1.0).abs() < 1e-10);
        assert!(end[1].abs() < 1e-10);
        // dense output between steps
        for k in 0..50 {
            let t = two_pi * k as f64 / 50.0;
            let y = sol.eval(t);
            assert!((y[0] - t.cos()).abs() < 1e-9, "t={t} {}", y[0]);
        }
    }

    #[test]
    fn exponential_growth_with_step_cap() {
        let tol = Tolerance {
            h_max: 0.05,
            ..Default::default()
        };
        let steps = integrate(|_t, y: &[f64; 1]| [y[0]], 0.0, 3.0, [1.0], tol).unwrap();
        assert!(steps.iter().all(|s| s.h <= 0.05 + 1e-15));
        let last = steps.last().unwrap().end();
        assert!((last[0] - 3f64.exp()).abs() < 1e-8);
    }
}
