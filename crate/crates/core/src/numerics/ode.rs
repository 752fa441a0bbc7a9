use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::Grid;

use super::spline::CubicSpline;

/// Potential `q` on the shared grid, interpolated by a not-a-knot cubic spline.
#[derive(Debug, Clone)]
pub struct Potential {
    grid: Grid,
    spline: CubicSpline,
    min: f64,
}

impl Potential {
    pub fn new(grid: Grid, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidInput(format!(
                "potential has {} samples, grid has {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(Self {
            grid,
            spline: CubicSpline::new(0.0, grid.step(), samples),
            min,
        })
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        self.spline.eval(x)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        self.spline.values()
    }

    pub fn min(&self) -> f64 {
        self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Local error tolerance (relative for Cartesian variables, absolute for
    /// the Prüfer phase and log-amplitude).
    pub tol: f64,
    /// Above this `lambda` the amplitude-phase formulation is used.
    pub lambda_switch: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            lambda_switch: 25.0,
            max_steps: 2_000_000,
        }
    }
}

/// `(y, y')` sampled on the grid nodes.
#[derive(Debug, Clone)]
pub struct IvpSolution {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dy: Vec<f64>,
}

/// Solves `-y'' + q y = lambda y` on the potential's grid. `Forward` starts at
/// `x = 0` with `y0 = (y, y')`, `Backward` starts at `x = pi`.
pub fn integrate_ivp(
    q: &Potential,
    y0: (f64, f64),
    lambda: f64,
    direction: Direction,
    opts: &OdeOptions,
) -> Result<IvpSolution> {
    let x = q.grid().points();
    let (start, targets): (f64, Vec<f64>) = match direction {
        Direction::Forward => (0.0, x[1..].to_vec()),
        Direction::Backward => (PI, x[..x.len() - 1].iter().rev().cloned().collect()),
    };
    let vals = solve_at(q, y0, lambda, start, &targets, opts)?;
    let mut y = Vec::with_capacity(x.len());
    let mut dy = Vec::with_capacity(x.len());
    match direction {
        Direction::Forward => {
            y.push(y0.0);
            dy.push(y0.1);
            for (a, b) in vals {
                y.push(a);
                dy.push(b);
            }
        }
        Direction::Backward => {
            for &(a, b) in vals.iter().rev() {
                y.push(a);
                dy.push(b);
            }
            y.push(y0.0);
            dy.push(y0.1);
        }
    }
    Ok(IvpSolution { x, y, dy })
}

/// Solution values `(y, y')` at `targets`, which must be monotone moving away
/// from `start` (either direction).
pub fn solve_at(
    q: &Potential,
    y0: (f64, f64),
    lambda: f64,
    start: f64,
    targets: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<(f64, f64)>> {
    if !lambda.is_finite() {
        return Err(Error::InvalidInput(format!("lambda must be finite, got {lambda}")));
    }
    if targets.is_empty() {
        return Ok(Vec::new());
    }
    if lambda > opts.lambda_switch {
        solve_pruefer(q, y0, lambda, start, targets, opts)
    } else {
        solve_cartesian(q, y0, lambda, start, targets, opts)
    }
}

fn solve_cartesian(
    q: &Potential,
    y0: (f64, f64),
    lambda: f64,
    start: f64,
    targets: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<(f64, f64)>> {
    let scale = y0.0.abs().max(y0.1.abs() / (1.0 + lambda.abs().sqrt()));
    let atol = opts.tol * 1e-3 * scale.max(1e-300);
    let rhs = |x: f64, y: &[f64; 2]| [y[1], (q.value(x) - lambda) * y[0]];
    let out = dopri5(rhs, start, [y0.0, y0.1], targets, opts.tol, atol, opts.max_steps)
        .map_err(|x| Error::IntegrationFailure { lambda, x })?;
    Ok(out.into_iter().map(|v| (v[0], v[1])).collect())
}

/// Amplitude-phase form `y = A sin(theta)`, `y' = s A cos(theta)` with
/// `theta = s x + eta`:
///   eta'   = -(q/s) sin^2 theta
///   (ln A)' = (q/(2s)) sin 2 theta
fn solve_pruefer(
    q: &Potential,
    y0: (f64, f64),
    lambda: f64,
    start: f64,
    targets: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<(f64, f64)>> {
    let s = lambda.sqrt();
    let amp0 = (y0.0 * y0.0 + (y0.1 / s).powi(2)).sqrt();
    if amp0 == 0.0 {
        return Ok(vec![(0.0, 0.0); targets.len()]);
    }
    let theta0 = y0.0.atan2(y0.1 / s);
    let eta0 = theta0 - s * start;
    let rhs = |x: f64, v: &[f64; 2]| {
        let theta = s * x + v[0];
        let (sn, cs) = theta.sin_cos();
        let qs = q.value(x) / s;
        [-qs * sn * sn, qs * sn * cs]
    };
    let out = dopri5(rhs, start, [eta0, 0.0], targets, opts.tol, opts.tol, opts.max_steps)
        .map_err(|x| Error::IntegrationFailure { lambda, x })?;
    Ok(targets
        .iter()
        .zip(out)
        .map(|(&x, v)| {
            let theta = s * x + v[0];
            let amp = amp0 * v[1].exp();
            let (sn, cs) = theta.sin_cos();
            (amp * sn, s * amp * cs)
        })
        .collect())
}

// Dormand-Prince 5(4) tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand-Prince integration landing exactly on every target.
/// Returns the `x` where the step size underflowed on failure.
fn dopri5<F, const D: usize>(
    f: F,
    x0: f64,
    y0: [f64; D],
    targets: &[f64],
    rtol: f64,
    atol: f64,
    max_steps: usize,
) -> std::result::Result<Vec<[f64; D]>, f64>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let dir = if targets[targets.len() - 1] >= x0 { 1.0 } else { -1.0 };
    let span = (targets[targets.len() - 1] - x0).abs().max(1e-300);
    let mut out = Vec::with_capacity(targets.len());
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, &y);
    let mut h_prop = span * 1e-3 * dir;
    let mut steps = 0usize;
    let axpy = |y: &[f64; D], terms: &[(f64, &[f64; D])], h: f64| {
        let mut r = *y;
        for (c, k) in terms {
            for i in 0..D {
                r[i] += h * c * k[i];
            }
        }
        r
    };

    for &target in targets {
        while (target - x) * dir > 0.0 {
            steps += 1;
            if steps > max_steps {
                return Err(x);
            }
            let remaining = target - x;
            let hit = h_prop * dir >= remaining * dir;
            let h = if hit { remaining } else { h_prop };
            if !hit && h.abs() < 1e-14 * (1.0 + x.abs()) {
                return Err(x);
            }
            let k2 = f(x + C2 * h, &axpy(&y, &[(A21, &k1)], h));
            let k3 = f(x + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
            let k4 = f(x + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
            let k5 = f(
                x + C5 * h,
                &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
            );
            let k6 = f(
                x + h,
                &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
            );
            let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
            let x_new = if hit { target } else { x + h };
            let k7 = f(x_new, &y_new);
            let mut err = 0.0;
            for i in 0..D {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc).powi(2);
            }
            let err = (err / D as f64).sqrt();
            if err <= 1.0 {
                x = x_new;
                y = y_new;
                k1 = k7;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a step shortened to land on a target says little about the
                // admissible length, so keep the earlier proposal if it was larger
                h_prop = if hit { (h * fac).abs().max(h_prop.abs()) * dir } else { h * fac };
            } else {
                let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
                h_prop = h * fac;
            }
        }
        out.push(y);
    }
    Ok(out)
}
