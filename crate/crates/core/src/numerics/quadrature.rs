use std::f64::consts::PI;

use crate::error::{Error, Result};

use super::{cos_sqrt, sin_sqrt_over};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureKind {
    Trapezoid,
    GaussLegendre { points: usize },
}

/// Nodes and positive weights on `[0, length]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
    pub length: f64,
}

impl QuadratureRule {
    /// Composite trapezoid with `intervals` equal cells.
    pub fn trapezoid(length: f64, intervals: usize) -> Result<Self> {
        if intervals == 0 || !(length > 0.0) {
            return Err(Error::InvalidInput("trapezoid rule needs a positive length and at least one cell".into()));
        }
        let step = length / intervals as f64;
        let nodes = (0..=intervals)
            .map(|i| if i == intervals { length } else { i as f64 * step })
            .collect();
        let mut weights = vec![step; intervals + 1];
        weights[0] = 0.5 * step;
        weights[intervals] = 0.5 * step;
        Ok(Self {
            nodes,
            weights,
            kind: QuadratureKind::Trapezoid,
            length,
        })
    }

    /// `panels` equal Gauss-Legendre panels with `points` nodes each.
    pub fn gauss_legendre(length: f64, panels: usize, points: usize) -> Result<Self> {
        if panels == 0 || points == 0 || !(length > 0.0) {
            return Err(Error::InvalidInput("Gauss-Legendre rule needs panels, points and a positive length".into()));
        }
        let (x, w) = gauss_legendre_nodes(points);
        let width = length / panels as f64;
        let mut nodes = Vec::with_capacity(panels * points);
        let mut weights = Vec::with_capacity(panels * points);
        for p in 0..panels {
            let a = p as f64 * width;
            for (xi, wi) in x.iter().zip(&w) {
                nodes.push(a + 0.5 * width * (xi + 1.0));
                weights.push(0.5 * width * wi);
            }
        }
        Ok(Self {
            nodes,
            weights,
            kind: QuadratureKind::GaussLegendre { points },
            length,
        })
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// Sum of `w_i * v_i` for values already sampled at the nodes.
    pub fn apply(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
pub fn gauss_legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        if n == 1 {
            x[0] = 0.0;
            w[0] = 2.0;
            break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// `int_0^{x_i} f(t) cos(sqrt(lambda) t) dt` for `f` sampled on a uniform grid
/// (nodes `0, step, ..., i*step`), integrating the piecewise-linear interpolant
/// of `f` against the oscillatory factor exactly.
pub fn product_integrate(samples: &[f64], step: f64, lambda: f64) -> f64 {
    let cells = samples.len().saturating_sub(1);
    let mut total = 0.0;
    for c in 0..cells {
        let a = c as f64 * step;
        let (j0, j1) = cell_moments(lambda, a, step);
        let fa = samples[c];
        let fb = samples[c + 1];
        total += fa * (j0 - j1 / step) + fb * (j1 / step);
    }
    total
}

/// `(int_0^d c(a+u) du, int_0^d u c(a+u) du)` with `c(t) = cos(sqrt(lambda) t)`.
fn cell_moments(lambda: f64, a: f64, d: f64) -> (f64, f64) {
    if (lambda * d * d).abs() < 1e-2 {
        // Taylor expansion of c around a; c'' = -lambda c.
        let c0 = cos_sqrt(lambda, a);
        let c1 = -lambda * sin_sqrt_over(lambda, a);
        let mut derivs = [0.0; 8];
        derivs[0] = c0;
        derivs[1] = c1;
        for k in 2..8 {
            derivs[k] = -lambda * derivs[k - 2];
        }
        let mut j0 = 0.0;
        let mut j1 = 0.0;
        let mut fact = 1.0;
        let mut dpow = d;
        for (k, dk) in derivs.iter().enumerate() {
            if k > 0 {
                fact *= k as f64;
            }
            // int_0^d u^k/k! du = d^{k+1}/(k+1)!, int_0^d u^{k+1}/k! du = d^{k+2}/((k+2) k!)
            j0 += dk * dpow / (fact * (k as f64 + 1.0));
            j1 += dk * dpow * d / (fact * (k as f64 + 2.0));
            dpow *= d;
        }
        return (j0, j1);
    }
    let b = a + d;
    if lambda > 0.0 {
        let s = lambda.sqrt();
        let (sa, ca) = (s * a).sin_cos();
        let (sb, cb) = (s * b).sin_cos();
        let j0 = (sb - sa) / s;
        let j1 = d * sb / s + (cb - ca) / lambda;
        (j0, j1)
    } else {
        let t = (-lambda).sqrt();
        let (sha, cha) = ((t * a).sinh(), (t * a).cosh());
        let (shb, chb) = ((t * b).sinh(), (t * b).cosh());
        let j0 = (shb - sha) / t;
        let j1 = d * shb / t - (chb - cha) / (-lambda);
        (j0, j1)
    }
}
