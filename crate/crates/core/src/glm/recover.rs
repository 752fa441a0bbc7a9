use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::asymptotics::estimate_root_curvature;
use crate::error::{Error, Result};
use crate::numerics::{
    cos_sqrt, sin_sqrt_over, diff_diagonal, product_integrate, weighted_least_squares, DiffScheme, ProductEvaluator,
};
use crate::problem::SpectralData;

use super::kernel::{KernelField, KernelKind, TailMode};

#[derive(Debug, Clone, PartialEq)]
pub struct QRecovery {
    /// Potential on the grid, ends included.
    pub q: Vec<f64>,
    pub h: f64,
    /// `max_x |h + (1/2) int_0^x q - K(x,x)|`.
    pub consistency: f64,
}

/// `h = K(0,0)` and `q = 2 d/dx K(x,x)`.
pub fn recover_q_h(k: &KernelField, scheme: DiffScheme) -> QRecovery {
    assert_eq!(k.kind(), KernelKind::K);
    let grid = k.grid();
    let step = grid.step();
    let diag = k.diagonal();
    // End values come from the scheme's own one-sided derivative: linear
    // extrapolation flattens the boundary layers that truncation leaves in q.
    let q: Vec<f64> = diff_diagonal(&diag, step, scheme).into_iter().map(|v| 2.0 * v).collect();
    let m = q.len() - 1;
    let h = diag[0];
    let mut integral = 0.0;
    let mut consistency: f64 = 0.0;
    for i in 0..=m {
        if i > 0 {
            integral += 0.5 * step * (q[i - 1] + q[i]);
        }
        consistency = consistency.max((h + 0.5 * integral - diag[i]).abs());
    }
    QRecovery { q, h, consistency }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiRebuild {
    /// `phi(x_i, lambda)`.
    pub samples: Vec<f64>,
    /// `(phi(pi, lambda), phi'(pi, lambda))`.
    pub end: (f64, f64),
}

/// `phi(x) = cos(s x) + int_0^x K(x,t) cos(s t) dt` on the grid, with
/// `phi'(pi)` from [`dphi_end_integral`].
pub fn rebuild_phi(k: &KernelField, lambda: f64) -> PhiRebuild {
    assert_eq!(k.kind(), KernelKind::K);
    let grid = k.grid();
    let step = grid.step();
    let m = grid.intervals();
    let samples: Vec<f64> =
        (0..=m).map(|i| cos_sqrt(lambda, grid.x(i)) + product_integrate(k.row(i), step, lambda)).collect();
    let dphi = dphi_end_integral(k, lambda, &samples);
    PhiRebuild { end: (samples[m], dphi), samples }
}

/// `phi'(pi) = h + int q phi - lambda int phi` with `q = 2 d/dx K(x,x)` taken
/// cell by cell, so the diagonal is never differentiated pointwise.
pub fn dphi_end_integral(k: &KernelField, lambda: f64, samples: &[f64]) -> f64 {
    let grid = k.grid();
    let step = grid.step();
    let m = grid.intervals();
    let qphi: f64 = (0..m).map(|i| (k.get(i + 1, i + 1) - k.get(i, i)) * (samples[i] + samples[i + 1])).sum();
    // int_0^pi phi = sin(s pi)/s + int_0^pi cos(s t) G(t), G(t) = int_t^pi K(x,t) dx
    let g: Vec<f64> = (0..=m)
        .map(|j| {
            let col: f64 = (j..=m).map(|i| k.get(i, j)).sum();
            step * (col - 0.5 * (k.get(j, j) + k.get(m, j)))
        })
        .collect();
    let int_phi = sin_sqrt_over(lambda, grid.x(m)) + product_integrate(&g, step, lambda);
    k.get(0, 0) + qphi - lambda * int_phi
}

/// `chi(lambda) = -pi (lambda - lambda_0)(lambda - lambda_1) prod_{n>=2} (lambda_n - lambda)/(n-1)^2`,
/// completed by model roots shaped like the tail of `F`.
pub fn chi_from_product(d: &SpectralData, tail: TailMode) -> Result<ProductEvaluator> {
    let p = ProductEvaluator::characteristic(d.lambdas())?;
    Ok(match tail {
        TailMode::Truncate => p,
        TailMode::FirstOrder => p.with_tail_shift(d.omega()),
        TailMode::SecondOrder => p
            .with_tail_shift(d.omega())
            .with_tail_curvature(estimate_root_curvature(d.lambdas(), d.omega())),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryFit {
    #[serde(rename = "H")]
    pub big_h: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    /// `(kappa_1, ..., kappa_4)` before normalisation.
    pub kappa: [f64; 4],
    /// Largest `|A_n - fit| / (1 + |lambda_n|)` and the same for `B_n`.
    pub kappa_residuals: [f64; 2],
    pub rho: f64,
    /// Median of `(A_n B_m - B_n A_m)/(lambda_m - lambda_n)` over pairs `n < m <= 10`.
    pub rho_pairs: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub k: Vec<f64>,
}

/// Inverse-variance weight for `A_n`, `B_n`: rebuild errors scale with `|k_n|`
/// and, below zero, with `cosh(sqrt(-lambda) pi)`. Equals `1/(1 + lambda^2)`
/// when `lambda >= 0` and `k_n^2 <= 1 + lambda^2`.
fn fit_weight(lambda: f64, k: f64) -> f64 {
    let growth = if lambda < 0.0 { ((-lambda).sqrt() * PI).cosh() } else { 1.0 };
    1.0 / ((1.0 + lambda * lambda).max(k * k) * growth * growth)
}

/// Fits `A_n = k_n phi(pi)` and `B_n = k_n phi'(pi)` as lines in `lambda_n`,
/// normalises `kappa_1 = -1`, and reads off `H1 = kappa_2`, `H = kappa_3`,
/// `H2 = -kappa_4` (from `psi(pi) = H1 - lambda`, `psi'(pi) = lambda H - H2`).
pub fn recover_boundary_constants(
    d: &SpectralData,
    k: &KernelField,
    chi: &ProductEvaluator,
    tol_kappa: f64,
) -> Result<BoundaryFit> {
    let lambdas = d.lambdas();
    if lambdas.len() < 4 {
        return Err(Error::InvalidInput("need at least 4 eigenvalues to fit the boundary condition".into()));
    }
    let mut ks = Vec::with_capacity(lambdas.len());
    for (n, &g) in d.gammas().iter().enumerate() {
        let kn = chi.derivative_at_root(n)?.value() / g;
        if kn == 0.0 || !kn.is_finite() {
            return Err(Error::DegenerateK { lambda: lambdas[n], value: kn });
        }
        ks.push(kn);
    }
    let ends: Vec<(f64, f64)> = lambdas.iter().map(|&l| rebuild_phi(k, l).end).collect();
    let mut a: Vec<f64> = ks.iter().zip(&ends).map(|(kn, e)| kn * e.0).collect();
    let mut b: Vec<f64> = ks.iter().zip(&ends).map(|(kn, e)| kn * e.1).collect();

    let design: Vec<Vec<f64>> = lambdas.iter().map(|&l| vec![l, 1.0]).collect();
    let w: Vec<f64> = lambdas.iter().zip(&ks).map(|(&l, &kn)| fit_weight(l, kn)).collect();
    let ka = weighted_least_squares(&design, &a, &w)?;
    let kb = weighted_least_squares(&design, &b, &w)?;
    let kappa = [ka[0], ka[1], kb[0], kb[1]];
    if !((kappa[0] + 1.0).abs() <= tol_kappa) {
        return Err(Error::InconsistentData(format!(
            "kappa_1 = {} is not within {tol_kappa} of -1",
            kappa[0]
        )));
    }
    let fit_err = |v: &[f64], c: &[f64]| {
        lambdas.iter().zip(v).map(|(&l, &y)| (y - c[0] * l - c[1]).abs() / (1.0 + l.abs())).fold(0.0, f64::max)
    };
    let kappa_residuals = [fit_err(&a, &ka), fit_err(&b, &kb)];

    let scale = -1.0 / kappa[0];
    for v in a.iter_mut().chain(b.iter_mut()) {
        *v *= scale;
    }
    let h1 = scale * kappa[1];
    let big_h = scale * kappa[2];
    let h2 = -scale * kappa[3];
    let rho = big_h * h1 - h2;

    let top = lambdas.len().min(11);
    let mut pairs = Vec::new();
    for n in 0..top {
        for m in n + 1..top {
            pairs.push((a[n] * b[m] - b[n] * a[m]) / (lambdas[m] - lambdas[n]));
        }
    }
    pairs.sort_by(f64::total_cmp);
    let rho_pairs = pairs[pairs.len() / 2];

    if !(rho > 0.0) {
        return Err(Error::InvalidReconstruction(format!("rho = H H1 - H2 = {rho} is not positive")));
    }
    Ok(BoundaryFit { big_h, h1, h2, kappa, kappa_residuals, rho, rho_pairs, a, b, k: ks })
}
