//! Estimates of the constants in `s_n ~ (n-1) + omega/((n-1) pi)`.

use std::f64::consts::PI;

use crate::numerics::weighted_least_squares;

/// Least-squares intercept of `y_m ~ c + d/m^2` over the upper half of the
/// model indices `m = n - 1`, weights `m^2`. `values[n]` is indexed like the
/// spectrum; entries with `m < 1` are ignored.
pub fn fit_tail_constant(values: &[f64]) -> f64 {
    let n_max = values.len().saturating_sub(1);
    let start = (n_max / 2).max(2);
    let mut design = Vec::new();
    let mut y = Vec::new();
    let mut w = Vec::new();
    for (n, &v) in values.iter().enumerate().skip(start) {
        let m = (n - 1) as f64;
        design.push(vec![1.0, 1.0 / (m * m)]);
        y.push(v);
        w.push(m * m);
    }
    match design.len() {
        0 => 0.0,
        1 => y[0],
        _ => weighted_least_squares(&design, &y, &w).map(|c| c[0]).unwrap_or_else(|_| {
            let sw: f64 = w.iter().sum();
            y.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>() / sw
        }),
    }
}

/// `omega` from `(n-1) pi (s_n - (n-1))`.
pub fn estimate_omega(lambdas: &[f64]) -> f64 {
    let y: Vec<f64> = lambdas
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            let m = n as f64 - 1.0;
            m * PI * (l.max(0.0).sqrt() - m)
        })
        .collect();
    fit_tail_constant(&y)
}

/// `sigma` from `(n-1) pi (sqrt(mu_n) - sqrt(lambda_n))`.
pub fn estimate_shift(lambdas: &[f64], mus: &[f64]) -> f64 {
    let y: Vec<f64> = lambdas
        .iter()
        .zip(mus)
        .enumerate()
        .map(|(n, (&l, &m))| (n as f64 - 1.0) * PI * (m.max(0.0).sqrt() - l.max(0.0).sqrt()))
        .collect();
    fit_tail_constant(&y)
}

/// `c` in `gamma_n ~ pi/2 + c/(n-1)^2`.
pub fn estimate_gamma_curvature(gammas: &[f64]) -> f64 {
    let y: Vec<f64> = gammas
        .iter()
        .enumerate()
        .map(|(n, &g)| {
            let m = n as f64 - 1.0;
            m * m * (g - PI / 2.0)
        })
        .collect();
    fit_tail_constant(&y)
}

/// `d` in `s_n ~ (n-1) + omega/((n-1) pi) + d/(n-1)^3`.
pub fn estimate_root_curvature(lambdas: &[f64], omega: f64) -> f64 {
    let y: Vec<f64> = lambdas
        .iter()
        .enumerate()
        .map(|(n, &l)| {
            let m = n as f64 - 1.0;
            m * m * m * (l.max(0.0).sqrt() - m - omega / (m * PI))
        })
        .collect();
    fit_tail_constant(&y)
}
