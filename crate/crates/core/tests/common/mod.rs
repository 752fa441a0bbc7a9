//! Closed forms of the worked example: `lambda = 0, 1/4, 1, 4, 9, ...`,
//! `gamma = pi, pi/2, pi/2, ...`.

#![allow(dead_code)]

use std::f64::consts::PI;

use slinv::SpectralData;

pub fn denom(x: f64) -> f64 {
    PI + x + x.sin()
}

pub fn example_q(x: f64) -> f64 {
    let d = denom(x);
    (2.0 * (PI + x) * x.sin() + 4.0 * (1.0 + x.cos())) / (d * d)
}

/// `K(x,t) = -2 cos(x/2) cos(t/2) / (pi + x + sin x)`.
pub fn example_k(x: f64, t: f64) -> f64 {
    -2.0 * (x / 2.0).cos() * (t / 2.0).cos() / denom(x)
}

/// `phi(x, s^2) = cos(sx) + int_0^x K(x,t) cos(st) dt`, integrated by hand.
pub fn example_phi(s: f64, x: f64) -> f64 {
    let lo = s - 0.5;
    let hi = s + 0.5;
    let part = |a: f64| if a == 0.0 { x } else { (a * x).sin() / a };
    let integral = 0.5 * (part(lo) + part(hi));
    (s * x).cos() - 2.0 * (x / 2.0).cos() * integral / denom(x)
}

pub fn example_data(n: usize) -> SpectralData {
    let mut lambdas = vec![0.0, 0.25];
    lambdas.extend((2..=n).map(|k| ((k - 1) * (k - 1)) as f64));
    let mut gammas = vec![PI];
    gammas.extend((1..=n).map(|_| PI / 2.0));
    SpectralData::new(lambdas, gammas, None).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
