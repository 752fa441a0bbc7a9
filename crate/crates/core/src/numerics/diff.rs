use super::spline::CubicSpline;

/// How [`diff_diagonal`] differentiates sampled data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiffScheme {
    /// Penalised smoothing with a third-difference roughness penalty
    /// (`penalty` is dimensionless, per grid cell), followed by
    /// differentiation of the not-a-knot cubic spline through the smoothed
    /// values. Quadratics pass through the smoother unchanged.
    SmoothingSpline { penalty: f64 },
    /// Second-order centred differences, one-sided at the ends.
    Centered,
}

impl Default for DiffScheme {
    fn default() -> Self {
        DiffScheme::SmoothingSpline { penalty: 1e-3 }
    }
}

/// Derivative of uniformly spaced samples.
pub fn diff_diagonal(values: &[f64], step: f64, scheme: DiffScheme) -> Vec<f64> {
    let n = values.len();
    assert!(n >= 5, "differentiation needs at least 5 samples");
    match scheme {
        DiffScheme::Centered => {
            let mut d = vec![0.0; n];
            for i in 1..n - 1 {
                d[i] = (values[i + 1] - values[i - 1]) / (2.0 * step);
            }
            d[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * step);
            d[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * step);
            d
        }
        DiffScheme::SmoothingSpline { penalty } => {
            let smooth = if penalty > 0.0 {
                whittaker_smooth(values, penalty)
            } else {
                values.to_vec()
            };
            let spline = CubicSpline::new(0.0, step, &smooth);
            (0..n)
                .map(|i| spline.derivative(i as f64 * step))
                .collect()
        }
    }
}

/// Minimises `|z - y|^2 + penalty |D3 z|^2` with `D3` the third-difference
/// operator. The normal matrix `I + penalty D3^T D3` is symmetric positive
/// definite with half-bandwidth 3; solved by banded Cholesky.
pub fn whittaker_smooth(y: &[f64], penalty: f64) -> Vec<f64> {
    const BW: usize = 3;
    let n = y.len();
    if n < 4 {
        return y.to_vec();
    }
    let stencil = [-1.0, 3.0, -3.0, 1.0];
    // band[i][k] = A[i][i-k]
    let mut band = vec![[0.0f64; BW + 1]; n];
    for row in band.iter_mut() {
        row[0] = 1.0;
    }
    for r in 0..n - 3 {
        for a in 0..4 {
            for b in 0..=a {
                let (i, j) = (r + a, r + b);
                band[i][i - j] += penalty * stencil[a] * stencil[b];
            }
        }
    }
    // in-place banded Cholesky: band becomes L
    for i in 0..n {
        for k in (0..=BW.min(i)).rev() {
            let j = i - k;
            let mut sum = band[i][k];
            for m in 1..=BW {
                if k + m > BW || m > j {
                    break;
                }
                // L[i][j-m] * L[j][j-m]
                sum -= band[i][k + m] * band[j][m];
            }
            if k == 0 {
                band[i][0] = sum.sqrt();
            } else {
                band[i][k] = sum / band[j][0];
            }
        }
    }
    let mut z = y.to_vec();
    for i in 0..n {
        let mut s = z[i];
        for k in 1..=BW.min(i) {
            s -= band[i][k] * z[i - k];
        }
        z[i] = s / band[i][0];
    }
    for i in (0..n).rev() {
        let mut s = z[i];
        for k in 1..=BW {
            if i + k >= n {
                break;
            }
            s -= band[i + k][k] * z[i + k];
        }
        z[i] = s / band[i][0];
    }
    z
}
