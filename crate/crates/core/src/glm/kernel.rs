use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{estimate_gamma_curvature, estimate_root_curvature};
use crate::grid::Grid;
use crate::numerics::cos_sqrt;
use crate::problem::SpectralData;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelKind {
    /// Symmetric on the square; only `t <= x` is stored.
    F,
    /// Defined on the triangle `t <= x`.
    K,
}

/// Samples on `0 <= t_j <= x_i <= pi`, packed row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelField {
    grid: Grid,
    kind: KernelKind,
    values: Vec<f64>,
}

#[inline]
fn offset(i: usize) -> usize {
    i * (i + 1) / 2
}

impl KernelField {
    pub fn zeros(grid: Grid, kind: KernelKind) -> Self {
        Self { grid, kind, values: vec![0.0; offset(grid.len())] }
    }

    /// Assembles a field from rows `i = 0..=M`, row `i` having `i + 1` entries.
    pub fn from_rows(grid: Grid, kind: KernelKind, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(rows.len(), grid.len());
        let mut values = Vec::with_capacity(offset(grid.len()));
        for (i, r) in rows.into_iter().enumerate() {
            assert_eq!(r.len(), i + 1);
            values.extend(r);
        }
        Self { grid, kind, values }
    }

    pub fn from_fn(grid: Grid, kind: KernelKind, f: impl Fn(f64, f64) -> f64) -> Self {
        let rows = (0..grid.len())
            .map(|i| (0..=i).map(|j| f(grid.x(i), grid.x(j))).collect())
            .collect();
        Self::from_rows(grid, kind, rows)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    /// Value at `(x_i, t_j)`. F is read symmetrically; K requires `j <= i`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j <= i {
            self.values[offset(i) + j]
        } else {
            assert!(self.kind == KernelKind::F, "K is only defined for t <= x");
            self.values[offset(j) + i]
        }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[offset(i)..offset(i) + i + 1]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.get(i, i)).collect()
    }

    /// Packed lower triangle, row by row.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailMode {
    /// Pairs beyond the data take model values, so their terms vanish.
    #[default]
    Truncate,
    /// Continues the data with model pairs `s = (n-1) + omega/((n-1) pi)`,
    /// `gamma = pi/2`; far terms are summed in closed form.
    FirstOrder,
    /// First-order pairs plus fitted `d/(n-1)^3` in `s` and `c/(n-1)^2` in
    /// `gamma`. Removes the `O(c/N)` bias the first-order tail leaves in `F`.
    SecondOrder,
}

impl std::str::FromStr for TailMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "truncate" => Ok(Self::Truncate),
            "first-order" => Ok(Self::FirstOrder),
            "second-order" => Ok(Self::SecondOrder),
            _ => Err(format!("unknown tail mode '{s}' (expected truncate, first-order or second-order)")),
        }
    }
}

impl std::fmt::Display for TailMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Truncate => "truncate",
            Self::FirstOrder => "first-order",
            Self::SecondOrder => "second-order",
        })
    }
}

/// `alpha^0_m`: norming constants of the unperturbed problem.
fn alpha0(m: usize) -> f64 {
    if m == 0 {
        PI
    } else {
        PI / 2.0
    }
}

/// `a(u) = sum_{n>=1} [cos(s_n u)/gamma_n - cos((n-1) u)/alpha0_{n-1}]` at `u = k step`,
/// `k = 0..=2M`; every `x +- t` on the grid is such a node.
pub fn series_a(d: &SpectralData, grid: Grid, tail: TailMode) -> Vec<f64> {
    let step = grid.step();
    let nodes = 2 * grid.intervals() + 1;
    let lambdas = d.lambdas();
    let gammas = d.gammas();
    let mut a = vec![0.0; nodes];
    for (k, ak) in a.iter_mut().enumerate() {
        let u = k as f64 * step;
        let mut sum = 0.0;
        for n in 1..lambdas.len() {
            let m = (n - 1) as f64;
            sum += cos_sqrt(lambdas[n], u) / gammas[n] - (m * u).cos() / alpha0(n - 1);
        }
        *ak = sum;
    }
    let omega = d.omega();
    let (root_c, gamma_c) = match tail {
        TailMode::Truncate => return a,
        TailMode::FirstOrder => (0.0, 0.0),
        TailMode::SecondOrder => {
            (estimate_root_curvature(lambdas, omega), estimate_gamma_curvature(gammas))
        }
    };
    if omega == 0.0 && root_c == 0.0 && gamma_c == 0.0 {
        return a;
    }
    // model pairs for m >= N summed exactly up to `cutoff`; beyond it
    // cos(s_m u) ~ cos(m u) - omega u sin(m u)/(m pi) and
    // 1/gamma_m - 2/pi ~ -4 c/(pi^2 m^2)
    let first = lambdas.len() - 1;
    let cutoff = (16 * grid.intervals()).max(8 * first).max(first + 1);
    for (k, ak) in a.iter_mut().enumerate() {
        let u = k as f64 * step;
        let mut sum = 0.0;
        for m in first..cutoff {
            let mf = m as f64;
            let s = mf + omega / (mf * PI) + root_c / (mf * mf * mf);
            let gamma = PI / 2.0 + gamma_c / (mf * mf);
            sum += (s * u).cos() / gamma - (mf * u).cos() / alpha0(1);
        }
        *ak += sum - 2.0 * omega * u / (PI * PI) * sine_tail(u, cutoff)
            - 4.0 * gamma_c / (PI * PI) * cosine_square_tail(u, cutoff);
    }
    a
}

/// `sum_{m >= first} sin(m u)/m` for `u` in `[0, 2 pi]`. At `u = 2 pi` the
/// left limit is taken: `x + t` reaches `2 pi` only from inside the square.
fn sine_tail(u: f64, first: usize) -> f64 {
    let full = if u <= 0.0 { 0.0 } else { 0.5 * (PI - u) };
    let head: f64 = (1..first).map(|m| (m as f64 * u).sin() / m as f64).sum();
    full - head
}

/// `sum_{m >= first} cos(m u)/m^2` for `u` in `[0, 2 pi]`.
fn cosine_square_tail(u: f64, first: usize) -> f64 {
    let full = PI * PI / 6.0 - PI * u / 2.0 + u * u / 4.0;
    let head: f64 = (1..first).map(|m| (m as f64 * u).cos() / (m as f64 * m as f64)).sum();
    full - head
}

/// `F(x,t) = cos(s_0 x) cos(s_0 t)/gamma_0 + (a(x+t) + a(x-t))/2`.
#[allow(non_snake_case)]
pub fn build_F(d: &SpectralData, grid: Grid, tail: TailMode) -> KernelField {
    let a = series_a(d, grid, tail);
    let c0: Vec<f64> = (0..grid.len()).map(|i| cos_sqrt(d.lambdas()[0], grid.x(i))).collect();
    let g0 = d.gammas()[0];
    let rows = (0..grid.len())
        .map(|i| (0..=i).map(|j| c0[i] * c0[j] / g0 + 0.5 * (a[i + j] + a[i - j])).collect())
        .collect();
    KernelField::from_rows(grid, KernelKind::F, rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sine_tail_closed_form() {
        for &u in &[0.3, 1.0, 2.5, 4.0, 6.0] {
            let direct: f64 = (5..200_000).map(|m| (m as f64 * u).sin() / m as f64).sum();
            assert!((sine_tail(u, 5) - direct).abs() < 1e-4, "u = {u}");
        }
        assert_eq!(sine_tail(0.0, 3), 0.0);
    }

    #[test]
    fn packed_storage_is_symmetric_for_f() {
        let g = Grid::new(8).unwrap();
        let f = KernelField::from_fn(g, KernelKind::F, |x, t| x * x + t);
        assert_eq!(f.get(2, 5), f.get(5, 2));
        assert_eq!(f.row(3).len(), 4);
        assert_eq!(f.diagonal()[4], g.x(4) * g.x(4) + g.x(4));
    }
}
