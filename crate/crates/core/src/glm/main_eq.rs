use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{solve_dense, Cholesky, Matrix};

use super::kernel::{KernelField, KernelKind};

/// Pivot magnitude below which the collocation matrix counts as singular.
pub const PIVOT_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct KernelRow {
    /// `K(x_i, t_j)` for `j = 0..=i`.
    pub values: Vec<f64>,
    /// `max_j |F(x,t_j) + K(x,t_j) + sum_l w_l K(x,t_l) F(t_l,t_j)|`.
    pub residual: f64,
    pub min_pivot: f64,
}

/// Trapezoid collocation of `F(x,t) + K(x,t) + int_0^x K(x,s) F(s,t) ds = 0`
/// at `x = x_i`, `t = t_0..t_i`.
pub fn solve_main_equation(f: &KernelField, i: usize) -> Result<KernelRow> {
    assert_eq!(f.kind(), KernelKind::F);
    let grid = f.grid();
    if i >= grid.len() {
        return Err(Error::InvalidInput(format!("row {i} outside grid of {} nodes", grid.len())));
    }
    let w = grid.trapezoid_weights(i);
    let n = i + 1;
    let mut a = Matrix::zeros(n);
    for j in 0..n {
        for l in 0..n {
            a[(j, l)] = w[l] * f.get(l, j);
        }
        a[(j, j)] += 1.0;
    }
    let rhs: Vec<f64> = (0..n).map(|j| -f.get(i, j)).collect();
    let sol = solve_dense(a, &rhs, PIVOT_FLOOR)?;
    let k = sol.x;
    let residual = row_residual(f, i, &k, &w);
    Ok(KernelRow { values: k, residual, min_pivot: sol.min_pivot })
}

fn row_residual(f: &KernelField, i: usize, k: &[f64], w: &[f64]) -> f64 {
    let n = i + 1;
    (0..n)
        .map(|j| {
            let integral: f64 = (0..n).map(|l| w[l] * k[l] * f.get(l, j)).sum();
            (f.get(i, j) + k[j] + integral).abs()
        })
        .fold(0.0, f64::max)
}

/// Factor shared by all rows: `G = I + W^{1/2} F W^{1/2}` with the weights of
/// the full trapezoid rule (`h/2` at `t_0`, `h` elsewhere). Row `i` is the
/// leading block of `G` up to a rank-one change for the half weight at `t_i`.
#[derive(Debug, Clone)]
pub struct NestedSolver<'a> {
    f: &'a KernelField,
    sqrt_w: Vec<f64>,
    chol: Cholesky,
}

impl<'a> NestedSolver<'a> {
    pub fn new(f: &'a KernelField) -> Result<Self> {
        assert_eq!(f.kind(), KernelKind::F);
        let grid = f.grid();
        let n = grid.len();
        let h = grid.step();
        let sqrt_w: Vec<f64> = (0..n).map(|l| if l == 0 { (0.5 * h).sqrt() } else { h.sqrt() }).collect();
        let mut g = Matrix::zeros(n);
        for j in 0..n {
            for l in 0..n {
                g[(j, l)] = sqrt_w[j] * f.get(j, l) * sqrt_w[l];
            }
            g[(j, j)] += 1.0;
        }
        let chol = Cholesky::factor(&g, PIVOT_FLOOR)?;
        Ok(Self { f, sqrt_w, chol })
    }

    /// `A^{-1} b` with `A = I + F W` on the leading `b.len()` nodes.
    fn solve_full_weight(&self, b: &[f64]) -> Vec<f64> {
        let scaled: Vec<f64> = b.iter().zip(&self.sqrt_w).map(|(v, s)| v * s).collect();
        let y = self.chol.solve_leading(&scaled);
        y.iter().zip(&self.sqrt_w).map(|(v, s)| v / s).collect()
    }

    /// Same collocation as [`solve_main_equation`]; `min_pivot` is the smallest
    /// Cholesky pivot of the block together with the rank-one denominator.
    pub fn solve_row(&self, i: usize) -> Result<KernelRow> {
        let f = self.f;
        let grid = f.grid();
        if i >= grid.len() {
            return Err(Error::InvalidInput(format!("row {i} outside grid of {} nodes", grid.len())));
        }
        let w = grid.trapezoid_weights(i);
        let n = i + 1;
        let block_pivot = (0..n).map(|j| self.chol.pivot(j)).fold(f64::INFINITY, f64::min);
        let (values, min_pivot) = if i == 0 {
            (vec![-f.get(0, 0)], block_pivot)
        } else {
            // (A - c e_i^T) k = b with c = (h/2) F(., t_i): Sherman-Morrison.
            let b: Vec<f64> = (0..n).map(|j| -f.get(i, j)).collect();
            let half = 0.5 * grid.step();
            let c: Vec<f64> = (0..n).map(|j| half * f.get(j, i)).collect();
            let y = self.solve_full_weight(&b);
            let z = self.solve_full_weight(&c);
            let denom = 1.0 - z[i];
            if !(denom.abs() > PIVOT_FLOOR) {
                return Err(Error::Conditioning { min_pivot: denom.abs() });
            }
            let t = y[i] / denom;
            (y.iter().zip(&z).map(|(a, b)| a + t * b).collect(), block_pivot.min(denom.abs()))
        };
        let residual = row_residual(f, i, &values, &w);
        Ok(KernelRow { values, residual, min_pivot })
    }
}

#[derive(Debug, Clone)]
pub struct MainEquationSolution {
    pub kernel: KernelField,
    pub residuals: Vec<f64>,
    pub min_pivots: Vec<f64>,
}

impl MainEquationSolution {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().cloned().fold(0.0, f64::max)
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivots.iter().cloned().fold(f64::INFINITY, f64::min)
    }
}

/// All rows in parallel. Uses the shared factorisation when `G` is positive
/// definite, otherwise one pivoted dense solve per row.
pub fn solve_all(f: &KernelField) -> Result<MainEquationSolution> {
    let rows: Vec<KernelRow> = match NestedSolver::new(f) {
        Ok(nested) => (0..f.grid().len()).into_par_iter().map(|i| nested.solve_row(i)).collect::<Result<_>>()?,
        Err(_) => (0..f.grid().len()).into_par_iter().map(|i| solve_main_equation(f, i)).collect::<Result<_>>()?,
    };
    let residuals = rows.iter().map(|r| r.residual).collect();
    let min_pivots = rows.iter().map(|r| r.min_pivot).collect();
    let kernel = KernelField::from_rows(f.grid(), KernelKind::K, rows.into_iter().map(|r| r.values).collect());
    Ok(MainEquationSolution { kernel, residuals, min_pivots })
}
