use crate::error::{Error, Result};

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("matrix must be square".into()));
        }
        Ok(Self { n, data: rows.concat() })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

#[derive(Debug, Clone)]
pub struct DenseSolution {
    pub x: Vec<f64>,
    /// Smallest pivot magnitude met during elimination.
    pub min_pivot: f64,
}

/// LU with partial pivoting. Fails with [`Error::Conditioning`] when a pivot
/// falls below `pivot_floor`.
pub fn solve_dense(a: Matrix, b: &[f64], pivot_floor: f64) -> Result<DenseSolution> {
    let n = a.n;
    if b.len() != n {
        return Err(Error::InvalidInput(format!("rhs length {} does not match matrix size {n}", b.len())));
    }
    let mut m = a.data;
    let mut x = b.to_vec();
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, m[i * n + k].abs()))
            .fold((k, -1.0), |acc, v| if v.1 > acc.1 { v } else { acc });
        min_pivot = min_pivot.min(pmax);
        if !(pmax > pivot_floor) {
            return Err(Error::Conditioning { min_pivot: pmax });
        }
        if p != k {
            for j in 0..n {
                m.swap(k * n + j, p * n + j);
            }
            x.swap(k, p);
        }
        let pivot = m[k * n + k];
        let (upper, lower) = m.split_at_mut((k + 1) * n);
        let row_k = &upper[k * n..(k + 1) * n];
        for i in (k + 1)..n {
            let row_i = &mut lower[(i - k - 1) * n..(i - k) * n];
            let factor = row_i[k] / pivot;
            if factor != 0.0 {
                for j in (k + 1)..n {
                    row_i[j] -= factor * row_k[j];
                }
                x[i] -= factor * x[k];
            }
            row_i[k] = 0.0;
        }
    }
    for k in (0..n).rev() {
        let mut acc = x[k];
        for j in (k + 1)..n {
            acc -= m[k * n + j] * x[j];
        }
        x[k] = acc / m[k * n + k];
    }
    if n == 0 {
        min_pivot = 0.0;
    }
    Ok(DenseSolution { x, min_pivot })
}

/// Cholesky factor `G = L L^T` of a symmetric positive definite matrix. The
/// leading `n x n` block of `L` factors the leading block of `G`, so one
/// factorisation serves every nested system.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    l: Vec<f64>,
    /// Smallest `L_jj^2`, the pivot of unpivoted elimination.
    pub min_pivot: f64,
}

impl Cholesky {
    /// Fails with [`Error::Conditioning`] when a pivot falls below `pivot_floor`
    /// (which includes matrices that are not positive definite).
    pub fn factor(a: &Matrix, pivot_floor: f64) -> Result<Self> {
        let n = a.n;
        let mut l = vec![0.0; n * n];
        let mut min_pivot = f64::INFINITY;
        for j in 0..n {
            let (done, rest) = l.split_at_mut(j * n);
            let row_j = &mut rest[..n];
            for k in 0..j {
                let row_k = &done[k * n..k * n + k];
                let dot: f64 = row_k.iter().zip(&row_j[..k]).map(|(a, b)| a * b).sum();
                row_j[k] = (a.data[j * n + k] - dot) / done[k * n + k];
            }
            let d = a.data[j * n + j] - row_j[..j].iter().map(|v| v * v).sum::<f64>();
            min_pivot = min_pivot.min(d);
            if !(d > pivot_floor) {
                return Err(Error::Conditioning { min_pivot: d });
            }
            row_j[j] = d.sqrt();
        }
        Ok(Self { n, l, min_pivot })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `L_jj^2` for `j < n`.
    pub fn pivot(&self, j: usize) -> f64 {
        let d = self.l[j * self.n + j];
        d * d
    }

    /// Solves `G_n x = b` with `G_n` the leading block of size `n = b.len()`.
    pub fn solve_leading(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        assert!(n <= self.n, "block of size {n} exceeds factor of size {}", self.n);
        let mut x = b.to_vec();
        for i in 0..n {
            let row = &self.l[i * self.n..i * self.n + i];
            let dot: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
            x[i] = (x[i] - dot) / self.l[i * self.n + i];
        }
        for i in (0..n).rev() {
            x[i] /= self.l[i * self.n + i];
            let xi = x[i];
            for (k, xk) in x[..i].iter_mut().enumerate() {
                *xk -= self.l[i * self.n + k] * xi;
            }
        }
        x
    }
}

/// Weighted least squares `min sum w_i (y_i - sum_j c_j basis_j(i))^2` via the
/// normal equations; `design[i]` holds the basis values for sample `i`.
pub fn weighted_least_squares(design: &[Vec<f64>], y: &[f64], w: &[f64]) -> Result<Vec<f64>> {
    let p = design.first().map(|r| r.len()).unwrap_or(0);
    if p == 0 || design.len() < p {
        return Err(Error::InvalidInput(format!(
            "least squares needs at least {p} samples, got {}",
            design.len()
        )));
    }
    let mut normal = Matrix::zeros(p);
    let mut rhs = vec![0.0; p];
    for ((row, &yi), &wi) in design.iter().zip(y).zip(w) {
        for a in 0..p {
            rhs[a] += wi * row[a] * yi;
            for b in 0..p {
                normal[(a, b)] += wi * row[a] * row[b];
            }
        }
    }
    Ok(solve_dense(normal, &rhs, 0.0)?.x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_returns_rhs() {
        let b = vec![1.0, -2.0, 3.5];
        let s = solve_dense(Matrix::identity(3), &b, 1e-12).unwrap();
        assert_eq!(s.x, b);
        assert_eq!(s.min_pivot, 1.0);
    }

    #[test]
    fn one_by_one() {
        let s = solve_dense(Matrix::from_rows(&[vec![2.0]]).unwrap(), &[4.0], 1e-12).unwrap();
        assert_eq!(s.x, vec![2.0]);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        match solve_dense(a, &[1.0, 1.0], 1e-10) {
            Err(Error::Conditioning { min_pivot }) => assert!(min_pivot < 1e-10),
            other => panic!("expected conditioning error, got {other:?}"),
        }
    }

    #[test]
    fn residual_is_small() {
        let n = 30;
        let mut a = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = 1.0 / (1.0 + (i as f64 - j as f64).abs()) + if i == j { 2.0 } else { 0.0 };
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let s = solve_dense(a.clone(), &b, 1e-12).unwrap();
        let r = a.mul_vec(&s.x);
        let norm_b = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        let res = r.iter().zip(&b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!(res <= 1e-10 * norm_b);
    }

    #[test]
    fn least_squares_recovers_line() {
        let design: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 1.0]).collect();
        let y: Vec<f64> = (0..10).map(|i| 0.25 - i as f64).collect();
        let c = weighted_least_squares(&design, &y, &[1.0; 10]).unwrap();
        assert!((c[0] + 1.0).abs() < 1e-12 && (c[1] - 0.25).abs() < 1e-12);
    }
}
