/// Not-a-knot cubic spline through samples on a uniform grid starting at `x0`.
#[derive(Debug, Clone)]
pub struct CubicSpline {
    x0: f64,
    step: f64,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    /// Needs at least three samples. With exactly three the spline is the
    /// interpolating parabola.
    pub fn new(x0: f64, step: f64, values: &[f64]) -> Self {
        let n = values.len();
        assert!(n >= 3, "spline needs at least 3 samples");
        let h2 = step * step;
        let d = |i: usize| (values[i - 1] - 2.0 * values[i] + values[i + 1]) / h2;

        let mut m = vec![0.0; n];
        if n == 3 {
            let c = d(1);
            m.iter_mut().for_each(|v| *v = c);
        } else {
            // Not-a-knot on a uniform grid pins the second derivative at the
            // nodes adjacent to each end.
            m[1] = d(1);
            m[n - 2] = d(n - 2);
            if n > 4 {
                // M_{i-1} + 4 M_i + M_{i+1} = 6 d_i for i = 2..=n-3.
                let lo = 2;
                let hi = n - 3;
                let len = hi + 1 - lo;
                let mut diag = vec![4.0; len];
                let mut rhs: Vec<f64> = (lo..=hi).map(|i| 6.0 * d(i)).collect();
                rhs[0] -= m[1];
                rhs[len - 1] -= m[n - 2];
                for k in 1..len {
                    let f = 1.0 / diag[k - 1];
                    diag[k] -= f;
                    rhs[k] -= f * rhs[k - 1];
                }
                let mut sol = vec![0.0; len];
                sol[len - 1] = rhs[len - 1] / diag[len - 1];
                for k in (0..len - 1).rev() {
                    sol[k] = (rhs[k] - sol[k + 1]) / diag[k];
                }
                m[lo..=hi].copy_from_slice(&sol);
            }
            m[0] = 2.0 * m[1] - m[2];
            m[n - 1] = 2.0 * m[n - 2] - m[n - 3];
        }
        Self {
            x0,
            step,
            values: values.to_vec(),
            second: m,
        }
    }

    #[inline]
    fn locate(&self, x: f64) -> (usize, f64) {
        let n = self.values.len();
        let u = (x - self.x0) / self.step;
        let i = (u.floor().max(0.0) as usize).min(n - 2);
        (i, x - (self.x0 + i as f64 * self.step))
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        y0 + t * (b + t * (0.5 * m0 + t * (m1 - m0) / (6.0 * h)))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let (i, t) = self.locate(x);
        let h = self.step;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        let b = (y1 - y0) / h - h * (2.0 * m0 + m1) / 6.0;
        b + t * (m0 + t * (m1 - m0) / (2.0 * h))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}
