//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use crate::error::{Error, Result};

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    /// Off-diagonal entries, `diag.len() - 1` of them.
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::InvalidParameter(format!(
                "tridiagonal with {} diagonal and {} off-diagonal entries",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(off.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("non-finite tridiagonal entry".into()));
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = if i == 0 {
                self.diag[0] - x
            } else {
                self.diag[i] - x - coupling / q
            };
            if q == 0.0 {
                q = -f64::EPSILON * (self.diag[i].abs() + x.abs() + f64::MIN_POSITIVE);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        let pad = 1e-12 * (lo.abs().max(hi.abs()).max(1.0));
        (lo - pad, hi + pad)
    }

    /// The `k`-th smallest eigenvalue (zero-based).
    pub fn eigenvalue(&self, k: usize) -> Result<f64> {
        if k >= self.len() {
            return Err(Error::InvalidParameter(format!(
                "eigenvalue index {k} out of range for dimension {}",
                self.len()
            )));
        }
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..256 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// The `count` smallest eigenvalues, ascending.
    pub fn lowest(&self, count: usize) -> Result<Vec<f64>> {
        if count > self.len() {
            return Err(Error::InvalidParameter(format!(
                "requested {count} eigenvalues from a {}-dimensional operator",
                self.len()
            )));
        }
        (0..count).map(|k| self.eigenvalue(k)).collect()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        self.lowest(self.len())
    }

    /// Eigenvector for an eigenvalue estimate by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let shift = lambda
            + 1e3 * f64::EPSILON * (lambda.abs().max(1.0))
                * (self.diag.iter().fold(1.0_f64, |m, d| m.max(d.abs())));
        let mut v = vec![1.0; n];
        for _ in 0..4 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 || !norm.is_finite() {
                break;
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }

    /// Solves `(T - shift I) x = rhs` with the Thomas algorithm.
    fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut cp = vec![0.0; n];
        let mut dp = vec![0.0; n];
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut denom = self.diag[0] - shift;
        if denom == 0.0 {
            denom = tiny;
        }
        if n > 1 {
            cp[0] = self.off[0] / denom;
        }
        dp[0] = rhs[0] / denom;
        for i in 1..n {
            let mut denom = self.diag[i] - shift - self.off[i - 1] * cp[i - 1];
            if denom == 0.0 {
                denom = tiny;
            }
            if i + 1 < n {
                cp[i] = self.off[i] / denom;
            }
            dp[i] = (rhs[i] - self.off[i - 1] * dp[i - 1]) / denom;
        }
        let mut x = vec![0.0; n];
        x[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = dp[i] - cp[i] * x[i + 1];
        }
        x
    }
}
