//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off.len()` must be `diag.len() − 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || off.len() + 1 != diag.len() {
            return Err(Error::Shape { expected: diag.len().saturating_sub(1), actual: off.len() });
        }
        Ok(SymTridiagonal { diag, off })
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    /// Number of eigenvalues strictly below `lambda`: the count of negative
    /// pivots in the LDLᵀ factorization of `A − λI`.
    pub fn sturm_count(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - lambda;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let e2 = self.off[i - 1] * self.off[i - 1];
            let q_prev = if q == 0.0 { f64::EPSILON * e2.sqrt().max(f64::MIN_POSITIVE) } else { q };
            q = self.diag[i] - lambda - e2 / q_prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `k` smallest eigenvalues in ascending order, with the widest final
    /// bisection bracket.
    pub fn lowest_eigenvalues(&self, k: usize) -> Result<(Vec<f64>, f64)> {
        if k == 0 || k > self.len() {
            return Err(Error::Domain(format!("requested {k} eigenvalues of a {}×{} operator", self.len(), self.len())));
        }
        let (lo0, hi0) = self.gershgorin();
        let pad = (hi0 - lo0).abs().max(1.0) * 1e-12;
        let (lo0, hi0) = (lo0 - pad, hi0 + pad);
        let mut values = Vec::with_capacity(k);
        let mut widest: f64 = 0.0;
        let mut lo_start = lo0;
        for idx in 0..k {
            let (mut lo, mut hi) = (lo_start, hi0);
            for _ in 0..256 {
                let mid = 0.5 * (lo + hi);
                if hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) || mid <= lo || mid >= hi {
                    break;
                }
                if self.sturm_count(mid) <= idx {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            widest = widest.max(hi - lo);
            let value = 0.5 * (lo + hi);
            values.push(value);
            // eigenvalue idx+1 is not below eigenvalue idx
            lo_start = lo;
        }
        Ok((values, widest))
    }
}
