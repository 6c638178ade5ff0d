//! Small dense and banded linear algebra kernels.
//!
//! Everything here is sized for the per-element blocks and 1D global systems
//! the solver builds, so the routines favour simplicity over blocking.

use crate::error::{KineticError, Result};
use crate::scalar::Real;

/// Eigenvalues of the symmetric tridiagonal matrix with diagonal `diag` and
/// off-diagonal `off` (`off[i]` couples rows `i` and `i + 1`), in ascending
/// order. Implicit QL with Wilkinson shifts.
pub fn symmetric_tridiagonal_eigenvalues<T: Real>(diag: &[T], off: &[T]) -> Result<Vec<T>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if off.len() + 1 < n {
        return Err(KineticError::invalid("off-diagonal too short"));
    }
    let mut d = diag.to_vec();
    let mut e: Vec<T> = off.iter().take(n - 1).copied().collect();
    e.push(T::zero());

    let eps = T::epsilon();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(KineticError::Singular(
                    "tridiagonal QL iteration did not converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (T::two() * e[l]);
            let mut r = g.hypot(T::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] = d[i + 1] - p;
                    e[m] = T::zero();
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + T::two() * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            d[l] = d[l] - p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(d)
}

/// Symmetric positive definite matrix stored by its lower band, factorized
/// in place by Cholesky. A bandwidth of `n - 1` gives a dense factorization.
#[derive(Debug, Clone)]
pub struct BandedSpd<T> {
    n: usize,
    bandwidth: usize,
    // band[i * (bw + 1) + (i - j)] = A[i][j] for i - bw <= j <= i
    band: Vec<T>,
    factored: bool,
}

impl<T: Real> BandedSpd<T> {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bandwidth = bandwidth.min(n.saturating_sub(1));
        Self {
            n,
            bandwidth,
            band: vec![T::zero(); n * (bandwidth + 1)],
            factored: false,
        }
    }

    pub fn dense(n: usize) -> Self {
        Self::zeros(n, n.saturating_sub(1))
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        (i - j <= self.bandwidth).then(|| i * (self.bandwidth + 1) + (i - j))
    }

    /// Entry of the (unfactored) matrix; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> T {
        self.slot(i, j).map_or(T::zero(), |s| self.band[s])
    }

    /// Adds `value` to the symmetric pair `(i, j)`, `(j, i)`.
    pub fn add(&mut self, i: usize, j: usize, value: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bandwidth));
        self.band[s] = self.band[s] + value;
    }

    pub fn set(&mut self, i: usize, j: usize, value: T) {
        let s = self
            .slot(i, j)
            .unwrap_or_else(|| panic!("entry ({i}, {j}) outside bandwidth {}", self.bandwidth));
        self.band[s] = value;
    }

    /// Clears row and column `i` and puts `diag` on the diagonal.
    pub fn pin_row(&mut self, i: usize, diag: T) {
        let lo = i.saturating_sub(self.bandwidth);
        let hi = (i + self.bandwidth).min(self.n - 1);
        for j in lo..=hi {
            self.set(i, j, T::zero());
        }
        self.set(i, i, diag);
    }

    /// `y = A x` for the unfactored matrix.
    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        assert!(!self.factored, "mul_vec on a factored matrix");
        let mut y = vec![T::zero(); self.n];
        for i in 0..self.n {
            let lo = i.saturating_sub(self.bandwidth);
            for j in lo..=i {
                let a = self.band[i * (self.bandwidth + 1) + (i - j)];
                y[i] = y[i] + a * x[j];
                if j != i {
                    y[j] = y[j] + a * x[i];
                }
            }
        }
        y
    }

    pub fn factorize(&mut self) -> Result<()> {
        let bw = self.bandwidth;
        let w = bw + 1;
        for j in 0..self.n {
            let lo = j.saturating_sub(bw);
            let mut s = self.band[j * w];
            for k in lo..j {
                let l = self.band[j * w + (j - k)];
                s = s - l * l;
            }
            if !(s > T::zero()) {
                return Err(KineticError::Singular(format!(
                    "non-positive pivot {s:e} at row {j}"
                )));
            }
            let djj = s.sqrt();
            self.band[j * w] = djj;
            let hi = (j + bw).min(self.n - 1);
            for i in (j + 1)..=hi {
                let lo_i = i.saturating_sub(bw).max(lo);
                let mut s = self.band[i * w + (i - j)];
                for k in lo_i..j {
                    s = s - self.band[i * w + (i - k)] * self.band[j * w + (j - k)];
                }
                self.band[i * w + (i - j)] = s / djj;
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` in place; requires [`factorize`](Self::factorize).
    pub fn solve_in_place(&self, b: &mut [T]) {
        assert!(self.factored, "solve before factorize");
        let bw = self.bandwidth;
        let w = bw + 1;
        for i in 0..self.n {
            let lo = i.saturating_sub(bw);
            let mut s = b[i];
            for k in lo..i {
                s = s - self.band[i * w + (i - k)] * b[k];
            }
            b[i] = s / self.band[i * w];
        }
        for i in (0..self.n).rev() {
            let hi = (i + bw).min(self.n - 1);
            let mut s = b[i];
            for k in (i + 1)..=hi {
                s = s - self.band[k * w + (k - i)] * b[k];
            }
            b[i] = s / self.band[i * w];
        }
    }
}

/// Eigenvalues of a small dense symmetric matrix (row-major), cyclic Jacobi.
pub fn symmetric_eigenvalues<T: Real>(a: &[T], n: usize) -> Vec<T> {
    let mut m = a.to_vec();
    for _sweep in 0..100 {
        let mut off = T::zero();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off = off + m[i * n + j] * m[i * n + j];
                }
            }
        }
        let scale: T = (0..n).map(|i| m[i * n + i] * m[i * n + i]).sum();
        if off <= T::epsilon() * T::epsilon() * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (T::two() * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<T> = (0..n).map(|i| m[i * n + i]).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    ev
}

/// Solves the small dense system `A x = b` by Gaussian elimination with
/// partial pivoting. `a` is row-major `n x n`.
pub fn solve_dense<T: Real>(a: &[T], b: &[T], n: usize) -> Result<Vec<T>> {
    let mut m = a.to_vec();
    let mut x = b.to_vec();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                m[i * n + col]
                    .abs()
                    .partial_cmp(&m[j * n + col].abs())
                    .expect("finite matrix")
            })
            .expect("non-empty range");
        if m[piv * n + col] == T::zero() {
            return Err(KineticError::Singular(format!("zero pivot in column {col}")));
        }
        if piv != col {
            for k in 0..n {
                m.swap(piv * n + k, col * n + k);
            }
            x.swap(piv, col);
        }
        let d = m[col * n + col];
        for r in (col + 1)..n {
            let f = m[r * n + col] / d;
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                m[r * n + k] = m[r * n + k] - f * m[col * n + k];
            }
            x[r] = x[r] - f * x[col];
        }
    }
    for r in (0..n).rev() {
        let mut s = x[r];
        for k in (r + 1)..n {
            s = s - m[r * n + k] * x[k];
        }
        x[r] = s / m[r * n + r];
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn tridiagonal_eigenvalues_of_laplacian() {
        // eigenvalues of tridiag(-1, 2, -1) of size n: 2 - 2 cos(k pi / (n + 1))
        let n = 12;
        let d = vec![2.0; n];
        let e = vec![-1.0; n - 1];
        let ev = symmetric_tridiagonal_eigenvalues(&d, &e).unwrap();
        for (k, lam) in ev.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert_relative_eq!(*lam, exact, epsilon = 1e-13);
        }
    }

    #[test]
    fn banded_matches_dense_solve() {
        let n = 9;
        let bw = 2;
        let mut a = BandedSpd::<f64>::zeros(n, bw);
        let mut dense = vec![0.0; n * n];
        for i in 0..n {
            for j in i.saturating_sub(bw)..=i {
                let v = if i == j { 6.0 + i as f64 } else { -1.0 / (1 + i - j) as f64 };
                a.set(i, j, v);
                dense[i * n + j] = v;
                dense[j * n + i] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64).sin() + 0.3).collect();
        let y = a.mul_vec(&b);
        let x_ref = solve_dense(&dense, &y, n).unwrap();
        a.factorize().unwrap();
        let mut x = y.clone();
        a.solve_in_place(&mut x);
        for i in 0..n {
            assert_relative_eq!(x[i], b[i], epsilon = 1e-13);
            assert_relative_eq!(x_ref[i], b[i], epsilon = 1e-13);
        }
    }

    #[test]
    fn factorize_rejects_indefinite() {
        let mut a = BandedSpd::<f64>::dense(2);
        a.set(0, 0, 1.0);
        a.set(1, 1, -1.0);
        assert!(matches!(a.factorize(), Err(KineticError::Singular(_))));
    }

    #[test]
    fn jacobi_eigenvalues() {
        let a = [4.0, 1.0, 0.0, 1.0, 3.0, 1.0, 0.0, 1.0, 2.0];
        let ev = symmetric_eigenvalues(&a, 3);
        let trace: f64 = ev.iter().sum();
        assert_relative_eq!(trace, 9.0, epsilon = 1e-13);
        // det = 4*(6-1) - 1*(2-0) = 18
        assert_relative_eq!(ev[0] * ev[1] * ev[2], 18.0, epsilon = 1e-12);
    }
}
