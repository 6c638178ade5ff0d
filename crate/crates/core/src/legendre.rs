//! Gauss-Legendre rules and Legendre polynomials on `[-1, 1]`.

use crate::error::{KineticError, Result};
use crate::gauss::symmetric_gauss_rule;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre<T> {
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `n_points`-point rule on `[-1, 1]`, exact up to degree `2 n_points - 1`.
    pub fn new(n_points: usize) -> Result<Self> {
        if n_points == 0 {
            return Err(KineticError::invalid("Gauss-Legendre rule needs at least one point"));
        }
        let (nodes, weights) = symmetric_gauss_rule(
            n_points,
            |k| {
                let k = T::from_usize_lossy(k);
                k / (T::lit(4.0) * k * k - T::one()).sqrt()
            },
            T::two(),
        )?;
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Values `P_0(x) .. P_n(x)` and derivatives of the classical Legendre
/// polynomials.
pub fn legendre_with_derivatives<T: Real>(n: usize, x: T) -> (Vec<T>, Vec<T>) {
    let mut p = vec![T::zero(); n + 1];
    let mut dp = vec![T::zero(); n + 1];
    p[0] = T::one();
    if n >= 1 {
        p[1] = x;
        dp[1] = T::one();
    }
    for k in 1..n {
        let kf = T::from_usize_lossy(k);
        let two_k1 = T::two() * kf + T::one();
        p[k + 1] = (two_k1 * x * p[k] - kf * p[k - 1]) / (kf + T::one());
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k
        dp[k + 1] = dp[k - 1] + two_k1 * p[k];
    }
    (p, dp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exactness() {
        for n in 1..10 {
            let r = GaussLegendre::<f64>::new(n).unwrap();
            for k in 0..(2 * n) {
                let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                assert_relative_eq!(q, exact, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn legendre_values() {
        let (p, dp) = legendre_with_derivatives(3, 0.3f64);
        assert_relative_eq!(p[2], 0.5 * (3.0 * 0.09 - 1.0), epsilon = 1e-15);
        assert_relative_eq!(p[3], 0.5 * (5.0 * 0.027 - 3.0 * 0.3), epsilon = 1e-15);
        assert_relative_eq!(dp[3], 0.5 * (15.0 * 0.09 - 3.0), epsilon = 1e-15);
    }
}
