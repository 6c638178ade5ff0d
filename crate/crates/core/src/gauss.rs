//! Gauss rules for symmetric weights from the three-term recurrence.

use crate::error::Result;
use crate::linalg::symmetric_tridiagonal_eigenvalues;
use crate::scalar::Real;

/// Nodes and weights of the `n`-point Gauss rule for a symmetric weight whose
/// orthonormal polynomials satisfy `x p_k = b_{k+1} p_{k+1} + b_k p_{k-1}`.
///
/// `off(k)` returns `b_k` for `k >= 1`; `total_mass` is the integral of the
/// weight. Nodes are the Jacobi-matrix eigenvalues; weights come from the
/// Christoffel function `w_i = total_mass / sum_k p_k(x_i)^2`, which keeps
/// relative accuracy for the tiny outer weights.
pub(crate) fn symmetric_gauss_rule<T: Real>(
    n: usize,
    off: impl Fn(usize) -> T,
    total_mass: T,
) -> Result<(Vec<T>, Vec<T>)> {
    let diag = vec![T::zero(); n];
    let offd: Vec<T> = (1..n).map(&off).collect();
    let mut nodes = symmetric_tridiagonal_eigenvalues(&diag, &offd)?;

    for i in 0..n / 2 {
        let j = n - 1 - i;
        let a = T::half() * (nodes[j] - nodes[i]);
        nodes[i] = -a;
        nodes[j] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = T::zero();
    }

    let mut weights: Vec<T> = nodes
        .iter()
        .map(|&x| {
            let mut p_prev = T::zero();
            let mut p = T::one();
            let mut sum = T::one();
            for k in 0..n.saturating_sub(1) {
                let b_k = if k == 0 { T::zero() } else { off(k) };
                let next = (x * p - b_k * p_prev) / off(k + 1);
                p_prev = p;
                p = next;
                sum = sum + p * p;
            }
            total_mass / sum
        })
        .collect();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let w = T::half() * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    Ok((nodes, weights))
}

/// Gauss rule for a weight with general orthonormal recurrence
/// `x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}`; nodes ascending.
pub(crate) fn gauss_rule_from_recurrence<T: Real>(
    n: usize,
    diag: impl Fn(usize) -> T,
    off: impl Fn(usize) -> T,
    total_mass: T,
) -> Result<(Vec<T>, Vec<T>)> {
    let d: Vec<T> = (0..n).map(&diag).collect();
    let offd: Vec<T> = (1..n).map(&off).collect();
    let mut nodes = symmetric_tridiagonal_eigenvalues(&d, &offd)?;
    nodes.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let weights = nodes
        .iter()
        .map(|&x| {
            let mut p_prev = T::zero();
            let mut p = T::one();
            let mut sum = T::one();
            for k in 0..n.saturating_sub(1) {
                let b_k = if k == 0 { T::zero() } else { off(k) };
                let next = ((x - diag(k)) * p - b_k * p_prev) / off(k + 1);
                p_prev = p;
                p = next;
                sum = sum + p * p;
            }
            total_mass / sum
        })
        .collect();
    Ok((nodes, weights))
}

/// `n`-point rule for `int_0^inf s^alpha e^{-s} h(s) ds`.
pub(crate) fn generalized_laguerre_rule<T: Real>(n: usize, alpha: T) -> Result<(Vec<T>, Vec<T>)> {
    let mass = T::lit(statrs::function::gamma::gamma(alpha.as_f64() + 1.0));
    gauss_rule_from_recurrence(
        n,
        |k| T::from_usize_lossy(2 * k + 1) + alpha,
        |k| (T::from_usize_lossy(k) * (T::from_usize_lossy(k) + alpha)).sqrt(),
        mass,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laguerre_rule_is_exact_for_polynomials() {
        for alpha in [0.0, 0.5, 1.0] {
            let (s, w) = generalized_laguerre_rule::<f64>(6, alpha).unwrap();
            // int s^(k+alpha) e^-s = Gamma(k + alpha + 1)
            for k in 0..12 {
                let approx: f64 = s.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
                let exact = statrs::function::gamma::gamma(k as f64 + alpha + 1.0);
                assert!((approx - exact).abs() < 1e-12 * exact, "alpha {alpha} k {k}: {approx} vs {exact}");
            }
        }
    }
}
