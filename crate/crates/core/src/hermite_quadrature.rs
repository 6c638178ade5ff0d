//! Gauss-Hermite quadrature (weight `exp(-v^2)`) and its 3D tensor product.

use std::any::{Any, TypeId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{KineticError, Result};
use crate::gauss::symmetric_gauss_rule;
use crate::scalar::Real;

/// One-dimensional Gauss-Hermite rule with `order + 1` points.
#[derive(Debug, Clone, PartialEq)]
pub struct Quad1D<T> {
    pub order: usize,
    pub nodes: Vec<T>,
    pub weights: Vec<T>,
}

impl<T: Real> Quad1D<T> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `sum_i w_i f(v_i)`, approximating `int exp(-v^2) f(v) dv`.
    pub fn integrate(&self, f: impl Fn(T) -> T) -> T {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&v, &w)| w * f(v))
            .sum()
    }
}

/// Cartesian product of a [`Quad1D`] with itself in three directions.
///
/// Point `(i, j, k)` lives at flat index `(N+1)^2 i + (N+1) j + k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quad3D<T> {
    pub base: Quad1D<T>,
    pub nodes3: Vec<[T; 3]>,
    pub weights3: Vec<T>,
}

impl<T: Real> Quad3D<T> {
    pub fn len(&self) -> usize {
        self.weights3.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights3.is_empty()
    }

    /// Points per direction, `N + 1`.
    pub fn points_per_dim(&self) -> usize {
        self.base.len()
    }

    #[inline]
    pub fn flat_index(&self, i: usize, j: usize, k: usize) -> usize {
        let n = self.points_per_dim();
        n * n * i + n * j + k
    }

    #[inline]
    pub fn split_index(&self, ip: usize) -> (usize, usize, usize) {
        let n = self.points_per_dim();
        (ip / (n * n), (ip / n) % n, ip % n)
    }

    pub fn integrate(&self, f: impl Fn([T; 3]) -> T) -> T {
        self.nodes3
            .iter()
            .zip(&self.weights3)
            .map(|(&v, &w)| w * f(v))
            .sum()
    }
}

/// Gauss-Hermite rule with `n_points` nodes, exact for polynomials of
/// degree `2 n_points - 1` against `exp(-v^2)`.
pub fn gauss_hermite_rule<T: Real>(n_points: usize) -> Result<Quad1D<T>> {
    if n_points == 0 {
        return Err(KineticError::invalid("Gauss-Hermite rule needs at least one point"));
    }
    // orthonormal Hermite: x p_k = sqrt((k+1)/2) p_{k+1} + sqrt(k/2) p_{k-1}
    let (nodes, weights) = symmetric_gauss_rule(
        n_points,
        |k| (T::from_usize_lossy(k) * T::half()).sqrt(),
        T::PI().sqrt(),
    )?;
    Ok(Quad1D {
        order: n_points - 1,
        nodes,
        weights,
    })
}

pub fn tensor_rule_3d<T: Real>(rule: &Quad1D<T>) -> Quad3D<T> {
    let n = rule.len();
    let mut nodes3 = Vec::with_capacity(n * n * n);
    let mut weights3 = Vec::with_capacity(n * n * n);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                nodes3.push([rule.nodes[i], rule.nodes[j], rule.nodes[k]]);
                weights3.push(rule.weights[i] * rule.weights[j] * rule.weights[k]);
            }
        }
    }
    Quad3D {
        base: rule.clone(),
        nodes3,
        weights3,
    }
}

type RuleCache = Mutex<HashMap<(TypeId, usize), Arc<dyn Any + Send + Sync>>>;

/// Process-wide cache of Gauss-Hermite rules, keyed by scalar type and size.
pub fn cached_hermite_rule<T: Real>(n_points: usize) -> Result<Arc<Quad1D<T>>> {
    static CACHE: OnceLock<RuleCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (TypeId::of::<T>(), n_points);
    if let Some(hit) = cache.lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(hit)
            .downcast::<Quad1D<T>>()
            .expect("cache entry type matches key"));
    }
    let rule = Arc::new(gauss_hermite_rule::<T>(n_points)?);
    cache
        .lock()
        .expect("rule cache poisoned")
        .insert(key, rule.clone() as Arc<dyn Any + Send + Sync>);
    Ok(rule)
}

/// `int exp(-v^2) v^k dv`: zero for odd `k`, `(k-1)!! sqrt(pi) / 2^(k/2)` otherwise.
pub fn gaussian_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        return 0.0;
    }
    let mut m = std::f64::consts::PI.sqrt();
    let mut j = 1;
    while j < k {
        m *= j as f64 / 2.0;
        j += 2;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn zero_points_is_an_error() {
        assert!(gauss_hermite_rule::<f64>(0).is_err());
    }

    #[test]
    fn single_point_rule() {
        let r = gauss_hermite_rule::<f64>(1).unwrap();
        assert_eq!(r.nodes, vec![0.0]);
        assert_relative_eq!(r.weights[0], PI.sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.weights[0], 1.7724538509, epsilon = 1e-10);
    }

    #[test]
    fn two_point_rule() {
        let r = gauss_hermite_rule::<f64>(2).unwrap();
        let s = 0.5f64.sqrt();
        assert_relative_eq!(r.nodes[0], -s, epsilon = 1e-15);
        assert_relative_eq!(r.nodes[1], s, epsilon = 1e-15);
        for w in &r.weights {
            assert_relative_eq!(*w, PI.sqrt() / 2.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn second_moment() {
        for n in 2..12 {
            let r = gauss_hermite_rule::<f64>(n).unwrap();
            assert_relative_eq!(r.integrate(|v| v * v), PI.sqrt() / 2.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn symmetry_and_positivity() {
        for n in 1..=21 {
            let r = gauss_hermite_rule::<f64>(n).unwrap();
            for i in 0..n {
                assert!(r.weights[i] > 0.0);
                assert_eq!(r.nodes[i], -r.nodes[n - 1 - i]);
                if i + 1 < n {
                    assert!(r.nodes[i] < r.nodes[i + 1]);
                }
            }
            let total: f64 = r.weights.iter().sum();
            assert_relative_eq!(total, PI.sqrt(), epsilon = 1e-13);
        }
    }

    #[test]
    fn tensor_indexing() {
        let r = gauss_hermite_rule::<f64>(2).unwrap();
        let q = tensor_rule_3d(&r);
        assert_eq!(q.flat_index(1, 0, 1), 5);
        assert_eq!(q.split_index(5), (1, 0, 1));
        assert_eq!(q.nodes3[5], [r.nodes[1], r.nodes[0], r.nodes[1]]);
        assert_relative_eq!(q.weights3[5], r.weights[1] * r.weights[0] * r.weights[1]);
    }

    #[test]
    fn tensor_single_point() {
        let q = tensor_rule_3d(&gauss_hermite_rule::<f64>(1).unwrap());
        assert_eq!(q.nodes3, vec![[0.0; 3]]);
        assert_relative_eq!(q.weights3[0], PI.powf(1.5), epsilon = 1e-14);
    }

    #[test]
    fn tensor_second_moment() {
        for n in 2..6 {
            let q = tensor_rule_3d(&gauss_hermite_rule::<f64>(n).unwrap());
            let m = q.integrate(|v| v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            assert_relative_eq!(m, 1.5 * PI.powf(1.5), epsilon = 1e-13);
            let total: f64 = q.weights3.iter().sum();
            assert_relative_eq!(total, PI.powf(1.5), epsilon = 1e-12);
        }
    }

    #[test]
    fn cache_returns_same_rule() {
        let a = cached_hermite_rule::<f64>(7).unwrap();
        let b = cached_hermite_rule::<f64>(7).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let c = cached_hermite_rule::<f32>(7).unwrap();
        assert_eq!(c.len(), 7);
    }

    #[test]
    fn single_precision_rule() {
        let r = gauss_hermite_rule::<f32>(5).unwrap();
        let total: f32 = r.weights.iter().sum();
        assert!((total - PI.sqrt() as f32).abs() < 1e-5);
    }
}
