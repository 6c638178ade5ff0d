use crate::error::{KineticError, Result};
use crate::legendre::GaussLegendre;
use crate::scalar::Real;

/// Quadrature on the unit sphere.
#[derive(Debug, Clone)]
pub struct SphereRule<T> {
    pub degree: usize,
    pub directions: Vec<[T; 3]>,
    pub weights: Vec<T>,
}

impl<T: Real> SphereRule<T> {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn([T; 3]) -> T) -> T {
        self.directions.iter().zip(&self.weights).map(|(&e, &w)| w * f(e)).sum()
    }
}

/// Gauss-Legendre in `cos(theta)` times the trapezoid rule in `phi`; exact
/// for spherical harmonics up to `degree`.
pub fn sphere_quadrature<T: Real>(degree: usize) -> Result<SphereRule<T>> {
    if degree == 0 {
        return Err(KineticError::invalid("sphere rule degree must be at least 1"));
    }
    let gl = GaussLegendre::<T>::new((degree + 2) / 2)?;
    let n_phi = degree + 1;
    let dphi = T::two() * T::PI() / T::from_usize_lossy(n_phi);
    let mut directions = Vec::with_capacity(gl.len() * n_phi);
    let mut weights = Vec::with_capacity(gl.len() * n_phi);
    for (&z, &wz) in gl.nodes.iter().zip(&gl.weights) {
        let s = (T::one() - z * z).max(T::zero()).sqrt();
        for k in 0..n_phi {
            let phi = T::from_usize_lossy(k) * dphi;
            directions.push([s * phi.cos(), s * phi.sin(), z]);
            weights.push(wz * dphi);
        }
    }
    Ok(SphereRule {
        degree,
        directions,
        weights,
    })
}

/// Pre-collision pair `(v', w')` for a post-collision pair `(v, w)` and a
/// scattering direction `e`.
pub fn precollision_velocities<T: Real>(v: [T; 3], w: [T; 3], e: [T; 3]) -> ([T; 3], [T; 3]) {
    let g = ((v[0] - w[0]).powi(2) + (v[1] - w[1]).powi(2) + (v[2] - w[2]).powi(2)).sqrt();
    let half_g = T::half() * g;
    let mut vp = [T::zero(); 3];
    let mut wp = [T::zero(); 3];
    for d in 0..3 {
        let mean = T::half() * (v[d] + w[d]);
        vp[d] = mean + e[d] * half_g;
        wp[d] = mean - e[d] * half_g;
    }
    (vp, wp)
}
