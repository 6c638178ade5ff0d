//! Collision operators acting on one velocity vector.
//!
//! Every operator returns a test-space vector `Q_m = int Q(f) L_m dv`
//! (`L_m` the Lagrange polynomials on the velocity nodes).

mod boltzmann;
mod sphere;

use std::sync::Arc;

pub use boltzmann::{apply_boltzmann_weak, BoltzmannOperator, CollisionKernel, CollisionParts, CollisionQuadrature};
pub use sphere::{precollision_velocities, sphere_quadrature, SphereRule};

use crate::error::{KineticError, Result};
use crate::frame_transform::collision_scaling;
use crate::linalg::solve_dense;
use crate::scalar::Real;
use crate::velocity_space::{maxwellian_nodal_into, moments, norm2, VelocityBasis, VelocityVector};

/// `{1, v1, v2, v3, |v|^2}` at a velocity.
#[inline]
pub fn collision_invariants<T: Real>(v: [T; 3]) -> [T; 5] {
    [T::one(), v[0], v[1], v[2], norm2(v)]
}

/// `int Q psi dv` for the collision invariants `psi`; exact for a
/// test-space vector because the invariants are interpolated exactly
/// (`N >= 2`).
pub fn tested_moments<T: Real>(q: &[T], basis: &VelocityBasis<T>) -> [T; 5] {
    let mut out = [T::zero(); 5];
    for (ip, &qm) in q.iter().enumerate() {
        let psi = collision_invariants(basis.node(ip));
        for k in 0..5 {
            out[k] = out[k] + qm * psi[k];
        }
    }
    out
}

/// Removes the `M^v`-orthogonal projection of `Q` onto the collision
/// invariants. Returns the size of the removed part (max-norm).
pub fn conservation_fix<T: Real>(q: &mut [T], basis: &VelocityBasis<T>) -> Result<T> {
    if basis.order() < 2 {
        return Err(KineticError::invalid("conservation fix requires velocity order N >= 2"));
    }
    let rhs = tested_moments(q, basis);
    let mut gram = [T::zero(); 25];
    for ip in 0..basis.ndof() {
        let psi = collision_invariants(basis.node(ip));
        let w = basis.weight(ip);
        for a in 0..5 {
            for b in 0..5 {
                gram[a * 5 + b] = gram[a * 5 + b] + w * psi[a] * psi[b];
            }
        }
    }
    let alpha = solve_dense(&gram, &rhs, 5)?;
    let mut size = T::zero();
    for (ip, qm) in q.iter_mut().enumerate() {
        let psi = collision_invariants(basis.node(ip));
        let c = basis.weight(ip) * (0..5).map(|k| alpha[k] * psi[k]).sum::<T>();
        *qm = *qm - c;
        size = size.max(c.abs());
    }
    Ok(size)
}

/// BGK relaxation `(1/kn) M^v (m - g)` toward the nodal Maxwellian with the
/// moments of `f`.
pub fn apply_bgk<T: Real>(f: &VelocityVector<T>, basis: &VelocityBasis<T>, knudsen: T) -> Result<Vec<T>> {
    let m = moments(f, basis)?;
    if !(m.rho > T::zero()) || !(m.temperature > T::zero()) {
        return Err(KineticError::Degenerate(format!(
            "BGK needs positive density and temperature, got rho = {:e}, T = {:e}",
            m.rho, m.temperature
        )));
    }
    let mut out = vec![T::zero(); basis.ndof()];
    maxwellian_nodal_into(m.rho, m.velocity, m.temperature, basis, &mut out);
    let inv = T::one() / knudsen;
    for (ip, (o, &g)) in out.iter_mut().zip(&f.coeffs).enumerate() {
        *o = inv * basis.weight(ip) * (*o - g);
    }
    Ok(out)
}

/// Collision term of the transport equation, `Q / kn`.
#[derive(Debug, Clone)]
pub enum CollisionModel<T> {
    Off,
    Bgk {
        knudsen: T,
    },
    Boltzmann {
        operator: Arc<BoltzmannOperator<T>>,
        knudsen: T,
    },
}

impl<T: Real> CollisionModel<T> {
    pub fn is_off(&self) -> bool {
        matches!(self, Self::Off)
    }

    /// Weak collision term for a standardized velocity vector in a frame of
    /// temperature `frame_temperature`, including the frame factor and
    /// `1/kn`. With `fix` the invariant component is removed; the returned
    /// scalar is the size of that correction.
    pub fn apply_in_frame(
        &self,
        g: &[T],
        basis: &VelocityBasis<T>,
        frame_temperature: T,
        fix: bool,
    ) -> Result<(Vec<T>, T)> {
        let mut q = match self {
            Self::Off => return Ok((vec![T::zero(); g.len()], T::zero())),
            Self::Bgk { knudsen } => {
                let f = VelocityVector::new(g.to_vec());
                let mut q = apply_bgk(&f, basis, *knudsen)?;
                let s = frame_temperature.pow_three_halves();
                q.iter_mut().for_each(|x| *x = *x * s);
                q
            }
            Self::Boltzmann { operator, knudsen } => {
                let s = collision_scaling(frame_temperature, operator.kernel().beta) / *knudsen;
                let mut q = operator.apply(g);
                q.iter_mut().for_each(|x| *x = *x * s);
                q
            }
        };
        let fixed = if fix && basis.order() >= 2 {
            conservation_fix(&mut q, basis)?
        } else {
            T::zero()
        };
        Ok((q, fixed))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::velocity_space::project_maxwellian;
    use approx::assert_relative_eq;

    #[test]
    fn fix_leaves_invariant_free_input() {
        let b = VelocityBasis::<f64>::new(3).unwrap();
        let mut q: Vec<f64> = (0..b.ndof()).map(|i| ((i * 13 % 7) as f64 - 3.0) * 0.1).collect();
        conservation_fix(&mut q, &b).unwrap();
        let before = q.clone();
        let size = conservation_fix(&mut q, &b).unwrap();
        assert!(size < 1e-14);
        for (a, c) in q.iter().zip(&before) {
            assert!((a - c).abs() < 1e-14);
        }
        for m in tested_moments(&q, &b) {
            assert!(m.abs() < 1e-13);
        }
    }

    #[test]
    fn fix_removes_pure_invariant() {
        let b = VelocityBasis::<f64>::new(2).unwrap();
        let mut q: Vec<f64> = (0..b.ndof())
            .map(|ip| {
                let v = b.node(ip);
                b.weight(ip) * (0.3 - 0.2 * v[1] + 0.7 * norm2(v))
            })
            .collect();
        conservation_fix(&mut q, &b).unwrap();
        assert!(q.iter().all(|x| x.abs() < 1e-14));
        let b1 = VelocityBasis::<f64>::new(1).unwrap();
        assert!(conservation_fix(&mut vec![0.0; b1.ndof()], &b1).is_err());
    }

    #[test]
    fn bgk_of_maxwellian_vanishes_and_scales() {
        let b = VelocityBasis::<f64>::new(4).unwrap();
        let m = project_maxwellian(1.3, [0.0; 3], 0.5, &b).unwrap();
        let q = apply_bgk(&m, &b, 0.1).unwrap();
        assert!(q.iter().all(|x| x.abs() < 1e-10));
        let f = VelocityVector::new((0..b.ndof()).map(|i| 1.0 + 0.2 * ((i % 5) as f64 / 5.0)).collect());
        let q1 = apply_bgk(&f, &b, 0.5).unwrap();
        let q2 = apply_bgk(&f, &b, 1.0).unwrap();
        for (a, c) in q1.iter().zip(&q2) {
            assert_relative_eq!(*c, 0.5 * a, max_relative = 1e-15);
        }
        assert!(apply_bgk(&VelocityVector::zeros(&b), &b, 1.0).is_err());
    }
}
