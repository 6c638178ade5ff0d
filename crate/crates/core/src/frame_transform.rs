//! Shifted and scaled velocity frame.
//!
//! The standardized distribution is `f^{V,T}(v) = f(sqrt(T) v + V)` for
//! ansatz fields `V(x)`, `T(x)`. This module holds the frame fields and the
//! exact relations between physical and standardized quantities.
//!
//! With `T = p / rho` the standardized equilibrium `exp(-|v|^2)` has
//! temperature 1/2, so an ansatz temperature of twice the gas temperature
//! centers the trial space on the local equilibrium; see
//! [`FRAME_TEMPERATURE_FACTOR`].

use std::sync::Arc;

use crate::error::{KineticError, Result};
use crate::scalar::Real;
use crate::smoother::{CgField, CgSpace};
use crate::spatial_dg::{DgSpace, StateMatrix};
use crate::velocity_space::{moments_of_point_masses, norm2, MacroscopicState, VelocityBasis, VelocityVector};

/// Ratio between the ansatz temperature and the gas temperature it targets.
pub const FRAME_TEMPERATURE_FACTOR: f64 = 2.0;

/// Default lower bound on the ansatz temperature.
pub const DEFAULT_T_MIN: f64 = 1e-6;

/// Frame data at one spatial point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FramePoint<T> {
    pub temperature: T,
    pub velocity: [T; 3],
    pub dtemperature_dx: T,
    pub dvelocity_dx: [T; 3],
    pub dt_temperature: T,
    pub dt_velocity: [T; 3],
}

impl<T: Real> FramePoint<T> {
    pub fn uniform(temperature: T, velocity: [T; 3]) -> Self {
        Self {
            temperature,
            velocity,
            ..Default::default()
        }
    }

    /// Physical velocity of standardized velocity `v`: `sqrt(T) v + V`.
    #[inline]
    pub fn to_physical(&self, v: [T; 3]) -> [T; 3] {
        let s = self.temperature.sqrt();
        [
            s * v[0] + self.velocity[0],
            s * v[1] + self.velocity[1],
            s * v[2] + self.velocity[2],
        ]
    }

    #[inline]
    pub fn to_standard(&self, u: [T; 3]) -> [T; 3] {
        let s = self.temperature.sqrt();
        [
            (u[0] - self.velocity[0]) / s,
            (u[1] - self.velocity[1]) / s,
            (u[2] - self.velocity[2]) / s,
        ]
    }
}

/// Continuous ansatz velocity and temperature with their time derivatives.
#[derive(Debug, Clone)]
pub struct AnsatzFrame<T> {
    cg: Arc<CgSpace<T>>,
    pub temperature: CgField<T>,
    pub velocity: [CgField<T>; 3],
    pub dt_temperature: CgField<T>,
    pub dt_velocity: [CgField<T>; 3],
}

impl<T: Real> AnsatzFrame<T> {
    /// Frame with zero time derivatives.
    pub fn new(cg: Arc<CgSpace<T>>, temperature: CgField<T>, velocity: [CgField<T>; 3]) -> Self {
        let zero = cg.constant(T::zero());
        Self {
            cg,
            temperature,
            velocity,
            dt_temperature: zero.clone(),
            dt_velocity: [zero.clone(), zero.clone(), zero],
        }
    }

    pub fn uniform(cg: Arc<CgSpace<T>>, temperature: T, velocity: [T; 3]) -> Self {
        let t = cg.constant(temperature);
        let v = velocity.map(|x| cg.constant(x));
        Self::new(cg, t, v)
    }

    pub fn cg(&self) -> &Arc<CgSpace<T>> {
        &self.cg
    }

    pub fn at(&self, e: usize, xi: T) -> FramePoint<T> {
        let (vals, ders) = self.cg.shape(xi);
        let eval = |f: &CgField<T>| f.eval_with(&self.cg, e, &vals, &ders);
        let (t, dt) = eval(&self.temperature);
        let mut p = FramePoint {
            temperature: t,
            dtemperature_dx: dt,
            dt_temperature: eval(&self.dt_temperature).0,
            ..Default::default()
        };
        for d in 0..3 {
            let (v, dv) = eval(&self.velocity[d]);
            p.velocity[d] = v;
            p.dvelocity_dx[d] = dv;
            p.dt_velocity[d] = eval(&self.dt_velocity[d]).0;
        }
        p
    }

    /// Frame at mesh vertex `v` (gradients taken from the element on the
    /// left where one exists).
    pub fn at_vertex(&self, v: usize) -> FramePoint<T> {
        let n = self.cg.mesh().n_elements();
        if v == n {
            self.at(n - 1, T::one())
        } else {
            self.at(v, -T::one())
        }
    }

    /// Samples at every DG quadrature point (`[e * n_quad + q]`) and vertex.
    pub fn sample(&self, dg: &DgSpace<T>) -> FrameSamples<T> {
        let nq = dg.n_quad();
        let mut quad = Vec::with_capacity(dg.n_elements() * nq);
        for e in 0..dg.n_elements() {
            for q in 0..nq {
                quad.push(self.at(e, dg.quad().nodes[q]));
            }
        }
        let vertices = (0..=dg.n_elements()).map(|v| self.at_vertex(v)).collect();
        FrameSamples {
            n_quad: nq,
            quad,
            vertices,
        }
    }

    /// Stores `(next - self) / tau` as this frame's time derivatives.
    pub fn set_forward_difference(&mut self, next: &Self, tau: T) {
        let inv = T::one() / tau;
        self.dt_temperature = next.temperature.axpy(-T::one(), &self.temperature).scaled(inv);
        for d in 0..3 {
            self.dt_velocity[d] = next.velocity[d].axpy(-T::one(), &self.velocity[d]).scaled(inv);
        }
    }

    pub fn clear_time_derivatives(&mut self) {
        let zero = self.cg.constant(T::zero());
        self.dt_temperature = zero.clone();
        self.dt_velocity = [zero.clone(), zero.clone(), zero];
    }

    /// Errors if the temperature drops below `t_min` at a node, vertex or
    /// quadrature point.
    pub fn check_floor(&self, dg: &DgSpace<T>, t_min: T) -> Result<()> {
        let mesh = self.cg.mesh();
        for e in 0..mesh.n_elements() {
            let pts = dg
                .quad()
                .nodes
                .iter()
                .copied()
                .chain([-T::one(), T::one()]);
            for xi in pts {
                let t = self.temperature.eval(&self.cg, e, xi).0;
                if !(t >= t_min) {
                    return Err(KineticError::TemperatureFloor {
                        value: t.as_f64(),
                        x: mesh.map_to_physical(e, xi).as_f64(),
                        floor: t_min.as_f64(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Max-norm of the change to `other` (`(|dV|, |dT|)`).
    pub fn difference_norms(&self, other: &Self) -> (T, T) {
        let dt = self.temperature.axpy(-T::one(), &other.temperature).max_abs();
        let dv = (0..3)
            .map(|d| self.velocity[d].axpy(-T::one(), &other.velocity[d]).max_abs())
            .fold(T::zero(), T::max);
        (dv, dt)
    }
}

/// Frame evaluated on the DG quadrature points and mesh vertices.
#[derive(Debug, Clone)]
pub struct FrameSamples<T> {
    n_quad: usize,
    quad: Vec<FramePoint<T>>,
    vertices: Vec<FramePoint<T>>,
}

impl<T: Real> FrameSamples<T> {
    pub fn uniform(dg: &DgSpace<T>, point: FramePoint<T>) -> Self {
        Self {
            n_quad: dg.n_quad(),
            quad: vec![point; dg.n_elements() * dg.n_quad()],
            vertices: vec![point; dg.n_elements() + 1],
        }
    }

    #[inline]
    pub fn quad(&self, e: usize, q: usize) -> &FramePoint<T> {
        &self.quad[e * self.n_quad + q]
    }

    #[inline]
    pub fn vertex(&self, v: usize) -> &FramePoint<T> {
        &self.vertices[v]
    }

    pub fn n_quad(&self) -> usize {
        self.n_quad
    }

    /// Every sampled point (quadrature points, then vertices).
    pub fn points(&self) -> impl Iterator<Item = &FramePoint<T>> {
        self.quad.iter().chain(&self.vertices)
    }
}

fn check_temperature<T: Real>(t: T) -> Result<()> {
    if t > T::zero() {
        Ok(())
    } else {
        Err(KineticError::invalid(format!("frame temperature {t:e} must be positive")))
    }
}

/// Mean-free part of the heat flux, `1/2 int |c|^2 c f` with `c = v - V_f`.
fn central_heat_flux<T: Real>(m: &MacroscopicState<T>) -> [T; 3] {
    let v = m.velocity;
    let v2 = norm2(v);
    let tr = m.stress[0][0] + m.stress[1][1] + m.stress[2][2];
    let mut out = [T::zero(); 3];
    for a in 0..3 {
        let pv: T = (0..3).map(|b| m.stress[a][b] * v[b]).sum();
        out[a] = m.heat_flux[a] - T::half() * m.rho * v2 * v[a] - pv - T::half() * tr * v[a];
    }
    out
}

/// Rebuilds the non-central fields from density, velocity, stress and the
/// central heat flux.
fn assemble_state<T: Real>(rho: T, velocity: [T; 3], stress: [[T; 3]; 3], qc: [T; 3]) -> MacroscopicState<T> {
    let tr = stress[0][0] + stress[1][1] + stress[2][2];
    let pressure = tr / T::lit(3.0);
    let v2 = norm2(velocity);
    let mut heat_flux = [T::zero(); 3];
    for a in 0..3 {
        let pv: T = (0..3).map(|b| stress[a][b] * velocity[b]).sum();
        heat_flux[a] = qc[a] + T::half() * rho * v2 * velocity[a] + pv + T::half() * tr * velocity[a];
    }
    MacroscopicState {
        rho,
        velocity,
        energy: T::half() * (rho * v2 + tr),
        stress,
        pressure,
        heat_flux,
        temperature: pressure / rho,
    }
}

/// Physical moments to the moments of `f^{V,T}`:
/// `rho_s = T^{-3/2} rho_f`, `V_s = (V_f - V) / sqrt(T)`, `T_s = T_f / T`
/// (stress scales with `T^{-5/2}`, central heat flux with `T^{-3}`).
pub fn macroscopics_to_standard<T: Real>(
    m: &MacroscopicState<T>,
    velocity: [T; 3],
    temperature: T,
) -> Result<MacroscopicState<T>> {
    check_temperature(temperature)?;
    let s = temperature.sqrt();
    let t32 = temperature.pow_three_halves();
    let rho = m.rho / t32;
    let v = [0, 1, 2].map(|d| (m.velocity[d] - velocity[d]) / s);
    let stress = m.stress.map(|row| row.map(|p| p / (t32 * temperature)));
    let qc = central_heat_flux(m).map(|q| q / (t32 * t32));
    Ok(assemble_state(rho, v, stress, qc))
}

/// Inverse of [`macroscopics_to_standard`].
pub fn macroscopics_from_standard<T: Real>(
    m: &MacroscopicState<T>,
    velocity: [T; 3],
    temperature: T,
) -> Result<MacroscopicState<T>> {
    check_temperature(temperature)?;
    let s = temperature.sqrt();
    let t32 = temperature.pow_three_halves();
    let rho = m.rho * t32;
    let v = [0, 1, 2].map(|d| s * m.velocity[d] + velocity[d]);
    let stress = m.stress.map(|row| row.map(|p| p * t32 * temperature));
    let qc = central_heat_flux(m).map(|q| q * t32 * t32);
    Ok(assemble_state(rho, v, stress, qc))
}

/// Factor `T^{3 + beta/2}` relating the weak Boltzmann operator of `f` to
/// that of `f^{V,T}`.
pub fn collision_scaling<T: Real>(temperature: T, beta: T) -> T {
    temperature.powf(T::lit(3.0) + T::half() * beta)
}

/// Factors turning velocity integrals of `f` into integrals of `f^{V,T}`:
/// `int f phi = T^{3/2} int f^{V,T} phi^{V,T}` and the flux integrand
/// `sqrt(T) v + V`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MassFluxFactors<T> {
    pub mass: T,
    pub scale: T,
    pub shift: [T; 3],
}

impl<T: Real> MassFluxFactors<T> {
    pub fn flux_velocity(&self, v: [T; 3]) -> [T; 3] {
        [0, 1, 2].map(|d| self.scale * v[d] + self.shift[d])
    }
}

pub fn transformed_mass_flux_factors<T: Real>(temperature: T, velocity: [T; 3]) -> Result<MassFluxFactors<T>> {
    check_temperature(temperature)?;
    Ok(MassFluxFactors {
        mass: temperature.pow_three_halves(),
        scale: temperature.sqrt(),
        shift: velocity,
    })
}

/// Physical moments of `f` given its standardized coefficients at a point,
/// by quadrature on the mapped nodes `sqrt(T) v_ip + V`.
pub fn physical_moments<T: Real>(
    f: &[T],
    basis: &VelocityBasis<T>,
    frame: &FramePoint<T>,
) -> Result<MacroscopicState<T>> {
    check_temperature(frame.temperature)?;
    let jac = frame.temperature.pow_three_halves();
    let q = basis.quad();
    moments_of_point_masses(
        q.weights3
            .iter()
            .zip(f)
            .zip(&q.nodes3)
            .map(move |((&w, &g), &v)| (jac * w * g, frame.to_physical(v))),
    )
}

/// Re-expresses one standardized velocity vector in another frame by
/// evaluating the physical density at the new frame's mapped nodes.
pub fn reframe_vector<T: Real>(
    f: &[T],
    basis: &VelocityBasis<T>,
    old: &FramePoint<T>,
    new: &FramePoint<T>,
) -> VelocityVector<T> {
    let q = basis.quad();
    VelocityVector::new(
        q.nodes3
            .iter()
            .map(|&v| {
                let w = old.to_standard(new.to_physical(v));
                basis.interpolate_poly(f, w) * (norm2(v) - norm2(w)).exp()
            })
            .collect(),
    )
}

/// Re-expresses a full state in a new frame: nodal re-evaluation in
/// velocity followed by the L2 projection onto the DG space in `x`.
pub fn reframe_state<T: Real>(
    c: &StateMatrix<T>,
    frame_old: &AnsatzFrame<T>,
    frame_new: &AnsatzFrame<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> StateMatrix<T> {
    let np = dg.n_local();
    let nv = basis.ndof();
    let mut out = StateMatrix::zeros(c.ndof_x(), nv);
    let mut u = vec![T::zero(); nv];
    for e in 0..dg.n_elements() {
        let scale = dg.scale(e);
        for q in 0..dg.n_quad() {
            let xi = dg.quad().nodes[q];
            let phi = dg.ref_values_at(q);
            u.iter_mut().for_each(|x| *x = T::zero());
            for i in 0..np {
                let p = phi[i] * scale;
                for (uj, &cj) in u.iter_mut().zip(c.row(e * np + i)) {
                    *uj = *uj + p * cj;
                }
            }
            let g = reframe_vector(&u, basis, &frame_old.at(e, xi), &frame_new.at(e, xi));
            let (_, w) = dg.quad_point(e, q);
            for i in 0..np {
                let p = phi[i] * scale * w;
                for (o, &gj) in out.row_mut(e * np + i).iter_mut().zip(&g.coeffs) {
                    *o = *o + p * gj;
                }
            }
        }
    }
    out
}
