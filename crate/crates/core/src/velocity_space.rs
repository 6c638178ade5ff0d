//! Maxwellian-weighted Lagrange trial space on Gauss-Hermite nodes.
//!
//! A velocity function is stored as the nodal values `g_ip` of its
//! polynomial factor, `f(v) = exp(-|v|^2) g(v)` with `g` the tensor Lagrange
//! interpolant through the 3D Gauss-Hermite nodes. With that choice the
//! mass and flux matrices are diagonal and moments are plain weighted sums.

use std::sync::Arc;

use crate::error::{KineticError, Result};
use crate::hermite_quadrature::{cached_hermite_rule, tensor_rule_3d, Quad3D};
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct VelocityBasis<T> {
    order: usize,
    quad: Quad3D<T>,
    barycentric_weights: Vec<T>,
    /// `diff[i * n + j] = l_j'(v_i)`
    diff: Vec<T>,
}

impl<T: Real> VelocityBasis<T> {
    pub fn new(order: usize) -> Result<Self> {
        let rule = cached_hermite_rule::<T>(order + 1)?;
        let quad = tensor_rule_3d(&rule);
        let nodes = &quad.base.nodes;
        let n = nodes.len();
        let barycentric_weights: Vec<T> = (0..n)
            .map(|j| {
                let prod = (0..n)
                    .filter(|&k| k != j)
                    .fold(T::one(), |acc, k| acc * (nodes[j] - nodes[k]));
                T::one() / prod
            })
            .collect();
        let mut diff = vec![T::zero(); n * n];
        for i in 0..n {
            let mut diag = T::zero();
            for j in 0..n {
                if i != j {
                    let d = (barycentric_weights[j] / barycentric_weights[i]) / (nodes[i] - nodes[j]);
                    diff[i * n + j] = d;
                    diag = diag - d;
                }
            }
            diff[i * n + i] = diag;
        }
        Ok(Self {
            order,
            quad,
            barycentric_weights,
            diff,
        })
    }

    pub fn shared(order: usize) -> Result<Arc<Self>> {
        Self::new(order).map(Arc::new)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Points per direction, `N + 1`.
    pub fn n1(&self) -> usize {
        self.order + 1
    }

    /// Number of velocity degrees of freedom, `(N + 1)^3`.
    pub fn ndof(&self) -> usize {
        self.quad.len()
    }

    pub fn quad(&self) -> &Quad3D<T> {
        &self.quad
    }

    pub fn nodes1d(&self) -> &[T] {
        &self.quad.base.nodes
    }

    pub fn weights1d(&self) -> &[T] {
        &self.quad.base.weights
    }

    pub fn node(&self, ip: usize) -> [T; 3] {
        self.quad.nodes3[ip]
    }

    pub fn weight(&self, ip: usize) -> T {
        self.quad.weights3[ip]
    }

    pub fn barycentric_weights(&self) -> &[T] {
        &self.barycentric_weights
    }

    /// 1D differentiation matrix, row-major: entry `(i, j)` is `l_j'(v_i)`.
    pub fn diff_matrix(&self) -> &[T] {
        &self.diff
    }

    /// Values `l_0(x) .. l_N(x)` of the 1D Lagrange basis (barycentric form).
    pub fn lagrange_1d(&self, x: T) -> Vec<T> {
        let mut out = vec![T::zero(); self.n1()];
        self.lagrange_1d_into(x, &mut out);
        out
    }

    pub fn lagrange_1d_into(&self, x: T, out: &mut [T]) {
        let nodes = self.nodes1d();
        if let Some(k) = nodes.iter().position(|&v| v == x) {
            out.iter_mut().for_each(|o| *o = T::zero());
            out[k] = T::one();
            return;
        }
        let mut denom = T::zero();
        for (j, (&v, &lam)) in nodes.iter().zip(&self.barycentric_weights).enumerate() {
            let t = lam / (x - v);
            out[j] = t;
            denom = denom + t;
        }
        for o in out.iter_mut() {
            *o = *o / denom;
        }
    }

    /// Tensor Lagrange values `L_j(v)` for all `j`.
    pub fn lagrange_3d(&self, v: [T; 3]) -> Vec<T> {
        let (a, b, c) = (self.lagrange_1d(v[0]), self.lagrange_1d(v[1]), self.lagrange_1d(v[2]));
        let n = self.n1();
        let mut out = Vec::with_capacity(n * n * n);
        for &x in &a {
            for &y in &b {
                let xy = x * y;
                for &z in &c {
                    out.push(xy * z);
                }
            }
        }
        out
    }

    /// Polynomial factor `g(v)` of a nodal vector.
    pub fn interpolate_poly(&self, coeffs: &[T], v: [T; 3]) -> T {
        let n = self.n1();
        let (a, b, c) = (self.lagrange_1d(v[0]), self.lagrange_1d(v[1]), self.lagrange_1d(v[2]));
        let mut total = T::zero();
        for i in 0..n {
            let mut si = T::zero();
            for j in 0..n {
                let base = (i * n + j) * n;
                let sj: T = (0..n).map(|k| coeffs[base + k] * c[k]).sum();
                si = si + b[j] * sj;
            }
            total = total + a[i] * si;
        }
        total
    }
}

/// Nodal coefficients of one velocity function: `g(v_ip)` where
/// `f = exp(-|v|^2) g`.
#[derive(Debug, Clone, PartialEq)]
pub struct VelocityVector<T> {
    pub coeffs: Vec<T>,
}

impl<T: Real> VelocityVector<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    pub fn zeros(basis: &VelocityBasis<T>) -> Self {
        Self::new(vec![T::zero(); basis.ndof()])
    }

    /// Nodal interpolation of an arbitrary density `f(v)`.
    pub fn from_density(basis: &VelocityBasis<T>, f: impl Fn([T; 3]) -> T) -> Self {
        Self::new(
            basis
                .quad()
                .nodes3
                .iter()
                .map(|&v| f(v) * norm2(v).exp())
                .collect(),
        )
    }
}

/// Diagonal matrix stored by its diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagonal<T>(pub Vec<T>);

impl<T: Real> Diagonal<T> {
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        self.0.iter().zip(x).map(|(&d, &x)| d * x).collect()
    }

    pub fn solve(&self, b: &[T]) -> Vec<T> {
        self.0.iter().zip(b).map(|(&d, &b)| b / d).collect()
    }
}

/// Velocity mass matrix `int exp(-|v|^2) L_m L_n dv = delta_mn w_n`.
pub fn mass_matrix<T: Real>(basis: &VelocityBasis<T>) -> Diagonal<T> {
    Diagonal(basis.quad().weights3.clone())
}

/// Flux matrix `int v_c exp(-|v|^2) L_m L_n dv = delta_mn (v_n)_c w_n` for
/// `component` in `0..3`.
pub fn flux_matrix<T: Real>(basis: &VelocityBasis<T>, component: usize) -> Result<Diagonal<T>> {
    if component > 2 {
        return Err(KineticError::invalid(format!("velocity component {component} out of range")));
    }
    let q = basis.quad();
    Ok(Diagonal(
        q.nodes3
            .iter()
            .zip(&q.weights3)
            .map(|(v, &w)| v[component] * w)
            .collect(),
    ))
}

/// Point value `exp(-|v|^2) g(v)`.
pub fn evaluate<T: Real>(f: &VelocityVector<T>, basis: &VelocityBasis<T>, v: [T; 3]) -> T {
    (-norm2(v)).exp() * basis.interpolate_poly(&f.coeffs, v)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacroscopicState<T> {
    pub rho: T,
    pub velocity: [T; 3],
    pub energy: T,
    /// Centered stress tensor.
    pub stress: [[T; 3]; 3],
    pub pressure: T,
    /// `1/2 int |v|^2 v f dv`
    pub heat_flux: [T; 3],
    pub temperature: T,
}

/// Moments of point masses `(m_k, u_k)`: the discrete measure
/// `sum_k m_k delta(u - u_k)` stands in for `f(u) du`.
pub(crate) fn moments_of_point_masses<T: Real>(
    points: impl Iterator<Item = (T, [T; 3])> + Clone,
) -> Result<MacroscopicState<T>> {
    let mut rho = T::zero();
    let mut mom = [T::zero(); 3];
    let mut energy = T::zero();
    let mut heat = [T::zero(); 3];
    for (m, u) in points.clone() {
        rho = rho + m;
        let u2 = norm2(u);
        energy = energy + m * u2;
        for d in 0..3 {
            mom[d] = mom[d] + m * u[d];
            heat[d] = heat[d] + m * u2 * u[d];
        }
    }
    if !(rho > T::zero()) {
        return Err(KineticError::Degenerate(format!("density {rho:e} is not positive")));
    }
    let velocity = mom.map(|x| x / rho);
    let mut stress = [[T::zero(); 3]; 3];
    for (m, u) in points {
        let c = [u[0] - velocity[0], u[1] - velocity[1], u[2] - velocity[2]];
        for a in 0..3 {
            for b in a..3 {
                stress[a][b] = stress[a][b] + m * c[a] * c[b];
            }
        }
    }
    for a in 0..3 {
        for b in 0..a {
            stress[a][b] = stress[b][a];
        }
    }
    let pressure = (stress[0][0] + stress[1][1] + stress[2][2]) / T::lit(3.0);
    Ok(MacroscopicState {
        rho,
        velocity,
        energy: T::half() * energy,
        stress,
        pressure,
        heat_flux: heat.map(|h| T::half() * h),
        temperature: pressure / rho,
    })
}

/// Density, velocity, energy, stress, pressure, heat flux and temperature of
/// `f` by Gauss-Hermite quadrature.
pub fn moments<T: Real>(f: &VelocityVector<T>, basis: &VelocityBasis<T>) -> Result<MacroscopicState<T>> {
    let q = basis.quad();
    moments_of_point_masses(
        q.weights3
            .iter()
            .zip(&f.coeffs)
            .zip(&q.nodes3)
            .map(|((&w, &g), &v)| (w * g, v)),
    )
}

/// Nodal projection of `rho / (2 pi T)^{3/2} exp(-|v - V|^2 / (2T))`.
pub fn project_maxwellian<T: Real>(
    rho: T,
    velocity: [T; 3],
    temperature: T,
    basis: &VelocityBasis<T>,
) -> Result<VelocityVector<T>> {
    if !(rho > T::zero()) || !(temperature > T::zero()) {
        return Err(KineticError::invalid(format!(
            "Maxwellian needs rho > 0 and T > 0, got rho = {rho:e}, T = {temperature:e}"
        )));
    }
    let mut out = VelocityVector::zeros(basis);
    maxwellian_nodal_into(rho, velocity, temperature, basis, &mut out.coeffs);
    Ok(out)
}

/// Unchecked kernel of [`project_maxwellian`], writing into `out`.
pub(crate) fn maxwellian_nodal_into<T: Real>(
    rho: T,
    velocity: [T; 3],
    temperature: T,
    basis: &VelocityBasis<T>,
    out: &mut [T],
) {
    let two_t = T::two() * temperature;
    let amp = rho / (T::PI() * two_t).pow_three_halves();
    // exponent separates per direction
    let n = basis.n1();
    let nodes = basis.nodes1d();
    let factors: Vec<[T; 3]> = nodes
        .iter()
        .map(|&x| {
            let mut f = [T::zero(); 3];
            for d in 0..3 {
                let dx = x - velocity[d];
                f[d] = (x * x - dx * dx / two_t).exp();
            }
            f
        })
        .collect();
    for i in 0..n {
        for j in 0..n {
            let fij = amp * factors[i][0] * factors[j][1];
            let base = (i * n + j) * n;
            for k in 0..n {
                out[base + k] = fij * factors[k][2];
            }
        }
    }
}

#[inline]
pub(crate) fn norm2<T: Real>(v: [T; 3]) -> T {
    v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
}
