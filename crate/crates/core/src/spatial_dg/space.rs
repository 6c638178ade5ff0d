use std::sync::Arc;

use crate::error::Result;
use crate::legendre::{legendre_with_derivatives, GaussLegendre};
use crate::scalar::Real;

use super::mesh::Mesh1D;

/// Discontinuous piecewise polynomials of degree `p` with an orthonormal
/// Legendre basis per element, so every element mass matrix is the identity.
#[derive(Debug, Clone)]
pub struct DgSpace<T> {
    order: usize,
    mesh: Arc<Mesh1D<T>>,
    quad: GaussLegendre<T>,
    /// reference values `sqrt(2i+1) P_i(xi_q)`, `[q * (p+1) + i]`
    ref_values: Vec<T>,
    /// reference derivatives `sqrt(2i+1) P_i'(xi_q)`
    ref_derivs: Vec<T>,
    /// `sqrt(2i+1) P_i(-1)` and `sqrt(2i+1) P_i(+1)`
    ref_left: Vec<T>,
    ref_right: Vec<T>,
}

impl<T: Real> DgSpace<T> {
    /// Volume integrals use `p + 2` Gauss-Legendre points per element.
    pub fn new(mesh: Arc<Mesh1D<T>>, order: usize) -> Result<Self> {
        Self::with_quadrature(mesh, order, order + 2)
    }

    pub fn with_quadrature(mesh: Arc<Mesh1D<T>>, order: usize, n_quad: usize) -> Result<Self> {
        let quad = GaussLegendre::new(n_quad)?;
        let np = order + 1;
        let mut ref_values = Vec::with_capacity(quad.len() * np);
        let mut ref_derivs = Vec::with_capacity(quad.len() * np);
        for &xi in &quad.nodes {
            let (v, d) = Self::ref_basis(order, xi);
            ref_values.extend(v);
            ref_derivs.extend(d);
        }
        let (ref_left, _) = Self::ref_basis(order, -T::one());
        let (ref_right, _) = Self::ref_basis(order, T::one());
        Ok(Self {
            order,
            mesh,
            quad,
            ref_values,
            ref_derivs,
            ref_left,
            ref_right,
        })
    }

    fn ref_basis(order: usize, xi: T) -> (Vec<T>, Vec<T>) {
        let (p, dp) = legendre_with_derivatives(order, xi);
        let s = |i: usize| (T::from_usize_lossy(2 * i + 1)).sqrt();
        (
            p.iter().enumerate().map(|(i, &v)| s(i) * v).collect(),
            dp.iter().enumerate().map(|(i, &v)| s(i) * v).collect(),
        )
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mesh(&self) -> &Arc<Mesh1D<T>> {
        &self.mesh
    }

    pub fn n_elements(&self) -> usize {
        self.mesh.n_elements()
    }

    /// Basis functions per element, `p + 1`.
    pub fn n_local(&self) -> usize {
        self.order + 1
    }

    pub fn ndof(&self) -> usize {
        self.n_local() * self.n_elements()
    }

    pub fn quad(&self) -> &GaussLegendre<T> {
        &self.quad
    }

    pub fn n_quad(&self) -> usize {
        self.quad.len()
    }

    /// Physical basis functions are `phi_i = ref_i / sqrt(h)`.
    #[inline]
    pub fn scale(&self, e: usize) -> T {
        T::one() / self.mesh.element_size(e).sqrt()
    }

    /// Reference basis values `sqrt(2i+1) P_i` at quadrature point `q`;
    /// multiply by [`scale`](Self::scale) for physical values.
    pub fn ref_values_at(&self, q: usize) -> &[T] {
        let np = self.n_local();
        &self.ref_values[q * np..(q + 1) * np]
    }

    pub fn ref_derivs_at(&self, q: usize) -> &[T] {
        let np = self.n_local();
        &self.ref_derivs[q * np..(q + 1) * np]
    }

    /// Unscaled values at the left (`-1`) and right (`+1`) reference endpoints.
    pub fn ref_left(&self) -> &[T] {
        &self.ref_left
    }

    pub fn ref_right(&self) -> &[T] {
        &self.ref_right
    }

    /// Physical basis values `phi_i(x)` at reference point `xi` of element `e`.
    pub fn basis_at(&self, e: usize, xi: T) -> Vec<T> {
        let s = self.scale(e);
        Self::ref_basis(self.order, xi).0.into_iter().map(|v| v * s).collect()
    }

    /// `x_q` and `w_q * h / 2` on element `e`.
    pub fn quad_point(&self, e: usize, q: usize) -> (T, T) {
        let xi = self.quad.nodes[q];
        (
            self.mesh.map_to_physical(e, xi),
            self.quad.weights[q] * T::half() * self.mesh.element_size(e),
        )
    }
}
