//! Continuous H1 reaction-diffusion smoothing of raw moment fields.
//!
//! Given raw values `r` at the DG quadrature points, find the continuous
//! piecewise polynomial `s` with
//! `int s w + lambda int s' w' (+ penalty) = int r w` for all test `w`,
//! `lambda = c h^2 / p^2` per element, Dirichlet data where prescribed and
//! natural conditions elsewhere.

use std::sync::Arc;

use crate::error::{KineticError, Result};
use crate::linalg::BandedSpd;
use crate::scalar::Real;
use crate::spatial_dg::{DgSpace, Mesh1D};

/// Continuous Lagrange space (equispaced nodes) on a [`Mesh1D`].
#[derive(Debug, Clone)]
pub struct CgSpace<T> {
    order: usize,
    mesh: Arc<Mesh1D<T>>,
    ref_nodes: Vec<T>,
}

impl<T: Real> CgSpace<T> {
    /// Degree `max(order, 1)`: a continuous field needs at least linears.
    pub fn new(mesh: Arc<Mesh1D<T>>, order: usize) -> Self {
        let order = order.max(1);
        let ref_nodes = (0..=order)
            .map(|k| T::from_usize_lossy(2 * k) / T::from_usize_lossy(order) - T::one())
            .collect();
        Self {
            order,
            mesh,
            ref_nodes,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mesh(&self) -> &Arc<Mesh1D<T>> {
        &self.mesh
    }

    pub fn ndof(&self) -> usize {
        let n = self.mesh.n_elements() * self.order;
        if self.mesh.is_periodic() {
            n
        } else {
            n + 1
        }
    }

    #[inline]
    pub fn global_index(&self, e: usize, k: usize) -> usize {
        let g = e * self.order + k;
        if self.mesh.is_periodic() {
            g % self.ndof()
        } else {
            g
        }
    }

    /// Global dof sitting on mesh vertex `v`.
    pub fn vertex_dof(&self, v: usize) -> usize {
        if v == self.mesh.n_elements() {
            self.global_index(v - 1, self.order)
        } else {
            self.global_index(v, 0)
        }
    }

    /// Lagrange values and reference derivatives at `xi`.
    pub fn shape(&self, xi: T) -> (Vec<T>, Vec<T>) {
        let n = self.order + 1;
        let nodes = &self.ref_nodes;
        let mut vals = vec![T::zero(); n];
        let mut ders = vec![T::zero(); n];
        for k in 0..n {
            let mut denom = T::one();
            for j in 0..n {
                if j != k {
                    denom = denom * (nodes[k] - nodes[j]);
                }
            }
            let mut prod = T::one();
            for j in 0..n {
                if j != k {
                    prod = prod * (xi - nodes[j]);
                }
            }
            vals[k] = prod / denom;
            let mut d = T::zero();
            for m in 0..n {
                if m == k {
                    continue;
                }
                let mut p = T::one();
                for j in 0..n {
                    if j != k && j != m {
                        p = p * (xi - nodes[j]);
                    }
                }
                d = d + p;
            }
            ders[k] = d / denom;
        }
        (vals, ders)
    }

    /// Interpolates a function of `x` at the nodes.
    pub fn interpolate(&self, f: impl Fn(T) -> T) -> CgField<T> {
        let mut coeffs = vec![T::zero(); self.ndof()];
        for e in 0..self.mesh.n_elements() {
            for (k, &xi) in self.ref_nodes.iter().enumerate() {
                coeffs[self.global_index(e, k)] = f(self.mesh.map_to_physical(e, xi));
            }
        }
        CgField { coeffs }
    }

    pub fn constant(&self, value: T) -> CgField<T> {
        CgField {
            coeffs: vec![value; self.ndof()],
        }
    }
}

/// Coefficients of a continuous field in a [`CgSpace`].
#[derive(Debug, Clone, PartialEq)]
pub struct CgField<T> {
    pub coeffs: Vec<T>,
}

impl<T: Real> CgField<T> {
    /// Value and `d/dx` at reference point `xi` of element `e`.
    pub fn eval(&self, space: &CgSpace<T>, e: usize, xi: T) -> (T, T) {
        let (vals, ders) = space.shape(xi);
        self.eval_with(space, e, &vals, &ders)
    }

    /// [`Self::eval`] with precomputed [`CgSpace::shape`] values.
    pub fn eval_with(&self, space: &CgSpace<T>, e: usize, vals: &[T], ders: &[T]) -> (T, T) {
        let jac = T::two() / space.mesh().element_size(e);
        let mut v = T::zero();
        let mut d = T::zero();
        for k in 0..vals.len() {
            let c = self.coeffs[space.global_index(e, k)];
            v = v + c * vals[k];
            d = d + c * ders[k];
        }
        (v, d * jac)
    }

    pub fn value_at_vertex(&self, space: &CgSpace<T>, v: usize) -> T {
        self.coeffs[space.vertex_dof(v)]
    }

    pub fn axpy(&self, a: T, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&x, &y)| x + a * y)
                .collect(),
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&x| a * x).collect(),
        }
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }
}

/// Dirichlet values at the two ends of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Dirichlet<T> {
    pub left: Option<T>,
    pub right: Option<T>,
}

impl<T> Dirichlet<T> {
    pub fn none() -> Self {
        Self {
            left: None,
            right: None,
        }
    }
}

/// Normal-velocity penalty `(1/eps) (V.n)(w.n)` at specular ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltySpec<T> {
    pub inverse_epsilon: T,
    pub left: bool,
    pub right: bool,
}

impl<T: Real> PenaltySpec<T> {
    pub fn inactive() -> Self {
        Self {
            inverse_epsilon: T::zero(),
            left: false,
            right: false,
        }
    }
}

/// `lambda = c h^2 / p^2`.
pub fn smoothing_lambda<T: Real>(c_smooth: T, h: T, order: usize) -> T {
    let p = T::from_usize_lossy(order.max(1));
    c_smooth * h * h / (p * p)
}

/// Factorized reaction-diffusion operator with fixed Dirichlet positions.
#[derive(Debug, Clone)]
pub struct ReactionDiffusion<T> {
    cg: Arc<CgSpace<T>>,
    system: BandedSpd<T>,
    /// Dirichlet dof, its prescribed value and the removed column entries.
    pinned: Vec<(usize, T, Vec<(usize, T)>)>,
}

impl<T: Real> ReactionDiffusion<T> {
    /// `dg` supplies the quadrature; `order` is the DG degree `p` that sets
    /// `lambda`.
    pub fn new(
        cg: Arc<CgSpace<T>>,
        dg: &DgSpace<T>,
        c_smooth: T,
        dirichlet: Dirichlet<T>,
        penalty: PenaltySpec<T>,
    ) -> Result<Self> {
        if !(c_smooth >= T::zero()) {
            return Err(KineticError::invalid("smoothing constant must be non-negative"));
        }
        let mesh = cg.mesh().clone();
        let n = cg.ndof();
        let mut system = if mesh.is_periodic() {
            BandedSpd::dense(n)
        } else {
            BandedSpd::zeros(n, cg.order())
        };
        let nq = dg.n_quad();
        let shapes: Vec<_> = (0..nq).map(|q| cg.shape(dg.quad().nodes[q])).collect();
        let nl = cg.order() + 1;
        for e in 0..mesh.n_elements() {
            let h = mesh.element_size(e);
            let lambda = smoothing_lambda(c_smooth, h, dg.order());
            let jac = T::two() / h;
            for (q, (vals, ders)) in shapes.iter().enumerate() {
                let w = dg.quad().weights[q] * T::half() * h;
                for a in 0..nl {
                    let ga = cg.global_index(e, a);
                    for b in 0..nl {
                        let gb = cg.global_index(e, b);
                        if gb > ga {
                            continue;
                        }
                        let v = w * (vals[a] * vals[b] + lambda * ders[a] * ders[b] * jac * jac);
                        system.add(ga, gb, v);
                    }
                }
            }
        }
        if !mesh.is_periodic() {
            let last = n - 1;
            if penalty.left {
                system.add(0, 0, penalty.inverse_epsilon);
            }
            if penalty.right {
                system.add(last, last, penalty.inverse_epsilon);
            }
        }
        let mut pinned = Vec::new();
        if !mesh.is_periodic() {
            for (dof, val) in [(0, dirichlet.left), (n - 1, dirichlet.right)] {
                if let Some(val) = val {
                    let bw = system.bandwidth();
                    let lo = dof.saturating_sub(bw);
                    let hi = (dof + bw).min(n - 1);
                    let col: Vec<(usize, T)> = (lo..=hi)
                        .filter(|&i| i != dof)
                        .map(|i| (i, system.get(i, dof)))
                        .collect();
                    system.pin_row(dof, T::one());
                    pinned.push((dof, val, col));
                }
            }
        }
        system.factorize()?;
        Ok(Self { cg, system, pinned })
    }

    pub fn cg(&self) -> &Arc<CgSpace<T>> {
        &self.cg
    }

    /// Solves for raw values given at every DG quadrature point, laid out as
    /// `raw[e * n_quad + q]`.
    pub fn solve(&self, dg: &DgSpace<T>, raw: &[T]) -> Result<CgField<T>> {
        let mesh = self.cg.mesh();
        let nq = dg.n_quad();
        if raw.len() != mesh.n_elements() * nq {
            return Err(KineticError::invalid(format!(
                "raw field has {} samples, expected {}",
                raw.len(),
                mesh.n_elements() * nq
            )));
        }
        let mut rhs = vec![T::zero(); self.cg.ndof()];
        let shapes: Vec<_> = (0..nq).map(|q| self.cg.shape(dg.quad().nodes[q]).0).collect();
        for e in 0..mesh.n_elements() {
            let h = mesh.element_size(e);
            for (q, vals) in shapes.iter().enumerate() {
                let w = dg.quad().weights[q] * T::half() * h * raw[e * nq + q];
                for (a, &va) in vals.iter().enumerate() {
                    let g = self.cg.global_index(e, a);
                    rhs[g] = rhs[g] + w * va;
                }
            }
        }
        for (_, val, col) in &self.pinned {
            for &(i, a) in col {
                rhs[i] = rhs[i] - a * *val;
            }
        }
        for (dof, val, _) in &self.pinned {
            rhs[*dof] = *val;
        }
        self.system.solve_in_place(&mut rhs);
        if rhs.iter().any(|x| !x.is_finite()) {
            return Err(KineticError::Singular("smoothing produced non-finite values".into()));
        }
        Ok(CgField { coeffs: rhs })
    }
}

/// One-shot scalar smoothing.
pub fn smooth_scalar<T: Real>(
    raw: &[T],
    c_smooth: T,
    cg: Arc<CgSpace<T>>,
    dg: &DgSpace<T>,
    dirichlet: Dirichlet<T>,
) -> Result<CgField<T>> {
    ReactionDiffusion::new(cg, dg, c_smooth, dirichlet, PenaltySpec::inactive())?.solve(dg, raw)
}

/// One-shot componentwise vector smoothing; the penalty acts on the normal
/// (first) component only.
pub fn smooth_vector<T: Real>(
    raw: [&[T]; 3],
    c_smooth: T,
    cg: Arc<CgSpace<T>>,
    dg: &DgSpace<T>,
    dirichlet: [Dirichlet<T>; 3],
    penalty: PenaltySpec<T>,
) -> Result<[CgField<T>; 3]> {
    let normal = ReactionDiffusion::new(cg.clone(), dg, c_smooth, dirichlet[0], penalty)?;
    let f0 = normal.solve(dg, raw[0])?;
    let mut rest = Vec::with_capacity(2);
    for d in 1..3 {
        let op = ReactionDiffusion::new(cg.clone(), dg, c_smooth, dirichlet[d], PenaltySpec::inactive())?;
        rest.push(op.solve(dg, raw[d])?);
    }
    let f2 = rest.pop().expect("two tangential components");
    let f1 = rest.pop().expect("two tangential components");
    Ok([f0, f1, f2])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial_dg::{Boundaries, BoundaryKind, MaxwellianState};
    use approx::assert_relative_eq;

    fn ends() -> Boundaries<f64> {
        let s = MaxwellianState::new(1.0, [0.0; 3], 1.0);
        Boundaries::Ends {
            left: BoundaryKind::Outflow(s),
            right: BoundaryKind::Outflow(s),
        }
    }

    fn setup(n_el: usize, p: usize, bnd: Boundaries<f64>) -> (Arc<CgSpace<f64>>, DgSpace<f64>) {
        let mesh = Arc::new(Mesh1D::uniform(-1.0, 1.0, n_el, bnd).unwrap());
        (Arc::new(CgSpace::new(mesh.clone(), p)), DgSpace::new(mesh, p).unwrap())
    }

    fn sample(dg: &DgSpace<f64>, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut out = Vec::new();
        for e in 0..dg.n_elements() {
            for q in 0..dg.n_quad() {
                out.push(f(dg.quad_point(e, q).0));
            }
        }
        out
    }

    #[test]
    fn lambda_formula() {
        assert_relative_eq!(smoothing_lambda(25.0, 0.01, 4), 1.5625e-4, epsilon = 1e-18);
    }

    #[test]
    fn constant_is_reproduced() {
        let (cg, dg) = setup(10, 3, ends());
        let raw = vec![2.5; 10 * dg.n_quad()];
        let d = Dirichlet {
            left: Some(2.5),
            right: Some(2.5),
        };
        let s = smooth_scalar(&raw, 7.0, cg, &dg, d).unwrap();
        for c in s.coeffs {
            assert_relative_eq!(c, 2.5, epsilon = 1e-12);
        }
    }

    #[test]
    fn zero_smoothing_is_l2_projection() {
        // a cubic is reproduced exactly by the cubic L2 projection
        let (cg, dg) = setup(4, 3, ends());
        let f = |x: f64| x * x * x - 0.5 * x + 0.2;
        let s = smooth_scalar(&sample(&dg, f), 0.0, cg.clone(), &dg, Dirichlet::none()).unwrap();
        for e in 0..4 {
            for xi in [-0.9, 0.1, 0.77] {
                let x = cg.mesh().map_to_physical(e, xi);
                assert_relative_eq!(s.eval(&cg, e, xi).0, f(x), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn periodic_constant() {
        let (cg, dg) = setup(3, 2, Boundaries::Periodic);
        let raw = vec![-0.3; 3 * dg.n_quad()];
        let s = smooth_scalar(&raw, 3.0, cg, &dg, Dirichlet::none()).unwrap();
        for c in s.coeffs {
            assert_relative_eq!(c, -0.3, epsilon = 1e-13);
        }
    }

    #[test]
    fn linearity() {
        let (cg, dg) = setup(8, 2, ends());
        let x = sample(&dg, |x| (3.0 * x).sin());
        let y = sample(&dg, |x| if x < 0.0 { 1.0 } else { -2.0 });
        let d = Dirichlet {
            left: Some(0.0),
            right: Some(0.0),
        };
        let op = ReactionDiffusion::new(cg, &dg, 5.0, d, PenaltySpec::inactive()).unwrap();
        let sx = op.solve(&dg, &x).unwrap();
        let sy = op.solve(&dg, &y).unwrap();
        let comb: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let sc = op.solve(&dg, &comb).unwrap();
        for i in 0..sc.coeffs.len() {
            assert_relative_eq!(sc.coeffs[i], 2.0 * sx.coeffs[i] - 0.5 * sy.coeffs[i], epsilon = 1e-12);
        }
    }

    #[test]
    fn vector_without_penalty_decouples() {
        let (cg, dg) = setup(6, 2, ends());
        let a = sample(&dg, |x| x);
        let b = sample(&dg, |x| x * x);
        let z = vec![0.0; a.len()];
        let d = Dirichlet::none();
        let v = smooth_vector([&a, &b, &z], 2.0, cg.clone(), &dg, [d; 3], PenaltySpec::inactive()).unwrap();
        let sa = smooth_scalar(&a, 2.0, cg.clone(), &dg, d).unwrap();
        let sb = smooth_scalar(&b, 2.0, cg, &dg, d).unwrap();
        assert_eq!(v[0], sa);
        assert_eq!(v[1], sb);
        assert!(v[2].max_abs() == 0.0);
    }
}
