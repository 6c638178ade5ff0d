//! Weak Boltzmann operator in mean/relative velocity variables.
//!
//! With `v = v_bar + v_hat`, `w = v_bar - v_hat` and the rescaling
//! `v_bar = a / sqrt(2)`, `v_hat = b / sqrt(2)` the Maxwellian weights of
//! `f(v) f(w)` combine into `exp(-|a|^2 - |b|^2)`, so both integrals are
//! Gaussian-weighted sums and only the polynomial factors `g` are
//! evaluated off-node:
//!
//! `Q_m = int int K(b) g((a+b)/s2) g((a-b)/s2)
//!        [int_S2 L_m((a + |b| e)/s2) de - 4 pi L_m((a+b)/s2)] da db`
//!
//! with `K(b) = b_theta (sqrt(2)|b|)^beta`. The `a` integral is a tensor
//! Gauss-Hermite rule. For `beta = 0` so is the `b` integral; for
//! `beta > 0` the kernel is not smooth at `b = 0` and `b` is integrated in
//! spherical coordinates instead, with a Gauss rule for the radial weight
//! `r^(2+beta) e^(-r^2)` and a sphere rule for the direction. Everything is
//! evaluated by sum factorization over the `a` grid. The gain term depends
//! on `b` only through `|b|`, so it is accumulated per radius class.

use std::collections::HashMap;

use crate::error::{KineticError, Result};
use crate::gauss::generalized_laguerre_rule;
use crate::hermite_quadrature::cached_hermite_rule;
use crate::scalar::Real;
use crate::velocity_space::VelocityBasis;

use super::sphere::{sphere_quadrature, SphereRule};

/// `B(v, w, e) = b_theta |v - w|^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionKernel<T> {
    pub beta: T,
    pub angular: T,
}

impl<T: Real> CollisionKernel<T> {
    pub fn new(beta: T, angular: T) -> Result<Self> {
        if !(beta >= T::zero() && beta <= T::one()) {
            return Err(KineticError::invalid(format!("beta = {beta} outside [0, 1]")));
        }
        if !(angular > T::zero()) {
            return Err(KineticError::invalid("angular kernel constant must be positive"));
        }
        Ok(Self { beta, angular })
    }

    /// Maxwell molecules with `b_theta = 1`.
    pub fn maxwell() -> Self {
        Self {
            beta: T::zero(),
            angular: T::one(),
        }
    }

    /// `b_r(|v - w|) = |v - w|^beta`.
    pub fn radial(&self, relative_speed: T) -> T {
        if self.beta == T::zero() {
            T::one()
        } else {
            relative_speed.powf(self.beta)
        }
    }
}

/// Quadrature sizes for the mean (`a`), relative (`b`) and angular parts.
///
/// `relative_points` counts points per direction of the Cartesian `b` rule
/// (`beta = 0`) or radial points (`beta > 0`); `relative_sphere_degree` is
/// only used in the latter case.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CollisionQuadrature {
    pub mean_points: usize,
    pub relative_points: usize,
    pub sphere_degree: usize,
    pub relative_sphere_degree: usize,
}

impl CollisionQuadrature {
    /// `2N + 2` points per direction and a scattering sphere rule of degree
    /// `max(6, 3N)`, which integrates the gain-term test functions exactly.
    /// The relative-velocity integrand has total degree `9N` in `b`, so the
    /// spherical `b` rule gets that degree and enough radial points for the
    /// even powers up to it.
    pub fn default_for(order: usize) -> Self {
        Self {
            mean_points: 2 * order + 2,
            relative_points: (2 * order + 2).max((9 * order + 5) / 4),
            sphere_degree: (3 * order).max(6),
            relative_sphere_degree: 9 * order,
        }
    }
}


/// Gain and loss parts of one application (`Q = gain - loss`).
#[derive(Debug, Clone)]
pub struct CollisionParts<T> {
    pub gain: Vec<T>,
    pub loss: Vec<T>,
}

/// Precomputed tables for repeated applications at one velocity order.
#[derive(Debug, Clone)]
pub struct BoltzmannOperator<T> {
    kernel: CollisionKernel<T>,
    quadrature: CollisionQuadrature,
    n1: usize,
    na: usize,
    a_weights: Vec<T>,
    /// `[j][i][k] = l_k((a_i + b_j)/sqrt 2)` for coordinate `b_j`
    plus: Vec<T>,
    /// `[j][i][k] = l_k((a_i - b_j)/sqrt 2)`
    minus: Vec<T>,
    /// `[j][k][i]`, transpose of `plus`
    plus_t: Vec<T>,
    /// Per 3D `b` node: coordinate indices, weight times kernel, and its
    /// radius class.
    b_index: Vec<[usize; 3]>,
    b_factor: Vec<T>,
    b_class: Vec<usize>,
    /// Per radius class and sphere direction, three `[k][i]` tables of
    /// `l_k((a_i + e_d r)/sqrt 2)` premultiplied in the first direction by
    /// the sphere weight.
    gain_tables: Vec<[Vec<T>; 3]>,
    n_dirs: usize,
}

impl<T: Real> BoltzmannOperator<T> {
    pub fn new(basis: &VelocityBasis<T>, kernel: CollisionKernel<T>, quadrature: CollisionQuadrature) -> Result<Self> {
        let n1 = basis.n1();
        if quadrature.mean_points < n1 || quadrature.relative_points < n1 {
            return Err(KineticError::invalid(format!(
                "collision quadrature needs at least {n1} points per direction"
            )));
        }
        let sphere: SphereRule<T> = sphere_quadrature(quadrature.sphere_degree)?;
        let ra = cached_hermite_rule::<T>(quadrature.mean_points)?;
        let na = ra.len();
        let s2 = T::two().sqrt();

        // relative-velocity nodes as index triples into a list of coordinates
        let mut coords = Vec::new();
        let mut b_index = Vec::new();
        let mut b_factor = Vec::new();
        let mut b_class = Vec::new();
        let mut radii = Vec::new();
        if kernel.beta == T::zero() {
            let rb = cached_hermite_rule::<T>(quadrature.relative_points)?;
            let nb = rb.len();
            coords.extend_from_slice(&rb.nodes);
            // radius classes: multisets of symmetric levels of the b nodes
            let level = |j: usize| j.min(nb - 1 - j);
            let mut classes: HashMap<[usize; 3], usize> = HashMap::new();
            for j1 in 0..nb {
                for j2 in 0..nb {
                    for j3 in 0..nb {
                        let mut key = [level(j1), level(j2), level(j3)];
                        key.sort_unstable();
                        let r = (rb.nodes[j1].powi(2) + rb.nodes[j2].powi(2) + rb.nodes[j3].powi(2)).sqrt();
                        let next = radii.len();
                        let c = *classes.entry(key).or_insert(next);
                        if c == next {
                            radii.push(r);
                        }
                        b_index.push([j1, j2, j3]);
                        b_factor.push(rb.weights[j1] * rb.weights[j2] * rb.weights[j3] * kernel.angular);
                        b_class.push(c);
                    }
                }
            }
        } else {
            // int_0^inf r^(2+beta) e^(-r^2) h(r) dr = 1/2 int s^((1+beta)/2) e^(-s) h(sqrt s) ds
            let alpha = T::half() * (T::one() + kernel.beta);
            let (s_nodes, s_weights) = generalized_laguerre_rule(quadrature.relative_points, alpha)?;
            let dirs: SphereRule<T> = sphere_quadrature(quadrature.relative_sphere_degree)?;
            let scale = T::half() * kernel.angular * s2.powf(kernel.beta);
            for (c, (&s, &ws)) in s_nodes.iter().zip(&s_weights).enumerate() {
                let r = s.sqrt();
                radii.push(r);
                for (e, &we) in dirs.directions.iter().zip(&dirs.weights) {
                    let base = coords.len();
                    coords.extend(e.map(|x| r * x));
                    b_index.push([base, base + 1, base + 2]);
                    b_factor.push(scale * ws * we);
                    b_class.push(c);
                }
            }
        }
        let nb = coords.len();

        let mut plus = vec![T::zero(); nb * na * n1];
        let mut minus = vec![T::zero(); nb * na * n1];
        let mut plus_t = vec![T::zero(); nb * na * n1];
        let mut buf = vec![T::zero(); n1];
        for (j, &b) in coords.iter().enumerate() {
            for i in 0..na {
                let base = (j * na + i) * n1;
                basis.lagrange_1d_into((ra.nodes[i] + b) / s2, &mut buf);
                plus[base..base + n1].copy_from_slice(&buf);
                for k in 0..n1 {
                    plus_t[(j * n1 + k) * na + i] = buf[k];
                }
                basis.lagrange_1d_into((ra.nodes[i] - b) / s2, &mut buf);
                minus[base..base + n1].copy_from_slice(&buf);
            }
        }

        let n_dirs = sphere.len();
        let mut gain_tables = Vec::with_capacity(radii.len() * n_dirs);
        for &r in &radii {
            for (e, &we) in sphere.directions.iter().zip(&sphere.weights) {
                let tables = [0, 1, 2].map(|d| {
                    let mut t = vec![T::zero(); n1 * na];
                    for i in 0..na {
                        basis.lagrange_1d_into((ra.nodes[i] + e[d] * r) / s2, &mut buf);
                        for k in 0..n1 {
                            t[k * na + i] = if d == 0 { we * buf[k] } else { buf[k] };
                        }
                    }
                    t
                });
                gain_tables.push(tables);
            }
        }

        let mut a_weights = Vec::with_capacity(na * na * na);
        for i1 in 0..na {
            for i2 in 0..na {
                for i3 in 0..na {
                    a_weights.push(ra.weights[i1] * ra.weights[i2] * ra.weights[i3]);
                }
            }
        }

        Ok(Self {
            kernel,
            quadrature,
            n1,
            na,
            a_weights,
            plus,
            minus,
            plus_t,
            b_index,
            b_factor,
            b_class,
            gain_tables,
            n_dirs,
        })
    }

    pub fn kernel(&self) -> &CollisionKernel<T> {
        &self.kernel
    }

    pub fn quadrature(&self) -> &CollisionQuadrature {
        &self.quadrature
    }

    pub fn ndof(&self) -> usize {
        self.n1 * self.n1 * self.n1
    }

    /// `Q_m = int Q(f) L_m` for nodal polynomial factors `g`.
    pub fn apply(&self, g: &[T]) -> Vec<T> {
        let parts = self.apply_parts(g);
        parts.gain.iter().zip(&parts.loss).map(|(&a, &b)| a - b).collect()
    }

    pub fn apply_parts(&self, g: &[T]) -> CollisionParts<T> {
        assert_eq!(g.len(), self.ndof(), "coefficient vector length");
        let (n1, na) = (self.n1, self.na);
        let na3 = na * na * na;
        let block = na * n1;
        let n_classes = self.gain_tables.len() / self.n_dirs;
        let mut class_sum = vec![T::zero(); n_classes * na3];
        let mut loss = vec![T::zero(); self.ndof()];
        let mut scratch = Scratch::new(n1, na);
        let mut gp = vec![T::zero(); na3];
        let mut gm = vec![T::zero(); na3];
        let mut w = vec![T::zero(); na3];
        let mut tmp = vec![T::zero(); self.ndof()];
        for (jb, tabs) in self.b_index.iter().enumerate() {
            let mp = tabs.map(|j| &self.plus[j * block..(j + 1) * block]);
            let mm = tabs.map(|j| &self.minus[j * block..(j + 1) * block]);
            contract3(g, [n1; 3], mp, [na; 3], &mut gp, &mut scratch);
            contract3(g, [n1; 3], mm, [na; 3], &mut gm, &mut scratch);
            let fb = self.b_factor[jb];
            let cls = &mut class_sum[self.b_class[jb] * na3..(self.b_class[jb] + 1) * na3];
            for i in 0..na3 {
                let v = fb * self.a_weights[i] * gp[i] * gm[i];
                w[i] = v;
                cls[i] = cls[i] + v;
            }
            let mt = tabs.map(|j| &self.plus_t[j * block..(j + 1) * block]);
            contract3(&w, [na; 3], mt, [n1; 3], &mut tmp, &mut scratch);
            for (l, &t) in loss.iter_mut().zip(&tmp) {
                *l = *l + t;
            }
        }
        let four_pi = T::lit(4.0) * T::PI();
        loss.iter_mut().for_each(|l| *l = *l * four_pi);

        let mut gain = vec![T::zero(); self.ndof()];
        for c in 0..n_classes {
            let s = &class_sum[c * na3..(c + 1) * na3];
            for d in 0..self.n_dirs {
                let t = &self.gain_tables[c * self.n_dirs + d];
                contract3(s, [na; 3], [&t[0], &t[1], &t[2]], [n1; 3], &mut tmp, &mut scratch);
                for (o, &x) in gain.iter_mut().zip(&tmp) {
                    *o = *o + x;
                }
            }
        }
        CollisionParts { gain, loss }
    }
}

struct Scratch<T> {
    t1: Vec<T>,
    t2: Vec<T>,
}

impl<T: Real> Scratch<T> {
    fn new(n1: usize, na: usize) -> Self {
        let m = n1.max(na);
        Self {
            t1: vec![T::zero(); m * m * m],
            t2: vec![T::zero(); m * m * m],
        }
    }
}

/// `out[o1,o2,o3] = sum_k in[k1,k2,k3] m1[o1,k1] m2[o2,k2] m3[o3,k3]` with
/// row-major `m_d` of shape `[nout_d][nin_d]`.
fn contract3<T: Real>(
    input: &[T],
    nin: [usize; 3],
    mats: [&[T]; 3],
    nout: [usize; 3],
    out: &mut [T],
    s: &mut Scratch<T>,
) {
    let [a, b, c] = nin;
    let [x, y, z] = nout;
    // t1[k1][k2][o3]
    let t1 = &mut s.t1[..a * b * z];
    for k12 in 0..a * b {
        let src = &input[k12 * c..(k12 + 1) * c];
        for o3 in 0..z {
            let row = &mats[2][o3 * c..(o3 + 1) * c];
            t1[k12 * z + o3] = src.iter().zip(row).map(|(&p, &q)| p * q).sum();
        }
    }
    // t2[k1][o2][o3]
    let t2 = &mut s.t2[..a * y * z];
    for k1 in 0..a {
        for o2 in 0..y {
            let row = &mats[1][o2 * b..(o2 + 1) * b];
            let dst = &mut t2[(k1 * y + o2) * z..(k1 * y + o2 + 1) * z];
            dst.iter_mut().for_each(|v| *v = T::zero());
            for (k2, &m) in row.iter().enumerate() {
                let src = &t1[(k1 * b + k2) * z..(k1 * b + k2 + 1) * z];
                for (d, &v) in dst.iter_mut().zip(src) {
                    *d = *d + m * v;
                }
            }
        }
    }
    let yz = y * z;
    for o1 in 0..x {
        let row = &mats[0][o1 * a..(o1 + 1) * a];
        let dst = &mut out[o1 * yz..(o1 + 1) * yz];
        dst.iter_mut().for_each(|v| *v = T::zero());
        for (k1, &m) in row.iter().enumerate() {
            let src = &t2[k1 * yz..(k1 + 1) * yz];
            for (d, &v) in dst.iter_mut().zip(src) {
                *d = *d + m * v;
            }
        }
    }
}

/// One-shot weak Boltzmann operator with default quadrature sizes except
/// for the given sphere rule degree.
pub fn apply_boltzmann_weak<T: Real>(
    g: &[T],
    basis: &VelocityBasis<T>,
    kernel: CollisionKernel<T>,
    sphere_degree: usize,
) -> Result<Vec<T>> {
    let mut q = CollisionQuadrature::default_for(basis.order());
    q.sphere_degree = sphere_degree;
    Ok(BoltzmannOperator::new(basis, kernel, q)?.apply(g))
}
