//! Frame-weighted operators of the DG x velocity discretization.
//!
//! All operators act on a [`StateMatrix`] and return test-space residuals
//! of the same shape (row `e * (p+1) + i`, column = velocity node). The
//! velocity integrals are evaluated with the nodal Gauss-Hermite rule, which
//! is exact for every integrand that appears (degree `<= 2N + 1` per
//! direction).

use rayon::prelude::*;

use crate::collision::CollisionModel;
use crate::error::{KineticError, Result};
use crate::frame_transform::{FramePoint, FrameSamples};
use crate::linalg::{symmetric_eigenvalues, BandedSpd};
use crate::scalar::Real;
use crate::velocity_space::VelocityBasis;

use super::mesh::{Boundaries, BoundaryKind};
use super::{DgSpace, StateMatrix};

/// Block-diagonal `M^n`: per element `A_e (x) diag(omega)` with
/// `A_e[i][k] = int T^{3/2} phi_i phi_k`.
#[derive(Debug, Clone)]
pub struct WeightedMass<T> {
    np: usize,
    blocks: Vec<Vec<T>>,
    factors: Vec<BandedSpd<T>>,
    weights: Vec<T>,
}

pub fn assemble_weighted_mass<T: Real>(
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> Result<WeightedMass<T>> {
    let np = dg.n_local();
    let mut blocks = Vec::with_capacity(dg.n_elements());
    let mut factors = Vec::with_capacity(dg.n_elements());
    for e in 0..dg.n_elements() {
        let scale = dg.scale(e);
        let mut a = vec![T::zero(); np * np];
        for q in 0..dg.n_quad() {
            let t = samples.quad(e, q).temperature;
            if !(t > T::zero()) {
                return Err(KineticError::TemperatureFloor {
                    value: t.as_f64(),
                    x: dg.quad_point(e, q).0.as_f64(),
                    floor: 0.0,
                });
            }
            let w = dg.quad_point(e, q).1 * t.pow_three_halves() * scale * scale;
            let phi = dg.ref_values_at(q);
            for i in 0..np {
                for k in 0..np {
                    a[i * np + k] = a[i * np + k] + w * phi[i] * phi[k];
                }
            }
        }
        let mut f = BandedSpd::dense(np);
        for i in 0..np {
            for k in 0..=i {
                f.set(i, k, a[i * np + k]);
            }
        }
        f.factorize()
            .map_err(|_| KineticError::Singular(format!("weighted mass block of element {e}")))?;
        blocks.push(a);
        factors.push(f);
    }
    Ok(WeightedMass {
        np,
        blocks,
        factors,
        weights: basis.quad().weights3.clone(),
    })
}

impl<T: Real> WeightedMass<T> {
    pub fn apply(&self, c: &StateMatrix<T>) -> StateMatrix<T> {
        let (np, nv) = (self.np, c.ndof_v());
        let mut out = StateMatrix::zeros(c.ndof_x(), nv);
        for (e, a) in self.blocks.iter().enumerate() {
            for i in 0..np {
                let row = out.row_mut(e * np + i);
                for k in 0..np {
                    let aik = a[i * np + k];
                    for ((o, &x), &w) in row.iter_mut().zip(c.row(e * np + k)).zip(&self.weights) {
                        *o = *o + aik * w * x;
                    }
                }
            }
        }
        out
    }

    /// `(M^n)^{-1} r`: velocity scaling by `1/omega`, then the spatial block
    /// solve per element.
    pub fn solve(&self, r: &StateMatrix<T>) -> StateMatrix<T> {
        let (np, nv) = (self.np, r.ndof_v());
        let mut out = StateMatrix::zeros(r.ndof_x(), nv);
        let mut col = vec![T::zero(); np];
        for (e, f) in self.factors.iter().enumerate() {
            for j in 0..nv {
                for i in 0..np {
                    col[i] = r.get(e * np + i, j) / self.weights[j];
                }
                f.solve_in_place(&mut col);
                for i in 0..np {
                    out.row_mut(e * np + i)[j] = col[i];
                }
            }
        }
        out
    }

    /// Spectral condition number of each spatial block (the velocity factor
    /// is diagonal and reported separately by the basis weights).
    pub fn block_conditions(&self) -> Vec<T> {
        self.blocks
            .iter()
            .map(|a| {
                let ev = symmetric_eigenvalues(a, self.np);
                let (lo, hi) = ev
                    .iter()
                    .fold((T::infinity(), T::zero()), |(l, h), &x| (l.min(x), h.max(x)));
                hi / lo
            })
            .collect()
    }
}

/// Upwind choice for a characteristic speed `a n` across a facet.
#[inline]
pub fn upwind_trace<T: Real>(interior: T, exterior: T, normal_speed: T) -> T {
    if normal_speed > T::zero() {
        interior
    } else if normal_speed < T::zero() {
        exterior
    } else {
        T::half() * (interior + exterior)
    }
}

/// Standardized nodal values of a physical density at the frame's nodes,
/// `g_j = f(sqrt(T) v_j + V) exp(|v_j|^2)`.
pub fn nodal_values_of<T: Real>(basis: &VelocityBasis<T>, frame: &FramePoint<T>, f: impl Fn([T; 3]) -> T) -> Vec<T> {
    basis
        .quad()
        .nodes3
        .iter()
        .map(|&v| f(frame.to_physical(v)) * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).exp())
        .collect()
}

/// Exterior values at a mirror wall with outward normal `normal` (`+-1`).
/// Incoming nodes take the interior trace at the reflected velocity; with
/// `V_1 = 0` at the wall this is an exact node flip.
pub fn specular_boundary_value<T: Real>(
    interior: &[T],
    frame: &FramePoint<T>,
    normal: T,
    basis: &VelocityBasis<T>,
) -> Vec<T> {
    let n1 = basis.n1();
    let nodes = basis.nodes1d();
    let s = frame.temperature.sqrt();
    let v1 = frame.velocity[0];
    let mut out = interior.to_vec();
    let mut lag = vec![T::zero(); n1];
    let exact = v1.abs() < T::lit(1e-14);
    for i in 0..n1 {
        let a = s * nodes[i] + v1;
        if !(a * normal < T::zero()) {
            continue;
        }
        if exact {
            let src = n1 - 1 - i;
            for jk in 0..n1 * n1 {
                out[i * n1 * n1 + jk] = interior[src * n1 * n1 + jk];
            }
        } else {
            let w = (-a - v1) / s;
            basis.lagrange_1d_into(w, &mut lag);
            let factor = (nodes[i] * nodes[i] - w * w).exp();
            for jk in 0..n1 * n1 {
                let g: T = (0..n1).map(|k| lag[k] * interior[k * n1 * n1 + jk]).sum();
                out[i * n1 * n1 + jk] = factor * g;
            }
        }
    }
    out
}

/// Exterior values at a diffuse wall: incoming nodes carry the wall
/// Maxwellian scaled so the net normal mass flux vanishes under the nodal
/// quadrature.
pub fn diffuse_boundary_value<T: Real>(
    interior: &[T],
    frame: &FramePoint<T>,
    wall_velocity: [T; 3],
    wall_temperature: T,
    normal: T,
    basis: &VelocityBasis<T>,
) -> Result<Vec<T>> {
    if !(wall_temperature > T::zero()) {
        return Err(KineticError::invalid("diffuse wall requires a positive wall temperature"));
    }
    let wall = super::MaxwellianState::new(T::one(), wall_velocity, wall_temperature);
    let wall_nodal = nodal_values_of(basis, frame, |u| wall.density_at(u));
    let (mut outgoing, mut incoming) = (T::zero(), T::zero());
    for ip in 0..basis.ndof() {
        let an = frame.to_physical(basis.node(ip))[0] * normal;
        let w = basis.weight(ip);
        if an > T::zero() {
            outgoing = outgoing + w * an * interior[ip];
        } else if an < T::zero() {
            incoming = incoming - w * an * wall_nodal[ip];
        }
    }
    if !(incoming > T::zero()) {
        return Err(KineticError::Degenerate("diffuse wall Maxwellian has no incoming flux".into()));
    }
    let c = outgoing / incoming;
    Ok((0..basis.ndof())
        .map(|ip| {
            let an = frame.to_physical(basis.node(ip))[0] * normal;
            if an < T::zero() {
                c * wall_nodal[ip]
            } else {
                interior[ip]
            }
        })
        .collect())
}

/// Exterior trace for a boundary facet.
pub fn boundary_value<T: Real>(
    kind: &BoundaryKind<T>,
    interior: &[T],
    frame: &FramePoint<T>,
    normal: T,
    basis: &VelocityBasis<T>,
) -> Result<Vec<T>> {
    match kind {
        BoundaryKind::Inflow(s) | BoundaryKind::Outflow(s) => Ok(nodal_values_of(basis, frame, |u| s.density_at(u))),
        BoundaryKind::Specular => Ok(specular_boundary_value(interior, frame, normal, basis)),
        BoundaryKind::Diffuse {
            wall_velocity,
            wall_temperature,
        } => diffuse_boundary_value(interior, frame, *wall_velocity, *wall_temperature, normal, basis),
    }
}

/// Element traces `(left end, right end)` of `g` at every velocity node.
fn traces<T: Real>(c: &StateMatrix<T>, dg: &DgSpace<T>) -> Vec<(Vec<T>, Vec<T>)> {
    let np = dg.n_local();
    let nv = c.ndof_v();
    (0..dg.n_elements())
        .map(|e| {
            let s = dg.scale(e);
            let mut l = vec![T::zero(); nv];
            let mut r = vec![T::zero(); nv];
            for i in 0..np {
                let (pl, pr) = (dg.ref_left()[i] * s, dg.ref_right()[i] * s);
                for ((a, b), &x) in l.iter_mut().zip(r.iter_mut()).zip(c.row(e * np + i)) {
                    *a = *a + pl * x;
                    *b = *b + pr * x;
                }
            }
            (l, r)
        })
        .collect()
}

/// Numerical flux `T^{3/2} omega_j a_j g^up_j` in the `+x` orientation at
/// every mesh vertex.
pub fn facet_fluxes<T: Real>(
    c: &StateMatrix<T>,
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> Result<Vec<Vec<T>>> {
    let ne = dg.n_elements();
    let tr = traces(c, dg);
    let flux = |fp: &FramePoint<T>, left: &[T], right: &[T]| -> Vec<T> {
        let t32 = fp.temperature.pow_three_halves();
        (0..basis.ndof())
            .map(|ip| {
                let a = fp.to_physical(basis.node(ip))[0];
                t32 * basis.weight(ip) * a * upwind_trace(left[ip], right[ip], a)
            })
            .collect()
    };
    let mut out = Vec::with_capacity(ne + 1);
    match dg.mesh().boundaries() {
        Boundaries::Periodic => {
            let f0 = flux(samples.vertex(0), &tr[ne - 1].1, &tr[0].0);
            out.push(f0.clone());
            for v in 1..ne {
                out.push(flux(samples.vertex(v), &tr[v - 1].1, &tr[v].0));
            }
            out.push(f0);
        }
        Boundaries::Ends { left, right } => {
            let fp = samples.vertex(0);
            let ext = boundary_value(left, &tr[0].0, fp, -T::one(), basis)?;
            out.push(flux(fp, &ext, &tr[0].0));
            for v in 1..ne {
                out.push(flux(samples.vertex(v), &tr[v - 1].1, &tr[v].0));
            }
            let fp = samples.vertex(ne);
            let ext = boundary_value(right, &tr[ne - 1].1, fp, T::one(), basis)?;
            out.push(flux(fp, &tr[ne - 1].1, &ext));
        }
    }
    Ok(out)
}

/// `y += sum_k (D^T along direction k) z_k`, `z` laid out `[j][k]`.
fn add_gradient_transpose<T: Real>(z: &[T], basis: &VelocityBasis<T>, y: &mut [T]) {
    let n = basis.n1();
    let nv = y.len();
    let d = basis.diff_matrix();
    // y[.., i, ..] += sum_j D[j, i] z_k[.., j, ..] along each axis k
    for (k, stride) in [n * n, n, 1].into_iter().enumerate() {
        let zk = &z[k * nv..(k + 1) * nv];
        let block = stride * n;
        for (yb, zb) in y.chunks_exact_mut(block).zip(zk.chunks_exact(block)) {
            for i in 0..n {
                let yi = &mut yb[i * stride..(i + 1) * stride];
                for j in 0..n {
                    let dji = d[j * n + i];
                    for (yv, &zv) in yi.iter_mut().zip(&zb[j * stride..(j + 1) * stride]) {
                        *yv = *yv + dji * zv;
                    }
                }
            }
        }
    }
}

/// Values of `g` at quadrature point `q` of element `e`.
fn point_values<T: Real>(c: &StateMatrix<T>, dg: &DgSpace<T>, e: usize, q: usize, u: &mut [T]) {
    let np = dg.n_local();
    let s = dg.scale(e);
    let phi = dg.ref_values_at(q);
    u.iter_mut().for_each(|x| *x = T::zero());
    for i in 0..np {
        let p = phi[i] * s;
        for (x, &cv) in u.iter_mut().zip(c.row(e * np + i)) {
            *x = *x + p * cv;
        }
    }
}

/// `F^n c`: facet upwind fluxes minus the volume term with the chain-rule
/// coefficient of the moving frame.
pub fn apply_flux<T: Real>(
    c: &StateMatrix<T>,
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> Result<StateMatrix<T>> {
    let np = dg.n_local();
    let nv = basis.ndof();
    let fluxes = facet_fluxes(c, samples, dg, basis)?;
    let mut out = StateMatrix::zeros(c.ndof_x(), nv);
    out.as_mut_slice()
        .par_chunks_mut(np * nv)
        .enumerate()
        .for_each(|(e, block)| {
            let s = dg.scale(e);
            let h = dg.mesh().element_size(e);
            let mut u = vec![T::zero(); nv];
            let mut z = vec![T::zero(); 3 * nv];
            let mut y = vec![T::zero(); nv];
            for q in 0..dg.n_quad() {
                let fp = samples.quad(e, q);
                let (_, wq) = dg.quad_point(e, q);
                point_values(c, dg, e, q, &mut u);
                let t = fp.temperature;
                let st = t.sqrt();
                let wt = wq * t.pow_three_halves();
                y.iter_mut().for_each(|x| *x = T::zero());
                for ip in 0..nv {
                    let v = basis.node(ip);
                    let a = st * v[0] + fp.velocity[0];
                    let base = wt * basis.weight(ip) * u[ip] * a;
                    y[ip] = base;
                    for k in 0..3 {
                        let b = T::half() * fp.dtemperature_dx * v[k] + st * fp.dvelocity_dx[k];
                        z[k * nv + ip] = base * b / t;
                    }
                }
                let dphi = dg.ref_derivs_at(q);
                let phi = dg.ref_values_at(q);
                for i in 0..np {
                    let dp = dphi[i] * s * T::two() / h;
                    let row = &mut block[i * nv..(i + 1) * nv];
                    for (o, &yv) in row.iter_mut().zip(&y) {
                        *o = *o - dp * yv;
                    }
                }
                let mut g = vec![T::zero(); nv];
                add_gradient_transpose(&z, basis, &mut g);
                for i in 0..np {
                    let p = phi[i] * s;
                    let row = &mut block[i * nv..(i + 1) * nv];
                    for (o, &gv) in row.iter_mut().zip(&g) {
                        *o = *o + p * gv;
                    }
                }
            }
            for i in 0..np {
                let (pl, pr) = (dg.ref_left()[i] * s, dg.ref_right()[i] * s);
                let row = &mut block[i * nv..(i + 1) * nv];
                for ((o, &fr), &fl) in row.iter_mut().zip(&fluxes[e + 1]).zip(&fluxes[e]) {
                    *o = *o + pr * fr - pl * fl;
                }
            }
        });
    Ok(out)
}

/// `G^n c` with the frame's stored time derivatives.
pub fn apply_time_derivative<T: Real>(
    c: &StateMatrix<T>,
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> StateMatrix<T> {
    let np = dg.n_local();
    let nv = basis.ndof();
    let mut out = StateMatrix::zeros(c.ndof_x(), nv);
    out.as_mut_slice()
        .par_chunks_mut(np * nv)
        .enumerate()
        .for_each(|(e, block)| {
            let s = dg.scale(e);
            let mut u = vec![T::zero(); nv];
            let mut z = vec![T::zero(); 3 * nv];
            for q in 0..dg.n_quad() {
                let fp = samples.quad(e, q);
                if fp.dt_temperature == T::zero() && fp.dt_velocity.iter().all(|&x| x == T::zero()) {
                    continue;
                }
                let (_, wq) = dg.quad_point(e, q);
                point_values(c, dg, e, q, &mut u);
                let t = fp.temperature;
                let st = t.sqrt();
                let wt = wq * t.pow_three_halves();
                for ip in 0..nv {
                    let v = basis.node(ip);
                    let base = wt * basis.weight(ip) * u[ip];
                    for k in 0..3 {
                        let d = fp.dt_velocity[k] / st + v[k] * fp.dt_temperature / (T::two() * t);
                        z[k * nv + ip] = base * d;
                    }
                }
                let mut g = vec![T::zero(); nv];
                add_gradient_transpose(&z, basis, &mut g);
                let phi = dg.ref_values_at(q);
                for i in 0..np {
                    let p = phi[i] * s;
                    let row = &mut block[i * nv..(i + 1) * nv];
                    for (o, &gv) in row.iter_mut().zip(&g) {
                        *o = *o + p * gv;
                    }
                }
            }
        });
    out
}

/// Collision term tested with every `phi_i L_m`. Returns the residual and
/// the largest conservation correction applied at any point.
pub fn apply_collision<T: Real>(
    c: &StateMatrix<T>,
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
    model: &CollisionModel<T>,
    fix: bool,
) -> Result<(StateMatrix<T>, T)> {
    let np = dg.n_local();
    let nv = basis.ndof();
    let mut out = StateMatrix::zeros(c.ndof_x(), nv);
    if model.is_off() {
        return Ok((out, T::zero()));
    }
    let fixes: Result<Vec<T>> = out
        .as_mut_slice()
        .par_chunks_mut(np * nv)
        .enumerate()
        .map(|(e, block)| {
            let s = dg.scale(e);
            let mut u = vec![T::zero(); nv];
            let mut worst = T::zero();
            for q in 0..dg.n_quad() {
                let fp = samples.quad(e, q);
                let (_, wq) = dg.quad_point(e, q);
                point_values(c, dg, e, q, &mut u);
                let (qv, fixed) = model.apply_in_frame(&u, basis, fp.temperature, fix)?;
                worst = worst.max(fixed);
                let phi = dg.ref_values_at(q);
                for i in 0..np {
                    let p = wq * phi[i] * s;
                    let row = &mut block[i * nv..(i + 1) * nv];
                    for (o, &x) in row.iter_mut().zip(&qv) {
                        *o = *o + p * x;
                    }
                }
            }
            Ok(worst)
        })
        .collect();
    let worst = fixes?.into_iter().fold(T::zero(), T::max);
    Ok((out, worst))
}

/// L2 projection in `x` of a physical density `f(x, u)` onto the DG x
/// velocity space of a frame.
pub fn project_density<T: Real>(
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
    samples: &FrameSamples<T>,
    f: impl Fn(T, [T; 3]) -> T + Sync,
) -> StateMatrix<T> {
    let np = dg.n_local();
    let nv = basis.ndof();
    let mut out = StateMatrix::zeros(dg.ndof(), nv);
    out.as_mut_slice()
        .par_chunks_mut(np * nv)
        .enumerate()
        .for_each(|(e, block)| {
            let s = dg.scale(e);
            for q in 0..dg.n_quad() {
                let (x, wq) = dg.quad_point(e, q);
                let g = nodal_values_of(basis, samples.quad(e, q), |u| f(x, u));
                let phi = dg.ref_values_at(q);
                for i in 0..np {
                    let p = wq * phi[i] * s;
                    let row = &mut block[i * nv..(i + 1) * nv];
                    for (o, &gv) in row.iter_mut().zip(&g) {
                        *o = *o + p * gv;
                    }
                }
            }
        });
    out
}

/// Nodal values of `g` at reference point `xi` of element `e`.
pub fn evaluate_at<T: Real>(c: &StateMatrix<T>, dg: &DgSpace<T>, e: usize, xi: T) -> Vec<T> {
    let np = dg.n_local();
    let phi = dg.basis_at(e, xi);
    let mut u = vec![T::zero(); c.ndof_v()];
    for i in 0..np {
        for (x, &cv) in u.iter_mut().zip(c.row(e * np + i)) {
            *x = *x + phi[i] * cv;
        }
    }
    u
}

/// Total physical mass, momentum and energy `int int {1, u, |u|^2/2} f`.
pub fn conserved_totals<T: Real>(
    c: &StateMatrix<T>,
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> [T; 5] {
    let nv = basis.ndof();
    let mut u = vec![T::zero(); nv];
    let mut tot = [T::zero(); 5];
    for e in 0..dg.n_elements() {
        for q in 0..dg.n_quad() {
            let fp = samples.quad(e, q);
            let (_, wq) = dg.quad_point(e, q);
            point_values(c, dg, e, q, &mut u);
            let jac = wq * fp.temperature.pow_three_halves();
            for ip in 0..nv {
                let m = jac * basis.weight(ip) * u[ip];
                let p = fp.to_physical(basis.node(ip));
                tot[0] = tot[0] + m;
                for d in 0..3 {
                    tot[d + 1] = tot[d + 1] + m * p[d];
                }
                tot[4] = tot[4] + T::half() * m * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
            }
        }
    }
    tot
}
