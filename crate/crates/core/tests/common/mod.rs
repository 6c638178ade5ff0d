//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

pub mod riemann;

use std::f64::consts::PI;

/// Gauss-Hermite rule by Newton iteration on the normalized recurrence.
pub fn hermite_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let mut z = 0.0f64;
    for i in 0..m {
        // standard initial guesses
        z = match i {
            0 => (2.0 * n as f64 + 1.0).sqrt() - 1.85575 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * (n as f64).powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = PI.powf(-0.25);
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / (j as f64 + 1.0)).sqrt() * p2 - (j as f64 / (j as f64 + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * n as f64).sqrt() * p2;
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    (idx.iter().map(|&i| x[i]).collect(), idx.iter().map(|&i| w[i]).collect())
}

/// Gauss-Legendre on [-1, 1] by Newton iteration.
pub fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            if n == 0 {
                break;
            }
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).unwrap());
    (idx.iter().map(|&i| x[i]).collect(), idx.iter().map(|&i| w[i]).collect())
}

/// Product rule on the sphere: Gauss-Legendre in theta (with the sin
/// Jacobian) and the midpoint rule in phi.
pub fn sphere_rule(n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let (t, wt) = legendre_rule(n_theta);
    let mut out = Vec::new();
    for (&s, &w) in t.iter().zip(&wt) {
        let theta = 0.5 * PI * (s + 1.0);
        for k in 0..n_phi {
            let phi = 2.0 * PI * (k as f64 + 0.5) / n_phi as f64;
            out.push((
                [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()],
                w * 0.5 * PI * theta.sin() * 2.0 * PI / n_phi as f64,
            ));
        }
    }
    out
}

/// Product-form Lagrange polynomial `l_k(x)` on `nodes`.
pub fn lagrange(nodes: &[f64], k: usize, x: f64) -> f64 {
    nodes
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != k)
        .map(|(_, &xj)| (x - xj) / (nodes[k] - xj))
        .product()
}

pub fn lagrange3(nodes: &[f64], m: usize, v: [f64; 3]) -> f64 {
    let n = nodes.len();
    let (i, j, k) = (m / (n * n), (m / n) % n, m % n);
    lagrange(nodes, i, v[0]) * lagrange(nodes, j, v[1]) * lagrange(nodes, k, v[2])
}

pub fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `int int int |v-w|^beta f(v) f(w) [phi_m(v') - phi_m(v)] de' dw dv` in
/// the original variables, for `f = exp(-|v|^2) g` given through `g`
/// and test functions `L_m` on `basis_nodes`. Gauss-Hermite with `n_gh`
/// points per direction for `v` and `w`.
pub fn brute_force_weak_collision(
    g: &dyn Fn([f64; 3]) -> f64,
    basis_nodes: &[f64],
    beta: f64,
    n_gh: usize,
    sphere: &[([f64; 3], f64)],
) -> Vec<f64> {
    let n1 = basis_nodes.len();
    let (x, w) = hermite_rule(n_gh);
    let mut pts = Vec::new();
    for a in 0..n_gh {
        for b in 0..n_gh {
            for c in 0..n_gh {
                let v = [x[a], x[b], x[c]];
                pts.push((v, w[a] * w[b] * w[c], g(v)));
            }
        }
    }
    let mut out = vec![0.0; n1 * n1 * n1];
    let l3 = |v: [f64; 3], buf: &mut [[f64; 16]; 3]| {
        for d in 0..3 {
            for k in 0..n1 {
                buf[d][k] = lagrange(basis_nodes, k, v[d]);
            }
        }
    };
    let mut bv = [[0.0; 16]; 3];
    let mut bp = [[0.0; 16]; 3];
    let mut acc = vec![0.0; n1 * n1 * n1];
    let total_sphere: f64 = sphere.iter().map(|s| s.1).sum();
    for &(v, wv, gv) in &pts {
        l3(v, &mut bv);
        acc.iter_mut().for_each(|a| *a = 0.0);
        for &(u, wu, gu) in &pts {
            let rel = [v[0] - u[0], v[1] - u[1], v[2] - u[2]];
            let r = norm(rel);
            let k = if beta == 0.0 { 1.0 } else { r.powf(beta) };
            let c = wu * gu * k;
            if c == 0.0 {
                continue;
            }
            for &(e, we) in sphere {
                let vp = [0, 1, 2].map(|d| 0.5 * (v[d] + u[d]) + 0.5 * e[d] * r);
                l3(vp, &mut bp);
                for i in 0..n1 {
                    for j in 0..n1 {
                        let pij = c * we * bp[0][i] * bp[1][j];
                        for l in 0..n1 {
                            acc[(i * n1 + j) * n1 + l] += pij * bp[2][l];
                        }
                    }
                }
            }
            for i in 0..n1 {
                for j in 0..n1 {
                    for l in 0..n1 {
                        acc[(i * n1 + j) * n1 + l] -= c * total_sphere * bv[0][i] * bv[1][j] * bv[2][l];
                    }
                }
            }
        }
        for (o, a) in out.iter_mut().zip(&acc) {
            *o += wv * gv * a;
        }
    }
    out
}

/// `int Q(f) phi dv` for a density `f` given directly, using mean and
/// relative velocities with the relative part in spherical coordinates
/// (smooth in the radius even for `beta > 0`). `center` and `width` give the
/// Gauss-Hermite scaling of the mean-velocity integral:
/// `v_bar = center + width * x`.
pub struct MeanRelativeOracle {
    pub n_mean: usize,
    pub n_radial: usize,
    pub r_max_factor: f64,
    pub rel_sphere: Vec<([f64; 3], f64)>,
    pub scat_sphere: Vec<([f64; 3], f64)>,
}

impl MeanRelativeOracle {
    pub fn weak(
        &self,
        f: &dyn Fn([f64; 3]) -> f64,
        phi: &dyn Fn([f64; 3]) -> f64,
        beta: f64,
        center: [f64; 3],
        width: f64,
    ) -> f64 {
        let (x, w) = hermite_rule(self.n_mean);
        let (rn, rw) = legendre_rule(self.n_radial);
        let r_max = self.r_max_factor * width;
        let mut total = 0.0;
        for a in 0..self.n_mean {
            for b in 0..self.n_mean {
                for c in 0..self.n_mean {
                    let xs = [x[a], x[b], x[c]];
                    let vbar = [0, 1, 2].map(|d| center[d] + width * xs[d]);
                    let wbar = w[a] * w[b] * w[c] * (xs[0] * xs[0] + xs[1] * xs[1] + xs[2] * xs[2]).exp() * width.powi(3);
                    let mut inner = 0.0;
                    for (&s, &ws) in rn.iter().zip(&rw) {
                        let r = 0.5 * r_max * (s + 1.0);
                        let wr = 0.5 * r_max * ws * r * r * (2.0 * r).powf(beta);
                        // gain test average over scattering directions
                        let gain: f64 = self
                            .scat_sphere
                            .iter()
                            .map(|&(e, we)| we * phi([0, 1, 2].map(|d| vbar[d] + e[d] * r)))
                            .sum();
                        for &(n, wn) in &self.rel_sphere {
                            let vh = n.map(|c| c * r);
                            let p = [0, 1, 2].map(|d| vbar[d] + vh[d]);
                            let m = [0, 1, 2].map(|d| vbar[d] - vh[d]);
                            let ff = f(p) * f(m);
                            inner += wr * wn * ff * (gain - 4.0 * PI * phi(p));
                        }
                    }
                    total += wbar * inner;
                }
            }
        }
        8.0 * total
    }
}

/// Dense symmetric Gram matrix `int exp(-v^2) p_i p_j` of 1D functions by a
/// high-order Gauss-Hermite rule.
pub fn dense_gram(funcs: &[Box<dyn Fn(f64) -> f64>], n_quad: usize) -> Vec<Vec<f64>> {
    let (x, w) = hermite_rule(n_quad);
    funcs
        .iter()
        .map(|fi| {
            funcs
                .iter()
                .map(|fj| x.iter().zip(&w).map(|(&xx, &ww)| ww * fi(xx) * fj(xx)).sum())
                .collect()
        })
        .collect()
}

/// Legendre `P_0..P_n` and derivatives at `x` by the three-term recurrence.
pub fn legendre_values(n: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; n + 1];
    let mut d = vec![0.0; n + 1];
    p[0] = 1.0;
    if n >= 1 {
        p[1] = x;
        d[1] = 1.0;
    }
    for k in 2..=n {
        p[k] = ((2 * k - 1) as f64 * x * p[k - 1] - (k - 1) as f64 * p[k - 2]) / k as f64;
        d[k] = d[k - 2] + (2 * k - 1) as f64 * p[k - 1];
    }
    (p, d)
}

/// Upwind DG residual `R` of `u_t + a u_x = 0` (so `du/dt = -R`) with an
/// orthonormal Legendre basis on a uniform mesh. Coefficients are
/// element-major. `inflow` gives the exterior value at the left and right
/// ends; ignored when periodic.
pub fn scalar_dg_advection(
    u: &[f64],
    speed: f64,
    x0: f64,
    x1: f64,
    n_el: usize,
    p: usize,
    inflow: (f64, f64),
    periodic: bool,
) -> Vec<f64> {
    let np = p + 1;
    let h = (x1 - x0) / n_el as f64;
    let norm: Vec<f64> = (0..np).map(|i| ((2 * i + 1) as f64 / h).sqrt()).collect();
    let (lp, _) = legendre_values(p, -1.0);
    let (rp, _) = legendre_values(p, 1.0);
    let trace = |e: usize, right: bool| -> f64 {
        (0..np)
            .map(|i| u[e * np + i] * norm[i] * if right { rp[i] } else { lp[i] })
            .sum()
    };
    // flux at vertex k in the +x direction
    let flux: Vec<f64> = (0..=n_el)
        .map(|k| {
            let left = if k == 0 {
                if periodic { trace(n_el - 1, true) } else { inflow.0 }
            } else {
                trace(k - 1, true)
            };
            let right = if k == n_el {
                if periodic { trace(0, false) } else { inflow.1 }
            } else {
                trace(k, false)
            };
            speed * if speed > 0.0 { left } else if speed < 0.0 { right } else { 0.5 * (left + right) }
        })
        .collect();
    let (xq, wq) = legendre_rule(p + 3);
    let mut r = vec![0.0; n_el * np];
    for e in 0..n_el {
        for (&xi, &w) in xq.iter().zip(&wq) {
            let (pv, dv) = legendre_values(p, xi);
            let uq: f64 = (0..np).map(|k| u[e * np + k] * norm[k] * pv[k]).sum();
            for i in 0..np {
                // d/dx = 2/h d/dxi, dx = h/2 dxi
                r[e * np + i] -= w * speed * uq * norm[i] * dv[i];
            }
        }
        for i in 0..np {
            r[e * np + i] += norm[i] * (rp[i] * flux[e + 1] - lp[i] * flux[e]);
        }
    }
    r
}
