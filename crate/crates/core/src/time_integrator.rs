//! Explicit time stepping with a moving frame.
//!
//! One step of the frame-evolving scheme:
//!
//! 1. `h = c^n - tau (M^n)^{-1} (F^n c^n - Q^n(c^n))` in the frozen frame `n`;
//! 2. moments of `h` give the raw fields `V_f`, `T_f`, which are smoothed into
//!    frame `n+1`;
//! 3. `c^{n+1} = (M^{n+1})^{-1} (M^n h - tau G^n c^n)` with the frame time
//!    derivatives taken as forward differences.
//!
//! `F` and `Q` are applied once per step. The RK4 variant replaces step 1
//! by a classical RK4 step with the frame frozen across stages.

use std::sync::Arc;

use crate::collision::CollisionModel;
use crate::error::{KineticError, Result};
use crate::frame_transform::{physical_moments, AnsatzFrame, FrameSamples, FRAME_TEMPERATURE_FACTOR};
use crate::scalar::Real;
use crate::smoother::{CgSpace, Dirichlet, PenaltySpec, ReactionDiffusion};
use crate::spatial_dg::{
    apply_collision, apply_flux, apply_time_derivative, assemble_weighted_mass, conserved_totals, Boundaries,
    BoundaryKind, DgSpace, StateMatrix, WeightedMass,
};
use crate::velocity_space::VelocityBasis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// One-stage scheme with the frame evolving every step.
    EulerFrame,
    /// Classical RK4 in a frozen frame, frame refreshed once per step.
    Rk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameUpdate {
    /// Refresh the frame every `k` steps.
    Every(usize),
    /// Never move the frame.
    Frozen,
}

/// Turns raw moment fields into smoothed ansatz frames. The systems are
/// factorized once per run.
#[derive(Debug, Clone)]
pub struct FrameBuilder<T> {
    cg: Arc<CgSpace<T>>,
    temperature: ReactionDiffusion<T>,
    velocity: [ReactionDiffusion<T>; 3],
    t_min: T,
}

fn end_conditions<T: Real>(kind: &BoundaryKind<T>) -> (Option<T>, [Option<T>; 3]) {
    match kind {
        BoundaryKind::Inflow(s) | BoundaryKind::Outflow(s) => (
            Some(T::lit(FRAME_TEMPERATURE_FACTOR) * s.temperature),
            s.velocity.map(Some),
        ),
        BoundaryKind::Diffuse { wall_velocity, .. } => (None, wall_velocity.map(Some)),
        BoundaryKind::Specular => (None, [Some(T::zero()), None, None]),
    }
}

impl<T: Real> FrameBuilder<T> {
    /// Dirichlet data: the far-field state at inflow/outflow ends (frame
    /// temperature `2 T`), the wall velocity at diffuse walls and `V_1 = 0`
    /// at mirror walls. Everything else is natural.
    pub fn new(dg: &DgSpace<T>, c_smooth: T, t_min: T) -> Result<Self> {
        let cg = Arc::new(CgSpace::new(dg.mesh().clone(), dg.order().max(1)));
        let (tl, tr, vl, vr) = match dg.mesh().boundaries() {
            Boundaries::Periodic => (None, None, [None; 3], [None; 3]),
            Boundaries::Ends { left, right } => {
                let (tl, vl) = end_conditions(left);
                let (tr, vr) = end_conditions(right);
                (tl, tr, vl, vr)
            }
        };
        let op = |l: Option<T>, r: Option<T>| {
            ReactionDiffusion::new(
                cg.clone(),
                dg,
                c_smooth,
                Dirichlet { left: l, right: r },
                PenaltySpec::inactive(),
            )
        };
        Ok(Self {
            temperature: op(tl, tr)?,
            velocity: [op(vl[0], vr[0])?, op(vl[1], vr[1])?, op(vl[2], vr[2])?],
            cg,
            t_min,
        })
    }

    pub fn cg(&self) -> &Arc<CgSpace<T>> {
        &self.cg
    }

    pub fn t_min(&self) -> T {
        self.t_min
    }

    /// Frame from raw gas velocity and temperature at the DG quadrature
    /// points.
    pub fn build(&self, dg: &DgSpace<T>, raw_velocity: [&[T]; 3], raw_temperature: &[T]) -> Result<AnsatzFrame<T>> {
        let factor = T::lit(FRAME_TEMPERATURE_FACTOR);
        let scaled: Vec<T> = raw_temperature.iter().map(|&t| factor * t).collect();
        let t = self.temperature.solve(dg, &scaled)?;
        let v = [
            self.velocity[0].solve(dg, raw_velocity[0])?,
            self.velocity[1].solve(dg, raw_velocity[1])?,
            self.velocity[2].solve(dg, raw_velocity[2])?,
        ];
        let frame = AnsatzFrame::new(self.cg.clone(), t, v);
        frame.check_floor(dg, self.t_min)?;
        Ok(frame)
    }

    /// Frame from the moments of a state.
    pub fn from_state(
        &self,
        c: &StateMatrix<T>,
        samples: &FrameSamples<T>,
        dg: &DgSpace<T>,
        basis: &VelocityBasis<T>,
    ) -> Result<AnsatzFrame<T>> {
        let (v, t) = raw_frame_fields(c, samples, dg, basis)?;
        self.build(dg, [&v[0], &v[1], &v[2]], &t)
    }
}

/// Gas velocity and temperature at every DG quadrature point.
pub fn raw_frame_fields<T: Real>(
    c: &StateMatrix<T>,
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> Result<([Vec<T>; 3], Vec<T>)> {
    let n = dg.n_elements() * dg.n_quad();
    let mut v = [vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]];
    let mut t = vec![T::zero(); n];
    for e in 0..dg.n_elements() {
        for q in 0..dg.n_quad() {
            let u = crate::spatial_dg::evaluate_at(c, dg, e, dg.quad().nodes[q]);
            let m = physical_moments(&u, basis, samples.quad(e, q))?;
            let k = e * dg.n_quad() + q;
            for d in 0..3 {
                v[d][k] = m.velocity[d];
            }
            t[k] = m.temperature;
        }
    }
    Ok((v, t))
}

/// Diagnostics of one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport<T> {
    pub step: usize,
    pub time: T,
    pub dt: T,
    /// Mass, momentum (3) and energy after the step.
    pub totals: [T; 5],
    /// Max-norm change of the frame velocity and temperature.
    pub frame_change: (T, T),
    /// Largest conservation correction applied to the collision term.
    pub collision_fix: T,
}

/// Solution and frame at one time level.
#[derive(Debug, Clone)]
pub struct SolverState<T> {
    pub c: StateMatrix<T>,
    pub frame: AnsatzFrame<T>,
    pub time: T,
    pub step: usize,
}

/// Everything that stays fixed during a run.
#[derive(Debug, Clone)]
pub struct Solver<T> {
    pub dg: Arc<DgSpace<T>>,
    pub basis: Arc<VelocityBasis<T>>,
    pub collision: CollisionModel<T>,
    pub conservation_fix: bool,
    pub builder: FrameBuilder<T>,
    pub scheme: Scheme,
    pub frame_update: FrameUpdate,
}

impl<T: Real> Solver<T> {
    /// `(M^n)^{-1} (Q^n(c) - F^n c)` in a frozen frame; also returns the
    /// collision correction size.
    pub fn rate(
        &self,
        c: &StateMatrix<T>,
        samples: &FrameSamples<T>,
        mass: &WeightedMass<T>,
    ) -> Result<(StateMatrix<T>, T)> {
        let f = apply_flux(c, samples, &self.dg, &self.basis)?;
        let (q, fix) = apply_collision(c, samples, &self.dg, &self.basis, &self.collision, self.conservation_fix)?;
        Ok((mass.solve(&q.axpy(-T::one(), &f)), fix))
    }

    fn updates_frame(&self, step: usize) -> bool {
        match self.frame_update {
            FrameUpdate::Frozen => false,
            FrameUpdate::Every(k) => k > 0 && (step + 1).is_multiple_of(k),
        }
    }

    /// Advances `state` by `tau` with the configured scheme.
    pub fn step(&self, state: &mut SolverState<T>, tau: T) -> Result<StepReport<T>> {
        if !(tau > T::zero()) {
            return Err(KineticError::invalid("time step must be positive"));
        }
        let samples = state.frame.sample(&self.dg);
        let mass = assemble_weighted_mass(&samples, &self.dg, &self.basis)?;
        let (h, fix) = match self.scheme {
            Scheme::EulerFrame => {
                let (k, fix) = self.rate(&state.c, &samples, &mass)?;
                (state.c.axpy(tau, &k), fix)
            }
            Scheme::Rk4 => {
                let half = T::half() * tau;
                let (k1, f1) = self.rate(&state.c, &samples, &mass)?;
                let (k2, f2) = self.rate(&state.c.axpy(half, &k1), &samples, &mass)?;
                let (k3, f3) = self.rate(&state.c.axpy(half, &k2), &samples, &mass)?;
                let (k4, f4) = self.rate(&state.c.axpy(tau, &k3), &samples, &mass)?;
                let sixth = tau / T::lit(6.0);
                let mut h = state.c.axpy(sixth, &k1);
                h = h.axpy(T::two() * sixth, &k2);
                h = h.axpy(T::two() * sixth, &k3);
                h = h.axpy(sixth, &k4);
                (h, f1.max(f2).max(f3).max(f4))
            }
        };
        if !h.is_finite() {
            return Err(KineticError::NonFinite { step: state.step });
        }
        let (c_next, frame_next, change) = if self.updates_frame(state.step) {
            let mut frame_next = self.builder.from_state(&h, &samples, &self.dg, &self.basis)?;
            frame_next.clear_time_derivatives();
            let change = frame_next.difference_norms(&state.frame);
            let mut frame_n = state.frame.clone();
            frame_n.set_forward_difference(&frame_next, tau);
            let samples_n = frame_n.sample(&self.dg);
            let g = apply_time_derivative(&state.c, &samples_n, &self.dg, &self.basis);
            let rhs = mass.apply(&h).axpy(-tau, &g);
            let samples_next = frame_next.sample(&self.dg);
            let mass_next = assemble_weighted_mass(&samples_next, &self.dg, &self.basis)?;
            state.frame = frame_n;
            (mass_next.solve(&rhs), frame_next, change)
        } else {
            let mut frame = state.frame.clone();
            frame.clear_time_derivatives();
            (h, frame, (T::zero(), T::zero()))
        };
        if !c_next.is_finite() {
            return Err(KineticError::NonFinite { step: state.step });
        }
        state.c = c_next;
        state.frame = frame_next;
        state.time = state.time + tau;
        state.step += 1;
        let samples = state.frame.sample(&self.dg);
        Ok(StepReport {
            step: state.step,
            time: state.time,
            dt: tau,
            totals: conserved_totals(&state.c, &samples, &self.dg, &self.basis),
            frame_change: change,
            collision_fix: fix,
        })
    }

    /// Largest stable step by the CFL rule
    /// `tau <= cfl h / ((p + 1) max |sqrt(T) v_max + V_1|)`.
    pub fn cfl_time_step(&self, frame: &AnsatzFrame<T>, cfl: T) -> T {
        cfl_time_step(&frame.sample(&self.dg), &self.dg, &self.basis, cfl)
    }
}

pub fn cfl_time_step<T: Real>(samples: &FrameSamples<T>, dg: &DgSpace<T>, basis: &VelocityBasis<T>, cfl: T) -> T {
    let vmax = basis.nodes1d().iter().fold(T::zero(), |m, &v| m.max(v.abs()));
    let mut speed = T::zero();
    for p in samples.points() {
        speed = speed.max(p.temperature.sqrt() * vmax + p.velocity[0].abs());
    }
    let p1 = T::from_usize_lossy(dg.order() + 1);
    cfl * dg.mesh().min_element_size() / (p1 * speed)
}

/// Quadrature approximation of `int int f ln f`; nodes with `g <= 0` only
/// contribute through the weight factor.
pub fn entropy<T: Real>(
    c: &StateMatrix<T>,
    samples: &FrameSamples<T>,
    dg: &DgSpace<T>,
    basis: &VelocityBasis<T>,
) -> T {
    let mut total = T::zero();
    for e in 0..dg.n_elements() {
        for q in 0..dg.n_quad() {
            let u = crate::spatial_dg::evaluate_at(c, dg, e, dg.quad().nodes[q]);
            let (_, wq) = dg.quad_point(e, q);
            let jac = wq * samples.quad(e, q).temperature.pow_three_halves();
            total = total + jac * velocity_entropy(&u, basis);
        }
    }
    total
}

/// `int f ln f dv` of one standardized velocity vector.
pub fn velocity_entropy<T: Real>(g: &[T], basis: &VelocityBasis<T>) -> T {
    g.iter()
        .enumerate()
        .map(|(ip, &gj)| {
            let v = basis.node(ip);
            let v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            let log = if gj > T::zero() { gj.ln() } else { T::zero() };
            basis.weight(ip) * gj * (log - v2)
        })
        .sum()
}
