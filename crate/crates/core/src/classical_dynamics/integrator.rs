//! Fixed-step RK4 for the coupled translation–rotation equations
//!
//!   m V̇ = q(E + V×B/c) + g̃I (∇B)·ω,
//!   I ω̇ = g̃I ω×B − g̃I (V·∇)B,
//!
//! with per-step energy and spin-precession diagnostics.

use serde::{Deserialize, Serialize};

use super::{hamiltonian, ClassicalState, FieldConfig, ParticleModel, Vec3};
use crate::error::{Error, Result};

/// Upper bound on the number of steps one call may take.
pub const MAX_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub dx: Vec3,
    pub dv: Vec3,
    pub domega: Vec3,
}

pub fn derivatives(state: &ClassicalState, model: &ParticleModel, fields: &FieldConfig) -> Result<Derivatives> {
    let (x, t) = (&state.x, state.t);
    let b = fields.magnetic(x, t);
    let e = fields.electric(x, t);
    let grad = fields.grad_b(x, t)?;
    let gi = model.gtilde * model.inertia;
    let force = model.charge * (e + state.v.cross(&b) / model.c) + gi * (grad * state.omega);
    let directional = grad.transpose() * state.v;
    Ok(Derivatives {
        dx: state.v,
        dv: force / model.mass,
        domega: model.gtilde * (state.omega.cross(&b) - directional),
    })
}

fn advance(s: &ClassicalState, d: &Derivatives, h: f64) -> ClassicalState {
    ClassicalState {
        x: s.x + d.dx * h,
        v: s.v + d.dv * h,
        omega: s.omega + d.domega * h,
        t: s.t + h,
    }
}

pub fn rk4_step(state: &ClassicalState, model: &ParticleModel, fields: &FieldConfig, dt: f64) -> Result<ClassicalState> {
    let k1 = derivatives(state, model, fields)?;
    let k2 = derivatives(&advance(state, &k1, 0.5 * dt), model, fields)?;
    let k3 = derivatives(&advance(state, &k2, 0.5 * dt), model, fields)?;
    let k4 = derivatives(&advance(state, &k3, dt), model, fields)?;
    let w = dt / 6.0;
    Ok(ClassicalState {
        x: state.x + (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx) * w,
        v: state.v + (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv) * w,
        omega: state.omega + (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega) * w,
        t: state.t + dt,
    })
}

/// Max-norm difference between one step of dt and two steps of dt/2; for
/// RK4 this estimates the local error of the half-step result times 16/15.
pub fn step_doubling_error(state: &ClassicalState, model: &ParticleModel, fields: &FieldConfig, dt: f64) -> Result<f64> {
    let full = rk4_step(state, model, fields, dt)?;
    let half = rk4_step(&rk4_step(state, model, fields, 0.5 * dt)?, model, fields, 0.5 * dt)?;
    let diffs = [(full.x - half.x).amax(), (full.v - half.v).amax(), (full.omega - half.omega).amax()];
    Ok(diffs.into_iter().fold(0.0, f64::max))
}

/// |Ṡ − g̃S×B| with Ṡ = Iω̇ + Ig̃(V·∇)B taken from the motion equations.
/// Only meaningful for static fields; NaN otherwise.
pub fn kinetic_spin_rate_residual(state: &ClassicalState, model: &ParticleModel, fields: &FieldConfig) -> Result<f64> {
    if !fields.is_static() {
        return Ok(f64::NAN);
    }
    let d = derivatives(state, model, fields)?;
    let b = fields.magnetic(&state.x, state.t);
    let grad = fields.grad_b(&state.x, state.t)?;
    let s = state.canonical_spin(model, fields);
    let s_dot = model.inertia * (d.domega + model.gtilde * (grad.transpose() * state.v));
    Ok((s_dot - model.gtilde * s.cross(&b)).norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub x: Vec3,
    pub v: Vec3,
    pub omega: Vec3,
    pub ke_trans: f64,
    pub ke_rot: f64,
    pub h: f64,
    pub spin_residual: f64,
}

impl TrajectoryRecord {
    fn new(state: &ClassicalState, model: &ParticleModel, fields: &FieldConfig) -> Result<Self> {
        Ok(Self {
            t: state.t,
            x: state.x,
            v: state.v,
            omega: state.omega,
            ke_trans: state.translational_energy(model),
            ke_rot: state.rotational_energy(model),
            h: hamiltonian(state, model, fields),
            spin_residual: kinetic_spin_rate_residual(state, model, fields)?,
        })
    }

    pub fn state(&self) -> ClassicalState {
        ClassicalState::new(self.x, self.v, self.omega, self.t)
    }

    pub fn kinetic_energy(&self) -> f64 {
        self.ke_trans + self.ke_rot
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
    /// Time between consecutive records, except possibly the last pair.
    pub record_spacing: f64,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryRecord {
        self.records.last().expect("trajectory holds the initial record")
    }

    fn max_relative_drift(&self, f: impl Fn(&TrajectoryRecord) -> f64) -> f64 {
        let e0 = f(&self.records[0]);
        let scale = e0.abs().max(f64::MIN_POSITIVE);
        self.records.iter().map(|r| (f(r) - e0).abs() / scale).fold(0.0, f64::max)
    }

    /// max_t |KE(t) − KE(0)| / KE(0), KE = ½mV² + ½Iω².
    pub fn max_relative_kinetic_drift(&self) -> f64 {
        self.max_relative_drift(TrajectoryRecord::kinetic_energy)
    }

    pub fn max_relative_hamiltonian_drift(&self) -> f64 {
        self.max_relative_drift(|r| r.h)
    }

    /// Ṡ from a five-point central difference of the recorded S(t) at
    /// each interior record, compared with g̃S×B and scaled by |g̃||S||B|.
    pub fn finite_difference_spin_residuals(&self, model: &ParticleModel, fields: &FieldConfig) -> Vec<f64> {
        let h = self.record_spacing;
        let n = self.records.len();
        // a shortened final step breaks the uniform spacing
        let regular = match self.records[..] {
            [.., a, b] if ((b.t - a.t) - h).abs() > 1e-9 * h => n - 1,
            _ => n,
        };
        let spins: Vec<Vec3> = self.records[..regular]
            .iter()
            .map(|r| r.state().canonical_spin(model, fields))
            .collect();
        (2..spins.len().saturating_sub(2))
            .map(|i| {
                let s_dot = (spins[i - 2] - 8.0 * spins[i - 1] + 8.0 * spins[i + 1] - spins[i + 2]) / (12.0 * h);
                let r = &self.records[i];
                let b = fields.magnetic(&r.x, r.t);
                let scale = (model.gtilde.abs() * spins[i].norm() * b.norm()).max(f64::MIN_POSITIVE);
                (s_dot - model.gtilde * spins[i].cross(&b)).norm() / scale
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrateOptions {
    /// Keep every n-th step (the final state is always kept).
    pub record_every: usize,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        Self { record_every: 1 }
    }
}

pub fn integrate(
    state0: &ClassicalState,
    model: &ParticleModel,
    fields: &FieldConfig,
    dt: f64,
    duration: f64,
) -> Result<Trajectory> {
    integrate_with_options(state0, model, fields, dt, duration, IntegrateOptions::default())
}

/// Steps of exactly dt up to t0 + T; if T is not a multiple of dt the last
/// step is shortened to land on it.
pub fn integrate_with_options(
    state0: &ClassicalState,
    model: &ParticleModel,
    fields: &FieldConfig,
    dt: f64,
    duration: f64,
    options: IntegrateOptions,
) -> Result<Trajectory> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::StepSizeInvalid(format!("dt must be positive, got {dt}")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::StepSizeInvalid(format!("T must be positive, got {duration}")));
    }
    if options.record_every == 0 {
        return Err(Error::InvalidParameter("record_every must be at least 1".into()));
    }
    let ratio = duration / dt;
    let full_steps = (ratio * (1.0 + 1e-12)).floor();
    if full_steps > MAX_STEPS as f64 {
        return Err(Error::StepSizeInvalid(format!("{ratio:.3e} steps exceed the limit of {MAX_STEPS}")));
    }
    let full_steps = full_steps as usize;
    let remainder = duration - full_steps as f64 * dt;
    // gradient availability is a precondition, checked before any work
    fields.grad_b(&state0.x, state0.t)?;

    let mut records = vec![TrajectoryRecord::new(state0, model, fields)?];
    let mut state = *state0;
    for n in 1..=full_steps {
        state = rk4_step(&state, model, fields, dt)?;
        state.t = state0.t + n as f64 * dt;
        if n % options.record_every == 0 || (n == full_steps && remainder <= 1e-12 * dt) {
            records.push(TrajectoryRecord::new(&state, model, fields)?);
        }
    }
    if remainder > 1e-12 * dt {
        state = rk4_step(&state, model, fields, remainder)?;
        records.push(TrajectoryRecord::new(&state, model, fields)?);
    }
    Ok(Trajectory {
        records,
        record_spacing: dt * options.record_every as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;
    use std::sync::Arc;

    use nalgebra::Matrix3;

    use crate::classical_dynamics::FieldProvider;

    fn model(gtilde: f64) -> ParticleModel {
        ParticleModel::with_gtilde(1.0, 1.0, 0.4, gtilde, 1.0).unwrap()
    }

    #[test]
    fn free_motion_is_constant() {
        let s0 = ClassicalState::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.1, -0.2, 0.3), Vec3::new(1.0, 0.5, -2.0), 0.0);
        let traj = integrate(&s0, &model(1.0), &FieldConfig::zero(), 0.01, 1.0).unwrap();
        let last = traj.last();
        assert_eq!(last.v, s0.v);
        assert_eq!(last.omega, s0.omega);
        assert!((last.x - (s0.x + s0.v)).norm() < 1e-13);
        assert_eq!(traj.records.len(), 101);
    }

    #[test]
    fn precession_in_uniform_field() {
        let (g, b0) = (0.8, 1.5);
        let period = TAU / (g * b0);
        let fields = FieldConfig::uniform_magnetic(Vec3::new(0.0, 0.0, b0));
        let s0 = ClassicalState::new(Vec3::zeros(), Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), 0.0);
        let traj = integrate(&s0, &model(g), &fields, period / 1000.0, 10.0 * period).unwrap();
        for r in &traj.records {
            assert!((r.omega.norm() - 1.0).abs() < 1e-9);
            // ω̇ = g̃ω×B turns ω clockwise about B
            let phase = -g * b0 * r.t;
            assert!((r.omega - Vec3::new(phase.cos(), phase.sin(), 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn invalid_steps_are_rejected() {
        let s0 = ClassicalState::new(Vec3::zeros(), Vec3::zeros(), Vec3::zeros(), 0.0);
        let m = model(1.0);
        let f = FieldConfig::zero();
        for (dt, t) in [(0.0, 1.0), (-0.1, 1.0), (0.1, 0.0), (f64::NAN, 1.0)] {
            assert!(matches!(integrate(&s0, &m, &f, dt, t), Err(Error::StepSizeInvalid(_))));
        }
    }

    #[test]
    fn uneven_duration_lands_on_end_time() {
        let s0 = ClassicalState::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::zeros(), 0.0);
        let traj = integrate(&s0, &model(1.0), &FieldConfig::zero(), 0.3, 1.0).unwrap();
        assert!((traj.last().t - 1.0).abs() < 1e-15);
        assert!((traj.last().x.x - 1.0).abs() < 1e-15);
    }

    #[test]
    fn step_doubling_is_fifth_order() {
        let s0 = ClassicalState::new(Vec3::new(0.3, -0.2, 0.1), Vec3::new(0.4, 0.2, -0.1), Vec3::new(0.5, -0.3, 0.8), 0.0);
        let f = FieldConfig::LinearStatic { b: 1.0 };
        let e1 = step_doubling_error(&s0, &model(1.0), &f, 0.2).unwrap();
        let e2 = step_doubling_error(&s0, &model(1.0), &f, 0.1).unwrap();
        let order = (e1 / e2).log2();
        assert!((order - 5.0).abs() < 0.5, "{order}");
    }

    struct Rotating;

    impl FieldProvider for Rotating {
        fn scalar_potential(&self, _: &Vec3, _: f64) -> f64 {
            0.0
        }
        fn vector_potential(&self, x: &Vec3, t: f64) -> Vec3 {
            0.5 * self.magnetic(x, t).cross(x)
        }
        fn magnetic(&self, _: &Vec3, t: f64) -> Vec3 {
            Vec3::new(t.cos(), t.sin(), 1.0)
        }
        fn electric(&self, _: &Vec3, _: f64) -> Vec3 {
            Vec3::zeros()
        }
        fn grad_b(&self, _: &Vec3, _: f64) -> Option<Matrix3<f64>> {
            Some(Matrix3::zeros())
        }
    }

    #[test]
    fn user_fields_report_no_static_residual() {
        let s0 = ClassicalState::new(Vec3::zeros(), Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), 0.0);
        let f = FieldConfig::UserSupplied(Arc::new(Rotating));
        let traj = integrate(&s0, &model(1.0), &f, 0.01, 0.1).unwrap();
        assert!(traj.records.iter().all(|r| r.spin_residual.is_nan()));
    }
}
