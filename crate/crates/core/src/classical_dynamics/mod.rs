//! Classical charged rigid rotator: moments from density profiles, the
//! Lagrangian and Hamiltonian, the translation–rotation motion equations,
//! and rotational energies of a body with an anisotropic charge tensor.

mod fields;
mod integrator;
mod profile;

pub use fields::{FieldClass, FieldConfig, FieldProvider, Vec3};
pub use integrator::{
    derivatives, integrate, integrate_with_options, kinetic_spin_rate_residual, rk4_step,
    step_doubling_error, Derivatives, IntegrateOptions, Trajectory, TrajectoryRecord,
};
pub use profile::{moments_from_profiles, DensityProfile, ParticleModel, NORMALIZATION_TOLERANCE};

use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{a_matrix, rotation_matrix, EulerAngles};

/// Centre-of-mass position and velocity, angular velocity, time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalState {
    pub x: Vec3,
    pub v: Vec3,
    pub omega: Vec3,
    pub t: f64,
}

impl ClassicalState {
    pub fn new(x: Vec3, v: Vec3, omega: Vec3, t: f64) -> Self {
        Self { x, v, omega, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.iter().chain(self.v.iter()).chain(self.omega.iter()).all(|c| c.is_finite()) && self.t.is_finite()
    }

    pub fn translational_energy(&self, model: &ParticleModel) -> f64 {
        0.5 * model.mass * self.v.norm_squared()
    }

    pub fn rotational_energy(&self, model: &ParticleModel) -> f64 {
        0.5 * model.inertia * self.omega.norm_squared()
    }

    pub fn kinetic_energy(&self, model: &ParticleModel) -> f64 {
        self.translational_energy(model) + self.rotational_energy(model)
    }

    /// P̃ = mV + qA/c.
    pub fn canonical_momentum(&self, model: &ParticleModel, fields: &FieldConfig) -> Vec3 {
        model.mass * self.v + model.charge * fields.vector_potential(&self.x, self.t) / model.c
    }

    /// S = Iω + Ig̃B.
    pub fn canonical_spin(&self, model: &ParticleModel, fields: &FieldConfig) -> Vec3 {
        model.inertia * (self.omega + model.gtilde * fields.magnetic(&self.x, self.t))
    }
}

/// H = (P̃ − qA/c)²/2m + (S − Ig̃B)²/2I + qφ, evaluated from the
/// canonical momenta of the state.
pub fn hamiltonian(state: &ClassicalState, model: &ParticleModel, fields: &FieldConfig) -> f64 {
    let a = fields.vector_potential(&state.x, state.t);
    let b = fields.magnetic(&state.x, state.t);
    let p = state.canonical_momentum(model, fields);
    let s = state.canonical_spin(model, fields);
    let kin = p - model.charge * a / model.c;
    let rot = s - model.inertia * model.gtilde * b;
    kin.norm_squared() / (2.0 * model.mass)
        + rot.norm_squared() / (2.0 * model.inertia)
        + model.charge * fields.scalar_potential(&state.x, state.t)
}

/// Space-fixed angular velocity ω = (a)·α̇.
pub fn angular_velocity(angles: &EulerAngles, rates: &Vec3) -> Vec3 {
    a_matrix(angles) * rates
}

/// ½I[(α̇¹)² + (α̇³)² + 2α̇¹α̇³cos α² + (α̇²)²].
pub fn rotational_kinetic_energy(angles: &EulerAngles, rates: &Vec3, inertia: f64) -> f64 {
    let (r1, r2, r3) = (rates.x, rates.y, rates.z);
    0.5 * inertia * (r1 * r1 + r3 * r3 + 2.0 * r1 * r3 * angles.alpha2.cos() + r2 * r2)
}

/// L = ½mV² − qφ + qA·V/c + T_rot + g̃I B_i a_ib α̇^b, with X at the state
/// position and the angular velocity carried by the Euler-angle rates.
pub fn lagrangian(
    state: &ClassicalState,
    angles: &EulerAngles,
    rates: &Vec3,
    model: &ParticleModel,
    fields: &FieldConfig,
) -> f64 {
    let (x, t) = (&state.x, state.t);
    let translational = 0.5 * model.mass * state.v.norm_squared() - model.charge * fields.scalar_potential(x, t)
        + model.charge * fields.vector_potential(x, t).dot(&state.v) / model.c;
    let magnetic = model.gtilde * model.inertia * fields.magnetic(x, t).dot(&angular_velocity(angles, rates));
    translational + rotational_kinetic_energy(angles, rates, model.inertia) + magnetic
}

/// Principal moments and a symmetric body-frame charge tensor with
/// μ̄_i = Q̄_ij ω̄_j.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyModel {
    pub principal_moments: [f64; 3],
    pub charge_tensor: Matrix3<f64>,
}

impl RigidBodyModel {
    pub fn new(principal_moments: [f64; 3], charge_tensor: Matrix3<f64>) -> Result<Self> {
        if principal_moments.iter().any(|&i| !(i.is_finite() && i > 0.0)) {
            return Err(Error::InvalidParameter("principal moments must be positive".into()));
        }
        let scale = charge_tensor.abs().max().max(f64::MIN_POSITIVE);
        if (charge_tensor - charge_tensor.transpose()).abs().max() > 1e-14 * scale {
            return Err(Error::InvalidParameter("charge tensor must be symmetric".into()));
        }
        Ok(Self {
            principal_moments,
            charge_tensor,
        })
    }

    /// Q̄ = g̃·diag(Ī): the case whose interaction reduces to −g̃B̄·S̄.
    pub fn proportional(principal_moments: [f64; 3], gtilde: f64) -> Result<Self> {
        let q = Matrix3::from_diagonal(&Vec3::from(principal_moments)) * gtilde;
        Self::new(principal_moments, q)
    }
}

/// Body-frame field components B̄_i = R_ik B_k.
pub fn body_frame_field(angles: &EulerAngles, b: &Vec3) -> Vec3 {
    rotation_matrix(angles) * b
}

/// Returns (H_rot, H_int) with H_rot = ½Ī_i⁻¹(S̄_i − Q̄_ik B̄_k)² and
/// H_int = −Ī_i⁻¹(Q̄B̄)_i S̄_i, its cross term.
pub fn anisotropic_energy(sbar: &Vec3, body: &RigidBodyModel, bbar: &Vec3) -> (f64, f64) {
    let qb = body.charge_tensor * bbar;
    let mut h_rot = 0.0;
    let mut h_int = 0.0;
    for i in 0..3 {
        let inv = 1.0 / body.principal_moments[i];
        let d = sbar[i] - qb[i];
        h_rot += 0.5 * inv * d * d;
        // symmetrized product ½(S̄B̄ + B̄S̄) collapses classically
        h_int -= 0.5 * inv * qb[i] * (sbar[i] + sbar[i]);
    }
    (h_rot, h_int)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_model(inertia: f64, gtilde: f64) -> ParticleModel {
        ParticleModel::with_gtilde(1.0, 1.0, inertia, gtilde, 1.0).unwrap()
    }

    #[test]
    fn free_hamiltonian_is_kinetic() {
        let m = unit_model(0.5, 0.7);
        let s = ClassicalState::new(Vec3::zeros(), Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 2.0), 0.0);
        assert!((hamiltonian(&s, &m, &FieldConfig::zero()) - 1.5).abs() < 1e-15);
        let uniform = FieldConfig::uniform_magnetic(Vec3::new(0.0, 0.0, 1.0));
        assert!((hamiltonian(&s, &m, &uniform) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn gtilde_follows_its_definition() {
        let m = ParticleModel::new(2.0, 3.0, 1.0, 2.0, 4.0).unwrap();
        assert!((m.gtilde - 2.0 * 3.0 / (2.0 * 2.0 * 4.0)).abs() < 1e-15);
        assert!(ParticleModel::new(0.0, 1.0, 1.0, 1.0, 1.0).is_err());
        assert!(ParticleModel::new(1.0, 1.0, -1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn rotational_energy_examples() {
        let a = EulerAngles::new(0.3, 0.9, -0.4);
        assert!((rotational_kinetic_energy(&a, &Vec3::new(1.0, 0.0, 0.0), 1.0) - 0.5).abs() < 1e-15);
        let a = EulerAngles::new(0.3, std::f64::consts::FRAC_PI_2, -0.4);
        assert!((rotational_kinetic_energy(&a, &Vec3::new(1.0, 0.0, 1.0), 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn lagrangian_at_rest_is_minus_potential() {
        let m = unit_model(1.0, 1.0);
        let f = FieldConfig::UniformStatic {
            b: Vec3::zeros(),
            e: Vec3::new(1.0, 0.0, 0.0),
        };
        let s = ClassicalState::new(Vec3::new(2.0, 0.0, 0.0), Vec3::zeros(), Vec3::zeros(), 0.0);
        let l = lagrangian(&s, &EulerAngles::new(0.0, 1.0, 0.0), &Vec3::zeros(), &m, &f);
        assert!((l - 2.0).abs() < 1e-15);
    }

    #[test]
    fn anisotropic_examples() {
        let body = RigidBodyModel::new([1.0, 2.0, 3.0], Matrix3::zeros()).unwrap();
        let s = Vec3::new(1.0, 2.0, 3.0);
        let (h_rot, h_int) = anisotropic_energy(&s, &body, &Vec3::new(0.3, 0.1, 2.0));
        assert!((h_rot - (0.5 + 1.0 + 1.5)).abs() < 1e-15);
        assert_eq!(h_int, 0.0);
        let g = 0.37;
        let body = RigidBodyModel::proportional([1.0, 2.0, 3.0], g).unwrap();
        let (_, h_int) = anisotropic_energy(&Vec3::new(0.0, 0.0, 1.0), &body, &Vec3::new(0.0, 0.0, 2.0));
        assert!((h_int + 2.0 * g).abs() < 1e-15);
        let mut asym = Matrix3::zeros();
        asym[(0, 1)] = 1.0;
        assert!(RigidBodyModel::new([1.0; 3], asym).is_err());
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-3.0f64..3.0).prop_map(Vec3::from)
    }

    proptest! {
        #[test]
        fn hamiltonian_is_kinetic_plus_potential(
            x in vec3(), v in vec3(), w in vec3(), b in vec3(), e in vec3(),
            lb in -2.0f64..2.0, mass in 0.1f64..5.0, inertia in 0.1f64..5.0, q in -2.0f64..2.0, g in -3.0f64..3.0,
        ) {
            let model = ParticleModel::new(mass, q, inertia, g, 1.0).unwrap();
            let state = ClassicalState::new(x, v, w, 0.0);
            for fields in [FieldConfig::UniformStatic { b, e }, FieldConfig::LinearStatic { b: lb }] {
                let h = hamiltonian(&state, &model, &fields);
                let expect = state.kinetic_energy(&model) + q * fields.scalar_potential(&x, 0.0);
                prop_assert!((h - expect).abs() <= 1e-12 * expect.abs().max(1.0));
            }
        }

        #[test]
        fn euler_angle_energy_matches_angular_velocity(
            a in prop::array::uniform3(-6.0f64..6.0), r in vec3(), inertia in 0.1f64..4.0,
        ) {
            let angles = EulerAngles::from_array(a);
            let w = angular_velocity(&angles, &r);
            let t = rotational_kinetic_energy(&angles, &r, inertia);
            prop_assert!((t - 0.5 * inertia * w.norm_squared()).abs() <= 1e-13 * t.max(1.0));
        }

        #[test]
        fn anisotropic_expansion(
            moments in prop::array::uniform3(0.2f64..4.0), qd in prop::array::uniform3(-2.0f64..2.0),
            s in vec3(), b in vec3(),
        ) {
            let body = RigidBodyModel::new(moments, Matrix3::from_diagonal(&Vec3::from(qd))).unwrap();
            let (h_rot, h_int) = anisotropic_energy(&s, &body, &b);
            let qb = body.charge_tensor * b;
            let free: f64 = (0..3).map(|i| s[i] * s[i] / (2.0 * moments[i])).sum();
            let quad: f64 = (0..3).map(|i| 0.5 * qb[i] * qb[i] / moments[i]).sum();
            prop_assert!((h_rot - (free + h_int + quad)).abs() <= 1e-12 * h_rot.abs().max(1.0));
        }
    }
}
