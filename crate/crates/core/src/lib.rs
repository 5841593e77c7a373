//! Spin as the quantized rotation of a rigid body described by Euler angles.
//!
//! The crate covers the rotation kinematics and metric of the Euler-angle
//! space, the differential spin operators built on it (evaluated exactly by
//! Taylor-jet arithmetic), the Wigner harmonics and their group inner
//! product, the classical motion of a charged spinning top, spinor
//! evolution in uniform fields, rotator spectra and the relativistic ring.

pub mod classical_dynamics;
pub mod error;
pub mod kinematics;
pub mod operator_calculus;
pub mod quadrature;
pub mod quantum_evolution;
pub mod relativistic_ring;
pub mod spin_basis;
pub mod units;
pub mod verification;

pub use classical_dynamics::{
    ClassicalState, DensityProfile, FieldConfig, ParticleModel, RigidBodyModel, Trajectory, Vec3,
};
pub use error::{Error, Result};
pub use kinematics::{EulerAngles, Mat3};
pub use operator_calculus::{AngleFunction, Frame, LadderSign, SpinAlgebra};
pub use quadrature::GroupQuadrature;
pub use quantum_evolution::{SpinHamiltonian, SpinorState, SpinorTrajectory};
pub use relativistic_ring::{RingModel, RingSolution};
pub use spin_basis::{BasisExpansion, SpinLabel, SpinMatrices};
pub use units::UnitSystem;
pub use verification::{run_verification, CheckResult, VerificationReport, VerifyOptions};
