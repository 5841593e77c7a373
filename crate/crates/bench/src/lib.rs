//! Benchmark fixtures shared by the bench targets.

use euler_spin_core::classical_dynamics::{ClassicalState, FieldConfig, ParticleModel, Vec3};

/// A generic top in the gradient field used by the drift checks.
pub fn top_in_gradient() -> (ClassicalState, ParticleModel, FieldConfig) {
    let model = ParticleModel::with_gtilde(1.0, 1.0, 0.4, 1.0, 1.0).expect("valid model");
    let state = ClassicalState::new(
        Vec3::new(0.5, -0.3, 0.2),
        Vec3::new(0.3, 0.2, -0.1),
        Vec3::new(0.5, -1.0, 1.5),
        0.0,
    );
    (state, model, FieldConfig::LinearStatic { b: 1.0 })
}
