//! A spinning charged ring treated relativistically: the tangential speed
//! that carries a given spin stays below c however small the ring.
//!
//! With Λ = S/(mac) the kinetic spin S = γmaβc gives β = Λ/√(1+Λ²) and
//! γ = √(1+Λ²), so βγ = Λ exactly, against the naive speed β = Λ.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::UnitSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingModel {
    /// Mass in the unit system's mass unit (rest energy in MeV for mev-fm).
    pub mass: f64,
    /// Radius in the unit system's length unit.
    pub radius: f64,
    /// Spin in units of ħ.
    pub spin_target: f64,
}

impl RingModel {
    pub fn new(mass: f64, radius: f64, spin_target: f64) -> Result<Self> {
        for (name, v) in [("mass", mass), ("radius", radius), ("spin", spin_target)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("ring {name} must be positive, got {v}")));
            }
        }
        Ok(Self {
            mass,
            radius,
            spin_target,
        })
    }

    /// A ring carrying spin ħ/2.
    pub fn spin_half(mass: f64, radius: f64) -> Result<Self> {
        Self::new(mass, radius, 0.5)
    }

    /// Λ = S/(mac), computed as S·ħc/(mc²·a).
    pub fn lambda(&self, units: UnitSystem) -> f64 {
        let c = units.c();
        self.spin_target * units.hbar_c() / (self.mass * c * c * self.radius)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingSolution {
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    /// 1 − β, evaluated without cancellation.
    pub one_minus_beta: f64,
}

pub fn ring_solution(model: &RingModel, units: UnitSystem) -> RingSolution {
    solution_for_lambda(model.lambda(units))
}

pub fn solution_for_lambda(lambda: f64) -> RingSolution {
    // hypot avoids overflow of 1 + Λ² for extreme Λ
    let gamma = lambda.hypot(1.0);
    RingSolution {
        lambda,
        beta: lambda / gamma,
        gamma,
        one_minus_beta: 1.0 / (gamma * (gamma + lambda)),
    }
}

/// The nonrelativistic speed β = Λ, which exceeds 1 for small rings.
pub fn nonrelativistic_beta(model: &RingModel, units: UnitSystem) -> f64 {
    model.lambda(units)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::{fm_to_cm, HBAR_CGS};
    use proptest::prelude::*;

    #[test]
    fn symmetric_point() {
        let r = solution_for_lambda(1.0);
        assert!((r.beta - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((r.gamma - std::f64::consts::SQRT_2).abs() < 1e-15);
        let m = RingModel::spin_half(0.5, 1.0).unwrap();
        assert_eq!(m.lambda(UnitSystem::Natural), 1.0);
    }

    #[test]
    fn electron_like_ring() {
        let m = RingModel::spin_half(1e-27, fm_to_cm(1e-2)).unwrap();
        let r = ring_solution(&m, UnitSystem::Cgs);
        assert!(r.lambda >= 1e4);
        assert!((r.one_minus_beta - 0.5 / (r.lambda * r.lambda)).abs() < 1e-6 * r.one_minus_beta);
        assert!(r.one_minus_beta < 1e-8);
        assert!(nonrelativistic_beta(&m, UnitSystem::Cgs) >= 1e4);
    }

    #[test]
    fn baryon_like_ring() {
        let m = RingModel::spin_half(1.8e-24, fm_to_cm(1.0)).unwrap();
        let r = ring_solution(&m, UnitSystem::Cgs);
        assert!(r.beta <= 0.1);
        let naive = nonrelativistic_beta(&m, UnitSystem::Cgs);
        assert!((naive - 0.0977).abs() < 1e-3);
        assert!((r.beta - naive * (1.0 - naive * naive / 2.0)).abs() < naive.powi(5));
    }

    #[test]
    fn heavy_limit() {
        let m = RingModel::spin_half(1e30, 1.0).unwrap();
        assert!(nonrelativistic_beta(&m, UnitSystem::Cgs) < 1e-50);
        assert!(RingModel::new(0.0, 1.0, 0.5).is_err());
    }

    proptest! {
        #[test]
        fn subluminal_and_consistent(log_l in -8.0f64..8.0) {
            let lambda = 10f64.powf(log_l);
            let r = solution_for_lambda(lambda);
            // β itself rounds to 1.0 beyond Λ ≈ 1e8; 1 − β does not
            prop_assert!(r.beta > 0.0 && r.beta <= 1.0 && r.one_minus_beta > 0.0);
            prop_assert!(r.beta <= lambda);
            prop_assert!((r.beta * r.gamma / lambda - 1.0).abs() < 1e-12);
            prop_assert!(((1.0 - r.beta) - r.one_minus_beta).abs() < 1e-15 + 1e-12 * r.one_minus_beta.max(1e-4));
            let above = solution_for_lambda(lambda * 1.001);
            prop_assert!(above.beta > r.beta || above.one_minus_beta < r.one_minus_beta);
        }

        #[test]
        fn kinetic_spin_is_recovered(mass in 1e-28f64..1e-22, radius in 1e-15f64..1e-12) {
            let m = RingModel::spin_half(mass, radius).unwrap();
            let r = ring_solution(&m, UnitSystem::Cgs);
            let c = UnitSystem::Cgs.c();
            let spin = mass * r.gamma * radius * radius * (r.beta * c / radius);
            prop_assert!((spin / (0.5 * HBAR_CGS) - 1.0).abs() < 1e-12);
        }
    }
}
