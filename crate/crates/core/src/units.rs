//! Physical constants and the three unit systems used by the library.
//!
//! Everything defaults to natural units (ħ = c = 1). The MeV–fm system is
//! used for rotator excitation energies, and Gaussian cgs for the ring model
//! where the input masses are given in grams.

use serde::{Deserialize, Serialize};

/// ħc in MeV·fm (CODATA 2018).
pub const HBAR_C_MEV_FM: f64 = 197.326_980_4;
/// ħ in erg·s.
pub const HBAR_CGS: f64 = 1.054_571_817e-27;
/// Speed of light in cm/s.
pub const C_CGS: f64 = 2.997_924_58e10;
/// One MeV in erg.
pub const MEV_IN_ERG: f64 = 1.602_176_634e-6;
/// One fermi in cm.
pub const FM_IN_CM: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UnitSystem {
    /// ħ = c = 1.
    #[default]
    Natural,
    /// Energies in MeV, lengths in fm, masses as rest energies mc² in MeV.
    /// In this system ħ is expressed through ħc and c = 1.
    MevFm,
    /// Gaussian cgs: grams, centimetres, seconds.
    Cgs,
}

impl UnitSystem {
    pub fn hbar(self) -> f64 {
        match self {
            UnitSystem::Natural => 1.0,
            UnitSystem::MevFm => HBAR_C_MEV_FM,
            UnitSystem::Cgs => HBAR_CGS,
        }
    }

    pub fn c(self) -> f64 {
        match self {
            UnitSystem::Natural | UnitSystem::MevFm => 1.0,
            UnitSystem::Cgs => C_CGS,
        }
    }

    /// ħc in the system's own energy × length unit.
    pub fn hbar_c(self) -> f64 {
        self.hbar() * self.c()
    }
}

pub fn fm_to_cm(fm: f64) -> f64 {
    fm * FM_IN_CM
}

pub fn cm_to_fm(cm: f64) -> f64 {
    cm / FM_IN_CM
}

/// Rest energy mc² in MeV of a mass given in grams.
pub fn grams_to_mev(grams: f64) -> f64 {
    grams * C_CGS * C_CGS / MEV_IN_ERG
}

/// Mass in grams of a rest energy given in MeV.
pub fn mev_to_grams(mev: f64) -> f64 {
    mev * MEV_IN_ERG / (C_CGS * C_CGS)
}

/// Reduce an angle to [0, 2π) for display. Stored angles are never reduced.
pub fn reduce_angle(angle: f64) -> f64 {
    angle.rem_euclid(std::f64::consts::TAU)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn natural_units_are_unity() {
        assert_eq!(UnitSystem::Natural.hbar(), 1.0);
        assert_eq!(UnitSystem::Natural.c(), 1.0);
        assert_eq!(UnitSystem::default(), UnitSystem::Natural);
    }

    #[test]
    fn cgs_hbar_c_matches_mev_fm() {
        // ħc[erg cm] converted to MeV fm
        let hbar_c = UnitSystem::Cgs.hbar_c() / MEV_IN_ERG / FM_IN_CM;
        assert!((hbar_c - HBAR_C_MEV_FM).abs() / HBAR_C_MEV_FM < 1e-8);
    }

    #[test]
    fn reduce_angle_wraps() {
        assert!((reduce_angle(7.0) - (7.0 - std::f64::consts::TAU)).abs() < 1e-15);
        assert!((reduce_angle(-0.5) - (std::f64::consts::TAU - 0.5)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn conversions_round_trip(x in 1e-30f64..1e30) {
            let back = mev_to_grams(grams_to_mev(x));
            prop_assert!((back - x).abs() <= 4.0 * f64::EPSILON * x);
            let back = cm_to_fm(fm_to_cm(x));
            prop_assert!((back - x).abs() <= 4.0 * f64::EPSILON * x);
        }
    }
}
