//! Rotator spectra: the symmetric top and the spherical s → s' gap.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::spin_basis::body_spin_matrices;
use crate::units::UnitSystem;

fn check_moments(i1: f64, i3: f64) -> Result<()> {
    if i1.is_finite() && i3.is_finite() && i1 > 0.0 && i3 > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("moments must be positive, got I1 = {i1}, I3 = {i3}")))
    }
}

/// (m̄, E) for m̄ = s … −s with
/// E = ½[s(s+1)ħ²/I₁ + (1/I₃ − 1/I₁) m̄²ħ²].
pub fn symmetric_top_spectrum_hbar(two_s: i32, i1: f64, i3: f64, hbar: f64) -> Result<Vec<(f64, f64)>> {
    check_moments(i1, i3)?;
    if two_s < 0 {
        return Err(Error::InvalidParameter("2s must be nonnegative".into()));
    }
    let s = two_s as f64 / 2.0;
    let h2 = hbar * hbar;
    Ok((-two_s..=two_s)
        .rev()
        .step_by(2)
        .map(|two_mbar| {
            let mbar = two_mbar as f64 / 2.0;
            (mbar, 0.5 * (s * (s + 1.0) * h2 / i1 + (1.0 / i3 - 1.0 / i1) * mbar * mbar * h2))
        })
        .collect())
}

pub fn symmetric_top_spectrum(two_s: i32, i1: f64, i3: f64) -> Result<Vec<(f64, f64)>> {
    symmetric_top_spectrum_hbar(two_s, i1, i3, 1.0)
}

/// ½[ΣS̄_iS̄_i/I₁ + (1/I₃ − 1/I₁)S̄₃S̄₃] built from body-frame matrices.
pub fn symmetric_top_matrix(two_s: i32, i1: f64, i3: f64, hbar: f64) -> Result<CMatrix> {
    check_moments(i1, i3)?;
    let m = body_spin_matrices(two_s, hbar);
    let casimir = &m.sx * &m.sx + &m.sy * &m.sy + &m.sz * &m.sz;
    let axial = &m.sz * &m.sz;
    Ok((casimir * Complex64::new(1.0 / i1, 0.0) + axial * Complex64::new(1.0 / i3 - 1.0 / i1, 0.0)) * Complex64::new(0.5, 0.0))
}

/// Eigenvalues of [`symmetric_top_matrix`], ascending.
pub fn symmetric_top_levels(two_s: i32, i1: f64, i3: f64, hbar: f64) -> Result<Vec<f64>> {
    let mut e: Vec<f64> = symmetric_top_matrix(two_s, i1, i3, hbar)?.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// ΔE = [s'(s'+1) − s(s+1)] ħ²/2I with I = ma², written as
/// (ħc)²/(2 mc² a²). Mass and length are in the units of `units`: rest
/// energy in MeV and fm for mev-fm, grams and cm for cgs.
pub fn rotator_transition_energy(mass: f64, radius: f64, s_from: f64, s_to: f64, units: UnitSystem) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0 && radius.is_finite() && radius > 0.0) {
        return Err(Error::InvalidParameter("mass and radius must be positive".into()));
    }
    for s in [s_from, s_to] {
        if !(s >= 0.0 && (2.0 * s).fract() == 0.0) {
            return Err(Error::InvalidParameter(format!("spin {s} is not a nonnegative half-integer")));
        }
    }
    let rest_energy = mass * units.c() * units.c();
    let hc = units.hbar_c();
    Ok((s_to * (s_to + 1.0) - s_from * (s_from + 1.0)) * hc * hc / (2.0 * rest_energy * radius * radius))
}
