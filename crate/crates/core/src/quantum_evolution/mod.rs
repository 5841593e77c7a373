//! Spin-sector Schrödinger evolution in a spatially uniform field.
//!
//! With the translational state separated out, the wave function of one
//! s-sector is a (2s+1)-component spinor U evolving under
//! iħ dU/dt = (H₁ + H₂)U, where H₁ = s(s+1)ħ²/2I + ½Ig̃²B² (plus optional
//! constants) is scalar and H₂ = −g̃B·S.

mod spectrum;

pub use spectrum::{
    rotator_transition_energy, symmetric_top_levels, symmetric_top_matrix, symmetric_top_spectrum,
    symmetric_top_spectrum_hbar,
};

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical_dynamics::{ParticleModel, Vec3};
use crate::error::{Error, Result};
use crate::quadrature::GroupQuadrature;
use crate::spin_basis::{spin_matrices_from_harmonics, spin_matrices_hbar, SpinLabel, SpinMatrices};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest admissible dt·‖H‖/ħ.
pub const MAX_PHASE_PER_STEP: f64 = 0.1;
/// Allowed |‖U‖² − 1| for a state handed to the constructor.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// One s-sector spinor, components ordered m = s … −s.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorState {
    pub two_s: i32,
    pub amplitudes: CVector,
    pub t: f64,
}

impl SpinorState {
    pub fn new(two_s: i32, amplitudes: Vec<Complex64>, t: f64) -> Result<Self> {
        let state = Self::unchecked(two_s, amplitudes, t)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidParameter(format!("spinor norm² is {norm}, expected 1")));
        }
        Ok(state)
    }

    /// Rescales the amplitudes to unit norm.
    pub fn normalized(two_s: i32, amplitudes: Vec<Complex64>, t: f64) -> Result<Self> {
        let mut state = Self::unchecked(two_s, amplitudes, t)?;
        let norm = state.norm_sqr().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter("spinor has zero or non-finite norm".into()));
        }
        state.amplitudes /= Complex64::new(norm, 0.0);
        Ok(state)
    }

    fn unchecked(two_s: i32, amplitudes: Vec<Complex64>, t: f64) -> Result<Self> {
        if two_s < 0 || amplitudes.len() != (two_s + 1) as usize {
            return Err(Error::InvalidParameter(format!(
                "spinor for 2s = {two_s} needs {} amplitudes, got {}",
                two_s + 1,
                amplitudes.len()
            )));
        }
        Ok(Self {
            two_s,
            amplitudes: CVector::from_vec(amplitudes),
            t,
        })
    }

    /// The m = `two_m`/2 basis state.
    pub fn basis(two_s: i32, two_m: i32) -> Result<Self> {
        if two_m.abs() > two_s || (two_s - two_m) % 2 != 0 {
            return Err(Error::InvalidParameter(format!("2m = {two_m} is not allowed for 2s = {two_s}")));
        }
        let mut amps = vec![Complex64::default(); (two_s + 1) as usize];
        amps[((two_s - two_m) / 2) as usize] = Complex64::new(1.0, 0.0);
        Self::new(two_s, amps, 0.0)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        self.amplitudes.dotc(&(op * &self.amplitudes))
    }

    /// (⟨S₁⟩, ⟨S₂⟩, ⟨S₃⟩).
    pub fn spin_expectation(&self, spins: &SpinMatrices) -> [f64; 3] {
        spins.components().map(|s| self.expectation(s).re)
    }
}

/// Field seen by the spin: constant, or an arbitrary function of time.
#[derive(Clone)]
pub enum FieldDrive {
    Constant(Vec3),
    Varying(Arc<dyn Fn(f64) -> Vec3 + Send + Sync>),
}

impl fmt::Debug for FieldDrive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant(b) => write!(f, "Constant({:?})", b.as_slice()),
            Self::Varying(_) => f.write_str("Varying(..)"),
        }
    }
}

impl FieldDrive {
    pub fn at(&self, t: f64) -> Vec3 {
        match self {
            Self::Constant(b) => *b,
            Self::Varying(f) => f(t),
        }
    }

    pub fn is_static(&self) -> bool {
        matches!(self, Self::Constant(_))
    }
}

/// H = H₁ + H₂ for one s-sector.
#[derive(Debug, Clone)]
pub struct SpinHamiltonian {
    pub two_s: i32,
    pub hbar: f64,
    pub gtilde: f64,
    pub inertia: f64,
    /// Constant part of H₁ beyond the rotator and field terms (qφ, plane
    /// wave kinetic energy).
    pub scalar_offset: f64,
    /// H₁ at t = 0.
    pub h1_scalar: f64,
    /// H₂ at t = 0.
    pub h2_matrix: CMatrix,
    pub drive: FieldDrive,
    /// Whether H₁ carries s(s+1)ħ²/2I and ½Ig̃²B²; switching them off must
    /// leave every ⟨S_i⟩ unchanged.
    pub include_scalar_terms: bool,
    /// 2m̄ of the harmonics the spin matrices were projected from, if any.
    pub mbar_sector: Option<i32>,
    spins: SpinMatrices,
}

/// H₂ = −g̃[B₃S₃ + ½(B₋S₊ + B₊S₋)], B± = B₁ ± iB₂.
pub fn field_coupling(spins: &SpinMatrices, gtilde: f64, b: &Vec3) -> CMatrix {
    let b_plus = Complex64::new(b.x, b.y);
    let b_minus = b_plus.conj();
    let h = &spins.sz * Complex64::new(b.z, 0.0) + (&spins.sp * b_minus + &spins.sm * b_plus) * Complex64::new(0.5, 0.0);
    h * Complex64::new(-gtilde, 0.0)
}

impl SpinHamiltonian {
    pub fn new(two_s: i32, model: &ParticleModel, drive: FieldDrive, hbar: f64, scalar_offset: f64) -> Result<Self> {
        if two_s < 0 {
            return Err(Error::InvalidParameter("2s must be nonnegative".into()));
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidParameter(format!("hbar must be positive, got {hbar}")));
        }
        let spins = spin_matrices_hbar(two_s, hbar);
        let mut h = Self {
            two_s,
            hbar,
            gtilde: model.gtilde,
            inertia: model.inertia,
            scalar_offset,
            h1_scalar: 0.0,
            h2_matrix: CMatrix::zeros(0, 0),
            drive,
            include_scalar_terms: true,
            mbar_sector: None,
            spins,
        };
        h.h1_scalar = h.h1_at(0.0);
        h.h2_matrix = h.h2_at(0.0);
        Ok(h)
    }

    pub fn without_scalar_terms(&self) -> Self {
        let mut h = self.clone();
        h.include_scalar_terms = false;
        h.h1_scalar = h.h1_at(0.0);
        h
    }

    /// Replaces the algebraic spin matrices by the matrix elements of the
    /// differential operators between the harmonics |s, m, m̄⟩ of one m̄.
    /// The result does not depend on m̄; the choice is kept for reporting.
    pub fn projected_onto_sector(&self, two_mbar: i32) -> Result<Self> {
        SpinLabel::new(self.two_s, self.two_s, two_mbar)?;
        // products of two column members carry α¹ frequencies up to 2s
        let points = (4 * self.two_s as usize + 8).next_multiple_of(2);
        let quad = GroupQuadrature::new(points, 2 * self.two_s as usize + 12, self.two_s as f64)?;
        let mut h = self.clone();
        h.spins = spin_matrices_from_harmonics(self.two_s, two_mbar, self.hbar, &quad)?;
        h.mbar_sector = Some(two_mbar);
        h.h2_matrix = h.h2_at(0.0);
        Ok(h)
    }

    pub fn spins(&self) -> &SpinMatrices {
        &self.spins
    }

    pub fn dim(&self) -> usize {
        (self.two_s + 1) as usize
    }

    pub fn field_at(&self, t: f64) -> Vec3 {
        self.drive.at(t)
    }

    pub fn h1_at(&self, t: f64) -> f64 {
        if !self.include_scalar_terms {
            return self.scalar_offset;
        }
        let s = self.two_s as f64 / 2.0;
        let b2 = self.field_at(t).norm_squared();
        self.scalar_offset
            + s * (s + 1.0) * self.hbar * self.hbar / (2.0 * self.inertia)
            + 0.5 * self.inertia * self.gtilde * self.gtilde * b2
    }

    pub fn h2_at(&self, t: f64) -> CMatrix {
        field_coupling(&self.spins, self.gtilde, &self.field_at(t))
    }

    pub fn matrix_at(&self, t: f64) -> CMatrix {
        let n = self.dim();
        self.h2_at(t) + CMatrix::identity(n, n) * Complex64::new(self.h1_at(t), 0.0)
    }
}

/// Static-field Hamiltonian with ħ = 1 and no extra constants.
pub fn assemble_hamiltonian(two_s: i32, model: &ParticleModel, b: Vec3) -> Result<SpinHamiltonian> {
    SpinHamiltonian::new(two_s, model, FieldDrive::Constant(b), 1.0, 0.0)
}

/// Largest |eigenvalue| of a Hermitian matrix.
pub fn hermitian_norm(h: &CMatrix) -> f64 {
    h.clone().symmetric_eigenvalues().iter().fold(0.0, |m, e| m.max(e.abs()))
}

/// exp(−iτH/ħ) for Hermitian H, from its eigendecomposition.
pub fn propagator(h: &CMatrix, tau: f64, hbar: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    let phases = CVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&e| Complex64::from_polar(1.0, -e * tau / hbar)),
    );
    let q = &eig.eigenvectors;
    let u = q * CMatrix::from_diagonal(&phases) * q.adjoint();
    // one Newton–Schulz step toward the nearest unitary, U(3 − U†U)/2
    let n = u.nrows();
    let defect = CMatrix::identity(n, n) * Complex64::new(3.0, 0.0) - u.adjoint() * &u;
    u * defect * Complex64::new(0.5, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinorRecord {
    pub t: f64,
    pub amplitudes: Vec<Complex64>,
    pub spin: [f64; 3],
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpinorTrajectory {
    pub two_s: i32,
    pub records: Vec<SpinorRecord>,
    pub dt: f64,
}

impl SpinorTrajectory {
    pub fn last_state(&self) -> SpinorState {
        let r = self.records.last().expect("trajectory holds the initial record");
        SpinorState {
            two_s: self.two_s,
            amplitudes: CVector::from_vec(r.amplitudes.clone()),
            t: r.t,
        }
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.records.iter().map(|r| (r.norm - 1.0).abs()).fold(0.0, f64::max)
    }

    pub fn state_at(&self, i: usize) -> SpinorState {
        let r = &self.records[i];
        SpinorState {
            two_s: self.two_s,
            amplitudes: CVector::from_vec(r.amplitudes.clone()),
            t: r.t,
        }
    }
}

fn check_step(dt: f64, duration: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::StepSizeInvalid(format!("dt must be positive, got {dt}")));
    }
    if !(duration.is_finite() && duration > 0.0) {
        return Err(Error::StepSizeInvalid(format!("T must be positive, got {duration}")));
    }
    let steps = (duration / dt * (1.0 - 1e-12)).ceil();
    if steps > 5e7 {
        return Err(Error::StepSizeInvalid(format!("{steps:e} steps exceed the limit")));
    }
    Ok(steps as usize)
}

/// Steps the state with U ← exp(−i dt H(t + dt/2)/ħ) U. `matrix_at` gives
/// H(t); the same stepper serves every representation of H. For a static
/// field the midpoint rule is exact, so each record is taken straight from
/// the eigenbasis at its own time rather than by repeated multiplication,
/// which would accumulate the propagator's rounding-level unitarity defect.
fn step_with<F>(state0: &SpinorState, matrix_at: F, hbar: f64, is_static: bool, dt: f64, duration: f64, spins: &SpinMatrices) -> Result<SpinorTrajectory>
where
    F: Fn(f64) -> CMatrix,
{
    let steps = check_step(dt, duration)?;
    let record = |s: &SpinorState| SpinorRecord {
        t: s.t,
        amplitudes: s.amplitudes.iter().copied().collect(),
        spin: s.spin_expectation(spins),
        norm: s.norm_sqr(),
    };
    let check_phase = |m: &CMatrix, h: f64| -> Result<()> {
        let phase = h * hermitian_norm(m) / hbar;
        if phase >= MAX_PHASE_PER_STEP {
            return Err(Error::StepSizeInvalid(format!(
                "dt·‖H‖/ħ = {phase:.3e} must stay below {MAX_PHASE_PER_STEP}"
            )));
        }
        Ok(())
    };
    let mut state = state0.clone();
    let mut records = Vec::with_capacity(steps + 1);
    records.push(record(&state));
    let eigen = if is_static {
        let m = matrix_at(state0.t);
        check_phase(&m, dt.min(duration))?;
        let eig = m.symmetric_eigen();
        let coeffs = eig.eigenvectors.adjoint() * &state0.amplitudes;
        Some((eig, coeffs))
    } else {
        None
    };
    for n in 0..steps {
        let t0 = state0.t + n as f64 * dt;
        let h = (state0.t + duration - t0).min(dt);
        let t1 = t0 + h;
        match &eigen {
            Some((eig, coeffs)) => {
                let elapsed = t1 - state0.t;
                let phased = CVector::from_iterator(
                    coeffs.len(),
                    coeffs
                        .iter()
                        .zip(eig.eigenvalues.iter())
                        .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * elapsed / hbar)),
                );
                state.amplitudes = &eig.eigenvectors * phased;
            }
            None => {
                let m = matrix_at(t0 + 0.5 * h);
                check_phase(&m, h)?;
                state.amplitudes = propagator(&m, h, hbar) * &state.amplitudes;
            }
        }
        state.t = t1;
        records.push(record(&state));
    }
    Ok(SpinorTrajectory {
        two_s: state0.two_s,
        records,
        dt,
    })
}

fn check_sector(state0: &SpinorState, h: &SpinHamiltonian) -> Result<()> {
    if state0.two_s != h.two_s {
        return Err(Error::InvalidParameter(format!(
            "state has 2s = {} but the Hamiltonian acts on 2s = {}",
            state0.two_s, h.two_s
        )));
    }
    Ok(())
}

pub fn evolve(state0: &SpinorState, h: &SpinHamiltonian, dt: f64, duration: f64) -> Result<SpinorTrajectory> {
    check_sector(state0, h)?;
    step_with(state0, |t| h.matrix_at(t), h.hbar, h.drive.is_static(), dt, duration, &h.spins)
}

/// The two coupled spin-1/2 equations written out component by component:
///   iħU̇₊ = H₁U₊ − ½ħg̃(B₃U₊ + B₋U₋),
///   iħU̇₋ = H₁U₋ + ½ħg̃(−B₊U₊ + B₃U₋).
pub fn coupled_coefficients(h: &SpinHamiltonian, t: f64) -> CMatrix {
    let b = h.field_at(t);
    let h1 = h.h1_at(t);
    let k = 0.5 * h.hbar * h.gtilde;
    let b_plus = Complex64::new(b.x, b.y);
    let b_minus = b_plus.conj();
    CMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(h1 - k * b.z, 0.0),
            -b_minus * k,
            -b_plus * k,
            Complex64::new(h1 + k * b.z, 0.0),
        ],
    )
}

/// H₁·1 − g̃B_i(½ħσ_i), the Pauli matrix form.
pub fn pauli_matrix_form(h: &SpinHamiltonian, t: f64) -> CMatrix {
    let b = h.field_at(t);
    let i = Complex64::i();
    let o = Complex64::default();
    let one = Complex64::new(1.0, 0.0);
    let sigma = [
        CMatrix::from_row_slice(2, 2, &[o, one, one, o]),
        CMatrix::from_row_slice(2, 2, &[o, -i, i, o]),
        CMatrix::from_row_slice(2, 2, &[one, o, o, -one]),
    ];
    let mut m = CMatrix::identity(2, 2) * Complex64::new(h.h1_at(t), 0.0);
    for (k, s) in sigma.iter().enumerate() {
        m -= s * Complex64::new(h.gtilde * b[k] * 0.5 * h.hbar, 0.0);
    }
    m
}

/// Integrates the component equations and the matrix equation with the
/// same stepper; returns the largest amplitude difference over the run.
pub fn coupled_vs_matrix_residual(state0: &SpinorState, h: &SpinHamiltonian, dt: f64, duration: f64) -> Result<f64> {
    if state0.two_s != 1 || h.two_s != 1 {
        return Err(Error::InvalidParameter("the coupled form is written for s = 1/2".into()));
    }
    let stat = h.drive.is_static();
    let a = step_with(state0, |t| coupled_coefficients(h, t), h.hbar, stat, dt, duration, &h.spins)?;
    let b = step_with(state0, |t| pauli_matrix_form(h, t), h.hbar, stat, dt, duration, &h.spins)?;
    Ok(a.records
        .iter()
        .zip(&b.records)
        .flat_map(|(x, y)| x.amplitudes.iter().zip(&y.amplitudes).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max))
}

/// Largest difference in any ⟨S_i⟩ between two runs.
pub fn expectation_deviation(a: &SpinorTrajectory, b: &SpinorTrajectory) -> f64 {
    a.records
        .iter()
        .zip(&b.records)
        .flat_map(|(x, y)| (0..3).map(move |i| (x.spin[i] - y.spin[i]).abs()))
        .fold(0.0, f64::max)
}

/// Times at which ⟨S_axis⟩ changes sign, each refined by bisection on the
/// exact propagator from the preceding record. Requires a static field.
pub fn zero_crossings(traj: &SpinorTrajectory, h: &SpinHamiltonian, axis: usize) -> Result<Vec<f64>> {
    if !h.drive.is_static() {
        return Err(Error::InvalidParameter("crossing refinement needs a static field".into()));
    }
    let m = h.matrix_at(0.0);
    let op = &h.spins.components()[axis];
    let value = |state: &SpinorState, tau: f64| -> f64 {
        let u = propagator(&m, tau, h.hbar) * &state.amplitudes;
        u.dotc(&(*op * &u)).re
    };
    let mut out = Vec::new();
    for i in 0..traj.records.len() - 1 {
        let (a, b) = (traj.records[i].spin[axis], traj.records[i + 1].spin[axis]);
        if a == 0.0 && i > 0 {
            out.push(traj.records[i].t);
            continue;
        }
        if a * b >= 0.0 || a == 0.0 {
            continue;
        }
        let state = traj.state_at(i);
        let (mut lo, mut hi) = (0.0, traj.records[i + 1].t - traj.records[i].t);
        let f_lo = value(&state, lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if value(&state, mid) * f_lo > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        out.push(traj.records[i].t + 0.5 * (lo + hi));
    }
    Ok(out)
}

/// Period of ⟨S_axis⟩(t): twice the least-squares spacing of its zero
/// crossings.
pub fn precession_period(traj: &SpinorTrajectory, h: &SpinHamiltonian, axis: usize) -> Result<f64> {
    let ts = zero_crossings(traj, h, axis)?;
    if ts.len() < 2 {
        return Err(Error::InvalidParameter("fewer than two zero crossings in the run".into()));
    }
    let n = ts.len() as f64;
    let mean_k = (n - 1.0) / 2.0;
    let mean_t = ts.iter().sum::<f64>() / n;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, t) in ts.iter().enumerate() {
        let dk = k as f64 - mean_k;
        num += dk * (t - mean_t);
        den += dk * dk;
    }
    Ok(2.0 * num / den)
}

/// max over interior records of |d⟨S⟩/dt − g̃⟨S⟩×B| / (|g̃||⟨S⟩||B|), the
/// derivative taken by a five-point central difference.
pub fn ehrenfest_residual(traj: &SpinorTrajectory, h: &SpinHamiltonian) -> f64 {
    let rs = &traj.records;
    let dt = traj.dt;
    let spin = |i: usize| Vec3::from(rs[i].spin);
    let mut worst: f64 = 0.0;
    for i in 2..rs.len().saturating_sub(2) {
        // non-uniform trailing step
        if ((rs[i + 2].t - rs[i + 1].t) - dt).abs() > 1e-9 * dt {
            break;
        }
        let d = (spin(i - 2) - 8.0 * spin(i - 1) + 8.0 * spin(i + 1) - spin(i + 2)) / (12.0 * dt);
        let b = h.field_at(rs[i].t);
        let s = spin(i);
        let scale = (h.gtilde.abs() * s.norm() * b.norm()).max(f64::MIN_POSITIVE);
        worst = worst.max((d - h.gtilde * s.cross(&b)).norm() / scale);
    }
    worst
}
