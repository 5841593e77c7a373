//! The invariant suite behind `verify` and the acceptance target.
//!
//! Every check draws its random points from its own ChaCha stream derived
//! from one seed, so the report is identical however the checks are
//! scheduled.

use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical_dynamics::{
    integrate, moments_from_profiles, ClassicalState, DensityProfile, FieldConfig,
    ParticleModel, Trajectory, Vec3,
};
use crate::error::{Error, Result};
use crate::kinematics::{
    cayley_klein_metric, epsilon_identity_residual, kinematic_matrices, metric,
    rotation_matrix, EulerAngles, Mat3,
};
use crate::operator_calculus::{test_family, AngleFunction, Frame, LadderSign, SpinAlgebra};
use crate::quadrature::GroupQuadrature;
use crate::quantum_evolution::{
    coupled_vs_matrix_residual, evolve, expectation_deviation, precession_period,
    rotator_transition_energy, symmetric_top_levels, symmetric_top_spectrum_hbar, FieldDrive,
    SpinHamiltonian, SpinorState,
};
use crate::relativistic_ring::{ring_solution, RingModel};
use crate::spin_basis::{
    gram_matrix, ladder_coefficient, mixed_parity_density, spin_half_closed_form,
    validate_superposition, wigner_harmonic, SpinLabel,
};
use crate::units::{fm_to_cm, UnitSystem};

pub const DEFAULT_SEED: u64 = 42;

/// Direction of the pass condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Comparison {
    /// measured ≤ tolerance
    AtMost,
    /// measured ≥ tolerance
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// Acceptance criterion the check belongs to.
    pub criterion: u32,
    /// What the check asserts, in words.
    pub anchor: String,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub seed: u64,
    /// Replaces the tolerance of every residual check. Magnitude checks
    /// (quoted physical numbers, scaling bands) keep their own bounds.
    pub residual_tolerance: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            residual_tolerance: None,
        }
    }
}

/// Outcome of one check before tolerance overrides are applied.
struct Measurement {
    name: &'static str,
    criterion: u32,
    anchor: &'static str,
    measured: f64,
    tolerance: f64,
    comparison: Comparison,
    residual: bool,
    /// Extra pass condition beyond the measured value.
    precondition: bool,
    detail: Option<String>,
}

impl Measurement {
    fn residual(name: &'static str, criterion: u32, anchor: &'static str, measured: f64, tolerance: f64) -> Self {
        Self {
            name,
            criterion,
            anchor,
            measured,
            tolerance,
            comparison: Comparison::AtMost,
            residual: true,
            precondition: true,
            detail: None,
        }
    }

    fn magnitude(
        name: &'static str,
        criterion: u32,
        anchor: &'static str,
        measured: f64,
        tolerance: f64,
        comparison: Comparison,
    ) -> Self {
        Self {
            residual: false,
            comparison,
            ..Self::residual(name, criterion, anchor, measured, tolerance)
        }
    }

    fn detail(mut self, detail: String) -> Self {
        self.detail = Some(detail);
        self
    }

    fn require(mut self, ok: bool) -> Self {
        self.precondition &= ok;
        self
    }

    fn finish(self, override_tol: Option<f64>) -> CheckResult {
        let tolerance = match override_tol {
            Some(t) if self.residual => t,
            _ => self.tolerance,
        };
        let within = match self.comparison {
            Comparison::AtMost => self.measured <= tolerance,
            Comparison::AtLeast => self.measured >= tolerance,
        };
        CheckResult {
            name: self.name.to_string(),
            criterion: self.criterion,
            anchor: self.anchor.to_string(),
            measured: self.measured,
            tolerance,
            comparison: self.comparison,
            passed: self.precondition && within,
            detail: self.detail,
        }
    }
}

type CheckFn = fn(&mut ChaCha8Rng) -> Result<Vec<Measurement>>;

const CHECKS: [(u32, CheckFn); 14] = [
    (1, kinematic_identities),
    (2, epsilon_identity),
    (3, commutation_rules),
    (4, casimir_forms),
    (5, orthonormality),
    (6, eigen_and_ladder_relations),
    (7, superselection),
    (8, classical_conservation),
    (9, quantum_evolution),
    (10, spectra),
    (11, quoted_magnitudes),
    (12, profile_moments),
    (13, cayley_klein),
    (14, body_field_commutator),
];

/// Runs the whole suite; independent checks run in parallel.
pub fn run_verification(options: &VerifyOptions) -> VerificationReport {
    let checks: Vec<CheckResult> = CHECKS
        .par_iter()
        .map(|&(criterion, check)| {
            let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
            rng.set_stream(criterion as u64);
            match check(&mut rng) {
                Ok(ms) => ms
                    .into_iter()
                    .map(|m| m.finish(options.residual_tolerance))
                    .collect(),
                Err(e) => vec![CheckResult {
                    name: format!("criterion-{criterion}"),
                    criterion,
                    anchor: "check raised an error".into(),
                    measured: f64::NAN,
                    tolerance: f64::NAN,
                    comparison: Comparison::AtMost,
                    passed: false,
                    detail: Some(e.to_string()),
                }],
            }
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    VerificationReport {
        seed: options.seed,
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

fn max_abs(m: &Mat3) -> f64 {
    m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Orientation with α² ∈ (margin, π − margin).
fn random_angles(rng: &mut ChaCha8Rng, margin: f64) -> EulerAngles {
    EulerAngles::new(
        rng.random_range(0.0..TAU),
        rng.random_range(margin..PI - margin),
        rng.random_range(0.0..TAU),
    )
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, margin: f64) -> Vec<EulerAngles> {
    (0..n).map(|_| random_angles(rng, margin)).collect()
}

fn fold_max(values: impl Iterator<Item = f64>) -> f64 {
    // NaN must never read as a pass
    values.fold(0.0, |acc, v| if v.is_nan() || acc.is_nan() { f64::NAN } else { acc.max(v) })
}

fn kinematic_identities(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let (inertia, mass) = (0.4, 1.0);
    let r = inertia / mass;
    let mut worst = 0.0f64;
    for at in random_points(rng, 100, 0.05) {
        let rot = rotation_matrix(&at);
        let k = kinematic_matrices(&at)?;
        let g = metric(&at, inertia, mass)?;
        worst = fold_max(
            [
                worst,
                max_abs(&(rot.transpose() * rot - Mat3::identity())),
                (rot.determinant() - 1.0).abs(),
                max_abs(&(k.b - rot * k.a)),
                max_abs(&(g.g_cov - k.a.transpose() * k.a * r)) / r,
                max_abs(&(g.g_cov - k.b.transpose() * k.b * r)) / r,
                max_abs(&(g.g_cov * g.g_contra - Mat3::identity())),
            ]
            .into_iter(),
        );
    }
    Ok(vec![Measurement::residual(
        "kinematic-identities",
        1,
        "R orthogonal with det +1, (b) = R(a), metric from (a) equals metric from (b), g_cov g_contra = 1",
        worst,
        1e-12,
    )])
}

fn epsilon_identity(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let pts = random_points(rng, 100, 0.05);
    let worst = fold_max(pts.iter().map(epsilon_identity_residual).collect::<Result<Vec<_>>>()?.into_iter());
    Ok(vec![Measurement::residual(
        "epsilon-identity",
        2,
        "inverse kinematic matrix contracted with derivatives of (a) equals the Levi-Civita symbol",
        worst,
        1e-11,
    )])
}

fn commutation_rules(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let sa = SpinAlgebra::default();
    let family = test_family();
    let pts = random_points(rng, 50, 0.05);
    let worst = |frame: Frame| -> Result<f64> {
        let per_fn = family
            .par_iter()
            .map(|f| {
                let mut w = 0.0f64;
                for at in &pts {
                    for i in 1..=3 {
                        for j in 1..=3 {
                            w = fold_max([w, sa.commutator_residual(i, j, frame, f, at)?.norm()].into_iter());
                        }
                    }
                }
                Ok(w)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(fold_max(per_fn.into_iter()))
    };
    Ok(vec![
        Measurement::residual(
            "space-fixed-commutators",
            3,
            "[S_i, S_j] = +i hbar eps_ijk S_k on the test family",
            worst(Frame::SpaceFixed)?,
            1e-9,
        ),
        Measurement::residual(
            "body-fixed-commutators",
            3,
            "[Sbar_i, Sbar_j] = -i hbar eps_ijk Sbar_k on the test family",
            worst(Frame::BodyFixed)?,
            1e-9,
        ),
    ])
}

fn casimir_forms(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let sa = SpinAlgebra::default();
    let family = test_family();
    let pts = random_points(rng, 50, 0.05);
    let per_fn = family
        .par_iter()
        .map(|f| {
            let explicit = sa.spin_squared(f);
            let space = sa.spin_squared_composed(Frame::SpaceFixed, f);
            let body = sa.spin_squared_composed(Frame::BodyFixed, f);
            let mut w = 0.0f64;
            for at in &pts {
                let e = explicit.value(at)?;
                w = fold_max([w, (e - space.value(at)?).norm(), (e - body.value(at)?).norm()].into_iter());
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![Measurement::residual(
        "casimir-forms",
        4,
        "explicit S^2 equals sum S_i S_i and sum Sbar_i Sbar_i",
        fold_max(per_fn.into_iter()),
        1e-9,
    )])
}

fn gram_defect(fs: &[AngleFunction], quad: &GroupQuadrature) -> Result<f64> {
    let g = gram_matrix(fs, quad)?;
    let n = fs.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = fold_max([worst, (g[(i, j)] - expect).norm()].into_iter());
        }
    }
    Ok(worst)
}

fn orthonormality(_: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let quad = GroupQuadrature::default();
    let closed: Vec<AngleFunction> = [(1, 1), (-1, 1), (1, -1), (-1, -1)]
        .into_iter()
        .map(|(m, mb)| spin_half_closed_form(m, mb))
        .collect::<Result<_>>()?;
    let sector = |half_odd: bool| -> Result<f64> {
        let two_s_max = if half_odd { 5 } else { 4 };
        let fs: Vec<AngleFunction> = SpinLabel::sector(two_s_max, half_odd)
            .iter()
            .map(wigner_harmonic)
            .collect::<Result<_>>()?;
        gram_defect(&fs, &quad)
    };
    let (half, integer) = (sector(true)?, sector(false)?);
    Ok(vec![
        Measurement::residual(
            "spin-half-gram",
            5,
            "closed-form spin-1/2 harmonics: unit norm and 4x4 Gram matrix equal to the identity",
            gram_defect(&closed, &quad)?,
            1e-10,
        ),
        Measurement::residual(
            "sector-gram",
            5,
            "Gram matrix of every harmonic with s <= 5/2, per parity sector, equals the identity",
            half.max(integer),
            1e-8,
        )
        .detail(format!("half-odd sector {half:.3e}, integer sector {integer:.3e}")),
    ])
}

fn eigen_and_ladder_relations(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let sa = SpinAlgebra::default();
    let pts = random_points(rng, 10, 0.05);
    let labels: Vec<SpinLabel> = SpinLabel::sector(5, true)
        .into_iter()
        .chain(SpinLabel::sector(4, false))
        .collect();
    let value_of = |two_s: i32, two_m: i32, two_mbar: i32, at: &EulerAngles| -> Result<Complex64> {
        match SpinLabel::new(two_s, two_m, two_mbar) {
            Ok(l) => wigner_harmonic(&l)?.value(at),
            Err(_) => Ok(Complex64::default()),
        }
    };
    let per_label = labels
        .par_iter()
        .map(|l| {
            let f = wigner_harmonic(l)?;
            let s2 = sa.spin_squared(&f);
            let s3 = sa.spin(3, Frame::SpaceFixed, &f);
            let sb3 = sa.spin(3, Frame::BodyFixed, &f);
            let ladders: Vec<(AngleFunction, Frame, bool)> = [true, false]
                .into_iter()
                .flat_map(|raise| {
                    let sign = if raise { LadderSign::Raise } else { LadderSign::Lower };
                    [
                        (sa.ladder(sign, Frame::SpaceFixed, &f), Frame::SpaceFixed, raise),
                        (sa.ladder(sign, Frame::BodyFixed, &f), Frame::BodyFixed, raise),
                    ]
                })
                .collect();
            let (mut eig, mut lad) = (0.0f64, 0.0f64);
            for at in &pts {
                let v = f.value(at)?;
                eig = fold_max(
                    [
                        eig,
                        (s2.value(at)? - v * l.s() * (l.s() + 1.0)).norm(),
                        (s3.value(at)? - v * l.m()).norm(),
                        (sb3.value(at)? - v * l.mbar()).norm(),
                    ]
                    .into_iter(),
                );
                for (op, frame, raise) in &ladders {
                    let step = if *raise { 2 } else { -2 };
                    let expect = match frame {
                        Frame::SpaceFixed => {
                            value_of(l.two_s, l.two_m + step, l.two_mbar, at)? * ladder_coefficient(l.two_s, l.two_m, *raise)
                        }
                        Frame::BodyFixed => {
                            value_of(l.two_s, l.two_m, l.two_mbar + step, at)? * ladder_coefficient(l.two_s, l.two_mbar, *raise)
                        }
                    };
                    lad = fold_max([lad, (op.value(at)? - expect).norm()].into_iter());
                }
            }
            Ok((eig, lad))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok(vec![
        Measurement::residual(
            "eigenrelations",
            6,
            "S^2, S_3 and Sbar_3 act diagonally on every harmonic with s <= 5/2",
            fold_max(per_label.iter().map(|p| p.0)),
            1e-9,
        ),
        Measurement::residual(
            "ladder-relations",
            6,
            "S+- shift m and Sbar+- shift mbar with the standard coefficients for s <= 5/2",
            fold_max(per_label.iter().map(|p| p.1)),
            1e-9,
        ),
    ])
}

fn superselection(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let scalar = SpinLabel::new(0, 0, 0)?;
    let half = SpinLabel::new(1, 1, 1)?;
    let rejected = matches!(validate_superposition(&[scalar, half]), Err(Error::ParityMixing { .. }));
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let (cc, dd) = (c(), c());
    // the same construction built from the harmonics themselves
    let mixed = wigner_harmonic(&scalar)?.scale(cc) + wigner_harmonic(&half)?.scale(dd);
    let (mut periodic, mut antiperiodic) = (0.0f64, f64::INFINITY);
    for at in random_points(rng, 50, 0.05) {
        let a = at.alpha1;
        let rho = mixed_parity_density(cc, dd, a);
        periodic = fold_max([periodic, (mixed_parity_density(cc, dd, a + 2.0 * TAU) - rho).abs()].into_iter());
        antiperiodic = antiperiodic.min((mixed_parity_density(cc, dd, a + TAU) - rho).abs());
        let shift = |k: f64| EulerAngles::new(a + k, at.alpha2, at.alpha3);
        let f0 = mixed.value(&at)?.norm_sqr();
        periodic = fold_max([periodic, (mixed.value(&shift(2.0 * TAU))?.norm_sqr() - f0).abs()].into_iter());
        antiperiodic = antiperiodic.min((mixed.value(&shift(TAU))?.norm_sqr() - f0).abs());
    }
    Ok(vec![Measurement::residual(
        "parity-superselection",
        7,
        "mixed-parity superpositions are rejected; |C + D exp(i alpha1/2)|^2 has period 4 pi and not 2 pi",
        periodic,
        1e-12,
    )
    .require(rejected && antiperiodic > 1e-6)
    .detail(format!("mixed construction rejected: {rejected}; smallest 2 pi shift change {antiperiodic:.3e}"))])
}

/// Gradient field B = b(x, −y, 0) scenario shared by the classical checks.
fn classical_scenario() -> Result<(ParticleModel, FieldConfig, ClassicalState)> {
    let model = ParticleModel::with_gtilde(1.0, 1.0, 0.4, 1.0, 1.0)?;
    let fields = FieldConfig::LinearStatic { b: 1.0 };
    let state = ClassicalState::new(
        Vec3::new(0.5, -0.3, 0.2),
        Vec3::new(0.3, 0.2, -0.1),
        Vec3::new(0.5, -1.0, 1.5),
        0.0,
    );
    Ok((model, fields, state))
}

fn spin_rate_worst(traj: &Trajectory, model: &ParticleModel, fields: &FieldConfig) -> f64 {
    let fd = fold_max(traj.finite_difference_spin_residuals(model, fields).into_iter());
    fold_max([fd].into_iter().chain(traj.records.iter().map(|r| r.spin_residual)))
}

fn classical_conservation(_: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let (model, fields, s0) = classical_scenario()?;
    let duration = 10.0;
    // the drift at dt = 1e-3 already sits near the rounding floor, so the
    // scaling is read from the two coarser levels
    let drifts: Vec<f64> = [4e-3, 2e-3]
        .par_iter()
        .map(|&dt| integrate(&s0, &model, &fields, dt, duration).map(|t| t.max_relative_kinetic_drift()))
        .collect::<Result<_>>()?;
    let resolved = integrate(&s0, &model, &fields, 1e-3, duration)?;
    let ratio = drifts[0] / drifts[1];
    let order_defect = (ratio / 16.0 - 1.0).abs();

    let uniform = FieldConfig::UniformStatic {
        b: Vec3::new(0.3, -0.2, 1.0),
        e: Vec3::new(0.1, 0.0, -0.05),
    };
    let uniform_traj = integrate(&s0, &model, &uniform, 1e-3, duration)?;
    let spin_rate = spin_rate_worst(&resolved, &model, &fields).max(spin_rate_worst(&uniform_traj, &model, &uniform));

    Ok(vec![
        Measurement::residual(
            "classical-energy-drift",
            8,
            "kinetic energy conserved in B = b(x, -y, 0), E = 0 over 10^4 RK4 steps",
            resolved.max_relative_kinetic_drift(),
            1e-8,
        )
        .detail(format!("{} steps of dt = 1e-3", resolved.records.len() - 1)),
        Measurement::magnitude(
            "classical-drift-order",
            8,
            "kinetic energy drift falls by 16 +- 20% per halving of dt",
            order_defect,
            0.2,
            Comparison::AtMost,
        )
        .detail(format!(
            "drift at dt = 4e-3, 2e-3: {:.3e}, {:.3e}; ratio {ratio:.2}",
            drifts[0], drifts[1]
        )),
        Measurement::residual(
            "classical-spin-rate",
            8,
            "dS/dt = gtilde S x B along static-field trajectories",
            spin_rate,
            1e-8,
        ),
    ])
}

fn random_spinor(rng: &mut ChaCha8Rng, two_s: i32) -> Result<SpinorState> {
    let amps = (0..=two_s)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    SpinorState::normalized(two_s, amps, 0.0)
}

/// A field of magnitude √1.25 whose transverse part rotates at `rate`.
fn drive_at_rate(rate: f64) -> FieldDrive {
    FieldDrive::Varying(Arc::new(move |t: f64| Vec3::new(0.5 * (rate * t).cos(), 0.5 * (rate * t).sin(), 1.0)))
}

fn quantum_evolution(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let model = |gtilde: f64| ParticleModel::with_gtilde(1.0, 1.0, 0.7, gtilde, 1.0);
    let tilted = Vec3::new(0.4, -0.7, 1.1);

    let s0 = random_spinor(rng, 1)?;
    let stat = SpinHamiltonian::new(1, &model(0.6)?, FieldDrive::Constant(tilted), 1.0, 0.25)?;
    let varying = SpinHamiltonian::new(1, &model(0.6)?, drive_at_rate(0.7), 1.0, 0.0)?;
    let coupled = coupled_vs_matrix_residual(&s0, &stat, 0.01, 10.0)?.max(coupled_vs_matrix_residual(&s0, &varying, 0.01, 10.0)?);

    let (g, b0) = (1.1, 0.8);
    let larmor = SpinHamiltonian::new(1, &model(g)?, FieldDrive::Constant(Vec3::new(0.0, 0.0, b0)), 1.0, 0.0)?;
    let up_x = SpinorState::normalized(1, vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)], 0.0)?;
    let traj = evolve(&up_x, &larmor, 0.02, 40.0)?;
    let expected_period = TAU / (g * b0);
    let period_error = (precession_period(&traj, &larmor, 0)? - expected_period).abs();

    let s3 = random_spinor(rng, 3)?;
    let h3 = SpinHamiltonian::new(3, &model(0.9)?, FieldDrive::Constant(tilted), 1.0, 0.3)?;
    let long = evolve(&s3, &h3, 0.01, 100.0)?;
    let spun = SpinHamiltonian::new(3, &model(0.9)?, drive_at_rate(0.4), 1.0, 0.3)?;
    let long_varying = evolve(&s3, &spun, 0.01, 100.0)?;
    let norm_drift = long.max_norm_drift().max(long_varying.max_norm_drift());

    let short = evolve(&s3, &h3, 0.01, 20.0)?;
    let bare = evolve(&s3, &h3.without_scalar_terms(), 0.01, 20.0)?;
    let scalar = expectation_deviation(&short, &bare);

    Ok(vec![
        Measurement::residual(
            "coupled-vs-matrix",
            9,
            "component form of the spin-1/2 Schroedinger equation agrees with the Pauli matrix form",
            coupled,
            1e-12,
        ),
        Measurement::residual(
            "larmor-period",
            9,
            "<S_1> precesses with period 2 pi/(gtilde B)",
            period_error,
            1e-8,
        )
        .detail(format!("expected period {expected_period:.15}")),
        Measurement::residual(
            "norm-conservation",
            9,
            "spinor norm conserved over 10^4 steps in static and time-dependent fields",
            norm_drift,
            1e-12,
        )
        .detail(format!("{} steps at 2s = 3, static and rotating field", long.records.len() - 1)),
        Measurement::residual(
            "scalar-terms-inert",
            9,
            "the scalar part of H leaves every <S_i> unchanged",
            scalar,
            1e-12,
        ),
    ])
}

fn spectra(_: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let mut formula_vs_matrix = 0.0f64;
    let mut spherical = 0.0f64;
    for two_s in 0..=5 {
        let s = two_s as f64 / 2.0;
        for (i1, i3, hbar) in [(1.0, 0.5, 1.0), (0.3, 2.0, 0.8), (1.2, 1.2, 1.0), (2.5, 0.1, 1.3)] {
            let mut formula: Vec<f64> = symmetric_top_spectrum_hbar(two_s, i1, i3, hbar)?.into_iter().map(|p| p.1).collect();
            formula.sort_by(f64::total_cmp);
            let matrix = symmetric_top_levels(two_s, i1, i3, hbar)?;
            for (a, b) in formula.iter().zip(&matrix) {
                formula_vs_matrix = fold_max([formula_vs_matrix, (a - b).abs() / a.abs().max(1.0)].into_iter());
            }
        }
        for i in [0.4, 1.0, 1.7] {
            for (_, e) in symmetric_top_spectrum_hbar(two_s, i, i, 1.0)? {
                spherical = fold_max([spherical, (e - s * (s + 1.0) / (2.0 * i)).abs()].into_iter());
            }
        }
    }
    Ok(vec![
        Measurement::residual(
            "symmetric-top-spectrum",
            10,
            "closed-form symmetric-top levels equal the eigenvalues of the assembled matrix for 2s <= 5",
            formula_vs_matrix,
            1e-12,
        ),
        Measurement::magnitude(
            "spherical-limit",
            10,
            "with I1 = I3 every level equals s(s+1) hbar^2/2I exactly",
            spherical,
            0.0,
            Comparison::AtMost,
        ),
    ])
}

fn quoted_magnitudes(_: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let nucleon = rotator_transition_energy(1e3, 1.0, 0.5, 1.5, UnitSystem::MevFm)?;
    let factor = (nucleon / 50.0).max(50.0 / nucleon);
    let electron = rotator_transition_energy(0.5, 1e-2, 0.5, 1.5, UnitSystem::MevFm)?;
    let e_ring = ring_solution(&RingModel::spin_half(1e-27, fm_to_cm(1e-2))?, UnitSystem::Cgs);
    let b_ring = ring_solution(&RingModel::spin_half(1.8e-24, fm_to_cm(1.0))?, UnitSystem::Cgs);
    Ok(vec![
        Measurement::magnitude(
            "nucleon-excitation",
            11,
            "s = 1/2 -> 3/2 gap for mc^2 = 1e3 MeV, a = 1 fm is within a factor 1.3 of 50 MeV",
            factor,
            1.3,
            Comparison::AtMost,
        )
        .detail(format!("gap {nucleon:.4} MeV")),
        Measurement::magnitude(
            "electron-excitation",
            11,
            "s = 1/2 -> 3/2 gap for an electron-sized rotator is at least 1e9 MeV",
            electron,
            0.99e9,
            Comparison::AtLeast,
        ),
        Measurement::magnitude(
            "electron-ring",
            11,
            "electron-like ring: Lambda >= 1e4 with beta within 1e-8 of 1",
            e_ring.lambda,
            0.99e4,
            Comparison::AtLeast,
        )
        .require(e_ring.one_minus_beta <= 1.01e-8)
        .detail(format!("1 - beta = {:.3e}", e_ring.one_minus_beta)),
        Measurement::magnitude(
            "baryon-ring",
            11,
            "baryon-like ring: beta <= 0.1",
            b_ring.beta,
            0.101,
            Comparison::AtMost,
        ),
    ])
}

fn profile_moments(_: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let radius = 1.3;
    let shape = DensityProfile::new(|r| (-2.0 * r * r).exp() * (1.0 + 0.5 * r), radius)?;
    let equal = moments_from_profiles(&shape, &shape, 2.0, 1.0, 1.0)?;
    let ball = DensityProfile::uniform_ball(radius)?;
    let mass = 1.7;
    let m = moments_from_profiles(&ball, &ball, mass, 1.0, 1.0)?;
    let ball_error = (m.inertia / (0.4 * mass * radius * radius) - 1.0).abs();
    Ok(vec![
        Measurement::residual(
            "equal-profiles-g",
            12,
            "equal charge and mass profiles give g = 1",
            (equal.g - 1.0).abs(),
            1e-10,
        ),
        Measurement::residual(
            "uniform-ball-inertia",
            12,
            "a uniform ball has I = (2/5) m a^2",
            ball_error,
            1e-10,
        ),
    ])
}

fn cayley_klein(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let (inertia, mass) = (0.4, 1.0);
    let r = inertia / mass;
    let mut off = 0.0f64;
    for at in random_points(rng, 100, 0.0) {
        let g = cayley_klein_metric(&at, inertia, mass);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    off = fold_max([off, g[(i, j)].abs() / r].into_iter());
                }
            }
        }
    }
    Ok(vec![Measurement::residual(
        "cayley-klein-metric",
        13,
        "the metric in half-sum and half-difference coordinates is diagonal",
        off,
        1e-14,
    )])
}

fn body_field_commutator(rng: &mut ChaCha8Rng) -> Result<Vec<Measurement>> {
    let sa = SpinAlgebra::default();
    let fields: Vec<[f64; 3]> = (0..5)
        .map(|_| [0; 3].map(|_| rng.random_range(-2.0..2.0)))
        .collect();
    let pts = random_points(rng, 20, 0.05);
    let per_fn = test_family()
        .par_iter()
        .map(|f| {
            let mut w = 0.0f64;
            for b in &fields {
                for at in &pts {
                    w = fold_max([w, sa.body_field_commutator_residual(*b, f, at)?.norm()].into_iter());
                }
            }
            Ok(w)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vec![Measurement::residual(
        "body-field-commutator",
        14,
        "sum_i [Sbar_i, Bbar_i] vanishes for a uniform field",
        fold_max(per_fn.into_iter()),
        1e-9,
    )])
}
