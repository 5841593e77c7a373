//! Executes a validated configuration and writes its artifacts.

use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use euler_spin_core::classical_dynamics::{integrate_with_options, moments_from_profiles, ClassicalState, IntegrateOptions};
use euler_spin_core::quantum_evolution::{evolve, symmetric_top_spectrum_hbar, FieldDrive, SpinHamiltonian};
use euler_spin_core::relativistic_ring::{nonrelativistic_beta, ring_solution, RingModel};
use euler_spin_core::verification::{run_verification, VerifyOptions};
use euler_spin_core::{SpinorState, Vec3};
use serde::Serialize;

use crate::config::{ClassicalConfig, CommandConfig, GFactorConfig, RingConfig, RunConfig, SpectrumConfig, SpinConfig, VerifyConfig};

pub const CLASSICAL_HEADER: &str = "t,X1,X2,X3,V1,V2,V3,w1,w2,w3,KE_trans,KE_rot,H,spin_residual";
pub const SPECTRUM_HEADER: &str = "s,mbar,E";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Model(#[from] euler_spin_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("cannot serialize result: {0}")]
    Json(#[from] serde_json::Error),
}

/// Whether every check of a `verify` run passed; simulations always report true.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outcome {
    pub passed: bool,
}

/// 17 significant digits in lowercase scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn row(out: &mut dyn Write, fields: &[f64]) -> io::Result<()> {
    let line: Vec<String> = fields.iter().map(|&x| num(x)).collect();
    writeln!(out, "{}", line.join(","))
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn run(config: &RunConfig) -> Result<Outcome, RunError> {
    let output = config.output.as_deref();
    match &config.command {
        CommandConfig::Verify(c) => verify(c, output),
        CommandConfig::Classical(c) => classical(c, &mut *sink(output)?).map(|_| Outcome { passed: true }),
        CommandConfig::SpinEvolve(c) => spin_evolve(c, &mut *sink(output)?).map(|_| Outcome { passed: true }),
        CommandConfig::Spectrum(c) => spectrum(c, &mut *sink(output)?).map(|_| Outcome { passed: true }),
        // results go to standard output; an output path receives a copy
        CommandConfig::Ring(c) => emit_json(&ring(c)?, output).map(|_| Outcome { passed: true }),
        CommandConfig::GFactor(c) => emit_json(&g_factor(c)?, output).map(|_| Outcome { passed: true }),
    }
}

fn emit_json<T: Serialize>(value: &T, output: Option<&Path>) -> Result<(), RunError> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(p) = output {
        std::fs::write(p, format!("{text}\n"))?;
    }
    Ok(())
}

fn verify(c: &VerifyConfig, output: Option<&Path>) -> Result<Outcome, RunError> {
    let report = run_verification(&VerifyOptions {
        seed: c.seed,
        residual_tolerance: c.tol,
    });
    let mut out = sink(output)?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    out.flush()?;
    for f in report.failures() {
        eprintln!("check {} failed: measured {:e}, tolerance {:e}", f.name, f.measured, f.tolerance);
    }
    Ok(Outcome { passed: report.passed })
}

pub fn classical(c: &ClassicalConfig, out: &mut dyn Write) -> Result<(), RunError> {
    let s0 = ClassicalState::new(c.x0, c.v0, c.omega0, 0.0);
    let options = IntegrateOptions {
        record_every: c.record_every,
    };
    let traj = integrate_with_options(&s0, &c.model, &c.field, c.dt, c.duration, options)?;
    writeln!(out, "{CLASSICAL_HEADER}")?;
    for r in &traj.records {
        let mut fields = vec![r.t];
        fields.extend(r.x.iter().chain(r.v.iter()).chain(r.omega.iter()));
        fields.extend([r.ke_trans, r.ke_rot, r.h, r.spin_residual]);
        row(out, &fields)?;
    }
    out.flush()?;
    Ok(())
}

pub fn spin_header(two_s: i32) -> String {
    let mut cols = vec!["t".to_string()];
    for k in 0..=two_s {
        cols.push(format!("re_a{k}"));
        cols.push(format!("im_a{k}"));
    }
    cols.extend(["S1", "S2", "S3", "norm"].map(String::from));
    cols.join(",")
}

pub fn spin_hamiltonian(c: &SpinConfig) -> Result<SpinHamiltonian, RunError> {
    let drive = if c.rf_amplitude == 0.0 {
        FieldDrive::Constant(c.b)
    } else {
        // static B plus a field of fixed magnitude rotating in the 1-2 plane
        let (b, amp, freq) = (c.b, c.rf_amplitude, c.rf_frequency);
        FieldDrive::Varying(Arc::new(move |t| {
            let phase = TAU * freq * t;
            b + Vec3::new(amp * phase.cos(), amp * phase.sin(), 0.0)
        }))
    };
    let h = SpinHamiltonian::new(c.two_s, &c.model, drive, c.hbar, c.scalar_offset)?;
    Ok(match c.two_mbar {
        Some(m) => h.projected_onto_sector(m)?,
        None => h,
    })
}

pub fn spin_evolve(c: &SpinConfig, out: &mut dyn Write) -> Result<(), RunError> {
    let h = spin_hamiltonian(c)?;
    let s0 = SpinorState::normalized(c.two_s, c.amplitudes.clone(), 0.0)?;
    let traj = evolve(&s0, &h, c.dt, c.duration)?;
    writeln!(out, "{}", spin_header(c.two_s))?;
    for r in &traj.records {
        let mut fields = vec![r.t];
        fields.extend(r.amplitudes.iter().flat_map(|a| [a.re, a.im]));
        fields.extend(r.spin);
        fields.push(r.norm);
        row(out, &fields)?;
    }
    out.flush()?;
    Ok(())
}

pub fn spectrum(c: &SpectrumConfig, out: &mut dyn Write) -> Result<(), RunError> {
    let s = c.two_s as f64 / 2.0;
    writeln!(out, "{SPECTRUM_HEADER}")?;
    for (mbar, e) in symmetric_top_spectrum_hbar(c.two_s, c.i1, c.i3, c.hbar)? {
        row(out, &[s, mbar, e])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct RingReport {
    pub mass: f64,
    pub radius: f64,
    pub spin: f64,
    pub units: euler_spin_core::UnitSystem,
    pub lambda: f64,
    pub beta: f64,
    pub gamma: f64,
    pub one_minus_beta: f64,
    pub nonrelativistic_beta: f64,
}

pub fn ring(c: &RingConfig) -> Result<RingReport, RunError> {
    let model = RingModel::new(c.mass, c.radius, c.spin)?;
    let sol = ring_solution(&model, c.units);
    Ok(RingReport {
        mass: c.mass,
        radius: c.radius,
        spin: c.spin,
        units: c.units,
        lambda: sol.lambda,
        beta: sol.beta,
        gamma: sol.gamma,
        one_minus_beta: sol.one_minus_beta,
        nonrelativistic_beta: nonrelativistic_beta(&model, c.units),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct GFactorReport {
    pub charge_mean_square_radius: f64,
    pub mass_mean_square_radius: f64,
    pub inertia: f64,
    pub g: f64,
    pub gtilde: f64,
}

pub fn g_factor(c: &GFactorConfig) -> Result<GFactorReport, RunError> {
    let fq = c.charge_profile.build()?;
    let fm = c.mass_profile.build()?;
    let model = moments_from_profiles(&fq, &fm, c.mass, c.charge, c.c)?;
    Ok(GFactorReport {
        charge_mean_square_radius: fq.mean_square_radius(),
        mass_mean_square_radius: fm.mean_square_radius(),
        inertia: model.inertia,
        g: model.g,
        gtilde: model.gtilde,
    })
}
