//! Run configuration: a flat JSON object, layered as file < `--set` < flags,
//! then validated into one typed configuration per command.

use std::fmt;
use std::path::{Path, PathBuf};

use euler_spin_core::classical_dynamics::{DensityProfile, FieldConfig, ParticleModel, Vec3};
use euler_spin_core::units::UnitSystem;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Environment variable consulted when no `--config` is given.
pub const CONFIG_ENV: &str = "EULER_SPIN_CONFIG";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("config error at `{key}`: {reason}")]
pub struct ConfigError {
    pub key: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Classical,
    SpinEvolve,
    Spectrum,
    Ring,
    GFactor,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Command::Verify => "verify",
            Command::Classical => "classical",
            Command::SpinEvolve => "spin-evolve",
            Command::Spectrum => "spectrum",
            Command::Ring => "ring",
            Command::GFactor => "g-factor",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    Zero,
    UniformStatic,
    LinearStatic,
}

/// Radial density profiles selectable from a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProfileSpec {
    UniformBall { radius: f64 },
    ThinShell { radius: f64 },
    /// exp(−r²/w²) cut off at `radius`.
    Gaussian { width: f64, radius: f64 },
}

impl ProfileSpec {
    pub fn build(&self) -> euler_spin_core::Result<DensityProfile> {
        match *self {
            ProfileSpec::UniformBall { radius } => DensityProfile::uniform_ball(radius),
            ProfileSpec::ThinShell { radius } => DensityProfile::thin_shell(radius),
            ProfileSpec::Gaussian { width, radius } => {
                DensityProfile::new(move |r| (-(r * r) / (width * width)).exp(), radius)
            }
        }
    }
}

/// Every key the configuration accepts. Keys not used by the chosen
/// command are ignored, so one file can serve several commands.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub command: Option<Command>,
    pub output: Option<PathBuf>,
    pub units: Option<UnitSystem>,

    pub seed: Option<u64>,
    pub tol: Option<f64>,

    pub mass: Option<f64>,
    pub charge: Option<f64>,
    pub inertia: Option<f64>,
    pub g: Option<f64>,
    pub gtilde: Option<f64>,
    pub c: Option<f64>,

    pub field: Option<FieldKind>,
    pub b: Option<[f64; 3]>,
    pub e: Option<[f64; 3]>,
    pub b_gradient: Option<f64>,
    pub x0: Option<[f64; 3]>,
    pub v0: Option<[f64; 3]>,
    pub omega0: Option<[f64; 3]>,
    pub dt: Option<f64>,
    #[serde(rename = "T", alias = "duration")]
    pub duration: Option<f64>,
    pub record_every: Option<usize>,

    pub two_s: Option<i32>,
    pub two_mbar: Option<i32>,
    pub hbar: Option<f64>,
    pub initial_two_m: Option<i32>,
    /// Initial amplitudes as [re, im] pairs, ordered m = s … −s.
    pub psi0: Option<Vec<[f64; 2]>>,
    pub scalar_offset: Option<f64>,
    pub b_rf_amplitude: Option<f64>,
    pub b_rf_frequency: Option<f64>,

    #[serde(rename = "I1")]
    pub i1: Option<f64>,
    #[serde(rename = "I3")]
    pub i3: Option<f64>,

    pub m_grams: Option<f64>,
    pub a_fm: Option<f64>,
    pub radius: Option<f64>,
    pub spin: Option<f64>,

    pub charge_profile: Option<ProfileSpec>,
    pub mass_profile: Option<ProfileSpec>,
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    pub tol: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ClassicalConfig {
    pub model: ParticleModel,
    pub field: FieldConfig,
    pub x0: Vec3,
    pub v0: Vec3,
    pub omega0: Vec3,
    pub dt: f64,
    pub duration: f64,
    pub record_every: usize,
}

#[derive(Debug, Clone)]
pub struct SpinConfig {
    pub two_s: i32,
    /// When set, the spin matrices are computed from the harmonics of this
    /// body-frame sector instead of the algebraic ones.
    pub two_mbar: Option<i32>,
    pub model: ParticleModel,
    pub hbar: f64,
    pub b: Vec3,
    pub rf_amplitude: f64,
    pub rf_frequency: f64,
    pub scalar_offset: f64,
    pub amplitudes: Vec<Complex64>,
    pub dt: f64,
    pub duration: f64,
}

#[derive(Debug, Clone)]
pub struct SpectrumConfig {
    pub two_s: i32,
    pub i1: f64,
    pub i3: f64,
    pub hbar: f64,
}

#[derive(Debug, Clone)]
pub struct RingConfig {
    pub mass: f64,
    pub radius: f64,
    pub spin: f64,
    pub units: UnitSystem,
}

#[derive(Debug, Clone)]
pub struct GFactorConfig {
    pub charge_profile: ProfileSpec,
    pub mass_profile: ProfileSpec,
    pub mass: f64,
    pub charge: f64,
    pub c: f64,
}

#[derive(Debug, Clone)]
pub enum CommandConfig {
    Verify(VerifyConfig),
    Classical(ClassicalConfig),
    SpinEvolve(SpinConfig),
    Spectrum(SpectrumConfig),
    Ring(RingConfig),
    GFactor(GFactorConfig),
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandConfig,
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn name(&self) -> Command {
        match self.command {
            CommandConfig::Verify(_) => Command::Verify,
            CommandConfig::Classical(_) => Command::Classical,
            CommandConfig::SpinEvolve(_) => Command::SpinEvolve,
            CommandConfig::Spectrum(_) => Command::Spectrum,
            CommandConfig::Ring(_) => Command::Ring,
            CommandConfig::GFactor(_) => Command::GFactor,
        }
    }
}

/// Reads a config file into a JSON object.
pub fn load_file(path: &Path) -> Result<Map<String, Value>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("<config>", format!("cannot read {}: {e}", path.display())))?;
    parse_object(&text)
}

pub fn parse_object(text: &str) -> Result<Map<String, Value>, ConfigError> {
    match serde_json::from_str::<Value>(text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(ConfigError::new("<config>", "top level must be a JSON object")),
        Err(e) => Err(ConfigError::new("<config>", format!("invalid JSON: {e}"))),
    }
}

/// Applies one `key=value` override. The value is read as JSON when it
/// parses, otherwise as a string; dotted keys reach into nested objects.
pub fn apply_set(map: &mut Map<String, Value>, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new(assignment, "expected KEY=VALUE"))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(ConfigError::new(assignment, "empty key"));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts.pop().expect("split yields at least one part");
    let mut target = map;
    for p in parts {
        let entry = target
            .entry(p.to_string())
            .or_insert_with(|| Value::Object(Map::new()));
        target = entry
            .as_object_mut()
            .ok_or_else(|| ConfigError::new(key, format!("`{p}` is not an object")))?;
    }
    target.insert(last.to_string(), value);
    Ok(())
}

/// Deserializes the merged object, reporting the offending key path.
pub fn parse_raw(map: Map<String, Value>) -> Result<RawConfig, ConfigError> {
    let value = Value::Object(map);
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner().to_string();
        // tagged enums buffer their content, so the path stops at the enum
        let key = match inner.strip_prefix("unknown field `").and_then(|r| r.split('`').next()) {
            Some(field) if path != field && !path.ends_with(&format!(".{field}")) => format!("{path}.{field}"),
            _ => path,
        };
        ConfigError::new(key, inner)
    })
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("{key} must be positive, got {v}")))
    }
}

fn finite(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ConfigError::new(key, format!("{key} must be finite")))
    }
}

fn finite_vec(key: &str, v: [f64; 3]) -> Result<Vec3, ConfigError> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(Vec3::from(v))
    } else {
        Err(ConfigError::new(key, format!("{key} must have finite components")))
    }
}

fn required<T>(key: &str, v: Option<T>) -> Result<T, ConfigError> {
    v.ok_or_else(|| ConfigError::new(key, format!("{key} is required")))
}

fn model_from(raw: &RawConfig, default_g: f64) -> Result<ParticleModel, ConfigError> {
    let mass = positive("mass", raw.mass.unwrap_or(1.0))?;
    let charge = finite("charge", raw.charge.unwrap_or(1.0))?;
    let inertia = positive("inertia", raw.inertia.unwrap_or(0.4))?;
    let c = positive("c", raw.c.unwrap_or(1.0))?;
    let to_config = |e: euler_spin_core::Error| ConfigError::new("mass", e.to_string());
    match (raw.g, raw.gtilde) {
        (Some(_), Some(_)) => Err(ConfigError::new("gtilde", "give either g or gtilde, not both")),
        (_, Some(gt)) => ParticleModel::with_gtilde(mass, charge, inertia, finite("gtilde", gt)?, c).map_err(to_config),
        (g, None) => ParticleModel::new(mass, charge, inertia, finite("g", g.unwrap_or(default_g))?, c).map_err(to_config),
    }
}

fn timing(raw: &RawConfig) -> Result<(f64, f64), ConfigError> {
    let dt = positive("dt", required("dt", raw.dt)?)?;
    let duration = positive("T", required("T", raw.duration)?)?;
    Ok((dt, duration))
}

fn sector(key: &str, two_s: i32) -> Result<i32, ConfigError> {
    if (0..=40).contains(&two_s) {
        Ok(two_s)
    } else {
        Err(ConfigError::new(key, format!("two_s must lie in 0..=40, got {two_s}")))
    }
}

fn projection(key: &str, two_s: i32, two_m: i32) -> Result<i32, ConfigError> {
    if two_m.abs() <= two_s && (two_s - two_m) % 2 == 0 {
        Ok(two_m)
    } else {
        Err(ConfigError::new(key, format!("{two_m}/2 is not a projection of spin {two_s}/2")))
    }
}

impl RawConfig {
    /// Validates the keys the selected command needs.
    pub fn validate(&self) -> Result<RunConfig, ConfigError> {
        let command = required("command", self.command)?;
        let config = match command {
            Command::Verify => CommandConfig::Verify(VerifyConfig {
                seed: self.seed.unwrap_or(euler_spin_core::verification::DEFAULT_SEED),
                tol: self.tol.map(|t| positive("tol", t)).transpose()?,
            }),
            Command::Classical => {
                let (dt, duration) = timing(self)?;
                let field = match self.field.unwrap_or(FieldKind::Zero) {
                    FieldKind::Zero => FieldConfig::zero(),
                    FieldKind::UniformStatic => FieldConfig::UniformStatic {
                        b: finite_vec("b", self.b.unwrap_or([0.0; 3]))?,
                        e: finite_vec("e", self.e.unwrap_or([0.0; 3]))?,
                    },
                    FieldKind::LinearStatic => FieldConfig::LinearStatic {
                        b: finite("b_gradient", required("b_gradient", self.b_gradient)?)?,
                    },
                };
                let record_every = self.record_every.unwrap_or(1);
                if record_every == 0 {
                    return Err(ConfigError::new("record_every", "record_every must be at least 1"));
                }
                CommandConfig::Classical(ClassicalConfig {
                    model: model_from(self, 1.0)?,
                    field,
                    x0: finite_vec("x0", self.x0.unwrap_or([0.0; 3]))?,
                    v0: finite_vec("v0", self.v0.unwrap_or([0.0; 3]))?,
                    omega0: finite_vec("omega0", self.omega0.unwrap_or([0.0, 0.0, 1.0]))?,
                    dt,
                    duration,
                    record_every,
                })
            }
            Command::SpinEvolve => {
                let (dt, duration) = timing(self)?;
                let two_s = sector("two_s", self.two_s.unwrap_or(1))?;
                let two_mbar = self.two_mbar.map(|m| projection("two_mbar", two_s, m)).transpose()?;
                let amplitudes = match (&self.psi0, self.initial_two_m) {
                    (Some(_), Some(_)) => {
                        return Err(ConfigError::new("psi0", "give either psi0 or initial_two_m, not both"))
                    }
                    (Some(psi), None) => {
                        if psi.len() != (two_s + 1) as usize {
                            return Err(ConfigError::new(
                                "psi0",
                                format!("expected {} amplitudes, got {}", two_s + 1, psi.len()),
                            ));
                        }
                        let amps: Vec<Complex64> = psi.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
                        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
                        if !(norm.is_finite() && norm > 0.0) {
                            return Err(ConfigError::new("psi0", "amplitudes must be finite and not all zero"));
                        }
                        amps
                    }
                    (None, m) => {
                        let two_m = projection("initial_two_m", two_s, m.unwrap_or(two_s))?;
                        let k = ((two_s - two_m) / 2) as usize;
                        (0..=two_s as usize)
                            .map(|i| Complex64::new(if i == k { 1.0 } else { 0.0 }, 0.0))
                            .collect()
                    }
                };
                CommandConfig::SpinEvolve(SpinConfig {
                    two_s,
                    two_mbar,
                    model: model_from(self, 2.0)?,
                    hbar: positive("hbar", self.hbar.unwrap_or(1.0))?,
                    b: finite_vec("b", self.b.unwrap_or([0.0, 0.0, 1.0]))?,
                    rf_amplitude: finite("b_rf_amplitude", self.b_rf_amplitude.unwrap_or(0.0))?,
                    rf_frequency: finite("b_rf_frequency", self.b_rf_frequency.unwrap_or(0.0))?,
                    scalar_offset: finite("scalar_offset", self.scalar_offset.unwrap_or(0.0))?,
                    amplitudes,
                    dt,
                    duration,
                })
            }
            Command::Spectrum => CommandConfig::Spectrum(SpectrumConfig {
                two_s: sector("two_s", required("two_s", self.two_s)?)?,
                i1: positive("I1", required("I1", self.i1)?)?,
                i3: positive("I3", required("I3", self.i3)?)?,
                hbar: positive("hbar", self.hbar.unwrap_or(1.0))?,
            }),
            Command::Ring => {
                let spin = positive("spin", self.spin.unwrap_or(0.5))?;
                let config = match (self.m_grams, self.a_fm) {
                    (Some(m), Some(a)) => RingConfig {
                        mass: positive("m_grams", m)?,
                        radius: euler_spin_core::units::fm_to_cm(positive("a_fm", a)?),
                        spin,
                        units: UnitSystem::Cgs,
                    },
                    (Some(_), None) => return Err(ConfigError::new("a_fm", "a_fm is required with m_grams")),
                    (None, Some(_)) => return Err(ConfigError::new("m_grams", "m_grams is required with a_fm")),
                    (None, None) => RingConfig {
                        mass: positive("mass", required("mass", self.mass)?)?,
                        radius: positive("radius", required("radius", self.radius)?)?,
                        spin,
                        units: self.units.unwrap_or_default(),
                    },
                };
                CommandConfig::Ring(config)
            }
            Command::GFactor => CommandConfig::GFactor(GFactorConfig {
                charge_profile: required("charge_profile", self.charge_profile)?,
                mass_profile: required("mass_profile", self.mass_profile)?,
                mass: positive("mass", self.mass.unwrap_or(1.0))?,
                charge: finite("charge", self.charge.unwrap_or(1.0))?,
                c: positive("c", self.c.unwrap_or(1.0))?,
            }),
        };
        Ok(RunConfig {
            command: config,
            output: self.output.clone(),
        })
    }
}

/// Merges the layers and validates: file, then `--set`, then typed flags.
pub fn parse_config(
    file: Option<Map<String, Value>>,
    sets: &[String],
    flags: Map<String, Value>,
) -> Result<RunConfig, ConfigError> {
    let mut map = file.unwrap_or_default();
    for s in sets {
        apply_set(&mut map, s)?;
    }
    map.extend(flags);
    parse_raw(map)?.validate()
}
