use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use euler_spin_cli::config::{load_file, parse_config, CONFIG_ENV};
use euler_spin_cli::run;

const CONFIG_KEYS: &str = "\
Configuration keys (JSON file, --set KEY=VALUE, or the flags above; later layers win):
  common      command, output, units (natural | mev-fm | cgs, default natural)
  verify      seed (42), tol (overrides every residual tolerance)
  model       mass (1), charge (1), inertia (0.4), g (1 classical, 2 spin) or gtilde, c (1)
  classical   field (zero | uniform-static | linear-static), b [0,0,0], e [0,0,0],
              b_gradient, x0 [0,0,0], v0 [0,0,0], omega0 [0,0,1], dt, T, record_every (1)
  spin-evolve two_s (1), two_mbar (unset: algebraic matrices), hbar (1), b [0,0,1],
              initial_two_m (two_s) or psi0 [[re,im],...], scalar_offset (0),
              b_rf_amplitude (0), b_rf_frequency (0), dt, T
  spectrum    two_s, I1, I3, hbar (1)
  ring        m_grams and a_fm (cgs), or mass and radius in `units`; spin (0.5)
  g-factor    charge_profile, mass_profile as {\"kind\": uniform-ball | thin-shell | gaussian,
              \"radius\": .., \"width\": ..}, mass (1), charge (1), c (1)

Exit status: 0 success, 1 failed check or runtime error, 2 configuration error.";

#[derive(Debug, Parser)]
#[command(name = "euler-spin", version, about = "Euler-angle rigid-rotator spin: verification and simulation", after_help = CONFIG_KEYS)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true, env = CONFIG_ENV)]
    config: Option<PathBuf>,

    /// Override one configuration key; the value is parsed as JSON when possible.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    sets: Vec<String>,

    /// Write the CSV or JSON artifact here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Args)]
struct Timing {
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Total duration (config key `T`).
    #[arg(long = "duration", short = 'T')]
    duration: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Run every invariant check and write the report as JSON.
    Verify {
        /// Seed for the random sample points [default: 42].
        #[arg(long)]
        seed: Option<u64>,
        /// Tolerance applied to every residual check.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Integrate the charged spinning top and write its trajectory as CSV.
    Classical {
        #[command(flatten)]
        timing: Timing,
    },
    /// Evolve a spinor in a uniform field and write its trajectory as CSV.
    SpinEvolve {
        /// Twice the spin [default: 1].
        #[arg(long)]
        two_s: Option<i32>,
        /// Body-frame sector whose harmonics supply the spin matrices.
        #[arg(long)]
        two_mbar: Option<i32>,
        #[command(flatten)]
        timing: Timing,
    },
    /// Write the symmetric-top levels of one spin as CSV.
    Spectrum {
        #[arg(long)]
        two_s: Option<i32>,
        #[arg(long = "I1", alias = "i1")]
        i1: Option<f64>,
        #[arg(long = "I3", alias = "i3")]
        i3: Option<f64>,
    },
    /// Solve the relativistic ring and print the result as JSON.
    Ring {
        #[arg(long)]
        m_grams: Option<f64>,
        #[arg(long)]
        a_fm: Option<f64>,
        /// Target spin [default: 0.5].
        #[arg(long)]
        spin: Option<f64>,
    },
    /// Derive I and g from charge and mass profiles and print them as JSON.
    GFactor,
    /// Run whichever command the configuration names.
    Run,
}

fn put<T: Into<Value>>(map: &mut Map<String, Value>, key: &str, v: Option<T>) {
    if let Some(v) = v {
        map.insert(key.to_string(), v.into());
    }
}

fn timing_flags(map: &mut Map<String, Value>, t: Timing) {
    put(map, "dt", t.dt);
    put(map, "T", t.duration);
}

fn flags(cmd: Cmd, output: Option<PathBuf>) -> Map<String, Value> {
    let mut m = Map::new();
    let name = match cmd {
        Cmd::Verify { seed, tol } => {
            put(&mut m, "seed", seed);
            put(&mut m, "tol", tol);
            Some("verify")
        }
        Cmd::Classical { timing } => {
            timing_flags(&mut m, timing);
            Some("classical")
        }
        Cmd::SpinEvolve { two_s, two_mbar, timing } => {
            put(&mut m, "two_s", two_s);
            put(&mut m, "two_mbar", two_mbar);
            timing_flags(&mut m, timing);
            Some("spin-evolve")
        }
        Cmd::Spectrum { two_s, i1, i3 } => {
            put(&mut m, "two_s", two_s);
            put(&mut m, "I1", i1);
            put(&mut m, "I3", i3);
            Some("spectrum")
        }
        Cmd::Ring { m_grams, a_fm, spin } => {
            put(&mut m, "m_grams", m_grams);
            put(&mut m, "a_fm", a_fm);
            put(&mut m, "spin", spin);
            Some("ring")
        }
        Cmd::GFactor => Some("g-factor"),
        Cmd::Run => None,
    };
    put(&mut m, "command", name);
    if let Some(p) = output {
        m.insert("output".into(), json!(p));
    }
    m
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match cli.config.as_deref().map(load_file).transpose() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("euler-spin: {e}");
            return ExitCode::from(2);
        }
    };
    let config = match parse_config(file, &cli.sets, flags(cli.command, cli.output)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("euler-spin: {e}");
            return ExitCode::from(2);
        }
    };
    match run(&config) {
        Ok(outcome) if outcome.passed => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("euler-spin: {} reported failing checks", config.name());
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("euler-spin: {} failed: {e}", config.name());
            ExitCode::from(1)
        }
    }
}
