//! Flag and config-file handling.
//!
//! Every option can come from the command line or a TOML file given with
//! `--config`; command-line values win. Keys are the long flag names.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde::Deserialize;

use lambda_holo_core::dynamics::{DEFAULT_MIN_STEPS, DEFAULT_STEPS_PER_CYCLE};
use lambda_holo_core::sweeps::{Preset, ShapeParams, DEFAULT_DURATION};
use lambda_holo_core::{EnvelopeKind, GateSpec, InputState, LambdaSystem, Mode, PropagationConfig};

#[derive(Debug, Parser)]
#[command(
    name = "lambda-holo",
    version,
    about = "Exact vs. RWA fidelity of holonomic Lambda-system gates"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// NOT and Hadamard fidelity against a degenerate transition frequency.
    Table1(Options),
    /// NOT fidelity for every envelope and Pauli eigenstate input.
    Table2(Options),
    /// NOT fidelity for every envelope at 100, 40, 10 and 2.5 ns.
    Table3(Options),
    /// Input-averaged NOT and Hadamard fidelity on a duration grid.
    Fig1(Options),
    /// Averaged fidelity of both gate orders and the product of single-gate fidelities.
    Fig2(Options),
    /// A single gate on a single input.
    Run(Options),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Table1,
    Table2,
    Table3,
    Fig1,
    Fig2,
    Run,
}

impl CommandKind {
    pub fn name(self) -> &'static str {
        match self {
            CommandKind::Table1 => "table1",
            CommandKind::Table2 => "table2",
            CommandKind::Table3 => "table3",
            CommandKind::Fig1 => "fig1",
            CommandKind::Fig2 => "fig2",
            CommandKind::Run => "run",
        }
    }

    /// Keys fixed or swept by the command itself.
    fn owned_keys(self) -> &'static [&'static str] {
        match self {
            CommandKind::Table1 => &[
                "fe0",
                "fe1",
                "fe0-ghz",
                "fe1-ghz",
                "gate",
                "theta",
                "phi",
                "tau-min-ns",
                "tau-max-ns",
                "points",
            ],
            CommandKind::Table2 => &["envelope", "input", "tau-min-ns", "tau-max-ns", "points"],
            CommandKind::Table3 => &["envelope", "tau-ns", "tau-min-ns", "tau-max-ns", "points"],
            CommandKind::Fig1 | CommandKind::Fig2 => &["tau-ns", "gate", "theta", "phi", "input"],
            CommandKind::Run => &["tau-min-ns", "tau-max-ns", "points"],
        }
    }
}

impl Command {
    pub fn split(self) -> (CommandKind, Options) {
        match self {
            Command::Table1(o) => (CommandKind::Table1, o),
            Command::Table2(o) => (CommandKind::Table2, o),
            Command::Table3(o) => (CommandKind::Table3, o),
            Command::Fig1(o) => (CommandKind::Fig1, o),
            Command::Fig2(o) => (CommandKind::Fig2, o),
            Command::Run(o) => (CommandKind::Run, o),
        }
    }
}

#[derive(Debug, Clone, Default, clap::Args, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct Options {
    /// TOML file with any of these options (kebab-case keys).
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Default system and Hadamard drive: `tabulated` or `nominal`.
    #[arg(long)]
    pub preset: Option<String>,
    /// |e>-|0> transition frequency, rad/s.
    #[arg(long, conflicts_with = "fe0_ghz")]
    pub fe0: Option<f64>,
    /// |e>-|1> transition frequency, rad/s.
    #[arg(long, conflicts_with = "fe1_ghz")]
    pub fe1: Option<f64>,
    /// |e>-|0> transition frequency in GHz (converted to 2π·f·1e9 rad/s).
    #[arg(long)]
    pub fe0_ghz: Option<f64>,
    /// |e>-|1> transition frequency in GHz.
    #[arg(long)]
    pub fe1_ghz: Option<f64>,

    /// gaussian, sech, parabola, sin2 or square.
    #[arg(long)]
    pub envelope: Option<String>,
    /// Pulse duration, ns.
    #[arg(long)]
    pub tau_ns: Option<f64>,
    /// Gaussian FWHM as a fraction of the duration.
    #[arg(long)]
    pub fwhm_fraction: Option<f64>,
    /// Sech steepness beta in sech(beta(2t/tau - 1)).
    #[arg(long)]
    pub sech_beta: Option<f64>,

    /// not, hadamard, hadamard-swapped or custom(theta,phi).
    #[arg(long)]
    pub gate: Option<String>,
    /// Overrides the gate's theta (radians).
    #[arg(long)]
    pub theta: Option<f64>,
    /// Overrides the gate's phi (radians).
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// 0, 1, + or +i.
    #[arg(long)]
    pub input: Option<String>,
    /// full or rwa.
    #[arg(long)]
    pub mode: Option<String>,

    /// Integrator steps per counter-rotating period (minimum 8).
    #[arg(long)]
    pub steps_per_cycle: Option<usize>,
    /// Recompute at doubled resolution and fail if any fidelity moves by more.
    #[arg(long)]
    pub convergence_tol: Option<f64>,

    /// Shortest duration of the figure grid, ns.
    #[arg(long)]
    pub tau_min_ns: Option<f64>,
    /// Longest duration of the figure grid, ns.
    #[arg(long)]
    pub tau_max_ns: Option<f64>,
    /// Log-spaced durations in the figure grid.
    #[arg(long)]
    pub points: Option<usize>,

    /// Output file; stdout when absent.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

macro_rules! each_option {
    ($m:ident) => {
        $m!(preset "preset", fe0 "fe0", fe1 "fe1", fe0_ghz "fe0-ghz", fe1_ghz "fe1-ghz",
            envelope "envelope", tau_ns "tau-ns", fwhm_fraction "fwhm-fraction",
            sech_beta "sech-beta", gate "gate", theta "theta", phi "phi", input "input",
            mode "mode", steps_per_cycle "steps-per-cycle", convergence_tol "convergence-tol",
            tau_min_ns "tau-min-ns", tau_max_ns "tau-max-ns", points "points",
            output "output", format "format")
    };
}

impl Options {
    /// Fields set here win over `base`.
    fn over(self, base: Options) -> Options {
        macro_rules! merge {
            ($($f:ident $k:literal),*) => {
                Options { config: self.config, $($f: self.$f.or(base.$f)),* }
            };
        }
        each_option!(merge)
    }

    fn provided(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        macro_rules! collect {
            ($($f:ident $k:literal),*) => {
                $(if self.$f.is_some() { keys.push($k); })*
            };
        }
        each_option!(collect);
        keys
    }
}

/// A rejected option, named by its key.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl fmt::Display) -> Self {
        ConfigError {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: `{}`: {}", self.key, self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Fully resolved run parameters.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: CommandKind,
    pub preset: Preset,
    pub sys: LambdaSystem,
    pub kind: EnvelopeKind,
    pub shape: ShapeParams,
    /// Seconds.
    pub tau: f64,
    pub gate: GateSpec,
    pub input: InputState,
    pub propagation: PropagationConfig,
    pub convergence_tol: Option<f64>,
    /// Duration grid in seconds: `(min, max, points)`.
    pub grid: (f64, f64, usize),
    pub output: Option<PathBuf>,
    pub format: Format,
}

fn parse<T: FromStr>(key: &str, value: Option<String>, default: T) -> Result<T, ConfigError>
where
    T::Err: fmt::Display,
{
    match value {
        None => Ok(default),
        Some(s) => s.parse().map_err(|e| ConfigError::new(key, e)),
    }
}

fn positive(key: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::new(
            key,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

fn ghz(v: f64) -> f64 {
    2.0 * std::f64::consts::PI * v * 1e9
}

pub fn read_file(path: &Path) -> Result<Options, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("config", format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| {
        let message = e.message().to_owned();
        let key = message
            .strip_prefix("unknown field `")
            .and_then(|rest| rest.split('`').next())
            .unwrap_or("config")
            .to_owned();
        ConfigError::new(key, message)
    })
}

impl RunConfig {
    pub fn resolve(command: CommandKind, cli: Options) -> Result<Self, ConfigError> {
        let file = match &cli.config {
            Some(path) => read_file(path)?,
            None => Options::default(),
        };
        let o = cli.over(file);
        if let Some(key) = o
            .provided()
            .into_iter()
            .find(|k| command.owned_keys().contains(k))
        {
            return Err(ConfigError::new(
                key,
                format!("is fixed by `{}`", command.name()),
            ));
        }
        if o.fe0.is_some() && o.fe0_ghz.is_some() {
            return Err(ConfigError::new("fe0-ghz", "conflicts with `fe0`"));
        }
        if o.fe1.is_some() && o.fe1_ghz.is_some() {
            return Err(ConfigError::new("fe1-ghz", "conflicts with `fe1`"));
        }

        let preset: Preset = parse("preset", o.preset, Preset::default())?;
        let base = preset.transmon();
        let f_e0 = match (o.fe0, o.fe0_ghz) {
            (Some(v), _) => positive("fe0", v)?,
            (None, Some(v)) => ghz(positive("fe0-ghz", v)?),
            _ => base.f_e0,
        };
        let f_e1 = match (o.fe1, o.fe1_ghz) {
            (Some(v), _) => positive("fe1", v)?,
            (None, Some(v)) => ghz(positive("fe1-ghz", v)?),
            _ => base.f_e1,
        };
        let sys = LambdaSystem::new(f_e0, f_e1).map_err(|e| ConfigError::new("fe0", e))?;

        let kind = parse("envelope", o.envelope, EnvelopeKind::TruncatedGaussian)?;
        let defaults = ShapeParams::default();
        let shape = ShapeParams {
            fwhm_fraction: positive(
                "fwhm-fraction",
                o.fwhm_fraction.unwrap_or(defaults.fwhm_fraction),
            )?,
            sech_beta: positive("sech-beta", o.sech_beta.unwrap_or(defaults.sech_beta))?,
        };
        let tau = positive("tau-ns", o.tau_ns.unwrap_or(DEFAULT_DURATION * 1e9))? * 1e-9;

        let named: GateSpec = parse("gate", o.gate, GateSpec::not())?;
        let gate = match (o.theta, o.phi) {
            (None, None) => named,
            (theta, phi) => {
                GateSpec::custom(theta.unwrap_or(named.theta), phi.unwrap_or(named.phi)).map_err(
                    |e| ConfigError::new(if theta.is_some() { "theta" } else { "phi" }, e),
                )?
            }
        };
        let input = parse("input", o.input, InputState::Zero)?;
        let mode = parse("mode", o.mode, Mode::Full)?;
        let propagation = PropagationConfig {
            mode,
            steps_per_cycle: o.steps_per_cycle.unwrap_or(DEFAULT_STEPS_PER_CYCLE),
            min_steps: DEFAULT_MIN_STEPS,
            time_origin: 0.0,
        };
        propagation
            .validate()
            .map_err(|e| ConfigError::new("steps-per-cycle", e))?;
        let convergence_tol = o
            .convergence_tol
            .map(|v| positive("convergence-tol", v))
            .transpose()?;

        let lo = positive("tau-min-ns", o.tau_min_ns.unwrap_or(1.0))?;
        let hi = positive("tau-max-ns", o.tau_max_ns.unwrap_or(100.0))?;
        if hi < lo {
            return Err(ConfigError::new(
                "tau-max-ns",
                "must not be below `tau-min-ns`",
            ));
        }
        let points = o.points.unwrap_or(100);
        if points == 0 {
            return Err(ConfigError::new("points", "must be positive"));
        }

        let format = match o.format.as_deref() {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => {
                return Err(ConfigError::new(
                    "format",
                    format!("unknown format `{other}`"),
                ))
            }
        };

        Ok(RunConfig {
            command,
            preset,
            sys,
            kind,
            shape,
            tau,
            gate,
            input,
            propagation,
            convergence_tol,
            grid: (lo * 1e-9, hi * 1e-9, points),
            output: o.output,
            format,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(command: CommandKind, o: Options) -> Result<RunConfig, ConfigError> {
        RunConfig::resolve(command, o)
    }

    #[test]
    fn defaults_follow_preset() {
        let c = resolve(CommandKind::Run, Options::default()).unwrap();
        assert_eq!(c.sys, Preset::Tabulated.transmon());
        assert_eq!(c.kind, EnvelopeKind::TruncatedGaussian);
        assert!((c.tau - 40e-9).abs() < 1e-20);
        assert_eq!(c.propagation.mode, Mode::Full);

        let o = Options {
            preset: Some("nominal".into()),
            ..Default::default()
        };
        let c = resolve(CommandKind::Run, o).unwrap();
        assert_eq!(c.sys.f_e0, 5.0806e10);
    }

    #[test]
    fn ghz_conversion() {
        let o = Options {
            fe0_ghz: Some(1.0),
            fe1_ghz: Some(2.0),
            ..Default::default()
        };
        let c = resolve(CommandKind::Run, o).unwrap();
        assert!((c.sys.f_e0 - 2.0 * std::f64::consts::PI * 1e9).abs() < 1e-3);
        assert!((c.sys.f_e1 - 4.0 * std::f64::consts::PI * 1e9).abs() < 1e-3);
    }

    #[test]
    fn bad_values_name_their_key() {
        let cases = [
            (
                Options {
                    envelope: Some("triangle".into()),
                    ..Default::default()
                },
                "envelope",
            ),
            (
                Options {
                    mode: Some("semi".into()),
                    ..Default::default()
                },
                "mode",
            ),
            (
                Options {
                    tau_ns: Some(-1.0),
                    ..Default::default()
                },
                "tau-ns",
            ),
            (
                Options {
                    theta: Some(4.0),
                    ..Default::default()
                },
                "theta",
            ),
            (
                Options {
                    format: Some("xml".into()),
                    ..Default::default()
                },
                "format",
            ),
            (
                Options {
                    steps_per_cycle: Some(1),
                    ..Default::default()
                },
                "steps-per-cycle",
            ),
        ];
        for (o, key) in cases {
            assert_eq!(resolve(CommandKind::Run, o).unwrap_err().key, key);
        }
    }

    #[test]
    fn swept_keys_are_rejected() {
        let o = Options {
            fe0: Some(1e9),
            ..Default::default()
        };
        assert_eq!(
            resolve(CommandKind::Table1, o.clone()).unwrap_err().key,
            "fe0"
        );
        assert!(resolve(CommandKind::Table2, o).is_ok());
        let o = Options {
            points: Some(5),
            ..Default::default()
        };
        assert_eq!(resolve(CommandKind::Run, o).unwrap_err().key, "points");
    }

    #[test]
    fn theta_phi_override_named_gate() {
        let o = Options {
            gate: Some("hadamard".into()),
            phi: Some(0.5),
            ..Default::default()
        };
        let c = resolve(CommandKind::Run, o).unwrap();
        assert!((c.gate.theta - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        assert_eq!(c.gate.phi, 0.5);
    }

    #[test]
    fn file_values_yield_to_flags() {
        let file: Options = toml::from_str("tau-ns = 10.0\nmode = \"rwa\"").unwrap();
        let cli = Options {
            tau_ns: Some(20.0),
            ..Default::default()
        };
        let merged = cli.over(file);
        assert_eq!(merged.tau_ns, Some(20.0));
        assert_eq!(merged.mode.as_deref(), Some("rwa"));
    }

    #[test]
    fn unknown_file_key_is_named() {
        let dir = std::env::temp_dir().join(format!("lambda-holo-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.toml");
        std::fs::write(&path, "tau-ns = 10.0\nwidth = 3\n").unwrap();
        let err = read_file(&path).unwrap_err();
        assert_eq!(err.key, "width");
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
