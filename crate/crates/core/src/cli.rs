//! Command-line front end.
//!
//! Exit codes: 0 success (gathered, certificate verified, plain output),
//! 1 runtime error, 2 usage error, 3 step cap exceeded, 4 contract
//! violation or failed verification, 5 forge exhausted.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::algorithm::Registry;
use crate::configuration::Configuration;
use crate::engine::{self, Outcome, RunOptions, SchedulerSpec, TraceHeader, DEFAULT_STEP_CAP};
use crate::geometry::{Angle, Visibility};
use crate::impossibility::{self, Certificate, ForgeOptions, ImpossibilityError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_VIOLATION: i32 = 4;
pub const EXIT_EXHAUSTED: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "circlegather", version, about = "Gathering of oblivious robots on a circle, in exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a semi-synchronous simulation and optionally write a trace.
    Simulate {
        /// Number of robots; checked against --config, or the size of a generated configuration.
        #[arg(long)]
        n: Option<usize>,
        /// Inline list such as "0/1,1/10,2/5" or a configuration file.
        #[arg(long)]
        config: Option<String>,
        /// Visibility range in turns, or "full".
        #[arg(long, default_value = "1/2")]
        theta: String,
        #[arg(long, default_value = "listing1")]
        alg: String,
        /// full, round-robin, random[:P[:F]] or script:0,1;2
        #[arg(long, default_value = "full")]
        sched: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
        step_cap: u64,
        /// Denominator bound for generated configurations.
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        /// Check the structural invariants at every step.
        #[arg(long)]
        monitor: bool,
        /// JSON Lines trace output.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Build a verified impossibility certificate for an algorithm.
    Forge {
        #[arg(long, default_value = "listing1")]
        alg: String,
        #[arg(long, default_value = "1/4")]
        theta: String,
        #[arg(long, conflicts_with = "auto_n")]
        n: Option<usize>,
        /// Use the smallest compatible size at least --min.
        #[arg(long)]
        auto_n: bool,
        #[arg(long, default_value_t = 2)]
        min: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_samples: usize,
        #[arg(long, default_value_t = 1000)]
        denominator: u64,
        /// Certificate JSON output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the smallest swarm size compatible with theta, or test one size.
    Compat {
        #[arg(long, default_value = "1/4")]
        theta: String,
        #[arg(long, default_value_t = 2)]
        min: usize,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Generate a random rotationally asymmetric configuration file.
    GenConfig {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a grid point with distinct coordinates avoiding the obstacle sets.
    Derandomize {
        #[arg(long)]
        m: u64,
        #[arg(long)]
        n: usize,
        /// Lines of the form "AXIS c1 ... cn".
        #[arg(long)]
        obstacles: Option<PathBuf>,
    },
    /// Re-run every check of a certificate file.
    VerifyCert {
        #[arg(long)]
        cert: PathBuf,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

fn error(message: impl ToString) -> Failure {
    Failure { code: EXIT_ERROR, message: message.to_string() }
}

fn write_output(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| error(format!("{}: {e}", p.display()))),
        None => out.write_all(text.as_bytes()).map_err(error),
    }
}

fn load_config(spec: &str) -> Result<Configuration, Failure> {
    let path = Path::new(spec);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| error(format!("{spec}: {e}")))?;
        Configuration::parse_file(&text).map_err(|e| usage(format!("{spec}: {e}")))
    } else {
        Configuration::parse_inline(spec).map_err(|e| usage(format!("--config: {e}")))
    }
}

fn parse_theta_quarter(theta: &str) -> Result<Angle, Failure> {
    let angle: Angle = theta.parse().map_err(|e| usage(format!("--theta: {e}")))?;
    if angle.is_zero() || angle > Angle::quarter() {
        return Err(usage("theta must be ≤ 1/4 turn"));
    }
    Ok(angle)
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os(), &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    match command {
        Command::Simulate { n, config, theta, alg, sched, seed, step_cap, bound, monitor, trace } => {
            let visibility: Visibility = theta.parse().map_err(|e| usage(format!("--theta: {e}")))?;
            let initial = match (&config, n) {
                (Some(c), _) => load_config(c)?,
                (None, Some(n)) => Configuration::random_asymmetric(n, seed, bound).map_err(usage)?,
                (None, None) => return Err(usage("either --config or --n is required")),
            };
            if let Some(n) = n {
                if n != initial.len() {
                    return Err(usage(format!("--n {n} but the configuration has {} robots", initial.len())));
                }
            }
            if step_cap == 0 {
                return Err(usage("--step-cap must be at least 1"));
            }
            let registry = Registry::with_builtins();
            let algorithm = registry.get(&alg).ok_or_else(|| usage(format!("unknown algorithm {alg:?}")))?;
            let spec = SchedulerSpec::parse(&sched, seed).map_err(usage)?;
            let mut scheduler = spec.build(initial.len()).map_err(usage)?;
            let mut options = RunOptions::new(algorithm.as_ref(), &visibility);
            options.step_cap = step_cap;
            options.monitor = monitor;
            options.record_trace = trace.is_some();
            let result = engine::run(&initial.expanded(), &mut scheduler, &options).map_err(error)?;
            if let Some(path) = &trace {
                let header = TraceHeader {
                    n: initial.len(),
                    theta: visibility.clone(),
                    algorithm: alg.clone(),
                    scheduler: spec.to_string(),
                    seed,
                    step_cap,
                };
                write_output(Some(path), &engine::write_trace(&header, &result.trace), out)?;
            }
            let mut summary = String::new();
            let code = match &result.outcome {
                Outcome::Gathered { point, step } => {
                    let _ = writeln!(summary, "gathered at {point} step {step}");
                    EXIT_OK
                }
                Outcome::StepCapExceeded => {
                    let _ = writeln!(summary, "step cap exceeded after {} steps", result.steps);
                    EXIT_CAP
                }
                Outcome::ContractViolation { description, step } => {
                    let _ = writeln!(summary, "contract violation at step {step}: {description}");
                    EXIT_VIOLATION
                }
            };
            let _ = writeln!(summary, "final {}", result.final_configuration);
            let counts: Vec<String> = result.rule_counts.iter().map(|(r, c)| format!("{r}={c}")).collect();
            let _ = writeln!(summary, "rules {}", counts.join(" "));
            write_output(None, &summary, out)?;
            Ok(code)
        }
        Command::Forge { alg, theta, n, auto_n, min, seed, max_samples, denominator, out: path } => {
            let theta = parse_theta_quarter(&theta)?;
            let n = match (n, auto_n) {
                (Some(n), _) => n,
                (None, true) => impossibility::find_compatible(&theta, min).map_err(usage)?,
                (None, false) => return Err(usage("either --n or --auto-n is required")),
            };
            let registry = Registry::any_visibility();
            let algorithm = registry.get(&alg).ok_or_else(|| usage(format!("unknown algorithm {alg:?}")))?;
            let options = ForgeOptions { seed, max_samples, denominator };
            let cert = match impossibility::forge(algorithm.as_ref(), &theta, n, &options) {
                Ok(c) => c,
                Err(e @ ImpossibilityError::NoCertificate(_)) => {
                    return Err(Failure { code: EXIT_EXHAUSTED, message: e.to_string() })
                }
                Err(e @ ImpossibilityError::Incompatible { .. }) => return Err(usage(e)),
                Err(e) => return Err(error(e)),
            };
            if let Some(p) = &path {
                write_output(Some(p), &(cert.to_json() + "\n"), out)?;
            }
            write_output(None, &certificate_summary(&cert), out)?;
            Ok(if cert.is_verified() { EXIT_OK } else { EXIT_VIOLATION })
        }
        Command::Compat { theta, min, n } => {
            let theta = parse_theta_quarter(&theta)?;
            let text = match n {
                Some(n) => {
                    let ok = impossibility::is_compatible(n, &theta).map_err(usage)?;
                    if ok {
                        format!("true epsilon={}\n", impossibility::epsilon(&theta, n).map_err(error)?)
                    } else {
                        "false\n".to_string()
                    }
                }
                None => format!("{}\n", impossibility::find_compatible(&theta, min).map_err(usage)?),
            };
            write_output(None, &text, out)?;
            Ok(EXIT_OK)
        }
        Command::GenConfig { n, seed, bound, out: path } => {
            let config = Configuration::random_asymmetric(n, seed, bound).map_err(usage)?;
            write_output(path.as_deref(), &config.to_file_string(), out)?;
            Ok(EXIT_OK)
        }
        Command::Derandomize { m, n, obstacles } => {
            let sets = match &obstacles {
                Some(p) => {
                    let text = std::fs::read_to_string(p).map_err(|e| error(format!("{}: {e}", p.display())))?;
                    impossibility::parse_obstacles(&text, n).map_err(usage)?
                }
                None => vec![Vec::new(); n],
            };
            let point = impossibility::derandomize(m, n, &sets).map_err(usage)?;
            let coords: Vec<String> = point.iter().map(crate::geometry::format_rational).collect();
            write_output(None, &format!("{}\n", coords.join(" ")), out)?;
            Ok(EXIT_OK)
        }
        Command::VerifyCert { cert } => {
            let text = std::fs::read_to_string(&cert).map_err(|e| error(format!("{}: {e}", cert.display())))?;
            let mut parsed = Certificate::from_json(&text).map_err(|e| usage(format!("{}: {e}", cert.display())))?;
            let registry = Registry::any_visibility();
            let algorithm = registry
                .get(&parsed.algorithm)
                .ok_or_else(|| usage(format!("unknown algorithm {:?}", parsed.algorithm)))?;
            parsed.checks = impossibility::verify_certificate(&parsed, algorithm.as_ref()).map_err(error)?;
            write_output(None, &certificate_summary(&parsed), out)?;
            Ok(if parsed.is_verified() { EXIT_OK } else { EXIT_VIOLATION })
        }
    }
}

fn certificate_summary(cert: &Certificate) -> String {
    let mut s = String::new();
    let sample = cert.sample.map(|k| format!(" sample {k}")).unwrap_or_default();
    let _ = writeln!(s, "{} certificate for {} at theta {} with n={}{sample}", cert.variant(), cert.algorithm, cert.theta, cert.n);
    for c in &cert.checks {
        let _ = writeln!(s, "  {} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
    }
    let _ = writeln!(s, "{}", if cert.is_verified() { "verified" } else { "NOT verified" });
    s
}
