//! Command-line driver: evaluation, zero scans, curve tracing and reference
//! table reproduction, with CSV or JSON output.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on numerical failures.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

mod commands;
pub mod output;

pub use commands::{compute, write_report};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(#[from] epstein::Error),
    #[error("output error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Options shared by all subcommands.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Quadrature tolerance (absolute and relative), at least 1e-14.
    #[arg(long, default_value_t = 1e-13)]
    pub tol: f64,
    /// Worker threads; EPSTEIN_THREADS caps this as well.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Plain-text key=value file of defaults; explicit flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Parser)]
#[command(name = "epstein", version, about = "Epstein zeta function on rectangular lattices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// ζ⁽²⁾(s, Δ) and Z(s, Δ) at one point.
    #[command(args_override_self = true)]
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        s_re: f64,
        #[arg(long, allow_hyphen_values = true)]
        s_im: f64,
        #[arg(long)]
        delta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Critical zeros at fixed Δ.
    #[command(args_override_self = true)]
    Scan {
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        rho_y_min: f64,
        #[arg(long)]
        rho_y_max: f64,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Continue the critical curve through a zero near (Δ, ρ_y).
    #[command(args_override_self = true)]
    TraceCritical {
        #[arg(long)]
        delta: f64,
        #[arg(long, allow_hyphen_values = true)]
        rho_y: f64,
        #[arg(long, default_value_t = 0.01)]
        delta_lo: f64,
        #[arg(long, default_value_t = 1.0)]
        delta_hi: f64,
        #[arg(long, default_value_t = 1e-3)]
        initial_step: f64,
        #[arg(long, default_value_t = 0.05)]
        max_step: f64,
        /// Maximum number of points on the curve.
        #[arg(long, default_value_t = 20_000)]
        max_steps: usize,
        /// Start toward decreasing Δ.
        #[arg(long)]
        decreasing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Solve edge zeros and their expansion coefficients.
    #[command(args_override_self = true)]
    Edges {
        #[arg(long, requires = "rho_y")]
        delta: Option<f64>,
        #[arg(long, requires = "delta")]
        rho_y: Option<f64>,
        /// A built-in edge label such as 3b.
        #[arg(long)]
        label: Option<String>,
        /// Every built-in edge.
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Trace the off-critical curve born at an edge.
    #[command(args_override_self = true)]
    TraceOffcritical {
        /// A built-in edge label such as 2a.
        #[arg(long)]
        edge: Option<String>,
        #[arg(long, requires = "rho_y")]
        delta: Option<f64>,
        #[arg(long, requires = "delta")]
        rho_y: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        max_steps: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Real off-critical zeros over a sweep in Δ.
    #[command(args_override_self = true)]
    RealZeros {
        /// A single anisotropy instead of a sweep.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.01)]
        delta_min: f64,
        #[arg(long, default_value_t = 0.3)]
        delta_max: f64,
        #[arg(long, default_value_t = 30)]
        count: usize,
        /// Add the roots of the approximate equation.
        #[arg(long)]
        approx: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Critical zeros of the approximate equation.
    #[command(args_override_self = true)]
    Approx {
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        rho_y_max: f64,
        /// Pair each value with the nearest exact critical zero.
        #[arg(long)]
        compare: bool,
        #[arg(long, default_value_t = 0.05)]
        grid_step: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Recompute a published reference table.
    #[command(args_override_self = true)]
    Reproduce {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        table: u8,
        #[command(flatten)]
        common: Common,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Scan { .. } => "scan",
            Command::TraceCritical { .. } => "trace-critical",
            Command::Edges { .. } => "edges",
            Command::TraceOffcritical { .. } => "trace-offcritical",
            Command::RealZeros { .. } => "real-zeros",
            Command::Approx { .. } => "approx",
            Command::Reproduce { .. } => "reproduce",
        }
    }

    pub fn common(&self) -> &Common {
        match self {
            Command::Eval { common, .. }
            | Command::Scan { common, .. }
            | Command::TraceCritical { common, .. }
            | Command::Edges { common, .. }
            | Command::TraceOffcritical { common, .. }
            | Command::RealZeros { common, .. }
            | Command::Approx { common, .. }
            | Command::Reproduce { common, .. } => common,
        }
    }
}

fn flag_value(args: &[OsString], flag: &str) -> Option<OsString> {
    let prefix = format!("{flag}=");
    let mut iter = args.iter();
    while let Some(a) = iter.next() {
        let s = a.to_string_lossy();
        if s == flag {
            return iter.next().cloned();
        }
        if let Some(v) = s.strip_prefix(&prefix) {
            return Some(v.into());
        }
    }
    None
}

/// Turns a key=value config file into flags. Blank lines and lines starting
/// with '#' are skipped; `key=true` becomes a bare switch and `key=false` is dropped.
fn config_flags(text: &str) -> Result<Vec<OsString>, CliError> {
    let mut flags = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", n + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(CliError::Usage("config files cannot include other config files".into()));
        }
        match value {
            "true" => flags.push(format!("--{key}").into()),
            "false" => {}
            _ => {
                flags.push(format!("--{key}").into());
                flags.push(value.into());
            }
        }
    }
    Ok(flags)
}

/// Parses arguments (without the program name), merging a config file's
/// entries under the explicit flags.
pub fn parse_args(args: &[OsString]) -> Result<Cli, clap::Error> {
    let mut argv: Vec<OsString> = vec!["epstein".into()];
    let mut injected = Vec::new();
    if let Some(path) = flag_value(args, "--config") {
        let text = fs::read_to_string(&path).map_err(|e| {
            clap::Error::raw(clap::error::ErrorKind::Io, format!("cannot read config {}: {e}\n", PathBuf::from(&path).display()))
        })?;
        injected = config_flags(&text).map_err(|e| clap::Error::raw(clap::error::ErrorKind::InvalidValue, format!("{e}\n")))?;
    }
    let mut rest = args.iter();
    if let Some(sub) = rest.next() {
        argv.push(sub.clone());
        argv.extend(injected);
    }
    argv.extend(rest.cloned());
    Cli::try_parse_from(argv)
}

/// Effective worker count: the smaller of --threads and EPSTEIN_THREADS.
fn thread_cap(requested: Option<usize>) -> Result<Option<usize>, CliError> {
    let env = match std::env::var("EPSTEIN_THREADS") {
        Ok(v) => Some(v.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("EPSTEIN_THREADS must be a positive integer, got {v:?}")))?),
        Err(_) => None,
    };
    let cap = match (requested, env) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    if cap == Some(0) {
        return Err(CliError::Usage("thread count must be positive".into()));
    }
    Ok(cap)
}

/// Runs the driver with explicit output streams and returns the exit code.
pub fn run_to(args: &[OsString], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match parse_args(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let result = thread_cap(cli.command.common().threads).and_then(|cap| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = cap {
            builder = builder.num_threads(n);
        }
        let pool = builder.build().map_err(|e| CliError::Usage(format!("cannot start worker threads: {e}")))?;
        let report = pool.install(|| compute(&cli.command))?;
        write_report(&report, &cli.command, out)
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

/// Runs the driver on standard streams; `args` excludes the program name.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_to(&args, &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn os(args: &[&str]) -> Vec<OsString> {
        args.iter().map(OsString::from).collect()
    }

    #[test]
    fn config_lines_become_flags() {
        let flags = config_flags("# comment\n\ndelta = 0.5\ncompare=true\nrho_y_max=3\nall=false\n").unwrap();
        assert_eq!(flags, os(&["--delta", "0.5", "--compare", "--rho-y-max", "3"]));
        assert!(config_flags("delta").is_err());
    }

    #[test]
    fn finds_config_flag_in_both_spellings() {
        assert_eq!(flag_value(&os(&["scan", "--config", "a.cfg"]), "--config"), Some("a.cfg".into()));
        assert_eq!(flag_value(&os(&["scan", "--config=b.cfg"]), "--config"), Some("b.cfg".into()));
        assert_eq!(flag_value(&os(&["scan"]), "--config"), None);
    }

    #[test]
    fn explicit_flags_override_config() {
        let path = std::env::temp_dir().join(format!("epstein-cli-unit-{}.cfg", std::process::id()));
        fs::write(&path, "delta=0.5\nrho_y_max=3\n").unwrap();
        let cli = parse_args(&os(&["scan", "--config", path.to_str().unwrap(), "--delta", "0.25"])).unwrap();
        fs::remove_file(&path).unwrap();
        match cli.command {
            Command::Scan { delta, rho_y_max, .. } => assert_eq!((delta, rho_y_max), (0.25, 3.0)),
            other => panic!("unexpected {other:?}"),
        }
    }
}
