//! Batch front-end: `verify`, `curve`, `simulate` and `gallery`.
//!
//! Exit status: 0 on success, 1 on input errors, 2 when `verify --expect`
//! names a different classification.

mod commands;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use output::{num, Format, Report};

use crate::analysis::Classification;

/// Variable capping the number of worker threads.
pub const THREADS_ENV: &str = "COUPDOOB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "coupdoob", version, about = "Coupling checks of convergence for discrete Markov chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct SourceArgs {
    /// Chain file (JSON with `states` and `rows`, or a gallery reference).
    #[arg(long, value_name = "PATH", required_unless_present = "gallery", conflicts_with = "gallery")]
    file: Option<PathBuf>,
    /// Gallery fixture, optionally with parameters: NAME[:p1,p2,...].
    #[arg(long, value_name = "NAME[:PARAMS]")]
    gallery: Option<String>,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of standard output.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelChoice {
    Maximal,
    Independent,
    Hybrid,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the convergence assumptions and conclusions.
    Verify {
        #[command(flatten)]
        source: SourceArgs,
        /// Largest n searched for equivalent / non-singular laws.
        #[arg(long)]
        n_max: Option<usize>,
        /// Steps followed on each convergence curve.
        #[arg(long)]
        horizon: Option<usize>,
        /// Distance below which a start counts as converged.
        #[arg(long, default_value_t = crate::analysis::CONVERGENCE_THRESHOLD)]
        threshold: f64,
        /// Countable chains: check starts 0..=MAX_START.
        #[arg(long, default_value_t = 3)]
        max_start: u64,
        /// Exit with status 2 unless the classification is this one.
        #[arg(long)]
        expect: Option<Classification>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact convergence and coupling curves.
    Curve {
        #[command(flatten)]
        source: SourceArgs,
        /// Number of base steps.
        #[arg(long)]
        horizon: Option<usize>,
        /// Largest N tried when selecting the hybrid coupling set.
        #[arg(long)]
        n_max: Option<usize>,
        /// Index of the invariant law compared against.
        #[arg(long, default_value_t = 0)]
        ipm: usize,
        /// Start pair of the coupled chain: LABEL1,LABEL2.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long, value_enum, default_value_t = KernelChoice::Maximal)]
        kernel: KernelChoice,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo hitting and coupling estimates.
    Simulate {
        #[command(flatten)]
        source: SourceArgs,
        /// Start state (default: the second state).
        #[arg(long)]
        start: Option<String>,
        /// Target state (default: the first state).
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = 10_000)]
        replicas: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// List or show the built-in fixtures.
    Gallery {
        #[command(subcommand)]
        action: GalleryAction,
    },
}

#[derive(Debug, Subcommand)]
enum GalleryAction {
    List {
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Print the transition rows of NAME[:PARAMS].
    Show {
        name: String,
        #[command(flatten)]
        output: OutputArgs,
    },
}

/// Where the chain comes from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChainSource {
    File(PathBuf),
    Gallery { name: String, params: Vec<String> },
}

impl ChainSource {
    fn parse_gallery(arg: &str) -> Self {
        match arg.split_once(':') {
            Some((name, params)) => Self::Gallery {
                name: name.to_string(),
                params: params.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect(),
            },
            None => Self::Gallery { name: arg.to_string(), params: Vec::new() },
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Self::File(p) => p.display().to_string(),
            Self::Gallery { name, params } if params.is_empty() => name.clone(),
            Self::Gallery { name, params } => format!("{name}:{}", params.join(",")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Verify,
    Curve,
    Simulate,
    GalleryList,
    GalleryShow,
}

/// Validated settings of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub source: Option<ChainSource>,
    pub n_max: Option<usize>,
    pub horizon: Option<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub threshold: f64,
    pub max_start: u64,
    pub expect: Option<Classification>,
    pub ipm: usize,
    pub pair: Option<(String, String)>,
    pub kernel: KernelChoice,
    pub start: Option<String>,
    pub target: Option<String>,
}

/// Input error reported with exit status 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl<E: std::error::Error> From<E> for InputError {
    fn from(e: E) -> Self {
        Self(e.to_string())
    }
}

fn positive(name: &str, v: Option<usize>) -> Result<Option<usize>, InputError> {
    match v {
        Some(0) => Err(InputError(format!("--{name} must be positive"))),
        v => Ok(v),
    }
}

impl RunConfig {
    fn base(command: CommandKind, output: OutputArgs, default_format: Format) -> Self {
        Self {
            command,
            source: None,
            n_max: None,
            horizon: None,
            replicas: 1,
            seed: 0,
            format: output.format.unwrap_or(default_format),
            out: output.out,
            threshold: crate::analysis::CONVERGENCE_THRESHOLD,
            max_start: 3,
            expect: None,
            ipm: 0,
            pair: None,
            kernel: KernelChoice::Maximal,
            start: None,
            target: None,
        }
    }

    fn from_cli(cli: Cli) -> Result<Self, InputError> {
        let source = |s: SourceArgs| match (s.file, s.gallery) {
            (Some(f), None) => Ok(ChainSource::File(f)),
            (None, Some(g)) => Ok(ChainSource::parse_gallery(&g)),
            _ => Err(InputError("give exactly one of --file and --gallery".into())),
        };
        let cfg = match cli.command {
            Command::Verify { source: s, n_max, horizon, threshold, max_start, expect, output } => {
                if threshold.is_nan() || threshold <= 0.0 {
                    return Err(InputError("--threshold must be positive".into()));
                }
                Self {
                    source: Some(source(s)?),
                    n_max: positive("n-max", n_max)?,
                    horizon: positive("horizon", horizon)?,
                    threshold,
                    max_start,
                    expect,
                    ..Self::base(CommandKind::Verify, output, Format::Table)
                }
            }
            Command::Curve { source: s, horizon, n_max, ipm, pair, kernel, output } => {
                let pair = match pair {
                    Some(p) => match p.split_once(',') {
                        Some((a, b)) => Some((a.trim().to_string(), b.trim().to_string())),
                        None => return Err(InputError(format!("--pair expects A,B, got `{p}`"))),
                    },
                    None => None,
                };
                Self {
                    source: Some(source(s)?),
                    horizon: positive("horizon", horizon)?,
                    n_max: positive("n-max", n_max)?,
                    ipm,
                    pair,
                    kernel,
                    ..Self::base(CommandKind::Curve, output, Format::Csv)
                }
            }
            Command::Simulate { source: s, start, target, horizon, replicas, seed, output } => {
                if replicas == 0 {
                    return Err(InputError("--replicas must be positive".into()));
                }
                Self {
                    source: Some(source(s)?),
                    horizon: positive("horizon", horizon)?,
                    replicas,
                    seed,
                    start,
                    target,
                    ..Self::base(CommandKind::Simulate, output, Format::Table)
                }
            }
            Command::Gallery { action: GalleryAction::List { output } } => {
                Self::base(CommandKind::GalleryList, output, Format::Table)
            }
            Command::Gallery { action: GalleryAction::Show { name, output } } => Self {
                source: Some(ChainSource::parse_gallery(&name)),
                ..Self::base(CommandKind::GalleryShow, output, Format::Table)
            },
        };
        Ok(cfg)
    }
}

/// Outcome of a command before it is written out.
pub struct Outcome {
    pub report: Report,
    /// Set when `--expect` did not match.
    pub mismatch: Option<String>,
}

fn thread_cap() -> Result<Option<usize>, InputError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(InputError(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(None),
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(stdout, "{rendered}") } else { write!(stderr, "{rendered}") };
            return code;
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|cfg| {
        let outcome = match thread_cap()? {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(InputError::from)?
                .install(|| commands::execute(&cfg)),
            None => commands::execute(&cfg),
        }?;
        Ok((cfg, outcome))
    });
    let (cfg, outcome) = match result {
        Ok(v) => v,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return 1;
        }
    };
    let text = outcome.report.render(cfg.format);
    match &cfg.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
                return 1;
            }
        }
        None => {
            let _ = stdout.write_all(text.as_bytes());
        }
    }
    match outcome.mismatch {
        Some(msg) => {
            let _ = writeln!(stderr, "{msg}");
            2
        }
        None => 0,
    }
}
