use std::ffi::OsString;
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::config::{Format, SuiteConfig, Tolerances};
use crate::report::Report;
use crate::suites::dump::AlgebraKind;
use crate::suites::inclusions::InclusionOptions;
use crate::suites::metrics::MetricOptions;
use crate::suites::model::{ModelMetric, ModelOptions};
use crate::suites::{cohomology, dump, inclusions, metrics, model};
use crate::{SuiteResult, EXIT_FAIL, EXIT_INTERNAL, EXIT_PASS};

#[derive(Parser, Debug)]
#[command(name = "fefferman", version, about = "Verification suites for the qc, cr and conformal tower and its flat models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// qc parameter n (quaternionic dimension of the contact distribution)
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Sample points (model: per metric; random-metrics: per metric)
    #[arg(long)]
    pub samples: Option<usize>,
    /// Override a tolerance, e.g. --tolerance weyl_model=1e-7 (repeatable)
    #[arg(long = "tolerance", value_name = "KEY=VAL")]
    pub tolerance: Vec<String>,
    /// Write the report here instead of standard output
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    pub format: Format,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Harmonic cochains of the qc algebra in degrees 1 and 2, and the Hodge check
    Cohomology {
        #[command(flatten)]
        common: Common,
    },
    /// Structure of the qc -> cr -> co inclusions and the codifferential transfer
    Inclusions {
        #[command(flatten)]
        common: Common,
        /// Seeded random cochains per inclusion
        #[arg(long, default_value_t = 100)]
        seeds: usize,
        #[arg(long)]
        negative_controls: bool,
        /// Also compare against the displayed closed-form image matrices
        #[arg(long)]
        displays: bool,
        /// Random combinations of the normality solution space to re-check
        #[arg(long, default_value_t = 50)]
        combos: usize,
    },
    /// Quadric and Heisenberg model checks
    Model {
        #[command(flatten)]
        common: Common,
        /// quadric or heisenberg (default: both)
        #[arg(long)]
        metric: Option<ModelMetric>,
        /// Repeat the Sparling invariants after a seeded conformal rescaling
        #[arg(long)]
        rescale_seed: Option<u64>,
    },
    /// Curvature identities on seeded random polynomial metrics
    RandomMetrics {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        dim: usize,
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 4)]
        degree: usize,
        #[arg(long, default_value_t = 0.3)]
        amplitude: f64,
    },
    /// Basis, degrees, brackets and Killing form of one algebra of the tower
    Dump {
        #[command(flatten)]
        common: Common,
        /// qc, cr or co
        #[arg(long, default_value = "qc")]
        algebra: AlgebraKind,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Cohomology { common }
            | Command::Inclusions { common, .. }
            | Command::Model { common, .. }
            | Command::RandomMetrics { common, .. }
            | Command::Dump { common, .. } => common,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Cohomology { .. } => "cohomology",
            Command::Inclusions { .. } => "inclusions",
            Command::Model { .. } => "model",
            Command::RandomMetrics { .. } => "random-metrics",
            Command::Dump { .. } => "dump",
        }
    }

    fn default_samples(&self) -> usize {
        match self {
            Command::RandomMetrics { .. } => 4,
            _ => 20,
        }
    }
}

pub fn config(cmd: &Command) -> Result<SuiteConfig, String> {
    let c = cmd.common();
    Ok(SuiteConfig {
        suite: cmd.name().to_string(),
        n: c.n,
        seed: c.seed,
        samples: c.samples.unwrap_or_else(|| cmd.default_samples()),
        tolerances: Tolerances::default().with_overrides(&c.tolerance)?,
        out: c.out.clone(),
        format: c.format,
    })
}

pub fn execute(cmd: &Command, cfg: &SuiteConfig) -> SuiteResult<Report> {
    match cmd {
        Command::Cohomology { .. } => cohomology::run(cfg),
        Command::Inclusions { seeds, negative_controls, displays, combos, .. } => inclusions::run(
            cfg,
            &InclusionOptions {
                seeds: *seeds,
                negative_controls: *negative_controls,
                displays: *displays,
                combos: *combos,
            },
        ),
        Command::Model { metric, rescale_seed, .. } => {
            model::run(cfg, &ModelOptions { metric: *metric, rescale_seed: *rescale_seed })
        }
        Command::RandomMetrics { dim, count, degree, amplitude, .. } => metrics::run(
            cfg,
            &MetricOptions { dim: *dim, count: *count, degree: *degree, amplitude: *amplitude },
        ),
        Command::Dump { algebra, .. } => dump::run(cfg, *algebra),
    }
}

fn emit(report: &Report, cfg: &SuiteConfig) -> std::io::Result<()> {
    let text = report.render(cfg.format);
    match &cfg.out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

/// Parse, run, write the report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_INTERNAL,
            };
        }
    };
    let cfg = match config(&cli.command) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return EXIT_INTERNAL;
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| execute(&cli.command, &cfg)));
    let report = match outcome {
        Ok(Ok(r)) => r,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            return EXIT_INTERNAL;
        }
        Err(_) => {
            eprintln!("error: internal panic in suite {}", cfg.suite);
            return EXIT_INTERNAL;
        }
    };
    if let Err(e) = emit(&report, &cfg) {
        eprintln!("error: cannot write report: {e}");
        return EXIT_INTERNAL;
    }
    if report.passed() {
        eprintln!("[fefferman] {}: pass", cfg.suite);
        EXIT_PASS
    } else {
        for f in report.failures() {
            eprintln!("[fefferman] FAIL {f}");
        }
        EXIT_FAIL
    }
}
