//! Command-line front end.
//!
//! Exit codes: `0` success, `1` unexpected numerical failure, `2` invalid
//! configuration, `3` a cross-check exceeded its tolerance.

mod commands;
mod output;
mod selfcheck;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};

pub use output::{Cell, Format, Table};

use crate::error::{Error, Result};
use crate::floquet::{default_energy_range, find_band_edges};
use crate::potentials::PotentialSpec;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ptlame",
    version,
    about = "Complex PT-invariant Lamé-type potentials: closed-form band edges checked against Floquet theory"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tabulate Re V and Im V over two periods.
    SamplePotential {
        #[command(flatten)]
        potential: PotentialArgs,
        /// Points per period.
        #[arg(long, default_value_t = 400)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form band edges next to Floquet edges.
    Edges {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        range: RangeArgs,
        /// Largest accepted |analytic - numeric|.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Discriminant Δ(E) on a uniform energy grid.
    Scan {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        range: RangeArgs,
        /// Emit Δ of the PT-transformed Lamé potential at m next to Δ(E + a(a+1)) of the Lamé potential at 1 - m.
        #[arg(long)]
        paired: bool,
        /// Largest accepted difference in a paired scan.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Numerical Bloch wavenumber, with the analytic one for a = 1.
    Dispersion {
        #[command(flatten)]
        potential: PotentialArgs,
        #[command(flatten)]
        range: RangeArgs,
        /// Largest accepted |k_numeric - k_analytic| inside bands.
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run the built-in invariant suite and print a pass/fail table.
    Selfcheck {
        #[arg(long, default_value_t = 0.75)]
        m: f64,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        beta: f64,
        /// Tighten every check tolerance to at most this value.
        #[arg(long)]
        tol: Option<f64>,
    },
}

#[derive(Debug, Clone, Args)]
struct PotentialArgs {
    #[arg(long, default_value_t = 3)]
    a: u32,
    #[arg(long, default_value_t = 0)]
    b: u32,
    #[arg(long, default_value_t = 0.75)]
    m: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    beta: f64,
    /// Apply x -> ix + β, V -> -V. Repeatable; order relative to --partner matters.
    #[arg(long, action = ArgAction::Count)]
    pt: u8,
    /// Replace the potential by its SUSY partner W² + W'. Repeatable.
    #[arg(long, action = ArgAction::Count)]
    partner: u8,
    /// Shift so that the lowest band edge sits at zero.
    #[arg(long)]
    shift_zero: bool,
}

#[derive(Debug, Clone, Args)]
struct RangeArgs {
    #[arg(long, allow_negative_numbers = true)]
    emin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    emax: Option<f64>,
    /// Number of energy samples.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Clone, Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A construction step applied to the base potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Pt,
    Partner,
}

impl Op {
    fn label(self) -> &'static str {
        match self {
            Op::Pt => "pt",
            Op::Partner => "partner",
        }
    }
}

/// Validated description of the potential a command works on.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub a: u32,
    pub b: u32,
    pub m: f64,
    pub beta: f64,
    pub ops: Vec<Op>,
    pub shift_to_zero: bool,
    pub emin: Option<f64>,
    pub emax: Option<f64>,
    pub n: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub tol: f64,
}

impl RunConfig {
    pub fn ops_label(&self) -> String {
        let ops: Vec<_> = self.ops.iter().map(|o| o.label()).collect();
        if ops.is_empty() {
            "none".into()
        } else {
            ops.join(",")
        }
    }

    /// Builds the potential: base family, then each step in command-line
    /// order, then the optional zero shift. A partner step first shifts its
    /// input so the ground state sits at zero.
    pub fn build(&self) -> Result<PotentialSpec> {
        let mut spec = PotentialSpec::associated_lame(self.a, self.b, self.m)?;
        for op in &self.ops {
            spec = match op {
                Op::Pt => spec.pt_transform(self.beta)?,
                Op::Partner => spec.shift_to_zero()?.susy_partner()?,
            };
        }
        if self.shift_to_zero {
            spec = shift_to_zero_any(&spec)?;
        }
        Ok(spec)
    }
}

/// Closed-form zero shift, falling back to the lowest Floquet edge.
fn shift_to_zero_any(spec: &PotentialSpec) -> Result<PotentialSpec> {
    match spec.shift_to_zero() {
        Ok(s) => Ok(s),
        Err(Error::NoClosedForm(_)) => {
            let (lo, hi) = default_energy_range(spec)?;
            let edges = find_band_edges(spec, lo, hi)?;
            let e0 = edges
                .edges
                .first()
                .ok_or_else(|| Error::InvalidArgument(format!("no band edge found for {spec}")))?;
            Ok(spec.shifted(e0.energy))
        }
        Err(e) => Err(e),
    }
}

/// Order of the `--pt` / `--partner` flags as given. Both are plain
/// switches, so a raw token scan is unambiguous; clap's counts confirm it.
fn step_order(args: &[OsString], pt: u8, partner: u8) -> Vec<Op> {
    let steps: Vec<Op> = args
        .iter()
        .take_while(|a| a.as_os_str() != "--")
        .filter_map(|a| match a.to_str() {
            Some("--pt") => Some(Op::Pt),
            Some("--partner") => Some(Op::Partner),
            _ => None,
        })
        .collect();
    debug_assert_eq!(steps.iter().filter(|o| **o == Op::Pt).count(), pt as usize);
    debug_assert_eq!(steps.iter().filter(|o| **o == Op::Partner).count(), partner as usize);
    steps
}

fn config(p: &PotentialArgs, range: Option<&RangeArgs>, output: Option<&OutputArgs>, tol: f64, ops: Vec<Op>) -> RunConfig {
    RunConfig {
        a: p.a,
        b: p.b,
        m: p.m,
        beta: p.beta,
        ops,
        shift_to_zero: p.shift_zero,
        emin: range.and_then(|r| r.emin),
        emax: range.and_then(|r| r.emax),
        n: range.and_then(|r| r.n),
        format: output.map_or(Format::Csv, |o| o.format),
        out: output.and_then(|o| o.out.clone()),
        tol,
    }
}

/// Outcome of a command: the rendered table plus whether every cross-check
/// passed.
pub struct Outcome {
    pub table: Table,
    pub verified: bool,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let matches = match Cli::command().try_get_matches_from(&args) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_CONFIG;
        }
    };
    let ops = |p: &PotentialArgs| step_order(&args[1..], p.pt, p.partner);

    let (cfg, task) = match &cli.command {
        Command::SamplePotential { potential, n, output } => {
            let mut cfg = config(potential, None, Some(output), 0.0, ops(potential));
            cfg.n = Some(*n);
            (cfg, commands::Task::Sample)
        }
        Command::Edges { potential, range, tol, output } => {
            (config(potential, Some(range), Some(output), *tol, ops(potential)), commands::Task::Edges)
        }
        Command::Scan { potential, range, paired, tol, output } => (
            config(potential, Some(range), Some(output), *tol, ops(potential)),
            commands::Task::Scan { paired: *paired },
        ),
        Command::Dispersion { potential, range, tol, output } => {
            (config(potential, Some(range), Some(output), *tol, ops(potential)), commands::Task::Dispersion)
        }
        Command::Selfcheck { m, beta, tol } => return selfcheck::run(*m, *beta, *tol),
    };

    let spec = match commands::validate(&cfg, &task) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("configuration error: {e}");
            return EXIT_CONFIG;
        }
    };
    let outcome = match commands::execute(&cfg, &task, &spec) {
        Ok(o) => o,
        Err(Error::InvalidPotential(msg)) | Err(Error::InvalidArgument(msg)) => {
            eprintln!("configuration error: {msg}");
            return EXIT_CONFIG;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
    };
    if let Err(e) = output::write_output(&outcome.table.render(cfg.format), cfg.out.as_deref()) {
        eprintln!("error: cannot write output: {e}");
        return EXIT_FAILURE;
    }
    if outcome.verified {
        EXIT_OK
    } else {
        eprintln!("verification failed");
        EXIT_VERIFY
    }
}
