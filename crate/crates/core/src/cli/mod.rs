//! `ptscatter` command line: `sweep`, `check`, `critical` and `report`.
//!
//! Exit codes: 0 success, 1 invalid configuration, 2 backend/model mismatch,
//! 3 numeric failure, 4 analytic/numeric discrepancy, 5 no critical crossing.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::analysis::{
    default_critical_grid, detect_anomalies, find_critical_v2, handedness_summary, linspace, sweep,
    Backend, DEFAULT_EPS,
};
use crate::analytic;
use crate::engine::{NumericOptions, NumericSolver};
use crate::error::ScatterError;
use crate::potential::{Coefficients, Model, PotentialSpec};

pub use config::{Format, RunArgs, RunConfig};

/// Largest relative analytic/numeric discrepancy `check` accepts.
pub const CHECK_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scatter(#[from] ScatterError),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("{column} discrepancy {value:e} exceeds {CHECK_TOLERANCE:e} (worst at E = {energy})")]
    Discrepancy {
        column: &'static str,
        value: f64,
        energy: f64,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Discrepancy { .. } => 4,
            CliError::Scatter(e) => match e {
                ScatterError::InvalidSpec(_)
                | ScatterError::UnknownModel(_)
                | ScatterError::InvalidGrid(_)
                | ScatterError::InvalidOptions(_)
                | ScatterError::NonPositiveEnergy(_) => 1,
                ScatterError::NoClosedForm(_) => 2,
                ScatterError::NoCrossing { .. } => 5,
                _ => 3,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "ptscatter",
    version,
    about = "Scattering coefficients of complex PT-symmetric barriers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate T, R_l, R_r, A_l, A_r over an energy grid
    Sweep(RunArgs),
    /// Compare closed-form and numeric coefficients (rect, scarf)
    Check(RunArgs),
    /// Bisect for the imaginary strength where T first exceeds 1
    Critical(CriticalArgs),
    /// Emit the data and plot script for one of the figure presets
    Report(ReportArgs),
}

#[derive(Debug, Clone, clap::Args)]
pub struct CriticalArgs {
    #[arg(long, default_value = "scarf")]
    pub model: String,
    #[arg(long, allow_negative_numbers = true)]
    pub v1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    /// V2 search interval (default: 0 to V1 + Δ)
    #[arg(long, num_args = 2, value_names = ["LOW", "HIGH"])]
    pub range: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.01)]
    pub tol: f64,
    /// Integration step for the numeric models (default 1e-3·a)
    #[arg(long)]
    pub step: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
}

impl Preset {
    pub fn name(&self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
        }
    }

    /// fig1: Scarf below the critical coupling; fig2: Scarf above it;
    /// fig3/fig4: the rational and exponential models at V1 = 5, V2 = 4.
    pub fn spec(&self) -> PotentialSpec {
        let spec = match self {
            Preset::Fig1 => PotentialSpec::scarf(4.0, 2.0, 1.0),
            Preset::Fig2 => PotentialSpec::scarf(4.0, 5.0, 1.0),
            Preset::Fig3 => PotentialSpec::rational_odd(5.0, 4.0, 1.0),
            Preset::Fig4 => PotentialSpec::exp_linear(5.0, 4.0, 1.0),
        };
        spec.expect("preset parameters are valid")
    }
}

#[derive(Debug, Clone, clap::Args)]
pub struct ReportArgs {
    pub preset: Preset,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long)]
    pub step: Option<f64>,
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return 1;
            }
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    let result = match cli.command {
        Command::Sweep(args) => {
            RunConfig::resolve(args).and_then(|cfg| cmd_sweep(&cfg, stdout, stderr))
        }
        Command::Check(args) => RunConfig::resolve(args).and_then(|cfg| cmd_check(&cfg, stdout)),
        Command::Critical(args) => cmd_critical(&args, stdout),
        Command::Report(args) => cmd_report(&args, stdout),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

pub fn cmd_sweep(
    cfg: &RunConfig,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let table = sweep(&cfg.spec, &cfg.grid(), cfg.backend, &cfg.numeric)?;
    let report = detect_anomalies(&table, DEFAULT_EPS);
    let summary = handedness_summary(&table);

    let write_table = |w: &mut dyn Write| -> io::Result<()> {
        match cfg.format {
            Format::Csv => output::write_csv(&table, w),
            Format::Json => output::write_json(&table, &report, &summary, cfg, w),
        }
    };
    match &cfg.output_path {
        Some(path) => {
            let mut file = BufWriter::new(File::create(path)?);
            write_table(&mut file)?;
            file.flush()?;
            output::write_summary(&table, &report, &summary, stdout)?;
        }
        None => {
            write_table(stdout)?;
            output::write_summary(&table, &report, &summary, stderr)?;
        }
    }
    Ok(())
}

/// Worst relative analytic/numeric discrepancy of one coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discrepancy {
    pub column: &'static str,
    pub max_relative: f64,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub columns: [Discrepancy; 3],
    pub reciprocity_residual: f64,
}

impl CrossCheck {
    pub fn worst(&self) -> Discrepancy {
        *self
            .columns
            .iter()
            .max_by(|a, b| a.max_relative.total_cmp(&b.max_relative))
            .expect("three columns")
    }
}

/// Closed form versus numeric integration on `grid` for T, R_l and R_r.
pub fn cross_check(
    spec: &PotentialSpec,
    grid: &[f64],
    opts: &NumericOptions,
) -> Result<CrossCheck, ScatterError> {
    crate::analysis::validate_grid(grid)?;
    let solver = NumericSolver::new(spec, opts)?;
    let pairs: Vec<(Coefficients, Coefficients, f64)> = grid
        .par_iter()
        .map(|&e| {
            let exact = analytic::coefficients(spec, e)?;
            let (numeric, residual) = solver.coefficients_unchecked(e)?;
            Ok((exact, numeric, residual))
        })
        .collect::<Result<_, ScatterError>>()?;

    let rel = |a: f64, n: f64| (a - n).abs() / a.abs().max(1e-12);
    let column = |name: &'static str, pick: fn(&Coefficients) -> f64| {
        pairs.iter().fold(
            Discrepancy {
                column: name,
                max_relative: 0.0,
                energy: grid[0],
            },
            |worst, (exact, numeric, _)| {
                let d = rel(pick(exact), pick(numeric));
                if d > worst.max_relative || d.is_nan() {
                    Discrepancy {
                        column: name,
                        max_relative: d,
                        energy: exact.energy,
                    }
                } else {
                    worst
                }
            },
        )
    };
    Ok(CrossCheck {
        columns: [
            column("T", |c| c.transmission),
            column("R_l", |c| c.reflection_left),
            column("R_r", |c| c.reflection_right),
        ],
        reciprocity_residual: pairs.iter().map(|p| p.2).fold(0.0, f64::max),
    })
}

pub fn cmd_check(cfg: &RunConfig, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !cfg.spec.model().has_closed_form() {
        return Err(ScatterError::NoClosedForm(cfg.spec.model()).into());
    }
    let grid = cfg.grid();
    let check = cross_check(&cfg.spec, &grid, &cfg.numeric)?;
    writeln!(
        stdout,
        "check {} on {} energies in [{}, {}], step {}",
        cfg.spec,
        grid.len(),
        cfg.e_min,
        cfg.e_max,
        cfg.numeric.step
    )?;
    for d in &check.columns {
        writeln!(
            stdout,
            "{:<4} max_rel = {:.3e} at E = {}",
            d.column, d.max_relative, d.energy
        )?;
    }
    writeln!(
        stdout,
        "reciprocity_residual = {:.3e}",
        check.reciprocity_residual
    )?;
    let worst = check.worst();
    if worst.max_relative.is_nan() || worst.max_relative > CHECK_TOLERANCE {
        writeln!(stdout, "FAIL (threshold {CHECK_TOLERANCE:e})")?;
        return Err(CliError::Discrepancy {
            column: worst.column,
            value: worst.max_relative,
            energy: worst.energy,
        });
    }
    writeln!(stdout, "PASS (threshold {CHECK_TOLERANCE:e})")?;
    Ok(())
}

pub fn cmd_critical(args: &CriticalArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let model: Model = args.model.parse()?;
    let probe = PotentialSpec::pt_symmetric(model, args.v1, 0.0, args.a)?;
    let range = match args.range.as_deref() {
        Some([low, high]) => (*low, *high),
        Some(_) => return Err(CliError::Config("--range takes LOW HIGH".into())),
        None => (0.0, args.v1 + probe.delta()),
    };
    let opts = match args.step {
        Some(step) => NumericOptions::for_spec(&probe).with_step(step),
        None => NumericOptions::for_spec(&probe),
    };
    let grid = default_critical_grid(args.v1);
    let result = find_critical_v2(model, args.v1, args.a, range, &grid, args.tol, &opts)?;
    writeln!(
        stdout,
        "{model} V1={} a={}: V2_critical = {:.6} (bracket [{:.6}, {:.6}], {} predicate evaluations)",
        args.v1, args.a, result.v2_critical, result.bracket.0, result.bracket.1, result.predicate_evals
    )?;
    writeln!(stdout, "V2_CRITICAL={}", result.v2_critical)?;
    Ok(())
}

pub fn cmd_report(args: &ReportArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if args.n < 2 {
        return Err(CliError::Config(format!(
            "need at least 2 energies, got {}",
            args.n
        )));
    }
    let spec = args.preset.spec();
    let opts = match args.step {
        Some(step) => NumericOptions::for_spec(&spec).with_step(step),
        None => NumericOptions::for_spec(&spec),
    };
    let table = sweep(
        &spec,
        &linspace(0.1, 12.0, args.n),
        Backend::preferred(spec.model()),
        &opts,
    )?;
    let report = detect_anomalies(&table, DEFAULT_EPS);
    let summary = handedness_summary(&table);

    std::fs::create_dir_all(&args.out)?;
    let name = args.preset.name();
    let csv_name = format!("{name}.csv");
    let csv_path = args.out.join(&csv_name);
    let mut file = BufWriter::new(File::create(&csv_path)?);
    output::write_csv(&table, &mut file)?;
    file.flush()?;
    let script_path = args.out.join(format!("{name}.gp"));
    std::fs::write(
        &script_path,
        output::plot_script(&csv_name, &format!("{name}: {spec}")),
    )?;

    writeln!(
        stdout,
        "wrote {} and {}",
        csv_path.display(),
        script_path.display()
    )?;
    output::write_summary(&table, &report, &summary, stdout)?;
    Ok(())
}
