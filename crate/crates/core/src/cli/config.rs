//! Run configuration: command-line flags layered over an optional
//! `key = value` file.

use std::fmt;
use std::path::PathBuf;

use clap::Args;
use serde::Serialize;

use super::CliError;
use crate::analysis::{linspace, Backend};
use crate::engine::NumericOptions;
use crate::potential::{Model, PotentialSpec, Units};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Flags shared by `sweep` and `check`. Every field is optional so that a
/// config file can fill the gaps; flags always win.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// Plain `key = value` file (keys as the long flags, `#` comments)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// rect | scarf | rational_odd | exp_linear
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub v1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub v2: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// Sign of the imaginary part on (−a, 0), rect only
    #[arg(long, allow_negative_numbers = true)]
    pub s1: Option<i8>,
    /// Sign of the imaginary part on (0, a), rect only
    #[arg(long, allow_negative_numbers = true)]
    pub s2: Option<i8>,
    #[arg(long)]
    pub emin: Option<f64>,
    #[arg(long)]
    pub emax: Option<f64>,
    /// Number of energies
    #[arg(long)]
    pub n: Option<usize>,
    /// analytic | numeric | auto
    #[arg(long)]
    pub backend: Option<String>,
    /// Integration step (default 1e-3·a)
    #[arg(long)]
    pub step: Option<f64>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    pub format: Option<String>,
    /// 2m (default 1)
    #[arg(long = "two-m")]
    pub two_m: Option<f64>,
    /// ħ (default 1)
    #[arg(long)]
    pub hbar: Option<f64>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn fill<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

impl RunArgs {
    /// Fill unset fields from config-file text.
    pub fn apply_config_text(&mut self, text: &str) -> Result<(), CliError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim().to_ascii_lowercase().replace('-', "_");
            let value = value.trim();
            match key.as_str() {
                "model" => fill(&mut self.model, value.to_string()),
                "v1" => fill(&mut self.v1, parse_value(&key, value)?),
                "v2" => fill(&mut self.v2, parse_value(&key, value)?),
                "a" => fill(&mut self.a, parse_value(&key, value)?),
                "s1" => fill(&mut self.s1, parse_value(&key, value)?),
                "s2" => fill(&mut self.s2, parse_value(&key, value)?),
                "emin" => fill(&mut self.emin, parse_value(&key, value)?),
                "emax" => fill(&mut self.emax, parse_value(&key, value)?),
                "n" => fill(&mut self.n, parse_value(&key, value)?),
                "backend" => fill(&mut self.backend, value.to_string()),
                "step" => fill(&mut self.step, parse_value(&key, value)?),
                "out" => fill(&mut self.out, PathBuf::from(value)),
                "format" => fill(&mut self.format, value.to_string()),
                "two_m" => fill(&mut self.two_m, parse_value(&key, value)?),
                "hbar" => fill(&mut self.hbar, parse_value(&key, value)?),
                other => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        Ok(())
    }

    fn load_config_file(&mut self) -> Result<(), CliError> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            self.apply_config_text(&text)?;
        }
        Ok(())
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub spec: PotentialSpec,
    pub e_min: f64,
    pub e_max: f64,
    pub n_points: usize,
    pub backend: Backend,
    pub numeric: NumericOptions,
    pub output_path: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn resolve(mut args: RunArgs) -> Result<Self, CliError> {
        args.load_config_file()?;
        let model: Model = args.model.as_deref().unwrap_or("scarf").parse()?;
        let units = Units::new(args.two_m.unwrap_or(1.0), args.hbar.unwrap_or(1.0))?;
        let spec = PotentialSpec::new(
            model,
            args.v1.unwrap_or(4.0),
            args.v2.unwrap_or(2.0),
            args.a.unwrap_or(1.0),
            args.s1.unwrap_or(if model == Model::Rect { -1 } else { 0 }),
            args.s2.unwrap_or(if model == Model::Rect { 1 } else { 0 }),
            units,
        )?;

        let backend = match args.backend.as_deref().unwrap_or("auto") {
            "auto" => Backend::preferred(model),
            other => other.parse::<Backend>().map_err(CliError::Config)?,
        };
        let format = match args.format.as_deref() {
            Some(f) => f.parse().map_err(CliError::Config)?,
            None => match args
                .out
                .as_ref()
                .and_then(|p| p.extension())
                .and_then(|e| e.to_str())
            {
                Some("json") => Format::Json,
                _ => Format::Csv,
            },
        };

        let e_min = args.emin.unwrap_or(0.1 * spec.delta());
        let e_max = args.emax.unwrap_or(12.0);
        let n_points = args.n.unwrap_or(200);
        if !(e_min > 0.0 && e_max > e_min && e_max.is_finite()) {
            return Err(CliError::Config(format!(
                "need 0 < emin < emax (emin = {e_min}, emax = {e_max})"
            )));
        }
        if n_points < 2 {
            return Err(CliError::Config(format!(
                "need at least 2 energies, got {n_points}"
            )));
        }

        let numeric = match args.step {
            Some(step) => NumericOptions::for_spec(&spec).with_step(step),
            None => NumericOptions::for_spec(&spec),
        };
        numeric.validate()?;

        Ok(RunConfig {
            spec,
            e_min,
            e_max,
            n_points,
            backend,
            numeric,
            output_path: args.out,
            format,
        })
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.e_min, self.e_max, self.n_points)
    }
}
