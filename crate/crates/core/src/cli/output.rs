//! CSV / JSON serialization of sweep tables, the text summary block and
//! plot scripts.

use std::io::{self, Read, Write};

use serde::Serialize;

use super::config::RunConfig;
use crate::analysis::{AnomalyReport, Column, Handedness, HandednessSummary, SweepTable};
use crate::potential::{Coefficients, PotentialSpec};

pub const CSV_HEADER: [&str; 6] = ["E", "T", "R_l", "R_r", "A_l", "A_r"];

/// 17 significant digits; parses back to the identical f64.
fn full_precision(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(table: &SweepTable, out: W) -> io::Result<()> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    writer.write_record(CSV_HEADER)?;
    for row in &table.rows {
        writer.write_record(
            [
                row.energy,
                row.transmission,
                row.reflection_left,
                row.reflection_right,
                row.absorption_left,
                row.absorption_right,
            ]
            .map(full_precision),
        )?;
    }
    writer.flush()
}

/// Rows of a CSV produced by [`write_csv`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<Coefficients>, csv::Error> {
    let mut reader = csv::Reader::from_reader(input);
    reader.deserialize().collect()
}

#[derive(Serialize)]
struct JsonSweep<'a> {
    spec: &'a PotentialSpec,
    grid: &'a [f64],
    rows: &'a [Coefficients],
    backend: &'a str,
    anomalies: &'a AnomalyReport,
    handedness: Handedness,
    handedness_summary: &'a HandednessSummary,
    reciprocity_residual: Option<f64>,
    config: &'a RunConfig,
}

pub fn write_json<W: Write>(
    table: &SweepTable,
    report: &AnomalyReport,
    summary: &HandednessSummary,
    config: &RunConfig,
    mut out: W,
) -> io::Result<()> {
    let doc = JsonSweep {
        spec: &table.spec,
        grid: &table.grid,
        rows: &table.rows,
        backend: table.backend.as_str(),
        anomalies: report,
        handedness: report.handedness,
        handedness_summary: summary,
        reciprocity_residual: table.reciprocity_residual,
        config,
    };
    serde_json::to_writer_pretty(&mut out, &doc)?;
    out.write_all(b"\n")
}

pub fn write_summary<W: Write>(
    table: &SweepTable,
    report: &AnomalyReport,
    summary: &HandednessSummary,
    mut out: W,
) -> io::Result<()> {
    let grid = &table.grid;
    writeln!(out, "# summary")?;
    writeln!(out, "potential: {}", table.spec)?;
    writeln!(out, "backend: {}", table.backend)?;
    writeln!(
        out,
        "energies: {} in [{}, {}]",
        grid.len(),
        grid.first().copied().unwrap_or(f64::NAN),
        grid.last().copied().unwrap_or(f64::NAN)
    )?;
    match table.reciprocity_residual {
        Some(r) => writeln!(out, "reciprocity_residual: {r:e}")?,
        None => writeln!(out, "reciprocity_residual: n/a")?,
    }
    for column in Column::ALL {
        let intervals = report.intervals(column);
        if intervals.is_empty() {
            writeln!(out, "anomalous {}: none", column.name())?;
        } else {
            let spans: Vec<String> = intervals
                .iter()
                .map(|i| format!("[{:.4}, {:.4}]", i.low, i.high))
                .collect();
            writeln!(out, "anomalous {}: {}", column.name(), spans.join(" "))?;
        }
    }
    writeln!(out, "physical_left: {}", report.physical_left)?;
    writeln!(out, "physical_right: {}", report.physical_right)?;
    writeln!(
        out,
        "R_r - R_l: min {:e} max {:e} (R_l < R_r everywhere: {})",
        summary.min_gap, summary.max_gap, summary.monotone_claim
    )?;
    writeln!(out, "handedness: {}", report.handedness)
}

/// Gnuplot script: E on the abscissa, T, R_l and R_r on the ordinate and a
/// dashed guide at 1.
pub fn plot_script(csv_name: &str, title: &str) -> String {
    format!(
        "# generated by ptscatter\n\
         set datafile separator \",\"\n\
         set title \"{title}\"\n\
         set xlabel \"E\"\n\
         set ylabel \"probability\"\n\
         set key top right\n\
         set arrow from graph 0, first 1 to graph 1, first 1 nohead dashtype 2\n\
         plot \"{csv_name}\" using 1:2 with lines title \"T\", \\\n\
         \x20    \"{csv_name}\" using 1:3 with lines title \"R_l\", \\\n\
         \x20    \"{csv_name}\" using 1:4 with lines title \"R_r\"\n"
    )
}
