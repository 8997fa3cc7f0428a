use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::table::{ResultTable, Row};
use crate::error::{Error, Result};

/// Column order of the CSV output.
pub const HEADER: [&str; 30] = [
    "eta",
    "n_b",
    "d",
    "m",
    "rule",
    "r_or_n",
    "p_tp",
    "p_fp",
    "analytic_classical_lb",
    "analytic_tmsv_ub",
    "analytic_tmsv_ub_clamped",
    "analytic_fixed_shot_error",
    "analytic_truncated_energy",
    "analytic_truncated_error",
    "analytic_expected_transmissions",
    "analytic_energy",
    "analytic_first_click_bound",
    "analytic_first_click_bound_clamped",
    "analytic_chernoff_constant",
    "analytic_r_click_bound",
    "analytic_r_click_bound_clamped",
    "analytic_series",
    "analytic_series_tail",
    "mc_error",
    "mc_ci_low",
    "mc_ci_high",
    "mc_mean_transmissions",
    "mc_mean_photons",
    "seed",
    "error",
];

/// 17 significant digits, enough to round-trip any f64.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

fn record(row: &Row) -> [String; 30] {
    [
        float(row.eta),
        float(row.n_b),
        row.d.to_string(),
        row.m.clone(),
        row.rule.to_string(),
        row.r_or_n.to_string(),
        opt(row.p_tp),
        opt(row.p_fp),
        opt(row.analytic_classical_lb),
        opt(row.analytic_tmsv_ub),
        opt(row.analytic_tmsv_ub_clamped),
        opt(row.analytic_fixed_shot_error),
        opt(row.analytic_truncated_energy),
        opt(row.analytic_truncated_error),
        opt(row.analytic_expected_transmissions),
        opt(row.analytic_energy),
        opt(row.analytic_first_click_bound),
        opt(row.analytic_first_click_bound_clamped),
        opt(row.analytic_chernoff_constant),
        opt(row.analytic_r_click_bound),
        opt(row.analytic_r_click_bound_clamped),
        opt(row.analytic_series),
        opt(row.analytic_series_tail),
        opt(row.mc_error),
        opt(row.mc_ci_low),
        opt(row.mc_ci_high),
        opt(row.mc_mean_transmissions),
        opt(row.mc_mean_photons),
        row.seed.to_string(),
        row.error.clone().unwrap_or_default(),
    ]
}

pub fn write_csv_to<W: Write>(table: &ResultTable, out: W) -> csv::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(out);
    w.write_record(HEADER)?;
    for row in &table.rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv(table: &ResultTable, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv_to(table, BufWriter::new(file)).map_err(|source| Error::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// Same rows as the CSV, as a JSON array.
pub fn write_json(table: &ResultTable, path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut w = BufWriter::new(File::create(path).map_err(io_err)?);
    serde_json::to_writer_pretty(&mut w, &table.rows).map_err(|e| io_err(e.into()))?;
    w.write_all(b"\n").map_err(io_err)?;
    w.flush().map_err(io_err)
}
