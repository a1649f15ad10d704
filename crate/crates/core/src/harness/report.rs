use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::css::Algorithm;
use crate::error::{CssError, Result};
use crate::harness::config::{ExperimentConfig, Mode};
use crate::harness::experiment::{evaluation_irls, ExperimentOutcome, MetricsRow};

/// Mean and population standard deviation of the successful rows of one
/// algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub mode: Mode,
    pub runs: usize,
    pub failures: usize,
    pub err_mean: f64,
    pub err_std: f64,
    pub wall_ms_mean: f64,
    pub words_mean: f64,
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Groups rows by (algorithm, mode) in first-appearance order.
pub fn summarize(rows: &[MetricsRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(Algorithm, Mode)> = Vec::new();
    for r in rows {
        if !keys.contains(&(r.algorithm, r.mode)) {
            keys.push((r.algorithm, r.mode));
        }
    }
    keys.into_iter()
        .map(|(algorithm, mode)| {
            let group: Vec<&MetricsRow> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm && r.mode == mode)
                .collect();
            let ok: Vec<&MetricsRow> = group.iter().copied().filter(|r| r.ok()).collect();
            let errs: Vec<f64> = ok.iter().map(|r| r.err_ratio).collect();
            let (err_mean, err_std) = mean_std(&errs);
            let (wall_ms_mean, _) = mean_std(&ok.iter().map(|r| r.wall_ms).collect::<Vec<_>>());
            let (words_mean, _) = mean_std(&ok.iter().map(|r| r.words as f64).collect::<Vec<_>>());
            SummaryRow {
                algorithm,
                mode,
                runs: ok.len(),
                failures: group.len() - ok.len(),
                err_mean,
                err_std,
                wall_ms_mean,
                words_mean,
            }
        })
        .collect()
}

/// Comment line stating how errors were evaluated.
pub fn report_header(cfg: &ExperimentConfig) -> String {
    let irls = evaluation_irls();
    format!(
        "# err_ratio = min_V ||A_I V - A||_p / ||A||_p with p = {}, IRLS tol = {:e}, max_iter = {}; std is over seeds (population)",
        cfg.p, irls.tol, irls.max_iter
    )
}

fn write_csv<S: Serialize, W: Write>(w: W, header: &str, rows: &[S]) -> Result<()> {
    let mut w = w;
    writeln!(w, "{header}")?;
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r).map_err(|e| CssError::Io(e.into()))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn format_summary(header: &str, summary: &[SummaryRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{header}");
    let _ = writeln!(
        out,
        "{:<10} {:<12} {:>5} {:>6} {:>24} {:>12} {:>12}",
        "algorithm", "mode", "runs", "failed", "err_ratio (mean ± std)", "wall_ms", "words"
    );
    for s in summary {
        let _ = writeln!(
            out,
            "{:<10} {:<12} {:>5} {:>6} {:>24} {:>12.2} {:>12.0}",
            s.algorithm.name(),
            s.mode.name(),
            s.runs,
            s.failures,
            format!("{:.6} ± {:.6}", s.err_mean, s.err_std),
            s.wall_ms_mean,
            s.words_mean
        );
    }
    out
}

/// Writes `metrics.csv`, `summary.csv` and `summary.txt` under
/// `cfg.output` and returns their paths.
pub fn write_outputs(cfg: &ExperimentConfig, outcome: &ExperimentOutcome) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(&cfg.output)?;
    let header = report_header(cfg);
    let metrics = cfg.output.join("metrics.csv");
    write_csv(fs::File::create(&metrics)?, &header, &outcome.rows)?;
    let summary_csv = cfg.output.join("summary.csv");
    write_csv(fs::File::create(&summary_csv)?, &header, &outcome.summary)?;
    let summary_txt = cfg.output.join("summary.txt");
    fs::write(&summary_txt, format_summary(&header, &outcome.summary))?;
    Ok(vec![metrics, summary_csv, summary_txt])
}

/// Reads a `metrics.csv` back, skipping `#` comment lines.
pub fn read_metrics<R: BufRead>(r: R) -> Result<Vec<MetricsRow>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    rdr.deserialize()
        .map(|row| {
            row.map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                CssError::Parse {
                    location: format!("line {line}"),
                    message: e.to_string(),
                }
            })
        })
        .collect()
}

/// Recomputes the summary of a metrics file.
pub fn report_from_file(path: &Path) -> Result<(Vec<MetricsRow>, Vec<SummaryRow>)> {
    let text = fs::read_to_string(path)?;
    let rows = read_metrics(text.as_bytes())?;
    let summary = summarize(&rows);
    Ok((rows, summary))
}

/// Header comment of a metrics file, if present.
pub fn file_header(path: &Path) -> Result<Option<String>> {
    let text = fs::read_to_string(path)?;
    Ok(text.lines().next().filter(|l| l.starts_with('#')).map(str::to_string))
}
