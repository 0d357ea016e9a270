//! Writing a benchmark report to disk as CSV, JSON and SVG.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::plots::{diversity_svg, rde_svg, time_markers_svg};
use super::{BenchReport, SortKey};
use crate::analytics::{diversity_report, Linkage, DEFAULT_ELITE_TOLERANCE};

#[derive(Debug, Clone, Copy)]
pub struct EmitOptions {
    pub sort_key: SortKey,
    pub elite_tolerance: f64,
    pub linkage: Linkage,
}

impl Default for EmitOptions {
    fn default() -> Self {
        EmitOptions { sort_key: SortKey::default(), elite_tolerance: DEFAULT_ELITE_TOLERANCE, linkage: Linkage::default() }
    }
}

/// One CSV line; fields mirror the JSON report of the selected repeat.
#[derive(Serialize)]
struct CsvRow<'a> {
    name: &'a str,
    num_variables: usize,
    num_nonzeros: usize,
    density: f64,
    sense: String,
    best_known_energy: Option<f64>,
    best_energy: Option<f64>,
    best_objective: Option<f64>,
    relative_delta_energy: Option<f64>,
    outcome: Option<&'static str>,
    selected_repeat: Option<usize>,
    first_found_time: Option<f64>,
    end_time: Option<f64>,
    num_samples: Option<usize>,
    elite_count: Option<usize>,
    error: Option<&'a str>,
}

/// Column order of `report.csv`; written even when there are no rows.
pub const CSV_COLUMNS: [&str; 16] = [
    "name",
    "num_variables",
    "num_nonzeros",
    "density",
    "sense",
    "best_known_energy",
    "best_energy",
    "best_objective",
    "relative_delta_energy",
    "outcome",
    "selected_repeat",
    "first_found_time",
    "end_time",
    "num_samples",
    "elite_count",
    "error",
];

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Writes `report.csv`, `report.json`, `rde-by-<sort>.svg`,
/// `time-markers.svg` and per-instance diversity artifacts under
/// `dir/diversity/`. Returns the paths written.
pub fn emit_report(report: &BenchReport, options: &EmitOptions, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let order = report.sorted_indices(options.sort_key);

    let csv_path = dir.join("report.csv");
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_path(&csv_path).map_err(csv_error)?;
    writer.write_record(CSV_COLUMNS).map_err(csv_error)?;
    for &k in &order {
        let row = &report.instances[k];
        let rep = row.selected();
        writer
            .serialize(CsvRow {
                name: &row.name,
                num_variables: row.num_variables,
                num_nonzeros: row.num_nonzeros,
                density: row.density,
                sense: row.sense.to_string(),
                best_known_energy: row.best_known_energy,
                best_energy: rep.map(|r| r.best_energy),
                best_objective: rep.map(|r| r.best_objective),
                relative_delta_energy: row.relative_delta_energy,
                outcome: row.outcome.map(|o| o.as_str()),
                selected_repeat: row.selected_repeat,
                first_found_time: rep.map(|r| r.first_found_time),
                end_time: rep.map(|r| r.end_time),
                num_samples: rep.map(|r| r.num_samples),
                elite_count: row.elite_count,
                error: row.error.as_deref(),
            })
            .map_err(csv_error)?;
    }
    writer.flush()?;
    written.push(csv_path);

    let json_path = dir.join("report.json");
    fs::write(&json_path, serde_json::to_string_pretty(report).map_err(io::Error::other)? + "\n")?;
    written.push(json_path);

    let rde_path = dir.join(format!("rde-by-{}.svg", options.sort_key.slug()));
    fs::write(&rde_path, rde_svg(report, options.sort_key))?;
    written.push(rde_path);

    let time_path = dir.join("time-markers.svg");
    fs::write(&time_path, time_markers_svg(report, options.sort_key))?;
    written.push(time_path);

    let diversity_dir = dir.join("diversity");
    for row in &report.instances {
        let Some(set) = &row.selected_samples else { continue };
        let Ok(div) = diversity_report(set, options.elite_tolerance, options.linkage) else { continue };
        let distances = div.distances.as_ref().expect("diversity report carries distances");
        fs::create_dir_all(&diversity_dir)?;
        written.extend(write_diversity(&diversity_dir, &row.name, &div, distances)?);
    }
    Ok(written)
}

/// Writes the distance CSV, histogram CSV, dendrogram JSON and SVG for one
/// instance.
pub fn write_diversity(
    dir: &Path,
    name: &str,
    div: &crate::analytics::DiversityReport,
    distances: &crate::analytics::DistanceMatrix,
) -> io::Result<Vec<PathBuf>> {
    let files = [
        (format!("{name}-distances.csv"), distances.to_csv()),
        (format!("{name}-histogram.csv"), div.histogram.to_csv()),
        (format!("{name}-dendrogram.json"), serde_json::to_string_pretty(div).map_err(io::Error::other)? + "\n"),
        (
            format!("{name}-diversity.svg"),
            diversity_svg(
                &format!("{name}: {} elite samples, {} linkage", div.elite_count, div.dendrogram.linkage),
                distances,
                &div.dendrogram,
                &div.histogram,
            ),
        ),
    ];
    let mut written = Vec::with_capacity(files.len());
    for (file, body) in files {
        let path = dir.join(file);
        fs::write(&path, body)?;
        written.push(path);
    }
    Ok(written)
}
