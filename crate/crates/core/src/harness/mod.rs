//! Benchmark protocol: every instance is sampled `repeats` times, the
//! repeat with the lowest energy is kept, and the result is compared with
//! the catalog's best-known value.

mod plots;
mod report;

pub use plots::{diversity_svg, rde_svg, symlog_offset, time_markers_svg, SYMLOG_FLOOR_EXP};
pub use report::{emit_report, write_diversity, EmitOptions, CSV_COLUMNS};

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytics::{elite_filter, relative_delta_energy, DEFAULT_ELITE_TOLERANCE};
use crate::decompose::{solve_large, DecomposeOptions, TabuInner};
use crate::error::SolveError;
use crate::io::{parse_instance, Catalog, CatalogEntry, InstanceFormat};
use crate::qubo::{QuboInstance, Sense, Solution};
use crate::results::{InstanceSummary, ResultsFile};
use crate::sampler::{sample, SampleSet, SamplerParams};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SortKey {
    #[default]
    RelativeDeltaEnergy,
    ProblemSize,
    ProblemDensity,
}

impl SortKey {
    pub fn slug(self) -> &'static str {
        match self {
            SortKey::RelativeDeltaEnergy => "relative-delta-energy",
            SortKey::ProblemSize => "problem-size",
            SortKey::ProblemDensity => "problem-density",
        }
    }
}

impl FromStr for SortKey {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.replace('-', "_").as_str() {
            "relative_delta_energy" | "rde" => Ok(SortKey::RelativeDeltaEnergy),
            "problem_size" | "size" => Ok(SortKey::ProblemSize),
            "problem_density" | "density" => Ok(SortKey::ProblemDensity),
            other => Err(format!("unknown sort key '{other}'")),
        }
    }
}

impl fmt::Display for SortKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// Win/tie/loss against the best-known value (blue/green/red in the plots).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Win,
    Tie,
    Loss,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Win => "win",
            Outcome::Tie => "tie",
            Outcome::Loss => "loss",
        }
    }

    /// Classifies `achieved` against `reference`, both minimization energies.
    pub fn classify(reference: f64, achieved: f64) -> Outcome {
        if achieved < reference {
            Outcome::Win
        } else if achieved > reference {
            Outcome::Loss
        } else {
            Outcome::Tie
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    /// Instance file paths or catalog names.
    pub instances: Vec<String>,
    pub catalog: Option<Catalog>,
    pub instances_dir: Option<PathBuf>,
    pub format: InstanceFormat,
    /// Time limit, pool size and base seed live here.
    pub params: SamplerParams,
    pub repeats: usize,
    pub decompose: Option<DecomposeOptions>,
    pub out_dir: Option<PathBuf>,
    /// Run instances on separate threads (small tests only).
    pub concurrent_instances: bool,
    pub elite_tolerance: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            instances: Vec::new(),
            catalog: None,
            instances_dir: None,
            format: InstanceFormat::Maxcut,
            params: SamplerParams::default(),
            repeats: 5,
            decompose: None,
            out_dir: None,
            concurrent_instances: false,
            elite_tolerance: DEFAULT_ELITE_TOLERANCE,
        }
    }
}

/// A parsed instance ready to benchmark.
#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub name: String,
    pub qubo: QuboInstance,
    pub catalog_entry: Option<CatalogEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepeatResult {
    pub repeat: usize,
    pub seed: u64,
    /// Minimization energy of the best sample.
    pub best_energy: f64,
    /// The same value in the source problem's sense.
    pub best_objective: f64,
    pub first_found_time: f64,
    pub end_time: f64,
    pub num_samples: usize,
    pub best_bits: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    pub name: String,
    pub num_variables: usize,
    pub num_nonzeros: usize,
    pub density: f64,
    pub sense: Sense,
    /// Catalog reference in the source problem's sense.
    pub best_known_energy: Option<f64>,
    pub repeats: Vec<RepeatResult>,
    pub selected_repeat: Option<usize>,
    pub relative_delta_energy: Option<f64>,
    pub outcome: Option<Outcome>,
    pub elite_count: Option<usize>,
    pub error: Option<String>,
    /// Sample set of the selected repeat, kept for diversity output.
    #[serde(skip)]
    pub selected_samples: Option<SampleSet>,
}

impl InstanceReport {
    pub fn selected(&self) -> Option<&RepeatResult> {
        self.selected_repeat.and_then(|k| self.repeats.get(k))
    }

    fn failed(name: String, error: String) -> Self {
        InstanceReport {
            name,
            num_variables: 0,
            num_nonzeros: 0,
            density: 0.0,
            sense: Sense::Minimize,
            best_known_energy: None,
            repeats: Vec::new(),
            selected_repeat: None,
            relative_delta_energy: None,
            outcome: None,
            elite_count: None,
            error: Some(error),
            selected_samples: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub time_limit: f64,
    pub repeats: usize,
    pub max_samples: usize,
    pub seed: u64,
    pub decompose: bool,
    pub instances: Vec<InstanceReport>,
}

impl BenchReport {
    pub fn failures(&self) -> usize {
        self.instances.iter().filter(|r| r.error.is_some()).count()
    }

    /// Instance indices ordered by `key`, ties broken by name.
    pub fn sorted_indices(&self, key: SortKey) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.instances.len()).collect();
        idx.sort_by(|&a, &b| {
            let (ra, rb) = (&self.instances[a], &self.instances[b]);
            let primary = match key {
                SortKey::RelativeDeltaEnergy => match (ra.relative_delta_energy, rb.relative_delta_energy) {
                    (Some(x), Some(y)) => x.total_cmp(&y),
                    (Some(_), None) => std::cmp::Ordering::Less,
                    (None, Some(_)) => std::cmp::Ordering::Greater,
                    (None, None) => std::cmp::Ordering::Equal,
                },
                SortKey::ProblemSize => ra.num_variables.cmp(&rb.num_variables),
                SortKey::ProblemDensity => ra.density.total_cmp(&rb.density),
            };
            primary.then_with(|| ra.name.cmp(&rb.name))
        });
        idx
    }
}

/// Finds `name` as a file path, or as a catalog instance inside `dir`.
pub fn resolve_instance_path(name: &str, dir: Option<&Path>) -> Option<PathBuf> {
    let direct = PathBuf::from(name);
    if direct.is_file() {
        return Some(direct);
    }
    let dir = dir?;
    ["", ".txt", ".mc", ".qubo", ".dat"]
        .iter()
        .map(|ext| dir.join(format!("{name}{ext}")))
        .find(|p| p.is_file())
}

/// Resolves and parses one configured instance, attaching its catalog row.
pub fn load_instance(cfg: &BenchConfig, source: &str) -> Result<BenchInstance, String> {
    let path = resolve_instance_path(source, cfg.instances_dir.as_deref())
        .ok_or_else(|| format!("instance '{source}' not found"))?;
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| source.to_string());
    let file = std::fs::File::open(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut qubo =
        parse_instance(std::io::BufReader::new(file), cfg.format).map_err(|e| format!("{}: {e}", path.display()))?;
    let catalog_entry = cfg.catalog.as_ref().and_then(|c| c.get(&name).or_else(|| c.get(source))).cloned();
    if let Some(entry) = &catalog_entry {
        // a qubo file from a maximization source must be negated to minimize
        if cfg.format == InstanceFormat::Qubo && entry.sense == Sense::Maximize {
            qubo = qubo.negated();
        }
    }
    Ok(BenchInstance { name, qubo, catalog_entry })
}

fn run_once(inst: &BenchInstance, cfg: &BenchConfig, params: &SamplerParams) -> Result<SampleSet, SolveError> {
    match &cfg.decompose {
        Some(options) => solve_large(&inst.qubo, params, &TabuInner::default(), options),
        None => sample(&inst.qubo, params),
    }
}

/// Runs all repeats of one instance and assembles its report row.
pub fn benchmark_instance(inst: &BenchInstance, cfg: &BenchConfig) -> InstanceReport {
    let q = &inst.qubo;
    let entry = inst.catalog_entry.as_ref();
    let mut report = InstanceReport {
        name: inst.name.clone(),
        num_variables: q.num_variables(),
        num_nonzeros: entry.map_or(q.num_nonzeros(), |e| e.num_nonzeros),
        density: entry.map_or(q.density(), |e| e.density),
        sense: q.sense(),
        best_known_energy: entry.and_then(|e| e.best_known_energy),
        ..InstanceReport::failed(inst.name.clone(), String::new())
    };
    report.error = None;

    let mut best: Option<(usize, SampleSet)> = None;
    for repeat in 0..cfg.repeats {
        let seed = cfg.params.seed ^ repeat as u64;
        let params = SamplerParams { seed, ..cfg.params.clone() };
        let set = match run_once(inst, cfg, &params) {
            Ok(set) => set,
            Err(e) => {
                report.error = Some(format!("repeat {repeat}: {e}"));
                return report;
            }
        };
        let Some(top) = set.best() else {
            report.error = Some(format!("repeat {repeat}: sampler returned no samples"));
            return report;
        };
        report.repeats.push(RepeatResult {
            repeat,
            seed,
            best_energy: top.energy,
            best_objective: q.sense().to_native(top.energy),
            first_found_time: set.first_found_time(),
            end_time: set.end_time(),
            num_samples: set.len(),
            best_bits: top.bits.to_bit_string(),
        });
        if let Some(dir) = &cfg.out_dir {
            let raw = ResultsFile::new(InstanceSummary::of(&inst.name, q), params.clone(), set.clone());
            let path = dir.join("raw").join(format!("{}-r{repeat}.json", inst.name));
            if let Err(e) = std::fs::create_dir_all(dir.join("raw")).map_err(|e| e.to_string()).and_then(|_| raw.save(&path).map_err(|e| e.to_string())) {
                report.error = Some(format!("repeat {repeat}: {e}"));
                return report;
            }
        }
        // strict comparison keeps the lowest repeat index on ties
        if best.as_ref().is_none_or(|(_, b)| top.energy < b.best_energy().expect("non-empty")) {
            best = Some((repeat, set));
        }
    }

    if let Some((k, set)) = best {
        let energy = report.repeats[k].best_energy;
        report.selected_repeat = Some(k);
        if let Some(reference) = entry.and_then(|e| e.best_known_min_energy()) {
            report.outcome = Some(Outcome::classify(reference, energy));
            report.relative_delta_energy = relative_delta_energy(reference, energy).ok();
        }
        report.elite_count = elite_filter(&set, cfg.elite_tolerance).ok().map(|e| e.len());
        report.selected_samples = Some(set);
    }
    report
}

/// Benchmarks pre-loaded instances.
pub fn run_instances(cfg: &BenchConfig, instances: &[BenchInstance]) -> BenchReport {
    let rows = if cfg.concurrent_instances {
        std::thread::scope(|s| {
            let handles: Vec<_> = instances.iter().map(|inst| s.spawn(move || benchmark_instance(inst, cfg))).collect();
            handles.into_iter().map(|h| h.join().expect("benchmark thread panicked")).collect()
        })
    } else {
        instances.iter().map(|inst| benchmark_instance(inst, cfg)).collect()
    };
    assemble(cfg, rows)
}

fn assemble(cfg: &BenchConfig, instances: Vec<InstanceReport>) -> BenchReport {
    BenchReport {
        schema_version: REPORT_SCHEMA_VERSION,
        time_limit: cfg.params.time_limit,
        repeats: cfg.repeats,
        max_samples: cfg.params.max_samples,
        seed: cfg.params.seed,
        decompose: cfg.decompose.is_some(),
        instances,
    }
}

/// Loads every configured instance and benchmarks it. Instances that fail
/// to load or solve are recorded with an error and the run continues.
pub fn run_benchmark(cfg: &BenchConfig) -> Result<BenchReport, SolveError> {
    if cfg.repeats == 0 {
        return Err(SolveError::InvalidParams("repeats must be at least 1".into()));
    }
    cfg.params.validate()?;
    let mut loaded = Vec::new();
    let mut slots: Vec<Result<usize, InstanceReport>> = Vec::new();
    for source in &cfg.instances {
        match load_instance(cfg, source) {
            Ok(inst) => {
                slots.push(Ok(loaded.len()));
                loaded.push(inst);
            }
            Err(e) => slots.push(Err(InstanceReport::failed(source.clone(), e))),
        }
    }
    let mut solved = run_instances(cfg, &loaded).instances.into_iter().map(Some).collect::<Vec<_>>();
    let rows = slots
        .into_iter()
        .map(|slot| match slot {
            Ok(k) => solved[k].take().expect("each instance used once"),
            Err(failed) => failed,
        })
        .collect();
    Ok(assemble(cfg, rows))
}

/// Checks that every stored energy matches its bit vector.
pub fn revalidate(report: &BenchReport, instances: &[BenchInstance], relative: f64) -> Result<(), String> {
    for row in report.instances.iter().filter(|r| r.error.is_none()) {
        let inst = instances
            .iter()
            .find(|i| i.name == row.name)
            .ok_or_else(|| format!("no instance named {}", row.name))?;
        for rep in &row.repeats {
            let bits = Solution::from_bit_string(&rep.best_bits).map_err(|e| e.to_string())?;
            let energy = inst.qubo.energy(&bits).map_err(|e| e.to_string())?;
            if !crate::qubo::energies_close(rep.best_energy, energy, relative) {
                return Err(format!("{} repeat {}: stored {} but bits give {}", row.name, rep.repeat, rep.best_energy, energy));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::Setting;

    #[test]
    fn outcome_signs() {
        assert_eq!(Outcome::classify(-100.0, -101.0), Outcome::Win);
        assert_eq!(Outcome::classify(-100.0, -100.0), Outcome::Tie);
        assert_eq!(Outcome::classify(-100.0, -99.0), Outcome::Loss);
    }

    #[test]
    fn sort_key_names() {
        assert_eq!("problem-size".parse::<SortKey>().unwrap(), SortKey::ProblemSize);
        assert_eq!("relative_delta_energy".parse::<SortKey>().unwrap(), SortKey::RelativeDeltaEnergy);
        assert!("speed".parse::<SortKey>().is_err());
    }

    #[test]
    fn win_against_catalog_reference() {
        // minimum is -101 at x = (1, 1)
        let q = QuboInstance::from_entries(2, [(0, 0, -50.0), (1, 1, -50.0), (0, 1, -1.0)], Sense::Minimize).unwrap();
        let entry = CatalogEntry {
            name: "toy".into(),
            num_variables: 2,
            num_nonzeros: 1,
            density: 1.0,
            best_known_energy: Some(-100.0),
            sense: Sense::Minimize,
            hardness_disputed: false,
        };
        let cfg = BenchConfig {
            params: SamplerParams { time_limit: 0.2, num_starts: Setting::Fixed(1), max_moves: Some(200), ..Default::default() },
            repeats: 2,
            ..Default::default()
        };
        let inst = BenchInstance { name: "toy".into(), qubo: q, catalog_entry: Some(entry) };
        let report = run_instances(&cfg, std::slice::from_ref(&inst));
        let row = &report.instances[0];
        assert_eq!(row.outcome, Some(Outcome::Win));
        assert!((row.relative_delta_energy.unwrap() - 0.01).abs() < 1e-12);
        assert_eq!(row.selected_repeat, Some(0));
        revalidate(&report, &[inst], 1e-9).unwrap();
    }

    #[test]
    fn missing_instances_are_recorded_not_fatal() {
        let cfg = BenchConfig { instances: vec!["/definitely/missing.txt".into()], ..Default::default() };
        let report = run_benchmark(&cfg).unwrap();
        assert_eq!(report.failures(), 1);
        assert!(report.instances[0].error.as_deref().unwrap().contains("not found"));
    }
}
