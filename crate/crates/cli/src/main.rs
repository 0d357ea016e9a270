//! `qready`: solve QUBO and Max-Cut instances, run benchmark batches,
//! analyze sample sets and serve the HTTP job API.
//!
//! Exit codes: 0 success, 1 unexpected failure, 2 input error, 3 some
//! instances failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qready_core::analytics::{diversity_report, Linkage, DEFAULT_ELITE_TOLERANCE};
use qready_core::decompose::DecomposeOptions;
use qready_core::harness::{
    emit_report, load_instance, run_benchmark, run_instances, write_diversity, BenchConfig, BenchReport,
    EmitOptions, SortKey,
};
use qready_core::io::{load_catalog, Catalog, InstanceFormat};
use qready_core::results::{InstanceSummary, ResultsFile};
use qready_core::{QualityBias, SampleSet, SamplerParams, Setting};
use qready_service::{Service, ServiceConfig};

#[derive(Parser)]
#[command(name = "qready", version, about = "Classical QUBO sampling with diversity analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample one instance file.
    Solve(SolveArgs),
    /// Run the repeat protocol over catalog instances and write a report.
    Bench(BenchArgs),
    /// Elite diversity analytics for a results JSON file.
    Analyze(AnalyzeArgs),
    /// Run the HTTP job service.
    Serve(ServeArgs),
}

#[derive(Args, Clone)]
struct SamplerArgs {
    /// Wall-clock limit per repeat, in seconds.
    #[arg(long, default_value_t = 1200.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 700)]
    max_samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Parallel tabu starts ("auto" uses every core).
    #[arg(long, default_value = "auto")]
    num_starts: Setting,
    /// Stop after this many moves per start (deterministic budget).
    #[arg(long)]
    max_moves: Option<u64>,
    /// Stop early after a stretch without improvement.
    #[arg(long)]
    speed: bool,
    /// Solve through subQUBO decomposition.
    #[arg(long)]
    decompose: bool,
    /// Subproblem size for --decompose.
    #[arg(long, default_value_t = 64)]
    subsize: usize,
    /// Relative elite tolerance.
    #[arg(long, default_value_t = DEFAULT_ELITE_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value = "average")]
    linkage: Linkage,
}

impl SamplerArgs {
    fn params(&self) -> SamplerParams {
        SamplerParams {
            time_limit: self.time_limit,
            max_samples: self.max_samples,
            seed: self.seed,
            num_starts: self.num_starts,
            max_moves: self.max_moves,
            quality_bias: if self.speed { QualityBias::Speed } else { QualityBias::Quality },
            ..Default::default()
        }
    }

    fn decompose(&self) -> Option<DecomposeOptions> {
        self.decompose.then(|| DecomposeOptions { subsize: self.subsize, ..Default::default() })
    }
}

#[derive(Args)]
struct SolveArgs {
    file: PathBuf,
    #[arg(long, default_value = "qubo")]
    format: InstanceFormat,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Write results.json, report files and diversity artifacts here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Catalog used to look up a best-known value by file name.
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Catalog CSV (defaults to the bundled 45-instance catalog).
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[arg(long)]
    instances_dir: PathBuf,
    /// Instance names or paths; defaults to every catalog entry.
    instances: Vec<String>,
    #[arg(long, default_value = "maxcut")]
    format: InstanceFormat,
    #[arg(long, default_value_t = 5)]
    repeats: usize,
    #[arg(long, default_value = "relative-delta-energy")]
    sort_key: SortKey,
    #[arg(long, default_value = "bench-out")]
    out: PathBuf,
    /// Run instances concurrently (small tests only).
    #[arg(long)]
    concurrent: bool,
    #[command(flatten)]
    sampler: SamplerArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    samples: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ELITE_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value = "average")]
    linkage: Linkage,
    /// Write distance/histogram CSVs, dendrogram JSON and SVG here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, env = "QREADY_HOST", default_value = "127.0.0.1")]
    host: String,
    /// Port to bind; 0 picks a free one.
    #[arg(long, env = "QREADY_PORT", default_value_t = 8080)]
    port: u16,
    #[arg(long, env = "QREADY_WORKERS", default_value_t = 1)]
    workers: usize,
    #[arg(long, env = "QREADY_MAX_BODY_BYTES", default_value_t = 64 * 1024 * 1024)]
    max_body_bytes: usize,
    #[arg(long, env = "QREADY_DATA_DIR", default_value = "qready-jobs")]
    data_dir: PathBuf,
    #[arg(long, env = "QREADY_DEFAULT_TIME_LIMIT", default_value_t = 60.0)]
    default_time_limit: f64,
    #[arg(long, env = "QREADY_INSTANCES_DIR")]
    instances_dir: Option<PathBuf>,
    #[arg(long, env = "QREADY_CATALOG")]
    catalog: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Partial(String),
    Other(String),
}

impl Failure {
    fn report(self) -> ExitCode {
        let (code, message) = match self {
            Failure::Input(m) => (2, m),
            Failure::Partial(m) => (3, m),
            Failure::Other(m) => (1, m),
        };
        eprintln!("qready: {message}");
        ExitCode::from(code)
    }
}

fn io_failure(e: impl std::fmt::Display) -> Failure {
    Failure::Other(e.to_string())
}

fn catalog_or_builtin(path: Option<&PathBuf>) -> Result<Catalog, Failure> {
    match path {
        Some(p) => load_catalog(p).map_err(|e| Failure::Input(e.to_string())),
        None => Ok(Catalog::builtin()),
    }
}

fn print_summary(report: &BenchReport) {
    for row in &report.instances {
        match (&row.error, row.selected()) {
            (Some(e), _) => println!("{}: FAILED {e}", row.name),
            (None, Some(rep)) => {
                let rde = row.relative_delta_energy.map_or("n/a".to_string(), |r| format!("{r:e}"));
                let outcome = row.outcome.map_or("n/a", |o| o.as_str());
                println!(
                    "{}: best_energy {} (objective {}) repeat {} first_found {:.3}s end {:.3}s samples {} elite {} rde {rde} {outcome}",
                    row.name,
                    rep.best_energy,
                    rep.best_objective,
                    rep.repeat,
                    rep.first_found_time,
                    rep.end_time,
                    rep.num_samples,
                    row.elite_count.unwrap_or(0),
                );
            }
            (None, None) => println!("{}: no result", row.name),
        }
    }
}

fn solve(args: SolveArgs) -> Result<(), Failure> {
    if args.repeats == 0 {
        return Err(Failure::Input("--repeats must be at least 1".into()));
    }
    let params = args.sampler.params();
    params.validate().map_err(|e| Failure::Input(e.to_string()))?;
    let cfg = BenchConfig {
        catalog: Some(catalog_or_builtin(args.catalog.as_ref())?),
        format: args.format,
        params,
        repeats: args.repeats,
        decompose: args.sampler.decompose(),
        out_dir: args.out.clone(),
        elite_tolerance: args.sampler.tolerance,
        ..Default::default()
    };
    let source = args.file.to_string_lossy().into_owned();
    let instance = load_instance(&cfg, &source).map_err(Failure::Input)?;
    let report = run_instances(&cfg, std::slice::from_ref(&instance));
    print_summary(&report);
    let row = &report.instances[0];
    if let Some(dir) = &args.out {
        let options = EmitOptions { elite_tolerance: args.sampler.tolerance, linkage: args.sampler.linkage, ..Default::default() };
        emit_report(&report, &options, dir).map_err(io_failure)?;
        if let (Some(set), Some(rep)) = (&row.selected_samples, row.selected()) {
            let params = SamplerParams { seed: rep.seed, ..cfg.params.clone() };
            let results = ResultsFile::new(InstanceSummary::of(&row.name, &instance.qubo), params, set.clone());
            results.save(dir.join("results.json")).map_err(io_failure)?;
        }
    }
    match &row.error {
        Some(e) => Err(Failure::Other(format!("{}: {e}", row.name))),
        None => Ok(()),
    }
}

fn bench(args: BenchArgs) -> Result<(), Failure> {
    let catalog = catalog_or_builtin(args.catalog.as_ref())?;
    if !args.instances_dir.is_dir() {
        return Err(Failure::Input(format!("instances dir {} does not exist", args.instances_dir.display())));
    }
    let instances = if args.instances.is_empty() {
        catalog.entries().iter().map(|e| e.name.clone()).collect()
    } else {
        args.instances.clone()
    };
    let cfg = BenchConfig {
        instances,
        catalog: Some(catalog),
        instances_dir: Some(args.instances_dir.clone()),
        format: args.format,
        params: args.sampler.params(),
        repeats: args.repeats,
        decompose: args.sampler.decompose(),
        out_dir: Some(args.out.clone()),
        concurrent_instances: args.concurrent,
        elite_tolerance: args.sampler.tolerance,
    };
    let report = run_benchmark(&cfg).map_err(|e| Failure::Input(e.to_string()))?;
    print_summary(&report);
    let options =
        EmitOptions { sort_key: args.sort_key, elite_tolerance: args.sampler.tolerance, linkage: args.sampler.linkage };
    emit_report(&report, &options, &args.out).map_err(io_failure)?;
    println!("report written to {}", args.out.display());
    match report.failures() {
        0 => Ok(()),
        n => Err(Failure::Partial(format!("{n} of {} instances failed", report.instances.len()))),
    }
}

fn load_sample_set(path: &PathBuf) -> Result<(String, SampleSet), Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    match ResultsFile::from_json(&text) {
        Ok(r) => Ok((r.instance.name, r.sample_set)),
        // a bare sample set is accepted too
        Err(first) => serde_json::from_str::<SampleSet>(&text)
            .map(|set| {
                let name = path.file_stem().map_or("samples".into(), |s| s.to_string_lossy().into_owned());
                (name, set)
            })
            .map_err(|_| Failure::Input(format!("{}: {first}", path.display()))),
    }
}

fn analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let (name, set) = load_sample_set(&args.samples)?;
    let report = diversity_report(&set, args.tolerance, args.linkage).map_err(|e| Failure::Input(e.to_string()))?;
    println!("{}", serde_json::to_string_pretty(&report).map_err(io_failure)?);
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(io_failure)?;
        let distances = report.distances.as_ref().expect("report carries distances");
        write_diversity(dir, &name, &report, distances).map_err(io_failure)?;
    }
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), Failure> {
    let config = ServiceConfig {
        data_dir: args.data_dir,
        workers: args.workers.max(1),
        max_body_bytes: args.max_body_bytes,
        default_time_limit: args.default_time_limit,
        catalog: catalog_or_builtin(args.catalog.as_ref())?,
        instances_dir: args.instances_dir,
    };
    let runtime = tokio::runtime::Runtime::new().map_err(io_failure)?;
    runtime.block_on(async move {
        let service = Service::start(config).map_err(io_failure)?;
        let listener = tokio::net::TcpListener::bind((args.host.as_str(), args.port))
            .await
            .map_err(|e| Failure::Input(format!("cannot bind {}:{}: {e}", args.host, args.port)))?;
        // the acceptance suite reads this line to find the port
        println!("listening on http://{}", listener.local_addr().map_err(io_failure)?);
        use std::io::Write as _;
        std::io::stdout().flush().ok();
        service
            .serve(listener, async {
                tokio::signal::ctrl_c().await.ok();
            })
            .await
            .map_err(io_failure)
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            e.print().ok();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Solve(a) => solve(a),
        Command::Bench(a) => bench(a),
        Command::Analyze(a) => analyze(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
