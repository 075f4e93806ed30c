//! `paretoband` — generate synthetic benchmarks, expand them across
//! hardware, and run multi-seed method studies on them.
//!
//! Exit codes: 0 on success, 2 for usage errors (bad flags, malformed or
//! incompatible input files), 1 for failures while writing results.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use paretoband_core::benchio::{
    expand_cloud, expand_edge, generate_synthetic, load_benchmark, load_corpus,
    load_hardware_model, load_latency_table, save_benchmark, save_corpus, save_hardware_model,
    SynthHardware, SynthSpec,
};
use paretoband_core::runner::{convergence_csv, render_table, run_study, Method, StudyConfig};
use paretoband_core::scalarize::DEFAULT_RHO;
use paretoband_core::transfer::DEFAULT_SIGMA_FLOOR2;
use paretoband_core::{Fidelity, SeededRng};

#[derive(Parser)]
#[command(
    name = "paretoband",
    version,
    about = "Multi-objective, multi-fidelity optimization on tabular benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark with a transfer corpus.
    Gen(GenArgs),
    /// Expand a benchmark across a hardware cost model.
    Expand(ExpandArgs),
    /// Run a multi-seed study of one or more methods on a benchmark.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct GenArgs {
    /// Number of configs in the grid.
    #[arg(long, default_value_t = 200)]
    configs: usize,
    /// Maximum fidelity; the table covers every level up to it.
    #[arg(long, default_value_t = 27)]
    fidelities: u64,
    /// Number of related tasks in the transfer corpus.
    #[arg(long, default_value_t = 3)]
    tasks: usize,
    /// Objectives per cell: 2 (error, runtime) or 3 (adds hardware cost).
    #[arg(long, default_value_t = 2)]
    objectives: usize,
    /// Number of devices to expand across (requires --objectives 3).
    #[arg(long)]
    hardware: Option<usize>,
    /// Cross-task rank correlation in [0, 1].
    #[arg(long, default_value_t = 0.8)]
    correlation: f64,
    /// Number of planted Pareto-optimal configs.
    #[arg(long, default_value_t = 5)]
    planted: usize,
    /// Generator seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Benchmark name; also the output file prefix.
    #[arg(long, default_value = "synthetic")]
    name: String,
    /// Directory the files are written into.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExpandMode {
    /// Rented devices: runtimes scale by batch-runtime ratios.
    Cloud,
    /// Bought devices: runtimes scale by measured latency ratios.
    Edge,
}

#[derive(clap::Args)]
struct ExpandArgs {
    /// Benchmark file to expand.
    #[arg(long)]
    base: PathBuf,
    /// Hardware cost model file.
    #[arg(long)]
    hardware_model: PathBuf,
    /// Deployment model the devices are priced under.
    #[arg(long, value_enum)]
    mode: ExpandMode,
    /// Latency table file (edge mode only).
    #[arg(long)]
    latency: Option<PathBuf>,
    /// Output benchmark file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Benchmark file to optimize on.
    #[arg(long)]
    bench: PathBuf,
    /// Transfer corpus file (required by transfer methods).
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Comma-separated method labels (e.g. "HB,HB+ND,HB+ND+tr").
    /// Defaults to every method the inputs support.
    #[arg(long)]
    methods: Option<String>,
    /// Seed list: comma-separated values or inclusive ranges ("0..29").
    #[arg(long)]
    seeds: Option<String>,
    /// Per-config fidelity budget; defaults to the benchmark's maximum.
    #[arg(long)]
    r: Option<u64>,
    /// Halving factor between rungs.
    #[arg(long)]
    eta: Option<u32>,
    /// ParEGO augmentation weight.
    #[arg(long)]
    rho: Option<f64>,
    /// Variance floor for transfer-surrogate sampling.
    #[arg(long)]
    sigma_floor: Option<f64>,
    /// Worker threads for the (method, seed) grid.
    #[arg(long)]
    threads: Option<usize>,
    /// Directory for table.txt and convergence.csv.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// TOML file with defaults for the flags above; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Keys a `--config` TOML file may set. Every one is overridden by the
/// matching command-line flag.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFileConfig {
    methods: Option<Vec<String>>,
    seeds: Option<String>,
    r: Option<u64>,
    eta: Option<u32>,
    rho: Option<f64>,
    sigma_floor: Option<f64>,
    threads: Option<usize>,
    out_dir: Option<PathBuf>,
}

enum CliError {
    /// The request itself is unusable: bad flags or bad input files.
    Usage(String),
    /// The request was fine but executing it failed (e.g. writing output).
    Runtime(String),
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Input-file and validation errors are the caller's to fix.
fn usage_from(e: paretoband_core::Error) -> CliError {
    CliError::Usage(e.to_string())
}

fn write_file(path: &std::path::Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content)
        .map_err(|e| CliError::Runtime(format!("failed to write {}: {e}", path.display())))
}

/// Prints to stdout, tolerating a closed pipe (e.g. `paretoband run | head`).
fn emit(text: std::fmt::Arguments<'_>) {
    use std::io::Write;
    let _ = std::io::stdout().write_fmt(text);
}

macro_rules! say {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Expand(args) => cmd_expand(args),
        Command::Run(args) => cmd_run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), CliError> {
    match (args.objectives, args.hardware) {
        (2, None) | (3, Some(_)) => {}
        (2, Some(_)) => return Err(usage("--hardware requires --objectives 3")),
        (3, None) => return Err(usage("--objectives 3 requires --hardware")),
        (o, _) => return Err(usage(format!("--objectives must be 2 or 3, got {o}"))),
    }
    let spec = SynthSpec {
        name: args.name.clone(),
        n_configs: args.configs,
        r_max: args.fidelities,
        n_tasks: args.tasks,
        correlation: args.correlation,
        n_planted: args.planted,
        hardware: args.hardware.map(|n_hardware| SynthHardware { n_hardware }),
    };
    let out = generate_synthetic(&spec, &SeededRng::new(args.seed)).map_err(usage_from)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| {
        CliError::Runtime(format!("failed to create {}: {e}", args.out_dir.display()))
    })?;
    let file = |suffix: &str| args.out_dir.join(format!("{}.{suffix}.jsonl", args.name));
    let bench_path = file("bench");
    let corpus_path = file("corpus");
    save_benchmark(&out.benchmark, &bench_path).map_err(|e| CliError::Runtime(e.to_string()))?;
    save_corpus(&out.corpus, &corpus_path).map_err(|e| CliError::Runtime(e.to_string()))?;
    say!("wrote {}\n", bench_path.display());
    say!("wrote {}\n", corpus_path.display());
    if let Some(model) = &out.hardware {
        let hw_path = file("hardware");
        save_hardware_model(model, &hw_path).map_err(|e| CliError::Runtime(e.to_string()))?;
        say!("wrote {}\n", hw_path.display());
    }
    Ok(())
}

fn cmd_expand(args: ExpandArgs) -> Result<(), CliError> {
    let base = load_benchmark(&args.base).map_err(usage_from)?;
    let model = load_hardware_model(&args.hardware_model).map_err(usage_from)?;
    let expanded = match args.mode {
        ExpandMode::Cloud => {
            if args.latency.is_some() {
                return Err(usage("--latency only applies to --mode edge"));
            }
            expand_cloud(&base, &model).map_err(usage_from)?
        }
        ExpandMode::Edge => {
            let path = args
                .latency
                .ok_or_else(|| usage("--mode edge requires --latency"))?;
            let latency = load_latency_table(&path).map_err(usage_from)?;
            expand_edge(&base, &model, &latency).map_err(usage_from)?
        }
    };
    save_benchmark(&expanded, &args.out).map_err(|e| CliError::Runtime(e.to_string()))?;
    say!(
        "wrote {} ({} configs, {} objectives)\n",
        args.out.display(),
        expanded.n_configs(),
        expanded.n_objectives()
    );
    Ok(())
}

/// Parses a seed list: comma-separated atoms, each a value or an
/// inclusive range `a..b`.
fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    let mut out = Vec::new();
    for atom in text.split(',') {
        let atom = atom.trim();
        let parse = |v: &str| {
            v.trim()
                .parse::<u64>()
                .map_err(|_| format!("`{v}` is not a seed value"))
        };
        match atom.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (parse(a)?, parse(b)?);
                if b < a {
                    return Err(format!("seed range `{atom}` is descending"));
                }
                out.extend(a..=b);
            }
            None => out.push(parse(atom)?),
        }
    }
    Ok(out)
}

fn cmd_run(args: RunArgs) -> Result<(), CliError> {
    let file: RunFileConfig = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| usage(format!("failed to read {}: {e}", path.display())))?;
            toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => RunFileConfig::default(),
    };

    let bench = load_benchmark(&args.bench).map_err(usage_from)?;
    let corpus = match &args.corpus {
        Some(path) => Some(load_corpus(path).map_err(usage_from)?),
        None => None,
    };

    let method_names: Option<Vec<String>> = args
        .methods
        .map(|list| list.split(',').map(|m| m.trim().to_string()).collect())
        .or(file.methods);
    let methods: Vec<Method> = match method_names {
        Some(names) => names
            .iter()
            .map(|n| n.parse::<Method>())
            .collect::<Result<_, _>>()
            .map_err(usage_from)?,
        // Default to everything the inputs support: transfer methods need
        // a corpus.
        None => Method::ALL
            .into_iter()
            .filter(|m| corpus.is_some() || !m.uses_transfer())
            .collect(),
    };

    let seeds = match args.seeds.or(file.seeds) {
        Some(text) => parse_seeds(&text).map_err(usage)?,
        None => (0..=29).collect(),
    };
    let r_level = args.r.or(file.r).unwrap_or(bench.max_fidelity().level());
    let r_max = Fidelity::new(r_level).map_err(usage_from)?;

    let mut config = StudyConfig::new(methods, r_max);
    config.seeds = seeds;
    config.eta = args.eta.or(file.eta).unwrap_or(3);
    config.rho = args.rho.or(file.rho).unwrap_or(DEFAULT_RHO);
    config.sigma_floor2 = args
        .sigma_floor
        .or(file.sigma_floor)
        .unwrap_or(DEFAULT_SIGMA_FLOOR2);
    config.threads = args.threads.or(file.threads).unwrap_or(1);
    let out_dir = args
        .out_dir
        .or(file.out_dir)
        .unwrap_or_else(|| PathBuf::from("."));

    let study = run_study(&bench, corpus.as_ref(), &config).map_err(usage_from)?;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::Runtime(format!("failed to create {}: {e}", out_dir.display())))?;
    let table = render_table(&study.result);
    let table_path = out_dir.join("table.txt");
    let csv_path = out_dir.join("convergence.csv");
    write_file(&table_path, &table)?;
    write_file(&csv_path, &convergence_csv(&study, &bench))?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{} on `{}`: {} methods x {} seeds, budget {} (eta {})",
        env!("CARGO_BIN_NAME"),
        bench.name(),
        config.methods.len(),
        config.seeds.len(),
        config.r_max,
        config.eta
    );
    say!("{summary}{table}");
    say!("wrote {}\n", table_path.display());
    say!("wrote {}\n", csv_path.display());
    Ok(())
}
