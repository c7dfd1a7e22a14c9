//! Command-line interface: purify, split, stats, recommend, evaluate.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tagrec::diffusion::{diffuse, recommend, Algorithm};
use tagrec::graph::{build_graph, TripartiteGraph};
use tagrec::harness::{emit_report, run_experiment, ExperimentConfig, HarnessError};
use tagrec::ingest;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

#[derive(Parser)]
#[command(name = "tagrec", version, about = "Tag-aware diffusion recommender")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply the purification constraints to a raw record file.
    Purify {
        /// Input record file (user\tobject\ttag1[,tag2...] per line).
        #[arg(long)]
        input: PathBuf,
        /// Purified output record file.
        #[arg(long)]
        output: PathBuf,
        /// Optional filter-log output path.
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Seeded train/test division of a record file.
    Split {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Sidecar metadata file (seed, ratio, counts).
        #[arg(long)]
        meta: PathBuf,
        #[arg(long, default_value_t = 0.9)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print summary statistics of a record file.
    Stats {
        #[arg(long)]
        input: PathBuf,
        /// Purify before summarizing.
        #[arg(long)]
        purify: bool,
    },
    /// Print the top-L recommendation for one user.
    Recommend {
        /// Record file or serialized graph ("tripartite-graph v1" header).
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        user: String,
        /// Diffusion route: uo, uot or uto.
        #[arg(long)]
        algorithm: String,
        /// List length.
        #[arg(short = 'L', long, default_value_t = 10)]
        length: usize,
    },
    /// Run a full multi-realization experiment from a config file.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct EvaluateArgs {
    /// key=value config file; flags below override file values.
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    ratio: Option<f64>,
    #[arg(long)]
    realizations: Option<u32>,
    #[arg(long)]
    threshold: Option<u32>,
    /// Comma-separated diversity list lengths.
    #[arg(long)]
    lengths: Option<String>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker cap (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

struct CliError {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn data_err(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_DATA,
        message: message.to_string(),
    }
}

fn runtime(message: impl std::fmt::Display) -> CliError {
    CliError {
        code: EXIT_RUNTIME,
        message: message.to_string(),
    }
}

fn read_file(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| runtime(format!("cannot read {}: {e}", path.display())))
}

fn load_dataset(path: &PathBuf) -> Result<ingest::Dataset, CliError> {
    ingest::parse_records(&read_file(path)?).map_err(data_err)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Purify { input, output, log } => {
            println!("purify input={} output={}", input.display(), output.display());
            let d = load_dataset(&input)?;
            let p = ingest::purify(&d);
            std::fs::write(&output, ingest::serialize_records(&p))
                .map_err(|e| runtime(format!("cannot write {}: {e}", output.display())))?;
            if let Some(log_path) = log {
                std::fs::write(&log_path, p.filter_log.join("\n") + "\n")
                    .map_err(|e| runtime(format!("cannot write {}: {e}", log_path.display())))?;
            }
            println!(
                "kept {} of {} assignments",
                p.len(),
                d.len()
            );
            Ok(())
        }
        Command::Split {
            input,
            train,
            test,
            meta,
            ratio,
            seed,
        } => {
            println!(
                "split input={} ratio={} seed={} train={} test={}",
                input.display(),
                ratio,
                seed,
                train.display(),
                test.display()
            );
            let d = load_dataset(&input)?;
            let pair = ingest::split(&d, ratio, seed).map_err(|e| usage(e.to_string()))?;
            ingest::write_split(&pair, &train, &test, &meta).map_err(runtime)?;
            println!("train={} test={}", pair.train.len(), pair.test.len());
            Ok(())
        }
        Command::Stats { input, purify } => {
            println!("stats input={} purify={}", input.display(), purify);
            let mut d = load_dataset(&input)?;
            if purify {
                d = ingest::purify(&d);
            }
            let s = ingest::summarize(&d);
            println!("n\tm\tr\tk_mean\tk_prime_mean\tk_dprime_mean");
            println!(
                "{}\t{}\t{}\t{:.2}\t{:.2}\t{:.2}",
                s.n,
                s.m,
                s.r,
                s.mean_objects_per_user,
                s.mean_tags_per_object,
                s.mean_tags_per_user
            );
            Ok(())
        }
        Command::Recommend {
            input,
            user,
            algorithm,
            length,
        } => {
            if length == 0 {
                return Err(usage("list length must be >= 1"));
            }
            let algorithm = Algorithm::parse(&algorithm)
                .ok_or_else(|| usage(format!("unknown algorithm '{algorithm}'")))?;
            println!(
                "recommend input={} user={} algorithm={} L={}",
                input.display(),
                user,
                algorithm,
                length
            );
            let text = read_file(&input)?;
            let g = if text.starts_with("tripartite-graph v1") {
                TripartiteGraph::from_text(&text).map_err(data_err)?
            } else {
                let d = ingest::parse_records(&text).map_err(data_err)?;
                build_graph(&d).map_err(data_err)?
            };
            let uid = g.user_id(&user).map_err(data_err)?;
            let scores = diffuse(&g, algorithm, uid).map_err(data_err)?;
            let list = recommend(&g, &scores, length);
            for &o in &list.objects {
                println!("{}\t{}", g.object_label(o), scores.scores[o as usize]);
            }
            Ok(())
        }
        Command::Evaluate(args) => evaluate(args),
    }
}

fn parse_config_file(path: &PathBuf) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read config {}: {e}", path.display())))?;
    let mut cfg = ExperimentConfig::default();
    let mut have_dataset = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key=value", i + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let bad = |what: &str| usage(format!("config line {}: bad {what} '{value}'", i + 1));
        match key {
            "dataset" => {
                cfg.dataset = PathBuf::from(value);
                have_dataset = true;
            }
            "algorithms" => {
                cfg.algorithms = value
                    .split(',')
                    .map(|s| Algorithm::parse(s.trim()).ok_or_else(|| bad("algorithm")))
                    .collect::<Result<_, _>>()?;
            }
            "ratio" => cfg.ratio = value.parse().map_err(|_| bad("ratio"))?,
            "realizations" => cfg.realizations = value.parse().map_err(|_| bad("realizations"))?,
            "seed" => cfg.master_seed = value.parse().map_err(|_| bad("seed"))?,
            "lengths" => cfg.lengths = parse_lengths(value).ok_or_else(|| bad("lengths"))?,
            "threshold" => cfg.threshold = value.parse().map_err(|_| bad("threshold"))?,
            "output" => cfg.output_dir = PathBuf::from(value),
            "jobs" => cfg.jobs = Some(value.parse().map_err(|_| bad("jobs"))?),
            "dataset_metrics_on_train" => {
                cfg.dataset_metrics_on_train = value.parse().map_err(|_| bad("bool"))?
            }
            other => return Err(usage(format!("config line {}: unknown key '{other}'", i + 1))),
        }
    }
    if !have_dataset {
        return Err(usage("config is missing the 'dataset' key"));
    }
    Ok(cfg)
}

fn parse_lengths(value: &str) -> Option<Vec<usize>> {
    if value.is_empty() {
        return Some(Vec::new());
    }
    value.split(',').map(|s| s.trim().parse().ok()).collect()
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let mut cfg = parse_config_file(&args.config)?;
    // precedence: flag > file > default
    if let Some(v) = args.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = args.ratio {
        cfg.ratio = v;
    }
    if let Some(v) = args.realizations {
        cfg.realizations = v;
    }
    if let Some(v) = args.threshold {
        cfg.threshold = v;
    }
    if let Some(v) = &args.lengths {
        cfg.lengths = parse_lengths(v).ok_or_else(|| usage(format!("bad lengths '{v}'")))?;
    }
    if let Some(v) = args.output {
        cfg.output_dir = v;
    }
    if let Some(v) = args.jobs {
        cfg.jobs = Some(v);
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    if !cfg.dataset.exists() {
        return Err(usage(format!(
            "dataset path {} does not exist",
            cfg.dataset.display()
        )));
    }
    println!(
        "evaluate dataset={} algorithms={} ratio={} realizations={} seed={} lengths={} threshold={} output={}",
        cfg.dataset.display(),
        cfg.algorithms.iter().map(|a| a.code()).collect::<Vec<_>>().join(","),
        cfg.ratio,
        cfg.realizations,
        cfg.master_seed,
        cfg.lengths.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(","),
        cfg.threshold,
        cfg.output_dir.display(),
    );
    if let Some(jobs) = cfg.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(runtime)?;
    }
    let report = run_experiment(&cfg).map_err(|e| match e {
        HarnessError::InvalidConfig(_) => usage(e.to_string()),
        HarnessError::Ingest(_) | HarnessError::EmptyAfterPurify => data_err(e),
        _ => runtime(e),
    })?;
    emit_report(&report, &cfg.output_dir).map_err(runtime)?;

    let fmt = |a: Option<tagrec::harness::Aggregate>| match a {
        Some(a) => format!("{:.4}", a.mean),
        None => "nan".to_string(),
    };
    println!("algorithm\trs\trs_low\trs_high");
    for a in &report.algorithms {
        println!(
            "{}\t{}\t{}\t{}",
            a.algorithm,
            fmt(a.rs),
            fmt(a.rs_low),
            fmt(a.rs_high)
        );
    }
    Ok(())
}
