use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use evidential::approx::ApproxMethod;
use evidential::doc::{format_bpa, parse_bpa, DocError};
use evidential::metrics::error_triple;
use evidential::report::{
    fmt_sig6, parse_experiment_config_onto, parse_method_list, stats_csv, trials_csv,
};
use evidential::testbed::{gen_random_bpa, run_experiment, trial_rng, ExperimentConfig};
use evidential::{Bpa, EvidenceError};

/// Default seed when neither `--seed` nor the environment provides one.
const ENV_SEED: &str = "EVIDENTIAL_SEED";

#[derive(Parser)]
#[command(
    name = "evidential",
    version,
    about = "Belief functions: combination, focal-element reduction, benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Combine bpa documents with Dempster's rule (per-step conflict on stderr)
    Combine {
        /// Input documents, combined left to right (at least two)
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
    },
    /// Reduce the focal elements of a bpa document
    Approx {
        /// Input document
        file: PathBuf,
        /// Reduction algorithm
        #[arg(long, value_enum)]
        method: MethodKind,
        /// klx: minimum kept focal elements; summarize/d1: output size bound
        #[arg(long)]
        k: Option<usize>,
        /// klx: maximum kept focal elements (a number, or `inf` for no cap)
        #[arg(long)]
        l: Option<String>,
        /// klx: stop once the kept mass reaches 1 - x (default 0)
        #[arg(long)]
        x: Option<f64>,
        /// Print focal counts and decision errors vs the input on stderr
        #[arg(long)]
        stats: bool,
    },
    /// Generate a random bpa document
    Gen {
        #[arg(long, default_value_t = 32)]
        frame_size: usize,
        #[arg(long, default_value_t = 8)]
        focal_count: usize,
        /// Generator seed (default: $EVIDENTIAL_SEED, else 0)
        #[arg(long)]
        seed: Option<u64>,
        /// Rate of the exponential stick-breaking draw
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Run the reduction benchmark and write trials.csv and stats.csv
    Bench {
        /// Run configuration file (`key = value` lines); flags override it
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        frame_size: Option<usize>,
        #[arg(long)]
        focal_count: Option<usize>,
        /// Master seed (default: $EVIDENTIAL_SEED, else 0)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        lambda: Option<f64>,
        /// Combination steps per trial
        #[arg(long)]
        combinations: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Comma-separated canonical method names, or `default`
        #[arg(long)]
        methods: Option<String>,
        /// What each method approximates per step: `cumulative` or `from-exact`
        #[arg(long)]
        track: Option<String>,
        /// Directory for the CSV reports
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for trials (1 = sequential); results are identical
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodKind {
    Bayes,
    Klx,
    Summarize,
    D1,
}

enum CliError {
    /// Bad invocation or unparseable input: exit 2.
    Usage(String),
    /// Numerically invalid input or result: exit 3.
    Numeric(String),
    /// Filesystem problems: exit 1.
    Io(String),
}

impl CliError {
    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Io(m) => m,
        }
    }

    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn evidence_error(e: EvidenceError) -> CliError {
    match e {
        EvidenceError::TotalConflict { .. }
        | EvidenceError::MassNotNormalized { .. }
        | EvidenceError::InvalidMass(_) => CliError::Numeric(e.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

fn read_document(path: &Path) -> Result<Bpa, CliError> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse_bpa(&text).map_err(|e| match e {
        DocError::Syntax { .. } => CliError::Usage(format!("{}: {e}", path.display())),
        DocError::Invalid(inner) => match evidence_error(inner) {
            CliError::Numeric(m) => CliError::Numeric(format!("{}: {m}", path.display())),
            CliError::Usage(m) => CliError::Usage(format!("{}: {m}", path.display())),
            io => io,
        },
    })
}

fn env_seed() -> Result<Option<u64>, CliError> {
    match std::env::var(ENV_SEED) {
        Ok(value) => value.parse().map(Some).map_err(|_| {
            CliError::Usage(format!(
                "{ENV_SEED} must be an unsigned integer, got `{value}`"
            ))
        }),
        Err(_) => Ok(None),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Combine { files } => cmd_combine(&files),
        Command::Approx {
            file,
            method,
            k,
            l,
            x,
            stats,
        } => cmd_approx(&file, method, k, l.as_deref(), x, stats),
        Command::Gen {
            frame_size,
            focal_count,
            seed,
            lambda,
        } => cmd_gen(frame_size, focal_count, seed, lambda),
        Command::Bench {
            config,
            frame_size,
            focal_count,
            seed,
            lambda,
            combinations,
            trials,
            methods,
            track,
            out,
            threads,
        } => cmd_bench(BenchArgs {
            config,
            frame_size,
            focal_count,
            seed,
            lambda,
            combinations,
            trials,
            methods,
            track,
            out,
            threads,
        }),
    }
}

fn cmd_combine(files: &[PathBuf]) -> Result<(), CliError> {
    let mut documents = Vec::with_capacity(files.len());
    for path in files {
        documents.push(read_document(path)?);
    }
    let mut accumulated = documents[0].clone();
    for (step, next) in documents.iter().enumerate().skip(1) {
        let report = accumulated.combine_report(next).map_err(evidence_error)?;
        eprintln!("step {step}: conflict {}", report.conflict);
        accumulated = report.bpa;
    }
    print!("{}", format_bpa(&accumulated));
    Ok(())
}

fn build_method(
    kind: MethodKind,
    k: Option<usize>,
    l: Option<&str>,
    x: Option<f64>,
) -> Result<ApproxMethod, CliError> {
    let need_k =
        |name: &str| k.ok_or_else(|| CliError::Usage(format!("--k is required for {name}")));
    let no_l = |name: &str| -> Result<(), CliError> {
        match l {
            Some(_) => Err(CliError::Usage(format!("--l does not apply to {name}"))),
            None => Ok(()),
        }
    };
    let no_x = |name: &str| -> Result<(), CliError> {
        match x {
            Some(_) => Err(CliError::Usage(format!("--x does not apply to {name}"))),
            None => Ok(()),
        }
    };
    let method = match kind {
        MethodKind::Bayes => {
            if k.is_some() {
                return Err(CliError::Usage("--k does not apply to bayes".into()));
            }
            no_l("bayes")?;
            no_x("bayes")?;
            ApproxMethod::Bayesian
        }
        MethodKind::Klx => {
            let l = match l {
                None | Some("inf") => None,
                Some(raw) => Some(raw.parse().map_err(|_| {
                    CliError::Usage(format!(
                        "--l expects a positive integer or `inf`, got `{raw}`"
                    ))
                })?),
            };
            ApproxMethod::Klx {
                k: need_k("klx")?,
                l,
                x: x.unwrap_or(0.0),
            }
        }
        MethodKind::Summarize => {
            no_l("summarize")?;
            no_x("summarize")?;
            ApproxMethod::Summarize {
                k: need_k("summarize")?,
            }
        }
        MethodKind::D1 => {
            no_l("d1")?;
            no_x("d1")?;
            ApproxMethod::D1 { k: need_k("d1")? }
        }
    };
    method.validate().map_err(evidence_error)?;
    Ok(method)
}

fn cmd_approx(
    file: &Path,
    kind: MethodKind,
    k: Option<usize>,
    l: Option<&str>,
    x: Option<f64>,
    stats: bool,
) -> Result<(), CliError> {
    let method = build_method(kind, k, l, x)?;
    let original = read_document(file)?;
    let reduced = method.apply(&original);
    if stats {
        let errors = error_triple(&original.pignistic(), &reduced.pignistic())
            .expect("reduction preserves the frame");
        eprintln!("n_original={}", original.focal_count());
        eprintln!("n_approx={}", reduced.focal_count());
        eprintln!("error1={}", fmt_sig6(errors.error1));
        eprintln!("error2={}", errors.error2);
        eprintln!("error3={}", errors.error3);
    }
    print!("{}", format_bpa(&reduced));
    Ok(())
}

fn cmd_gen(
    frame_size: usize,
    focal_count: usize,
    seed: Option<u64>,
    lambda: f64,
) -> Result<(), CliError> {
    let seed = match seed {
        Some(seed) => seed,
        None => env_seed()?.unwrap_or(0),
    };
    let cfg = evidential::testbed::GenConfig {
        frame_size,
        focal_count,
        seed,
        lambda,
    };
    let mut rng = trial_rng(seed, 0);
    let bpa = gen_random_bpa(&cfg, &mut rng).map_err(evidence_error)?;
    print!("{}", format_bpa(&bpa));
    Ok(())
}

struct BenchArgs {
    config: Option<PathBuf>,
    frame_size: Option<usize>,
    focal_count: Option<usize>,
    seed: Option<u64>,
    lambda: Option<f64>,
    combinations: Option<usize>,
    trials: Option<usize>,
    methods: Option<String>,
    track: Option<String>,
    out: PathBuf,
    threads: Option<usize>,
}

fn cmd_bench(args: BenchArgs) -> Result<(), CliError> {
    // Seed precedence: --seed, then the config file, then $EVIDENTIAL_SEED.
    let mut base = ExperimentConfig::default();
    if let Some(seed) = env_seed()? {
        base.gen.seed = seed;
    }
    let mut cfg = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            parse_experiment_config_onto(&text, base)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
        }
        None => base,
    };
    if let Some(v) = args.frame_size {
        cfg.gen.frame_size = v;
    }
    if let Some(v) = args.focal_count {
        cfg.gen.focal_count = v;
    }
    if let Some(v) = args.seed {
        cfg.gen.seed = v;
    }
    if let Some(v) = args.lambda {
        cfg.gen.lambda = v;
    }
    if let Some(v) = args.combinations {
        cfg.combinations = v;
    }
    if let Some(v) = args.trials {
        cfg.trials = v;
    }
    if let Some(list) = &args.methods {
        cfg.methods = parse_method_list(list).map_err(CliError::Usage)?;
    }
    if let Some(track) = &args.track {
        cfg.track = track.parse().map_err(CliError::Usage)?;
    }
    match args.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least 1".into())),
        Some(1) => cfg.parallel = false,
        Some(_) | None => {}
    }
    cfg.validate().map_err(evidence_error)?;

    let output = match args.threads {
        Some(n) if n > 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Io(e.to_string()))?
            .install(|| run_experiment(&cfg)),
        _ => run_experiment(&cfg),
    }
    .map_err(evidence_error)?;

    fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Io(format!("{}: {e}", args.out.display())))?;
    let trials_path = args.out.join("trials.csv");
    let stats_path = args.out.join("stats.csv");
    fs::write(&trials_path, trials_csv(&output.records))
        .map_err(|e| CliError::Io(format!("{}: {e}", trials_path.display())))?;
    fs::write(&stats_path, stats_csv(&cfg, &output.stats))
        .map_err(|e| CliError::Io(format!("{}: {e}", stats_path.display())))?;
    eprintln!(
        "wrote {} and {} (trials={} completed={} aborted={})",
        trials_path.display(),
        stats_path.display(),
        cfg.trials,
        output.stats.completed_trials,
        output.stats.aborted_trials
    );
    Ok(())
}
