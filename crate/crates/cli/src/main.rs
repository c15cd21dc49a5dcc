use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use klscope::codespace::DEFAULT_KL_TOL;
use klscope::enumerators::weight_enumerators;
use klscope::families::{
    code_623, cyclic_code_723, parse_branch_pair, perm_code_723, CyclicCoeffs, OrthoFrame,
    PermVariant,
};
use klscope::optimizer::{jnr_feasibility, optimize, LossSpec, OptimizerConfig, DEFAULT_MU};
use klscope::sweep::{grid, sweep, RowWriter, SweepConfig, SweepResult};
use klscope::verify::verify_code;
use klscope::{CodeSubspace, DenseOperators, ErrorBasis, Execution, PauliString, StabilizerCode};

const THREADS_ENV: &str = "KLSCOPE_THREADS";

#[derive(Parser)]
#[command(
    name = "klscope",
    version,
    about = "Search, construct and verify non-additive quantum codes"
)]
struct Cli {
    /// Run restarts and grid points on the calling thread only.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Target-length feasibility scan; writes CSV.
    Sweep(SweepArgs),
    /// Penalty search from a JSON config; writes result JSON.
    Optimize(OptimizeArgs),
    /// Builds a code and writes its JSON export.
    Construct {
        #[command(subcommand)]
        family: Construct,
    },
    /// Checks a code JSON: KL violation, lambda*, enumerator and LU cross-checks.
    Verify(VerifyArgs),
    /// Weight enumerators of a code JSON as CSV.
    Enumerate {
        code: PathBuf,
        /// Output path, `-` for stdout.
        #[arg(default_value = "-")]
        out: String,
    },
    /// Rank-K joint numerical range search over Pauli observables; writes CSV.
    Jnr(JnrArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    #[arg(long = "K", alias = "k")]
    k: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    /// First target lambda*^2.
    #[arg(long, allow_hyphen_values = true)]
    from: f64,
    /// Last target lambda*^2 (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    to: f64,
    #[arg(long, default_value_t = 0.02)]
    step: f64,
    #[arg(long, default_value_t = DEFAULT_MU)]
    mu: f64,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
    #[arg(long, default_value_t = 3000)]
    max_iters: usize,
    /// Comma-separated warm-up penalty weights; empty string disables.
    #[arg(long, default_value = "1,10,100")]
    warmup: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV from an interrupted run; matching grid points are reused.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Output path, `-` for stdout.
    #[arg(long, short, default_value = "-")]
    out: String,
}

#[derive(Args)]
struct OptimizeArgs {
    /// JSON with keys n, K, d, mode, mu, lambda_target, restarts, max_iters, seed, kl_tol.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, short, default_value = "-")]
    out: String,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Mode {
    KlOnly,
    MinimizeLength,
    MaximizeLength,
    TargetLength,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct OptimizeConfig {
    n: usize,
    #[serde(rename = "K")]
    k: usize,
    #[serde(default = "default_d")]
    d: usize,
    mode: Mode,
    #[serde(default = "default_mu")]
    mu: f64,
    /// Target lambda* (not squared) for `target_length`.
    lambda_target: Option<f64>,
    restarts: Option<usize>,
    max_iters: Option<usize>,
    seed: Option<u64>,
    kl_tol: Option<f64>,
    #[serde(default)]
    warmup_mu: Vec<f64>,
}

fn default_d() -> usize {
    3
}

fn default_mu() -> f64 {
    DEFAULT_MU
}

#[derive(Subcommand)]
enum Construct {
    /// ((6,2,3)) frame family, from theta or from the e-vector.
    Family623 {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "e_vector")]
        theta: Option<f64>,
        /// Five comma-separated components.
        #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
        e_vector: Option<Vec<f64>>,
        #[arg(default_value = "-")]
        out: String,
    },
    /// ((7,2,3)) cyclic family at a given lambda*.
    Family723 {
        #[arg(long)]
        lambda_star: f64,
        /// Signs of c1 and c3, e.g. `+-`.
        #[arg(long, default_value = "++", allow_hyphen_values = true)]
        branch: String,
        #[arg(default_value = "-")]
        out: String,
    },
    /// ((7,2,3)) permutation-invariant code.
    Permcode {
        #[arg(long, default_value = "plus")]
        variant: String,
        #[arg(default_value = "-")]
        out: String,
    },
    /// Stabilizer code from a built-in name or a generator file.
    Stabilizer {
        #[arg(long, conflicts_with = "generators")]
        name: Option<String>,
        /// One generator per line, e.g. `+XZZXI`; `#` starts a comment.
        #[arg(long)]
        generators: Option<PathBuf>,
        #[arg(default_value = "-")]
        out: String,
    },
}

#[derive(Args)]
struct VerifyArgs {
    code: PathBuf,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = DEFAULT_KL_TOL)]
    kl_tol: f64,
    /// Random local-unitary trials.
    #[arg(long, default_value_t = 5)]
    lu_trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit nonzero unless the code passes every check within this tolerance.
    #[arg(long)]
    strict: Option<f64>,
}

#[derive(Args)]
struct JnrArgs {
    /// Comma-separated Pauli words, all of the same length.
    #[arg(long, value_delimiter = ',', required = true)]
    ops: Vec<String>,
    #[arg(long = "K", alias = "k")]
    k: usize,
    #[arg(long, default_value_t = 200)]
    runs: usize,
    #[arg(long, default_value_t = 3000)]
    max_iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, short, default_value = "-")]
    out: String,
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(cli) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    let execution = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::default()
    };
    match cli.command {
        Command::Sweep(args) => run_sweep(args, execution),
        Command::Optimize(args) => run_optimize(args, execution),
        Command::Construct { family } => run_construct(family),
        Command::Verify(args) => run_verify(args),
        Command::Enumerate { code, out } => {
            let code = read_code(&code)?;
            let e = weight_enumerators(&code)?;
            e.write_csv(output(&out)?)?;
            Ok(())
        }
        Command::Jnr(args) => run_jnr(args, execution),
    }
}

fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {value:?}"))?;
    if threads == 0 {
        bail!("{THREADS_ENV} must be a positive integer, got 0");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring the worker pool")?;
    Ok(())
}

fn output(path: &str) -> Result<Box<dyn Write>> {
    if path == "-" {
        Ok(Box::new(io::stdout().lock()))
    } else {
        let file = File::create(path).with_context(|| format!("creating {path}"))?;
        Ok(Box::new(io::BufWriter::new(file)))
    }
}

fn read_code(path: &Path) -> Result<CodeSubspace> {
    let reader: Box<dyn io::Read> = if path == Path::new("-") {
        Box::new(io::stdin().lock())
    } else {
        Box::new(BufReader::new(
            File::open(path).with_context(|| format!("opening {}", path.display()))?,
        ))
    };
    CodeSubspace::read_json(reader).with_context(|| format!("reading code from {}", path.display()))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().with_context(|| format!("bad number {s:?}")))
        .collect()
}

fn run_sweep(args: SweepArgs, execution: Execution) -> Result<()> {
    let basis = ErrorBasis::new(args.n, args.d)?;
    let points = grid(args.from, args.to, args.step)?;
    let resume = match &args.resume {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
            SweepResult::read_csv(file)
                .with_context(|| format!("reading {}", path.display()))?
                .rows
        }
        None => Vec::new(),
    };
    let mut config = SweepConfig {
        mu: args.mu,
        ..SweepConfig::default()
    };
    config.optimizer.restarts = args.restarts;
    config.optimizer.max_iters = args.max_iters;
    config.optimizer.polish_iters = args.max_iters;
    config.optimizer.warmup_mu = parse_list(&args.warmup)?;
    config.optimizer.seed = args.seed;
    config.optimizer.execution = execution;
    let mut writer = RowWriter::new(output(&args.out)?)?;
    sweep(&basis, args.k, &points, &config, &resume, |row| {
        writer.write(row)?;
        if !row.feasible() {
            eprintln!(
                "target {:.4}: no feasible code found (loss {:.3e})",
                row.target_lambda_sq, row.final_loss
            );
        }
        Ok(())
    })?;
    Ok(())
}

fn run_optimize(args: OptimizeArgs, execution: Execution) -> Result<()> {
    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("reading {}", args.config.display()))?;
    let cfg: OptimizeConfig = serde_json::from_str(&text).context("parsing optimizer config")?;
    let spec = match cfg.mode {
        Mode::KlOnly => LossSpec::kl_only(),
        Mode::MinimizeLength => LossSpec::minimize(cfg.mu),
        Mode::MaximizeLength => LossSpec::maximize(cfg.mu),
        Mode::TargetLength => {
            let Some(t) = cfg.lambda_target else {
                bail!("mode target_length needs lambda_target");
            };
            LossSpec::target_length(cfg.mu, t)
        }
    };
    let defaults = OptimizerConfig::default();
    let config = OptimizerConfig {
        restarts: cfg.restarts.unwrap_or(defaults.restarts),
        max_iters: cfg.max_iters.unwrap_or(defaults.max_iters),
        polish_iters: cfg.max_iters.unwrap_or(defaults.polish_iters),
        seed: cfg.seed.unwrap_or(defaults.seed),
        kl_tol: cfg.kl_tol.unwrap_or(defaults.kl_tol),
        warmup_mu: cfg.warmup_mu,
        execution,
        ..defaults
    };
    let basis = ErrorBasis::new(cfg.n, cfg.d)?;
    let result = optimize(cfg.n, cfg.k, &basis, &spec, &config)?;
    if !result.converged {
        eprintln!(
            "warning: best restart has kl_violation {:.3e} above kl_tol {:.1e}",
            result.kl_violation, config.kl_tol
        );
    }
    let mut out = output(&args.out)?;
    serde_json::to_writer_pretty(&mut out, &result.to_json())?;
    writeln!(out)?;
    Ok(())
}

fn run_construct(family: Construct) -> Result<()> {
    let (code, out) = match family {
        Construct::Family623 {
            theta,
            e_vector,
            out,
        } => {
            let frame = match (theta, e_vector) {
                (Some(t), None) => OrthoFrame::single_parameter(t),
                (None, Some(e)) => {
                    if e.len() != 5 {
                        bail!("--e-vector needs 5 components, got {}", e.len());
                    }
                    OrthoFrame::from_e(klscope::nalgebra::Vector5::from_column_slice(&e))?
                }
                _ => bail!("family623 needs exactly one of --theta or --e-vector"),
            };
            (code_623(&frame)?, out)
        }
        Construct::Family723 {
            lambda_star,
            branch,
            out,
        } => {
            let (b1, b3) = parse_branch_pair(&branch)?;
            let coeffs = CyclicCoeffs::from_lambda(lambda_star, b1, b3)?;
            (cyclic_code_723(&coeffs)?, out)
        }
        Construct::Permcode { variant, out } => {
            let variant: PermVariant = variant.parse()?;
            (perm_code_723(variant)?, out)
        }
        Construct::Stabilizer {
            name,
            generators,
            out,
        } => {
            let stab = match (name, generators) {
                (Some(name), None) => StabilizerCode::builtin(&name)?,
                (None, Some(path)) => {
                    let file =
                        File::open(&path).with_context(|| format!("opening {}", path.display()))?;
                    StabilizerCode::read_generators(BufReader::new(file))?
                }
                _ => bail!("stabilizer needs exactly one of --name or --generators"),
            };
            (stab.codespace()?, out)
        }
    };
    let mut w = output(&out)?;
    code.write_json(&mut w)?;
    w.flush()?;
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Result<()> {
    let code = read_code(&args.code)?;
    let report = verify_code(&code, args.d, args.kl_tol, args.lu_trials, args.seed)?;
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, &report)?;
    writeln!(out)?;
    if let Some(tol) = args.strict {
        if !report.consistent(tol) {
            bail!("verification failed at tolerance {tol:e}");
        }
    }
    Ok(())
}

fn run_jnr(args: JnrArgs, execution: Execution) -> Result<()> {
    let words = args
        .ops
        .iter()
        .map(|w| w.trim().parse::<PauliString>())
        .collect::<klscope::Result<Vec<_>>>()?;
    let mats = words
        .iter()
        .map(|w| w.dense_matrix())
        .collect::<klscope::Result<Vec<_>>>()?;
    let ops = DenseOperators::new(mats)?;
    let config = OptimizerConfig {
        restarts: args.runs,
        max_iters: args.max_iters,
        seed: args.seed,
        execution,
        ..OptimizerConfig::default()
    };
    let result = jnr_feasibility(&ops, args.k, &config)?;
    let mut out = csv::Writer::from_writer(output(&args.out)?);
    let mut header: Vec<String> = args
        .ops
        .iter()
        .map(|w| format!("lambda_{}", w.trim()))
        .collect();
    header.push("runs".into());
    out.write_record(&header)?;
    for tuple in &result.tuples {
        let hits = result
            .runs
            .iter()
            .filter(|r| {
                r.converged
                    && r.values
                        .iter()
                        .zip(tuple)
                        .all(|(a, b)| (a - b).abs() <= 1e-6)
            })
            .count();
        let mut record: Vec<String> = tuple.iter().map(|v| format!("{v:.12}")).collect();
        record.push(hits.to_string());
        out.write_record(&record)?;
    }
    out.flush()?;
    let failed = result.runs.iter().filter(|r| !r.converged).count();
    if failed > 0 {
        eprintln!("{failed} of {} runs did not converge", result.runs.len());
    }
    Ok(())
}
