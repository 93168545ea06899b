use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use berezin_lab::berezin::{berezin_number, berezin_set, RefineConfig};
use berezin_lab::harness::{
    checkers, resolve_checks, run_suite, sharpness_search_with, summary_table, write_report, OperatorKind,
    ReportFormat, SpaceFamily, TrialConfig,
};
use berezin_lab::hilbert::{KernelSpace, SamplePlan, DEFAULT_DISK_RADIUS};
use berezin_lab::inequalities::{DEFAULT_SAMPLES, DEFAULT_TOLERANCE};
use berezin_lab::matcore::Matrix;
use berezin_lab::{Error, Result};

#[derive(Parser)]
#[command(name = "berezin-lab", version, about = "Berezin numbers and randomized inequality checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the randomized verification suite.
    Verify(VerifyArgs),
    /// Search for inputs that make one inequality nearly tight.
    Explore(ExploreArgs),
    /// Sample the Berezin symbol of an operator read from a JSON file.
    Symbol(SymbolArgs),
    /// List checker ids with their statements and hypotheses.
    ListChecks,
}

#[derive(Args)]
struct Common {
    /// Space families (hardy, bergman, discrete, orthonormal).
    #[arg(long, value_delimiter = ',', default_value = "hardy,discrete")]
    space: Vec<String>,
    /// Dimensions.
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,8")]
    dim: Vec<usize>,
    /// Sample points on disk domains.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, env = "BEREZIN_LAB_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tol: f64,
}

impl Common {
    fn config(&self) -> Result<TrialConfig> {
        let families = self
            .space
            .iter()
            .map(|s| SpaceFamily::parse(s.trim()))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrialConfig {
            families,
            dims: self.dim.clone(),
            samples: self.samples,
            seed: self.seed,
            tolerance: self.tol,
            ..TrialConfig::default()
        })
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// `all` or a comma-separated list of checker ids.
    #[arg(long, alias = "checks", default_value = "all")]
    suite: String,
    #[command(flatten)]
    common: Common,
    /// Trials per checker, family and dimension.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Report file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long, default_value = "json")]
    format: String,
    /// Worker threads (results do not depend on it).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct ExploreArgs {
    #[arg(long)]
    check: String,
    #[arg(long, default_value_t = 200)]
    steps: usize,
    /// Force every square operator to this kind (e.g. diagonal, positive).
    #[arg(long)]
    recipe: Option<String>,
    #[command(flatten)]
    common: Common,
    /// Write the search result as JSON.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SymbolArgs {
    /// Operator as `{"rows", "cols", "re", "im"}` JSON.
    #[arg(long)]
    op_file: PathBuf,
    /// Polar-grid size on disk spaces.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    grid: usize,
    /// hardy, bergman or discrete.
    #[arg(long, default_value = "hardy")]
    space: String,
    #[arg(long, default_value_t = DEFAULT_DISK_RADIUS)]
    radius: f64,
    /// Gram matrix JSON for the discrete space.
    #[arg(long)]
    gram_file: Option<PathBuf>,
    /// CSV output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_kind(s: &str) -> Result<OperatorKind> {
    OperatorKind::ALL
        .into_iter()
        .find(|k| serde_json::to_value(k).ok().and_then(|v| v.as_str().map(|v| v == s)) == Some(true))
        .ok_or_else(|| Error::BadConfig(format!("unknown operator kind `{s}`")))
}

fn verify(args: VerifyArgs) -> Result<i32> {
    let ids = resolve_checks(&args.suite)?;
    let format = ReportFormat::parse(&args.format)?;
    let mut config = args.common.config()?;
    config.trials = args.trials;
    config.jobs = args.jobs;
    let report = run_suite(&config, &ids)?;
    print!("{}", summary_table(&report));
    if let Some(path) = &args.out {
        write_report(&report, path, format)?;
    }
    Ok(report.exit_code())
}

fn explore(args: ExploreArgs) -> Result<i32> {
    let kind = args.recipe.as_deref().map(parse_kind).transpose()?;
    let config = args.common.config()?;
    let result = sharpness_search_with(&args.check, &config, args.steps, kind)?;
    println!(
        "{} on {} (dim {}): best ratio {:.12} after {} steps, status {:?}",
        result.check_id,
        result.family.name(),
        result.dim,
        result.best_ratio,
        args.steps,
        result.best.status
    );
    if let Some(path) = &args.out {
        std::fs::write(path, serde_json::to_string_pretty(&result)?)?;
    }
    Ok(if result.best.is_pass() { 0 } else { 1 })
}

fn symbol(args: SymbolArgs) -> Result<i32> {
    let a: Matrix = serde_json::from_str(&std::fs::read_to_string(&args.op_file)?)?;
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("operator is {}×{}", a.rows(), a.cols())));
    }
    let n = a.rows();
    let space = match args.space.as_str() {
        "hardy" => KernelSpace::hardy(n, args.radius)?,
        "bergman" => KernelSpace::bergman(n, args.radius)?,
        "discrete" => {
            let path = args
                .gram_file
                .as_ref()
                .ok_or_else(|| Error::BadConfig("--gram-file is required for a discrete space".into()))?;
            KernelSpace::load_gram_file(path)?
        }
        other => return Err(Error::BadConfig(format!("unknown space `{other}`"))),
    };
    let plan = SamplePlan::default_for(space.domain(), args.grid);
    let set = berezin_set(&space, &a, &plan)?;
    let est = berezin_number(&space, &a, &plan, &RefineConfig::default())?;
    match &args.out {
        Some(path) => set.write_csv(std::fs::File::create(path)?)?,
        None => set.write_csv(std::io::stdout().lock())?,
    }
    eprintln!("ber ≈ {:.12} at {}", est.value, est.argmax);
    Ok(0)
}

fn list_checks() -> Result<i32> {
    let mut out = std::io::stdout().lock();
    for c in checkers() {
        let robustness = serde_json::to_value(c.robustness)?;
        let robustness = robustness.as_str().unwrap_or("");
        let written = writeln!(out, "{:<14} {:<17} {}", c.id, robustness, c.statement)
            .and_then(|_| writeln!(out, "{:<14} {:<17} hypotheses: {}", "", "", c.hypotheses));
        // a closed pipe (e.g. `| head`) is not an error
        if written.is_err() {
            break;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Explore(a) => explore(a),
        Command::Symbol(a) => symbol(a),
        Command::ListChecks => list_checks(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
