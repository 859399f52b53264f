use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use logit_gof::io::{self as files, TableCache, TableKey};
use logit_gof::limit::{sample_limit, SeriesConfig, DEFAULT_TRUNCATION};
use logit_gof::sim::{self, table_from_distribution, DEFAULT_LEVELS};
use logit_gof::{statistic, verify, Alternative, Error, Kind, Sample, Size};

/// Weighted quantile correlation goodness-of-fit tests for the logistic family.
#[derive(Debug, Parser)]
#[command(name = "logit-gof", version)]
struct Cli {
    /// Worker threads for Monte Carlo runs (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Test a sample file against the logistic location (w) or location-scale (v) family.
    Test(TestArgs),
    /// Simulate a critical-value table.
    Critvals(CritvalsArgs),
    /// Estimate the power of a test against an alternative law.
    Power(PowerArgs),
    /// Write the empirical CDF of the limit law as CSV.
    Limitdist(LimitdistArgs),
    /// Run the numeric self-checks.
    Verify,
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Statistic: w (location) or v (location-scale).
    #[arg(long, default_value = "v", value_parser = parse_kind)]
    kind: Kind,
    /// Monte Carlo replications.
    #[arg(long, default_value_t = 20_000)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Series truncation for asymptotic tables.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION)]
    truncation: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Csv,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[command(flatten)]
    common: Common,
    /// Sample file, one number per line; `#` lines are ignored.
    #[arg(long = "in")]
    input: PathBuf,
    /// Use the limit law instead of the finite-n null distribution.
    #[arg(long)]
    asymptotic: bool,
    /// Comma-separated confidence levels to report.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS)]
    levels: Vec<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Args)]
struct CritvalsArgs {
    #[command(flatten)]
    common: Common,
    /// Sample size, or `asymptotic` for the limit law.
    #[arg(long, value_parser = parse_size)]
    n: Size,
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LEVELS)]
    levels: Vec<f64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cache: CacheArgs,
}

#[derive(Debug, Args)]
struct PowerArgs {
    #[command(flatten)]
    common: Common,
    /// Alternative law, e.g. cauchy, laplace, triangle1, beta22, negexp.
    #[arg(long = "alt", value_parser = parse_alternative)]
    alternative: Alternative,
    #[arg(long)]
    n: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.10)]
    alpha: f64,
    /// Replications behind the critical value.
    #[arg(long, default_value_t = 200_000)]
    crit_reps: usize,
    /// Use the asymptotic critical value instead of the finite-n one.
    #[arg(long)]
    asymptotic: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    cache: CacheArgs,
}

#[derive(Debug, Args)]
struct LimitdistArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
struct CacheArgs {
    /// Directory holding cached critical-value tables.
    #[arg(long, default_value = ".logit-gof-cache")]
    cache_dir: PathBuf,
    /// Always recompute and never write the cache.
    #[arg(long)]
    no_cache: bool,
}

fn parse_kind(s: &str) -> Result<Kind, String> {
    s.parse()
}

fn parse_size(s: &str) -> Result<Size, String> {
    match s.parse()? {
        Size::Finite(n) if n < 2 => Err(format!("sample size must be at least 2, got {n}")),
        size => Ok(size),
    }
}

fn parse_alternative(s: &str) -> Result<Alternative, String> {
    s.parse().map_err(|e: Error| {
        let names: Vec<&str> = Alternative::ALL.iter().map(|a| a.name()).collect();
        format!("{e}; expected one of {}", names.join(", "))
    })
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => files::write_atomic(path, text.as_bytes()),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            }),
    }
}

fn cached_table(cache: &CacheArgs, key: TableKey) -> Result<logit_gof::CriticalValueTable, Error> {
    let compute = || {
        sim::critical_values(
            key.kind,
            key.size,
            &key.levels,
            key.reps,
            key.truncation,
            key.seed,
        )
    };
    if cache.no_cache {
        return compute();
    }
    let store = TableCache::new(&cache.cache_dir);
    let (table, hit) = store.get_or_compute(&key, compute)?;
    if hit {
        eprintln!("using cached table {}", store.path(&key).display());
    }
    Ok(table)
}

fn run_test(args: &TestArgs) -> Result<ExitCode, Error> {
    sim::validate_levels(&args.levels)?;
    let sample = Sample::new(files::read_sample(&args.input)?)?;
    let result = statistic(args.common.kind, &sample)?;
    let size = if args.asymptotic {
        Size::Asymptotic
    } else {
        Size::Finite(sample.n())
    };
    let c = &args.common;
    let dist = sim::null_distribution(c.kind, size, c.reps, c.truncation, c.seed)?;
    let table = table_from_distribution(&dist, &args.levels)?;
    let p_value = dist.upper_tail(result.statistic);
    let crit95 = dist.quantile(0.95)?;
    let rejected = result.statistic > crit95;

    let mut text = String::new();
    match args.format {
        Format::Text => {
            let name = match c.kind {
                Kind::Location => "nW_n",
                Kind::LocationScale => "nV_n",
            };
            text += &format!("statistic {name} = {}\n", result.statistic);
            text += &format!("raw = {}\nn = {}\n", result.raw, result.n);
            text += &format!(
                "null distribution: {size}, reps = {}, seed = {}\n",
                c.reps, c.seed
            );
            for (level, cv) in table.levels().iter().zip(table.critvals()) {
                let verdict = if result.statistic > *cv {
                    "rejected"
                } else {
                    "not rejected"
                };
                text += &format!("level {level}: critical value {cv:.4} -> {verdict}\n");
            }
            text += &format!("p-value = {p_value}\n");
            text += &format!(
                "decision at 0.95: {}\n",
                if rejected { "rejected" } else { "not rejected" }
            );
        }
        Format::Csv => {
            text += "kind,n,statistic,raw,p_value,level,critval,rejected\n";
            for (level, cv) in table.levels().iter().zip(table.critvals()) {
                text += &format!(
                    "{},{},{},{},{},{},{},{}\n",
                    c.kind,
                    result.n,
                    result.statistic,
                    result.raw,
                    p_value,
                    level,
                    cv,
                    result.statistic > *cv
                );
            }
        }
    }
    emit(None, &text)?;
    Ok(if rejected {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    })
}

fn run_critvals(args: &CritvalsArgs) -> Result<ExitCode, Error> {
    let c = &args.common;
    let key = TableKey {
        kind: c.kind,
        size: args.n,
        levels: args.levels.clone(),
        reps: c.reps,
        truncation: c.truncation,
        seed: c.seed,
    };
    sim::validate_levels(&key.levels)?;
    let table = cached_table(&args.cache, key)?;
    emit(args.out.as_ref(), &files::table_to_string(&table)?)?;
    Ok(ExitCode::SUCCESS)
}

fn run_power(args: &PowerArgs) -> Result<ExitCode, Error> {
    let c = &args.common;
    if !(args.alpha > 0.0 && args.alpha < 1.0) {
        return Err(Error::ProbabilityOutOfRange(args.alpha));
    }
    let key = TableKey {
        kind: c.kind,
        size: if args.asymptotic {
            Size::Asymptotic
        } else {
            Size::Finite(args.n)
        },
        levels: vec![1.0 - args.alpha],
        reps: args.crit_reps,
        truncation: c.truncation,
        seed: c.seed,
    };
    let table = cached_table(&args.cache, key)?;
    let r = sim::empirical_power(
        c.kind,
        args.alternative,
        args.n,
        args.alpha,
        &table,
        c.reps,
        c.seed,
    )?;
    let text = format!(
        "kind,alternative,n,alpha,power,reps,seed\n{},{},{},{},{},{},{}\n",
        r.kind, r.alternative, r.n, r.alpha, r.power, r.reps, r.seed
    );
    emit(args.out.as_ref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

fn run_limitdist(args: &LimitdistArgs) -> Result<ExitCode, Error> {
    let c = &args.common;
    let dist = sample_limit(c.kind, &SeriesConfig::new(c.truncation, c.seed)?, c.reps)?;
    let mut buf = Vec::new();
    files::write_ecdf(&dist, &mut buf)?;
    emit(
        args.out.as_ref(),
        &String::from_utf8(buf).expect("csv output is utf-8"),
    )?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify() -> ExitCode {
    let checks = verify::run_all();
    for c in &checks {
        println!(
            "{} {}: {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn dispatch(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Test(a) => run_test(a),
        Command::Critvals(a) => run_critvals(a),
        Command::Power(a) => run_power(a),
        Command::Limitdist(a) => run_limitdist(a),
        Command::Verify => Ok(run_verify()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.threads {
        Some(t) => sim::with_workers(t, || dispatch(&cli)).and_then(|r| r),
        None => dispatch(&cli),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
