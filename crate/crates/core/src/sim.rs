//! Monte Carlo critical values and empirical power.
//!
//! Replication `r` always draws from substream `(seed, domain, r)`, so every
//! result is a function of its parameters alone, whatever the worker count.

use rayon::prelude::*;

use crate::alternatives::Alternative;
use crate::error::{Error, Result};
use crate::limit::{sample_limit, EmpiricalDistribution, Provenance, SeriesConfig, Size};
use crate::rng::{substream, Domain};
use crate::stats::{cached_coefficients, Kind};

/// Confidence levels reported by default.
pub const DEFAULT_LEVELS: [f64; 4] = [0.85, 0.90, 0.95, 0.99];

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalValueTable {
    pub kind: Kind,
    pub size: Size,
    levels: Vec<f64>,
    critvals: Vec<f64>,
    pub reps: usize,
    /// Series truncation; only set for asymptotic tables.
    pub truncation: Option<usize>,
    pub seed: u64,
}

impl CriticalValueTable {
    pub fn new(
        kind: Kind,
        size: Size,
        levels: Vec<f64>,
        critvals: Vec<f64>,
        reps: usize,
        truncation: Option<usize>,
        seed: u64,
    ) -> Result<Self> {
        validate_levels(&levels)?;
        if levels.len() != critvals.len() {
            return Err(Error::InvalidLevels(format!(
                "{} levels but {} critical values",
                levels.len(),
                critvals.len()
            )));
        }
        if critvals.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::NonMonotoneTable(critvals));
        }
        Ok(CriticalValueTable {
            kind,
            size,
            levels,
            critvals,
            reps,
            truncation,
            seed,
        })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn critvals(&self) -> &[f64] {
        &self.critvals
    }

    /// Critical value at confidence `level`, if the table has it.
    pub fn critical_value(&self, level: f64) -> Option<f64> {
        self.levels
            .iter()
            .position(|&l| (l - level).abs() < 1e-9)
            .map(|i| self.critvals[i])
    }
}

pub fn validate_levels(levels: &[f64]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::InvalidLevels("no levels given".into()));
    }
    if let Some(l) = levels.iter().find(|&&l| !(l > 0.0 && l < 1.0)) {
        return Err(Error::InvalidLevels(format!("{l} is outside (0, 1)")));
    }
    if levels.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidLevels(
            "levels must be strictly increasing".into(),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult {
    pub kind: Kind,
    pub alternative: Alternative,
    pub n: usize,
    pub alpha: f64,
    pub critical_value: f64,
    /// Fraction of replications rejected.
    pub power: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()?;
    Ok(pool.install(f))
}

fn check_sizes(n: usize, reps: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::TooSmall {
            what: "n",
            min: 2,
            got: n,
        });
    }
    if reps < 1 {
        return Err(Error::TooSmall {
            what: "reps",
            min: 1,
            got: reps,
        });
    }
    Ok(())
}

/// `reps` draws of `n·W_n` or `n·V_n` from standard-logistic samples of size `n`.
pub fn simulate_null_distribution(
    kind: Kind,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    check_sizes(n, reps)?;
    let table = cached_coefficients(n)?;
    let scale = n as f64;
    let draws: Vec<f64> = (0..reps as u64)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, r| {
                let mut rng = substream(seed, Domain::NullStatistic, r);
                buf.clear();
                buf.extend((0..n).map(|_| Alternative::Logistic.draw(&mut rng)));
                buf.sort_unstable_by(f64::total_cmp);
                let raw = match kind {
                    Kind::Location => table.raw_w(buf),
                    Kind::LocationScale => table
                        .raw_v(buf)
                        .expect("continuous null samples are never degenerate"),
                };
                scale * raw
            },
        )
        .collect();
    Ok(EmpiricalDistribution::from_draws(
        draws,
        Provenance {
            kind,
            size: Size::Finite(n),
            truncation: None,
            seed,
        },
    ))
}

/// Draws behind a critical-value table: finite-sample null draws, or series
/// draws of the limit law.
pub fn null_distribution(
    kind: Kind,
    size: Size,
    reps: usize,
    truncation: usize,
    seed: u64,
) -> Result<EmpiricalDistribution> {
    match size {
        Size::Finite(n) => simulate_null_distribution(kind, n, reps, seed),
        Size::Asymptotic => sample_limit(kind, &SeriesConfig::new(truncation, seed)?, reps),
    }
}

pub fn table_from_distribution(
    dist: &EmpiricalDistribution,
    levels: &[f64],
) -> Result<CriticalValueTable> {
    validate_levels(levels)?;
    let meta = dist.meta();
    let critvals = crate::limit::estimate_quantiles(dist, levels)?;
    CriticalValueTable::new(
        meta.kind,
        meta.size,
        levels.to_vec(),
        critvals,
        dist.reps(),
        match meta.size {
            Size::Finite(_) => None,
            Size::Asymptotic => meta.truncation,
        },
        meta.seed,
    )
}

pub fn critical_values(
    kind: Kind,
    size: Size,
    levels: &[f64],
    reps: usize,
    truncation: usize,
    seed: u64,
) -> Result<CriticalValueTable> {
    validate_levels(levels)?;
    let dist = null_distribution(kind, size, reps, truncation, seed)?;
    table_from_distribution(&dist, levels)
}

/// Rejection frequency of the test at level `alpha` against `alternative`.
/// The rule is `statistic > critical value`.
pub fn empirical_power(
    kind: Kind,
    alternative: Alternative,
    n: usize,
    alpha: f64,
    table: &CriticalValueTable,
    reps: usize,
    seed: u64,
) -> Result<PowerResult> {
    check_sizes(n, reps)?;
    if table.kind != kind {
        return Err(Error::TableMismatch(format!(
            "table is for `{}`, test is `{}`",
            table.kind, kind
        )));
    }
    if let Size::Finite(m) = table.size {
        if m != n {
            return Err(Error::TableMismatch(format!(
                "table is for n = {m}, power run uses n = {n}"
            )));
        }
    }
    let critical_value = table.critical_value(1.0 - alpha).ok_or_else(|| {
        Error::TableMismatch(format!("no critical value at level {}", 1.0 - alpha))
    })?;
    let coeffs = cached_coefficients(n)?;
    let scale = n as f64;
    let rejections = (0..reps as u64)
        .into_par_iter()
        .map_init(
            || Vec::with_capacity(n),
            |buf, r| -> Result<usize> {
                let mut rng = substream(seed, Domain::Alternative, r);
                buf.clear();
                buf.extend((0..n).map(|_| alternative.draw(&mut rng)));
                buf.sort_unstable_by(f64::total_cmp);
                let raw = match kind {
                    Kind::Location => coeffs.raw_w(buf),
                    Kind::LocationScale => coeffs.raw_v(buf)?,
                };
                Ok(usize::from(scale * raw > critical_value))
            },
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(PowerResult {
        kind,
        alternative,
        n,
        alpha,
        critical_value,
        power: rejections as f64 / reps as f64,
        reps,
        seed,
    })
}
