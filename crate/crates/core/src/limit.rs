//! Sampling the limit laws of `nW_n` and `nV_n`.
//!
//! With i.i.d. standard normal `Z_1, Z_2, …`
//!
//! ```text
//! W = Σ_{k≥2} 6/(k(k+1)) Z_k²
//! V = (1/ν) Σ_{k≥2} 6/(k(k+1)) Z_k² − [(1/ν) Σ_{l≥1} c_l Z_{2l}]²,   ν = π²/3 − 2,
//! c_l = 3√(4l+1) / (l(l+1)(2l−1)(2l+1)),
//! ```
//!
//! where the `Z_{2l}` in the linear term are the even-indexed variates of the
//! quadratic term. Both series are truncated at `K` terms. A discretized
//! Brownian bridge provides an independent route to the same laws.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logistic::LOGISTIC_NU;
use crate::rng::{substream, Domain};
use crate::stats::Kind;

/// Default series truncation.
pub const DEFAULT_TRUNCATION: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeriesConfig {
    truncation: usize,
    seed: u64,
}

impl SeriesConfig {
    pub fn new(truncation: usize, seed: u64) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::TooSmall {
                what: "truncation",
                min: 2,
                got: truncation,
            });
        }
        Ok(SeriesConfig { truncation, seed })
    }

    pub fn truncation(&self) -> usize {
        self.truncation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Sample size a distribution refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Size {
    Finite(usize),
    Asymptotic,
}

impl std::fmt::Display for Size {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Size::Finite(n) => write!(f, "{n}"),
            Size::Asymptotic => f.write_str("asymptotic"),
        }
    }
}

impl std::str::FromStr for Size {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("asymptotic") || s.eq_ignore_ascii_case("inf") {
            return Ok(Size::Asymptotic);
        }
        s.parse::<usize>()
            .map(Size::Finite)
            .map_err(|_| format!("invalid size `{s}` (expected an integer or `asymptotic`)"))
    }
}

/// Where a set of draws came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    pub kind: Kind,
    pub size: Size,
    /// Series truncation or bridge grid size; `None` for finite-sample draws.
    pub truncation: Option<usize>,
    pub seed: u64,
}

/// Sorted Monte Carlo draws of a statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    draws: Vec<f64>,
    meta: Provenance,
}

impl EmpiricalDistribution {
    pub fn from_draws(mut draws: Vec<f64>, meta: Provenance) -> Self {
        draws.sort_unstable_by(f64::total_cmp);
        EmpiricalDistribution { draws, meta }
    }

    pub fn draws(&self) -> &[f64] {
        &self.draws
    }

    pub fn reps(&self) -> usize {
        self.draws.len()
    }

    pub fn meta(&self) -> &Provenance {
        &self.meta
    }

    pub fn mean(&self) -> f64 {
        self.draws.iter().sum::<f64>() / self.draws.len() as f64
    }

    /// Fraction of draws `≤ x`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.draws.partition_point(|&d| d <= x) as f64 / self.draws.len() as f64
    }

    /// Fraction of draws `≥ x`, the empirical upper-tail p-value.
    pub fn upper_tail(&self, x: f64) -> f64 {
        let below = self.draws.partition_point(|&d| d < x);
        (self.draws.len() - below) as f64 / self.draws.len() as f64
    }

    /// The `⌈p·N⌉`-th order statistic.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if self.draws.is_empty() {
            return Err(Error::EmptyDistribution);
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        Ok(self.draws[order_index(p, self.draws.len())])
    }
}

/// Zero-based index of the `⌈p·N⌉`-th order statistic, treating products
/// within rounding of an integer as that integer.
fn order_index(p: f64, len: usize) -> usize {
    let x = p * len as f64;
    let r = x.round();
    let rank = if (x - r).abs() <= 1e-9 * x.max(1.0) {
        r
    } else {
        x.ceil()
    };
    (rank as usize).clamp(1, len) - 1
}

pub fn estimate_quantiles(dist: &EmpiricalDistribution, levels: &[f64]) -> Result<Vec<f64>> {
    levels.iter().map(|&p| dist.quantile(p)).collect()
}

/// `6/(k(k+1))`, the weight of `Z_k²`.
pub fn quad_coeff(k: usize) -> Result<f64> {
    if k < 2 {
        return Err(Error::TooSmall {
            what: "k",
            min: 2,
            got: k,
        });
    }
    let k = k as f64;
    Ok(6.0 / (k * (k + 1.0)))
}

/// `3√(4l+1)/(l(l+1)(2l−1)(2l+1))`, the weight of `Z_{2l}` in the linear term.
pub fn lin_coeff(l: usize) -> Result<f64> {
    if l < 1 {
        return Err(Error::TooSmall {
            what: "l",
            min: 1,
            got: l,
        });
    }
    let l = l as f64;
    Ok(3.0 * (4.0 * l + 1.0).sqrt() / (l * (l + 1.0) * (2.0 * l - 1.0) * (2.0 * l + 1.0)))
}

/// Precomputed series weights for one truncation.
#[derive(Debug, Clone)]
pub struct SeriesWeights {
    // quad[i] multiplies Z_{i+1}²; quad[0] = 0 so Z_1 is drawn and ignored
    quad: Vec<f64>,
    // lin[l-1] multiplies Z_{2l}
    lin: Vec<f64>,
}

impl SeriesWeights {
    pub fn new(truncation: usize) -> Result<Self> {
        if truncation < 2 {
            return Err(Error::TooSmall {
                what: "truncation",
                min: 2,
                got: truncation,
            });
        }
        let quad = std::iter::once(0.0)
            .chain((2..=truncation).map(|k| quad_coeff(k).unwrap()))
            .collect();
        let lin = (1..=truncation / 2)
            .map(|l| lin_coeff(l).unwrap())
            .collect();
        Ok(SeriesWeights { quad, lin })
    }

    pub fn truncation(&self) -> usize {
        self.quad.len()
    }

    /// `Σ_{k=2}^{K} 6/(k(k+1)) z_k²`; `z[0]` holds `Z_1`.
    pub fn quadratic(&self, z: &[f64]) -> f64 {
        self.quad.iter().zip(z).map(|(c, x)| c * x * x).sum()
    }

    /// `Σ_{l=1}^{⌊K/2⌋} c_l z_{2l}`.
    pub fn linear(&self, z: &[f64]) -> f64 {
        self.lin
            .iter()
            .zip(z.iter().skip(1).step_by(2))
            .map(|(c, x)| c * x)
            .sum()
    }

    pub fn w_from_variates(&self, z: &[f64]) -> f64 {
        self.quadratic(z)
    }

    pub fn v_from_variates(&self, z: &[f64]) -> f64 {
        let lin = self.linear(z) / LOGISTIC_NU;
        self.quadratic(z) / LOGISTIC_NU - lin * lin
    }

    pub fn from_variates(&self, kind: Kind, z: &[f64]) -> f64 {
        match kind {
            Kind::Location => self.w_from_variates(z),
            Kind::LocationScale => self.v_from_variates(z),
        }
    }
}

/// The standard normal variates `Z_1..Z_K` behind series replication `index`.
pub fn series_variates(cfg: &SeriesConfig, index: u64) -> Vec<f64> {
    let mut z = vec![0.0; cfg.truncation];
    fill_normals(&mut substream(cfg.seed, Domain::LimitSeries, index), &mut z);
    z
}

fn fill_normals<R: Rng + ?Sized>(rng: &mut R, out: &mut [f64]) {
    use rand::RngExt;
    for x in out.iter_mut() {
        *x = rng.sample(StandardNormal);
    }
}

pub fn sample_limit(kind: Kind, cfg: &SeriesConfig, count: usize) -> Result<EmpiricalDistribution> {
    if count < 1 {
        return Err(Error::TooSmall {
            what: "count",
            min: 1,
            got: count,
        });
    }
    let weights = SeriesWeights::new(cfg.truncation)?;
    let draws: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; cfg.truncation],
            |z, r| {
                fill_normals(&mut substream(cfg.seed, Domain::LimitSeries, r), z);
                weights.from_variates(kind, z)
            },
        )
        .collect();
    Ok(EmpiricalDistribution::from_draws(
        draws,
        Provenance {
            kind,
            size: Size::Asymptotic,
            truncation: Some(cfg.truncation),
            seed: cfg.seed,
        },
    ))
}

pub fn sample_limit_w(cfg: &SeriesConfig, count: usize) -> Result<EmpiricalDistribution> {
    sample_limit(Kind::Location, cfg, count)
}

pub fn sample_limit_v(cfg: &SeriesConfig, count: usize) -> Result<EmpiricalDistribution> {
    sample_limit(Kind::LocationScale, cfg, count)
}

/// Integral functionals of one Brownian bridge path sampled at the cell
/// midpoints `t_i = (i + 1/2)/m`, integrated by the midpoint rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BridgeFunctionals {
    /// `∫ 6B²/(t(1−t))`
    pub weighted_square: f64,
    /// `∫ 6B`
    pub mean: f64,
    /// `∫ 6B ln(t/(1−t))`
    pub log_moment: f64,
}

impl BridgeFunctionals {
    pub fn w(&self) -> f64 {
        self.weighted_square - self.mean * self.mean
    }

    pub fn v(&self) -> f64 {
        let lin = self.log_moment / LOGISTIC_NU;
        self.w() / LOGISTIC_NU - lin * lin
    }

    pub fn value(&self, kind: Kind) -> f64 {
        match kind {
            Kind::Location => self.w(),
            Kind::LocationScale => self.v(),
        }
    }
}

/// Simulates one bridge path on `m` cells (endpoints excluded) and returns
/// its functionals. `path` is scratch space of length `m`.
pub fn bridge_functionals<R: Rng + ?Sized>(
    m: usize,
    rng: &mut R,
    path: &mut [f64],
) -> BridgeFunctionals {
    use rand::RngExt;
    debug_assert_eq!(path.len(), m);
    let h = 1.0 / m as f64;
    let edge_sd = (0.5 * h).sqrt();
    let step_sd = h.sqrt();
    // Brownian motion at the midpoints, then pinned at t = 1
    let mut w = 0.0;
    for (i, slot) in path.iter_mut().enumerate() {
        let sd = if i == 0 { edge_sd } else { step_sd };
        w += sd * rng.sample::<f64, _>(StandardNormal);
        *slot = w;
    }
    let w1 = w + edge_sd * rng.sample::<f64, _>(StandardNormal);

    let mut out = BridgeFunctionals {
        weighted_square: 0.0,
        mean: 0.0,
        log_moment: 0.0,
    };
    for (i, &wt) in path.iter().enumerate() {
        let t = (i as f64 + 0.5) * h;
        let b = wt - t * w1;
        out.weighted_square += b * b / (t * (1.0 - t));
        out.mean += b;
        out.log_moment += b * (t / (1.0 - t)).ln();
    }
    out.weighted_square *= 6.0 * h;
    out.mean *= 6.0 * h;
    out.log_moment *= 6.0 * h;
    out
}

/// Draws of `W` or `V` via the discretized weighted-bridge integrals.
pub fn sample_limit_via_bridge(
    kind: Kind,
    grid: usize,
    seed: u64,
    count: usize,
) -> Result<EmpiricalDistribution> {
    if grid < 100 {
        return Err(Error::TooSmall {
            what: "grid size",
            min: 100,
            got: grid,
        });
    }
    if count < 1 {
        return Err(Error::TooSmall {
            what: "count",
            min: 1,
            got: count,
        });
    }
    let draws: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map_init(
            || vec![0.0; grid],
            |path, r| {
                let mut rng = substream(seed, Domain::LimitBridge, r);
                bridge_functionals(grid, &mut rng, path).value(kind)
            },
        )
        .collect();
    Ok(EmpiricalDistribution::from_draws(
        draws,
        Provenance {
            kind,
            size: Size::Asymptotic,
            truncation: Some(grid),
            seed,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn meta() -> Provenance {
        Provenance {
            kind: Kind::Location,
            size: Size::Asymptotic,
            truncation: None,
            seed: 0,
        }
    }

    #[test]
    fn coefficient_values() {
        assert_eq!(quad_coeff(2).unwrap(), 1.0);
        assert_eq!(quad_coeff(3).unwrap(), 0.5);
        assert!(quad_coeff(1).is_err());
        assert!((lin_coeff(1).unwrap() - 5f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((lin_coeff(1).unwrap() - 1.1180340).abs() < 1e-7);
        assert!((lin_coeff(2).unwrap() - 0.1).abs() < 1e-15);
        assert!(lin_coeff(0).is_err());
    }

    #[test]
    fn quadratic_weights_telescope() {
        let k_max = 1_000_000;
        let s: f64 = (2..=k_max).map(|k| quad_coeff(k).unwrap()).sum();
        // Σ_{k=2}^{K} 6/(k(k+1)) = 3 − 6/(K+1)
        assert!((s - 3.0).abs() < 1e-5);
        assert!((s - (3.0 - 6.0 / (k_max as f64 + 1.0))).abs() < 1e-10);
    }

    #[test]
    fn zero_variates_give_zero() {
        let w = SeriesWeights::new(50).unwrap();
        let z = vec![0.0; 50];
        assert_eq!(w.v_from_variates(&z), 0.0);
        assert_eq!(w.w_from_variates(&z), 0.0);
    }

    #[test]
    fn first_variate_is_ignored() {
        let w = SeriesWeights::new(10).unwrap();
        let mut z: Vec<f64> = (1..=10).map(|i| i as f64 * 0.1).collect();
        let before = (w.w_from_variates(&z), w.v_from_variates(&z));
        z[0] = 1e6;
        assert_eq!(before, (w.w_from_variates(&z), w.v_from_variates(&z)));
    }

    #[test]
    fn linear_term_uses_even_variates() {
        let cfg = SeriesConfig::new(21, 5).unwrap();
        let weights = SeriesWeights::new(21).unwrap();
        let z = series_variates(&cfg, 3);
        let manual: f64 = (1..=10).map(|l| lin_coeff(l).unwrap() * z[2 * l - 1]).sum();
        assert_eq!(weights.linear(&z).to_bits(), manual.to_bits());
        let again = series_variates(&cfg, 3);
        assert_eq!(z, again);
    }

    #[test]
    fn quadratic_part_monotone_in_truncation() {
        let cfg = SeriesConfig::new(400, 11).unwrap();
        let z = series_variates(&cfg, 0);
        let mut prev = 0.0;
        for k in [2, 3, 10, 57, 200, 400] {
            let q = SeriesWeights::new(k).unwrap().quadratic(&z[..k]);
            assert!(q >= prev);
            prev = q;
        }
    }

    #[test]
    fn w_draws_have_truncated_mean() {
        let k = 10_000;
        let d = sample_limit_w(&SeriesConfig::new(k, 1).unwrap(), 100_000).unwrap();
        assert!(d.draws().iter().all(|&x| x >= 0.0));
        let expect = 3.0 - 6.0 / (k as f64 + 1.0);
        assert!((d.mean() - expect).abs() < 0.02, "{}", d.mean());
        // Var W = 2 Σ c_k²; c_2 = 1 dominates, the rest add ≈ 0.5
        let var = d
            .draws()
            .iter()
            .map(|x| (x - d.mean()).powi(2))
            .sum::<f64>()
            / d.reps() as f64;
        let se = (var / d.reps() as f64).sqrt();
        assert!((d.mean() - expect).abs() < 3.0 * se);
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = SeriesConfig::new(300, 42).unwrap();
        let a = sample_limit_v(&cfg, 500).unwrap();
        let b = sample_limit_v(&cfg, 500).unwrap();
        assert_eq!(a, b);
        let c = sample_limit_v(&SeriesConfig::new(300, 43).unwrap(), 500).unwrap();
        assert_ne!(a.draws(), c.draws());
    }

    #[test]
    fn bridge_w_is_nonnegative() {
        let d = sample_limit_via_bridge(Kind::Location, 500, 3, 2_000).unwrap();
        assert!(d.draws()[0] >= -1e-6);
        assert!(sample_limit_via_bridge(Kind::Location, 99, 3, 10).is_err());
    }

    #[test]
    fn bridge_weighted_square_is_unbiased() {
        // E ∫6B²/(t(1−t)) = 6 exactly at the midpoints
        let m = 400;
        let reps = 20_000;
        let mut path = vec![0.0; m];
        let xs: Vec<f64> = (0..reps)
            .map(|r| {
                bridge_functionals(m, &mut substream(8, Domain::LimitBridge, r), &mut path)
                    .weighted_square
            })
            .collect();
        let mean = xs.iter().sum::<f64>() / reps as f64;
        let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / reps as f64).sqrt();
        assert!(
            (mean - 6.0).abs() < 3.5 * sd / (reps as f64).sqrt(),
            "{mean}"
        );
    }

    #[test]
    fn quantile_is_order_statistic() {
        let d = EmpiricalDistribution::from_draws((1..=100).rev().map(f64::from).collect(), meta());
        assert_eq!(d.quantile(0.90).unwrap(), 90.0);
        assert_eq!(d.quantile(0.905).unwrap(), 91.0);
        assert_eq!(d.quantile(0.001).unwrap(), 1.0);
        assert_eq!(
            estimate_quantiles(&d, &[0.85, 0.9, 0.95, 0.99]).unwrap(),
            vec![85.0, 90.0, 95.0, 99.0]
        );
        assert!(d.quantile(1.0).is_err());
        assert!(d.quantile(0.0).is_err());
        let empty = EmpiricalDistribution::from_draws(vec![], meta());
        assert!(matches!(empty.quantile(0.5), Err(Error::EmptyDistribution)));
    }

    #[test]
    fn median_of_symmetric_distribution() {
        let d = EmpiricalDistribution::from_draws(
            (-500..=500).map(|i| i as f64 / 100.0).collect(),
            meta(),
        );
        assert!(d.quantile(0.5).unwrap().abs() <= 0.01);
    }

    #[test]
    fn tails() {
        let d = EmpiricalDistribution::from_draws(vec![1.0, 2.0, 3.0, 4.0], meta());
        assert_eq!(d.cdf(2.0), 0.5);
        assert_eq!(d.upper_tail(2.0), 0.75);
        assert_eq!(d.upper_tail(5.0), 0.0);
        assert_eq!(d.cdf(0.0), 0.0);
    }

    #[test]
    fn size_parsing() {
        assert_eq!("asymptotic".parse::<Size>().unwrap(), Size::Asymptotic);
        assert_eq!("20".parse::<Size>().unwrap(), Size::Finite(20));
        assert!("x".parse::<Size>().is_err());
        assert_eq!(Size::Finite(7).to_string(), "7");
    }
}
