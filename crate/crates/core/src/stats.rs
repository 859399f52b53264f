//! Cell coefficients and the location (`W_n`) and location-scale (`V_n`)
//! test statistics.
//!
//! With the sample quantile function `Q_n(t) = X_{k,n}` on `((k−1)/n, k/n]`,
//! every integral in the statistics reduces to sums over the order statistics
//! weighted by
//!
//! ```text
//! a_k = ∫_{(k−1)/n}^{k/n} 6t(1−t) ln(t/(1−t)) dt,    b_k = ∫_{(k−1)/n}^{k/n} 6t(1−t) dt.
//! ```

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logistic::LOGISTIC_NU;

/// Which null hypothesis a statistic tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// Logistic location family, statistic `nW_n`.
    #[serde(rename = "w")]
    Location,
    /// Logistic location-scale family, statistic `nV_n`.
    #[serde(rename = "v")]
    LocationScale,
}

impl Kind {
    pub fn code(self) -> &'static str {
        match self {
            Kind::Location => "w",
            Kind::LocationScale => "v",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Kind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "w" | "location" => Ok(Kind::Location),
            "v" | "location-scale" | "locationscale" => Ok(Kind::LocationScale),
            other => Err(format!(
                "unknown statistic kind `{other}` (expected `w` or `v`)"
            )),
        }
    }
}

/// A finite real sample together with its order statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
    sorted: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooSmall {
                what: "sample size",
                min: 2,
                got: values.len(),
            });
        }
        if let Some(&bad) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        let mut sorted = values.clone();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(Sample { values, sorted })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Order statistics `X_{1,n} ≤ … ≤ X_{n,n}`.
    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }
}

/// Per-cell coefficients for sample size `n`; `a[k-1]` and `b[k-1]` belong to
/// the cell `((k−1)/n, k/n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    n: usize,
    a: Vec<f64>,
    b: Vec<f64>,
}

/// Value of a statistic for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub kind: Kind,
    pub n: usize,
    /// Scaled statistic `n·W_n` or `n·V_n`.
    pub statistic: f64,
    /// Unscaled `W_n` or `V_n`.
    pub raw: f64,
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// Primitive of `6t(1−t) ln(t/(1−t))`, written as
/// `t²(3−2t) ln t + (1−t)²(1+2t) ln(1−t) + t(1−t)` so that both endpoint
/// limits are exactly zero.
fn primitive_a(t: f64) -> f64 {
    let s = 1.0 - t;
    t * (3.0 - 2.0 * t) * xlnx(t) + s * (1.0 + 2.0 * t) * xlnx(s) + t * s
}

fn primitive_b(t: f64) -> f64 {
    t * t * (3.0 - 2.0 * t)
}

impl CoefficientTable {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::TooSmall {
                what: "n",
                min: 1,
                got: n,
            });
        }
        let nf = n as f64;
        let edge = |k: usize| -> f64 {
            // exact endpoints so the boundary cells hit the analytic limits
            if k == 0 {
                0.0
            } else if k == n {
                1.0
            } else {
                k as f64 / nf
            }
        };
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for k in 1..=n {
            let (lo, hi) = (edge(k - 1), edge(k));
            a.push(primitive_a(hi) - primitive_a(lo));
            b.push(primitive_b(hi) - primitive_b(lo));
        }
        Ok(CoefficientTable { n, a, b })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Weighted mean, weighted variance and `Σ a_k (X_k − mean)`.
    fn moments(&self, sorted: &[f64]) -> (f64, f64, f64) {
        debug_assert_eq!(sorted.len(), self.n);
        let mean: f64 = self.b.iter().zip(sorted).map(|(b, x)| b * x).sum();
        let mut var = 0.0;
        let mut cross = 0.0;
        for ((a, b), x) in self.a.iter().zip(&self.b).zip(sorted) {
            let d = x - mean;
            var += b * d * d;
            cross += a * d;
        }
        (mean, var, cross)
    }

    /// Unscaled `W_n` from order statistics of length `n`.
    pub fn raw_w(&self, sorted: &[f64]) -> f64 {
        let (_, var, cross) = self.moments(sorted);
        LOGISTIC_NU + var - 2.0 * cross
    }

    /// Unscaled `V_n` from order statistics of length `n`.
    pub fn raw_v(&self, sorted: &[f64]) -> Result<f64> {
        let (first, last) = (sorted[0], sorted[sorted.len() - 1]);
        if first == last {
            return Err(Error::DegenerateSample);
        }
        let (_, var, cross) = self.moments(sorted);
        let scale = first.abs().max(last.abs());
        let floor = 4.0 * f64::EPSILON * scale;
        if !(var > floor * floor) {
            return Err(Error::DegenerateSample);
        }
        Ok(1.0 - cross * cross / (LOGISTIC_NU * var))
    }
}

/// Coefficient table for sample size `n`.
pub fn coefficients(n: usize) -> Result<CoefficientTable> {
    CoefficientTable::new(n)
}

/// Process-wide shared coefficient table for `n`.
pub fn cached_coefficients(n: usize) -> Result<Arc<CoefficientTable>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, Arc<CoefficientTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().unwrap_or_else(|e| e.into_inner()).get(&n) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(CoefficientTable::new(n)?);
    let mut w = cache.write().unwrap_or_else(|e| e.into_inner());
    Ok(Arc::clone(w.entry(n).or_insert(table)))
}

pub fn statistic_w(sample: &Sample) -> TestResult {
    let n = sample.n();
    let table = cached_coefficients(n).expect("sample size is at least 2");
    let raw = table.raw_w(sample.sorted());
    TestResult {
        kind: Kind::Location,
        n,
        statistic: n as f64 * raw,
        raw,
    }
}

pub fn statistic_v(sample: &Sample) -> Result<TestResult> {
    let n = sample.n();
    let table = cached_coefficients(n)?;
    let raw = table.raw_v(sample.sorted())?;
    Ok(TestResult {
        kind: Kind::LocationScale,
        n,
        statistic: n as f64 * raw,
        raw,
    })
}

pub fn statistic(kind: Kind, sample: &Sample) -> Result<TestResult> {
    match kind {
        Kind::Location => Ok(statistic_w(sample)),
        Kind::LocationScale => statistic_v(sample),
    }
}
