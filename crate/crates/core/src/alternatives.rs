//! Null and alternative samplers used by the power study. Every law is in
//! its standard form and fed to the tests without standardization.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::Open01;
use rand::{Rng, RngExt};
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::logistic::quantile_unchecked;
use crate::stats::Sample;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Alternative {
    /// Standard logistic, the null law.
    Logistic,
    /// N(0, 1).
    Normal01,
    /// Uniform on (0, 1).
    Uniform01,
    /// Standard Cauchy.
    Cauchy,
    /// Density `e^{-|t|}/2`.
    Laplace,
    /// Exponential with mean 1.
    Exp1,
    /// Density `1 − |t|` on (−1, 1).
    TriangleI,
    /// Density `2 − 2t` on (0, 1).
    TriangleII,
    /// Beta(2, 2).
    Beta22,
    /// Weibull with shape 2, density `2t e^{-t²}`.
    Weibull2,
    /// Gamma with shape 2 and scale 1.
    Gamma21,
    /// `e^Z` for standard normal `Z`.
    Lognormal,
    /// Student t with 5 degrees of freedom.
    Student5,
    /// Chi-squared with 1 degree of freedom.
    ChiSq1,
    /// `−E` with `E ~ Exp(1)`.
    NegExp,
}

impl Alternative {
    pub const ALL: [Alternative; 15] = [
        Alternative::Logistic,
        Alternative::Normal01,
        Alternative::Uniform01,
        Alternative::Cauchy,
        Alternative::Laplace,
        Alternative::Exp1,
        Alternative::TriangleI,
        Alternative::TriangleII,
        Alternative::Beta22,
        Alternative::Weibull2,
        Alternative::Gamma21,
        Alternative::Lognormal,
        Alternative::Student5,
        Alternative::ChiSq1,
        Alternative::NegExp,
    ];

    /// Command-line name.
    pub fn name(self) -> &'static str {
        match self {
            Alternative::Logistic => "logistic",
            Alternative::Normal01 => "normal",
            Alternative::Uniform01 => "uniform",
            Alternative::Cauchy => "cauchy",
            Alternative::Laplace => "laplace",
            Alternative::Exp1 => "exp",
            Alternative::TriangleI => "triangle1",
            Alternative::TriangleII => "triangle2",
            Alternative::Beta22 => "beta22",
            Alternative::Weibull2 => "weibull2",
            Alternative::Gamma21 => "gamma21",
            Alternative::Lognormal => "lognormal",
            Alternative::Student5 => "student5",
            Alternative::ChiSq1 => "chisq1",
            Alternative::NegExp => "negexp",
        }
    }

    /// One variate.
    pub fn draw<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            Alternative::Logistic => quantile_unchecked(uniform(rng)),
            Alternative::Normal01 => normal(rng),
            Alternative::Uniform01 => uniform(rng),
            Alternative::Cauchy => (PI * (uniform(rng) - 0.5)).tan(),
            Alternative::Laplace => {
                let u = uniform(rng);
                if u < 0.5 {
                    (2.0 * u).ln()
                } else {
                    -(2.0 * (1.0 - u)).ln()
                }
            }
            Alternative::Exp1 => exp1(rng),
            Alternative::TriangleI => {
                let u = uniform(rng);
                if u < 0.5 {
                    (2.0 * u).sqrt() - 1.0
                } else {
                    1.0 - (2.0 * (1.0 - u)).sqrt()
                }
            }
            Alternative::TriangleII => 1.0 - uniform(rng).sqrt(),
            Alternative::Beta22 => {
                // median of three uniforms
                let (a, b, c) = (uniform(rng), uniform(rng), uniform(rng));
                a.max(b).min(a.min(b).max(c))
            }
            Alternative::Weibull2 => exp1(rng).sqrt(),
            Alternative::Gamma21 => exp1(rng) + exp1(rng),
            Alternative::Lognormal => normal(rng).exp(),
            Alternative::Student5 => {
                let z = normal(rng);
                let chi2: f64 = (0..5).map(|_| normal(rng).powi(2)).sum();
                z / (chi2 / 5.0).sqrt()
            }
            Alternative::ChiSq1 => normal(rng).powi(2),
            Alternative::NegExp => -exp1(rng),
        }
    }

    /// `n` i.i.d. variates, unsorted.
    pub fn draw_n<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.draw(rng)).collect()
    }

    pub fn sample<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Result<Sample> {
        if n < 1 {
            return Err(Error::TooSmall {
                what: "n",
                min: 1,
                got: n,
            });
        }
        Sample::new(self.draw_n(n, rng))
    }
}

/// `n` standard-logistic variates via the quantile transform.
pub fn null_sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Sample> {
    Alternative::Logistic.sample(n, rng)
}

fn uniform<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

fn normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

// inverse CDF of Exp(1); 1 − U is again uniform on (0, 1)
fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    -uniform(rng).ln()
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase();
        Alternative::ALL
            .into_iter()
            .find(|a| a.name() == key)
            .ok_or_else(|| Error::UnknownAlternative(s.to_string()))
    }
}
