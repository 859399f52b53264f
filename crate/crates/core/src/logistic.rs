//! The standard logistic law, the weight `w(t) = 6t(1-t)` and the weighted
//! moments of the logistic quantile function under that weight.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `π²/3 − 2`, the weighted second moment (and variance) of the logistic
/// quantile function under `w(t) = 6t(1−t)`.
pub const LOGISTIC_NU: f64 = PI * PI / 3.0 - 2.0;

/// The standard logistic distribution `G(x) = 1/(1+e^{-x})`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LogisticLaw;

/// Weighted moments `μ1`, `μ2` and `ν = μ2 − μ1²` of a quantile function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedMoments {
    pub mu1: f64,
    pub mu2: f64,
    pub nu: f64,
}

fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite(x))
    }
}

fn open_unit(u: f64) -> Result<f64> {
    if u > 0.0 && u < 1.0 {
        Ok(u)
    } else {
        Err(Error::ProbabilityOutOfRange(u))
    }
}

impl LogisticLaw {
    pub fn cdf(self, x: f64) -> Result<f64> {
        Ok(cdf_unchecked(finite(x)?))
    }

    pub fn pdf(self, x: f64) -> Result<f64> {
        let e = (-finite(x)?.abs()).exp();
        let d = 1.0 + e;
        Ok(e / (d * d))
    }

    pub fn quantile(self, u: f64) -> Result<f64> {
        Ok(quantile_unchecked(open_unit(u)?))
    }

    /// The weight `w(t) = 6t(1−t)`; integrates to one over `(0, 1)`.
    pub fn weight(self, t: f64) -> Result<f64> {
        let t = open_unit(t)?;
        Ok(6.0 * t * (1.0 - t))
    }

    pub fn weighted_moments(self) -> WeightedMoments {
        WeightedMoments {
            mu1: 0.0,
            mu2: LOGISTIC_NU,
            nu: LOGISTIC_NU,
        }
    }
}

// Only e^{-|x|} is ever formed, so neither branch overflows.
pub(crate) fn cdf_unchecked(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    if x >= 0.0 {
        1.0 / (1.0 + e)
    } else {
        e / (1.0 + e)
    }
}

pub(crate) fn quantile_unchecked(u: f64) -> f64 {
    u.ln() - (-u).ln_1p()
}
