//! Weighted quantile correlation goodness-of-fit tests for the logistic
//! location family (`nW_n`) and location-scale family (`nV_n`), with Monte
//! Carlo critical values from finite samples and from the series
//! representations of the limit laws.

pub mod alternatives;
pub mod error;
pub mod io;
pub mod limit;
pub mod logistic;
pub mod quad;
pub mod rng;
pub mod sim;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use alternatives::{null_sample, Alternative};
pub use error::{Error, Result};
pub use limit::{EmpiricalDistribution, Provenance, SeriesConfig, Size};
pub use logistic::{LogisticLaw, WeightedMoments, LOGISTIC_NU};
pub use sim::{CriticalValueTable, PowerResult};
pub use stats::{statistic, statistic_v, statistic_w, Kind, Sample, TestResult};
