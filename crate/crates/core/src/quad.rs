//! Adaptive quadrature on finite intervals.
//!
//! Each panel is integrated with the double-exponential (tanh-sinh) rule,
//! which never evaluates the endpoints and tolerates integrable endpoint
//! singularities such as `t ln t`. Panels whose error estimate misses the
//! target are bisected.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 30;

/// Integrates `f` over `[a, b]` to the requested absolute error.
pub fn integrate<F>(f: F, a: f64, b: f64, abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    panel(&f, a, b, abs_tol, 0)
}

fn panel<F>(f: &F, a: f64, b: f64, abs_tol: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let out = quadrature::integrate(f, a, b, abs_tol);
    if out.error_estimate <= abs_tol {
        return Ok(out.integral);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature {
            a,
            b,
            estimate: out.error_estimate,
        });
    }
    let mid = 0.5 * (a + b);
    let half = 0.5 * abs_tol;
    Ok(panel(f, a, mid, half, depth + 1)? + panel(f, mid, b, half, depth + 1)?)
}

/// Integrates over `[a, b]` split at the given interior breakpoints.
pub fn integrate_pieces<F>(f: F, breaks: &[f64], abs_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    let pieces = breaks.len().saturating_sub(1).max(1) as f64;
    breaks
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], abs_tol / pieces))
        .sum()
}
