//! Numeric self-checks of the eigensystem, the integral identities behind the
//! series weights, and the cell coefficients.

use crate::error::Result;
use crate::limit::lin_coeff;
use crate::quad;
use crate::spectral::{
    eigenfunction, eigenvalue, lemma_a_check, lemma_b_closed_form, lemma_b_quadrature,
};
use crate::stats::coefficients;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            detail,
        }
    }

    fn from_result(name: &str, r: Result<(bool, String)>) -> Self {
        match r {
            Ok((passed, detail)) => Check::new(name, passed, detail),
            Err(e) => Check::new(name, false, format!("error: {e}")),
        }
    }
}

pub const GRAM_TOL: f64 = 1e-8;
pub const LEMMA_B_TOL: f64 = 1e-9;
pub const RECOMPOSE_TOL: f64 = 1e-12;
pub const RATIO_TOL: f64 = 0.3;
pub const COEFF_TOL: f64 = 1e-10;

/// Largest deviation of the Gram matrix of `f_1..f_size` from the identity.
pub fn gram_deviation(size: usize) -> Result<f64> {
    let mut worst = 0.0f64;
    for k in 1..=size {
        for l in k..=size {
            let g = quad::integrate(
                |t| eigenfunction(k, t).unwrap_or(0.0) * eigenfunction(l, t).unwrap_or(0.0),
                0.0,
                1.0,
                1e-13,
            )?;
            let target = if k == l { 1.0 } else { 0.0 };
            worst = worst.max((g - target).abs());
        }
    }
    Ok(worst)
}

/// Rebuilds the linear weight from `6 · √λ_{2l} · ‖·‖ · (1/8) · lemma-B(2l−1)`.
pub fn recomposed_lin_coeff(l: usize) -> Result<f64> {
    let k = 2 * l;
    let norm = ((2 * k + 1) as f64 * (k + 1) as f64 / k as f64).sqrt();
    Ok(6.0 * eigenvalue(k)?.sqrt() * norm * lemma_b_closed_form(k - 1) / 8.0)
}

/// Successive ratios `residual(n)/residual(2n)` over `n = 50, 100, 200, 400`.
pub fn lemma_a_ratios(k: u32) -> Result<Vec<f64>> {
    let res = [50, 100, 200, 400]
        .iter()
        .map(|&n| lemma_a_check(n, k).map(|c| c.residual))
        .collect::<Result<Vec<_>>>()?;
    Ok(res.windows(2).map(|w| w[0] / w[1]).collect())
}

pub fn run_all() -> Vec<Check> {
    let mut checks = Vec::new();

    checks.push(Check::from_result(
        "orthonormality f_1..f_10",
        gram_deviation(10).map(|d| (d < GRAM_TOL, format!("max |G - I| = {d:.3e}"))),
    ));

    for n in 0..=10 {
        let closed = lemma_b_closed_form(n);
        checks.push(Check::from_result(
            &format!("lemma B n={n}"),
            lemma_b_quadrature(n).map(|q| {
                let gap = (q - closed).abs();
                (
                    gap < LEMMA_B_TOL,
                    format!("closed {closed:.12}, quadrature {q:.12}, |diff| = {gap:.3e}"),
                )
            }),
        ));
    }

    for k in 0..=3 {
        checks.push(Check::from_result(
            &format!("lemma A k={k} residual O(1/n^2)"),
            lemma_a_ratios(k).map(|ratios| {
                let ok = ratios.iter().all(|r| (r - 4.0).abs() < RATIO_TOL);
                let shown: Vec<String> = ratios.iter().map(|r| format!("{r:.3}")).collect();
                (
                    ok,
                    format!(
                        "residual ratios for n doubling from 50: {}",
                        shown.join(", ")
                    ),
                )
            }),
        ));
    }

    checks.push(Check::from_result(
        "linear series weights recomposed l=1..20",
        (1..=20)
            .map(|l| Ok((recomposed_lin_coeff(l)? - lin_coeff(l)?).abs()))
            .collect::<Result<Vec<f64>>>()
            .map(|gaps| {
                let worst = gaps.into_iter().fold(0.0, f64::max);
                (worst < RECOMPOSE_TOL, format!("max |diff| = {worst:.3e}"))
            }),
    ));

    checks.push(Check::from_result(
        "cell coefficients vs quadrature n=1..20",
        coefficient_gap(20),
    ));

    checks
}

fn coefficient_gap(max_n: usize) -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for n in 1..=max_n {
        let t = coefficients(n)?;
        for k in 1..=n {
            let (lo, hi) = ((k - 1) as f64 / n as f64, k as f64 / n as f64);
            let a = quad::integrate(
                |s| 6.0 * s * (1.0 - s) * (s / (1.0 - s)).ln(),
                lo,
                hi,
                1e-14,
            )?;
            let b = quad::integrate(|s| 6.0 * s * (1.0 - s), lo, hi, 1e-14)?;
            worst = worst
                .max((a - t.a()[k - 1]).abs())
                .max((b - t.b()[k - 1]).abs());
        }
    }
    Ok((worst < COEFF_TOL, format!("max |diff| = {worst:.3e}")))
}
