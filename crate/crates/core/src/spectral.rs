//! Karhunen–Loève eigensystem of the weighted bridge `B(t)/√(t(1−t))` and
//! numeric checks of the integrals that produce the series weights.
//!
//! The eigenpairs are `λ_k = 1/(k(k+1))` and
//! `f_k(t) = √((2k+1)(k+1)/k) · P_{k−1}^{(1,1)}(2t−1) · √(t(1−t))`.

use crate::error::{Error, Result};
use crate::quad;

fn probability(t: f64) -> Result<f64> {
    if t > 0.0 && t < 1.0 {
        Ok(t)
    } else {
        Err(Error::ProbabilityOutOfRange(t))
    }
}

fn at_least(what: &'static str, min: usize, got: usize) -> Result<()> {
    if got < min {
        Err(Error::TooSmall { what, min, got })
    } else {
        Ok(())
    }
}

/// Jacobi polynomial `P_n^{(1,1)}(x)` by forward recurrence:
/// `n(n+2) P_n = (n+1)(2n+1) x P_{n−1} − n(n+1) P_{n−2}`.
pub fn jacobi_p11(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for k in 2..=n {
        let kf = k as f64;
        let next =
            ((kf + 1.0) * (2.0 * kf + 1.0) * x * cur - kf * (kf + 1.0) * prev) / (kf * (kf + 2.0));
        prev = cur;
        cur = next;
    }
    cur
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub k: usize,
    pub lambda: f64,
    pub norm_const: f64,
}

impl EigenPair {
    pub fn new(k: usize) -> Result<Self> {
        Ok(EigenPair {
            k,
            lambda: eigenvalue(k)?,
            norm_const: norm_const(k),
        })
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        eigenfunction(self.k, t)
    }
}

/// `λ_k = 1/(k(k+1))`.
pub fn eigenvalue(k: usize) -> Result<f64> {
    at_least("k", 1, k)?;
    let k = k as f64;
    Ok(1.0 / (k * (k + 1.0)))
}

fn norm_const(k: usize) -> f64 {
    let k = k as f64;
    ((2.0 * k + 1.0) * (k + 1.0) / k).sqrt()
}

pub fn eigenfunction(k: usize, t: f64) -> Result<f64> {
    at_least("k", 1, k)?;
    let t = probability(t)?;
    Ok(norm_const(k) * jacobi_p11(k - 1, 2.0 * t - 1.0) * (t * (1.0 - t)).sqrt())
}

/// Covariance `(min(s,t) − st)/√(s(1−s)t(1−t))` of the weighted bridge.
pub fn covariance_kernel(s: f64, t: f64) -> Result<f64> {
    let (s, t) = (probability(s)?, probability(t)?);
    let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
    Ok(lo * (1.0 - hi) / (lo * (1.0 - lo) * hi * (1.0 - hi)).sqrt())
}

/// `∫_{−1}^{1} P_n^{(1,1)}(x)(1−x²) ln((1+x)/(1−x)) dx` in closed form:
/// zero for even `n`, `8/((2k+1)(2k+3)(k+2))` for `n = 2k+1`.
pub fn lemma_b_closed_form(n: usize) -> f64 {
    if n % 2 == 0 {
        return 0.0;
    }
    let k = ((n - 1) / 2) as f64;
    8.0 / ((2.0 * k + 1.0) * (2.0 * k + 3.0) * (k + 2.0))
}

/// The same integral by adaptive quadrature.
pub fn lemma_b_quadrature(n: usize) -> Result<f64> {
    let f = |x: f64| {
        if x.abs() >= 1.0 {
            0.0
        } else {
            jacobi_p11(n, x) * (1.0 - x * x) * (x.ln_1p() - (-x).ln_1p())
        }
    };
    // split at 0 so each panel sees one logarithmic endpoint
    quad::integrate_pieces(f, &[-1.0, 0.0, 1.0], 1e-13)
}

/// Quadrature value, leading asymptotic term and their difference for
/// `n ∫_0^{1/(n+1)} ln^k(nt/(1−t)) t(1−t) dt ≈ (−1)^k k!/2^{k+1} · 1/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LemmaACheck {
    pub n: usize,
    pub k: u32,
    pub numeric: f64,
    pub leading: f64,
    pub residual: f64,
}

pub fn lemma_a_check(n: usize, k: u32) -> Result<LemmaACheck> {
    at_least("n", 2, n)?;
    if k > 6 {
        return Err(Error::InvalidLevels(format!("power k = {k} exceeds 6")));
    }
    let nf = n as f64;
    let ki = k as i32;
    let numeric = if k <= 2 {
        let f = |t: f64| (nf * t / (1.0 - t)).ln().powi(ki) * t * (1.0 - t);
        nf * quad::integrate(f, 0.0, 1.0 / (nf + 1.0), 1e-16)?
    } else {
        // y = n t/(1−t): (1/n) ∫_0^1 y ln^k y /(1 + y/n)^4 dy
        let f = |y: f64| {
            if y == 0.0 {
                0.0
            } else {
                y * y.ln().powi(ki) / (1.0 + y / nf).powi(4)
            }
        };
        quad::integrate(f, 0.0, 1.0, 1e-14)? / nf
    };
    let factorial: f64 = (1..=k).map(f64::from).product();
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let leading = sign * factorial / 2f64.powi(ki + 1) / nf;
    Ok(LemmaACheck {
        n,
        k,
        numeric,
        leading,
        residual: numeric - leading,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn jacobi_low_degrees() {
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(jacobi_p11(0, x), 1.0);
            assert!((jacobi_p11(1, x) - 2.0 * x).abs() < 1e-15);
            assert!((jacobi_p11(2, x) - (15.0 * x * x - 3.0) / 4.0).abs() < 1e-14);
        }
        // P_n^{(1,1)}(1) = n + 1
        for n in 0..60 {
            assert!((jacobi_p11(n, 1.0) - (n + 1) as f64).abs() < 1e-10);
        }
    }

    #[test]
    fn jacobi_bounded_by_degree() {
        for n in 0..=50 {
            for i in 0..=400 {
                let x = -1.0 + 2.0 * i as f64 / 400.0;
                assert!(
                    jacobi_p11(n, x).abs() <= (n + 1) as f64 + 1e-9,
                    "n={n} x={x}"
                );
            }
        }
    }

    /// Taylor coefficients of `4/(R(1−z+R)(1+z+R))`, `R = √(1−2zx+z²)`,
    /// extracted by a discrete Cauchy integral on `|z| = r`.
    fn generating_coefficients(x: f64, count: usize) -> Vec<f64> {
        let points = 64;
        let r = 0.5;
        let c = Complex64::new(x, (1.0 - x * x).max(0.0).sqrt());
        let mut coeffs = vec![0.0; count];
        for j in 0..points {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / points as f64;
            let z = Complex64::from_polar(r, theta);
            // 1 − 2zx + z² = (1 − z e^{iφ})(1 − z e^{−iφ}); each factor stays in the right half-plane
            let big_r = (1.0 - z * c).sqrt() * (1.0 - z * c.conj()).sqrt();
            let g = 4.0 / (big_r * (1.0 - z + big_r) * (1.0 + z + big_r));
            for (n, slot) in coeffs.iter_mut().enumerate() {
                *slot += (g * Complex64::from_polar(1.0, -theta * n as f64)).re;
            }
        }
        coeffs
            .iter()
            .enumerate()
            .map(|(n, s)| s / points as f64 / r.powi(n as i32))
            .collect()
    }

    #[test]
    fn recurrence_matches_generating_function() {
        for x in [-0.9, -0.5, 0.0, 0.25, 0.8, 1.0] {
            let coeffs = generating_coefficients(x, 11);
            for (n, c) in coeffs.iter().enumerate() {
                assert!((jacobi_p11(n, x) - c).abs() < 1e-8, "n={n} x={x}: {c}");
            }
        }
    }

    #[test]
    fn eigen_values() {
        assert_eq!(eigenvalue(1).unwrap(), 0.5);
        assert!((eigenvalue(2).unwrap() - 1.0 / 6.0).abs() < 1e-16);
        assert!(eigenvalue(0).is_err());
        for k in 2..=100 {
            let q = crate::limit::quad_coeff(k).unwrap();
            assert!((q - 6.0 * eigenvalue(k).unwrap()).abs() <= 1e-15 * q);
            assert!(eigenvalue(k).unwrap() < eigenvalue(k - 1).unwrap());
        }
        let p = EigenPair::new(3).unwrap();
        assert!((p.norm_const - (7.0f64 * 4.0 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(p.eval(0.4).unwrap(), eigenfunction(3, 0.4).unwrap());
    }

    #[test]
    fn eigenfunction_values() {
        assert!((eigenfunction(1, 0.5).unwrap() - 6f64.sqrt() / 2.0).abs() < 1e-15);
        assert!((eigenfunction(1, 0.5).unwrap() - 1.224745).abs() < 1e-6);
        let (a, b) = (
            eigenfunction(3, 0.2).unwrap(),
            eigenfunction(3, 0.8).unwrap(),
        );
        assert!((a - b).abs() < 1e-14);
        let (a, b) = (
            eigenfunction(4, 0.2).unwrap(),
            eigenfunction(4, 0.8).unwrap(),
        );
        assert!((a + b).abs() < 1e-14);
        assert!(eigenfunction(2, 0.0).is_err());
        assert!(eigenfunction(2, 1.0).is_err());
    }

    #[test]
    fn gram_matrix_is_identity() {
        for k in 1..=10 {
            for l in k..=10 {
                let g = quad::integrate(
                    |t| eigenfunction(k, t).unwrap() * eigenfunction(l, t).unwrap(),
                    0.0,
                    1.0,
                    1e-13,
                )
                .unwrap();
                let expect = if k == l { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-8, "({k},{l}) = {g}");
            }
        }
    }

    #[test]
    fn kernel_values() {
        assert!((covariance_kernel(0.37, 0.37).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(
            covariance_kernel(0.3, 0.7).unwrap(),
            covariance_kernel(0.7, 0.3).unwrap()
        );
        assert!(covariance_kernel(0.0, 0.5).is_err());
        assert!(covariance_kernel(0.5, 1.2).is_err());
    }

    #[test]
    fn mercer_partial_sum() {
        let (s, t) = (0.3, 0.6);
        let sum: f64 = (1..=200)
            .map(|k| {
                eigenvalue(k).unwrap() * eigenfunction(k, s).unwrap() * eigenfunction(k, t).unwrap()
            })
            .sum();
        assert!(
            (sum - covariance_kernel(s, t).unwrap()).abs() < 0.01,
            "{sum}"
        );
    }

    /// Five-point second derivative.
    fn second_derivative(f: impl Fn(f64) -> f64, t: f64, h: f64) -> f64 {
        (-f(t + 2.0 * h) + 16.0 * f(t + h) - 30.0 * f(t) + 16.0 * f(t - h) - f(t - 2.0 * h))
            / (12.0 * h * h)
    }

    #[test]
    fn eigenfunctions_solve_boundary_value_problem() {
        for k in 1..=8 {
            let lambda = eigenvalue(k).unwrap();
            let y = |t: f64| eigenfunction(k, t).unwrap() * (t * (1.0 - t)).sqrt();
            for i in 1..20 {
                let t = i as f64 / 20.0;
                let res = second_derivative(y, t, 5e-4) + y(t) / (lambda * t * (1.0 - t));
                assert!(res.abs() < 1e-6, "k={k} t={t} residual {res}");
            }
        }
    }

    #[test]
    fn lemma_b_values() {
        assert_eq!(lemma_b_closed_form(0), 0.0);
        assert!((lemma_b_closed_form(1) - 4.0 / 3.0).abs() < 1e-15);
        assert!((lemma_b_closed_form(3) - 8.0 / 45.0).abs() < 1e-15);
        assert!((lemma_b_quadrature(1).unwrap() - 4.0 / 3.0).abs() < 1e-9);
        assert!(lemma_b_quadrature(4).unwrap().abs() < 1e-9);
        assert!((lemma_b_quadrature(7).unwrap() - lemma_b_closed_form(7)).abs() < 1e-9);
        for k in 0..=5 {
            assert!(lemma_b_quadrature(2 * k).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn lemma_a_leading_terms() {
        let c = lemma_a_check(200, 1).unwrap();
        assert!((c.leading + 0.00125).abs() < 1e-15);
        // next term: −(4/n²)∫₀¹ y² ln y dy = 4/(9n²) ≈ 1.11e−5 at n = 200
        assert!(
            (c.residual - 4.0 / (9.0 * 200.0 * 200.0)).abs() < 1e-7,
            "{c:?}"
        );
        // k = 2: n · numeric → 1/4
        let mut prev = f64::INFINITY;
        for n in [50, 100, 200, 400, 800] {
            let c = lemma_a_check(n, 2).unwrap();
            let gap = (c.numeric * n as f64 - 0.25).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 2e-3);
        assert!(lemma_a_check(1, 0).is_err());
        assert!(lemma_a_check(10, 7).is_err());
    }

    #[test]
    fn lemma_a_residual_is_second_order() {
        for k in 0..=3 {
            let res: Vec<f64> = [50, 100, 200, 400]
                .iter()
                .map(|&n| lemma_a_check(n, k).unwrap().residual)
                .collect();
            for w in res.windows(2) {
                let ratio = w[0] / w[1];
                assert!((ratio - 4.0).abs() < 0.3, "k={k} ratio {ratio}");
            }
        }
    }
}
