//! Growth-rate, exponent and constant estimates from exact coefficients.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::branch::branch_point;
use super::{Result, SolveError};
use crate::gfsystem::{assemble_with, AssembleOptions};

/// Fewest coefficients accepted by [`ratio_estimate`].
pub const MIN_TERMS: usize = 10;
/// Richardson order used by default.
pub const DEFAULT_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEstimate {
    /// Extrapolated limit of `a_n / a_{n-1}`.
    pub inverse_rho: f64,
    pub rho: f64,
    /// Estimated `alpha` in `a_n ~ c n^alpha rho^-n`.
    pub exponent: f64,
}

fn binom_rat(n: usize, k: usize) -> BigRational {
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    BigRational::from_integer(r)
}

/// Richardson extrapolation of order `p` for a sequence with an expansion
/// in powers of `1/n`, using its last `p + 1` terms. `seq[i]` is the term at `n = first + i`.
pub fn richardson(seq: &[BigRational], first: usize, p: usize) -> BigRational {
    let len = seq.len();
    assert!(len > p, "need more than p terms");
    let n0 = first + len - 1 - p;
    let mut acc = BigRational::zero();
    let mut fact = BigInt::one();
    for i in 1..=p {
        fact *= i;
    }
    for j in 0..=p {
        let n = BigRational::from_integer((n0 + j).into());
        let mut term = &seq[len - 1 - p + j] * num_traits::pow(n, p) * binom_rat(p, j);
        if (p + j) % 2 == 1 {
            term = -term;
        }
        acc += term;
    }
    acc / BigRational::from_integer(fact)
}

/// Same as [`richardson`] in floating point.
pub fn richardson_f64(seq: &[f64], first: usize, p: usize) -> f64 {
    let len = seq.len();
    assert!(len > p, "need more than p terms");
    let n0 = first + len - 1 - p;
    let mut acc = 0.0;
    let mut fact = 1.0;
    for i in 1..=p {
        fact *= i as f64;
    }
    let mut binom = 1.0;
    for j in 0..=p {
        if j > 0 {
            binom = binom * (p + 1 - j) as f64 / j as f64;
        }
        let sign = if (p + j) % 2 == 1 { -1.0 } else { 1.0 };
        acc += sign * seq[len - 1 - p + j] * ((n0 + j) as f64).powi(p as i32) * binom;
    }
    acc / fact
}

/// Position of the first nonzero coefficient, after checking there are enough
/// nonzero terms from there on.
fn support(coeffs: &[BigRational]) -> Result<usize> {
    let first = coeffs
        .iter()
        .position(|c| !c.is_zero())
        .ok_or(SolveError::TooFewTerms(0))?;
    if let Some(z) = coeffs[first..].iter().position(|c| c.is_zero()) {
        return Err(SolveError::ZeroCoefficient(first + z));
    }
    let len = coeffs.len() - first;
    if len < MIN_TERMS {
        return Err(SolveError::TooFewTerms(len));
    }
    if coeffs[first..].iter().any(|c| c.is_negative()) {
        return Err(SolveError::BadArgs("coefficients must be positive".into()));
    }
    Ok(first)
}

/// Ratio-method estimate from `coeffs[n] = a_n`, with Richardson order [`DEFAULT_ORDER`].
pub fn ratio_estimate(coeffs: &[BigRational]) -> Result<RatioEstimate> {
    ratio_estimate_with(coeffs, DEFAULT_ORDER)
}

pub fn ratio_estimate_with(coeffs: &[BigRational], order: usize) -> Result<RatioEstimate> {
    let first = support(coeffs)?;
    // r_n = a_n / a_{n-1} for n = first+1 ..
    let ratios: Vec<BigRational> = (first + 1..coeffs.len())
        .map(|n| &coeffs[n] / &coeffs[n - 1])
        .collect();
    // b_n = n (n - 1) (r_{n-1} - r_n) -> alpha / rho for n = first+2 ..
    let slopes: Vec<BigRational> = (1..ratios.len())
        .map(|i| {
            let n = first + 1 + i;
            let w = BigRational::from_integer((n * (n - 1)).into());
            (&ratios[i - 1] - &ratios[i]) * w
        })
        .collect();
    let p = order.min(slopes.len() - 1);
    let a = richardson(&ratios, first + 1, p);
    let b = richardson(&slopes, first + 2, p);
    let inverse_rho = a.to_f64().unwrap_or(f64::NAN);
    let exponent = (&b / &a).to_f64().unwrap_or(f64::NAN);
    Ok(RatioEstimate {
        inverse_rho,
        rho: 1.0 / inverse_rho,
        exponent,
    })
}

/// Natural logarithm of a positive big integer.
fn ln_bigint(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let top: BigInt = x >> shift;
    top.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_ratio(x: &BigRational) -> f64 {
    ln_bigint(x.numer()) - ln_bigint(x.denom())
}

/// Extrapolated limit of `a_n n^{-alpha} rho^n`, i.e. the constant `c` in
/// `a_n ~ c n^alpha rho^-n`.
pub fn constant_estimate(coeffs: &[BigRational], rho: f64, alpha: f64) -> Result<f64> {
    constant_estimate_with(coeffs, rho, alpha, 3)
}

pub fn constant_estimate_with(
    coeffs: &[BigRational],
    rho: f64,
    alpha: f64,
    order: usize,
) -> Result<f64> {
    let first = support(coeffs)?;
    let ln_rho = rho.ln();
    let seq: Vec<f64> = (first..coeffs.len())
        .map(|n| (ln_ratio(&coeffs[n]) - alpha * (n as f64).ln() + n as f64 * ln_rho).exp())
        .collect();
    Ok(richardson_f64(&seq, first, order.min(seq.len() - 1)))
}

/// `a_n = count(t, k, n) / n!` for `n = 0..=n_max`, with `a_0 = 0`.
pub fn class_coefficients(t: usize, k: usize, n_max: u32) -> Result<Vec<BigRational>> {
    let sys = assemble_with(t, n_max, &AssembleOptions::counting_only())?;
    let g = sys.g(k);
    Ok((0..=n_max)
        .map(|n| {
            if n == 0 {
                BigRational::zero()
            } else {
                g.coeff_at_ones(n)
            }
        })
        .collect())
}

/// Constant `c_{t,k}` in `count / n! ~ c n^{-5/2} rho^-n` from `n_max` exact
/// coefficients and the solved branch point.
pub fn growth_constant(t: usize, k: usize, n_max: u32, prec: f64) -> Result<f64> {
    let coeffs = class_coefficients(t, k, n_max)?;
    let bp = branch_point(t, k, prec)?;
    constant_estimate(&coeffs, bp.rho, -2.5)
}
