//! Floating-point constants of the second-moment asymptotics.
//!
//! Conditionally convergent character sums `sum chi(n) f(n)` are evaluated by
//! period-block averaging: the partial sums are averaged over one full period
//! of `chi`, which cancels the leading oscillation of the tail.

use std::f64::consts::PI;

use serde::Serialize;

use crate::arith::{factorize, kronecker};
use crate::coeffs::unit_count;
use crate::quadforms::{scope_discriminant, ClassGroup};
use crate::{Error, Result};

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Term cap for the block-averaged series.
pub const MAX_SERIES_TERMS: u64 = 100_000_000;

/// Stop once successive block estimates differ by less than this.
pub const SERIES_TOLERANCE: f64 = 1e-11;

/// A series value with its convergence status.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesEstimate {
    pub value: f64,
    pub terms: u64,
    pub converged: bool,
}

/// Block-averaged value of `sum_{n >= 1} chi_d(n) f(n)` for a character of period `|d|`.
pub fn character_series(
    d: i64,
    f: impl Fn(f64) -> f64,
    tolerance: f64,
    max_terms: u64,
) -> SeriesEstimate {
    let q = d.unsigned_abs();
    let chi: Vec<f64> = (0..q).map(|r| kronecker(d, r as i64) as f64).collect();
    let mut partial = 0.0f64;
    let mut n = 0u64;
    let mut previous: Option<f64> = None;
    let mut periods = 0u64;
    let mut checkpoint = 16u64;
    loop {
        // one full period, accumulating the mean of the partial sums
        let mut mean = 0.0f64;
        for _ in 0..q {
            n += 1;
            let c = chi[(n % q) as usize];
            if c != 0.0 {
                partial += c * f(n as f64);
            }
            mean += partial;
        }
        periods += 1;
        if periods == checkpoint {
            let estimate = mean / q as f64;
            if let Some(p) = previous {
                if (estimate - p).abs() < tolerance {
                    return SeriesEstimate {
                        value: estimate,
                        terms: n,
                        converged: true,
                    };
                }
            }
            if n + checkpoint * q > max_terms {
                return SeriesEstimate {
                    value: estimate,
                    terms: n,
                    converged: false,
                };
            }
            previous = Some(estimate);
            checkpoint *= 2;
        }
    }
}

/// `L(1, chi_D) = 2 pi h / (w sqrt|D|)`.
pub fn l1_formula(d: i64, h: usize, w: u32) -> f64 {
    2.0 * PI * h as f64 / (w as f64 * (d.unsigned_abs() as f64).sqrt())
}

/// `L(1, chi_D)` summed directly.
pub fn l1_series(d: i64) -> SeriesEstimate {
    character_series(d, |n| 1.0 / n, SERIES_TOLERANCE, MAX_SERIES_TERMS)
}

/// Both evaluations of `L(1, chi_D)` for a negative fundamental discriminant.
pub fn l1(d: i64) -> Result<(f64, f64)> {
    let group = ClassGroup::new(d)?;
    let w = unit_count(d)?;
    Ok((l1_formula(d, group.h(), w), l1_series(d).value))
}

/// `zeta'(2) = -sum log n / n^2` by Euler-Maclaurin.
pub fn zeta_prime_2() -> f64 {
    const CUT: u64 = 64;
    // B_{2j} / (2j)!
    const BERNOULLI: [f64; 6] = [
        1.0 / 6.0 / 2.0,
        -1.0 / 30.0 / 24.0,
        1.0 / 42.0 / 720.0,
        -1.0 / 30.0 / 40_320.0,
        5.0 / 66.0 / 3_628_800.0,
        -691.0 / 2730.0 / 479_001_600.0,
    ];
    let head: f64 = (2..CUT).map(|n| (n as f64).ln() / (n * n) as f64).sum();
    let x = CUT as f64;
    let lx = x.ln();
    // f^(k)(x) = x^{-2-k} (c_k log x + d_k)
    let (mut c, mut d) = (1.0f64, 0.0f64);
    let mut derivs = Vec::new();
    for k in 0..12 {
        derivs.push(x.powi(-2 - k) * (c * lx + d));
        let m = (2 + k) as f64;
        (c, d) = (-m * c, c - m * d);
    }
    let mut tail = (lx + 1.0) / x + derivs[0] / 2.0;
    for (j, b) in BERNOULLI.iter().enumerate() {
        tail -= b * derivs[2 * j + 1];
    }
    -(head + tail)
}

/// `L'(1, chi_D) / L(1, chi_D)`, with `L'(1) = -sum chi(n) log n / n`.
pub fn lprime_over_l(d: i64) -> Result<SeriesEstimate> {
    let (l1, _) = l1(d)?;
    let lp = character_series(d, |n| -n.ln() / n, SERIES_TOLERANCE, MAX_SERIES_TERMS);
    Ok(SeriesEstimate {
        value: lp.value / l1,
        ..lp
    })
}

fn primes_of_2n(n: u64) -> Result<Vec<u64>> {
    Ok(factorize(2 * n)?.primes().collect())
}

/// `sum_{p | 2N} log p / (p + 1)`.
pub fn prime_log_sum(n: u64) -> Result<f64> {
    Ok(primes_of_2n(n)?
        .into_iter()
        .map(|p| (p as f64).ln() / (p + 1) as f64)
        .sum())
}

/// `alpha(N) = -1 + 2 gamma + sum_{p | 2N} log p/(p+1) + 2 L'/L(1, chi_{-4N}) - (12/pi^2) zeta'(2)`.
pub fn alpha_n(n: u64) -> Result<f64> {
    let d = scope_discriminant(n)?;
    Ok(assemble_alpha(
        prime_log_sum(n)?,
        lprime_over_l(d)?.value,
        zeta_prime_2(),
    ))
}

fn assemble_alpha(prime_sum: f64, lpl: f64, zp2: f64) -> f64 {
    -1.0 + 2.0 * EULER_GAMMA + prime_sum + 2.0 * lpl - 12.0 / (PI * PI) * zp2
}

/// `A_1 = (6/pi^2) L(1, chi_{-4N})^2 prod_{p | 2N} p/(p+1)`.
pub fn a1(n: u64) -> Result<f64> {
    let d = scope_discriminant(n)?;
    let group = ClassGroup::new(d)?;
    a1_from(n, l1_formula(d, group.h(), unit_count(d)?))
}

fn a1_from(n: u64, l1: f64) -> Result<f64> {
    let local: f64 = primes_of_2n(n)?
        .into_iter()
        .map(|p| p as f64 / (p + 1) as f64)
        .product();
    Ok(6.0 / (PI * PI) * l1 * l1 * local)
}

/// `(A_1, B_1 = A_1 alpha(N))`.
pub fn a1_b1(n: u64) -> Result<(f64, f64)> {
    let a = a1(n)?;
    Ok((a, a * alpha_n(n)?))
}

/// `(3/N) prod_{p | 2N} 2p/(p+1)`.
pub fn second_moment_constant(n: u64) -> Result<f64> {
    scope_discriminant(n)?;
    let local: f64 = primes_of_2n(n)?
        .into_iter()
        .map(|p| 2.0 * p as f64 / (p + 1) as f64)
        .product();
    Ok(3.0 / n as f64 * local)
}

/// `second_moment_constant(N) = (w^2/h^2) 2^(k-1) A_1(N)` to `1e-9` relative.
pub fn constant_consistency(n: u64) -> Result<bool> {
    let group = ClassGroup::for_n(n)?;
    let w = unit_count(group.discriminant())? as f64;
    let h = group.h() as f64;
    let lhs = second_moment_constant(n)?;
    let rhs = w * w / (h * h) * group.genus_count() as f64 * a1(n)?;
    Ok(((lhs - rhs) / lhs).abs() <= 1e-9)
}

/// Every constant attached to `N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub n: u64,
    pub discriminant: i64,
    pub h: usize,
    pub w: u32,
    pub k: usize,
    /// `2 pi h / (w sqrt|D|)`.
    pub l1_formula: f64,
    /// Block-averaged `sum chi(n)/n`.
    pub l1_series: f64,
    /// `h pi / sqrt N`, which differs from the two values above by the unit factor.
    pub l1_h_pi_over_sqrt_n: f64,
    pub gamma: f64,
    pub zeta_prime_2: f64,
    pub lprime_over_l: f64,
    pub lprime_converged: bool,
    pub alpha: f64,
    pub a1: f64,
    pub b1: f64,
    pub second_moment_constant: f64,
    pub consistent: bool,
}

impl ConstantsReport {
    pub fn new(n: u64) -> Result<Self> {
        let group = ClassGroup::for_n(n)?;
        let d = group.discriminant();
        let w = unit_count(d)?;
        let h = group.h();
        let l1f = l1_formula(d, h, w);
        let l1s = l1_series(d);
        if !l1s.converged {
            return Err(Error::Invariant(format!(
                "L(1, chi_{d}) series did not converge"
            )));
        }
        let lpl = lprime_over_l(d)?;
        let zp2 = zeta_prime_2();
        let alpha = assemble_alpha(prime_log_sum(n)?, lpl.value, zp2);
        let a1 = a1_from(n, l1f)?;
        Ok(ConstantsReport {
            n,
            discriminant: d,
            h,
            w,
            k: group.k(),
            l1_formula: l1f,
            l1_series: l1s.value,
            l1_h_pi_over_sqrt_n: h as f64 * PI / (n as f64).sqrt(),
            gamma: EULER_GAMMA,
            zeta_prime_2: zp2,
            lprime_over_l: lpl.value,
            lprime_converged: lpl.converged,
            alpha,
            a1,
            b1: a1 * alpha,
            second_moment_constant: second_moment_constant(n)?,
            consistent: constant_consistency(n)?,
        })
    }
}
