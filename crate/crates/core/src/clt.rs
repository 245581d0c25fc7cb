//! Normal approximation of the risk curve.
//!
//! For large `n` the total of `n` plays is roughly normal with mean `n·μ` and
//! variance `n·σ²`, so `P(total > 0) ≈ Φ(μ√n/σ)`. No continuity correction is
//! applied.
//!
//! `erf`/`erfc` are implemented here instead of taking them from the platform
//! libm so the values are identical everywhere.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::gamble::GambleTable;
use crate::rational::to_f64;

const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;
/// Below this the power series is used, above it the continued fraction.
const SERIES_LIMIT: f64 = 2.5;

/// Error function, absolute error below `1e-15` on the whole real line.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let a = x.abs();
    let v = if a == f64::INFINITY {
        1.0
    } else if a < SERIES_LIMIT {
        erf_series(a)
    } else {
        1.0 - erfc_continued_fraction(a)
    };
    v.copysign(x)
}

/// Complementary error function `1 - erf(x)`, accurate in relative terms for
/// large positive `x`.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        2.0 - erfc(-x)
    } else if x < SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

/// `erf(x) = 2/√π · e^{-x²} · Σ 2^k x^{2k+1} / (1·3·5···(2k+1))`.
///
/// Every term is positive, so there is no cancellation.
fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= 2.0 * x2 / (2.0 * k + 1.0);
        sum += term;
        if term <= sum * 1e-17 {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// `erfc(x) = e^{-x²}/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz method. Valid for `x > 0`, fast for
/// `x ≳ 2`.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (f * std::f64::consts::PI.sqrt())
}

/// Standard normal distribution function.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Inverse of [`normal_cdf`] by bisection; `p` must lie in `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain(format!("quantile level {p} is not in (0,1)")));
    }
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mean and variance of a gamble.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CltParams {
    pub mu: BigRational,
    pub sigma2: BigRational,
}

impl CltParams {
    pub fn from_table(table: &GambleTable) -> Self {
        Self {
            mu: table.expected_value(),
            sigma2: table.variance(),
        }
    }

    pub fn mu_f64(&self) -> f64 {
        to_f64(&self.mu)
    }

    pub fn sigma_f64(&self) -> f64 {
        to_f64(&self.sigma2).sqrt()
    }

    /// `μ√n/σ`; fails when the variance is zero.
    pub fn z_score(&self, n: u64) -> Result<f64> {
        if self.sigma2.is_zero() {
            return Err(Error::Domain(
                "variance is zero: the gamble is deterministic, so the normal approximation does not apply"
                    .into(),
            ));
        }
        Ok(self.mu_f64() * (n as f64).sqrt() / self.sigma_f64())
    }

    pub fn prob_pos(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::Domain("number of repeats must be at least 1".into()));
        }
        Ok(normal_cdf(self.z_score(n)?))
    }
}

/// Normal approximation `Φ(μ√n/σ)` to the probability of ending ahead.
pub fn prob_pos_clt(table: &GambleTable, n: u64) -> Result<f64> {
    CltParams::from_table(table).prob_pos(n)
}

/// [`prob_pos_clt`] for `n = 1..=n_max`.
pub fn prob_pos_clt_sweep(table: &GambleTable, n_max: u64) -> Result<Vec<f64>> {
    let params = CltParams::from_table(table);
    (1..=n_max).map(|n| params.prob_pos(n)).collect()
}

/// Smallest `n` with `Φ(μ√n/σ) ≥ 1 − ε`.
///
/// Starts from the closed form `ceil((σ/μ)² z²)` and then nudges `n` so the
/// answer re-verifies against [`CltParams::prob_pos`] exactly as computed.
pub fn min_repeats_clt(table: &GambleTable, epsilon: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} is not in (0,1)")));
    }
    let params = CltParams::from_table(table);
    if !params.mu.is_positive() {
        return Err(Error::Domain(format!(
            "expected gain {} is not positive: no number of repeats makes this gamble safe",
            params.mu
        )));
    }
    if params.sigma2.is_zero() {
        return Ok(1);
    }
    let target = 1.0 - epsilon;
    let z = normal_quantile(target)?;
    let ratio = params.sigma_f64() / params.mu_f64();
    let guess = (ratio * ratio * z * z).ceil();
    if !(guess < 1e18) {
        return Err(Error::NumericalFailure(format!(
            "required number of repeats {guess:e} is out of range"
        )));
    }
    let mut n = (guess as u64).max(1);
    while n > 1 && params.prob_pos(n - 1)? >= target {
        n -= 1;
    }
    while params.prob_pos(n)? < target {
        n += 1;
    }
    Ok(n)
}
