//! The exact risk curve `n -> P(net gain after n repeats > 0)`.

use std::fmt;

use log::warn;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde_json::json;

use crate::error::{Error, Result};
use crate::gamble::GambleTable;
use crate::laurent::pgf;
use crate::rational::{to_decimal_string, to_fraction_string};

/// Decimal places used when rendering probabilities.
pub const DECIMAL_PLACES: usize = 10;

/// Exact probabilities for a contiguous run of repeat counts `first..=last`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbSeries {
    gamble: GambleTable,
    strict: bool,
    first: u64,
    values: Vec<BigRational>,
}

impl ProbSeries {
    pub fn new(gamble: GambleTable, strict: bool, first: u64, values: Vec<BigRational>) -> Result<Self> {
        if first == 0 {
            return Err(Error::Domain("series must start at n >= 1".into()));
        }
        let one = BigRational::one();
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.is_negative() || **v > one) {
            return Err(Error::Domain(format!(
                "probability {v} at n = {} is outside [0, 1]",
                first + i as u64
            )));
        }
        Ok(Self { gamble, strict, first, values })
    }

    pub fn gamble(&self) -> &GambleTable {
        &self.gamble
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    pub fn first(&self) -> u64 {
        self.first
    }

    /// Last covered `n`; `first - 1` when empty.
    pub fn last(&self) -> u64 {
        self.first + self.values.len() as u64 - 1
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn get(&self, n: u64) -> Option<&BigRational> {
        n.checked_sub(self.first).and_then(|i| self.values.get(i as usize))
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        (self.first..).zip(self.values.iter())
    }

    /// The prefix ending at `last` (clamped to what is available).
    pub fn truncated(&self, last: u64) -> ProbSeries {
        let keep = last.saturating_sub(self.first - 1).min(self.values.len() as u64) as usize;
        ProbSeries { values: self.values[..keep].to_vec(), ..self.clone() }
    }

    /// CSV with header `n,prob_fraction,prob_decimal`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,prob_fraction,prob_decimal\n");
        for (n, v) in self.iter() {
            out.push_str(&format!(
                "{n},{},{}\n",
                to_fraction_string(v),
                to_decimal_string(v, DECIMAL_PLACES)
            ));
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "gamble": self.gamble,
            "label": self.gamble.label(),
            "strict": self.strict,
            "values": self.iter().map(|(n, v)| json!({
                "n": n,
                "prob_fraction": to_fraction_string(v),
                "prob_decimal": to_decimal_string(v, DECIMAL_PLACES),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Probability of ending strictly ahead (`strict`) or not behind after `n`
/// independent repeats, by binary exponentiation of the generating function.
pub fn prob_pos(table: &GambleTable, n: u64, strict: bool) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::Domain("number of repeats must be at least 1".into()));
    }
    Ok(pgf(table).power(n).positive_part(strict))
}

/// The whole curve for `n = 1..=n_max` in one pass of repeated
/// multiplication by the generating function.
pub fn prob_pos_sweep(table: &GambleTable, n_max: u64, strict: bool) -> Result<ProbSeries> {
    if n_max == 0 {
        return Err(Error::Domain("sweep length must be at least 1".into()));
    }
    let mut powers = pgf(table).powers();
    let values = (1..=n_max)
        .map(|_| {
            powers.step();
            powers.positive_part(strict)
        })
        .collect();
    ProbSeries::new(table.clone(), strict, 1, values)
}

/// Evidence for a minimal repeat count: every `m` in `n..=n + window` meets
/// the threshold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepeatsCertificate {
    pub n: u64,
    pub window: u64,
    pub threshold: BigRational,
    /// Smallest probability seen inside the window, and where.
    pub window_min: BigRational,
    pub window_min_at: u64,
    pub strict: bool,
}

impl fmt::Display for RepeatsCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n = {}: P({} after m repeats) >= {} for every m in [{}, {}]; window minimum {} at m = {}",
            self.n,
            if self.strict { "gain > 0" } else { "gain >= 0" },
            to_decimal_string(&self.threshold, DECIMAL_PLACES),
            self.n,
            self.n + self.window,
            to_decimal_string(&self.window_min, DECIMAL_PLACES),
            self.window_min_at,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RepeatsAnswer {
    Found(RepeatsCertificate),
    NotFound { horizon: u64, reason: String },
}

impl RepeatsAnswer {
    pub fn n(&self) -> Option<u64> {
        match self {
            RepeatsAnswer::Found(c) => Some(c.n),
            RepeatsAnswer::NotFound { .. } => None,
        }
    }
}

/// Least `n <= horizon` such that the probability of being ahead is at least
/// `1 - epsilon` for every repeat count in `n..=n + window`.
///
/// The curve is not monotone in general (parity effects), hence the window.
/// A gamble with nonpositive mean is answered with `NotFound` without
/// searching.
pub fn min_repeats(
    table: &GambleTable,
    epsilon: &BigRational,
    strict: bool,
    window: u64,
    horizon: u64,
) -> Result<RepeatsAnswer> {
    if !epsilon.is_positive() || *epsilon >= BigRational::one() {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    if horizon == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    let mu = table.expected_value();
    if !mu.is_positive() {
        warn!("expected gain {mu} is not positive; no number of repeats can be relied on");
        return Ok(RepeatsAnswer::NotFound {
            horizon,
            reason: format!("expected gain {mu} is not positive"),
        });
    }
    let series = prob_pos_sweep(table, horizon + window, strict)?;
    Ok(min_repeats_in_series(&series, epsilon, window, horizon))
}

/// Windowed minimal-`n` search over precomputed values. Candidates whose
/// window runs past the end of `series` are not considered.
pub fn min_repeats_in_series(
    series: &ProbSeries,
    epsilon: &BigRational,
    window: u64,
    horizon: u64,
) -> RepeatsAnswer {
    let threshold = BigRational::one() - epsilon;
    let ok: Vec<bool> = series.values().iter().map(|v| *v >= threshold).collect();
    // run[i]: length of the passing run starting at index i
    let mut run = vec![0u64; ok.len() + 1];
    for i in (0..ok.len()).rev() {
        run[i] = if ok[i] { run[i + 1] + 1 } else { 0 };
    }
    let last_candidate = horizon.min(series.last().saturating_sub(window));
    for n in series.first()..=last_candidate {
        let i = (n - series.first()) as usize;
        if run[i] > window {
            let (at, min) = (n..=n + window)
                .map(|m| (m, series.get(m).expect("window inside series")))
                .min_by(|a, b| a.1.cmp(b.1))
                .expect("window is nonempty");
            return RepeatsAnswer::Found(RepeatsCertificate {
                n,
                window,
                threshold,
                window_min: min.clone(),
                window_min_at: at,
                strict: series.strict(),
            });
        }
    }
    RepeatsAnswer::NotFound {
        horizon,
        reason: format!(
            "no n <= {horizon} keeps P >= {} across a window of {window}",
            to_decimal_string(&threshold, DECIMAL_PLACES)
        ),
    }
}
