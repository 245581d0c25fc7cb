//! One-shot gamble tables.
//!
//! A [`GambleTable`] is an ordered list of `(outcome, probability)` entries
//! with integer outcomes and exact rational probabilities summing to one.
//! Duplicate outcomes are kept as separate entries so that printed tables
//! keep the shape of the builder that produced them; [`GambleTable::normalized`]
//! merges them when a canonical form is wanted.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{lcm_of_denominators, parse_rational, to_fraction_string};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub outcome: i64,
    pub probability: BigRational,
}

/// A validated probability table. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GambleTable {
    entries: Vec<Entry>,
    label: Option<String>,
}

impl GambleTable {
    /// Validates and builds a table. Every probability must lie in `(0, 1]`
    /// and the probabilities must sum to exactly one.
    pub fn new(entries: impl IntoIterator<Item = (i64, BigRational)>) -> Result<Self> {
        let entries: Vec<Entry> = entries
            .into_iter()
            .map(|(outcome, probability)| Entry { outcome, probability })
            .collect();
        if entries.is_empty() {
            return Err(Error::InvalidTable("table has no entries".into()));
        }
        let one = BigRational::one();
        for e in &entries {
            if !e.probability.is_positive() || e.probability > one {
                return Err(Error::InvalidTable(format!(
                    "probability {} for outcome {} is not in (0, 1]",
                    e.probability, e.outcome
                )));
            }
        }
        let total: BigRational = entries.iter().map(|e| &e.probability).sum();
        if total != one {
            return Err(Error::InvalidTable(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { entries, label: None })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_outcome(&self) -> i64 {
        self.entries.iter().map(|e| e.outcome).min().unwrap_or(0)
    }

    pub fn max_outcome(&self) -> i64 {
        self.entries.iter().map(|e| e.outcome).max().unwrap_or(0)
    }

    /// Sum of `p_i * M_i`.
    pub fn expected_value(&self) -> BigRational {
        self.entries
            .iter()
            .map(|e| &e.probability * BigInt::from(e.outcome))
            .sum()
    }

    /// Sum of `p_i * (M_i - mu)^2`.
    pub fn variance(&self) -> BigRational {
        let mu = self.expected_value();
        self.entries
            .iter()
            .map(|e| {
                let d = BigRational::from_integer(e.outcome.into()) - &mu;
                &e.probability * &d * &d
            })
            .sum()
    }

    /// Probability that a single play ends strictly ahead (`strict`) or at
    /// least even.
    pub fn shot_win_probability(&self, strict: bool) -> BigRational {
        self.entries
            .iter()
            .filter(|e| if strict { e.outcome > 0 } else { e.outcome >= 0 })
            .map(|e| e.probability.clone())
            .sum()
    }

    /// Merges duplicate outcomes and sorts by outcome.
    pub fn normalized(&self) -> GambleTable {
        let mut merged: BTreeMap<i64, BigRational> = BTreeMap::new();
        for e in &self.entries {
            *merged.entry(e.outcome).or_insert_with(BigRational::zero) += &e.probability;
        }
        GambleTable {
            entries: merged
                .into_iter()
                .map(|(outcome, probability)| Entry { outcome, probability })
                .collect(),
            label: self.label.clone(),
        }
    }

    /// Least common multiple of the probability denominators.
    pub fn common_denominator(&self) -> BigInt {
        lcm_of_denominators(self.entries.iter().map(|e| &e.probability))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serialization cannot fail")
    }
}

/// Bracketed list form, e.g. `[[-1, 9/10], [10, 1/10]]`.
impl fmt::Display for GambleTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{}, {}]", e.outcome, e.probability)?;
        }
        f.write_str("]")
    }
}

impl Serialize for GambleTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<(i64, String)> = self
            .entries
            .iter()
            .map(|e| (e.outcome, to_fraction_string(&e.probability)))
            .collect();
        pairs.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GambleTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<(i64, String)>::deserialize(deserializer)?;
        let entries = pairs
            .into_iter()
            .map(|(o, p)| parse_rational(&p).map(|p| (o, p)))
            .collect::<Result<Vec<_>>>()
            .map_err(D::Error::custom)?;
        GambleTable::new(entries).map_err(D::Error::custom)
    }
}

/// The finite St. Petersburg game with `k` rounds and an entrance fee.
///
/// Entry `i` (1-based, `i <= k`) pays `2^i - fee` with probability `2^-i`;
/// surviving all `k` rounds pays `2^k - fee` again with probability `2^-k`,
/// kept as its own entry.
pub fn st_pete_table(k: i64, fee: i64) -> Result<GambleTable> {
    if k < 1 {
        return Err(Error::Domain(format!("rounds must be at least 1, got {k}")));
    }
    if k > 62 {
        return Err(Error::Domain(format!("rounds must be at most 62, got {k}")));
    }
    let overflow = || Error::Domain(format!("outcome 2^{k} - {fee} overflows i64"));
    let mut entries = Vec::with_capacity(k as usize + 1);
    for i in 1..=k {
        let prize = 1i64 << i;
        let outcome = prize.checked_sub(fee).ok_or_else(overflow)?;
        entries.push((outcome, BigRational::new(BigInt::one(), prize.into())));
    }
    let last = entries.last().cloned().expect("k >= 1");
    entries.push(last);
    Ok(GambleTable::new(entries)?.with_label(format!("stpete:{k},{fee}")))
}

/// Loses 1 with probability `(i-1)/i`, wins `i` with probability `1/i`.
pub fn g_family_table(i: i64) -> Result<GambleTable> {
    if i < 2 {
        return Err(Error::Domain(format!("g-family index must be at least 2, got {i}")));
    }
    let den = BigInt::from(i);
    Ok(GambleTable::new([
        (-1, BigRational::new(BigInt::from(i - 1), den.clone())),
        (i, BigRational::new(BigInt::one(), den)),
    ])?
    .with_label(format!("gfamily:{i}")))
}
