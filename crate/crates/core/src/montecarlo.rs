//! Seeded simulation of repeated gambles.
//!
//! The generator is xorshift64* (Vigna 2014: shifts 12, 25, 27 and
//! multiplier `0x2545F4914F6CDD1D`) seeded through splitmix64, so a seed
//! gives the same stream on every platform.
//!
//! Draws use cumulative inversion on one 64-bit variate against thresholds
//! `floor(c_i · 2^64)`, where `c_i` is the exact cumulative probability of the
//! first `i + 1` entries. Each threshold is off by less than `2^-64`.
//!
//! With several workers, worker `w` runs a contiguous block of runs with its
//! own generator seeded from [`worker_seed`]. Results are reproducible for a
//! fixed worker count; one worker is the reference.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gamble::GambleTable;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One step of splitmix64 applied to `x`.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of worker `w` for master seed `seed`.
pub fn worker_seed(seed: u64, worker: u64) -> u64 {
    splitmix64(seed ^ worker.wrapping_mul(GOLDEN_GAMMA))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Xorshift64Star {
    state: u64,
}

impl Xorshift64Star {
    pub fn new(seed: u64) -> Self {
        let state = splitmix64(seed);
        // the all-zero state is a fixed point
        Self {
            state: if state == 0 { GOLDEN_GAMMA } else { state },
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }
}

/// Inversion sampler for one gamble table.
#[derive(Debug, Clone)]
pub struct Sampler {
    outcomes: Vec<i64>,
    /// `thresholds[i] = floor(c_i · 2^64)` for every entry but the last,
    /// which takes all remaining variates.
    thresholds: Vec<u64>,
}

impl Sampler {
    pub fn new(table: &GambleTable) -> Self {
        let scale = BigInt::from(1u8) << 64;
        let mut cumulative = BigRational::zero();
        let mut thresholds = Vec::with_capacity(table.len().saturating_sub(1));
        let entries = table.entries();
        for e in &entries[..entries.len() - 1] {
            cumulative += &e.probability;
            let scaled: BigInt = cumulative.numer() * &scale;
            let t = scaled.div_floor(cumulative.denom());
            thresholds.push(t.to_u64().unwrap_or(u64::MAX));
        }
        Self {
            outcomes: entries.iter().map(|e| e.outcome).collect(),
            thresholds,
        }
    }

    pub fn draw(&self, rng: &mut Xorshift64Star) -> i64 {
        let u = rng.next_u64();
        let i = self.thresholds.partition_point(|&t| t <= u);
        self.outcomes[i]
    }
}

/// Total gain of one run of `n` plays.
pub fn simulate_run(sampler: &Sampler, n: u64, rng: &mut Xorshift64Star) -> i128 {
    (0..n).map(|_| sampler.draw(rng) as i128).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub seed: u64,
    /// plays per run
    pub n: u64,
    pub runs: u64,
    pub workers: usize,
}

impl SimConfig {
    pub fn new(seed: u64, n: u64, runs: u64) -> Self {
        Self {
            seed,
            n,
            runs,
            workers: 1,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 || self.runs == 0 || self.workers == 0 {
            return Err(Error::Domain(
                "plays per run, number of runs and workers must all be at least 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSummary {
    /// average total gain of one run
    pub mean_gain: f64,
    /// fraction of runs whose total is strictly positive
    pub win_fraction: f64,
    pub runs: u64,
    pub wins: u64,
}

/// The total of every run, in run order.
pub fn run_totals(table: &GambleTable, config: &SimConfig) -> Result<Vec<i128>> {
    config.validate()?;
    let sampler = Sampler::new(table);
    let workers = (config.workers as u64).min(config.runs);
    let block = |w: u64| {
        let start = config.runs * w / workers;
        let end = config.runs * (w + 1) / workers;
        let mut rng = Xorshift64Star::new(worker_seed(config.seed, w));
        (start..end)
            .map(|_| simulate_run(&sampler, config.n, &mut rng))
            .collect::<Vec<_>>()
    };
    if workers == 1 {
        return Ok(block(0));
    }
    let blocks: Vec<Vec<i128>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers).map(|w| s.spawn(move || block(w))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation worker panicked"))
            .collect()
    });
    Ok(blocks.concat())
}

pub fn summarize(totals: &[i128]) -> SimSummary {
    let runs = totals.len() as u64;
    let wins = totals.iter().filter(|&&t| t > 0).count() as u64;
    let sum: i128 = totals.iter().sum();
    SimSummary {
        mean_gain: sum as f64 / runs as f64,
        win_fraction: wins as f64 / runs as f64,
        runs,
        wins,
    }
}

pub fn simulate_with(table: &GambleTable, config: &SimConfig) -> Result<SimSummary> {
    Ok(summarize(&run_totals(table, config)?))
}

/// `runs` runs of `n` plays on one worker.
pub fn simulate(table: &GambleTable, n: u64, runs: u64, seed: u64) -> Result<SimSummary> {
    simulate_with(table, &SimConfig::new(seed, n, runs))
}
