//! Exact and approximate risk curves for repeated gambles.
//!
//! A one-shot gamble is a finite table of integer outcomes with exact
//! rational probabilities. Repeating it `n` times multiplies its probability
//! generating function by itself, so the probability of ending ahead is the
//! sum of the coefficients of positive powers of `x` in `P(x)^n`.
//!
//! The crate computes that curve several ways:
//!
//! - [`exact`]: exact rational arithmetic on Laurent polynomials ([`laurent`]).
//! - [`recurrence`]: a linear recurrence with polynomial coefficients fitted
//!   to exact terms, used to extend the sequence cheaply.
//! - [`quadrature`]: a contour-integral cross-check in floating point.
//! - [`clt`]: the normal approximation for large `n`.
//! - [`montecarlo`]: seeded simulation.
//!
//! The [`cli`] module wires these into the `riskcurve` binary.

pub mod cli;
pub mod clt;
pub mod error;
pub mod exact;
pub mod gamble;
pub mod laurent;
pub mod montecarlo;
pub mod plot;
pub mod quadrature;
pub mod rational;
pub mod recurrence;

pub use error::{Error, Result};
pub use exact::{min_repeats, prob_pos, prob_pos_sweep, ProbSeries, RepeatsAnswer};
pub use gamble::{g_family_table, st_pete_table, GambleTable};
pub use laurent::{pgf, LaurentPoly};
