//! Feature selection by valuing each candidate regressor as a player in a
//! coalitional game.
//!
//! Each candidate feature is valued by its expected marginal effect on a
//! model-performance payoff under the unique non-informative prior that
//! matches the expected payoff with the sum of individual valuations.
//! Features whose valuation is not significantly different from zero are
//! dropped; the rest are accepted sequentially.
//!
//! Module layout:
//! - [`game`]: coalition bitmasks, the matched prior, exact enumeration-based
//!   valuations, and numerical verifiers for the three underlying identities.
//! - [`linmodel`]: OLS fitting and the five regression payoff functions.
//! - [`mc`]: Monte Carlo estimation of valuations via random orderings and
//!   the zero-mean z-test.
//! - [`selector`]: sequential acceptance of significant features.
//! - [`simlab`]: synthetic data generation, baseline selectors, and the
//!   discrepancy study harness.

pub mod game;
pub mod linmodel;
pub mod mc;
pub mod selector;
pub mod simlab;

mod error;
mod seed;

pub use error::{Error, Result};
pub use seed::mix_seed;
