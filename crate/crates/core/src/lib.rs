//! Maximization of monotone k-submodular functions in the value-oracle model.
//!
//! Two algorithms reach the `k/(2k-1)` guarantee:
//!
//! * [`algorithms::randomized_greedy`] assigns each element to a random part
//!   with probability proportional to `(marginal gain)^(k-1)`;
//! * [`algorithms::deterministic_greedy`] removes the randomness by carrying a
//!   small distribution over partial solutions, re-weighted at every element
//!   through a vertex of a feasibility LP ([`lp`]).
//!
//! The [`properties`] checkers, [`algorithms::brute_force_opt`] and
//! [`algorithms::exact_expectation`] verify instances and guarantees
//! exhaustively at small sizes.

pub mod algorithms;
pub mod error;
pub mod exact;
pub mod instances;
pub mod lattice;
pub mod lp;
pub mod oracle;
pub mod properties;

pub use error::{Error, Result};
pub use lattice::{GroundSet, KVector};
pub use oracle::{CountingOracle, TableOracle, ValueOracle};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
