//! Greedy algorithms for monotone k-submodular maximization and the exact
//! tools used to check them.

mod brute;
mod certificate;
mod deterministic;
mod expectation;
mod randomized;
mod support;

pub use brute::{brute_force_opt, complete_to_total, DEFAULT_BRUTE_BUDGET};
pub use certificate::{certificate_check, telescoped_bound, CertificateMargins};
pub use deterministic::{deterministic_greedy, DeterministicRun, StepRecord};
pub use expectation::{exact_expectation, Expectation, DEFAULT_EXPECTATION_BUDGET};
pub use randomized::randomized_greedy;
pub use support::{SupportEntry, WeightedSupport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::KVector;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    /// Visiting order as ground-set positions; input order when `None`.
    pub element_order: Option<Vec<usize>>,
    /// Required by the randomized greedy, ignored by the deterministic one.
    pub seed: Option<u64>,
    /// Keep every LP and support in [`DeterministicRun::steps`].
    #[serde(default)]
    pub keep_steps: bool,
    /// When set, each deterministic iteration is replayed against this
    /// (total) optimum and the minimum certificate margin is traced.
    #[serde(default)]
    pub certify_against: Option<KVector>,
}

impl AlgorithmConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed: Some(seed),
            ..Self::default()
        }
    }

    /// The constant `c = 1 - 1/k` in the per-step inequality.
    pub fn ratio_parameter(k: u32) -> f64 {
        1.0 - 1.0 / k as f64
    }

    /// The exponent `t = k - 1` of the randomized greedy's distribution.
    pub fn exponent(k: u32) -> i32 {
        k as i32 - 1
    }

    pub fn resolve_order(&self, n: usize) -> Result<Vec<usize>> {
        match &self.element_order {
            None => Ok((0..n).collect()),
            Some(order) => {
                let mut seen = vec![false; n];
                if order.len() != n {
                    return Err(Error::Validation(format!(
                        "element order has {} entries, expected {n}",
                        order.len()
                    )));
                }
                for &e in order {
                    if e >= n || std::mem::replace(&mut seen[e], true) {
                        return Err(Error::Validation(format!(
                            "element order is not a permutation (bad entry {e})"
                        )));
                    }
                }
                Ok(order.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub j: usize,
    pub support: usize,
    /// Oracle queries spent in this iteration.
    pub queries: u64,
    pub lp_residual: Option<f64>,
    pub min_certificate_margin: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: String,
    pub solution: KVector,
    pub value: f64,
    pub total_queries: u64,
    pub trace: Vec<TraceRecord>,
}

impl RunReport {
    /// Largest support size seen over the run.
    pub fn support_max(&self) -> usize {
        self.trace.iter().map(|t| t.support).max().unwrap_or(1)
    }

    pub fn min_certificate_margin(&self) -> Option<f64> {
        self.trace
            .iter()
            .filter_map(|t| t.min_certificate_margin)
            .reduce(f64::min)
            .map(|m| m + 0.0)
    }

    /// Trace as JSON lines, one record per iteration.
    pub fn trace_jsonl(&self) -> String {
        self.trace
            .iter()
            .map(|t| serde_json::to_string(t).expect("trace serializes") + "\n")
            .collect()
    }
}

/// `Σ_{j=1}^{n} k (jk + 1) = k (k n(n+1)/2 + n)`: the oracle-query bound for
/// the deterministic greedy.
pub fn query_bound(n: usize, k: u32) -> u64 {
    let (n, k) = (n as u64, k as u64);
    k * (k * n * (n + 1) / 2 + n)
}

/// `jk + 1`: the largest support the deterministic greedy may hold after `j` steps.
pub fn support_bound(j: usize, k: u32) -> usize {
    j * k as usize + 1
}
