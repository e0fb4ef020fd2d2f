use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::KVector;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportEntry {
    pub prob: f64,
    pub vector: KVector,
    /// Memoized `f(vector)`.
    pub value: f64,
}

/// A finitely supported distribution over partial solutions, after
/// `iteration` elements have been assigned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedSupport {
    pub entries: Vec<SupportEntry>,
    pub iteration: usize,
}

impl WeightedSupport {
    /// The point mass on the zero vector.
    pub fn initial(n: usize, zero_value: f64) -> Self {
        Self {
            entries: vec![SupportEntry {
                prob: 1.0,
                vector: KVector::zeros(n),
                value: zero_value,
            }],
            iteration: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probs(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.prob).collect()
    }

    pub fn expected_value(&self) -> f64 {
        self.entries.iter().map(|e| e.prob * e.value).sum()
    }

    /// Scales weights to sum to one.
    pub(crate) fn renormalize(&mut self) {
        let total: f64 = self.entries.iter().map(|e| e.prob).sum();
        for e in &mut self.entries {
            e.prob /= total;
        }
    }

    /// Checks the structural invariants: positive weights summing to one,
    /// every vector assigning exactly the first `iteration` elements of
    /// `order`, and pairwise distinct vectors.
    pub fn check_invariants(&self, order: &[usize]) -> Result<()> {
        if self.entries.is_empty() {
            return Err(Error::Invariant("empty support".into()));
        }
        let total: f64 = self.entries.iter().map(|e| e.prob).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Invariant(format!("support weights sum to {total}")));
        }
        if let Some(e) = self
            .entries
            .iter()
            .find(|e| e.prob.is_nan() || e.prob <= 0.0)
        {
            return Err(Error::Invariant(format!("nonpositive weight {}", e.prob)));
        }
        let (done, todo) = order.split_at(self.iteration);
        for entry in &self.entries {
            let v = &entry.vector;
            if done.iter().any(|&e| v.get(e) == 0) || todo.iter().any(|&e| v.get(e) != 0) {
                return Err(Error::Invariant(format!(
                    "vector {v} does not assign exactly the first {} elements",
                    self.iteration
                )));
            }
        }
        let mut vectors: Vec<&KVector> = self.entries.iter().map(|e| &e.vector).collect();
        vectors.sort();
        if vectors.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Invariant("duplicate vectors in support".into()));
        }
        Ok(())
    }

    /// Highest-value entry, ties broken toward the lexicographically smallest vector.
    pub fn best(&self) -> &SupportEntry {
        self.entries
            .iter()
            .reduce(|best, e| {
                if e.value > best.value || (e.value == best.value && e.vector < best.vector) {
                    e
                } else {
                    best
                }
            })
            .expect("support is nonempty")
    }
}
