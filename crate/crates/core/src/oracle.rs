//! Value oracles, marginal gains, and the query-counting wrapper.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{check_budget, Error, Result};
use crate::lattice::{all_vectors, KVector};

/// Black-box access to `f : {0..k}^V -> R`.
///
/// Implementations must be pure: the same vector always yields the same value.
pub trait ValueOracle: Sync {
    fn n(&self) -> usize;
    fn k(&self) -> u32;
    fn evaluate(&self, x: &KVector) -> f64;
}

impl<T: ValueOracle + ?Sized> ValueOracle for &T {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn k(&self) -> u32 {
        (**self).k()
    }
    fn evaluate(&self, x: &KVector) -> f64 {
        (**self).evaluate(x)
    }
}

impl<T: ValueOracle + ?Sized> ValueOracle for Box<T> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn k(&self) -> u32 {
        (**self).k()
    }
    fn evaluate(&self, x: &KVector) -> f64 {
        (**self).evaluate(x)
    }
}

fn check_unassigned(x: &KVector, e: usize, part: u32, k: u32) -> Result<()> {
    if e >= x.len() {
        return Err(Error::DimensionMismatch {
            left: e + 1,
            right: x.len(),
        });
    }
    if part == 0 || part > k {
        return Err(Error::InvalidPart { part, k });
    }
    if x.get(e) != 0 {
        return Err(Error::AlreadyAssigned {
            element: e,
            part: x.get(e),
        });
    }
    Ok(())
}

/// `Δ_{e,i} f(x) = f(x with e set to i) - f(x)`. Two oracle queries.
pub fn marginal_gain<F: ValueOracle + ?Sized>(
    f: &F,
    x: &KVector,
    e: usize,
    part: u32,
) -> Result<f64> {
    check_unassigned(x, e, part, f.k())?;
    Ok(f.evaluate(&x.with(e, part)) - f.evaluate(x))
}

/// The gains `Δ_{e,i} f(x)` for every part `i = 1..=k`, indexed from zero.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalProfile {
    pub gains: Vec<f64>,
    /// `f(x with e set to i)` for each part, kept so callers need not re-query.
    pub extended_values: Vec<f64>,
}

impl MarginalProfile {
    /// Computes all `k` gains at `x`. With `base = Some(f(x))` this costs
    /// exactly `k` queries; otherwise `k + 1`.
    pub fn at<F: ValueOracle + ?Sized>(
        f: &F,
        x: &KVector,
        e: usize,
        base: Option<f64>,
    ) -> Result<Self> {
        let k = f.k();
        check_unassigned(x, e, 1, k)?;
        let base = base.unwrap_or_else(|| f.evaluate(x));
        let extended_values: Vec<f64> = (1..=k).map(|i| f.evaluate(&x.with(e, i))).collect();
        let gains = extended_values.iter().map(|v| v - base).collect();
        Ok(Self {
            gains,
            extended_values,
        })
    }

    pub fn is_nonnegative(&self) -> bool {
        self.gains.iter().all(|&g| g >= 0.0)
    }

    /// Smallest `gains[i] + gains[j]` over `i != j`, or `None` when `k = 1`.
    pub fn min_pair_sum(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.gains.len() {
            for j in (i + 1)..self.gains.len() {
                let s = self.gains[i] + self.gains[j];
                best = Some(best.map_or(s, |b: f64| b.min(s)));
            }
        }
        best
    }
}

/// Wraps an oracle and counts every evaluation.
#[derive(Debug)]
pub struct CountingOracle<O> {
    inner: O,
    queries: AtomicU64,
}

impl<O: ValueOracle> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            queries: AtomicU64::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.queries.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.queries.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: ValueOracle> ValueOracle for CountingOracle<O> {
    fn n(&self) -> usize {
        self.inner.n()
    }
    fn k(&self) -> u32 {
        self.inner.k()
    }
    fn evaluate(&self, x: &KVector) -> f64 {
        self.queries.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(x)
    }
}

/// Default budget for exhaustive enumeration over `{0..k}^V`.
pub const DEFAULT_TABLE_BUDGET: u128 = 100_000_000;

/// A fully tabulated oracle. Entry order is lexicographic in the vector, so
/// `index(x)` reads `x` as a base-`(k+1)` numeral with position 0 most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct TableOracle {
    n: usize,
    k: u32,
    values: Vec<f64>,
}

impl TableOracle {
    pub fn from_values(n: usize, k: u32, values: Vec<f64>) -> Result<Self> {
        let expected = check_budget(k as usize + 1, n, DEFAULT_TABLE_BUDGET)?;
        if values.len() as u128 != expected {
            return Err(Error::Validation(format!(
                "table has {} entries, expected {expected}",
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Validation(format!("table value {v} is not finite")));
        }
        Ok(Self { n, k, values })
    }

    /// Evaluates `f` on every vector. Refuses when `(k+1)^n` exceeds `budget`.
    pub fn tabulate<F: ValueOracle + ?Sized>(f: &F, budget: u128) -> Result<Self> {
        check_budget(f.k() as usize + 1, f.n(), budget)?;
        let values = all_vectors(f.n(), f.k()).map(|x| f.evaluate(&x)).collect();
        Ok(Self {
            n: f.n(),
            k: f.k(),
            values,
        })
    }

    pub fn index(&self, x: &KVector) -> usize {
        let base = self.k as usize + 1;
        x.as_slice()
            .iter()
            .fold(0usize, |acc, &v| acc * base + v as usize)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn set(&mut self, x: &KVector, value: f64) {
        let idx = self.index(x);
        self.values[idx] = value;
    }

    /// True when every entry is an integer, so sums and differences are exact.
    pub fn is_integral(&self) -> bool {
        self.values
            .iter()
            .all(|v| v.fract() == 0.0 && v.abs() < 2f64.powi(50))
    }

    /// Comparison slack: zero on integral tables, `1e-9` otherwise.
    pub fn tolerance(&self) -> f64 {
        if self.is_integral() {
            0.0
        } else {
            1e-9
        }
    }

    pub fn vectors(&self) -> impl Iterator<Item = KVector> {
        all_vectors(self.n, self.k)
    }
}

impl ValueOracle for TableOracle {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> u32 {
        self.k
    }
    fn evaluate(&self, x: &KVector) -> f64 {
        self.values[self.index(x)]
    }
}

/// Adapts a closure into an oracle; handy in tests and for ad-hoc functions.
pub struct FnOracle<F> {
    n: usize,
    k: u32,
    f: F,
}

impl<F: Fn(&KVector) -> f64 + Sync> FnOracle<F> {
    pub fn new(n: usize, k: u32, f: F) -> Self {
        Self { n, k, f }
    }
}

impl<F: Fn(&KVector) -> f64 + Sync> ValueOracle for FnOracle<F> {
    fn n(&self) -> usize {
        self.n
    }
    fn k(&self) -> u32 {
        self.k
    }
    fn evaluate(&self, x: &KVector) -> f64 {
        (self.f)(x)
    }
}
