//! Exhaustive checkers for k-submodularity and the properties around it.
//!
//! Every checker walks the full lattice of a [`TableOracle`], so the caller
//! pays `(k+1)^(2n)` work at most; larger instances are refused up front.
//! Integral tables are compared exactly, others with slack `1e-9`.

use serde::{Deserialize, Serialize};

use crate::error::{check_budget, Error, Result};
use crate::lattice::{join, leq, meet, sub_vectors, KVector};
use crate::oracle::{TableOracle, ValueOracle, DEFAULT_TABLE_BUDGET};

/// A counterexample to one of the checked inequalities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f(x) + f(y) < f(x ⊓ y) + f(x ⊔ y)`.
    Lattice { x: KVector, y: KVector },
    /// `Δ_{e,i} f(x) < Δ_{e,i} f(y)` with `x ⪯ y`, `y(e) = 0`.
    Orthant {
        x: KVector,
        y: KVector,
        e: usize,
        i: u32,
    },
    /// `Δ_{e,i} f(x) + Δ_{e,j} f(x) < 0`.
    Pairwise {
        x: KVector,
        e: usize,
        i: u32,
        j: u32,
    },
    /// `f(x) > f(y)` with `x ⪯ y`.
    Order { x: KVector, y: KVector },
    /// `f(x) < 0`.
    Negative { x: KVector },
}

impl Witness {
    /// Re-evaluates the witness; a positive result is the amount by which the
    /// inequality fails.
    pub fn violation<F: ValueOracle + ?Sized>(&self, f: &F) -> Result<f64> {
        Ok(match self {
            Witness::Lattice { x, y } => {
                f.evaluate(&meet(x, y)?) + f.evaluate(&join(x, y)?) - f.evaluate(x) - f.evaluate(y)
            }
            Witness::Orthant { x, y, e, i } => {
                if !leq(x, y)? || y.get(*e) != 0 {
                    return Err(Error::Invariant(format!(
                        "malformed orthant witness {x} {y}"
                    )));
                }
                let gain = |v: &KVector| f.evaluate(&v.with(*e, *i)) - f.evaluate(v);
                gain(y) - gain(x)
            }
            Witness::Pairwise { x, e, i, j } => {
                let base = f.evaluate(x);
                -((f.evaluate(&x.with(*e, *i)) - base) + (f.evaluate(&x.with(*e, *j)) - base))
            }
            Witness::Order { x, y } => {
                if !leq(x, y)? {
                    return Err(Error::Invariant(format!("malformed order witness {x} {y}")));
                }
                f.evaluate(x) - f.evaluate(y)
            }
            Witness::Negative { x } => -f.evaluate(x),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// How badly the witness fails its inequality (positive when present).
    pub violation: Option<f64>,
    pub checks_performed: u64,
}

impl PropertyReport {
    fn pass(checks_performed: u64) -> Self {
        Self {
            holds: true,
            witness: None,
            violation: None,
            checks_performed,
        }
    }
}

/// Shared scaffolding: budget guard, first-failure capture, witness replay.
struct Scan<'a> {
    table: &'a TableOracle,
    tol: f64,
    checks: u64,
    found: Option<Witness>,
}

impl<'a> Scan<'a> {
    fn new(table: &'a TableOracle, budget: u128) -> Result<Self> {
        check_budget(table.k() as usize + 1, 2 * table.n(), budget)?;
        Ok(Self {
            table,
            tol: table.tolerance(),
            checks: 0,
            found: None,
        })
    }

    /// Records one inequality check; `deficit > tol` marks a failure.
    fn check(&mut self, deficit: f64, witness: impl FnOnce() -> Witness) -> bool {
        self.checks += 1;
        if deficit > self.tol {
            self.found = Some(witness());
            return false;
        }
        true
    }

    fn finish(self) -> Result<PropertyReport> {
        match self.found {
            None => Ok(PropertyReport::pass(self.checks)),
            Some(w) => {
                let violation = w.violation(self.table)?;
                if violation <= self.tol {
                    return Err(Error::Invariant(format!(
                        "witness {w:?} does not replay (violation {violation})"
                    )));
                }
                Ok(PropertyReport {
                    holds: false,
                    witness: Some(w),
                    violation: Some(violation),
                    checks_performed: self.checks,
                })
            }
        }
    }
}

fn gain(t: &TableOracle, x: &KVector, e: usize, i: u32) -> f64 {
    t.evaluate(&x.with(e, i)) - t.evaluate(x)
}

/// `f(x) + f(y) >= f(x ⊓ y) + f(x ⊔ y)` over all unordered pairs.
pub fn check_k_submodular(table: &TableOracle, budget: u128) -> Result<PropertyReport> {
    let mut scan = Scan::new(table, budget)?;
    let all: Vec<KVector> = table.vectors().collect();
    'outer: for (a, x) in all.iter().enumerate() {
        for y in &all[a..] {
            let lhs = table.evaluate(x) + table.evaluate(y);
            let rhs = table.evaluate(&meet(x, y)?) + table.evaluate(&join(x, y)?);
            if !scan.check(rhs - lhs, || Witness::Lattice {
                x: x.clone(),
                y: y.clone(),
            }) {
                break 'outer;
            }
        }
    }
    scan.finish()
}

/// `Δ_{e,i} f(x) >= Δ_{e,i} f(y)` for `x ⪯ y` and `y(e) = 0`.
pub fn check_orthant_submodular(table: &TableOracle, budget: u128) -> Result<PropertyReport> {
    let mut scan = Scan::new(table, budget)?;
    let k = table.k();
    'outer: for y in table.vectors() {
        for e in (0..y.len()).filter(|&e| y.get(e) == 0) {
            for i in 1..=k {
                let gy = gain(table, &y, e, i);
                for x in sub_vectors(&y) {
                    let gx = gain(table, &x, e, i);
                    if !scan.check(gy - gx, || Witness::Orthant {
                        x: x.clone(),
                        y: y.clone(),
                        e,
                        i,
                    }) {
                        break 'outer;
                    }
                }
            }
        }
    }
    scan.finish()
}

/// `Δ_{e,i} f(x) + Δ_{e,j} f(x) >= 0` for `i != j`.
pub fn check_pairwise_monotone(table: &TableOracle, budget: u128) -> Result<PropertyReport> {
    let mut scan = Scan::new(table, budget)?;
    let k = table.k();
    'outer: for x in table.vectors() {
        for e in (0..x.len()).filter(|&e| x.get(e) == 0) {
            for i in 1..=k {
                for j in (i + 1)..=k {
                    let sum = gain(table, &x, e, i) + gain(table, &x, e, j);
                    if !scan.check(-sum, || Witness::Pairwise {
                        x: x.clone(),
                        e,
                        i,
                        j,
                    }) {
                        break 'outer;
                    }
                }
            }
        }
    }
    scan.finish()
}

/// `f(x) <= f(y)` for every comparable pair `x ⪯ y`.
pub fn check_monotone(table: &TableOracle, budget: u128) -> Result<PropertyReport> {
    let mut scan = Scan::new(table, budget)?;
    'outer: for y in table.vectors() {
        let fy = table.evaluate(&y);
        for x in sub_vectors(&y) {
            if !scan.check(table.evaluate(&x) - fy, || Witness::Order {
                x: x.clone(),
                y: y.clone(),
            }) {
                break 'outer;
            }
        }
    }
    scan.finish()
}

/// `f(x) >= 0` everywhere. Kept apart from the other checks since
/// k-submodularity is invariant under adding a constant.
pub fn check_nonnegative(table: &TableOracle) -> Result<PropertyReport> {
    let mut scan = Scan::new(table, u128::MAX)?;
    for x in table.vectors() {
        if !scan.check(-table.evaluate(&x), || Witness::Negative { x: x.clone() }) {
            break;
        }
    }
    scan.finish()
}

/// All checker outcomes for one table, plus the equivalence cross-check
/// (k-submodular iff orthant submodular and pairwise monotone).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub monotone: PropertyReport,
    pub k_submodular: PropertyReport,
    pub orthant_submodular: PropertyReport,
    pub pairwise_monotone: PropertyReport,
    pub nonnegative: PropertyReport,
    pub equivalence_consistent: bool,
}

impl VerificationReport {
    pub fn is_monotone_k_submodular(&self) -> bool {
        self.monotone.holds && self.k_submodular.holds
    }
}

pub fn verify_all(table: &TableOracle, budget: u128) -> Result<VerificationReport> {
    let k_submodular = check_k_submodular(table, budget)?;
    let orthant_submodular = check_orthant_submodular(table, budget)?;
    let pairwise_monotone = check_pairwise_monotone(table, budget)?;
    let equivalence_consistent =
        k_submodular.holds == (orthant_submodular.holds && pairwise_monotone.holds);
    Ok(VerificationReport {
        monotone: check_monotone(table, budget)?,
        k_submodular,
        orthant_submodular,
        pairwise_monotone,
        nonnegative: check_nonnegative(table)?,
        equivalence_consistent,
    })
}

/// Convenience wrapper using [`DEFAULT_TABLE_BUDGET`].
pub fn verify_default(table: &TableOracle) -> Result<VerificationReport> {
    verify_all(table, DEFAULT_TABLE_BUDGET)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize, k: u32, values: &[f64]) -> TableOracle {
        TableOracle::from_values(n, k, values.to_vec()).unwrap()
    }

    #[test]
    fn strictly_supermodular_set_function_is_caught() {
        // k = 1: f(∅)=0, f({a})=0, f({b})=0, f({a,b})=1.
        let t = table(2, 1, &[0.0, 0.0, 0.0, 1.0]);
        let r = check_k_submodular(&t, 1_000).unwrap();
        assert!(!r.holds);
        let w = r.witness.clone().unwrap();
        assert_eq!(w.violation(&t).unwrap(), 1.0);
        assert!(!check_orthant_submodular(&t, 1_000).unwrap().holds);
        // still monotone
        assert!(check_monotone(&t, 1_000).unwrap().holds);
    }

    #[test]
    fn negative_singleton_marginals_break_pairwise_monotonicity() {
        // n = 1, k = 2: f(0)=5, f(1)=3, f(2)=4.
        let t = table(1, 2, &[5.0, 3.0, 4.0]);
        let r = check_pairwise_monotone(&t, 1_000).unwrap();
        assert!(!r.holds);
        assert_eq!(
            r.witness,
            Some(Witness::Pairwise {
                x: KVector::zeros(1),
                e: 0,
                i: 1,
                j: 2
            })
        );
        assert_eq!(r.violation, Some(3.0));
        assert!(!check_monotone(&t, 1_000).unwrap().holds);
        assert!(!check_k_submodular(&t, 1_000).unwrap().holds);
    }

    #[test]
    fn budget_is_enforced() {
        let t = table(2, 1, &[0.0, 1.0, 1.0, 2.0]);
        // (k+1)^(2n) = 16
        assert!(check_k_submodular(&t, 16).is_ok());
        assert!(matches!(
            check_k_submodular(&t, 15),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(check_monotone(&t, 15).is_err());
        assert!(check_orthant_submodular(&t, 15).is_err());
        assert!(check_pairwise_monotone(&t, 15).is_err());
    }

    #[test]
    fn fractional_tables_use_tolerance() {
        // modular, but with rounding noise below 1e-9
        let t = table(2, 1, &[0.0, 0.1, 0.2, 0.3 + 1e-12]);
        assert!(check_k_submodular(&t, 1_000).unwrap().holds);
        assert!(check_orthant_submodular(&t, 1_000).unwrap().holds);
    }

    #[test]
    fn negativity_is_separate() {
        let t = table(1, 1, &[-1.0, 0.0]);
        assert!(!check_nonnegative(&t).unwrap().holds);
        assert!(check_k_submodular(&t, 1_000).unwrap().holds);
    }
}
