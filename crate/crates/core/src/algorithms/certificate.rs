//! Replays one deterministic-greedy iteration against a known optimum and
//! measures the slack in each inequality that the approximation argument
//! chains together.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{project_optimal, KVector};
use crate::oracle::ValueOracle;

use super::support::WeightedSupport;
use super::AlgorithmConfig;

/// Slacks for one iteration; nonnegative (up to rounding) on valid runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateMargins {
    /// `f(o[s]) - f(o[s with e = i]) = a_{i*}(s) - a_i(s)`, as `-|difference|`.
    pub identity: f64,
    /// `min_{s,i} y_{i*}(s) - (a_{i*}(s) - a_i(s))`.
    pub per_vector: f64,
    /// `c E[Σ_i p_i y_i] - E[Σ_i (a_{i*} - a_i) p_i]` with `c = 1 - 1/k`.
    pub per_step: f64,
    /// `c (E_after f - E_before f) - (E_before f(o[s]) - E_after f(o[s']))`.
    pub aggregate: f64,
    /// `E_after f - E_before f`.
    pub value_gain: f64,
    /// `E_before f(o[s]) - E_after f(o[s'])`.
    pub optimum_loss: f64,
    pub min: f64,
}

/// Checks iteration `before -> after` that assigned element `e` using LP
/// solution `lp_values[s][i - 1]`. `o` must be a total maximizer. Evaluates
/// `f` directly, so callers should pass an uncounted oracle.
pub fn certificate_check<F: ValueOracle + ?Sized>(
    f: &F,
    o: &KVector,
    before: &WeightedSupport,
    after: &WeightedSupport,
    lp_values: &[Vec<f64>],
    e: usize,
) -> Result<CertificateMargins> {
    let k = f.k();
    let c = AlgorithmConfig::ratio_parameter(k);
    let i_star = o.get(e);
    if i_star == 0 {
        return Err(Error::Validation(format!(
            "optimum leaves element {e} unassigned"
        )));
    }
    if lp_values.len() != before.len() {
        return Err(Error::DimensionMismatch {
            left: lp_values.len(),
            right: before.len(),
        });
    }

    let mut identity: f64 = 0.0;
    let mut per_vector = f64::INFINITY;
    let mut lemma_lhs = 0.0;
    let mut lemma_rhs = 0.0;
    let mut before_f = 0.0;
    let mut before_o = 0.0;

    for (entry, p) in before.entries.iter().zip(lp_values) {
        let s = &entry.vector;
        let fs = f.evaluate(s);
        let y: Vec<f64> = (1..=k).map(|i| f.evaluate(&s.with(e, i)) - fs).collect();

        let os = project_optimal(o, s)?;
        let r = os.with(e, 0);
        let fr = f.evaluate(&r);
        let a: Vec<f64> = (1..=k).map(|i| f.evaluate(&r.with(e, i)) - fr).collect();
        let a_star = a[i_star as usize - 1];
        let y_star = y[i_star as usize - 1];
        let f_os = f.evaluate(&os);

        for i in 1..=k {
            let drop = a_star - a[i as usize - 1];
            let moved = project_optimal(o, &s.with(e, i))?;
            identity = identity.max((f_os - f.evaluate(&moved) - drop).abs());
            per_vector = per_vector.min(y_star - drop);
            lemma_lhs += entry.prob * p[i as usize - 1] * drop;
            lemma_rhs += entry.prob * p[i as usize - 1] * y[i as usize - 1];
        }
        before_f += entry.prob * fs;
        before_o += entry.prob * f_os;
    }

    let mut after_f = 0.0;
    let mut after_o = 0.0;
    for entry in &after.entries {
        after_f += entry.prob * f.evaluate(&entry.vector);
        after_o += entry.prob * f.evaluate(&project_optimal(o, &entry.vector)?);
    }

    let per_step = c * lemma_rhs - lemma_lhs;
    let value_gain = after_f - before_f;
    let optimum_loss = before_o - after_o;
    let aggregate = c * value_gain - optimum_loss;
    let identity = -identity;
    let min = identity.min(per_vector).min(per_step).min(aggregate);
    Ok(CertificateMargins {
        identity,
        per_vector,
        per_step,
        aggregate,
        value_gain,
        optimum_loss,
        min,
    })
}

/// `(2 - 1/k) E_final[f] - (1 - 1/k) f(0)`: the upper bound on `f(o)` obtained
/// by summing the per-iteration aggregate inequalities.
pub fn telescoped_bound(k: u32, final_expectation: f64, zero_value: f64) -> f64 {
    let c = AlgorithmConfig::ratio_parameter(k);
    (1.0 + c) * final_expectation - c * zero_value
}
