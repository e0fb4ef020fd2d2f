use crate::error::{Error, Result};
use crate::lp::{assemble, find_extreme_point, verify_basic, BasicSolution, ExtremeLP, SNAP_TOL};
use crate::oracle::{CountingOracle, MarginalProfile, ValueOracle};

use super::certificate::certificate_check;
use super::support::{SupportEntry, WeightedSupport};
use super::{support_bound, AlgorithmConfig, RunReport, TraceRecord};

/// Everything the deterministic greedy saw in one iteration.
#[derive(Clone, Debug)]
pub struct StepRecord {
    pub j: usize,
    /// Ground-set position assigned in this iteration.
    pub element: usize,
    pub before: WeightedSupport,
    pub lp: ExtremeLP,
    pub solution: BasicSolution,
    pub after: WeightedSupport,
}

#[derive(Clone, Debug)]
pub struct DeterministicRun {
    pub report: RunReport,
    pub final_support: WeightedSupport,
    /// Filled only when `keep_steps` is set.
    pub steps: Vec<StepRecord>,
}

/// The derandomized greedy.
///
/// Maintains a distribution over partial solutions. At each element it asks
/// the LP for a vertex `p[s][i]`, splits every support vector `s` into
/// `s` with the element set to `i` with weight `p[s][i] * Pr[s]`, and finally
/// returns the best vector of the last support. Queries: one for `f(0)`, then
/// `k` per support entry per element, since `f(s)` is carried forward.
pub fn deterministic_greedy<F: ValueOracle + ?Sized>(
    f: &F,
    config: &AlgorithmConfig,
) -> Result<DeterministicRun> {
    let n = f.n();
    let k = f.k();
    let order = config.resolve_order(n)?;
    if let Some(o) = &config.certify_against {
        if o.len() != n || !o.is_total() {
            return Err(Error::Validation(
                "certificate optimum must be a total assignment".into(),
            ));
        }
    }
    let oracle = CountingOracle::new(f);

    let mut support =
        WeightedSupport::initial(n, oracle.evaluate(&crate::lattice::KVector::zeros(n)));
    let mut trace = Vec::with_capacity(n);
    let mut steps = Vec::new();

    for (idx, &e) in order.iter().enumerate() {
        let j = idx + 1;
        let queries_before = oracle.count();

        let mut gains = Vec::with_capacity(support.len());
        let mut extended = Vec::with_capacity(support.len());
        for entry in &support.entries {
            let profile = MarginalProfile::at(&oracle, &entry.vector, e, Some(entry.value))?;
            gains.push(profile.gains);
            extended.push(profile.extended_values);
        }

        let lp = assemble(&support.probs(), &gains, k)?;
        let solution = find_extreme_point(&lp)?;
        let check = verify_basic(&lp, &solution.values);
        if !check.holds {
            return Err(Error::Numerical {
                message: format!("LP solution is not a vertex: {}", check.failures.join("; ")),
                dump: lp.to_json(),
            });
        }

        let mut next = WeightedSupport {
            entries: Vec::with_capacity(solution.support_size),
            iteration: j,
        };
        for ((entry, ps), values) in support.entries.iter().zip(&solution.values).zip(&extended) {
            for (i, (&p, &value)) in ps.iter().zip(values).enumerate() {
                if p > SNAP_TOL {
                    next.entries.push(SupportEntry {
                        prob: p * entry.prob,
                        vector: entry.vector.with(e, i as u32 + 1),
                        value,
                    });
                }
            }
        }
        next.renormalize();

        let bound = support_bound(j, k);
        if next.len() > support.len() + k as usize || next.len() > bound {
            return Err(Error::SupportOverflow {
                iteration: j,
                size: next.len(),
                bound: bound.min(support.len() + k as usize),
            });
        }
        next.check_invariants(&order)?;

        let queries = oracle.count() - queries_before;
        let margin = match &config.certify_against {
            Some(o) => Some(certificate_check(f, o, &support, &next, &solution.values, e)?.min),
            None => None,
        };
        trace.push(TraceRecord {
            j,
            support: next.len(),
            queries,
            lp_residual: Some(solution.max_residual),
            min_certificate_margin: margin,
        });

        if config.keep_steps {
            steps.push(StepRecord {
                j,
                element: e,
                before: support.clone(),
                lp,
                solution,
                after: next.clone(),
            });
        }
        support = next;
    }

    let best = support.best().clone();
    Ok(DeterministicRun {
        report: RunReport {
            algorithm: "deterministic".into(),
            solution: best.vector,
            value: best.value,
            total_queries: oracle.count(),
            trace,
        },
        final_support: support,
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algorithms::query_bound;
    use crate::lattice::KVector;
    use crate::oracle::FnOracle;

    #[test]
    fn single_element_modular_reaches_optimum() {
        // w = (1, 3): the LP region is p1 in [0, 3/8]; either vertex keeps part 2.
        let f = FnOracle::new(1, 2, |x: &KVector| match x.get(0) {
            1 => 1.0,
            2 => 3.0,
            _ => 0.0,
        });
        let run = deterministic_greedy(&f, &AlgorithmConfig::default()).unwrap();
        assert_eq!(run.report.value, 3.0);
        assert_eq!(run.report.solution, KVector::from_parts(vec![2]));
        assert!(run.final_support.len() <= 2);
        // f(0) plus k gains
        assert_eq!(run.report.total_queries, 3);
    }

    #[test]
    fn constant_zero_function_stays_on_part_one() {
        let f = FnOracle::new(3, 3, |_: &KVector| 0.0);
        let run = deterministic_greedy(&f, &AlgorithmConfig::default()).unwrap();
        assert_eq!(run.report.solution, KVector::from_parts(vec![1, 1, 1]));
        assert!(run.report.trace.iter().all(|t| t.support == 1));
        assert!(run.report.total_queries <= query_bound(3, 3));
    }

    #[test]
    fn order_is_respected() {
        let f = FnOracle::new(2, 2, |x: &KVector| x.support_size() as f64);
        let cfg = AlgorithmConfig {
            element_order: Some(vec![1, 0]),
            keep_steps: true,
            ..Default::default()
        };
        let run = deterministic_greedy(&f, &cfg).unwrap();
        assert_eq!(run.steps[0].element, 1);
        assert_eq!(run.steps[0].after.entries[0].vector.get(0), 0);
        assert_eq!(run.report.value, 2.0);
    }

    #[test]
    fn non_monotone_input_is_rejected() {
        let f = FnOracle::new(1, 2, |x: &KVector| if x.get(0) == 0 { 5.0 } else { 1.0 });
        assert!(matches!(
            deterministic_greedy(&f, &AlgorithmConfig::default()),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn partial_certificate_optimum_is_rejected() {
        let f = FnOracle::new(2, 2, |x: &KVector| x.support_size() as f64);
        let cfg = AlgorithmConfig {
            certify_against: Some(KVector::from_parts(vec![1, 0])),
            ..Default::default()
        };
        assert!(deterministic_greedy(&f, &cfg).is_err());
    }
}
