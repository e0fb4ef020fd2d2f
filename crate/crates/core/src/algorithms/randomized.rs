use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lattice::KVector;
use crate::lp::greedy_distribution;
use crate::oracle::{CountingOracle, MarginalProfile, ValueOracle};

use super::{AlgorithmConfig, RunReport, TraceRecord};

/// The randomized greedy: each element goes to part `i` with probability
/// proportional to `y_i^(k-1)`, or to part 1 when every gain is zero.
/// Uses `kn + 1` queries and is deterministic for a fixed seed.
pub fn randomized_greedy<F: ValueOracle + ?Sized>(
    f: &F,
    config: &AlgorithmConfig,
) -> Result<RunReport> {
    let seed = config
        .seed
        .ok_or_else(|| Error::Validation("randomized greedy requires a seed".into()))?;
    let order = config.resolve_order(f.n())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let oracle = CountingOracle::new(f);

    let mut s = KVector::zeros(f.n());
    let mut value = oracle.evaluate(&s);
    let mut trace = Vec::with_capacity(order.len());
    for (idx, &e) in order.iter().enumerate() {
        let before = oracle.count();
        let profile = MarginalProfile::at(&oracle, &s, e, Some(value))?;
        let p = greedy_distribution(&profile.gains, f.k());
        let dist = WeightedIndex::new(&p)
            .map_err(|err| Error::Invariant(format!("bad part distribution {p:?}: {err}")))?;
        let i = dist.sample(&mut rng);
        s = s.with(e, i as u32 + 1);
        value = profile.extended_values[i];
        trace.push(TraceRecord {
            j: idx + 1,
            support: 1,
            queries: oracle.count() - before,
            lp_residual: None,
            min_certificate_margin: None,
        });
    }

    Ok(RunReport {
        algorithm: "randomized".into(),
        solution: s,
        value,
        total_queries: oracle.count(),
        trace,
    })
}
