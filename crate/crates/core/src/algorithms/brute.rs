use crate::error::{check_budget, Error, Result};
use crate::lattice::{all_vectors, KVector};
use crate::oracle::ValueOracle;

pub const DEFAULT_BRUTE_BUDGET: u128 = 10_000_000;

/// Exact maximizer over `{0..k}^V`; the lexicographically smallest among ties.
pub fn brute_force_opt<F: ValueOracle + ?Sized>(f: &F, budget: u128) -> Result<(KVector, f64)> {
    check_budget(f.k() as usize + 1, f.n(), budget)?;
    let mut best: Option<(KVector, f64)> = None;
    for x in all_vectors(f.n(), f.k()) {
        let v = f.evaluate(&x);
        if best.as_ref().is_none_or(|(_, b)| v > *b) {
            best = Some((x, v));
        }
    }
    Ok(best.expect("lattice is nonempty"))
}

/// Fills the unassigned coordinates of a maximizer, one at a time, with the
/// part of largest value. For monotone `f` the result is still a maximizer.
pub fn complete_to_total<F: ValueOracle + ?Sized>(f: &F, o: &KVector) -> Result<KVector> {
    let target = f.evaluate(o);
    let mut x = o.clone();
    for e in 0..x.len() {
        if x.get(e) != 0 {
            continue;
        }
        let best = (1..=f.k())
            .map(|i| (i, f.evaluate(&x.with(e, i))))
            .reduce(|a, b| if b.1 > a.1 { b } else { a })
            .expect("k >= 1");
        x = x.with(e, best.0);
    }
    if f.evaluate(&x) < target - 1e-9 {
        return Err(Error::Validation(format!(
            "completing {o} lowered the value; oracle is not monotone"
        )));
    }
    Ok(x)
}
