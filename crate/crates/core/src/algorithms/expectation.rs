use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{check_budget, Result};
use crate::exact::{rational, to_f64};
use crate::lattice::KVector;
use crate::oracle::ValueOracle;

use super::AlgorithmConfig;

pub const DEFAULT_EXPECTATION_BUDGET: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Expectation {
    #[serde(skip)]
    pub exact: BigRational,
    pub value: f64,
    /// Outcomes with positive probability.
    pub leaves: u64,
}

/// `E[f(s)]` for the randomized greedy, computed exactly by expanding every
/// branch with positive probability. Oracle values are converted to
/// rationals without rounding, so the result is exact for whatever `f`
/// returns. Refuses when `k^n` exceeds `budget`.
pub fn exact_expectation<F: ValueOracle + ?Sized>(
    f: &F,
    config: &AlgorithmConfig,
    budget: u128,
) -> Result<Expectation> {
    let k = f.k();
    check_budget(k as usize, f.n(), budget)?;
    let order = config.resolve_order(f.n())?;
    let t = AlgorithmConfig::exponent(k) as usize;

    let mut total = BigRational::zero();
    let mut leaves = 0u64;
    let zero = KVector::zeros(f.n());
    let zero_value = rational(f.evaluate(&zero));
    let mut stack = vec![(zero, BigRational::one(), zero_value, 0usize)];

    while let Some((s, prob, value, depth)) = stack.pop() {
        if depth == order.len() {
            total += &prob * &value;
            leaves += 1;
            continue;
        }
        let e = order[depth];
        let children: Vec<(KVector, BigRational)> = (1..=k)
            .map(|i| {
                let child = s.with(e, i);
                let v = rational(f.evaluate(&child));
                (child, v)
            })
            .collect();
        let powered: Vec<BigRational> = children
            .iter()
            .map(|(_, v)| {
                let gain = v - &value;
                let gain = if gain < BigRational::zero() {
                    BigRational::zero()
                } else {
                    gain
                };
                num_traits::pow(gain, t)
            })
            .collect();
        let beta: BigRational = powered.iter().cloned().sum();
        for (i, ((child, child_value), w)) in children.into_iter().zip(powered).enumerate() {
            let p = if beta.is_zero() {
                if i == 0 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            } else {
                w / &beta
            };
            if !p.is_zero() {
                stack.push((child, &prob * p, child_value, depth + 1));
            }
        }
    }

    Ok(Expectation {
        value: to_f64(&total),
        exact: total,
        leaves,
    })
}
