//! Exact rational helpers for comparing values against the approximation bound.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, ToPrimitive};

/// Slack used when values are not all integers.
pub const FLOAT_TOL: f64 = 1e-9;

/// Every finite `f64` is a dyadic rational; this conversion is exact.
pub fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

pub fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `k / (2k - 1)`.
pub fn approximation_ratio(k: u32) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(2 * k as i64 - 1))
}

pub fn approximation_ratio_f64(k: u32) -> f64 {
    k as f64 / (2.0 * k as f64 - 1.0)
}

/// `value >= k/(2k-1) * optimum`, exactly when `exact` is set, otherwise with
/// slack [`FLOAT_TOL`].
pub fn meets_bound(value: f64, optimum: f64, k: u32, exact: bool) -> bool {
    if exact {
        rational(value) * BigRational::from_u32(2 * k - 1).expect("small")
            >= rational(optimum) * BigRational::from_u32(k).expect("small")
    } else {
        value >= approximation_ratio_f64(k) * optimum - FLOAT_TOL
    }
}

/// Same comparison for an already-exact left-hand side.
pub fn rational_meets_bound(value: &BigRational, optimum: f64, k: u32) -> bool {
    value * BigRational::from_u32(2 * k - 1).expect("small")
        >= rational(optimum) * BigRational::from_u32(k).expect("small")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_is_exact_at_the_boundary() {
        // 2/3 * 3 = 2 exactly
        assert!(meets_bound(2.0, 3.0, 2, true));
        assert!(!meets_bound(1.999_999_999_9, 3.0, 2, true));
        assert!(meets_bound(1.999_999_999_9, 3.0, 2, false));
        // k = 1 demands the optimum itself.
        assert!(meets_bound(3.0, 3.0, 1, true));
        assert!(!meets_bound(2.5, 3.0, 1, true));
        assert_eq!(approximation_ratio(3), BigRational::new(3.into(), 5.into()));
    }
}
