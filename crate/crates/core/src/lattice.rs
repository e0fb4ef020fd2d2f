//! Assignment vectors over `{0, 1, ..., k}^V` and the lattice operations on them.
//!
//! A vector `x` stands for the disjoint family `(X_1, ..., X_k)` with
//! `X_i = { e | x(e) = i }`; part `0` means "unassigned". All operations are
//! componentwise and never materialize the set family.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The ordered ground set `V` together with the number of parts `k`.
///
/// Element order is fixed at construction; position `j` is the element the
/// greedy algorithms visit at step `j + 1` unless a permutation overrides it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundSet {
    elements: Vec<String>,
    k: u32,
}

impl GroundSet {
    pub fn new(elements: Vec<String>, k: u32) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Validation("ground set must be nonempty".into()));
        }
        if k == 0 {
            return Err(Error::Validation("k must be at least 1".into()));
        }
        let mut seen = HashMap::with_capacity(elements.len());
        for (pos, e) in elements.iter().enumerate() {
            if let Some(prev) = seen.insert(e.as_str(), pos) {
                return Err(Error::Validation(format!(
                    "duplicate element '{e}' at positions {prev} and {pos}"
                )));
            }
        }
        Ok(Self { elements, k })
    }

    /// Ground set `e1, ..., en`.
    pub fn numbered(n: usize, k: u32) -> Result<Self> {
        Self::new((1..=n).map(|i| format!("e{i}")).collect(), k)
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == name)
    }

    pub fn zero(&self) -> KVector {
        KVector::zeros(self.n())
    }

    /// Validates `values` against this ground set.
    pub fn vector(&self, values: Vec<u32>) -> Result<KVector> {
        if values.len() != self.n() {
            return Err(Error::DimensionMismatch {
                left: values.len(),
                right: self.n(),
            });
        }
        if let Some(&bad) = values.iter().find(|&&v| v > self.k) {
            return Err(Error::InvalidPart {
                part: bad,
                k: self.k,
            });
        }
        Ok(KVector(values))
    }

    /// Number of vectors in `{0..k}^V`.
    pub fn lattice_size(&self) -> u128 {
        (self.k as u128 + 1).saturating_pow(self.n() as u32)
    }
}

/// An assignment vector. Derived `Ord` is lexicographic by position, which is
/// the tie-break order used throughout.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KVector(Vec<u32>);

impl KVector {
    pub fn zeros(n: usize) -> Self {
        KVector(vec![0; n])
    }

    /// Builds a vector without checking parts against any `k`.
    pub fn from_parts(values: Vec<u32>) -> Self {
        KVector(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, e: usize) -> u32 {
        self.0[e]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn is_total(&self) -> bool {
        self.0.iter().all(|&v| v != 0)
    }

    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&v| v != 0).count()
    }

    /// Copy of `self` with coordinate `e` set to `part`.
    pub fn with(&self, e: usize, part: u32) -> KVector {
        let mut out = self.clone();
        out.0[e] = part;
        out
    }

    /// The set `X_part` as sorted positions.
    pub fn part_members(&self, part: u32) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v == part)
            .map(|(e, _)| e)
            .collect()
    }

    /// Positions with a nonzero part.
    pub fn assigned_positions(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0)
            .map(|(e, _)| e)
            .collect()
    }

    /// Comma-joined digits, as used for table keys: `"1,0,2"`.
    pub fn key(&self) -> String {
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        parts.join(",")
    }

    pub fn parse_key(key: &str) -> Result<KVector> {
        let trimmed = key.trim();
        if trimmed.is_empty() {
            return Err(Error::Parse(format!("empty vector key '{key}'")));
        }
        trimmed
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad vector key '{key}'")))
            })
            .collect::<Result<Vec<_>>>()
            .map(KVector)
    }
}

impl fmt::Display for KVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

fn same_len(x: &KVector, y: &KVector) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// `x ⊓ y`: keeps a coordinate only where both vectors agree.
pub fn meet(x: &KVector, y: &KVector) -> Result<KVector> {
    same_len(x, y)?;
    Ok(KVector(
        x.0.iter()
            .zip(&y.0)
            .map(|(&a, &b)| if a == b { a } else { 0 })
            .collect(),
    ))
}

/// `x ⊔ y`: union of assignments, with conflicting coordinates zeroed.
pub fn join(x: &KVector, y: &KVector) -> Result<KVector> {
    same_len(x, y)?;
    Ok(KVector(
        x.0.iter()
            .zip(&y.0)
            .map(|(&a, &b)| match (a, b) {
                (0, b) => b,
                (a, 0) => a,
                (a, b) if a == b => a,
                _ => 0,
            })
            .collect(),
    ))
}

/// `x ⪯ y`: every assigned coordinate of `x` carries the same part in `y`.
pub fn leq(x: &KVector, y: &KVector) -> Result<bool> {
    same_len(x, y)?;
    Ok(x.0.iter().zip(&y.0).all(|(&a, &b)| a == 0 || a == b))
}

/// `o[s] = (o ⊔ s) ⊔ s`: the optimum made consistent with the partial solution `s`.
pub fn project_optimal(o: &KVector, s: &KVector) -> Result<KVector> {
    join(&join(o, s)?, s)
}

/// Iterates `{0..k}^n` in lexicographic order.
pub fn all_vectors(n: usize, k: u32) -> impl Iterator<Item = KVector> {
    let mut next = Some(vec![0u32; n]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut pos = n;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if succ[pos] < k {
                succ[pos] += 1;
                next = Some(succ);
                break;
            }
            succ[pos] = 0;
        }
        Some(KVector(current))
    })
}

/// Iterates every `x ⪯ y` (all sub-assignments of `y`), `y` itself included.
pub fn sub_vectors(y: &KVector) -> impl Iterator<Item = KVector> + '_ {
    let support = y.assigned_positions();
    let count = 1u64 << support.len();
    (0..count).map(move |mask| {
        let mut x = KVector::zeros(y.len());
        for (bit, &e) in support.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                x.0[e] = y.0[e];
            }
        }
        x
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(values: &[u32]) -> KVector {
        KVector::from_parts(values.to_vec())
    }

    #[test]
    fn meet_examples() {
        assert_eq!(meet(&v(&[1, 0, 2]), &v(&[1, 2, 0])).unwrap(), v(&[1, 0, 0]));
        let x = v(&[2, 1, 0]);
        assert_eq!(meet(&x, &x).unwrap(), x);
        assert_eq!(meet(&v(&[1, 2]), &v(&[2, 1])).unwrap(), v(&[0, 0]));
    }

    #[test]
    fn join_examples() {
        assert_eq!(join(&v(&[1, 0, 2]), &v(&[1, 2, 0])).unwrap(), v(&[1, 2, 2]));
        assert_eq!(join(&v(&[1, 2]), &v(&[2, 1])).unwrap(), v(&[0, 0]));
        let x = v(&[0, 3, 1]);
        assert_eq!(join(&x, &KVector::zeros(3)).unwrap(), x);
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&v(&[1, 0, 0]), &v(&[1, 2, 0])).unwrap());
        assert!(!leq(&v(&[1, 0]), &v(&[2, 0])).unwrap());
        assert!(leq(&KVector::zeros(3), &v(&[2, 1, 1])).unwrap());
    }

    #[test]
    fn project_optimal_examples() {
        let o = v(&[1, 2, 1]);
        assert_eq!(project_optimal(&o, &v(&[2, 0, 0])).unwrap(), v(&[2, 2, 1]));
        assert_eq!(project_optimal(&o, &KVector::zeros(3)).unwrap(), o);
        let s = v(&[2, 1, 2]);
        assert_eq!(project_optimal(&o, &s).unwrap(), s);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = meet(&v(&[1]), &v(&[1, 0])).unwrap_err();
        assert!(matches!(
            err,
            Error::DimensionMismatch { left: 1, right: 2 }
        ));
        assert!(join(&v(&[1]), &v(&[])).is_err());
        assert!(leq(&v(&[1]), &v(&[])).is_err());
    }

    #[test]
    fn ground_set_validation() {
        assert!(GroundSet::new(vec![], 2).is_err());
        assert!(GroundSet::new(vec!["a".into()], 0).is_err());
        assert!(GroundSet::new(vec!["a".into(), "a".into()], 2).is_err());
        let g = GroundSet::numbered(3, 2).unwrap();
        assert!(matches!(
            g.vector(vec![0, 3, 1]),
            Err(Error::InvalidPart { part: 3, k: 2 })
        ));
        assert_eq!(g.lattice_size(), 27);
    }

    #[test]
    fn enumeration_is_lexicographic_and_complete() {
        let all: Vec<KVector> = all_vectors(3, 2).collect();
        assert_eq!(all.len(), 27);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        let subs: Vec<KVector> = sub_vectors(&v(&[2, 0, 1])).collect();
        assert_eq!(subs.len(), 4);
        assert!(subs.iter().all(|x| leq(x, &v(&[2, 0, 1])).unwrap()));
    }

    #[test]
    fn key_round_trip() {
        let x = v(&[1, 0, 2]);
        assert_eq!(x.key(), "1,0,2");
        assert_eq!(KVector::parse_key("1,0,2").unwrap(), x);
        assert!(KVector::parse_key("1,,2").is_err());
        assert!(KVector::parse_key("").is_err());
    }
}
