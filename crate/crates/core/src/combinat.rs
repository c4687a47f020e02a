//! Multi-indices and exact combinatorial primitives.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{BdkError, Result};

/// Default number of factorials kept in the shared table.
pub const DEFAULT_FACTORIAL_CACHE: usize = 256;

static FACTORIALS: OnceLock<Vec<BigUint>> = OnceLock::new();
static CACHE_BOUND: OnceLock<usize> = OnceLock::new();

/// Sets the factorial cache bound. Only the first call before any factorial
/// is computed has an effect; returns whether the bound was accepted.
pub fn set_factorial_cache_bound(bound: usize) -> bool {
    FACTORIALS.get().is_none() && CACHE_BOUND.set(bound).is_ok()
}

pub fn factorial_cache_bound() -> usize {
    *CACHE_BOUND.get_or_init(|| DEFAULT_FACTORIAL_CACHE)
}

fn table() -> &'static [BigUint] {
    FACTORIALS.get_or_init(|| {
        let bound = factorial_cache_bound();
        let mut t = Vec::with_capacity(bound + 1);
        t.push(BigUint::one());
        for k in 1..=bound {
            let next = &t[k - 1] * BigUint::from(k);
            t.push(next);
        }
        t
    })
}

/// `n!`, served from the cache when `n` is within the bound.
pub fn factorial(n: u64) -> BigUint {
    let t = table();
    let top = t.len() as u64 - 1;
    if n <= top {
        return t[n as usize].clone();
    }
    (top + 1..=n).fold(t[top as usize].clone(), |acc, k| acc * BigUint::from(k))
}

/// Ordered list of `d + 1` nonnegative exponents `(a_0, ..., a_d)`.
///
/// Index 0 is the barycentric coordinate `x_0 = 1 - x_1 - ... - x_d`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        if parts.len() < 2 {
            return Err(BdkError::invalid(format!(
                "a multi-index needs at least 2 parts (d >= 1), got {}",
                parts.len()
            )));
        }
        Ok(MultiIndex(parts))
    }

    pub fn zero(d: usize) -> Self {
        MultiIndex(vec![0; d + 1])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// Simplex dimension `d` (number of parts minus one).
    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Total degree `|a|`.
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `a! = a_0! a_1! ... a_d!`.
    pub fn factorial(&self) -> BigUint {
        self.0.iter().map(|&p| factorial(p as u64)).product()
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn checked_add(&self, other: &MultiIndex) -> Result<MultiIndex> {
        BdkError::check_dim(self.dim(), other.dim())?;
        Ok(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect(),
        ))
    }

    /// All `l` with `l <= self` componentwise, lexicographic with part 0 most
    /// significant.
    pub fn dominated(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &bound in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=bound).map(move |v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiIndex).collect()
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices with `d + 1` parts summing to `n`, lexicographically
/// descending with part 0 most significant: for `(n=2, d=1)` this is
/// `(2,0), (1,1), (0,2)`.
pub fn enumerate_multi_indices(n: i64, d: i64) -> Result<Vec<MultiIndex>> {
    if d < 1 {
        return Err(BdkError::invalid(format!("dimension must be >= 1, got {d}")));
    }
    if n < 0 {
        return Err(BdkError::invalid(format!("degree must be >= 0, got {n}")));
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(d as usize + 1);
    compositions(n as u32, d as usize + 1, &mut current, &mut out);
    Ok(out)
}

fn compositions(remaining: u32, slots: usize, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if slots == 1 {
        current.push(remaining);
        out.push(MultiIndex(current.clone()));
        current.pop();
        return;
    }
    for v in (0..=remaining).rev() {
        current.push(v);
        compositions(remaining - v, slots - 1, current, out);
        current.pop();
    }
}

/// Infallible variant for callers that already hold a valid dimension.
pub(crate) fn indices_of_degree(n: u32, d: usize) -> Vec<MultiIndex> {
    enumerate_multi_indices(n as i64, d as i64).expect("d >= 1")
}

/// `|a|! / a!`, or 0 when any component is negative.
pub fn multinomial_of(parts: &[i64]) -> BigUint {
    if parts.iter().any(|&p| p < 0) {
        return BigUint::zero();
    }
    let total: u64 = parts.iter().map(|&p| p as u64).sum();
    let denom: BigUint = parts.iter().map(|&p| factorial(p as u64)).product();
    factorial(total) / denom
}

pub fn multinomial(mi: &MultiIndex) -> BigUint {
    let denom = mi.factorial();
    factorial(mi.degree() as u64) / denom
}

/// `s (s-1) ... (s-k+1)`; 1 when `k = 0`.
pub fn falling_factorial(s: i64, k: u32) -> BigInt {
    (0..k as i64).map(|i| BigInt::from(s - i)).product()
}

/// `s (s-1) ... (s-k+1) / k!` for integer `s`; `C(s, 0) = 1`.
pub fn binomial(s: i64, k: i64) -> Result<BigInt> {
    if k < 0 {
        return Err(BdkError::invalid(format!(
            "binomial lower index must be >= 0, got {k}"
        )));
    }
    let k = k as u32;
    Ok(falling_factorial(s, k) / BigInt::from(factorial(k as u64)))
}

/// `C(s, k)` for nonnegative `s`, as an unsigned value.
pub(crate) fn choose(s: u32, k: u32) -> BigUint {
    if k > s {
        return BigUint::zero();
    }
    factorial(s as u64) / (factorial(k as u64) * factorial((s - k) as u64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(p: &[u32]) -> MultiIndex {
        MultiIndex::new(p.to_vec()).unwrap()
    }

    fn naive_factorial(n: u64) -> BigUint {
        (1..=n).map(BigUint::from).product()
    }

    #[test]
    fn enumeration_examples() {
        let two = enumerate_multi_indices(2, 1).unwrap();
        assert_eq!(two, vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]);
        assert_eq!(enumerate_multi_indices(0, 3).unwrap(), vec![mi(&[0, 0, 0, 0])]);
        assert_eq!(enumerate_multi_indices(2, 2).unwrap().len(), 6);
    }

    #[test]
    fn enumeration_rejects_bad_arguments() {
        assert!(enumerate_multi_indices(2, 0).is_err());
        assert!(enumerate_multi_indices(-1, 2).is_err());
    }

    #[test]
    fn enumeration_counts_and_order() {
        for n in 0..=10 {
            for d in 1..=4 {
                let all = enumerate_multi_indices(n, d).unwrap();
                assert_eq!(BigInt::from(all.len()), binomial(n + d, d).unwrap());
                assert!(all.iter().all(|a| a.degree() == n as u32 && a.dim() == d as usize));
                // strictly descending lexicographic order implies no duplicates
                assert!(all.windows(2).all(|w| w[0] > w[1]));
            }
        }
    }

    #[test]
    fn multinomial_examples() {
        assert_eq!(multinomial(&mi(&[2, 1, 0])), BigUint::from(3u32));
        assert_eq!(multinomial(&mi(&[0, 0, 0])), BigUint::one());
        assert_eq!(multinomial_of(&[1, -1, 2]), BigUint::zero());
        assert_eq!(multinomial_of(&[2, 1, 0]), BigUint::from(3u32));
    }

    #[test]
    fn multinomial_matches_factorials_and_partial_sum_binomials() {
        for d in 1..=3 {
            for n in 0..=8 {
                for a in enumerate_multi_indices(n, d).unwrap() {
                    let direct = naive_factorial(n as u64)
                        / a.parts().iter().map(|&p| naive_factorial(p as u64)).product::<BigUint>();
                    assert_eq!(multinomial(&a), direct);
                    let mut partial = 0u32;
                    let mut prod = BigUint::one();
                    for &p in a.parts() {
                        partial += p;
                        prod *= choose(partial, p);
                    }
                    assert_eq!(multinomial(&a), prod);
                }
            }
        }
    }

    #[test]
    fn multinomial_sum_is_power() {
        for d in 1..=3 {
            for m in 0..=8 {
                let total: BigUint = enumerate_multi_indices(m, d)
                    .unwrap()
                    .iter()
                    .map(multinomial)
                    .sum();
                assert_eq!(total, BigUint::from(d as u32 + 1).pow(m as u32));
            }
        }
    }

    #[test]
    fn binomial_examples() {
        assert_eq!(binomial(5, 2).unwrap(), BigInt::from(10));
        assert_eq!(binomial(3, 0).unwrap(), BigInt::one());
        assert_eq!(binomial(-4, 0).unwrap(), BigInt::one());
        assert_eq!(binomial(2, 4).unwrap(), BigInt::zero());
        assert_eq!(binomial(-2, 2).unwrap(), BigInt::from(3));
        assert!(binomial(3, -1).is_err());
    }

    #[test]
    fn falling_factorial_examples() {
        assert_eq!(falling_factorial(5, 2), BigInt::from(20));
        assert_eq!(falling_factorial(-7, 0), BigInt::one());
        assert_eq!(falling_factorial(1, 1), BigInt::one());
        assert_eq!(falling_factorial(3, 1), BigInt::from(3));
    }

    #[test]
    fn falling_factorial_is_binomial_times_factorial() {
        for s in 0..=12 {
            for k in 0..=12u32 {
                assert_eq!(
                    falling_factorial(s, k),
                    binomial(s, k as i64).unwrap() * BigInt::from(factorial(k as u64))
                );
            }
        }
    }

    #[test]
    fn factorial_beyond_cache_bound() {
        let n = factorial_cache_bound() as u64 + 3;
        assert_eq!(factorial(n), naive_factorial(n));
    }

    #[test]
    fn dominated_indices() {
        let l = mi(&[1, 2]).dominated();
        assert_eq!(l.len(), 6);
        assert!(l.iter().all(|x| x.le(&mi(&[1, 2]))));
        assert_eq!(l[0], mi(&[0, 0]));
    }
}
