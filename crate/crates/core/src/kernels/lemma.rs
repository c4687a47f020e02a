//! The derivative identity that collapses the inner `α`-sum of the
//! two-fold kernel:
//!
//! `Σ_{|α|=n} B_α(y) (α+β)!/α! = Σ_{ℓ<=β} n^{|ℓ|̲} / |ℓ|! · B_ℓ(y) · β! · Π_ν C(β_ν, ℓ_ν)`.

use num_bigint::BigInt;
use num_traits::Zero;

use crate::combinat::{choose, factorial, falling_factorial, indices_of_degree, MultiIndex};
use crate::error::{BdkError, Result};
use crate::poly::{bernstein_value, BarycentricPoint};
use crate::rational::Rational;

/// Both sides of the identity at `y`, each evaluated from its own sum.
pub fn inner_sum_lemma(
    n: u32,
    beta: &MultiIndex,
    y: &BarycentricPoint,
) -> Result<(Rational, Rational)> {
    BdkError::check_dim(beta.dim(), y.dim())?;
    let d = beta.dim();

    let mut lhs = Rational::zero();
    for alpha in indices_of_degree(n, d) {
        let sum = alpha.checked_add(beta)?;
        let ratio = Rational::new(BigInt::from(sum.factorial()), BigInt::from(alpha.factorial()));
        lhs += bernstein_value(&alpha, y)? * ratio;
    }

    let beta_fact = BigInt::from(beta.factorial());
    let mut rhs = Rational::zero();
    for ell in beta.dominated() {
        let k = ell.degree();
        let binoms: num_bigint::BigUint = ell
            .parts()
            .iter()
            .zip(beta.parts())
            .map(|(&l, &b)| choose(b, l))
            .product();
        let coef = Rational::new(
            falling_factorial(n as i64, k) * &beta_fact * BigInt::from(binoms),
            BigInt::from(factorial(k as u64)),
        );
        rhs += coef * bernstein_value(&ell, y)?;
    }
    Ok((lhs, rhs))
}
