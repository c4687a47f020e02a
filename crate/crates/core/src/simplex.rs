//! Exact integrals over the standard simplex `S^d`.
//!
//! All values come from the Dirichlet formula
//! `∫ x_0^{μ_0} ... x_d^{μ_d} dx = μ! / (|μ| + d)!`; nothing here is numeric.

use num_bigint::BigInt;

use crate::combinat::{factorial, multinomial, MultiIndex};
use crate::error::{BdkError, Result};
use crate::rational::Rational;

/// Dimension `d >= 1` of the simplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexDim(usize);

impl SimplexDim {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(BdkError::invalid("simplex dimension must be >= 1"));
        }
        Ok(SimplexDim(d))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Volume `1/d!`.
    pub fn volume(self) -> Rational {
        Rational::new(BigInt::from(1), BigInt::from(factorial(self.0 as u64)))
    }
}

fn frac(num: num_bigint::BigUint, den: num_bigint::BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `∫_{S^d} x_0^{μ_0} ... x_d^{μ_d} dx` for barycentric exponents `μ`.
pub fn monomial_integral(mu: &MultiIndex, d: SimplexDim) -> Result<Rational> {
    BdkError::check_dim(d.get(), mu.dim())?;
    Ok(dirichlet(mu.parts(), d.get()))
}

/// Dirichlet formula on raw exponents; `exps` may omit `x_0` (exponent 0).
pub(crate) fn dirichlet(exps: &[u32], d: usize) -> Rational {
    let total: u64 = exps.iter().map(|&e| e as u64).sum();
    let num = exps.iter().map(|&e| factorial(e as u64)).product();
    frac(num, factorial(total + d as u64))
}

/// `⟨1, B_α⟩ = |α|! / (|α| + d)!`.
pub fn inner_one_bernstein(alpha: &MultiIndex, d: SimplexDim) -> Result<Rational> {
    BdkError::check_dim(d.get(), alpha.dim())?;
    let n = alpha.degree() as u64;
    Ok(frac(factorial(n), factorial(n + d.get() as u64)))
}

/// `∫ B_α B_β = [C(α) C(β) / C(α+β)] ⟨1, B_{α+β}⟩` with multinomials `C`.
pub fn bernstein_product_integral(
    alpha: &MultiIndex,
    beta: &MultiIndex,
    d: SimplexDim,
) -> Result<Rational> {
    BdkError::check_dim(d.get(), alpha.dim())?;
    BdkError::check_dim(d.get(), beta.dim())?;
    let sum = alpha.checked_add(beta)?;
    let quotient = frac(multinomial(alpha) * multinomial(beta), multinomial(&sum));
    Ok(quotient * inner_one_bernstein(&sum, d)?)
}

/// `∫ B_α B_β` from the product of barycentric monomials,
/// `C(α) C(β) ∫ x^{α+β}`. Kept separate from [`bernstein_product_integral`]
/// so the definitional kernels do not share its quotient formula.
pub fn bernstein_product_integral_dirichlet(
    alpha: &MultiIndex,
    beta: &MultiIndex,
    d: SimplexDim,
) -> Result<Rational> {
    let sum = alpha.checked_add(beta)?;
    let weight = BigInt::from(multinomial(alpha) * multinomial(beta));
    Ok(monomial_integral(&sum, d)? * Rational::from_integer(weight))
}

/// `⟨1, B_α⟩` as `C(α) ∫ x^α`, without the degree-only shortcut.
pub fn inner_one_bernstein_dirichlet(alpha: &MultiIndex, d: SimplexDim) -> Result<Rational> {
    Ok(monomial_integral(alpha, d)? * Rational::from_integer(BigInt::from(multinomial(alpha))))
}
