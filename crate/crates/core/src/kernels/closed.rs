//! Closed-form kernel representations.

use num_bigint::{BigInt, BigUint};
use num_traits::One;

use crate::combinat::{choose, factorial, falling_factorial, indices_of_degree, MultiIndex};
use crate::error::Result;
use crate::poly::CartesianPolynomial;
use crate::rational::Rational;
use crate::simplex::SimplexDim;

use super::{DiagonalKernelForm, KernelPolynomial};

fn q(num: BigUint, den: BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

fn whole(n: BigUint) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Kernel of a single operator:
/// `K_n(x, y) = (n+d)!/n! · Σ_{|ℓ|=n} B_ℓ(x) B_ℓ(y)`.
pub fn kernel_single(n: u32, d: usize) -> Result<DiagonalKernelForm> {
    SimplexDim::new(d)?;
    let scale = q(factorial(n as u64 + d as u64), factorial(n as u64));
    let terms = indices_of_degree(n, d)
        .into_iter()
        .map(|l| (l, Rational::one()))
        .collect();
    DiagonalKernelForm::new(d, scale, terms)
}

/// Diagonal representation of the `M_m ∘ M_n` kernel on `S^d`:
///
/// `(m+d)! (n+d)! / (m+n+d)! · Σ_{|ℓ| <= min(m,n)} C(m,|ℓ|) C(n,|ℓ|) B_ℓ(x) B_ℓ(y)`.
///
/// Binomials vanish for `|ℓ| > min(m, n)`, so those indices are never listed.
pub fn kernel_closed_twofold(m: u32, n: u32, d: usize) -> Result<DiagonalKernelForm> {
    SimplexDim::new(d)?;
    let (m64, n64, d64) = (m as u64, n as u64, d as u64);
    let scale = q(
        factorial(m64 + d64) * factorial(n64 + d64),
        factorial(m64 + n64 + d64),
    );
    let mut terms = Vec::new();
    for k in 0..=m.min(n) {
        let w = whole(choose(m, k) * choose(n, k));
        terms.extend(indices_of_degree(k, d).into_iter().map(|l| (l, w.clone())));
    }
    DiagonalKernelForm::new(d, scale, terms)
}

/// Univariate `M_m ∘ M_n` kernel written with `p_{k,j}(x) = C(k,j) x^j (1-x)^{k-j}`:
///
/// `(m+1)! (n+1)! / (m+n+1)! · Σ_k C(m,k) C(n,k) Σ_j p_{k,j}(x) p_{k,j}(y)`.
///
/// Built independently of [`kernel_closed_twofold`] so the two can be
/// checked against each other.
pub fn univariate_twofold_closed(m: u32, n: u32) -> Result<DiagonalKernelForm> {
    let (m64, n64) = (m as u64, n as u64);
    let scale = q(factorial(m64 + 1) * factorial(n64 + 1), factorial(m64 + n64 + 1));
    let mut terms = Vec::new();
    for k in 0..=m.min(n) {
        let w = whole(choose(m, k) * choose(n, k));
        for j in 0..=k {
            // p_{k,j} is B_(k-j, j)
            terms.push((MultiIndex::new(vec![k - j, j])?, w.clone()));
        }
    }
    DiagonalKernelForm::new(1, scale, terms)
}

/// Univariate kernel of `M_{n3} ∘ M_{n2} ∘ M_{n1}`:
///
/// `P · Σ_{k <= min} C(n3,k) C(n2,k) C(n1,k) / C(n3+n2+n1+1,k) · Σ_j p_{k,j}(x) p_{k,j}(y)`
///
/// with `P = (n3+1)! (n2+1)! (n1+1)! (n3+n2+n1+1)! / ((n3+n2+1)! (n3+n1+1)! (n2+n1+1)!)`.
pub fn univariate_threefold_closed(n3: u32, n2: u32, n1: u32) -> Result<DiagonalKernelForm> {
    let (a, b, c) = (n3 as u64, n2 as u64, n1 as u64);
    let scale = q(
        factorial(a + 1) * factorial(b + 1) * factorial(c + 1) * factorial(a + b + c + 1),
        factorial(a + b + 1) * factorial(a + c + 1) * factorial(b + c + 1),
    );
    let mut terms = Vec::new();
    for k in 0..=n3.min(n2).min(n1) {
        let w = q(
            choose(n3, k) * choose(n2, k) * choose(n1, k),
            choose(n3 + n2 + n1 + 1, k),
        );
        for j in 0..=k {
            terms.push((MultiIndex::new(vec![k - j, j])?, w.clone()));
        }
    }
    DiagonalKernelForm::new(1, scale, terms)
}

/// `p_{k,i}(x) = C(k,i) x^i (1-x)^{k-i}` as a cartesian polynomial.
fn univariate_bernstein(k: u32, i: u32) -> CartesianPolynomial {
    let x = CartesianPolynomial::variable(1, 1);
    let one_minus_x = &CartesianPolynomial::one(1) - &x;
    (&x.pow(i) * &one_minus_x.pow(k - i)).scale(&whole(choose(k, i)))
}

/// Univariate `M_m ∘ M_n` kernel in Legendre form, expanded canonically:
///
/// `Σ_{k <= min(m,n)} m^{k̲}/(m+k+1)^{k̲} · n^{k̲}/(n+k+1)^{k̲} · (2k+1) · L_k(x) L_k(y)`
///
/// where `L_k = Σ_i (-1)^i C(k,i) p_{k,i}` is the shifted Legendre polynomial.
pub fn kernel_legendre(m: u32, n: u32) -> Result<KernelPolynomial> {
    let mut kernel = KernelPolynomial::zero(1);
    for k in 0..=m.min(n) {
        let (mi, ni, ki) = (m as i64, n as i64, k as i64);
        let weight = Rational::new(falling_factorial(mi, k), falling_factorial(mi + ki + 1, k))
            * Rational::new(falling_factorial(ni, k), falling_factorial(ni + ki + 1, k))
            * Rational::from_integer(BigInt::from(2 * k + 1));
        let mut legendre = CartesianPolynomial::zero(1);
        for i in 0..=k {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let c = Rational::from_integer(BigInt::from(choose(k, i)) * sign);
            legendre = &legendre + &univariate_bernstein(k, i).scale(&c);
        }
        kernel.add_tensor(&legendre, &legendre, &weight);
    }
    Ok(kernel)
}
