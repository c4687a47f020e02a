//! The Bernstein–Durrmeyer operator
//! `(M_n f)(x) = Σ_{|α|=n} ⟨f, B_α⟩ / ⟨1, B_α⟩ B_α(x)` on exact polynomials.

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::combinat::{choose, factorial, indices_of_degree};
use crate::error::{BdkError, Result};
use crate::poly::{bernstein_basis, CartesianPolynomial};
use crate::rational::Rational;
use crate::simplex::{inner_one_bernstein, SimplexDim};

/// Degree `n >= 0` and simplex dimension `d >= 1` of an operator `M_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OperatorSpec {
    degree: u32,
    dim: SimplexDim,
}

impl OperatorSpec {
    pub fn new(degree: u32, d: usize) -> Result<Self> {
        Ok(OperatorSpec {
            degree,
            dim: SimplexDim::new(d)?,
        })
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dim.get()
    }
}

/// An operator with its degree-`n` basis expanded once, for repeated use.
#[derive(Debug, Clone)]
pub struct DurrmeyerOperator {
    spec: OperatorSpec,
    // (B_α, 1 / ⟨1, B_α⟩)
    basis: Vec<(CartesianPolynomial, Rational)>,
}

impl DurrmeyerOperator {
    pub fn new(spec: OperatorSpec) -> Self {
        let basis = indices_of_degree(spec.degree, spec.dim())
            .into_iter()
            .map(|a| {
                let norm = inner_one_bernstein(&a, spec.dim).expect("dims agree");
                (bernstein_basis(&a), norm.recip())
            })
            .collect();
        DurrmeyerOperator { spec, basis }
    }

    pub fn spec(&self) -> OperatorSpec {
        self.spec
    }

    pub fn apply(&self, f: &CartesianPolynomial) -> Result<CartesianPolynomial> {
        BdkError::check_dim(self.spec.dim(), f.dim())?;
        let parts: Vec<CartesianPolynomial> = self
            .basis
            .par_iter()
            .map(|(b, inv_norm)| {
                let w = f.inner_product(b).expect("dims agree") * inv_norm;
                b.scale(&w)
            })
            .collect();
        Ok(parts
            .iter()
            .fold(CartesianPolynomial::zero(f.dim()), |acc, p| &acc + p))
    }
}

pub fn apply_operator(spec: OperatorSpec, f: &CartesianPolynomial) -> Result<CartesianPolynomial> {
    BdkError::check_dim(spec.dim(), f.dim())?;
    DurrmeyerOperator::new(spec).apply(f)
}

/// Applies `specs` right to left, so `[M_m, M_n]` computes `M_m(M_n f)`.
/// An empty list returns `f` unchanged.
pub fn compose_apply(specs: &[OperatorSpec], f: &CartesianPolynomial) -> Result<CartesianPolynomial> {
    specs
        .iter()
        .rev()
        .try_fold(f.clone(), |acc, &spec| apply_operator(spec, &acc))
}

/// Coefficients `c_0, ..., c_{min(m,n)}` with `M_m ∘ M_n = Σ_k c_k M_k`:
///
/// `c_k = (m+d)! (n+d)! / (m+n+d)! · C(m,k) C(n,k) · k! / (k+d)!`.
pub fn composition_coefficients(m: u32, n: u32, d: usize) -> Result<Vec<Rational>> {
    SimplexDim::new(d)?;
    let d = d as u64;
    let (m64, n64) = (m as u64, n as u64);
    let prefactor = ratio_of(
        factorial(m64 + d) * factorial(n64 + d),
        factorial(m64 + n64 + d),
    );
    Ok((0..=m.min(n))
        .map(|k| {
            let binoms = choose(m, k) * choose(n, k);
            let tail = ratio_of(binoms * factorial(k as u64), factorial(k as u64 + d));
            &prefactor * tail
        })
        .collect())
}

fn ratio_of(num: num_bigint::BigUint, den: num_bigint::BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use num_traits::{One, Zero};

    fn spec(n: u32, d: usize) -> OperatorSpec {
        OperatorSpec::new(n, d).unwrap()
    }

    fn x(d: usize) -> CartesianPolynomial {
        CartesianPolynomial::variable(d, 1)
    }

    /// Monomials `x^e` with `|e| <= max_degree`.
    fn monomials(d: usize, max_degree: u32) -> Vec<CartesianPolynomial> {
        let mut out = Vec::new();
        for deg in 0..=max_degree {
            // reuse barycentric enumeration: drop part 0 of each multi-index
            for a in indices_of_degree(deg, d) {
                out.push(CartesianPolynomial::monomial(d, a.parts()[1..].to_vec(), Rational::one()));
            }
        }
        out.sort_by_key(|p| p.to_json());
        out.dedup();
        out
    }

    /// (M_n x)(x) by hand: Σ_k ⟨x, p_{n,k}⟩ (n+1) p_{n,k}(x), with
    /// ⟨x, p_{n,k}⟩ = C(n,k) B(k+2, n-k+1) = (k+1) / ((n+1)(n+2)).
    fn moment_by_hand(n: u32) -> CartesianPolynomial {
        let mut acc = CartesianPolynomial::zero(1);
        for k in 0..=n {
            let a = crate::combinat::MultiIndex::new(vec![n - k, k]).unwrap();
            let w = ratio(k as i64 + 1, n as i64 + 2);
            acc = &acc + &bernstein_basis(&a).scale(&w);
        }
        acc
    }

    #[test]
    fn reproduces_constants() {
        for d in 1..=3 {
            for n in 0..=6 {
                let one = CartesianPolynomial::one(d);
                assert_eq!(apply_operator(spec(n, d), &one).unwrap(), one);
            }
        }
    }

    #[test]
    fn first_moments() {
        assert_eq!(
            apply_operator(spec(1, 1), &x(1)).unwrap(),
            CartesianPolynomial::from_terms(1, [(vec![0], ratio(1, 3)), (vec![1], ratio(1, 3))]).unwrap()
        );
        assert_eq!(
            apply_operator(spec(2, 1), &x(1)).unwrap(),
            CartesianPolynomial::from_terms(1, [(vec![0], ratio(1, 4)), (vec![1], ratio(1, 2))]).unwrap()
        );
        for n in 0..=6 {
            assert_eq!(apply_operator(spec(n, 1), &x(1)).unwrap(), moment_by_hand(n));
        }
    }

    #[test]
    fn degree_zero_averages() {
        let f = CartesianPolynomial::from_terms(1, [(vec![3], int(4)), (vec![0], int(1))]).unwrap();
        let avg = f.integrate_simplex();
        assert_eq!(
            compose_apply(&[spec(0, 1)], &f).unwrap(),
            CartesianPolynomial::constant(1, avg)
        );
    }

    #[test]
    fn empty_composition_is_identity() {
        let f = x(2).pow(3);
        assert_eq!(compose_apply(&[], &f).unwrap(), f);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(apply_operator(spec(2, 2), &x(1)).is_err());
        assert!(compose_apply(&[spec(1, 1), spec(1, 2)], &x(1)).is_err());
        assert!(OperatorSpec::new(1, 0).is_err());
    }

    #[test]
    fn operators_commute_and_match_coefficients() {
        for d in 1..=2 {
            let fs = monomials(d, 3);
            for m in 0..=3 {
                for n in 0..=3 {
                    let c = composition_coefficients(m, n, d).unwrap();
                    let ops: Vec<_> = (0..=m.min(n)).map(|k| DurrmeyerOperator::new(spec(k, d))).collect();
                    for f in &fs {
                        let mn = compose_apply(&[spec(m, d), spec(n, d)], f).unwrap();
                        let nm = compose_apply(&[spec(n, d), spec(m, d)], f).unwrap();
                        assert_eq!(mn, nm);
                        let combo = ops.iter().zip(&c).fold(CartesianPolynomial::zero(d), |acc, (op, ck)| {
                            &acc + &op.apply(f).unwrap().scale(ck)
                        });
                        assert_eq!(mn, combo, "m={m} n={n} d={d}");
                    }
                }
            }
        }
    }

    #[test]
    fn self_adjoint_and_degree_bounded() {
        for d in 1..=2 {
            let fs = monomials(d, 3);
            for n in 0..=4 {
                let op = DurrmeyerOperator::new(spec(n, d));
                let images: Vec<_> = fs.iter().map(|f| op.apply(f).unwrap()).collect();
                for (f, mf) in fs.iter().zip(&images) {
                    assert!(mf.degree().unwrap_or(0) <= n);
                    assert_eq!(mf.integrate_simplex(), f.integrate_simplex());
                    for (g, mg) in fs.iter().zip(&images) {
                        assert_eq!(mf.inner_product(g).unwrap(), f.inner_product(mg).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(composition_coefficients(1, 1, 1).unwrap(), vec![ratio(2, 3), ratio(1, 3)]);
        assert_eq!(composition_coefficients(0, 5, 2).unwrap(), vec![int(1)]);
        for d in 1..=3 {
            for m in 0..=7 {
                for n in 0..=7 {
                    let c = composition_coefficients(m, n, d).unwrap();
                    assert_eq!(c.len() as u32, m.min(n) + 1);
                    assert!(c.iter().all(|v| v > &Rational::zero()));
                    assert_eq!(c.iter().sum::<Rational>(), Rational::one());
                }
            }
        }
        assert!(composition_coefficients(1, 1, 0).is_err());
    }
}
