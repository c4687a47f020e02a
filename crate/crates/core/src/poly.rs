//! Sparse exact polynomials in the cartesian variables `x_1, ..., x_d`.
//!
//! The barycentric coordinate `x_0` never appears in a stored term: it is
//! substituted as `1 - x_1 - ... - x_d` on construction. Homogeneous
//! barycentric expressions of different degrees therefore compare correctly.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::{multinomial, MultiIndex};
use crate::error::{BdkError, Result};
use crate::rational::{fraction, Rational};
use crate::simplex::dirichlet;

/// Exponent vector `(e_1, ..., e_d)` of a cartesian monomial.
pub type Exponent = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CartesianPolynomial {
    dim: usize,
    terms: BTreeMap<Exponent, Rational>,
}

impl CartesianPolynomial {
    pub fn zero(dim: usize) -> Self {
        CartesianPolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        Self::monomial(dim, vec![0; dim], c)
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Rational::one())
    }

    /// `coef * x^exp`. Panics if `exp.len() != dim`.
    pub fn monomial(dim: usize, exp: Exponent, coef: Rational) -> Self {
        assert_eq!(exp.len(), dim, "exponent length must equal dimension");
        let mut p = Self::zero(dim);
        p.add_term(exp, coef);
        p
    }

    /// The cartesian variable `x_i` for `1 <= i <= d`.
    pub fn variable(dim: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= dim, "variable index out of range");
        let mut e = vec![0; dim];
        e[i - 1] = 1;
        Self::monomial(dim, e, Rational::one())
    }

    /// Barycentric coordinate `x_ν`; `ν = 0` gives `1 - x_1 - ... - x_d`.
    pub fn barycentric(dim: usize, nu: usize) -> Self {
        if nu > 0 {
            return Self::variable(dim, nu);
        }
        let mut p = Self::one(dim);
        for i in 1..=dim {
            p = &p - &Self::variable(dim, i);
        }
        p
    }

    pub fn from_terms(
        dim: usize,
        terms: impl IntoIterator<Item = (Exponent, Rational)>,
    ) -> Result<Self> {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            BdkError::check_dim(dim, e.len())?;
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: &[u32]) -> Rational {
        self.terms.get(exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Adds `coef * x^exp` in place, dropping the term if it cancels.
    pub(crate) fn add_term(&mut self, exp: Exponent, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exp) {
            Entry::Vacant(v) => {
                v.insert(coef);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coef;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        BdkError::check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.checked_add(&other.scale(&-Rational::one()))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        BdkError::check_dim(self.dim, other.dim)?;
        let mut out = Self::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        CartesianPolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.dim), |acc, _| &acc * self)
    }

    /// Exact value at a point (which need not lie in the simplex).
    pub fn evaluate(&self, pt: &BarycentricPoint) -> Result<Rational> {
        BdkError::check_dim(self.dim, pt.dim())?;
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut v = c.clone();
            for (x, &k) in pt.coords.iter().zip(e) {
                if k > 0 {
                    v *= num_traits::pow(x.clone(), k as usize);
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// `∫_{S^d} p(x) dx`, termwise via the Dirichlet formula with `μ_0 = 0`.
    pub fn integrate_simplex(&self) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| c * dirichlet(e, self.dim))
            .sum()
    }

    /// `⟨f, g⟩ = ∫_{S^d} f g`.
    pub fn inner_product(&self, other: &Self) -> Result<Rational> {
        Ok(self.checked_mul(other)?.integrate_simplex())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&PolynomialDoc::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: PolynomialDoc =
            serde_json::from_str(s).map_err(|e| BdkError::Document(e.to_string()))?;
        doc.try_into()
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CartesianPolynomial> for &CartesianPolynomial {
            type Output = CartesianPolynomial;

            /// Panics on a dimension mismatch; use the `checked_*` form for
            /// untrusted operands.
            fn $method(self, rhs: &CartesianPolynomial) -> CartesianPolynomial {
                self.$checked(rhs).expect("polynomial dimensions must match")
            }
        }

        impl $tr for CartesianPolynomial {
            type Output = CartesianPolynomial;

            fn $method(self, rhs: CartesianPolynomial) -> CartesianPolynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, checked_add);
forward_binop!(Sub, sub, checked_sub);
forward_binop!(Mul, mul, checked_mul);

impl Neg for &CartesianPolynomial {
    type Output = CartesianPolynomial;

    fn neg(self) -> CartesianPolynomial {
        self.scale(&-Rational::one())
    }
}

/// Cartesian point `(x_1, ..., x_d)`; the coordinate `x_0` is always derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BarycentricPoint {
    coords: Vec<Rational>,
}

impl BarycentricPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(BdkError::invalid("a point needs at least one coordinate"));
        }
        Ok(BarycentricPoint { coords })
    }

    pub fn origin(dim: usize) -> Self {
        BarycentricPoint {
            coords: vec![Rational::zero(); dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    /// `x_0 = 1 - x_1 - ... - x_d`.
    pub fn x0(&self) -> Rational {
        Rational::one() - self.coords.iter().sum::<Rational>()
    }

    /// `(x_0, x_1, ..., x_d)`.
    pub fn barycentric(&self) -> Vec<Rational> {
        std::iter::once(self.x0())
            .chain(self.coords.iter().cloned())
            .collect()
    }

    pub fn in_simplex(&self) -> bool {
        self.barycentric().iter().all(|c| !c.is_negative())
    }
}

/// Value of `B_α` at a point straight from the barycentric product
/// `C(α) x_0^{α_0} ... x_d^{α_d}`, without expanding the polynomial.
pub fn bernstein_value(alpha: &MultiIndex, pt: &BarycentricPoint) -> Result<Rational> {
    BdkError::check_dim(alpha.dim(), pt.dim())?;
    let mut v = Rational::from_integer(BigInt::from(multinomial(alpha)));
    for (x, &k) in pt.barycentric().iter().zip(alpha.parts()) {
        if k > 0 {
            v *= num_traits::pow(x.clone(), k as usize);
        }
    }
    Ok(v)
}

/// `B_α(x) = C(α) x_0^{α_0} x_1^{α_1} ... x_d^{α_d}`, expanded cartesian.
pub fn bernstein_basis(alpha: &MultiIndex) -> CartesianPolynomial {
    let d = alpha.dim();
    let mut p = CartesianPolynomial::constant(d, Rational::from_integer(BigInt::from(multinomial(alpha))));
    let parts = alpha.parts();
    // x_1^{α_1} ... x_d^{α_d} is a single monomial
    let tail: Exponent = parts[1..].to_vec();
    p = p.checked_mul(&CartesianPolynomial::monomial(d, tail, Rational::one())).expect("same dim");
    if parts[0] > 0 {
        p = &p * &CartesianPolynomial::barycentric(d, 0).pow(parts[0]);
    }
    p
}

#[derive(Serialize, Deserialize)]
struct PolynomialDoc {
    d: usize,
    terms: Vec<TermDoc>,
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    exp: Vec<u32>,
    #[serde(with = "fraction")]
    coef: Rational,
}

impl From<&CartesianPolynomial> for PolynomialDoc {
    fn from(p: &CartesianPolynomial) -> Self {
        PolynomialDoc {
            d: p.dim,
            terms: p
                .terms
                .iter()
                .map(|(e, c)| TermDoc {
                    exp: e.clone(),
                    coef: c.clone(),
                })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialDoc> for CartesianPolynomial {
    type Error = BdkError;

    fn try_from(doc: PolynomialDoc) -> Result<Self> {
        if doc.d == 0 {
            return Err(BdkError::Document("d must be >= 1".into()));
        }
        CartesianPolynomial::from_terms(doc.d, doc.terms.into_iter().map(|t| (t.exp, t.coef)))
    }
}
