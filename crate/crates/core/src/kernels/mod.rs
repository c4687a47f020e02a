//! Integral kernels of Durrmeyer operators and their compositions.
//!
//! A kernel `K(x, y)` satisfies `(M f)(x) = ∫_{S^d} f(y) K(x, y) dy`. Two
//! shapes are used:
//!
//! - [`KernelPolynomial`]: the canonical bivariate expansion. Equality of two
//!   kernels is equality of these maps.
//! - [`DiagonalKernelForm`]: `scale · Σ_ℓ w_ℓ B_ℓ(x) B_ℓ(y)`, the structured
//!   closed forms.
//!
//! Definitional kernels (built from the operator definition by brute force)
//! live in [`definition`]; closed forms in [`closed`].

pub mod closed;
pub mod definition;
pub mod lemma;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::combinat::MultiIndex;
use crate::error::{BdkError, Result};
use crate::poly::{bernstein_basis, bernstein_value, BarycentricPoint, CartesianPolynomial};
use crate::rational::{fraction, Rational};
use crate::simplex::dirichlet;

pub use closed::{
    kernel_closed_twofold, kernel_legendre, kernel_single, univariate_threefold_closed,
    univariate_twofold_closed,
};
pub use definition::{
    eval_definition_twofold, kernel_definition_threefold, kernel_definition_twofold,
};
pub use lemma::inner_sum_lemma;

/// Canonical bivariate polynomial in `(x_1..x_d, y_1..y_d)`.
///
/// Keys are exponent vectors of length `2d`, x-block first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelPolynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

/// First monomial (in key order) where two kernels disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermDifference {
    pub x_exp: Vec<u32>,
    pub y_exp: Vec<u32>,
    pub left: Rational,
    pub right: Rational,
}

impl KernelPolynomial {
    pub fn zero(dim: usize) -> Self {
        KernelPolynomial {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: Rational) -> Self {
        let mut k = Self::zero(dim);
        k.add_term(vec![0; 2 * dim], c);
        k
    }

    /// `p(x) q(y)`.
    pub fn tensor(px: &CartesianPolynomial, qy: &CartesianPolynomial) -> Result<Self> {
        BdkError::check_dim(px.dim(), qy.dim())?;
        let mut k = Self::zero(px.dim());
        k.add_tensor(px, qy, &Rational::one());
        Ok(k)
    }

    /// `self += c · p(x) q(y)`; dimensions are the caller's responsibility.
    pub(crate) fn add_tensor(&mut self, px: &CartesianPolynomial, qy: &CartesianPolynomial, c: &Rational) {
        debug_assert!(px.dim() == self.dim && qy.dim() == self.dim);
        for (ex, cx) in px.terms() {
            let cx = cx * c;
            for (ey, cy) in qy.terms() {
                let mut key = Vec::with_capacity(2 * self.dim);
                key.extend_from_slice(ex);
                key.extend_from_slice(ey);
                self.add_term(key, &cx * cy);
            }
        }
    }

    fn add_term(&mut self, key: Vec<u32>, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
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

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(x exponents, y exponents, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &[u32], &Rational)> {
        self.terms.iter().map(|(k, c)| {
            let (x, y) = k.split_at(self.dim);
            (x, y, c)
        })
    }

    pub fn coefficient(&self, x_exp: &[u32], y_exp: &[u32]) -> Rational {
        let key: Vec<u32> = x_exp.iter().chain(y_exp).copied().collect();
        self.terms.get(&key).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        BdkError::check_dim(self.dim, other.dim)?;
        let mut out = self.clone();
        out.merge(other);
        Ok(out)
    }

    pub(crate) fn merge(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        KernelPolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// `K(y, x)`.
    pub fn swap_variables(&self) -> Self {
        let d = self.dim;
        KernelPolynomial {
            dim: d,
            terms: self
                .terms
                .iter()
                .map(|(k, c)| {
                    let mut s = k[d..].to_vec();
                    s.extend_from_slice(&k[..d]);
                    (s, c.clone())
                })
                .collect(),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.swap_variables() == *self
    }

    pub fn evaluate(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<Rational> {
        BdkError::check_dim(self.dim, x.dim())?;
        BdkError::check_dim(self.dim, y.dim())?;
        let coords: Vec<&Rational> = x.coords().iter().chain(y.coords()).collect();
        let mut total = Rational::zero();
        for (k, c) in &self.terms {
            let mut v = c.clone();
            for (&e, t) in k.iter().zip(&coords) {
                if e > 0 {
                    v *= num_traits::pow((*t).clone(), e as usize);
                }
            }
            total += v;
        }
        Ok(total)
    }

    /// `∫_{S^d} K(x, y) dy` as a polynomial in `x`.
    pub fn integrate_y(&self) -> CartesianPolynomial {
        let terms = self.terms.iter().map(|(k, c)| {
            let (x, y) = k.split_at(self.dim);
            (x.to_vec(), c * dirichlet(y, self.dim))
        });
        CartesianPolynomial::from_terms(self.dim, terms).expect("split keeps dimension")
    }

    /// Stochastic kernels integrate to the constant 1 in `y`.
    pub fn is_stochastic(&self) -> bool {
        self.integrate_y() == CartesianPolynomial::one(self.dim)
    }

    /// First differing monomial in canonical key order, or `None` if equal.
    pub fn first_difference(&self, other: &Self) -> Option<TermDifference> {
        let d = self.dim;
        let diff = |k: &Vec<u32>, l: Rational, r: Rational| TermDifference {
            x_exp: k[..d].to_vec(),
            y_exp: k[d..].to_vec(),
            left: l,
            right: r,
        };
        if self.dim != other.dim {
            // incomparable key spaces; report the dimensions through the constant term
            return Some(TermDifference {
                x_exp: Vec::new(),
                y_exp: Vec::new(),
                left: Rational::from_integer(BigInt::from(self.dim)),
                right: Rational::from_integer(BigInt::from(other.dim)),
            });
        }
        let mut a = self.terms.iter().peekable();
        let mut b = other.terms.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return None,
                (Some((ka, ca)), None) => return Some(diff(ka, (*ca).clone(), Rational::zero())),
                (None, Some((kb, cb))) => return Some(diff(kb, Rational::zero(), (*cb).clone())),
                (Some((ka, ca)), Some((kb, cb))) => match ka.cmp(kb) {
                    std::cmp::Ordering::Less => return Some(diff(ka, (*ca).clone(), Rational::zero())),
                    std::cmp::Ordering::Greater => {
                        return Some(diff(kb, Rational::zero(), (*cb).clone()))
                    }
                    std::cmp::Ordering::Equal => {
                        if ca != cb {
                            return Some(diff(ka, (*ca).clone(), (*cb).clone()));
                        }
                        a.next();
                        b.next();
                    }
                },
            }
        }
    }

    pub fn to_json(&self) -> String {
        let doc = KernelDoc {
            d: self.dim,
            form: KernelFormTag::Canonical,
            scale: Rational::one(),
            terms: self
                .terms()
                .map(|(x, y, c)| CanonicalTermDoc {
                    x: x.to_vec(),
                    y: y.to_vec(),
                    coef: c.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: KernelDoc<CanonicalTermDoc> = KernelDoc::parse(s, KernelFormTag::Canonical)?;
        let mut k = Self::zero(doc.d);
        for t in doc.terms {
            BdkError::check_dim(doc.d, t.x.len())?;
            BdkError::check_dim(doc.d, t.y.len())?;
            let key = t.x.into_iter().chain(t.y).collect();
            k.add_term(key, t.coef * &doc.scale);
        }
        Ok(k)
    }
}

/// `scale · Σ_ℓ weight_ℓ · B_ℓ(x) B_ℓ(y)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalKernelForm {
    dim: usize,
    scale: Rational,
    terms: Vec<(MultiIndex, Rational)>,
}

impl DiagonalKernelForm {
    pub fn new(dim: usize, scale: Rational, terms: Vec<(MultiIndex, Rational)>) -> Result<Self> {
        for (l, w) in &terms {
            BdkError::check_dim(dim, l.dim())?;
            if w.is_zero() {
                return Err(BdkError::invalid(format!("zero weight for index {l}")));
            }
        }
        Ok(DiagonalKernelForm { dim, scale, terms })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn scale(&self) -> &Rational {
        &self.scale
    }

    pub fn terms(&self) -> &[(MultiIndex, Rational)] {
        &self.terms
    }

    /// Same terms with a different prefactor.
    pub fn with_scale(mut self, scale: Rational) -> Self {
        self.scale = scale;
        self
    }

    /// Largest `|ℓ|` present; `None` for the empty form.
    pub fn max_index_degree(&self) -> Option<u32> {
        self.terms.iter().map(|(l, _)| l.degree()).max()
    }

    /// `ℓ ↦ scale · weight_ℓ`, merging repeated indices and dropping zeros.
    pub fn normalized(&self) -> BTreeMap<MultiIndex, Rational> {
        let mut out: BTreeMap<MultiIndex, Rational> = BTreeMap::new();
        for (l, w) in &self.terms {
            *out.entry(l.clone()).or_insert_with(Rational::zero) += w * &self.scale;
        }
        out.retain(|_, v| !v.is_zero());
        out
    }

    pub fn to_canonical(&self) -> KernelPolynomial {
        let mut k = KernelPolynomial::zero(self.dim);
        for (l, w) in &self.terms {
            let b = bernstein_basis(l);
            k.add_tensor(&b, &b, &(w * &self.scale));
        }
        k
    }

    /// Pointwise value without expanding to the canonical form.
    pub fn evaluate(&self, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<Rational> {
        BdkError::check_dim(self.dim, x.dim())?;
        BdkError::check_dim(self.dim, y.dim())?;
        let mut total = Rational::zero();
        for (l, w) in &self.terms {
            total += w * bernstein_value(l, x)? * bernstein_value(l, y)?;
        }
        Ok(total * &self.scale)
    }

    pub fn to_json(&self) -> String {
        let doc = KernelDoc {
            d: self.dim,
            form: KernelFormTag::Diagonal,
            scale: self.scale.clone(),
            terms: self
                .terms
                .iter()
                .map(|(l, w)| DiagonalTermDoc {
                    index: l.parts().to_vec(),
                    weight: w.clone(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: KernelDoc<DiagonalTermDoc> = KernelDoc::parse(s, KernelFormTag::Diagonal)?;
        let terms = doc
            .terms
            .into_iter()
            .map(|t| Ok((MultiIndex::new(t.index)?, t.weight)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(doc.d, doc.scale, terms)
    }
}

/// Evaluates a canonical kernel at `(x, y)`.
pub fn eval_kernel(k: &KernelPolynomial, x: &BarycentricPoint, y: &BarycentricPoint) -> Result<Rational> {
    k.evaluate(x, y)
}

/// Expands a diagonal form into its canonical polynomial.
pub fn to_canonical(form: &DiagonalKernelForm) -> KernelPolynomial {
    form.to_canonical()
}

fn doc_err(e: serde_json::Error) -> BdkError {
    BdkError::Document(e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KernelFormTag {
    Diagonal,
    Canonical,
}

#[derive(Serialize, Deserialize)]
struct KernelDoc<T> {
    d: usize,
    form: KernelFormTag,
    #[serde(with = "fraction")]
    scale: Rational,
    terms: Vec<T>,
}

#[derive(Deserialize)]
struct KernelHeader {
    form: KernelFormTag,
}

impl<T: serde::de::DeserializeOwned> KernelDoc<T> {
    fn parse(s: &str, expected: KernelFormTag) -> Result<Self> {
        let header: KernelHeader = serde_json::from_str(s).map_err(doc_err)?;
        if header.form != expected {
            return Err(BdkError::Document(format!(
                "expected form {expected:?}, found {:?}",
                header.form
            )));
        }
        let doc: KernelDoc<T> = serde_json::from_str(s).map_err(doc_err)?;
        if doc.d == 0 {
            return Err(BdkError::Document("d must be >= 1".into()));
        }
        Ok(doc)
    }
}

#[derive(Serialize, Deserialize)]
struct CanonicalTermDoc {
    x: Vec<u32>,
    y: Vec<u32>,
    #[serde(with = "fraction")]
    coef: Rational,
}

#[derive(Serialize, Deserialize)]
struct DiagonalTermDoc {
    index: Vec<u32>,
    #[serde(with = "fraction")]
    weight: Rational,
}
