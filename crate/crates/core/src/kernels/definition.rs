//! Kernels expanded straight from the operator definition.
//!
//! These are the brute-force references for every closed form. They use
//! only Bernstein products integrated through the Dirichlet formula on
//! barycentric monomials.

use rayon::prelude::*;

use crate::combinat::{indices_of_degree, MultiIndex};
use crate::error::Result;
use crate::poly::{bernstein_basis, bernstein_value, BarycentricPoint, CartesianPolynomial};
use crate::rational::Rational;
use crate::simplex::{bernstein_product_integral_dirichlet, inner_one_bernstein_dirichlet, SimplexDim};

use super::KernelPolynomial;

struct Level {
    indices: Vec<MultiIndex>,
    basis: Vec<CartesianPolynomial>,
    // 1 / ⟨1, B_α⟩
    inv_norm: Vec<Rational>,
}

impl Level {
    fn new(degree: u32, d: SimplexDim) -> Self {
        let indices = indices_of_degree(degree, d.get());
        let basis = indices.iter().map(bernstein_basis).collect();
        let inv_norm = indices
            .iter()
            .map(|a| inner_one_bernstein_dirichlet(a, d).expect("dims agree").recip())
            .collect();
        Level {
            indices,
            basis,
            inv_norm,
        }
    }
}

/// Gram matrix `∫ B_a B_b` between two degree levels.
fn gram(rows: &Level, cols: &Level, d: SimplexDim) -> Vec<Vec<Rational>> {
    rows.indices
        .iter()
        .map(|a| {
            cols.indices
                .iter()
                .map(|b| bernstein_product_integral_dirichlet(a, b, d).expect("dims agree"))
                .collect()
        })
        .collect()
}

/// Σ_x-index B(x) ⊗ (Σ_y-index w B(y)), parallel over x-indices.
fn assemble(d: usize, x_level: &Level, y_level: &Level, weights: &[Vec<Rational>]) -> KernelPolynomial {
    let partials: Vec<KernelPolynomial> = x_level
        .basis
        .par_iter()
        .zip(weights.par_iter())
        .map(|(bx, row)| {
            let mut q = CartesianPolynomial::zero(d);
            for (by, w) in y_level.basis.iter().zip(row) {
                q = &q + &by.scale(w);
            }
            let mut k = KernelPolynomial::zero(d);
            k.add_tensor(bx, &q, &Rational::from_integer(1.into()));
            k
        })
        .collect();
    let mut total = KernelPolynomial::zero(d);
    for p in &partials {
        total.merge(p);
    }
    total
}

/// `K_{m,n}(x, y)` of `M_m ∘ M_n`:
/// `Σ_{|β|=m} Σ_{|α|=n} B_β(x) B_α(y) ∫B_α B_β / (⟨1,B_α⟩⟨1,B_β⟩)`.
pub fn kernel_definition_twofold(m: u32, n: u32, d: usize) -> Result<KernelPolynomial> {
    let sd = SimplexDim::new(d)?;
    let outer = Level::new(m, sd);
    let inner = Level::new(n, sd);
    let g = gram(&outer, &inner, sd);
    let weights: Vec<Vec<Rational>> = g
        .into_iter()
        .zip(&outer.inv_norm)
        .map(|(row, nb)| {
            row.into_iter()
                .zip(&inner.inv_norm)
                .map(|(p, na)| p * nb * na)
                .collect()
        })
        .collect();
    Ok(assemble(d, &outer, &inner, &weights))
}

/// `K_{n3,n2,n1}(x, y)` of `M_{n3} ∘ M_{n2} ∘ M_{n1}`, the triple sum
/// `Σ_γ Σ_β Σ_α B_γ(x) B_α(y) ⟨B_α,B_β⟩⟨B_β,B_γ⟩ / (⟨1,B_α⟩⟨1,B_β⟩⟨1,B_γ⟩)`
/// with `|γ| = n3`, `|β| = n2`, `|α| = n1`.
pub fn kernel_definition_threefold(n3: u32, n2: u32, n1: u32, d: usize) -> Result<KernelPolynomial> {
    let sd = SimplexDim::new(d)?;
    let gammas = Level::new(n3, sd);
    let betas = Level::new(n2, sd);
    let alphas = Level::new(n1, sd);
    let g_gb = gram(&gammas, &betas, sd);
    let g_ba = gram(&betas, &alphas, sd);
    let weights: Vec<Vec<Rational>> = g_gb
        .iter()
        .zip(&gammas.inv_norm)
        .map(|(row_gb, n_g)| {
            (0..alphas.indices.len())
                .map(|ai| {
                    let through_beta: Rational = row_gb
                        .iter()
                        .zip(&g_ba)
                        .zip(&betas.inv_norm)
                        .map(|((p_gb, row_ba), n_b)| p_gb * &row_ba[ai] * n_b)
                        .sum();
                    through_beta * n_g * &alphas.inv_norm[ai]
                })
                .collect()
        })
        .collect();
    Ok(assemble(d, &gammas, &alphas, &weights))
}

/// Pointwise value of the definitional two-fold kernel, summing all
/// `(β, α)` pairs at the given points without building polynomials.
pub fn eval_definition_twofold(
    m: u32,
    n: u32,
    x: &BarycentricPoint,
    y: &BarycentricPoint,
) -> Result<Rational> {
    let sd = SimplexDim::new(x.dim())?;
    crate::error::BdkError::check_dim(x.dim(), y.dim())?;
    let betas = indices_of_degree(m, sd.get());
    let alphas = indices_of_degree(n, sd.get());
    let mut total = Rational::from_integer(0.into());
    for b in &betas {
        let bx = bernstein_value(b, x)?;
        let nb = inner_one_bernstein_dirichlet(b, sd)?;
        for a in &alphas {
            let ay = bernstein_value(a, y)?;
            let na = inner_one_bernstein_dirichlet(a, sd)?;
            total += &bx * ay * bernstein_product_integral_dirichlet(a, b, sd)? / (&na * &nb);
        }
    }
    Ok(total)
}
