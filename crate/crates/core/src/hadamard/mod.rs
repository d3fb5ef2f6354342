//! Sum-factorized Hadamard products `(A_1 ⊗ … ⊗ A_d) ∘ C` where all but one
//! Kronecker factor is diagonal.
//!
//! The work happens in three stages:
//!
//! 1. [`build_sparsity_pattern`] records the `m n^d` structural nonzeros of
//!    each direction's Kronecker factor. It depends only on `(m, n, d)` and
//!    can be reused.
//! 2. [`assemble_basis_factors`] and [`assemble_operand_factors`] gather the
//!    nonzeros of the basis factors and of `C` into `(m n^{d-1}) x n`
//!    matrices, one per direction.
//! 3. [`hadamard_evaluate`] multiplies the compressed matrices entrywise,
//!    `d m n^d` multiplications in total.
//!
//! The volume case has `m = n`. Facet (interpolation-only) products use a
//! rectangular `m x n` dense factor, with the remaining directions still
//! carrying the `n` volume weights.

mod assembly;
mod evaluate;
mod operand;
mod pattern;

pub use assembly::{assemble_basis_factors, assemble_operand_factors, SparseFactorSet};
pub use evaluate::{hadamard_evaluate, hadamard_row_sum};
pub use operand::{NodalStates, PairFunction, RankOne, TwoPointOperand};
pub use pattern::{build_sparsity_pattern, SparsityPattern};

use crate::error::Result;
use crate::matrix::DenseMatrix;

/// Runs assembly and evaluation for one dense 1D `basis`, diagonal `weights`
/// and operand over an existing pattern.
pub fn sum_factorized_hadamard<C: TwoPointOperand + ?Sized>(
    pattern: &SparsityPattern,
    basis: &DenseMatrix,
    weights: &[f64],
    operand: &C,
) -> Result<SparseFactorSet> {
    let basis = assemble_basis_factors(pattern, basis, weights)?;
    let operand = assemble_operand_factors(pattern, operand)?;
    hadamard_evaluate(&basis, &operand)
}
