use crate::error::{Error, Result};
use crate::ledger;
use crate::matrix::DenseMatrix;

use super::assembly::SparseFactorSet;
use super::pattern::SparsityPattern;

/// Entrywise product of two compressed factor sets, direction by
/// direction: `m n^d` multiplications per direction.
pub fn hadamard_evaluate(
    basis: &SparseFactorSet,
    operand: &SparseFactorSet,
) -> Result<SparseFactorSet> {
    if basis.dim() != operand.dim()
        || basis.rows_size_1d() != operand.rows_size_1d()
        || basis.columns_size_1d() != operand.columns_size_1d()
    {
        return Err(Error::invalid(format!(
            "factor sets differ: d={} m={} n={} vs d={} m={} n={}",
            basis.dim(),
            basis.rows_size_1d(),
            basis.columns_size_1d(),
            operand.dim(),
            operand.rows_size_1d(),
            operand.columns_size_1d()
        )));
    }
    let factors = basis
        .factors()
        .iter()
        .zip(operand.factors())
        .map(|(a, c)| {
            let (rows, cols) = a.shape();
            let values: Vec<f64> = a
                .as_slice()
                .iter()
                .zip(c.as_slice())
                .map(|(x, y)| x * y)
                .collect();
            ledger::count_multiplications(values.len() as u64);
            DenseMatrix::from_vec(rows, cols, values)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseFactorSet::new(
        basis.rows_size_1d(),
        basis.columns_size_1d(),
        factors,
    ))
}

/// `[(A_j ∘ C) 1]` for every direction `j`: row sums of each compressed
/// factor, one vector of length `m n^{d-1}` per direction.
pub fn hadamard_row_sum(
    product: &SparseFactorSet,
    pattern: &SparsityPattern,
) -> Result<Vec<Vec<f64>>> {
    if !product.matches(pattern) {
        return Err(Error::invalid("factor set does not match the pattern"));
    }
    Ok(product
        .factors()
        .iter()
        .map(DenseMatrix::row_sums)
        .collect())
}
