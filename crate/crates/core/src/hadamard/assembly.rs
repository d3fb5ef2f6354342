use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;

use super::operand::TwoPointOperand;
use super::pattern::SparsityPattern;

/// The nonzeros of the `d` Kronecker factors, compressed to `d` matrices
/// of shape `(m n^{d-1}) x n`. Entry `(R, l)` is the `l`-th nonzero of dense
/// row `R` in ascending column order.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseFactorSet {
    rows_size_1d: usize,
    columns_size_1d: usize,
    factors: Vec<DenseMatrix>,
}

impl SparseFactorSet {
    pub(crate) fn new(
        rows_size_1d: usize,
        columns_size_1d: usize,
        factors: Vec<DenseMatrix>,
    ) -> Self {
        SparseFactorSet {
            rows_size_1d,
            columns_size_1d,
            factors,
        }
    }

    /// Wraps externally built compressed factors, checking their shapes.
    pub fn from_factors(
        rows_size_1d: usize,
        columns_size_1d: usize,
        factors: Vec<DenseMatrix>,
    ) -> Result<Self> {
        let d = factors.len();
        if d == 0 {
            return Err(Error::invalid("need at least one factor"));
        }
        let expected = (
            rows_size_1d * columns_size_1d.pow(d as u32 - 1),
            columns_size_1d,
        );
        if let Some(j) = factors.iter().position(|f| f.shape() != expected) {
            return Err(Error::invalid(format!(
                "factor {j} has shape {:?}, expected {expected:?}",
                factors[j].shape()
            )));
        }
        Ok(Self::new(rows_size_1d, columns_size_1d, factors))
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn rows_size_1d(&self) -> usize {
        self.rows_size_1d
    }

    pub fn columns_size_1d(&self) -> usize {
        self.columns_size_1d
    }

    pub fn factor(&self, direction: usize) -> &DenseMatrix {
        &self.factors[direction]
    }

    pub fn factors(&self) -> &[DenseMatrix] {
        &self.factors
    }

    pub fn stored_numbers(&self) -> usize {
        self.factors.iter().map(|f| f.rows() * f.cols()).sum()
    }

    pub(crate) fn matches(&self, pattern: &SparsityPattern) -> bool {
        self.dim() == pattern.dim()
            && self.rows_size_1d == pattern.rows_size_1d()
            && self.columns_size_1d == pattern.columns_size_1d()
    }
}

/// Compresses `W ⊗ … ⊗ B ⊗ … ⊗ W` for every placement of the dense `m x n`
/// factor `basis`, with `W = diag(weights)` in the other `d - 1` directions.
///
/// Direction `j` stores `basis[r_j][c_j] · ∏_{k≠j} weights[r_k]` at
/// `(R, l)`. The product is taken in direction order so that it agrees
/// bit for bit with an explicit Kronecker product.
pub fn assemble_basis_factors(
    pattern: &SparsityPattern,
    basis: &DenseMatrix,
    weights: &[f64],
) -> Result<SparseFactorSet> {
    let (d, m, n) = (
        pattern.dim(),
        pattern.rows_size_1d(),
        pattern.columns_size_1d(),
    );
    if basis.shape() != (m, n) {
        return Err(Error::invalid(format!(
            "basis of shape {:?} does not match pattern ({m}x{n})",
            basis.shape()
        )));
    }
    if d > 1 && weights.len() != n {
        return Err(Error::invalid(format!(
            "{} weights for 1D size {n}",
            weights.len()
        )));
    }

    let factors = (0..d)
        .map(|j| {
            let layout = pattern.row_layout(j);
            let mut sparse = DenseMatrix::zeros(pattern.row_len(), n);
            let out = sparse.as_mut_slice();
            for (a, slot) in out.iter_mut().enumerate() {
                let row = pattern.row(a, j);
                let l = a % n;
                let mut value = 1.0;
                for k in 0..d {
                    let r_k = layout.component(row, k);
                    let factor = if k == j {
                        basis[(r_k, l)]
                    } else {
                        weights[r_k]
                    };
                    value = if k == 0 { factor } else { value * factor };
                }
                *slot = value;
            }
            sparse
        })
        .collect();
    Ok(SparseFactorSet::new(m, n, factors))
}

/// Gathers the operand `C` at the pattern's positions. Only `m n^d`
/// evaluations happen per direction; `C` is never materialized.
pub fn assemble_operand_factors<C: TwoPointOperand + ?Sized>(
    pattern: &SparsityPattern,
    operand: &C,
) -> Result<SparseFactorSet> {
    let (d, m, n) = (
        pattern.dim(),
        pattern.rows_size_1d(),
        pattern.columns_size_1d(),
    );
    let factors = (0..d)
        .map(|j| {
            let spaces = operand.index_spaces(j);
            if spaces != (pattern.row_len(), pattern.column_len()) {
                return Err(Error::invalid(format!(
                    "operand index spaces {spaces:?} in direction {j} do not match \
                     pattern ({}, {})",
                    pattern.row_len(),
                    pattern.column_len()
                )));
            }
            let mut sparse = DenseMatrix::zeros(pattern.row_len(), n);
            for (a, slot) in sparse.as_mut_slice().iter_mut().enumerate() {
                *slot = operand.value(j, pattern.row(a, j), pattern.column(a, j));
            }
            Ok(sparse)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SparseFactorSet::new(m, n, factors))
}
