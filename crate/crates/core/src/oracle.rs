//! Brute-force reference path: explicit Kronecker products, dense Hadamard
//! products and the bridge between compressed factor sets and dense
//! matrices. Everything here costs `O(n^{2d})` on purpose.

use crate::error::{Error, Result};
use crate::hadamard::{SparseFactorSet, SparsityPattern, TwoPointOperand};
use crate::ledger;
use crate::matrix::DenseMatrix;

/// Largest dense matrix the oracle will build.
pub const DEFAULT_MAX_ENTRIES: usize = 100_000_000;

fn check_capacity(rows: usize, cols: usize, limit: usize) -> Result<()> {
    let requested = rows.saturating_mul(cols);
    if requested > limit {
        return Err(Error::Capacity { requested, limit });
    }
    Ok(())
}

/// Kronecker product where `factors[k]` acts on direction `k` of the
/// x-fastest layout:
/// `K[(r_0..r_{d-1}), (c_0..c_{d-1})] = ∏_k factors[k][r_k][c_k]`.
///
/// In conventional notation this is `factors[d-1] ⊗ … ⊗ factors[0]`.
pub fn dense_kronecker(factors: &[DenseMatrix]) -> Result<DenseMatrix> {
    dense_kronecker_capped(factors, DEFAULT_MAX_ENTRIES)
}

pub fn dense_kronecker_capped(factors: &[DenseMatrix], max_entries: usize) -> Result<DenseMatrix> {
    let (rows, cols) = kronecker_shape(factors, max_entries)?;
    let mut out = DenseMatrix::zeros(rows, cols);
    dense_kronecker_into(factors, &mut out)?;
    Ok(out)
}

fn kronecker_shape(factors: &[DenseMatrix], max_entries: usize) -> Result<(usize, usize)> {
    if factors.is_empty() {
        return Err(Error::invalid("need at least one factor"));
    }
    let rows = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.rows()));
    let cols = factors
        .iter()
        .try_fold(1usize, |acc, f| acc.checked_mul(f.cols()));
    match (rows, cols) {
        (Some(r), Some(c)) => {
            check_capacity(r, c, max_entries)?;
            Ok((r, c))
        }
        _ => Err(Error::Capacity {
            requested: usize::MAX,
            limit: max_entries,
        }),
    }
}

/// [`dense_kronecker`] into preallocated storage of the right shape.
pub fn dense_kronecker_into(factors: &[DenseMatrix], out: &mut DenseMatrix) -> Result<()> {
    let (rows, cols) = kronecker_shape(factors, usize::MAX)?;
    if out.shape() != (rows, cols) {
        return Err(Error::invalid(format!(
            "output {:?} does not match Kronecker shape ({rows}, {cols})",
            out.shape()
        )));
    }
    let row_digits = digit_table(factors.iter().map(DenseMatrix::rows), rows);
    let col_digits = digit_table(factors.iter().map(DenseMatrix::cols), cols);
    let d = factors.len();
    for r in 0..rows {
        let rd = &row_digits[r * d..(r + 1) * d];
        let out_row = out.row_mut(r);
        for (c, slot) in out_row.iter_mut().enumerate() {
            let cd = &col_digits[c * d..(c + 1) * d];
            let mut value = factors[0][(rd[0], cd[0])];
            for k in 1..d {
                value *= factors[k][(rd[k], cd[k])];
            }
            *slot = value;
        }
    }
    Ok(())
}

// Multi-index of every flat index, x fastest, stored flat-major.
fn digit_table(extents: impl Iterator<Item = usize> + Clone, len: usize) -> Vec<usize> {
    let extents: Vec<usize> = extents.collect();
    let mut table = Vec::with_capacity(len * extents.len());
    for mut flat in 0..len {
        for &e in &extents {
            table.push(flat % e);
            flat /= e;
        }
    }
    table
}

/// Conventional two-factor Kronecker product `A ⊗ B` with blocks `A_ij B`.
pub fn kron(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    DenseMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Entrywise product; counts `rows * cols` multiplications.
pub fn dense_hadamard(a: &DenseMatrix, c: &DenseMatrix) -> Result<DenseMatrix> {
    let mut out = DenseMatrix::zeros(a.rows(), a.cols());
    dense_hadamard_into(a, c, &mut out)?;
    Ok(out)
}

pub fn dense_hadamard_into(a: &DenseMatrix, c: &DenseMatrix, out: &mut DenseMatrix) -> Result<()> {
    if a.shape() != c.shape() || a.shape() != out.shape() {
        return Err(Error::invalid(format!(
            "Hadamard product of {:?} and {:?} into {:?}",
            a.shape(),
            c.shape(),
            out.shape()
        )));
    }
    out.as_mut_slice()
        .iter_mut()
        .zip(a.as_slice().iter().zip(c.as_slice()))
        .for_each(|(o, (x, y))| *o = x * y);
    ledger::count_multiplications(out.as_slice().len() as u64);
    Ok(())
}

pub fn dense_row_sums(a: &DenseMatrix) -> Vec<f64> {
    a.row_sums()
}

/// Materializes the operand `C` seen by `direction`.
pub fn dense_operand<C: TwoPointOperand + ?Sized>(
    operand: &C,
    direction: usize,
    max_entries: usize,
) -> Result<DenseMatrix> {
    let (rows, cols) = operand.index_spaces(direction);
    check_capacity(rows, cols, max_entries)?;
    let mut out = DenseMatrix::zeros(rows, cols);
    dense_operand_into(operand, direction, &mut out)?;
    Ok(out)
}

pub fn dense_operand_into<C: TwoPointOperand + ?Sized>(
    operand: &C,
    direction: usize,
    out: &mut DenseMatrix,
) -> Result<()> {
    if out.shape() != operand.index_spaces(direction) {
        return Err(Error::invalid(format!(
            "output {:?} does not match operand {:?}",
            out.shape(),
            operand.index_spaces(direction)
        )));
    }
    for i in 0..out.rows() {
        for (j, slot) in out.row_mut(i).iter_mut().enumerate() {
            *slot = operand.value(direction, i, j);
        }
    }
    Ok(())
}

/// The 1D factors of direction `direction`: `basis` in that slot and
/// `diag(weights)` everywhere else.
pub fn basis_factor_list(
    basis: &DenseMatrix,
    weights: &[f64],
    d: usize,
    direction: usize,
) -> Vec<DenseMatrix> {
    let diag = DenseMatrix::from_diagonal(weights);
    (0..d)
        .map(|k| {
            if k == direction {
                basis.clone()
            } else {
                diag.clone()
            }
        })
        .collect()
}

/// The dense Kronecker factor for `direction`.
pub fn dense_basis_factor(
    basis: &DenseMatrix,
    weights: &[f64],
    d: usize,
    direction: usize,
) -> Result<DenseMatrix> {
    dense_kronecker(&basis_factor_list(basis, weights, d, direction))
}

/// Expands direction `direction` of a compressed factor set into its dense
/// `(m n^{d-1}) x n^d` matrix.
pub fn scatter(
    sparse: &SparseFactorSet,
    pattern: &SparsityPattern,
    direction: usize,
) -> Result<DenseMatrix> {
    check_set(sparse, pattern, direction)?;
    let (rows, cols) = (pattern.row_len(), pattern.column_len());
    check_capacity(rows, cols, DEFAULT_MAX_ENTRIES)?;
    let mut dense = DenseMatrix::zeros(rows, cols);
    let mut filled = vec![false; rows * cols];
    let values = sparse.factor(direction).as_slice();
    for (a, &v) in values.iter().enumerate() {
        let (r, c) = (pattern.row(a, direction), pattern.column(a, direction));
        if std::mem::replace(&mut filled[r * cols + c], true) {
            return Err(Error::InternalConsistency(format!(
                "position ({r}, {c}) appears twice in direction {direction}"
            )));
        }
        dense[(r, c)] = v;
    }
    Ok(dense)
}

/// Compresses a dense matrix down to the pattern's positions for
/// `direction`; the inverse of [`scatter`].
pub fn gather(
    dense: &DenseMatrix,
    pattern: &SparsityPattern,
    direction: usize,
) -> Result<DenseMatrix> {
    if direction >= pattern.dim() {
        return Err(Error::invalid(format!("no direction {direction}")));
    }
    if dense.shape() != (pattern.row_len(), pattern.column_len()) {
        return Err(Error::invalid(format!(
            "dense matrix {:?} does not match pattern ({}, {})",
            dense.shape(),
            pattern.row_len(),
            pattern.column_len()
        )));
    }
    let values = pattern
        .positions(direction)
        .map(|(r, c)| dense[(r, c)])
        .collect();
    DenseMatrix::from_vec(pattern.row_len(), pattern.columns_size_1d(), values)
}

pub fn gather_all(dense: &[DenseMatrix], pattern: &SparsityPattern) -> Result<SparseFactorSet> {
    let factors = dense
        .iter()
        .enumerate()
        .map(|(j, m)| gather(m, pattern, j))
        .collect::<Result<Vec<_>>>()?;
    SparseFactorSet::from_factors(pattern.rows_size_1d(), pattern.columns_size_1d(), factors)
}

fn check_set(sparse: &SparseFactorSet, pattern: &SparsityPattern, direction: usize) -> Result<()> {
    if sparse.dim() != pattern.dim()
        || sparse.rows_size_1d() != pattern.rows_size_1d()
        || sparse.columns_size_1d() != pattern.columns_size_1d()
    {
        return Err(Error::invalid("factor set does not match the pattern"));
    }
    if direction >= pattern.dim() {
        return Err(Error::invalid(format!("no direction {direction}")));
    }
    Ok(())
}

/// `max |a - b| / max |b|`, with the denominator floored at 1e-300.
pub fn relative_error(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    match a.max_abs_diff(b) {
        Some(diff) => diff / b.max_abs().max(1e-300),
        None => f64::INFINITY,
    }
}

/// Vector analogue of [`relative_error`].
pub fn relative_error_vec(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let diff = a
        .iter()
        .zip(b)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = b.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    diff / scale.max(1e-300)
}
