use crate::error::{Error, Result};
use crate::ledger::Tracked;
use crate::tensor_index::TensorLayout;

/// Row/column positions of the structural nonzeros of the `d` Kronecker
/// factors `W ⊗ … ⊗ B ⊗ … ⊗ W`, one per placement of the dense `m x n`
/// factor `B`.
///
/// Entry `a = R * n + l` holds, for every direction `j`, the dense row `R`
/// and the column of its `l`-th nonzero (ascending). Direction `j`'s rows
/// live in a layout with extent `m` in direction `j` and `n` elsewhere; the
/// columns always live in the `n^d` volume layout.
#[derive(Clone, Debug, PartialEq)]
pub struct SparsityPattern {
    d: usize,
    rows_size_1d: usize,
    columns_size_1d: usize,
    row_layouts: Vec<TensorLayout>,
    column_layout: TensorLayout,
    rows: Vec<usize>,
    columns: Vec<usize>,
    tracked: Tracked,
}

impl SparsityPattern {
    pub fn dim(&self) -> usize {
        self.d
    }

    /// `m`, the row extent of the dense 1D factor.
    pub fn rows_size_1d(&self) -> usize {
        self.rows_size_1d
    }

    /// `n`, the column extent of the dense 1D factor.
    pub fn columns_size_1d(&self) -> usize {
        self.columns_size_1d
    }

    pub fn is_volume(&self) -> bool {
        self.rows_size_1d == self.columns_size_1d
    }

    /// Number of stored positions per direction, `m n^d`.
    pub fn len(&self) -> usize {
        self.rows.len() / self.d
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Rows of each Kronecker factor, `m n^{d-1}`.
    pub fn row_len(&self) -> usize {
        self.len() / self.columns_size_1d
    }

    /// Columns of each Kronecker factor, `n^d`.
    pub fn column_len(&self) -> usize {
        self.column_layout.len()
    }

    pub fn row_layout(&self, direction: usize) -> &TensorLayout {
        &self.row_layouts[direction]
    }

    pub fn column_layout(&self) -> &TensorLayout {
        &self.column_layout
    }

    /// Row indices of entry `a`, one per direction.
    #[inline]
    pub fn rows(&self, a: usize) -> &[usize] {
        &self.rows[a * self.d..(a + 1) * self.d]
    }

    #[inline]
    pub fn columns(&self, a: usize) -> &[usize] {
        &self.columns[a * self.d..(a + 1) * self.d]
    }

    #[inline]
    pub fn row(&self, a: usize, direction: usize) -> usize {
        self.rows[a * self.d + direction]
    }

    #[inline]
    pub fn column(&self, a: usize, direction: usize) -> usize {
        self.columns[a * self.d + direction]
    }

    /// `(row, column)` pairs of one direction in storage order.
    pub fn positions(&self, direction: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.len()).map(move |a| (self.row(a, direction), self.column(a, direction)))
    }

    /// Numbers held by the pattern (index entries).
    pub fn stored_numbers(&self) -> usize {
        self.rows.len() + self.columns.len()
    }
}

/// Builds the sparsity pattern for an `m x n` dense 1D factor in `d`
/// dimensions. The volume case is `m == n`.
///
/// For `d = 3, m = n` the enumeration order and index values are those of
/// the four nested loops `(i, j, k, l)`:
/// `row = i n² + j n + k`, `col_x = i n² + j n + l`, `col_y = i n² + l n + k`,
/// `col_z = l n² + j n + k`.
pub fn build_sparsity_pattern(
    rows_size_1d: usize,
    columns_size_1d: usize,
    d: usize,
) -> Result<SparsityPattern> {
    let (m, n) = (rows_size_1d, columns_size_1d);
    if m == 0 || n == 0 || d == 0 {
        return Err(Error::invalid(format!(
            "pattern extents must be positive (m={m}, n={n}, d={d})"
        )));
    }
    let overflow = || Error::Capacity {
        requested: usize::MAX,
        limit: usize::MAX,
    };
    let entries = (0..d)
        .try_fold(m, |acc, _| acc.checked_mul(n))
        .ok_or_else(overflow)?;
    let total = entries.checked_mul(d).ok_or_else(overflow)?;
    total.checked_mul(2).ok_or_else(overflow)?;

    let row_layouts = (0..d)
        .map(|j| TensorLayout::facet(d, n, m, j))
        .collect::<Result<Vec<_>>>()?;
    let column_layout = TensorLayout::cube(d, n)?;
    let row_len = entries / n;

    let mut rows = Vec::with_capacity(total);
    let mut columns = Vec::with_capacity(total);
    for row in 0..row_len {
        for l in 0..n {
            for (j, layout) in row_layouts.iter().enumerate() {
                rows.push(row);
                let mut col = 0;
                for k in 0..d {
                    let idx = if k == j { l } else { layout.component(row, k) };
                    col += idx * column_layout.strides()[k];
                }
                columns.push(col);
            }
        }
    }

    let tracked = Tracked::new(rows.len() + columns.len());
    Ok(SparsityPattern {
        d,
        rows_size_1d: m,
        columns_size_1d: n,
        row_layouts,
        column_layout,
        rows,
        columns,
        tracked,
    })
}
