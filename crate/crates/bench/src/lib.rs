//! Inputs shared by the criterion benchmarks.

use sumfac::bench::operand_vector;
use sumfac::operators_1d::{gauss_legendre, lagrange_diff_matrix};
use sumfac::{build_sparsity_pattern, DenseMatrix, Result, SparsityPattern};

/// Gauss-Legendre differentiation matrix, unit weights and a seeded
/// rank-one generator in `[1e-8, 30)`.
pub struct Fixture {
    pub d: usize,
    pub n: usize,
    pub diff: DenseMatrix,
    pub weights: Vec<f64>,
    pub c: Vec<f64>,
    pub pattern: SparsityPattern,
}

impl Fixture {
    pub fn new(d: usize, n: usize) -> Result<Self> {
        Ok(Fixture {
            d,
            n,
            diff: lagrange_diff_matrix(&gauss_legendre(n)?)?,
            weights: vec![1.0; n],
            c: operand_vector(0, d, n, 1e-8, 30.0),
            pattern: build_sparsity_pattern(n, n, d)?,
        })
    }
}
