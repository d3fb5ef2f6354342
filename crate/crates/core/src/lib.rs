//! Hadamard products of Kronecker-structured operators in `O(n^{d+1})`.
//!
//! For operators of the form `W ⊗ … ⊗ B ⊗ … ⊗ W` (one dense 1D factor `B`,
//! diagonal `W` elsewhere) the product with a dense `n^d x n^d` operand `C`
//! has only `n^{d+1}` structural nonzeros per direction. The [`hadamard`]
//! module assembles and evaluates exactly those entries; [`oracle`] does the
//! same with explicit dense matrices for testing and as a baseline.
//!
//! Any nodal tensor-product derivative, including modal bases after the
//! change of basis `∂ℓ/∂ξ = ∂χ/∂ξ Π`, has this form, which is why the
//! 1D operators in [`operators_1d`] are all that is needed to build `B`.

pub mod bench;
pub mod error;
pub mod flux;
pub mod hadamard;
pub mod ledger;
pub mod matrix;
pub mod operators_1d;
pub mod oracle;
pub mod tensor_index;

pub use error::{Error, Result};
pub use hadamard::{
    assemble_basis_factors, assemble_operand_factors, build_sparsity_pattern, hadamard_evaluate,
    hadamard_row_sum, sum_factorized_hadamard, NodalStates, PairFunction, RankOne, SparseFactorSet,
    SparsityPattern, TwoPointOperand,
};
pub use matrix::DenseMatrix;
pub use operators_1d::{Factor1D, Operator1D, QuadratureKind, QuadratureRule};
pub use tensor_index::TensorLayout;
