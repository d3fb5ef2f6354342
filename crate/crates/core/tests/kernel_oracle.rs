//! Sum-factorized kernels checked against the dense brute-force path.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sumfac::hadamard::{
    assemble_basis_factors, assemble_operand_factors, build_sparsity_pattern, hadamard_evaluate,
    hadamard_row_sum, NodalStates, RankOne,
};
use sumfac::ledger::Probe;
use sumfac::operators_1d::{
    gauss_legendre, kronecker_apply, lagrange_diff_matrix, lagrange_interpolation_matrix,
    legendre_vandermonde_derivative, Factor1D, Operator1D,
};
use sumfac::oracle::{
    dense_basis_factor, dense_hadamard, dense_kronecker, dense_operand, dense_row_sums, gather_all,
    kron, relative_error, relative_error_vec, scatter, DEFAULT_MAX_ENTRIES,
};
use sumfac::DenseMatrix;

fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-2.0..2.0))
}

fn random_vec(rng: &mut impl Rng, len: usize, low: f64, high: f64) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(low..high)).collect()
}

fn nonzero_positions(m: &DenseMatrix) -> BTreeSet<(usize, usize)> {
    let mut set = BTreeSet::new();
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if m[(i, j)] != 0.0 {
                set.insert((i, j));
            }
        }
    }
    set
}

#[test]
fn pattern_equals_dense_kronecker_nonzeros() {
    for d in 1..=3 {
        for m in 1..=5 {
            for n in 1..=5 {
                let p = build_sparsity_pattern(m, n, d).unwrap();
                assert_eq!(p.len(), m * n.pow(d as u32));
                // strictly nonzero entries so the dense pattern is structural
                let basis = DenseMatrix::from_fn(m, n, |i, j| 1.0 + (i + 2 * j) as f64);
                let weights: Vec<f64> = (0..n).map(|i| 0.5 + i as f64).collect();
                for j in 0..d {
                    let dense = dense_basis_factor(&basis, &weights, d, j).unwrap();
                    let from_pattern: BTreeSet<_> = p.positions(j).collect();
                    assert_eq!(
                        from_pattern.len(),
                        p.len(),
                        "duplicates at d={d} m={m} n={n}"
                    );
                    assert_eq!(
                        from_pattern,
                        nonzero_positions(&dense),
                        "d={d} m={m} n={n} j={j}"
                    );
                }
            }
        }
    }
}

#[test]
fn assembled_basis_scatters_to_exact_kronecker_factor() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (d, n) in [(1, 4), (2, 3), (3, 2), (3, 4)] {
        let p = build_sparsity_pattern(n, n, d).unwrap();
        let basis = random_matrix(&mut rng, n, n);
        let weights = random_vec(&mut rng, n, 0.1, 2.0);
        let set = assemble_basis_factors(&p, &basis, &weights).unwrap();
        for j in 0..d {
            let dense = dense_basis_factor(&basis, &weights, d, j).unwrap();
            assert_eq!(scatter(&set, &p, j).unwrap(), dense, "d={d} n={n} j={j}");
        }
    }
}

#[test]
fn gauss_legendre_stiffness_factors_match_oracle_exactly() {
    let rule = gauss_legendre(2).unwrap();
    let diff = lagrange_diff_matrix(&rule).unwrap();
    let p = build_sparsity_pattern(2, 2, 3).unwrap();
    let set = assemble_basis_factors(&p, &diff, &rule.weights).unwrap();
    for j in 0..3 {
        let dense = dense_basis_factor(&diff, &rule.weights, 3, j).unwrap();
        assert_eq!(scatter(&set, &p, j).unwrap(), dense);
    }
}

#[test]
fn scatter_gather_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let p = build_sparsity_pattern(3, 4, 3).unwrap();
    let c_rows: Vec<Vec<f64>> = (0..3)
        .map(|_| random_vec(&mut rng, p.row_len(), -1.0, 1.0))
        .collect();
    let cols = random_vec(&mut rng, p.column_len(), -1.0, 1.0);
    let states = NodalStates::facet(c_rows.iter().map(Vec::as_slice).collect(), &cols).unwrap();
    let set = assemble_operand_factors(&p, &RankOne::from_states(states)).unwrap();
    let dense: Vec<DenseMatrix> = (0..3).map(|j| scatter(&set, &p, j).unwrap()).collect();
    assert_eq!(gather_all(&dense, &p).unwrap(), set);
}

#[test]
fn rank_one_operand_gathers_dense_operand() {
    let p = build_sparsity_pattern(2, 2, 2).unwrap();
    let c = [1.0, 2.0, 3.0, 4.0];
    let op = RankOne::new(&c);
    let set = assemble_operand_factors(&p, &op).unwrap();
    let dense = dense_operand(&op, 0, DEFAULT_MAX_ENTRIES).unwrap();
    for j in 0..2 {
        for (a, (r, col)) in p.positions(j).enumerate() {
            assert_eq!(set.factor(j).as_slice()[a], dense[(r, col)]);
        }
    }
}

#[test]
fn full_product_matches_dense_hadamard() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut instances = 0;
    for d in 1..=3usize {
        for n in 1..=5usize {
            let trials = if d == 3 && n == 5 { 4 } else { 14 };
            let p = build_sparsity_pattern(n, n, d).unwrap();
            for _ in 0..trials {
                let basis = random_matrix(&mut rng, n, n);
                let weights = random_vec(&mut rng, n, 0.1, 2.0);
                let c = random_vec(&mut rng, p.column_len(), 1e-8, 30.0);
                let op = RankOne::new(&c);
                let b = assemble_basis_factors(&p, &basis, &weights).unwrap();
                let o = assemble_operand_factors(&p, &op).unwrap();
                let product = hadamard_evaluate(&b, &o).unwrap();
                let cmat = dense_operand(&op, 0, DEFAULT_MAX_ENTRIES).unwrap();
                let sums = hadamard_row_sum(&product, &p).unwrap();
                for (j, row_sums) in sums.iter().enumerate() {
                    let k = dense_basis_factor(&basis, &weights, d, j).unwrap();
                    let dense = dense_hadamard(&k, &cmat).unwrap();
                    let got = scatter(&product, &p, j).unwrap();
                    assert!(relative_error(&got, &dense) <= 1e-13);
                    assert!(relative_error_vec(row_sums, &dense_row_sums(&dense)) <= 1e-13);
                }
                instances += 1;
            }
        }
    }
    assert!(instances >= 200, "{instances}");
}

#[test]
fn flop_count_is_exact() {
    for d in 1..=4usize {
        for (m, n) in [(1, 3), (2, 3), (4, 4), (5, 5)] {
            let p = build_sparsity_pattern(m, n, d).unwrap();
            let basis = DenseMatrix::from_fn(m, n, |i, j| (i + j) as f64);
            let b = assemble_basis_factors(&p, &basis, &vec![1.0; n]).unwrap();
            let c_rows = vec![1.0; p.row_len()];
            let cols = vec![1.0; p.column_len()];
            let states = NodalStates::facet(vec![c_rows.as_slice(); d], &cols).unwrap();
            let o = assemble_operand_factors(&p, &RankOne::from_states(states)).unwrap();
            let probe = Probe::start();
            hadamard_evaluate(&b, &o).unwrap();
            assert_eq!(probe.multiplications(), (d * m * n.pow(d as u32)) as u64);
        }
    }
}

#[test]
fn dense_baseline_costs_n_pow_2d() {
    for d in 1..=3usize {
        let n = 3usize;
        let k = DenseMatrix::zeros(n.pow(d as u32), n.pow(d as u32));
        let probe = Probe::start();
        dense_hadamard(&k, &k).unwrap();
        assert_eq!(probe.multiplications(), n.pow(2 * d as u32) as u64);
    }
}

#[test]
fn stored_numbers_stay_within_six_d_m_n_pow_d() {
    for (d, m, n) in [(2usize, 4usize, 4usize), (3, 2, 5), (3, 6, 6)] {
        let bound = 6 * d * m * n.pow(d as u32);
        let basis = DenseMatrix::from_fn(m, n, |i, j| (1 + i + j) as f64);
        let weights = vec![0.5; n];
        let rows = vec![1.5; m * n.pow(d as u32 - 1)];
        let cols = vec![2.0; n.pow(d as u32)];
        let probe = Probe::start();
        let p = build_sparsity_pattern(m, n, d).unwrap();
        let b = assemble_basis_factors(&p, &basis, &weights).unwrap();
        let states = NodalStates::facet(vec![rows.as_slice(); d], &cols).unwrap();
        let o = assemble_operand_factors(&p, &RankOne::from_states(states)).unwrap();
        let product = hadamard_evaluate(&b, &o).unwrap();
        let _sums = hadamard_row_sum(&product, &p).unwrap();
        assert!(
            probe.peak_numbers() <= bound,
            "{} > {bound}",
            probe.peak_numbers()
        );
        assert_eq!(
            p.stored_numbers() + b.stored_numbers() + o.stored_numbers() + product.stored_numbers(),
            5 * d * m * n.pow(d as u32)
        );
    }
}

#[test]
fn facet_interpolation_products_match_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for d in 2..=3usize {
        for n in 2..=5usize {
            let volume = gauss_legendre(n).unwrap();
            for m in 1..n {
                let facet = gauss_legendre(m).unwrap();
                let interp = lagrange_interpolation_matrix(&volume.nodes, &facet.nodes).unwrap();
                let p = build_sparsity_pattern(m, n, d).unwrap();
                let rows: Vec<Vec<f64>> = (0..d)
                    .map(|_| random_vec(&mut rng, p.row_len(), 1e-8, 30.0))
                    .collect();
                let cols = random_vec(&mut rng, p.column_len(), 1e-8, 30.0);
                let op = RankOne::from_states(
                    NodalStates::facet(rows.iter().map(Vec::as_slice).collect(), &cols).unwrap(),
                );
                let b = assemble_basis_factors(&p, &interp, &volume.weights).unwrap();
                let o = assemble_operand_factors(&p, &op).unwrap();
                let product = hadamard_evaluate(&b, &o).unwrap();
                for j in 0..d {
                    let k = dense_basis_factor(&interp, &volume.weights, d, j).unwrap();
                    let cmat = dense_operand(&op, j, DEFAULT_MAX_ENTRIES).unwrap();
                    let dense = dense_hadamard(&k, &cmat).unwrap();
                    let got = scatter(&product, &p, j).unwrap();
                    assert!(
                        relative_error(&got, &dense) <= 1e-13,
                        "d={d} n={n} m={m} j={j}"
                    );
                }
            }
        }
    }
}

#[test]
fn modal_route_gives_the_same_product() {
    // ∂ℓ/∂ξ = ∂χ/∂ξ Π, so either form of the 1D derivative feeds the kernel.
    let n = 5;
    let op = Operator1D::new(gauss_legendre(n).unwrap()).unwrap();
    let modal = legendre_vandermonde_derivative(&op.rule)
        .matmul(&op.projection)
        .unwrap();
    let p = build_sparsity_pattern(n, n, 3).unwrap();
    let c = operand(n.pow(3));
    let o = assemble_operand_factors(&p, &RankOne::new(&c)).unwrap();
    let nodal = hadamard_evaluate(
        &assemble_basis_factors(&p, &op.diff, &op.weights_diag).unwrap(),
        &o,
    )
    .unwrap();
    let via_modal = hadamard_evaluate(
        &assemble_basis_factors(&p, &modal, &op.weights_diag).unwrap(),
        &o,
    )
    .unwrap();
    for j in 0..3 {
        let a = nodal.factor(j);
        let b = via_modal.factor(j);
        assert!(relative_error(b, a) <= 1e-11);
    }
}

fn operand(len: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    random_vec(&mut rng, len, 1e-8, 30.0)
}

#[test]
fn diagonal_outer_factor_reduces_to_block_diagonal_products() {
    // (diag(a) ⊗ B) ∘ C = diag(a_1 [B ∘ C_11], …, a_n [B ∘ C_nn])
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 2..=4 {
        let a = random_vec(&mut rng, n, 0.5, 1.5);
        let b = random_matrix(&mut rng, n, n);
        let c = random_matrix(&mut rng, n * n, n * n);
        let full = dense_hadamard(&kron(&DenseMatrix::from_diagonal(&a), &b), &c).unwrap();
        for bi in 0..n {
            for bj in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let v = full[(bi * n + i, bj * n + j)];
                        if bi == bj {
                            assert_eq!(v, a[bi] * b[(i, j)] * c[(bi * n + i, bj * n + j)]);
                        } else {
                            assert_eq!(v, 0.0);
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn two_diagonal_factors_leave_n_pow_d_plus_one_nonzeros() {
    for n in 2..=4usize {
        let b = DenseMatrix::from_fn(n, n, |i, j| 1.0 + (i * n + j) as f64);
        let w: Vec<f64> = (0..n).map(|i| 1.0 + i as f64).collect();
        let c = DenseMatrix::from_fn(n.pow(3), n.pow(3), |i, j| 1.0 + ((i + j) % 7) as f64);
        for j in 0..3 {
            let k = dense_basis_factor(&b, &w, 3, j).unwrap();
            assert_eq!(dense_hadamard(&k, &c).unwrap().count_nonzeros(), n.pow(4));
        }
    }
}

fn dense_kronecker_apply(factors: &[DenseMatrix], v: &[f64]) -> Vec<f64> {
    dense_kronecker(factors).unwrap().matvec(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn kronecker_apply_matches_explicit_product(d in 1usize..=3, n in 2usize..=5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let factors: Vec<DenseMatrix> = (0..d).map(|_| random_matrix(&mut rng, n, n)).collect();
        let v = random_vec(&mut rng, n.pow(d as u32), -1.0, 1.0);
        let views: Vec<Factor1D<'_>> = factors.iter().map(Factor1D::Dense).collect();
        let probe = Probe::start();
        let fast = kronecker_apply(&views, &v).unwrap();
        prop_assert_eq!(probe.multiplications(), (d * n.pow(d as u32 + 1)) as u64);
        let slow = dense_kronecker_apply(&factors, &v);
        prop_assert!(relative_error_vec(&fast, &slow) <= 1e-12);
    }

    #[test]
    fn kronecker_apply_with_diagonal_and_rectangular_factors(n in 2usize..=4, m in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rect = random_matrix(&mut rng, m, n);
        let diag = random_vec(&mut rng, n, -1.0, 1.0);
        let v = random_vec(&mut rng, n * n, -1.0, 1.0);
        let fast = kronecker_apply(&[Factor1D::Diagonal(&diag), Factor1D::Dense(&rect)], &v).unwrap();
        let slow = dense_kronecker_apply(&[DenseMatrix::from_diagonal(&diag), rect.clone()], &v);
        prop_assert!(relative_error_vec(&fast, &slow) <= 1e-12);
    }
}

#[test]
fn four_dimensional_volume_and_facet_products_match_dense() {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    for n in 2..=3usize {
        for m in 1..=n {
            let p = build_sparsity_pattern(m, n, 4).unwrap();
            let basis = random_matrix(&mut rng, m, n);
            let weights = random_vec(&mut rng, n, 0.1, 2.0);
            let rows: Vec<Vec<f64>> = (0..4)
                .map(|_| random_vec(&mut rng, p.row_len(), 1e-8, 30.0))
                .collect();
            let cols = random_vec(&mut rng, p.column_len(), 1e-8, 30.0);
            let states = if m == n {
                NodalStates::volume(&cols)
            } else {
                NodalStates::facet(rows.iter().map(Vec::as_slice).collect(), &cols).unwrap()
            };
            let op = RankOne::from_states(states);
            let b = assemble_basis_factors(&p, &basis, &weights).unwrap();
            let o = assemble_operand_factors(&p, &op).unwrap();
            let product = hadamard_evaluate(&b, &o).unwrap();
            for j in 0..4 {
                let k = dense_basis_factor(&basis, &weights, 4, j).unwrap();
                let cmat = dense_operand(&op, j, DEFAULT_MAX_ENTRIES).unwrap();
                let dense = dense_hadamard(&k, &cmat).unwrap();
                assert!(relative_error(&scatter(&product, &p, j).unwrap(), &dense) <= 1e-13);
            }
        }
    }
}
