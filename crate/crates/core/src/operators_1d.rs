//! One-dimensional building blocks: quadrature rules, Lagrange
//! differentiation and interpolation matrices, the orthonormal Legendre
//! Vandermonde, the projection `Π` with `Π V = I`, and the sum-factorized
//! Kronecker matrix-vector product.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::ledger;
use crate::matrix::DenseMatrix;

const NEWTON_TOLERANCE: f64 = 1e-15;
const NEWTON_MAX_ITERATIONS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QuadratureKind {
    GaussLegendre,
    GaussLobattoLegendre,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Legendre polynomial `P_n(x)` and its derivative, by the three-term
/// recurrence.
pub fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    let (mut dp_prev, mut dp) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p_next = ((2.0 * kf + 1.0) * x * p - kf * p_prev) / (kf + 1.0);
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k
        let dp_next = dp_prev + (2.0 * kf + 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    (p, dp)
}

/// Gauss-Legendre rule: nodes are the roots of `P_n`.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::invalid(
            "Gauss-Legendre rule needs at least one node",
        ));
    }
    let mut nodes = vec![0.0; n];
    for (i, node) in nodes.iter_mut().enumerate() {
        // Chebyshev initial guess, ascending.
        let guess = -((2 * i + 1) as f64 * PI / (2 * n) as f64).cos();
        *node = newton(guess, i, |x| legendre(n, x))?;
    }
    symmetrize(&mut nodes);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (_, dp) = legendre(n, x);
            2.0 / ((1.0 - x * x) * dp * dp)
        })
        .collect();
    Ok(QuadratureRule {
        kind: QuadratureKind::GaussLegendre,
        nodes,
        weights,
    })
}

/// Gauss-Lobatto-Legendre rule: the endpoints plus the roots of `P'_{n-1}`.
pub fn gauss_lobatto(n: usize) -> Result<QuadratureRule> {
    if n < 2 {
        return Err(Error::invalid(
            "Gauss-Lobatto rule needs at least two nodes",
        ));
    }
    let order = n - 1;
    let of = order as f64;
    let mut nodes = vec![0.0; n];
    nodes[0] = -1.0;
    nodes[n - 1] = 1.0;
    for (i, node) in nodes.iter_mut().enumerate().take(order).skip(1) {
        let guess = -(PI * i as f64 / of).cos();
        *node = newton(guess, i, |x| {
            let (p, dp) = legendre(order, x);
            let ddp = (2.0 * x * dp - of * (of + 1.0) * p) / (1.0 - x * x);
            (dp, ddp)
        })?;
    }
    symmetrize(&mut nodes);
    let weights = nodes
        .iter()
        .map(|&x| {
            let (p, _) = legendre(order, x);
            2.0 / (of * (of + 1.0) * p * p)
        })
        .collect();
    Ok(QuadratureRule {
        kind: QuadratureKind::GaussLobattoLegendre,
        nodes,
        weights,
    })
}

fn newton(mut x: f64, index: usize, f: impl Fn(f64) -> (f64, f64)) -> Result<f64> {
    for _ in 0..NEWTON_MAX_ITERATIONS {
        let (value, slope) = f(x);
        if value.abs() <= NEWTON_TOLERANCE {
            return Ok(x);
        }
        let step = value / slope;
        x -= step;
        // Rounding in the recurrence can keep |value| just above the
        // tolerance for large n; a step at the resolution of x means we
        // are at the root.
        if step.abs() <= 4.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Ok(x);
        }
    }
    Err(Error::Numerical(format!(
        "root iteration for node {index} did not converge in {NEWTON_MAX_ITERATIONS} iterations"
    )))
}

fn symmetrize(nodes: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let half = 0.5 * (nodes[n - 1 - i] - nodes[i]);
        nodes[i] = -half;
        nodes[n - 1 - i] = half;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

fn barycentric_weights(nodes: &[f64]) -> Result<Vec<f64>> {
    let n = nodes.len();
    let mut w = vec![1.0; n];
    for j in 0..n {
        for k in 0..n {
            if k == j {
                continue;
            }
            let diff = nodes[j] - nodes[k];
            if diff == 0.0 {
                return Err(Error::invalid(format!(
                    "duplicate nodes at positions {k} and {j}"
                )));
            }
            w[j] *= diff;
        }
    }
    Ok(w.into_iter().map(|v| 1.0 / v).collect())
}

/// `D[i][j] = ℓ_j'(ξ_i)` for the Lagrange basis collocated on the rule's nodes.
pub fn lagrange_diff_matrix(rule: &QuadratureRule) -> Result<DenseMatrix> {
    lagrange_diff_matrix_on(&rule.nodes)
}

pub fn lagrange_diff_matrix_on(nodes: &[f64]) -> Result<DenseMatrix> {
    let n = nodes.len();
    let bary = barycentric_weights(nodes)?;
    let mut d = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let mut diagonal = 0.0;
        for j in 0..n {
            if i != j {
                let v = bary[j] / bary[i] / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                diagonal -= v;
            }
        }
        d[(i, i)] = diagonal;
    }
    Ok(d)
}

/// `I[p][j] = ℓ_j(points[p])`, an `m x n` interpolation matrix from the
/// nodal values on `nodes` to `points`.
pub fn lagrange_interpolation_matrix(nodes: &[f64], points: &[f64]) -> Result<DenseMatrix> {
    let n = nodes.len();
    let bary = barycentric_weights(nodes)?;
    let mut out = DenseMatrix::zeros(points.len(), n);
    for (p, &x) in points.iter().enumerate() {
        if let Some(j) = nodes.iter().position(|&xj| xj == x) {
            out[(p, j)] = 1.0;
            continue;
        }
        let terms: Vec<f64> = (0..n).map(|j| bary[j] / (x - nodes[j])).collect();
        let denom: f64 = terms.iter().sum();
        for (j, t) in terms.iter().enumerate() {
            out[(p, j)] = t / denom;
        }
    }
    Ok(out)
}

#[inline]
fn orthonormal_scale(k: usize) -> f64 {
    ((2 * k + 1) as f64 / 2.0).sqrt()
}

/// `V[i][k] = P̃_k(ξ_i)` with `P̃_k = sqrt((2k+1)/2) P_k` orthonormal on [-1,1].
pub fn legendre_vandermonde(rule: &QuadratureRule) -> DenseMatrix {
    let n = rule.len();
    DenseMatrix::from_fn(n, n, |i, k| {
        orthonormal_scale(k) * legendre(k, rule.nodes[i]).0
    })
}

/// Derivative of the orthonormal Legendre basis at the nodes, `χ'(ξ_i)`.
pub fn legendre_vandermonde_derivative(rule: &QuadratureRule) -> DenseMatrix {
    let n = rule.len();
    DenseMatrix::from_fn(n, n, |i, k| {
        orthonormal_scale(k) * legendre(k, rule.nodes[i]).1
    })
}

/// `Π = (Vᵀ W V)⁻¹ Vᵀ W`.
pub fn projection_operator(
    rule: &QuadratureRule,
    vandermonde: &DenseMatrix,
) -> Result<DenseMatrix> {
    if !vandermonde.is_square() || vandermonde.rows() != rule.len() {
        return Err(Error::invalid(format!(
            "Vandermonde of shape {:?} does not match a {}-point rule",
            vandermonde.shape(),
            rule.len()
        )));
    }
    let vt_w = vandermonde
        .transpose()
        .matmul(&DenseMatrix::from_diagonal(&rule.weights))?;
    let mass = vt_w.matmul(vandermonde)?;
    let mass_inv = mass
        .inverse()
        .map_err(|_| Error::Numerical("modal mass matrix is singular".into()))?;
    mass_inv.matmul(&vt_w)
}

/// The 1D operator bundle for one direction.
#[derive(Clone, Debug)]
pub struct Operator1D {
    pub rule: QuadratureRule,
    pub diff: DenseMatrix,
    pub vandermonde: DenseMatrix,
    pub projection: DenseMatrix,
    pub weights_diag: Vec<f64>,
}

impl Operator1D {
    pub fn new(rule: QuadratureRule) -> Result<Self> {
        let diff = lagrange_diff_matrix(&rule)?;
        let vandermonde = legendre_vandermonde(&rule);
        let projection = projection_operator(&rule, &vandermonde)?;
        let weights_diag = rule.weights.clone();
        Ok(Operator1D {
            rule,
            diff,
            vandermonde,
            projection,
            weights_diag,
        })
    }

    pub fn len(&self) -> usize {
        self.rule.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rule.is_empty()
    }

    /// `W D`, the 1D weighted differentiation (stiffness-like) matrix.
    pub fn weighted_diff(&self) -> DenseMatrix {
        self.diff
            .scale_rows(&self.weights_diag)
            .expect("weights match the operator size")
    }
}

/// One factor of a Kronecker product, acting on a single direction.
#[derive(Clone, Copy, Debug)]
pub enum Factor1D<'a> {
    Dense(&'a DenseMatrix),
    Diagonal(&'a [f64]),
    Identity(usize),
}

impl Factor1D<'_> {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            Factor1D::Dense(m) => m.shape(),
            Factor1D::Diagonal(d) => (d.len(), d.len()),
            Factor1D::Identity(n) => (*n, *n),
        }
    }
}

/// `(A_{d-1} ⊗ … ⊗ A_0) v` where `factors[k]` acts on direction `k` of the
/// x-fastest layout, applied one direction at a time.
///
/// Dense factors cost `rows * cols` multiplications per line, so square
/// `n x n` factors in all `d` directions cost exactly `d n^{d+1}`.
pub fn kronecker_apply(factors: &[Factor1D<'_>], v: &[f64]) -> Result<Vec<f64>> {
    if factors.is_empty() {
        return Err(Error::invalid("need at least one factor"));
    }
    let mut extents: Vec<usize> = factors.iter().map(|f| f.shape().1).collect();
    let expected: usize = extents.iter().product();
    if v.len() != expected {
        return Err(Error::invalid(format!(
            "vector of length {} does not match factor column extents {:?}",
            v.len(),
            extents
        )));
    }

    let mut current = v.to_vec();
    for (k, factor) in factors.iter().enumerate() {
        let inner: usize = extents[..k].iter().product();
        let outer: usize = extents[k + 1..].iter().product();
        let (rows, cols) = factor.shape();
        match factor {
            Factor1D::Identity(_) => {}
            Factor1D::Diagonal(diag) => {
                for o in 0..outer {
                    for (c, &a) in diag.iter().enumerate() {
                        let base = (o * cols + c) * inner;
                        current[base..base + inner].iter_mut().for_each(|x| *x *= a);
                    }
                }
                ledger::count_multiplications((outer * cols * inner) as u64);
            }
            Factor1D::Dense(a) => {
                let mut next = vec![0.0; outer * rows * inner];
                for o in 0..outer {
                    for r in 0..rows {
                        let out = &mut next[(o * rows + r) * inner..(o * rows + r + 1) * inner];
                        for (c, &coef) in a.row(r).iter().enumerate() {
                            let src = &current[(o * cols + c) * inner..(o * cols + c + 1) * inner];
                            out.iter_mut().zip(src).for_each(|(y, x)| *y += coef * x);
                        }
                    }
                }
                ledger::count_multiplications((outer * rows * cols * inner) as u64);
                current = next;
                extents[k] = rows;
            }
        }
    }
    Ok(current)
}
