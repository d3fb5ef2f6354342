//! Entropy-conservative flux differencing for inviscid Burgers on a single
//! periodic tensor-product element with Gauss-Lobatto (diagonal-norm SBP)
//! nodes.
//!
//! With `Q_j = W ⊗ … ⊗ W D ⊗ … ⊗ W` and `F_rk = f(u_r, u_k)` the semi-discrete
//! equation is
//!
//! ```text
//! ω_r du_r/dt = -2 Σ_j [(Q_j ∘ F) 1]_r - Σ_j B_j[r] (f*_r - u_r²/2)
//! ```
//!
//! where `B_j` carries the ±1 facet normals times the facet weights and `f*`
//! couples each node on the right face with its periodic partner on the
//! left face. The volume term runs through the sum-factorized kernel.

use crate::error::{Error, Result};
use crate::hadamard::{
    assemble_basis_factors, assemble_operand_factors, build_sparsity_pattern, hadamard_evaluate,
    hadamard_row_sum, PairFunction, SparseFactorSet, SparsityPattern,
};
use crate::matrix::DenseMatrix;
use crate::operators_1d::{gauss_lobatto, lagrange_diff_matrix, QuadratureKind, QuadratureRule};
use crate::oracle;
use crate::tensor_index::TensorLayout;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type TwoPointFlux = fn(f64, f64) -> f64;

/// Entropy-conservative two-point flux for Burgers with entropy `u²/2`.
pub fn ec_two_point_flux(a: f64, b: f64) -> f64 {
    // (a² + b²) + ab keeps f(a, b) == f(b, a) bit for bit.
    (a * a + b * b + a * b) / 6.0
}

/// Arithmetic mean of the physical fluxes. Consistent and symmetric but
/// not entropy conservative.
pub fn naive_average_flux(a: f64, b: f64) -> f64 {
    0.5 * (0.5 * a * a + 0.5 * b * b)
}

pub fn burgers_flux(u: f64) -> f64 {
    0.5 * u * u
}

#[derive(Clone, Debug)]
pub struct BurgersState {
    pub d: usize,
    pub n: usize,
    pub u: Vec<f64>,
    pub rule: QuadratureRule,
}

impl BurgersState {
    /// State on the `n`-point Gauss-Lobatto tensor grid.
    pub fn new(d: usize, n: usize, u: Vec<f64>) -> Result<Self> {
        Self::with_rule(d, gauss_lobatto(n)?, u)
    }

    pub fn with_rule(d: usize, rule: QuadratureRule, u: Vec<f64>) -> Result<Self> {
        let n = rule.len();
        let expected = TensorLayout::cube(d, n)?.len();
        if u.len() != expected {
            return Err(Error::invalid(format!(
                "{} nodal values for {expected} nodes",
                u.len()
            )));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("state contains non-finite values"));
        }
        Ok(BurgersState { d, n, u, rule })
    }

    /// `S(u) = Σ_r ω_r u_r² / 2`.
    pub fn entropy(&self) -> f64 {
        let omega = tensor_weights(&self.rule.weights, self.d);
        omega
            .iter()
            .zip(&self.u)
            .map(|(w, u)| w * u * u / 2.0)
            .sum()
    }
}

fn tensor_weights(weights: &[f64], d: usize) -> Vec<f64> {
    let layout = TensorLayout::cube(d, weights.len()).expect("valid layout");
    (0..layout.len())
        .map(|r| (0..d).map(|k| weights[layout.component(r, k)]).product())
        .collect()
}

/// Operators for one `(d, n)` configuration, built once and reused across
/// residual evaluations.
#[derive(Clone, Debug)]
pub struct FluxDifferencing {
    d: usize,
    rule: QuadratureRule,
    weighted_diff: DenseMatrix,
    layout: TensorLayout,
    pattern: SparsityPattern,
    stiffness: SparseFactorSet,
    omega: Vec<f64>,
}

impl FluxDifferencing {
    pub fn new(d: usize, rule: QuadratureRule) -> Result<Self> {
        if rule.kind != QuadratureKind::GaussLobattoLegendre {
            return Err(Error::invalid(
                "flux differencing needs Gauss-Lobatto nodes for a diagonal-norm SBP operator",
            ));
        }
        let n = rule.len();
        let weighted_diff = lagrange_diff_matrix(&rule)?.scale_rows(&rule.weights)?;
        let pattern = build_sparsity_pattern(n, n, d)?;
        let stiffness = assemble_basis_factors(&pattern, &weighted_diff, &rule.weights)?;
        let omega = tensor_weights(&rule.weights, d);
        Ok(FluxDifferencing {
            d,
            layout: TensorLayout::cube(d, n)?,
            rule,
            weighted_diff,
            pattern,
            stiffness,
            omega,
        })
    }

    pub fn for_state(state: &BurgersState) -> Result<Self> {
        Self::new(state.d, state.rule.clone())
    }

    pub fn tensor_weights(&self) -> &[f64] {
        &self.omega
    }

    fn check_len(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.layout.len() {
            return Err(Error::invalid(format!(
                "{} nodal values for {} nodes",
                u.len(),
                self.layout.len()
            )));
        }
        Ok(())
    }

    /// `-(2/ω_r) Σ_j [(Q_j ∘ F) 1]_r` through the sum-factorized kernel.
    pub fn volume_residual(&self, u: &[f64], flux: TwoPointFlux) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let operand = assemble_operand_factors(&self.pattern, &PairFunction::new(flux, u))?;
        let product = hadamard_evaluate(&self.stiffness, &operand)?;
        let sums = hadamard_row_sum(&product, &self.pattern)?;
        Ok(self.finish_volume(&sums))
    }

    /// Same as [`volume_residual`](Self::volume_residual) with explicit
    /// `n^d x n^d` matrices.
    pub fn volume_residual_dense(&self, u: &[f64], flux: TwoPointFlux) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let f = oracle::dense_operand(&PairFunction::new(flux, u), 0, oracle::DEFAULT_MAX_ENTRIES)?;
        let sums = (0..self.d)
            .map(|j| {
                let q =
                    oracle::dense_basis_factor(&self.weighted_diff, &self.rule.weights, self.d, j)?;
                Ok(oracle::dense_row_sums(&oracle::dense_hadamard(&q, &f)?))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.finish_volume(&sums))
    }

    fn finish_volume(&self, sums: &[Vec<f64>]) -> Vec<f64> {
        (0..self.layout.len())
            .map(|r| {
                let total: f64 = sums.iter().map(|s| s[r]).sum();
                -2.0 * total / self.omega[r]
            })
            .collect()
    }

    /// Periodic facet coupling, already divided by `ω_r`.
    pub fn surface_residual(&self, u: &[f64], flux: TwoPointFlux) -> Result<Vec<f64>> {
        self.check_len(u)?;
        let n = self.rule.len();
        let w = &self.rule.weights;
        let mut out = vec![0.0; u.len()];
        for j in 0..self.d {
            for right in 0..u.len() {
                if self.layout.component(right, j) != n - 1 {
                    continue;
                }
                let left = self.layout.with_component(right, j, 0);
                let facet_weight: f64 = (0..self.d)
                    .filter(|&k| k != j)
                    .map(|k| w[self.layout.component(right, k)])
                    .product();
                let common = flux(u[left], u[right]);
                out[right] -= facet_weight * (common - burgers_flux(u[right]));
                out[left] += facet_weight * (common - burgers_flux(u[left]));
            }
        }
        for (o, w) in out.iter_mut().zip(&self.omega) {
            *o /= w;
        }
        Ok(out)
    }

    /// `du/dt`, volume plus periodic surface terms.
    pub fn time_derivative(&self, u: &[f64], flux: TwoPointFlux) -> Result<Vec<f64>> {
        let vol = self.volume_residual(u, flux)?;
        let surf = self.surface_residual(u, flux)?;
        Ok(vol.iter().zip(&surf).map(|(a, b)| a + b).collect())
    }

    /// `dS/dt = Σ_r ω_r u_r du_r/dt`.
    pub fn entropy_time_derivative(&self, u: &[f64], flux: TwoPointFlux) -> Result<f64> {
        let dudt = self.time_derivative(u, flux)?;
        Ok(self
            .omega
            .iter()
            .zip(u)
            .zip(&dudt)
            .map(|((w, u), du)| w * u * du)
            .sum())
    }

    /// `Σ_r ω_r du_r/dt`, the rate of change of the total conserved quantity.
    pub fn conservation_rate(&self, u: &[f64], flux: TwoPointFlux) -> Result<f64> {
        let dudt = self.time_derivative(u, flux)?;
        Ok(self.omega.iter().zip(&dudt).map(|(w, du)| w * du).sum())
    }
}

/// Volume term with the entropy-conservative flux.
pub fn volume_residual(state: &BurgersState) -> Result<Vec<f64>> {
    FluxDifferencing::for_state(state)?.volume_residual(&state.u, ec_two_point_flux)
}

/// `dS/dt` with the entropy-conservative flux and periodic self-coupling.
pub fn entropy_time_derivative(state: &BurgersState) -> Result<f64> {
    FluxDifferencing::for_state(state)?.entropy_time_derivative(&state.u, ec_two_point_flux)
}

/// Entropy and conservation statistics over random states for one `(d, n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropySurvey {
    pub d: usize,
    pub n: usize,
    pub states: usize,
    /// Largest `|dS/dt| / (1 + |S|)` with the entropy-conservative flux.
    pub max_entropy_rate: f64,
    /// Largest `|Σ ω_r du_r/dt|` with the entropy-conservative flux.
    pub max_conservation_rate: f64,
    /// States where the naive average flux gives `|dS/dt| > 1e-6`.
    pub naive_violations: usize,
}

impl EntropySurvey {
    pub fn naive_violation_fraction(&self) -> f64 {
        self.naive_violations as f64 / self.states as f64
    }
}

/// Evaluates `states` random states with values uniform in `[-1, 1)`.
pub fn entropy_survey(d: usize, n: usize, states: usize, seed: u64) -> Result<EntropySurvey> {
    let fd = FluxDifferencing::new(d, gauss_lobatto(n)?)?;
    let len = fd.layout.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut survey = EntropySurvey {
        d,
        n,
        states,
        max_entropy_rate: 0.0,
        max_conservation_rate: 0.0,
        naive_violations: 0,
    };
    for _ in 0..states {
        let u: Vec<f64> = (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s: f64 = fd.omega.iter().zip(&u).map(|(w, u)| w * u * u / 2.0).sum();
        let ds = fd.entropy_time_derivative(&u, ec_two_point_flux)?;
        let cons = fd.conservation_rate(&u, ec_two_point_flux)?;
        survey.max_entropy_rate = survey.max_entropy_rate.max(ds.abs() / (1.0 + s.abs()));
        survey.max_conservation_rate = survey.max_conservation_rate.max(cons.abs());
        if fd.entropy_time_derivative(&u, naive_average_flux)?.abs() > 1e-6 {
            survey.naive_violations += 1;
        }
    }
    Ok(survey)
}
