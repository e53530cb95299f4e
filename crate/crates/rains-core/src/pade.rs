//! Upper bounds on probabilistic approximate distillable entanglement and the
//! supporting inequality checks: approximate e-bits, pseudo-continuity, the
//! dimension bound, and weak convexity.
//!
//! The distillation quantity itself is never computed — it involves an
//! optimization over free protocols that is out of scope — so every value
//! reported here is explicitly an upper bound. All values are in bits.

use serde::Serialize;

use crate::bipartite::{fidelity, max_entangled, CpMap, DensityMatrix};
use crate::divergence::{Divergence, RenyiOrder};
use crate::error::{Error, Result};
use crate::rains::{
    rains_divergence, rains_relative_entropy, regularized_rains, SolverConfig,
};
use crate::spectral::eigh;
use crate::tensor::hs_inner_re;
use crate::CMatrix;

/// Default α grid for the Rényi bound: each entry costs a full solver run,
/// and the bound is smooth in α, so a short geometric-ish grid suffices.
pub const DEFAULT_ALPHA_GRID: [f64; 7] = [1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0];

/// Numerical slack for inequalities whose two sides are, mathematically,
/// ordered by construction (certified upper bounds, data processing, exact
/// arithmetic): only rounding can violate them.
const EXACT_SLACK: f64 = 1e-9;

/// Binary entropy `h₂(ε) = −ε·log₂ ε − (1−ε)·log₂(1−ε)` with `0·log 0 = 0`.
pub fn binary_entropy(eps: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::range(format!(
            "binary entropy needs ε ∈ [0,1], got {eps}"
        )));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(eps) + term(1.0 - eps))
}

/// `(α/(α−1))·log₂(1/(1−ε))`: the order-α price of error ε.
fn renyi_correction(alpha: f64, eps: f64) -> f64 {
    alpha / (alpha - 1.0) * (1.0 / (1.0 - eps)).log2()
}

// ---------------------------------------------------------------------------
// Query and per-bound reports.
// ---------------------------------------------------------------------------

/// A state together with the error parameter and the α grid to scan.
#[derive(Debug, Clone)]
pub struct PadeQuery {
    rho: DensityMatrix,
    epsilon: f64,
    alpha_grid: Vec<f64>,
}

impl PadeQuery {
    /// Validates `ε ∈ [0,1)` and a nonempty grid of finite orders `> 1`.
    pub fn new(rho: DensityMatrix, epsilon: f64, alpha_grid: Vec<f64>) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::range(format!(
                "error parameter must lie in [0,1), got {epsilon}"
            )));
        }
        if alpha_grid.is_empty() {
            return Err(Error::range("alpha grid must be nonempty"));
        }
        if let Some(&bad) = alpha_grid.iter().find(|&&a| !a.is_finite() || a <= 1.0) {
            return Err(Error::range(format!(
                "alpha grid entries must be finite and > 1, got {bad}"
            )));
        }
        Ok(Self {
            rho,
            epsilon,
            alpha_grid,
        })
    }

    /// Query over [`DEFAULT_ALPHA_GRID`].
    pub fn with_default_grid(rho: DensityMatrix, epsilon: f64) -> Result<Self> {
        Self::new(rho, epsilon, DEFAULT_ALPHA_GRID.to_vec())
    }

    /// The state.
    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    /// The error parameter ε.
    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// The α grid.
    pub fn alpha_grid(&self) -> &[f64] {
        &self.alpha_grid
    }
}

/// One grid entry of the Rényi bound.
#[derive(Debug, Clone, Serialize)]
pub struct AlphaBound {
    /// Order α.
    pub alpha: f64,
    /// Certified `R̃_α(ρ)` (an upper bound on the infimum).
    pub renyi_value: f64,
    /// `(α/(α−1))·log₂(1/(1−ε))`.
    pub correction: f64,
    /// `renyi_value + correction`.
    pub bound: f64,
    /// Whether the solver met its stopping rule.
    pub converged: bool,
    /// Solver iterations.
    pub iterations: usize,
}

/// The Rényi upper bound scanned over the α grid.
#[derive(Debug, Clone, Serialize)]
pub struct RenyiBoundReport {
    /// Error parameter ε.
    pub epsilon: f64,
    /// Per-α entries in grid order.
    pub per_alpha: Vec<AlphaBound>,
    /// The grid order minimizing the bound.
    pub best_alpha: f64,
    /// The minimal bound over the grid.
    pub best_bound: f64,
}

/// `R̃_α(ρ) + (α/(α−1))·log₂(1/(1−ε))` for every grid α, with the minimizer.
pub fn pade_renyi_bound(q: &PadeQuery, cfg: &SolverConfig) -> Result<RenyiBoundReport> {
    let mut per_alpha = Vec::with_capacity(q.alpha_grid.len());
    for &alpha in &q.alpha_grid {
        let order = RenyiOrder::sandwiched(alpha)?;
        let solve = rains_divergence(&q.rho, Divergence::Renyi(order), cfg)?;
        let correction = renyi_correction(alpha, q.epsilon);
        per_alpha.push(AlphaBound {
            alpha,
            renyi_value: solve.value,
            correction,
            bound: solve.value + correction,
            converged: solve.converged,
            iterations: solve.iterations,
        });
    }
    let best = per_alpha
        .iter()
        .min_by(|a, b| a.bound.total_cmp(&b.bound))
        .expect("nonempty grid");
    let (best_alpha, best_bound) = (best.alpha, best.bound);
    Ok(RenyiBoundReport {
        epsilon: q.epsilon,
        per_alpha,
        best_alpha,
        best_bound,
    })
}

/// Single-shot weak-converse bound.
#[derive(Debug, Clone, Serialize)]
pub struct WeakConverseBound {
    /// Error parameter ε.
    pub epsilon: f64,
    /// Certified `R(ρ)`.
    pub r_value: f64,
    /// `(R(ρ) + h₂(ε)) / (1−ε)`.
    pub bound: f64,
    /// Whether the solver met its stopping rule.
    pub converged: bool,
}

/// `(R(ρ) + h₂(ε)) / (1−ε)`; stated for `ε ∈ [0, 1/2]`.
pub fn pade_weak_converse(
    rho: &DensityMatrix,
    epsilon: f64,
    cfg: &SolverConfig,
) -> Result<WeakConverseBound> {
    if !(0.0..=0.5).contains(&epsilon) {
        return Err(Error::range(format!(
            "weak converse is stated for ε ∈ [0, 1/2], got {epsilon}"
        )));
    }
    let solve = rains_relative_entropy(rho, cfg)?;
    Ok(WeakConverseBound {
        epsilon,
        r_value: solve.value,
        bound: weak_converse_from(solve.value, epsilon),
        converged: solve.converged,
    })
}

/// Arithmetic of the weak-converse bound given an already-computed `R(ρ)`.
fn weak_converse_from(r_value: f64, epsilon: f64) -> f64 {
    (r_value + binary_entropy(epsilon).expect("ε validated by caller")) / (1.0 - epsilon)
}

/// `log₂ min(d_A, d_B) + log₂(1/(1−ε))` for `ε ∈ (0,1)`.
pub fn dimension_bound(d_a: usize, d_b: usize, epsilon: f64) -> Result<f64> {
    if d_a == 0 || d_b == 0 {
        return Err(Error::dim("dimension bound needs positive local dimensions"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::range(format!(
            "dimension bound needs ε ∈ (0,1), got {epsilon}"
        )));
    }
    Ok((d_a.min(d_b) as f64).log2() + (1.0 / (1.0 - epsilon)).log2())
}

// ---------------------------------------------------------------------------
// Approximate e-bits and the measurement-channel witness.
// ---------------------------------------------------------------------------

/// The measurement channel `M(X) = Tr[Φ_d X]·|1⟩⟨1| + Tr[(I−Φ_d)X]·|0⟩⟨0|`,
/// sending a `d⊗d` system to a classical bit (as a `1⊗2` system).
pub fn ebit_test_channel(d: usize) -> Result<CpMap> {
    let phi = max_entangled(d)?;
    let n = d * d;
    // One Kraus operator per eigenvector of Φ_d: the λ=1 vector feeds |1⟩,
    // the λ=0 vectors feed |0⟩; their closure relation gives Σ K†K = I.
    let e = eigh(phi.state().mat());
    let mut kraus = Vec::with_capacity(n);
    for (j, &v) in e.vals.iter().enumerate() {
        let out_row = usize::from(v > 0.5);
        let mut k = CMatrix::zeros(2, n);
        for (i, z) in e.vecs.column(j).iter().enumerate() {
            k[(out_row, i)] = z.conj();
        }
        kraus.push(k);
    }
    CpMap::new((d, d), (1, 2), kraus)
}

/// Verification record of the approximate-e-bit inequality
/// `log₂ d ≤ R̃_α(Φ̃) + (α/(α−1))·log₂(1/(1−ε))` with `ε = 1 − F(Φ̃, Φ_d)`.
#[derive(Debug, Clone, Serialize)]
pub struct EbitCheckReport {
    /// Schmidt rank of the target.
    pub d: usize,
    /// Order α.
    pub alpha: f64,
    /// `1 − F(Φ̃, Φ_d)`.
    pub epsilon: f64,
    /// `log₂ d`.
    pub lhs: f64,
    /// Certified `R̃_α(Φ̃)`.
    pub renyi_value: f64,
    /// `(α/(α−1))·log₂(1/(1−ε))`.
    pub correction: f64,
    /// `renyi_value + correction`.
    pub rhs: f64,
    /// `rhs − lhs`; nonnegative up to rounding because the solver value is a
    /// certified upper bound.
    pub slack: f64,
    /// `D̃_α(M(Φ̃) ‖ M(σ*))` through the measurement channel: a lower-bound
    /// witness on `R̃_α(Φ̃)` by data processing.
    pub witness: f64,
    /// `renyi_value − witness`; nonnegative up to rounding.
    pub witness_slack: f64,
    /// `Tr[Φ_d σ*]`; at most `1/d` for PPT′ members.
    pub overlap: f64,
    /// All three orderings hold within [`EXACT_SLACK`].
    pub passed: bool,
    /// Whether the solver met its stopping rule.
    pub converged: bool,
}

/// Checks the approximate-e-bit inequality and evaluates the
/// measurement-channel chain as an independent witness.
pub fn approx_ebit_check(
    phi_tilde: &DensityMatrix,
    d: usize,
    alpha: f64,
    cfg: &SolverConfig,
) -> Result<EbitCheckReport> {
    let phi = max_entangled(d)?;
    if phi_tilde.dims() != (d, d) {
        return Err(Error::dim(format!(
            "approximate e-bit check needs a {d}⊗{d} state, got {:?}",
            phi_tilde.dims()
        )));
    }
    if alpha <= 1.0 {
        return Err(Error::range(format!(
            "approximate e-bit check needs α > 1, got {alpha}"
        )));
    }
    let epsilon = 1.0 - fidelity(phi_tilde, phi.state())?;
    if epsilon >= 1.0 {
        return Err(Error::range(
            "approximate e-bit check needs ε = 1 − F < 1 (nonzero overlap)",
        ));
    }
    let order = RenyiOrder::sandwiched(alpha)?;
    let solve = rains_divergence(phi_tilde, Divergence::Renyi(order), cfg)?;
    let lhs = (d as f64).log2();
    let correction = renyi_correction(alpha, epsilon);
    let rhs = solve.value + correction;
    let slack = rhs - lhs;

    // Independent witness: push both the state and the certified feasible
    // point through the measurement channel and re-evaluate the divergence on
    // the resulting classical bits. Data processing puts it below the
    // certified value; the PPT′ overlap fact keeps the overlap under 1/d.
    let channel = ebit_test_channel(d)?;
    let m_state = DensityMatrix::new(channel.apply(phi_tilde.as_op())?)?;
    let m_sigma = channel.apply(solve.sigma_star.sigma())?;
    let witness = Divergence::Renyi(order).evaluate(&m_state, &m_sigma)?;
    let witness_slack = solve.value - witness;
    let overlap = hs_inner_re(phi.state().mat(), solve.sigma_star.sigma().mat());

    let passed = slack >= -EXACT_SLACK
        && witness_slack >= -EXACT_SLACK
        && overlap <= 1.0 / d as f64 + EXACT_SLACK;
    Ok(EbitCheckReport {
        d,
        alpha,
        epsilon,
        lhs,
        renyi_value: solve.value,
        correction,
        rhs,
        slack,
        witness,
        witness_slack,
        overlap,
        passed,
        converged: solve.converged,
    })
}

// ---------------------------------------------------------------------------
// Pseudo-continuity and weak convexity.
// ---------------------------------------------------------------------------

/// Verification record of the pseudo-continuity inequality
/// `R̃_α(ρ₀) − R̃_β(ρ₁) ≥ (α/(α−1))·log₂ F(ρ₀,ρ₁)` with `α = β/(2β−1)`.
#[derive(Debug, Clone, Serialize)]
pub struct PseudoContinuityReport {
    /// Order β ∈ (1/2, 1).
    pub beta: f64,
    /// Conjugate order `α = β/(2β−1) > 1`.
    pub alpha: f64,
    /// Certified `R̃_α(ρ₀)`.
    pub value_alpha: f64,
    /// Certified `R̃_β(ρ₁)`.
    pub value_beta: f64,
    /// `F(ρ₀, ρ₁)`.
    pub fidelity: f64,
    /// `value_alpha − value_beta`.
    pub lhs: f64,
    /// `(α/(α−1))·log₂ F`; `−∞` at zero fidelity.
    pub rhs: f64,
    /// `lhs − rhs` (`+∞` when `rhs = −∞`).
    pub slack: f64,
    /// Budget: both sides carry one solver value.
    pub budget: f64,
    /// `slack ≥ −budget`.
    pub passed: bool,
    /// Whether both solves met the stopping rule.
    pub converged: bool,
}

/// Checks the pseudo-continuity inequality for a pair of states.
pub fn pseudo_continuity_check(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<PseudoContinuityReport> {
    if !(beta > 0.5 && beta < 1.0) {
        return Err(Error::range(format!(
            "pseudo-continuity needs β ∈ (1/2, 1), got {beta}"
        )));
    }
    let alpha = beta / (2.0 * beta - 1.0);
    let solve_a = rains_divergence(
        rho0,
        Divergence::Renyi(RenyiOrder::sandwiched(alpha)?),
        cfg,
    )?;
    let solve_b = rains_divergence(
        rho1,
        Divergence::Renyi(RenyiOrder::sandwiched(beta)?),
        cfg,
    )?;
    let f = fidelity(rho0, rho1)?;
    let lhs = solve_a.value - solve_b.value;
    let rhs = alpha / (alpha - 1.0) * f.log2();
    let slack = lhs - rhs;
    let budget = 2.0 * cfg.tol;
    Ok(PseudoContinuityReport {
        beta,
        alpha,
        value_alpha: solve_a.value,
        value_beta: solve_b.value,
        fidelity: f,
        lhs,
        rhs,
        slack,
        budget,
        passed: slack >= -budget,
        converged: solve_a.converged && solve_b.converged,
    })
}

/// Verification record of the weak-convexity inequality
/// `(1−ε)·log₂ d ≤ R(Φ̃) + h₂(ε)` with `ε = 1 − F(Φ̃, Φ_d) ≤ 1/2`.
#[derive(Debug, Clone, Serialize)]
pub struct WeakConvexityReport {
    /// Schmidt rank of the target.
    pub d: usize,
    /// `1 − F(Φ̃, Φ_d)`.
    pub epsilon: f64,
    /// `(1−ε)·log₂ d`.
    pub lhs: f64,
    /// Certified `R(Φ̃)`.
    pub r_value: f64,
    /// `R(Φ̃) + h₂(ε)`.
    pub rhs: f64,
    /// `rhs − lhs`; nonnegative up to rounding by the certified upper bound.
    pub slack: f64,
    /// `slack ≥ −EXACT_SLACK`.
    pub passed: bool,
    /// Whether the solver met its stopping rule.
    pub converged: bool,
}

/// Checks the weak-convexity inequality for a state near `Φ_d`.
pub fn weak_convexity_check(
    phi_tilde: &DensityMatrix,
    d: usize,
    cfg: &SolverConfig,
) -> Result<WeakConvexityReport> {
    let phi = max_entangled(d)?;
    if phi_tilde.dims() != (d, d) {
        return Err(Error::dim(format!(
            "weak convexity check needs a {d}⊗{d} state, got {:?}",
            phi_tilde.dims()
        )));
    }
    let epsilon = 1.0 - fidelity(phi_tilde, phi.state())?;
    if epsilon > 0.5 {
        return Err(Error::range(format!(
            "weak convexity is stated for ε ≤ 1/2, got ε = {epsilon}"
        )));
    }
    let solve = rains_relative_entropy(phi_tilde, cfg)?;
    let lhs = (1.0 - epsilon) * (d as f64).log2();
    let rhs = solve.value + binary_entropy(epsilon)?;
    let slack = rhs - lhs;
    Ok(WeakConvexityReport {
        d,
        epsilon,
        lhs,
        r_value: solve.value,
        rhs,
        slack,
        passed: slack >= -EXACT_SLACK,
        converged: solve.converged,
    })
}

// ---------------------------------------------------------------------------
// The assembled report.
// ---------------------------------------------------------------------------

/// All upper bounds for one query, cross-checked for internal consistency.
#[derive(Debug, Clone, Serialize)]
pub struct PadeBoundReport {
    /// Error parameter ε.
    pub epsilon: f64,
    /// The Rényi bound over the α grid.
    pub renyi: RenyiBoundReport,
    /// `(R(ρ) + h₂(ε)) / (1−ε)`.
    pub weak_converse_bound: f64,
    /// `log₂ min(d_A,d_B) + log₂(1/(1−ε))`; at ε = 0 the ε→0⁺ limit.
    pub dimension_bound: f64,
    /// `R(ρ)`: the strong-converse bound on the asymptotic rate.
    pub strong_converse_bound: f64,
    /// `R(ρ^{⊗ℓ})/ℓ` for ℓ = 1..=ell_max.
    pub regularized: Vec<f64>,
    /// The ε→0 limit of the weak-converse chain; coincides with the
    /// strong-converse value.
    pub asymptotic_weak_converse: f64,
    /// Whether every constituent solve met the stopping rule.
    pub converged: bool,
    /// Solver tolerance the consistency assertions were checked against.
    pub tol: f64,
}

/// Assembles every bound and asserts internal consistency: nonnegativity of
/// finite entries, a nonincreasing regularized sequence (within `2·tol`),
/// agreement of the strong-converse entry with the ℓ = 1 regularized entry,
/// and agreement of the asymptotic weak-converse value with `R(ρ)`.
///
/// The weak-converse entry restricts the query to `ε ∈ [0, 1/2]`.
pub fn full_report(q: &PadeQuery, ell_max: usize, cfg: &SolverConfig) -> Result<PadeBoundReport> {
    if q.epsilon > 0.5 {
        return Err(Error::range(format!(
            "the weak-converse entry is stated for ε ∈ [0, 1/2], got {}",
            q.epsilon
        )));
    }
    let (d_a, d_b) = q.rho.dims();
    let r_solve = rains_relative_entropy(&q.rho, cfg)?;
    let reg = regularized_rains(&q.rho, ell_max, cfg)?;
    let renyi = pade_renyi_bound(q, cfg)?;
    let weak_converse_bound = weak_converse_from(r_solve.value, q.epsilon);
    let dim_bound = if q.epsilon == 0.0 {
        (d_a.min(d_b) as f64).log2()
    } else {
        dimension_bound(d_a, d_b, q.epsilon)?
    };
    let asymptotic_weak_converse = weak_converse_from(r_solve.value, 0.0);

    let converged = r_solve.converged
        && reg.results.iter().all(|r| r.converged)
        && renyi.per_alpha.iter().all(|a| a.converged);
    let report = PadeBoundReport {
        epsilon: q.epsilon,
        renyi,
        weak_converse_bound,
        dimension_bound: dim_bound,
        strong_converse_bound: r_solve.value,
        regularized: reg.values.clone(),
        asymptotic_weak_converse,
        converged,
        tol: cfg.tol,
    };

    let mut finite_bounds = vec![
        report.weak_converse_bound,
        report.dimension_bound,
        report.strong_converse_bound,
        report.asymptotic_weak_converse,
    ];
    finite_bounds.extend(report.renyi.per_alpha.iter().map(|a| a.bound));
    finite_bounds.extend(report.regularized.iter().copied());
    if let Some(&bad) = finite_bounds
        .iter()
        .find(|&&v| v.is_finite() && v < -EXACT_SLACK)
    {
        return Err(Error::Inconsistent {
            context: format!("negative bound {bad} in the assembled report"),
        });
    }
    if let Some(w) = report
        .regularized
        .windows(2)
        .find(|w| w[1] > w[0] + 2.0 * cfg.tol)
    {
        return Err(Error::Inconsistent {
            context: format!(
                "regularized sequence increases: {} → {} exceeds the 2·tol allowance",
                w[0], w[1]
            ),
        });
    }
    if (report.strong_converse_bound - report.regularized[0]).abs() > 2.0 * cfg.tol {
        return Err(Error::Inconsistent {
            context: format!(
                "strong-converse entry {} disagrees with the ℓ=1 regularized entry {}",
                report.strong_converse_bound, report.regularized[0]
            ),
        });
    }
    if (report.asymptotic_weak_converse - report.strong_converse_bound).abs() > cfg.tol {
        return Err(Error::Inconsistent {
            context: format!(
                "asymptotic weak-converse value {} disagrees with R = {}",
                report.asymptotic_weak_converse, report.strong_converse_bound
            ),
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    use super::*;
    use crate::divergence::relative_entropy;
    use crate::random::{random_ppt_state, random_state};
    use crate::C64;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    /// Isotropic-family state `f·Φ₂ + (1−f)·(I−Φ₂)/3` on 2⊗2.
    fn isotropic(f: f64) -> DensityMatrix {
        let phi = max_entangled(2).unwrap().state().clone();
        let eye = CMatrix::identity(4, 4);
        let mat = phi.mat() * C64::new(f, 0.0)
            + (eye - phi.mat()) * C64::new((1.0 - f) / 3.0, 0.0);
        DensityMatrix::from_matrix(2, 2, mat).unwrap()
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference digits kept verbatim
    fn binary_entropy_matches_frozen_references() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 1.0, epsilon = 1e-15);
        // Frozen values from an independent arbitrary-precision evaluation.
        let frozen = [
            (0.05, 0.28639695711595613),
            (0.1, 0.46899559358928122),
            (0.11, 0.499915958164528),
            (0.25, 0.81127812445913286),
        ];
        for (e, want) in frozen {
            assert_abs_diff_eq!(binary_entropy(e).unwrap(), want, epsilon = 1e-15);
        }
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn query_validation_enforces_ranges() {
        let rho = isotropic(0.9);
        assert!(PadeQuery::new(rho.clone(), 1.0, vec![2.0]).is_err());
        assert!(PadeQuery::new(rho.clone(), -0.1, vec![2.0]).is_err());
        assert!(PadeQuery::new(rho.clone(), 0.1, vec![]).is_err());
        assert!(PadeQuery::new(rho.clone(), 0.1, vec![2.0, 1.0]).is_err());
        assert!(PadeQuery::new(rho.clone(), 0.1, vec![f64::INFINITY]).is_err());
        let q = PadeQuery::with_default_grid(rho, 0.0).unwrap();
        assert_eq!(q.alpha_grid(), DEFAULT_ALPHA_GRID);
    }

    #[test]
    fn dimension_bound_closed_forms() {
        // ε → 0⁺ limit of the 2⊗2 bound is one bit.
        assert_abs_diff_eq!(dimension_bound(2, 2, 1e-12).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(dimension_bound(2, 3, 0.5).unwrap(), 2.0, epsilon = 1e-12);
        assert_eq!(
            dimension_bound(2, 3, 0.5).unwrap(),
            dimension_bound(3, 2, 0.5).unwrap()
        );
        assert!(dimension_bound(2, 2, 0.0).is_err());
        assert!(dimension_bound(2, 2, 1.0).is_err());
    }

    #[test]
    fn renyi_bound_reduces_to_the_renyi_value_at_zero_error() {
        let phi = max_entangled(2).unwrap().state().clone();
        let q = PadeQuery::new(phi, 0.0, vec![1.5, 2.0]).unwrap();
        let rep = pade_renyi_bound(&q, &cfg()).unwrap();
        for entry in &rep.per_alpha {
            assert_eq!(entry.correction, 0.0);
            assert_abs_diff_eq!(entry.bound, 1.0, epsilon = 1e-3);
            assert!(entry.converged);
        }
        assert!(rep.best_bound <= rep.per_alpha.iter().map(|a| a.bound).fold(f64::INFINITY, f64::min) + 1e-15);
    }

    #[test]
    fn renyi_bound_shifts_by_the_exact_correction_in_epsilon() {
        // Identical seeds make the two solves bit-identical, so the bound
        // difference is exactly the closed-form correction term.
        let rho = isotropic(0.9);
        let q0 = PadeQuery::new(rho.clone(), 0.0, vec![2.0]).unwrap();
        let q1 = PadeQuery::new(rho, 0.25, vec![2.0]).unwrap();
        let b0 = pade_renyi_bound(&q0, &cfg()).unwrap();
        let b1 = pade_renyi_bound(&q1, &cfg()).unwrap();
        let shift = b1.per_alpha[0].bound - b0.per_alpha[0].bound;
        assert_abs_diff_eq!(
            shift,
            2.0 * (1.0_f64 / 0.75).log2(),
            epsilon = 1e-15
        );
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference digits kept verbatim
    fn renyi_bound_on_a_ppt_state_is_the_bare_correction() {
        let rho = random_ppt_state(2, 2, 7).unwrap();
        let q = PadeQuery::new(rho, 0.1, vec![2.0]).unwrap();
        let rep = pade_renyi_bound(&q, &cfg()).unwrap();
        // Frozen: 2·log₂(1/0.9).
        assert_abs_diff_eq!(rep.best_bound, 0.30400618689009997, epsilon = 1e-3);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference digits kept verbatim
    fn weak_converse_closed_forms() {
        let phi = max_entangled(2).unwrap().state().clone();
        let w = pade_weak_converse(&phi, 0.1, &cfg()).unwrap();
        // Frozen: (1 + h₂(0.1))/0.9.
        assert_abs_diff_eq!(w.bound, 1.6322173262103125, epsilon = 2e-3);
        assert!(w.converged);

        let ppt = random_ppt_state(2, 2, 11).unwrap();
        let w = pade_weak_converse(&ppt, 0.25, &cfg()).unwrap();
        // Frozen: h₂(0.25)/0.75.
        assert_abs_diff_eq!(w.bound, 1.0817041659455105, epsilon = 2e-3);

        let w0 = pade_weak_converse(&phi, 0.0, &cfg()).unwrap();
        assert_eq!(w0.bound, w0.r_value);
        assert!(pade_weak_converse(&phi, 0.6, &cfg()).is_err());
    }

    #[test]
    fn ebit_channel_measures_the_projector_overlap() {
        let channel = ebit_test_channel(2).unwrap();
        assert!(channel.tp_residual() <= 1e-12);

        let phi = max_entangled(2).unwrap().state().clone();
        let out = channel.apply(phi.as_op()).unwrap();
        assert_abs_diff_eq!(out.mat()[(1, 1)].re, 1.0, epsilon = 1e-12);
        assert!(out.mat()[(0, 0)].norm() <= 1e-12);

        let mixed = DensityMatrix::from_matrix(
            2,
            2,
            CMatrix::identity(4, 4) * C64::new(0.25, 0.0),
        )
        .unwrap();
        let out = channel.apply(mixed.as_op()).unwrap();
        assert_abs_diff_eq!(out.mat()[(1, 1)].re, 0.25, epsilon = 1e-12);
        assert_abs_diff_eq!(out.mat()[(0, 0)].re, 0.75, epsilon = 1e-12);
    }

    #[test]
    fn ebit_channel_satisfies_data_processing() {
        let channel = ebit_test_channel(2).unwrap();
        let omega = random_state(2, 2, 4, 21).unwrap();
        let tau = random_state(2, 2, 4, 22).unwrap();
        let before = relative_entropy(&omega, tau.as_op()).unwrap();
        let m_omega = DensityMatrix::new(channel.apply(omega.as_op()).unwrap()).unwrap();
        let m_tau = channel.apply(tau.as_op()).unwrap();
        let after = relative_entropy(&m_omega, &m_tau).unwrap();
        assert!(
            after <= before + 1e-10,
            "data processing violated: {after} > {before}"
        );
    }

    #[test]
    fn ebit_check_is_tight_on_the_maximally_entangled_state() {
        let phi = max_entangled(2).unwrap().state().clone();
        let rep = approx_ebit_check(&phi, 2, 2.0, &cfg()).unwrap();
        assert!(rep.epsilon.abs() <= 1e-12);
        assert!(rep.passed, "slack {}", rep.slack);
        assert!(rep.converged);
        assert!(rep.slack.abs() <= 2e-3, "tightness: slack {}", rep.slack);
        // The classical chain value at ε = 0 is exactly log₂ d.
        assert_abs_diff_eq!(rep.witness, 1.0, epsilon = 1e-6);
        assert!(rep.overlap <= 0.5 + 1e-9);
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference digits kept verbatim
    fn ebit_check_holds_on_the_depolarized_state() {
        let tilde = isotropic(0.95);
        for alpha in [1.5, 2.0, 4.0] {
            let rep = approx_ebit_check(&tilde, 2, alpha, &cfg()).unwrap();
            assert_abs_diff_eq!(rep.epsilon, 0.05, epsilon = 1e-12);
            assert!(rep.passed, "α = {alpha}: slack {}", rep.slack);
            assert!(rep.converged, "α = {alpha}");
        }
        // The witness dominates the classical divergence at overlap exactly
        // 1/d (frozen reference), since Tr[Φσ*] ≤ 1/d and the binary
        // divergence decreases in that overlap.
        let rep = approx_ebit_check(&tilde, 2, 2.0, &cfg()).unwrap();
        assert!(
            rep.witness >= 0.85598969730848066 - 1e-6,
            "witness {} below the frozen overlap-1/2 chain value",
            rep.witness
        );
    }

    #[test]
    fn ebit_check_is_trivial_on_the_maximally_mixed_state() {
        let mixed = DensityMatrix::from_matrix(
            2,
            2,
            CMatrix::identity(4, 4) * C64::new(0.25, 0.0),
        )
        .unwrap();
        let rep = approx_ebit_check(&mixed, 2, 2.0, &cfg()).unwrap();
        assert_abs_diff_eq!(rep.epsilon, 0.75, epsilon = 1e-12);
        assert!(rep.renyi_value <= 1e-6);
        assert!(rep.rhs >= 2.0 - 1e-6);
        assert!(rep.passed);
    }

    #[test]
    fn pseudo_continuity_accepts_equal_orthogonal_and_random_pairs() {
        let phi = max_entangled(2).unwrap().state().clone();
        let rep = pseudo_continuity_check(&phi, &phi, 0.75, &cfg()).unwrap();
        assert_abs_diff_eq!(rep.alpha, 1.5, epsilon = 1e-15);
        assert_eq!(rep.rhs, 0.0);
        assert!(rep.passed, "slack {}", rep.slack);

        // Orthogonal pure product states: the right side is −∞.
        let zero = DensityMatrix::from_pure(
            2,
            2,
            &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let three = DensityMatrix::from_pure(
            2,
            2,
            &[C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        )
        .unwrap();
        let rep = pseudo_continuity_check(&zero, &three, 0.75, &cfg()).unwrap();
        assert_eq!(rep.rhs, f64::NEG_INFINITY);
        assert!(rep.passed);

        let a = random_state(2, 2, 4, 31).unwrap();
        let b = random_state(2, 2, 4, 32).unwrap();
        let rep = pseudo_continuity_check(&a, &b, 0.75, &cfg()).unwrap();
        assert!(rep.passed, "slack {}", rep.slack);
        assert!(rep.converged);

        assert!(pseudo_continuity_check(&a, &b, 0.5, &cfg()).is_err());
        assert!(pseudo_continuity_check(&a, &b, 1.0, &cfg()).is_err());
    }

    #[test]
    fn weak_convexity_tight_at_phi_and_holds_depolarized() {
        let phi = max_entangled(2).unwrap().state().clone();
        let rep = weak_convexity_check(&phi, 2, &cfg()).unwrap();
        assert!(rep.passed, "slack {}", rep.slack);
        assert!(rep.slack.abs() <= 1e-3, "tightness: slack {}", rep.slack);

        let tilde = isotropic(0.9);
        let rep = weak_convexity_check(&tilde, 2, &cfg()).unwrap();
        assert_abs_diff_eq!(rep.epsilon, 0.1, epsilon = 1e-12);
        assert!(rep.passed, "slack {}", rep.slack);
        assert!(rep.converged);

        // ε = 3/4 for the maximally mixed state: out of the stated range.
        let mixed = DensityMatrix::from_matrix(
            2,
            2,
            CMatrix::identity(4, 4) * C64::new(0.25, 0.0),
        )
        .unwrap();
        assert!(weak_convexity_check(&mixed, 2, &cfg()).is_err());
    }

    #[test]
    #[allow(clippy::excessive_precision)] // frozen reference digits kept verbatim
    fn full_report_on_phi2_cross_checks_every_entry() {
        let phi = max_entangled(2).unwrap().state().clone();
        let q = PadeQuery::new(phi, 0.1, vec![1.5, 2.0]).unwrap();
        let rep = full_report(&q, 2, &cfg()).unwrap();
        assert!(rep.converged);
        for entry in &rep.renyi.per_alpha {
            assert!(entry.bound >= 1.0 - 1e-9, "Rényi bound {}", entry.bound);
        }
        assert_abs_diff_eq!(rep.weak_converse_bound, 1.6322173262103125, epsilon = 2e-3);
        assert_abs_diff_eq!(
            rep.dimension_bound,
            1.0 + (1.0_f64 / 0.9).log2(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(rep.strong_converse_bound, 1.0, epsilon = 1e-3);
        assert_eq!(rep.regularized.len(), 2);
        assert!(rep.regularized[1] <= rep.regularized[0] + 2.0 * rep.tol);
        assert_eq!(rep.asymptotic_weak_converse, rep.strong_converse_bound);
    }

    #[test]
    fn full_report_on_a_ppt_state_reduces_to_closed_forms() {
        let rho = random_ppt_state(2, 2, 13).unwrap();
        let q = PadeQuery::new(rho, 0.25, vec![2.0]).unwrap();
        let rep = full_report(&q, 1, &cfg()).unwrap();
        let tol2 = 2.0 * rep.tol;
        assert!(rep.strong_converse_bound <= tol2);
        assert_abs_diff_eq!(
            rep.renyi.best_bound,
            2.0 * (1.0_f64 / 0.75).log2(),
            epsilon = tol2
        );
        assert_abs_diff_eq!(
            rep.weak_converse_bound,
            binary_entropy(0.25).unwrap() / 0.75,
            epsilon = tol2
        );
    }

    #[test]
    fn full_report_rejects_large_epsilon() {
        let rho = isotropic(0.9);
        let q = PadeQuery::new(rho, 0.6, vec![2.0]).unwrap();
        assert!(full_report(&q, 1, &cfg()).is_err());
    }

    #[test]
    fn bounds_are_ordered_and_monotone_in_epsilon() {
        // Weak converse at ε = 0 equals R and sits below every grid Rényi
        // bound (α-monotonicity); every bound is nondecreasing in ε.
        let rho = random_state(2, 2, 4, 41).unwrap();
        let config = cfg();
        let r = pade_weak_converse(&rho, 0.0, &config).unwrap();
        let q = PadeQuery::new(rho.clone(), 0.0, vec![1.5, 3.0]).unwrap();
        let renyi = pade_renyi_bound(&q, &config).unwrap();
        for entry in &renyi.per_alpha {
            assert!(
                r.bound <= entry.bound + 2.0 * config.tol,
                "R = {} > α={} bound {}",
                r.bound,
                entry.alpha,
                entry.bound
            );
        }
        let mut last_weak = f64::NEG_INFINITY;
        let mut last_renyi = f64::NEG_INFINITY;
        for eps in [0.0, 0.05, 0.1, 0.25] {
            let w = pade_weak_converse(&rho, eps, &config).unwrap().bound;
            assert!(w >= last_weak - 1e-12);
            last_weak = w;
            let q = PadeQuery::new(rho.clone(), eps, vec![2.0]).unwrap();
            let b = pade_renyi_bound(&q, &config).unwrap().best_bound;
            assert!(b >= last_renyi - 1e-12);
            last_renyi = b;
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn binary_entropy_is_symmetric_and_bounded(e in 0.0..=1.0f64) {
            let h = binary_entropy(e).unwrap();
            let h_sym = binary_entropy(1.0 - e).unwrap();
            prop_assert!((h - h_sym).abs() <= 1e-12);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&h));
        }

        #[test]
        fn renyi_correction_is_positive_and_monotone(
            alpha in 1.0001..50.0f64,
            e in 0.0..0.99f64,
        ) {
            let c = renyi_correction(alpha, e);
            prop_assert!(c >= 0.0);
            prop_assert!(renyi_correction(alpha, (e + 0.005).min(0.995)) >= c);
            // Larger α means a smaller multiplier α/(α−1).
            prop_assert!(renyi_correction(alpha + 1.0, e) <= c + 1e-12);
        }
    }
}
