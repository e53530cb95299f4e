//! Selective PPT operations: validation, application, sampling, and the
//! monotonicity / flags / negativity verification reports.
//!
//! A selective PPT operation is a finite indexed family `{P_x}` of completely
//! positive maps whose sum is trace preserving and whose every branch stays
//! completely positive when conjugated by the partial transpose on the `B`
//! factors (the "twist"). Applying one to a state yields an ensemble
//! `{p(x), ρ_x}` with `p(x) = Tr[P_x(ρ)]` and `ρ_x = P_x(ρ)/p(x)`; the Rains
//! divergences are monotone under this selective post-selected action, and
//! the partially transposed trace norm obeys the matching inequality.

use serde::Serialize;

use crate::bipartite::{BipartiteOperator, CpMap, DensityMatrix};
use crate::divergence::{CqOperator, Divergence};
use crate::error::{Error, Result};
use crate::rains::{rains_divergence, SolverConfig};
use crate::random::{ginibre, rng_from_seed};
use crate::spectral::eigh;
use crate::tensor::{
    kron, max_abs, partial_trace, partial_transpose_factors, permute_factors,
};
use crate::{CMatrix, C64};

/// Probabilities at or below this floor are treated as zero: the branch is
/// excluded from the ensemble support and its mass is reported separately.
pub const P_FLOOR: f64 = 1e-9;

/// Eigenvalue slack for positivity of each twisted branch Choi matrix.
/// Trace preservation of the branch sum is held one order tighter
/// (see [`validate_selective_ppt`]).
const TWIST_PSD_TOL: f64 = 1e-9;

/// Slack for the partially-transposed-trace-norm inequality.
const NEGATIVITY_TOL: f64 = 1e-8;

/// Attempt cap for rejection sampling of twisted random instruments.
const SAMPLE_ATTEMPTS: usize = 100;

// ---------------------------------------------------------------------------
// The operation type and its validation.
// ---------------------------------------------------------------------------

/// A finite indexed family of CP maps with common input and output cuts.
///
/// Construction checks only structural consistency (nonempty list, equal
/// dims); the defining invariants — trace preservation of the sum and
/// positivity of every twisted branch Choi — are checked by
/// [`validate_selective_ppt`], which the application and verification entry
/// points call with the canonical tolerance.
#[derive(Debug, Clone)]
pub struct SelectivePptOperation {
    branches: Vec<CpMap>,
}

impl SelectivePptOperation {
    /// Wraps the branch list after dimension-consistency checks.
    pub fn new(branches: Vec<CpMap>) -> Result<Self> {
        let Some(first) = branches.first() else {
            return Err(Error::InvalidOperation {
                context: "a selective PPT operation needs at least one branch".into(),
            });
        };
        let (in_dims, out_dims) = (first.in_dims(), first.out_dims());
        for (x, b) in branches.iter().enumerate() {
            if b.in_dims() != in_dims || b.out_dims() != out_dims {
                return Err(Error::dim(format!(
                    "branch {x} has dims {:?}→{:?}, expected {:?}→{:?}",
                    b.in_dims(),
                    b.out_dims(),
                    in_dims,
                    out_dims
                )));
            }
        }
        Ok(Self { branches })
    }

    /// The branch maps.
    pub fn branches(&self) -> &[CpMap] {
        &self.branches
    }

    /// Number of branches.
    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    /// Common input cut `(d_A, d_B)`.
    pub fn in_dims(&self) -> (usize, usize) {
        self.branches[0].in_dims()
    }

    /// Common output cut `(d_A′, d_B′)`.
    pub fn out_dims(&self) -> (usize, usize) {
        self.branches[0].out_dims()
    }

    /// The sum map `Σ_x P_x` as a single CP map (concatenated Kraus lists).
    pub fn sum_map(&self) -> CpMap {
        let kraus: Vec<CMatrix> = self
            .branches
            .iter()
            .flat_map(|b| b.kraus().iter().cloned())
            .collect();
        CpMap::new(self.in_dims(), self.out_dims(), kraus)
            .expect("branch dims were validated at construction")
    }
}

/// Choi matrix of the twist `Θ ∘ P ∘ Θ` of a branch, where `Θ = id ⊗ T`
/// transposes the `B` tensor factor.
///
/// On the Choi matrix (ordered input ⊗ output, factors `[A, B, A′, B′]`) the
/// twist acts as the partial transpose of the two `B` factors.
fn twisted_choi(branch: &CpMap) -> CMatrix {
    let (d_a, d_b) = branch.in_dims();
    let (d_ap, d_bp) = branch.out_dims();
    partial_transpose_factors(
        &branch.choi(),
        &[d_a, d_b, d_ap, d_bp],
        &[false, true, false, true],
    )
}

/// Residuals of the two defining invariants, plus the resulting verdict.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    /// Max-entry deviation of `Σ_x Σ_k K_k† K_k` from the identity.
    pub tp_residual: f64,
    /// Minimum eigenvalue of each branch's twisted Choi matrix.
    pub twist_min_eigs: Vec<f64>,
    /// Whether both invariants hold at the requested tolerance.
    pub valid: bool,
}

/// Checks trace preservation of the branch sum and positivity of every
/// twisted branch Choi, reporting the residuals.
///
/// `tol` is the eigenvalue slack granted to the twisted Choi matrices; the
/// trace-preservation residual is held an order of magnitude tighter. The
/// canonical call uses `tol = 1e-9`, reproducing the type-level invariants.
pub fn validate_selective_ppt(
    op: &SelectivePptOperation,
    tol: f64,
) -> Result<ValidationReport> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::range("validation tol must be positive"));
    }
    // Trace preservation of the sum map: the output-sided partial trace of
    // the summed Choi equals the transposed Kraus gram, so the residual can
    // be read off the gram directly.
    let tp_residual = op.sum_map().tp_residual();
    let twist_min_eigs: Vec<f64> = op
        .branches
        .iter()
        .map(|b| eigh(&twisted_choi(b)).min_val())
        .collect();
    let valid = tp_residual <= tol / 10.0
        && twist_min_eigs.iter().all(|&v| v >= -tol);
    Ok(ValidationReport {
        tp_residual,
        twist_min_eigs,
        valid,
    })
}

/// Validates at the canonical tolerance and converts failure into an error.
fn require_valid(op: &SelectivePptOperation) -> Result<()> {
    let report = validate_selective_ppt(op, TWIST_PSD_TOL)?;
    if !report.valid {
        return Err(Error::InvalidOperation {
            context: format!(
                "TP residual {:.3e}, min twisted-Choi eigenvalue {:.3e}",
                report.tp_residual,
                report
                    .twist_min_eigs
                    .iter()
                    .fold(f64::INFINITY, |a, &b| a.min(b))
            ),
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Application to states.
// ---------------------------------------------------------------------------

/// Outcome ensemble `{p(x), ρ_x}` of a selective operation.
///
/// States are defined only on the support `X⁺ = {x : p(x) > P_FLOOR}`;
/// branches below the floor keep their (numerically zero) probability but
/// carry no state.
#[derive(Debug, Clone)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<Option<DensityMatrix>>,
    support: Vec<usize>,
}

impl Ensemble {
    /// Outcome probabilities `p(x) = Tr[P_x(ρ)]` (full branch list).
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Normalized outcome states, present exactly on the support.
    pub fn states(&self) -> &[Option<DensityMatrix>] {
        &self.states
    }

    /// Indices with `p(x) > P_FLOOR`.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Total probability mass excluded by the support floor.
    pub fn dropped_mass(&self) -> f64 {
        (0..self.probs.len())
            .filter(|x| !self.support.contains(x))
            .map(|x| self.probs[x])
            .sum()
    }
}

/// Applies a selective operation: `p(x) = Tr[P_x(ρ)]`, `ρ_x = P_x(ρ)/p(x)`.
pub fn apply_selective(op: &SelectivePptOperation, rho: &DensityMatrix) -> Result<Ensemble> {
    require_valid(op)?;
    if rho.dims() != op.in_dims() {
        return Err(Error::dim(format!(
            "state dims {:?} do not match operation input dims {:?}",
            rho.dims(),
            op.in_dims()
        )));
    }
    let (d_ap, d_bp) = op.out_dims();
    let mut probs = Vec::with_capacity(op.branch_count());
    let mut states = Vec::with_capacity(op.branch_count());
    let mut support = Vec::new();
    for (x, branch) in op.branches.iter().enumerate() {
        let out = branch.apply(rho.as_op())?;
        let p = out.trace().re.max(0.0);
        probs.push(p);
        if p > P_FLOOR {
            // Hermitize the numerator so rounding in the Kraus sums cannot
            // trip the state validator after the division by a small p.
            let m = out.mat();
            let herm = (m + m.adjoint()) * C64::new(0.5 / p, 0.0);
            states.push(Some(DensityMatrix::from_matrix(d_ap, d_bp, herm)?));
            support.push(x);
        } else {
            states.push(None);
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidOperation {
            context: format!("outcome probabilities sum to {total:.17}"),
        });
    }
    Ok(Ensemble {
        probs,
        states,
        support,
    })
}

// ---------------------------------------------------------------------------
// Sampling.
// ---------------------------------------------------------------------------

/// Families of randomly sampled selective PPT operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingKind {
    /// Random local instrument on `A`, tensored with the identity on `B`.
    LocalInstrumentA,
    /// Independent local instruments on `A` and on `B`, composed.
    LocalInstrumentBoth,
    /// Random branch Choi matrices symmetrized with their twist and
    /// TP-normalized; re-validated and resampled on failure.
    PptTwistedRandom,
}

impl SamplingKind {
    /// Every sampling kind, in CLI listing order.
    pub const ALL: [SamplingKind; 3] = [
        SamplingKind::LocalInstrumentA,
        SamplingKind::LocalInstrumentBoth,
        SamplingKind::PptTwistedRandom,
    ];

    /// Stable identifier used by the CLI.
    pub fn name(self) -> &'static str {
        match self {
            SamplingKind::LocalInstrumentA => "local_instrument_a",
            SamplingKind::LocalInstrumentBoth => "local_instrument_both",
            SamplingKind::PptTwistedRandom => "ppt_twisted_random",
        }
    }

    /// Parses the CLI identifier.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "local_instrument_a" => Ok(SamplingKind::LocalInstrumentA),
            "local_instrument_both" => Ok(SamplingKind::LocalInstrumentBoth),
            "ppt_twisted_random" => Ok(SamplingKind::PptTwistedRandom),
            other => Err(Error::range(format!(
                "unknown sampling kind {other:?} (expected local_instrument_a, \
                 local_instrument_both, or ppt_twisted_random)"
            ))),
        }
    }
}

/// Random instrument `{K_x}` on a single factor of dimension `d`:
/// Ginibre seeds normalized so `Σ_x K_x† K_x = I`.
fn local_instrument(d: usize, outcomes: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Vec<CMatrix> {
    let gs: Vec<CMatrix> = (0..outcomes).map(|_| ginibre(d, d, rng)).collect();
    let mut m = CMatrix::zeros(d, d);
    for g in &gs {
        m += g.adjoint() * g;
    }
    // M is positive definite almost surely; M^{-1/2} whitens the family.
    let whiten = crate::spectral::matrix_fn(&m, |v| 1.0 / v.max(1e-300).sqrt());
    gs.into_iter().map(|g| g * &whiten).collect()
}

/// Largest divisor of `n` that is at most `√n` (balanced factor split).
fn balanced_factor(n: usize) -> usize {
    let mut best = 1;
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            best = d;
        }
        d += 1;
    }
    best
}

/// Kraus operators of the map whose (PSD) Choi matrix is given, using the
/// input ⊗ output ordering of [`CpMap::choi`].
fn kraus_from_choi(choi: &CMatrix, din: usize, dout: usize) -> Vec<CMatrix> {
    let e = eigh(choi);
    // Keep everything but rounding noise: discarded eigenvalue mass feeds
    // straight into the trace-preservation residual of the extracted map.
    let cutoff = 1e-14 * e.max_val().max(0.0);
    let mut kraus = Vec::new();
    for (idx, &val) in e.vals.iter().enumerate() {
        if val > cutoff {
            let s = val.sqrt();
            let k = CMatrix::from_fn(dout, din, |m, i| e.vecs[(i * dout + m, idx)] * s);
            kraus.push(k);
        }
    }
    kraus
}

/// Draws a selective PPT operation of the requested kind, deterministically
/// in the seed.
pub fn sample_selective_ppt(
    kind: SamplingKind,
    dims: (usize, usize),
    branch_count: usize,
    seed: u64,
) -> Result<SelectivePptOperation> {
    let (d_a, d_b) = dims;
    if d_a == 0 || d_b == 0 || d_a * d_b > crate::MAX_TOTAL_DIM {
        return Err(Error::dim(format!("unsupported sampling dims {dims:?}")));
    }
    if branch_count == 0 {
        return Err(Error::range("branch_count must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let op = match kind {
        SamplingKind::LocalInstrumentA => {
            let id_b = CMatrix::identity(d_b, d_b);
            let branches = local_instrument(d_a, branch_count, &mut rng)
                .into_iter()
                .map(|k| CpMap::new(dims, dims, vec![kron(&k, &id_b)]))
                .collect::<Result<Vec<_>>>()?;
            SelectivePptOperation::new(branches)?
        }
        SamplingKind::LocalInstrumentBoth => {
            // Split the branch count into instrument sizes m_a · m_b; a unit
            // factor degenerates into a random local channel on that side.
            let m_b = balanced_factor(branch_count);
            let m_a = branch_count / m_b;
            let on_a = local_instrument(d_a, m_a, &mut rng);
            let on_b = local_instrument(d_b, m_b, &mut rng);
            let mut branches = Vec::with_capacity(branch_count);
            for ka in &on_a {
                for kb in &on_b {
                    branches.push(CpMap::new(dims, dims, vec![kron(ka, kb)])?);
                }
            }
            SelectivePptOperation::new(branches)?
        }
        SamplingKind::PptTwistedRandom => {
            sample_twisted_random(dims, branch_count, &mut rng)?
        }
    };
    require_valid(&op)?;
    Ok(op)
}

/// Rejection sampler for the twisted-random kind: branch Choi matrices are
/// Wishart draws averaged with their twist (restoring positivity with a small
/// admixture of the twist-invariant identity when needed), the family is
/// TP-normalized at the Choi level, and the result is validated; failures
/// are resampled.
fn sample_twisted_random(
    dims: (usize, usize),
    branch_count: usize,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<SelectivePptOperation> {
    let (d_a, d_b) = dims;
    let n = d_a * d_b;
    let factor_dims = [d_a, d_b, d_a, d_b];
    let twist_mask = [false, true, false, true];
    for _attempt in 0..SAMPLE_ATTEMPTS {
        let mut chois = Vec::with_capacity(branch_count);
        for _ in 0..branch_count {
            let g = ginibre(n * n, 2 * n * n, rng);
            let w = &g * g.adjoint();
            let twisted = partial_transpose_factors(&w, &factor_dims, &twist_mask);
            let mut c = (w + twisted) * C64::new(0.5, 0.0);
            // The twist can push eigenvalues slightly negative; mix toward
            // the (twist-invariant) identity just enough to restore
            // positivity with margin.
            let min_eig = eigh(&c).min_val();
            if min_eig < 0.0 {
                let trace: f64 = c.diagonal().iter().map(|z| z.re).sum();
                let mean = trace / (n * n) as f64;
                let gamma = (1.2 * (-min_eig) / (mean - min_eig)).clamp(0.0, 0.5);
                let blend = trace * gamma / (n * n) as f64;
                c *= C64::new(1.0 - gamma, 0.0);
                c += CMatrix::identity(n * n, n * n) * C64::new(blend, 0.0);
            }
            chois.push(c);
        }
        // TP-normalize the family: conjugating every Choi by W^{-1/2} ⊗ I on
        // the input factor makes the summed input marginal the identity.
        let mut marginal = CMatrix::zeros(n, n);
        for c in &chois {
            let (m, _) = partial_trace(c, &[n, n], &[true, false]);
            marginal += m;
        }
        let e = eigh(&marginal);
        if e.min_val() <= 1e-10 * e.max_val() {
            continue;
        }
        let whiten = crate::spectral::matrix_fn(&marginal, |v| 1.0 / v.sqrt());
        let id_out = CMatrix::identity(n, n);
        let scale = kron(&whiten, &id_out);
        let mut branches = Vec::with_capacity(branch_count);
        let mut ok = true;
        for c in &chois {
            let norm = &scale * c * scale.adjoint();
            let kraus = kraus_from_choi(&norm, n, n);
            if kraus.is_empty() {
                ok = false;
                break;
            }
            branches.push(CpMap::new(dims, dims, kraus)?);
        }
        if !ok {
            continue;
        }
        let op = SelectivePptOperation::new(branches)?;
        if validate_selective_ppt(&op, TWIST_PSD_TOL)?.valid {
            return Ok(op);
        }
    }
    Err(Error::SamplingFailed {
        attempts: SAMPLE_ATTEMPTS,
        context: format!(
            "no valid twisted random instrument at dims {dims:?} with {branch_count} branches"
        ),
    })
}

// ---------------------------------------------------------------------------
// Verification reports.
// ---------------------------------------------------------------------------

/// Per-branch diagnostics of a monotonicity or flags verification.
#[derive(Debug, Clone, Serialize)]
pub struct BranchValue {
    /// Branch index `x`.
    pub index: usize,
    /// Outcome probability / flag weight.
    pub prob: f64,
    /// Rains divergence of the branch state, in bits.
    pub value: f64,
    /// Whether the branch solve certified stationarity.
    pub converged: bool,
    /// Iterations used by the branch solve.
    pub iterations: usize,
}

/// Outcome of the selective-monotonicity check
/// `𝐑(ρ) ≥ Σ_{x ∈ X⁺} p(x) · 𝐑(ρ_x)`.
#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    /// Human-readable measure label.
    pub measure: String,
    /// Rains divergence of the input state.
    pub lhs: f64,
    /// Probability-weighted branch sum over the support.
    pub rhs: f64,
    /// `lhs − rhs`; the inequality holds when this is ≥ −budget.
    pub slack: f64,
    /// `tol · (1 + |X⁺|)`: one solver error per solve.
    pub budget: f64,
    /// Whether `slack ≥ −budget`.
    pub passed: bool,
    /// Whether every solve (input and branches) certified stationarity.
    pub converged: bool,
    /// Iterations of the input-state solve.
    pub lhs_iterations: usize,
    /// Per-branch probabilities, values, and solver diagnostics.
    pub branches: Vec<BranchValue>,
    /// Probability mass excluded by the support floor.
    pub dropped_mass: f64,
}

/// `true` for measures covered by the selective monotonicity statement: the
/// exact Rains relative entropy, or Rényi orders `α > 1` within each
/// variant's validity window.
fn admits_monotonicity(measure: Divergence) -> bool {
    match measure {
        Divergence::Relative => true,
        Divergence::Renyi(order) => order.alpha() > 1.0,
    }
}

/// Verifies the selective monotonicity inequality for one state/operation
/// pair, solving on the input and on each supported branch state.
pub fn verify_theorem1(
    rho: &DensityMatrix,
    op: &SelectivePptOperation,
    measure: Divergence,
    cfg: &SolverConfig,
) -> Result<MonotonicityReport> {
    if !admits_monotonicity(measure) {
        return Err(Error::range(format!(
            "selective monotonicity covers the exact measure and Rényi orders α > 1; \
             got {}",
            measure.label()
        )));
    }
    let ensemble = apply_selective(op, rho)?;
    let lhs_solve = rains_divergence(rho, measure, cfg)?;
    let mut rhs = 0.0;
    let mut converged = lhs_solve.converged;
    let mut branches = Vec::with_capacity(ensemble.support().len());
    for &x in ensemble.support() {
        let state = ensemble.states()[x]
            .as_ref()
            .expect("supported branches carry states");
        let solve = rains_divergence(state, measure, cfg)?;
        rhs += ensemble.probs()[x] * solve.value;
        converged &= solve.converged;
        branches.push(BranchValue {
            index: x,
            prob: ensemble.probs()[x],
            value: solve.value,
            converged: solve.converged,
            iterations: solve.iterations,
        });
    }
    let budget = cfg.tol * (1.0 + ensemble.support().len() as f64);
    let slack = lhs_solve.value - rhs;
    Ok(MonotonicityReport {
        measure: measure.label(),
        lhs: lhs_solve.value,
        rhs,
        slack,
        budget,
        passed: slack >= -budget,
        converged,
        lhs_iterations: lhs_solve.iterations,
        branches,
        dropped_mass: ensemble.dropped_mass(),
    })
}

/// Which side of the cut receives the classical flag register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FlagCut {
    /// Flag joined to `A`: the state lives on `(X·A) ⊗ B`.
    XaB,
    /// Flag joined to `B`: the state lives on `A ⊗ (X·B)`.
    AXb,
}

impl FlagCut {
    /// Stable identifier used by the CLI and reports.
    pub fn name(self) -> &'static str {
        match self {
            FlagCut::XaB => "xa_b",
            FlagCut::AXb => "a_xb",
        }
    }
}

/// Outcome of the flags-property check
/// `R(Σ_x p(x) |x⟩⟨x| ⊗ ω_x) = Σ_x p(x) R(ω_x)`.
#[derive(Debug, Clone, Serialize)]
pub struct FlagsReport {
    /// Which side holds the flag register.
    pub cut: String,
    /// Rains relative entropy of the flagged state.
    pub lhs: f64,
    /// Weighted sum of the block values over the support.
    pub rhs: f64,
    /// `lhs − rhs`; equality means `|difference| ≤ budget`.
    pub difference: f64,
    /// `tol · (1 + |X⁺|)`.
    pub budget: f64,
    /// Whether `|difference| ≤ budget`.
    pub passed: bool,
    /// Whether every solve certified stationarity.
    pub converged: bool,
    /// Per-block weights, values, and solver diagnostics.
    pub branches: Vec<BranchValue>,
    /// Weight excluded by the support floor.
    pub dropped_mass: f64,
}

/// Assembles `Σ_x p(x) |x⟩⟨x| ⊗ ω_x` with the flag on the requested side.
///
/// Blocks below the weight floor are omitted before assembly: padding the
/// flag register with zero-weight blocks is a local isometry, which leaves
/// the optimized divergence unchanged, while carrying the dead blocks forces
/// the solver to drain an exactly unsupported sector of the feasible set.
fn flagged_state(p: &[f64], states: &[DensityMatrix], cut: FlagCut) -> Result<DensityMatrix> {
    let supported: Vec<(f64, &DensityMatrix)> = p
        .iter()
        .zip(states)
        .filter(|(&w, _)| w > P_FLOOR)
        .map(|(&w, s)| (w, s))
        .collect();
    if supported.is_empty() {
        return Err(Error::range("all flag weights fall below the support floor"));
    }
    // Renormalizing the kept weights shifts the optimized value by at most
    // log₂(1/(1−dropped)) ≈ 1.44·dropped bits — far inside any budget here.
    let kept: f64 = supported.iter().map(|(w, _)| *w).sum();
    let weights: Vec<f64> = supported.iter().map(|(w, _)| *w / kept).collect();
    let blocks: Vec<BipartiteOperator> = supported
        .iter()
        .map(|(_, s)| s.as_op().clone())
        .collect();
    let cq = CqOperator::new(weights, blocks)?;
    let on_a = cq.assemble()?;
    match cut {
        FlagCut::XaB => DensityMatrix::new(on_a),
        FlagCut::AXb => {
            // Reorder the factors [X, A, B] → [A, X, B] to move the flag
            // into the B side of the cut.
            let (d_a, d_b) = supported[0].1.dims();
            let nf = supported.len();
            let (mat, _) = permute_factors(on_a.mat(), &[nf, d_a, d_b], &[1, 0, 2]);
            DensityMatrix::from_matrix(d_a, nf * d_b, mat)
        }
    }
}

/// Verifies the flags property of the exact Rains relative entropy for a
/// finite ensemble, on either cut.
pub fn verify_flags(
    p: &[f64],
    states: &[DensityMatrix],
    cut: FlagCut,
    cfg: &SolverConfig,
) -> Result<FlagsReport> {
    if p.is_empty() || p.len() != states.len() {
        return Err(Error::dim(format!(
            "{} weights vs {} states",
            p.len(),
            states.len()
        )));
    }
    if p.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::range("flag weights must be finite and nonnegative"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-10 {
        return Err(Error::range(format!(
            "flag weights sum to {total:.17}, expected 1"
        )));
    }
    let dims = states[0].dims();
    if states.iter().any(|s| s.dims() != dims) {
        return Err(Error::dim("flag blocks must share dimensions"));
    }

    let flagged = flagged_state(p, states, cut)?;
    let lhs_solve = rains_divergence(&flagged, Divergence::Relative, cfg)?;
    let mut rhs = 0.0;
    let mut converged = lhs_solve.converged;
    let mut branches = Vec::new();
    let mut dropped_mass = 0.0;
    for (x, (&w, state)) in p.iter().zip(states).enumerate() {
        if w <= P_FLOOR {
            dropped_mass += w;
            continue;
        }
        let solve = rains_divergence(state, Divergence::Relative, cfg)?;
        rhs += w * solve.value;
        converged &= solve.converged;
        branches.push(BranchValue {
            index: x,
            prob: w,
            value: solve.value,
            converged: solve.converged,
            iterations: solve.iterations,
        });
    }
    let budget = cfg.tol * (1.0 + branches.len() as f64);
    let difference = lhs_solve.value - rhs;
    Ok(FlagsReport {
        cut: cut.name().to_string(),
        lhs: lhs_solve.value,
        rhs,
        difference,
        budget,
        passed: difference.abs() <= budget,
        converged,
        branches,
        dropped_mass,
    })
}

/// Outcome of the partially-transposed-trace-norm inequality
/// `‖PT(σ)‖₁ ≥ Σ_x q(x) ‖PT(σ_x)‖₁`.
#[derive(Debug, Clone, Serialize)]
pub struct NegativityReport {
    /// `‖PT(σ)‖₁` of the input.
    pub lhs: f64,
    /// `Σ_x ‖PT(P_x(σ))‖₁` (the weighted normalized form, summed exactly).
    pub rhs: f64,
    /// `lhs − rhs`.
    pub slack: f64,
    /// Whether `slack ≥ −1e-8`.
    pub passed: bool,
    /// Outcome weights `q(x) = Tr[P_x(σ)]`.
    pub branch_weights: Vec<f64>,
    /// Unnormalized branch norms `‖PT(P_x(σ))‖₁ = q(x)·‖PT(σ_x)‖₁`.
    pub branch_norms: Vec<f64>,
}

/// Checks the negativity inequality for one PSD input and operation.
///
/// Accepts any PSD bipartite operator (density matrices and PPT′ elements
/// alike); the branch terms are computed in unnormalized form, which equals
/// the probability-weighted normalized sum without dividing by small masses.
pub fn negativity_monotone_check(
    sigma: &BipartiteOperator,
    op: &SelectivePptOperation,
) -> Result<NegativityReport> {
    require_valid(op)?;
    if sigma.dims() != op.in_dims() {
        return Err(Error::dim(format!(
            "operator dims {:?} do not match operation input dims {:?}",
            sigma.dims(),
            op.in_dims()
        )));
    }
    let scale = 1.0 + max_abs(sigma.mat());
    sigma.require_hermitian(1e-9 * scale)?;
    let min_eig = eigh(sigma.mat()).min_val();
    if min_eig < -1e-9 * scale {
        return Err(Error::NotPsd { min_eig });
    }
    let lhs = crate::bipartite::trace_norm(&sigma.partial_transpose());
    let mut branch_weights = Vec::with_capacity(op.branch_count());
    let mut branch_norms = Vec::with_capacity(op.branch_count());
    for branch in &op.branches {
        let out = branch.apply(sigma)?;
        branch_weights.push(out.trace().re.max(0.0));
        branch_norms.push(crate::bipartite::trace_norm(&out.partial_transpose()));
    }
    let rhs: f64 = branch_norms.iter().sum();
    let slack = lhs - rhs;
    Ok(NegativityReport {
        lhs,
        rhs,
        slack,
        passed: slack >= -NEGATIVITY_TOL,
        branch_weights,
        branch_norms,
    })
}
