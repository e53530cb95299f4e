//! Batch verification suites over seeded trial streams.
//!
//! Each suite exercises one family of properties — instrument monotonicity,
//! the flags equality, the direct-sum identities, the distillation-bound
//! lemmas, or solver-versus-oracle agreement — and reports one
//! [`TrialRecord`] per checked inequality. Every record follows a single sign
//! convention: the check passes iff `slack ≥ −budget`, so equality checks
//! store `−|difference|` and one-sided checks store the signed margin itself.
//!
//! Suites are deterministic in `(trials, dims, seed, cfg)`. Sampled trials
//! draw from seeds derived per `(suite, stream, trial)`, so trial `t` sees
//! the same inputs no matter how many trials run or in which order the trial
//! bodies execute; callers may therefore evaluate trial bodies in parallel
//! and reassemble records by trial index.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bipartite::{BipartiteOperator, DensityMatrix};
use crate::divergence::{direct_sum_sides, CqOperator, Divergence, RenyiOrder, RenyiVariant};
use crate::error::{Error, Result};
use crate::monotone::{
    negativity_monotone_check, sample_selective_ppt, verify_flags, verify_theorem1, FlagCut,
    SamplingKind,
};
use crate::pade::{
    approx_ebit_check, dimension_bound, pseudo_continuity_check, weak_convexity_check,
};
use crate::rains::{
    isotropic_rains_oracle, rains_divergence, rains_relative_entropy, regularized_rains,
    SolverConfig,
};
use crate::random::{derive_seed, random_ppt_state, random_state, rng_from_seed};

/// Exact-equality budget for closed-form identities (no solver involved).
const EXACT_EQ_BUDGET: f64 = 1e-10;

/// Budget for closed-form one-sided inequalities.
const EXACT_INEQ_BUDGET: f64 = 1e-10;

/// Budget for the trace-norm monotonicity check (norms only, no solver).
const NEGATIVITY_BUDGET: f64 = 1e-8;

/// Threshold under which a PPT state's optimized value counts as zero.
const PPT_VANISHING_BUDGET: f64 = 1e-6;

/// Agreement budget between the solver and closed-form oracles.
const ORACLE_BUDGET: f64 = 1e-3;

/// Budget for certified-bound inequalities whose slack is nonnegative by
/// construction (mirrors the distillation-bound module's own margin).
const CERTIFIED_BUDGET: f64 = 1e-9;

/// Maximum number of regularization trials emitted by the lemma suite.
const REGULARIZATION_TRIAL_CAP: usize = 10;

/// Named verification suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SuiteKind {
    /// Selective-PPT monotonicity of the four operational divergences, plus
    /// the trace-norm monotonicity check on the same sampled pairs.
    Monotone,
    /// The flags equality on both register placements.
    Flags,
    /// Direct-sum identities for classical–quantum operators: exact equality
    /// for the relative entropy, one-sided inequality for the Rényi families.
    DirectSum,
    /// Distillation-bound lemmas: approximate e-bit checks, weak convexity,
    /// the dimension-bound identity, pseudo-continuity, and regularization
    /// monotonicity.
    PadeLemmas,
    /// Solver output against closed-form oracles: the isotropic family, the
    /// maximally entangled values, and vanishing on PPT states.
    SolverOracle,
}

impl SuiteKind {
    /// Every suite, in CLI listing order.
    pub const ALL: [SuiteKind; 5] = [
        SuiteKind::Monotone,
        SuiteKind::Flags,
        SuiteKind::DirectSum,
        SuiteKind::PadeLemmas,
        SuiteKind::SolverOracle,
    ];

    /// Stable identifier used by the CLI and reports.
    pub fn name(self) -> &'static str {
        match self {
            SuiteKind::Monotone => "monotone",
            SuiteKind::Flags => "flags",
            SuiteKind::DirectSum => "direct-sum",
            SuiteKind::PadeLemmas => "pade-lemmas",
            SuiteKind::SolverOracle => "solver-oracle",
        }
    }

    /// Parses the CLI identifier.
    pub fn parse(s: &str) -> Result<Self> {
        SuiteKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::range(format!(
                    "unknown suite {s:?} (expected monotone, flags, direct-sum, \
                     pade-lemmas, or solver-oracle)"
                ))
            })
    }
}

/// Outcome of one checked inequality or equality.
#[derive(Clone, Debug, Serialize)]
pub struct TrialRecord {
    /// Position of the record within the suite report.
    pub index: usize,
    /// What was checked, including the sampled trial number where relevant.
    pub label: String,
    /// Derived seed that produced the trial's inputs (`0` for fixed inputs).
    pub seed: u64,
    /// Signed margin; the check passes iff `slack ≥ −budget`.
    pub slack: f64,
    /// Allowed violation.
    pub budget: f64,
    /// Whether `slack ≥ −budget`.
    pub passed: bool,
    /// Whether every solve behind the record certified stationarity
    /// (`true` for closed-form records).
    pub converged: bool,
}

impl TrialRecord {
    fn new(label: String, seed: u64, slack: f64, budget: f64, converged: bool) -> Self {
        TrialRecord {
            index: 0,
            label,
            seed,
            slack,
            budget,
            passed: slack >= -budget,
            converged,
        }
    }
}

/// Aggregated result of one suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    /// Suite identifier.
    pub suite: String,
    /// Local dimensions used for sampled trials.
    pub dims: (usize, usize),
    /// Number of sampled trials requested.
    pub trials: usize,
    /// Base seed of the trial stream.
    pub seed: u64,
    /// Solver tolerance in force.
    pub tol: f64,
    /// One record per checked inequality, fixed records first.
    pub records: Vec<TrialRecord>,
    /// Number of failed records.
    pub failures: usize,
    /// Whether every record passed.
    pub passed: bool,
}

/// Seed for stream `stream` of trial `t` under base seed `seed`.
fn trial_seed(seed: u64, stream: u64, t: usize) -> u64 {
    derive_seed(derive_seed(seed, stream), t as u64)
}

/// Point in the simplex with all coordinates at least `floor`.
fn random_simplex(n: usize, floor: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = draws.iter().sum();
    let free = 1.0 - n as f64 * floor;
    draws.iter().map(|e| floor + free * e / total).collect()
}

/// Records for sampled trial `t` of the monotonicity suite: the four
/// operational divergences on one `(state, instrument)` pair, plus the
/// trace-norm monotonicity check on the same pair.
fn monotone_trial(
    t: usize,
    dims: (usize, usize),
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<TrialRecord>> {
    let (d_a, d_b) = dims;
    let state_seed = trial_seed(seed, 1, t);
    let op_seed = trial_seed(seed, 2, t);
    let rho = random_state(d_a, d_b, d_a * d_b, state_seed)?;
    let kind = SamplingKind::ALL[t % SamplingKind::ALL.len()];
    let branch_count = 2 + t % 2;
    let op = sample_selective_ppt(kind, dims, branch_count, op_seed)?;

    let measures = [
        Divergence::Relative,
        Divergence::Renyi(RenyiOrder::sandwiched(2.0)?),
        Divergence::Renyi(RenyiOrder::petz(2.0)?),
        Divergence::Renyi(RenyiOrder::geometric(2.0)?),
    ];
    let mut records = Vec::with_capacity(measures.len() + 1);
    for measure in measures {
        let rep = verify_theorem1(&rho, &op, measure, cfg)?;
        records.push(TrialRecord::new(
            format!("monotone[{t}] kind={} measure={}", kind.name(), rep.measure),
            state_seed,
            rep.slack,
            rep.budget,
            rep.converged,
        ));
    }
    let neg = negativity_monotone_check(rho.as_op(), &op)?;
    records.push(TrialRecord::new(
        format!("negativity[{t}] kind={}", kind.name()),
        state_seed,
        neg.slack,
        NEGATIVITY_BUDGET,
        true,
    ));
    Ok(records)
}

/// Records for sampled trial `t` of the flags suite: one random flagged
/// ensemble checked on both register placements.
fn flags_trial(
    t: usize,
    dims: (usize, usize),
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<TrialRecord>> {
    let (d_a, d_b) = dims;
    let instance_seed = trial_seed(seed, 3, t);
    let mut rng = rng_from_seed(instance_seed);
    let blocks = 2 + t % 2;
    let weights = random_simplex(blocks, 0.05, &mut rng);
    let states: Vec<DensityMatrix> = (0..blocks)
        .map(|i| random_state(d_a, d_b, d_a * d_b, derive_seed(instance_seed, i as u64)))
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(2);
    for cut in [FlagCut::XaB, FlagCut::AXb] {
        let rep = verify_flags(&weights, &states, cut, cfg)?;
        records.push(TrialRecord::new(
            format!("flags[{t}] blocks={blocks} cut={}", rep.cut),
            instance_seed,
            -rep.difference.abs(),
            rep.budget,
            rep.converged,
        ));
    }
    Ok(records)
}

/// Random classical–quantum pair: state blocks against general PSD blocks of
/// non-unit trace, over independently sampled weight vectors.
fn random_cq_pair(
    blocks: usize,
    dims: (usize, usize),
    seed: u64,
) -> Result<(CqOperator, CqOperator)> {
    let (d_a, d_b) = dims;
    let mut rng = rng_from_seed(seed);
    let p = random_simplex(blocks, 0.02, &mut rng);
    let q = random_simplex(blocks, 0.02, &mut rng);
    let scales: Vec<f64> = (0..blocks).map(|_| 0.25 + 1.5 * rng.gen::<f64>()).collect();
    let kappa_blocks: Vec<BipartiteOperator> = (0..blocks)
        .map(|i| {
            random_state(d_a, d_b, d_a * d_b, derive_seed(seed, 2 * i as u64))
                .map(DensityMatrix::into_op)
        })
        .collect::<Result<_>>()?;
    let lambda_blocks: Vec<BipartiteOperator> = (0..blocks)
        .map(|i| {
            let s = random_state(d_a, d_b, d_a * d_b, derive_seed(seed, 2 * i as u64 + 1))?;
            BipartiteOperator::new(d_a, d_b, s.mat() * crate::C64::new(scales[i], 0.0))
        })
        .collect::<Result<_>>()?;
    Ok((
        CqOperator::new(p, kappa_blocks)?,
        CqOperator::new(q, lambda_blocks)?,
    ))
}

/// Records for sampled trial `t` of the direct-sum suite: exact equality for
/// the relative entropy and the one-sided inequality for all three Rényi
/// families at α ∈ {1.5, 2}. All evaluations are closed-form.
fn direct_sum_trial(t: usize, dims: (usize, usize), seed: u64) -> Result<Vec<TrialRecord>> {
    let pair_seed = trial_seed(seed, 4, t);
    let blocks = 2 + t % 3;
    let (kappa, lambda) = random_cq_pair(blocks, dims, pair_seed)?;

    let mut records = Vec::with_capacity(7);
    let (lhs, rhs) = direct_sum_sides(&Divergence::Relative, &kappa, &lambda)?;
    records.push(TrialRecord::new(
        format!("direct-sum[{t}] blocks={blocks} measure=relative-entropy"),
        pair_seed,
        -(lhs - rhs).abs(),
        EXACT_EQ_BUDGET,
        true,
    ));
    for variant in [
        RenyiVariant::Sandwiched,
        RenyiVariant::Petz,
        RenyiVariant::Geometric,
    ] {
        for alpha in [1.5, 2.0] {
            let div = Divergence::Renyi(RenyiOrder::new(alpha, variant)?);
            let (lhs, rhs) = direct_sum_sides(&div, &kappa, &lambda)?;
            records.push(TrialRecord::new(
                format!("direct-sum[{t}] blocks={blocks} measure={}", div.label()),
                pair_seed,
                lhs - rhs,
                EXACT_INEQ_BUDGET,
                true,
            ));
        }
    }
    Ok(records)
}

/// Two-qubit isotropic state `f·Φ² + (1−f)·(I−Φ²)/3`.
fn depolarized_phi2(f: f64) -> Result<DensityMatrix> {
    let phi = crate::bipartite::max_entangled(2)?;
    let rest = (crate::CMatrix::identity(4, 4) - phi.state().mat())
        * crate::C64::new((1.0 - f) / 3.0, 0.0);
    DensityMatrix::from_matrix(2, 2, phi.state().mat() * crate::C64::new(f, 0.0) + rest)
}

/// Fixed records of the distillation-lemma suite: approximate e-bit checks
/// across an (ε, α) grid, weak convexity across ε, and the dimension-bound
/// identity at the suite dimensions.
fn pade_fixed(dims: (usize, usize), cfg: &SolverConfig) -> Result<Vec<TrialRecord>> {
    let mut records = Vec::new();
    for eps in [0.0, 0.05, 0.1] {
        let state = depolarized_phi2(1.0 - eps)?;
        for alpha in [1.5, 2.0, 4.0] {
            let rep = approx_ebit_check(&state, 2, alpha, cfg)?;
            records.push(TrialRecord {
                index: 0,
                label: format!("ebit d=2 alpha={alpha} eps={eps}"),
                seed: 0,
                slack: rep.slack.min(rep.witness_slack),
                budget: CERTIFIED_BUDGET,
                passed: rep.passed,
                converged: rep.converged,
            });
        }
    }
    for eps in [0.0, 0.1, 0.25] {
        let state = depolarized_phi2(1.0 - eps)?;
        let rep = weak_convexity_check(&state, 2, cfg)?;
        records.push(TrialRecord::new(
            format!("weak-convexity d=2 eps={eps}"),
            0,
            rep.slack,
            CERTIFIED_BUDGET,
            rep.converged,
        ));
    }
    let (d_a, d_b) = dims;
    let expected = (d_a.min(d_b) as f64).log2() + 1.0;
    let got = dimension_bound(d_a, d_b, 0.5)?;
    records.push(TrialRecord::new(
        format!("dimension-bound {d_a}x{d_b} eps=0.5"),
        0,
        -(got - expected).abs(),
        1e-12,
        true,
    ));
    Ok(records)
}

/// Records for sampled trial `t` of the distillation-lemma suite:
/// pseudo-continuity on a random pair at β = 0.75, plus — for the first few
/// trials — monotonicity of the two-copy regularization sequence.
fn pade_trial(
    t: usize,
    trials: usize,
    dims: (usize, usize),
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<TrialRecord>> {
    let (d_a, d_b) = dims;
    let pair_seed = trial_seed(seed, 5, t);
    let rho0 = random_state(d_a, d_b, d_a * d_b, derive_seed(pair_seed, 0))?;
    let rho1 = random_state(d_a, d_b, d_a * d_b, derive_seed(pair_seed, 1))?;
    let rep = pseudo_continuity_check(&rho0, &rho1, 0.75, cfg)?;
    let mut records = vec![TrialRecord::new(
        format!("pseudo-continuity[{t}] beta=0.75"),
        pair_seed,
        rep.slack,
        rep.budget,
        rep.converged,
    )];

    let two_copy_dim = (d_a * d_b).pow(2);
    if t < trials.min(REGULARIZATION_TRIAL_CAP) && two_copy_dim <= crate::MAX_TOTAL_DIM {
        let reg_seed = trial_seed(seed, 6, t);
        let rho = random_state(d_a, d_b, d_a * d_b, reg_seed)?;
        let query = regularized_rains(&rho, 2, cfg)?;
        let converged = query.results.iter().all(|r| r.converged);
        records.push(TrialRecord::new(
            format!("regularized[{t}] ell=2"),
            reg_seed,
            query.values[0] - query.values[1],
            2.0 * cfg.tol,
            converged,
        ));
    }
    Ok(records)
}

/// Fixed records of the solver-oracle suite: the 2⊗2 isotropic family
/// against the symmetry-reduced 1-D oracle, and the maximally entangled
/// values against `log₂ d` for d ∈ {2, 3}.
fn solver_oracle_fixed(cfg: &SolverConfig) -> Result<Vec<TrialRecord>> {
    let mut records = Vec::new();
    for f in [0.6, 0.75, 0.9] {
        let state = depolarized_phi2(f)?;
        let solve = rains_relative_entropy(&state, cfg)?;
        let oracle = isotropic_rains_oracle(f)?;
        records.push(TrialRecord::new(
            format!("isotropic f={f} vs oracle"),
            0,
            -(solve.value - oracle).abs(),
            ORACLE_BUDGET,
            solve.converged,
        ));
    }
    for d in [2usize, 3] {
        let phi = crate::bipartite::max_entangled(d)?;
        let expected = (d as f64).log2();
        let solve = rains_relative_entropy(phi.state(), cfg)?;
        records.push(TrialRecord::new(
            format!("max-entangled d={d} measure=relative-entropy"),
            0,
            -(solve.value - expected).abs(),
            ORACLE_BUDGET,
            solve.converged,
        ));
        let renyi = Divergence::Renyi(RenyiOrder::sandwiched(2.0)?);
        let solve = rains_divergence(phi.state(), renyi, cfg)?;
        records.push(TrialRecord::new(
            format!("max-entangled d={d} measure={}", renyi.label()),
            0,
            -(solve.value - expected).abs(),
            ORACLE_BUDGET,
            solve.converged,
        ));
    }
    Ok(records)
}

/// Records for sampled trial `t` of the solver-oracle suite: the relative
/// entropy and sandwiched α = 2 values of a random PPT state must vanish.
fn solver_oracle_trial(
    t: usize,
    dims: (usize, usize),
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<TrialRecord>> {
    let (d_a, d_b) = dims;
    let state_seed = trial_seed(seed, 7, t);
    let rho = random_ppt_state(d_a, d_b, state_seed)?;
    let mut records = Vec::with_capacity(2);
    let solve = rains_relative_entropy(&rho, cfg)?;
    records.push(TrialRecord::new(
        format!("ppt-vanishing[{t}] measure=relative-entropy"),
        state_seed,
        -solve.value,
        PPT_VANISHING_BUDGET,
        solve.converged,
    ));
    let renyi = Divergence::Renyi(RenyiOrder::sandwiched(2.0)?);
    let solve = rains_divergence(&rho, renyi, cfg)?;
    records.push(TrialRecord::new(
        format!("ppt-vanishing[{t}] measure={}", renyi.label()),
        state_seed,
        -solve.value,
        PPT_VANISHING_BUDGET,
        solve.converged,
    ));
    Ok(records)
}

/// Fixed (trial-independent) records of a suite, if any.
pub fn fixed_records(
    kind: SuiteKind,
    dims: (usize, usize),
    cfg: &SolverConfig,
) -> Result<Vec<TrialRecord>> {
    match kind {
        SuiteKind::Monotone | SuiteKind::Flags | SuiteKind::DirectSum => Ok(Vec::new()),
        SuiteKind::PadeLemmas => pade_fixed(dims, cfg),
        SuiteKind::SolverOracle => solver_oracle_fixed(cfg),
    }
}

/// Records of sampled trial `t` of a suite.
///
/// The inputs of trial `t` depend only on `(kind, t, dims, seed)`, so callers
/// may evaluate trials in any order (or in parallel) and reassemble the
/// per-trial record blocks by `t`.
pub fn trial_records(
    kind: SuiteKind,
    t: usize,
    trials: usize,
    dims: (usize, usize),
    seed: u64,
    cfg: &SolverConfig,
) -> Result<Vec<TrialRecord>> {
    match kind {
        SuiteKind::Monotone => monotone_trial(t, dims, seed, cfg),
        SuiteKind::Flags => flags_trial(t, dims, seed, cfg),
        SuiteKind::DirectSum => direct_sum_trial(t, dims, seed),
        SuiteKind::PadeLemmas => pade_trial(t, trials, dims, seed, cfg),
        SuiteKind::SolverOracle => solver_oracle_trial(t, dims, seed, cfg),
    }
}

/// Assembles a [`SuiteReport`] from the fixed records and the per-trial
/// record blocks, renumbering record indices in listing order.
pub fn assemble_report(
    kind: SuiteKind,
    trials: usize,
    dims: (usize, usize),
    seed: u64,
    cfg: &SolverConfig,
    fixed: Vec<TrialRecord>,
    trial_blocks: Vec<Vec<TrialRecord>>,
) -> SuiteReport {
    let mut records = fixed;
    for block in trial_blocks {
        records.extend(block);
    }
    for (i, r) in records.iter_mut().enumerate() {
        r.index = i;
    }
    let failures = records.iter().filter(|r| !r.passed).count();
    SuiteReport {
        suite: kind.name().to_string(),
        dims,
        trials,
        seed,
        tol: cfg.tol,
        records,
        failures,
        passed: failures == 0,
    }
}

/// Validates suite dimensions against the crate-wide cap.
pub fn check_dims(dims: (usize, usize)) -> Result<()> {
    let total = dims.0 * dims.1;
    if total == 0 || total > crate::MAX_TOTAL_DIM {
        return Err(Error::DimensionCap {
            dim: total,
            cap: crate::MAX_TOTAL_DIM,
        });
    }
    Ok(())
}

/// Runs a suite sequentially: fixed records, then trials `0..trials`.
pub fn run_suite(
    kind: SuiteKind,
    trials: usize,
    dims: (usize, usize),
    seed: u64,
    cfg: &SolverConfig,
) -> Result<SuiteReport> {
    check_dims(dims)?;
    let fixed = fixed_records(kind, dims, cfg)?;
    let mut blocks = Vec::with_capacity(trials);
    for t in 0..trials {
        blocks.push(trial_records(kind, t, trials, dims, seed, cfg)?);
    }
    Ok(assemble_report(kind, trials, dims, seed, cfg, fixed, blocks))
}
