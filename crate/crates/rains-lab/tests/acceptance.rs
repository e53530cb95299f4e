//! Acceptance checks: one test per numbered criterion.
//!
//! Each test prints a single `criterion NN: PASS` line (visible with
//! `--nocapture`; the harness line `test criterion_NN_… ok` carries the same
//! verdict under default capture) and pins every tolerance it uses as a
//! literal at the assertion site. Solver runs use the default configuration
//! (`tol = 1e-4` bits, seed 0) unless a criterion states otherwise.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rains_core::bipartite::{max_entangled, DensityMatrix};
use rains_core::divergence::{
    classical_relative_entropy, relative_entropy, renyi_divergence, CqOperator,
};
use rains_core::io::state_to_json;
use rains_core::monotone::{negativity_monotone_check, sample_selective_ppt, SamplingKind};
use rains_core::pade::dimension_bound;
use rains_core::rains::{
    isotropic_rains_oracle, rains_alternative_form, rains_divergence, rains_relative_entropy,
    SolverConfig,
};
use rains_core::random::{derive_seed, random_ppt_state, random_state, random_tp_cpmap};
use rains_core::suites::{run_suite, SuiteKind, SuiteReport, TrialRecord};
use rains_core::{C64, CMatrix, Divergence, RenyiOrder, RenyiVariant};

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn pass(n: usize, what: &str) {
    println!("criterion {n:02}: PASS — {what}");
}

fn sandwiched(alpha: f64) -> Divergence {
    Divergence::Renyi(RenyiOrder::sandwiched(alpha).unwrap())
}

/// Shared 100-trial direct-sum suite (criteria 5 and 6).
fn direct_sum_suite() -> &'static SuiteReport {
    static CELL: OnceLock<SuiteReport> = OnceLock::new();
    CELL.get_or_init(|| run_suite(SuiteKind::DirectSum, 100, (2, 2), 0, &cfg()).unwrap())
}

/// Shared 100-trial distillation-lemma suite (criteria 11 and 12).
fn pade_suite() -> &'static SuiteReport {
    static CELL: OnceLock<SuiteReport> = OnceLock::new();
    CELL.get_or_init(|| run_suite(SuiteKind::PadeLemmas, 100, (2, 2), 0, &cfg()).unwrap())
}

fn records_with_prefix<'a>(rep: &'a SuiteReport, prefix: &str) -> Vec<&'a TrialRecord> {
    rep.records
        .iter()
        .filter(|r| r.label.starts_with(prefix))
        .collect()
}

fn assert_all_passed(records: &[&TrialRecord], what: &str) {
    let failures: Vec<_> = records.iter().filter(|r| !r.passed).collect();
    assert!(
        failures.is_empty(),
        "{what}: {} of {} records failed; first: {:?}",
        failures.len(),
        records.len(),
        failures.first()
    );
}

#[test]
fn criterion_01_max_entangled_values() {
    for d in [2usize, 3] {
        let phi = max_entangled(d).unwrap();
        let expected = (d as f64).log2();
        for div in [Divergence::Relative, sandwiched(2.0)] {
            let started = Instant::now();
            let r = rains_divergence(phi.state(), div, &cfg()).unwrap();
            let elapsed = started.elapsed();
            assert!(
                elapsed < Duration::from_secs(10),
                "d={d} {} took {elapsed:?}",
                div.label()
            );
            assert!(r.converged, "d={d} {} did not converge", div.label());
            assert!(
                (r.value - expected).abs() <= 1e-3,
                "d={d} {}: value {} vs log₂ d = {expected}",
                div.label(),
                r.value
            );
        }
    }
    pass(1, "R and sandwiched-2 values on Φ² and Φ³ match log₂ d within 1e-3, <10 s per call");
}

#[test]
fn criterion_02_ppt_vanishing() {
    for i in 0..10u64 {
        for (d_a, d_b, base) in [(2usize, 2usize, 1000u64), (2, 3, 2000)] {
            let rho = random_ppt_state(d_a, d_b, base + i).unwrap();
            for div in [Divergence::Relative, sandwiched(2.0)] {
                let r = rains_divergence(&rho, div, &cfg()).unwrap();
                assert!(
                    r.value <= 1e-6,
                    "{d_a}⊗{d_b} seed {} {}: value {}",
                    base + i,
                    div.label(),
                    r.value
                );
            }
        }
    }
    pass(2, "R and sandwiched-2 of 20 random PPT states (2⊗2 and 2⊗3) are ≤ 1e-6");
}

#[test]
fn criterion_03_selective_ppt_monotonicity() {
    let rep = run_suite(SuiteKind::Monotone, 200, (2, 2), 0, &cfg()).unwrap();
    let records = records_with_prefix(&rep, "monotone[");
    assert_eq!(records.len(), 200 * 4, "four measures per sampled pair");
    for needle in [
        "relative-entropy",
        "sandwiched-2",
        "petz-2",
        "geometric-2",
    ] {
        assert!(
            records.iter().any(|r| r.label.contains(needle)),
            "measure {needle} missing"
        );
    }
    // Budget per record is tol·(1 + |X⁺|) with tol = 1e-4 bits.
    assert_all_passed(&records, "selective monotonicity");
    pass(3, "monotonicity slack ≥ −tol·(1+|X⁺|) on 200 pairs × 4 measures, zero failures");
}

#[test]
fn criterion_04_flags_equality() {
    let rep = run_suite(SuiteKind::Flags, 25, (2, 2), 0, &cfg()).unwrap();
    assert_eq!(rep.records.len(), 25 * 2, "both register placements per instance");
    assert!(rep.records.iter().any(|r| r.label.contains("cut=xa_b")));
    assert!(rep.records.iter().any(|r| r.label.contains("cut=a_xb")));
    let all: Vec<&TrialRecord> = rep.records.iter().collect();
    assert_all_passed(&all, "flags equality");
    pass(4, "flags equality |lhs−rhs| ≤ tol·(1+|X⁺|) on 25 instances, both cuts");
}

#[test]
fn criterion_05_direct_sum_equality() {
    let records = records_with_prefix(direct_sum_suite(), "direct-sum[");
    let exact: Vec<&TrialRecord> = records
        .iter()
        .filter(|r| r.label.contains("relative-entropy"))
        .copied()
        .collect();
    assert_eq!(exact.len(), 100);
    for r in &exact {
        // Record slack is −|lhs − rhs|.
        assert!(
            -r.slack <= 1e-10,
            "difference {} exceeds 1e-10 in {}",
            -r.slack,
            r.label
        );
    }
    pass(5, "direct-sum equality difference ≤ 1e-10 on 100 classical–quantum pairs");
}

#[test]
fn criterion_06_renyi_direct_sum_inequality() {
    let records = records_with_prefix(direct_sum_suite(), "direct-sum[");
    for variant in ["sandwiched", "petz", "geometric"] {
        for alpha in ["1.5", "2"] {
            let subset: Vec<&TrialRecord> = records
                .iter()
                .filter(|r| r.label.contains(&format!("{variant}-{alpha}")))
                .copied()
                .collect();
            assert_eq!(subset.len(), 100, "{variant}-{alpha} trial count");
            for r in &subset {
                assert!(
                    r.slack >= -1e-10,
                    "{}: slack {} below −1e-10",
                    r.label,
                    r.slack
                );
            }
        }
    }
    pass(6, "Rényi direct-sum inequality holds to −1e-10 for α ∈ {1.5, 2}, all three variants, 100 trials each");
}

#[test]
fn criterion_07_penalized_matches_constrained() {
    let cfg = cfg();
    for i in 0..25u64 {
        let rho = random_state(2, 2, 4, derive_seed(7000, i)).unwrap();
        for div in [Divergence::Relative, sandwiched(2.0)] {
            let constrained = rains_divergence(&rho, div, &cfg).unwrap();
            let penalized = rains_alternative_form(&rho, div, &cfg).unwrap();
            let gap = (constrained.value - penalized.value).abs();
            assert!(
                gap <= 2.0 * cfg.tol,
                "seed {i} {}: |constrained − penalized| = {gap} > 2·tol",
                div.label()
            );
        }
    }
    pass(7, "constrained and penalized formulations agree within 2·tol on 25 states, D and sandwiched-2");
}

#[test]
fn criterion_08_negativity_monotone() {
    let mut npt_seen = 0usize;
    for t in 0..100usize {
        let sigma = match t % 3 {
            0 => random_state(2, 2, 4, derive_seed(8000, t as u64)).unwrap(),
            1 => random_state(2, 2, 1, derive_seed(8100, t as u64)).unwrap(),
            _ => random_ppt_state(2, 2, derive_seed(8200, t as u64)).unwrap(),
        };
        let kind = SamplingKind::ALL[t % 3];
        let op =
            sample_selective_ppt(kind, (2, 2), 2 + t % 2, derive_seed(8300, t as u64)).unwrap();
        let rep = negativity_monotone_check(sigma.as_op(), &op).unwrap();
        if rep.lhs > 1.0 + 1e-9 {
            npt_seen += 1;
        }
        assert!(
            rep.slack >= -1e-8,
            "trial {t}: slack {} below −1e-8",
            rep.slack
        );
    }
    assert!(npt_seen > 0, "sample stream contained no NPT inputs");
    pass(8, "partially transposed trace norm never increases on 100 pairs (NPT inputs included), to −1e-8");
}

#[test]
fn criterion_09_renyi_limit_toward_relative_entropy() {
    let cfg = cfg();
    for i in 0..10u64 {
        let rho = random_state(2, 2, 4, derive_seed(9000, i)).unwrap();
        let r = rains_relative_entropy(&rho, &cfg).unwrap().value;
        let near = rains_divergence(&rho, sandwiched(1.01), &cfg).unwrap().value;
        let far = rains_divergence(&rho, sandwiched(1.5), &cfg).unwrap().value;
        assert!(
            (near - r).abs() <= (far - r).abs() + 2.0 * cfg.tol,
            "seed {i}: |R̃₁.₀₁ − R| = {} vs |R̃₁.₅ − R| = {}",
            (near - r).abs(),
            (far - r).abs()
        );
    }
    pass(9, "sandwiched α = 1.01 is at least as close to R as α = 1.5 (within 2·tol) on 10 states");
}

#[test]
fn criterion_10_subadditivity_and_convexity() {
    let cfg = cfg();
    let budget = 3.0 * cfg.tol;
    for i in 0..25u64 {
        let rho = random_state(2, 2, 4, derive_seed(10_000, i)).unwrap();
        let tau = random_state(2, 2, 4, derive_seed(10_100, i)).unwrap();
        let joint = rho.tensor_bipartite(&tau).unwrap();
        let r_joint = rains_relative_entropy(&joint, &cfg).unwrap().value;
        let r_rho = rains_relative_entropy(&rho, &cfg).unwrap().value;
        let r_tau = rains_relative_entropy(&tau, &cfg).unwrap().value;
        let slack = r_rho + r_tau - r_joint;
        assert!(slack >= -budget, "subadditivity seed {i}: slack {slack}");
    }
    for i in 0..25u64 {
        let rho = random_state(2, 2, 4, derive_seed(10_200, i)).unwrap();
        let tau = random_state(2, 2, 4, derive_seed(10_300, i)).unwrap();
        let lambda = 0.5 + 0.3 * ((i as f64) / 25.0);
        let mix = rho.mix(&tau, lambda).unwrap();
        let r_mix = rains_relative_entropy(&mix, &cfg).unwrap().value;
        let r_rho = rains_relative_entropy(&rho, &cfg).unwrap().value;
        let r_tau = rains_relative_entropy(&tau, &cfg).unwrap().value;
        let slack = lambda * r_rho + (1.0 - lambda) * r_tau - r_mix;
        assert!(slack >= -budget, "convexity seed {i}: slack {slack}");
    }
    pass(10, "subadditivity and convexity of R hold with slack ≥ −3·tol on 25 trials each");
}

#[test]
fn criterion_11_ebit_and_pseudo_continuity() {
    let rep = pade_suite();
    let ebit = records_with_prefix(rep, "ebit ");
    assert_eq!(ebit.len(), 9, "ε ∈ {{0, 0.05, 0.1}} × α ∈ {{1.5, 2, 4}}");
    assert_all_passed(&ebit, "approximate e-bit checks");
    let pc = records_with_prefix(rep, "pseudo-continuity[");
    assert_eq!(pc.len(), 100);
    assert_all_passed(&pc, "pseudo-continuity at β = 0.75");
    pass(11, "e-bit checks pass on depolarized Φ² (9 grid points); pseudo-continuity passes on 100 pairs at β = 0.75");
}

#[test]
fn criterion_12_regularization_weak_convexity_dimension_bound() {
    let rep = pade_suite();
    let reg = records_with_prefix(rep, "regularized[");
    assert_eq!(reg.len(), 10);
    assert_all_passed(&reg, "regularized sequence nonincreasing for ℓ = 1,2");
    let wc = records_with_prefix(rep, "weak-convexity");
    assert_eq!(wc.len(), 3, "ε ∈ {{0, 0.1, 0.25}}");
    assert_all_passed(&wc, "weak convexity");
    // The closed form is exact by construction: identical expressions, bit
    // for bit.
    for (d_a, d_b) in [(2usize, 2usize), (2, 3), (3, 2), (4, 2)] {
        for eps in [0.1, 0.25, 0.5, 0.9] {
            let got = dimension_bound(d_a, d_b, eps).unwrap();
            let want = (d_a.min(d_b) as f64).log2() + (1.0 / (1.0 - eps)).log2();
            assert!(got == want, "dimension bound ({d_a},{d_b},{eps})");
        }
    }
    pass(12, "regularized sequence nonincreasing on 10 states; weak convexity at ε ∈ {0, 0.1, 0.25}; dimension bound exact");
}

#[test]
fn criterion_13_isotropic_oracle() {
    let cfg = cfg();
    let phi = max_entangled(2).unwrap();
    let mixed = DensityMatrix::maximally_mixed(2, 2).unwrap();
    for f in [0.6, 0.75, 0.9] {
        // f·Φ + (1−f)(I−Φ)/3 written as a Φ/maximally-mixed mixture.
        let iso = phi.state().mix(&mixed, (4.0 * f - 1.0) / 3.0).unwrap();
        let solve = rains_relative_entropy(&iso, &cfg).unwrap();
        let oracle = isotropic_rains_oracle(f).unwrap();
        assert!(
            (solve.value - oracle).abs() <= 1e-3,
            "f={f}: solver {} vs oracle {oracle}",
            solve.value
        );
    }
    pass(13, "solver matches the symmetry-reduced 1-D oracle on the isotropic family within 1e-3");
}

#[test]
fn criterion_14_divergence_unit_layer() {
    let all_divs = || -> Vec<Divergence> {
        vec![
            Divergence::Relative,
            sandwiched(2.0),
            Divergence::Renyi(RenyiOrder::petz(2.0).unwrap()),
            Divergence::Renyi(RenyiOrder::geometric(2.0).unwrap()),
        ]
    };

    // Scaling identity: 𝔻(ω‖c·τ) = 𝔻(ω‖τ) − log₂ c.
    for i in 0..10u64 {
        let omega = random_state(2, 2, 4, derive_seed(14_000, i)).unwrap();
        let tau = random_state(2, 2, 4, derive_seed(14_100, i)).unwrap();
        let c = 0.25 + 0.5 * (i as f64) / 10.0;
        let scaled = rains_core::bipartite::BipartiteOperator::new(
            2,
            2,
            tau.mat() * C64::new(c, 0.0),
        )
        .unwrap();
        for div in all_divs() {
            let base = div.evaluate(&omega, tau.as_op()).unwrap();
            let shifted = div.evaluate(&omega, &scaled).unwrap();
            assert!(
                (shifted - (base - c.log2())).abs() <= 1e-8,
                "scaling {} seed {i}",
                div.label()
            );
        }
    }

    // Data processing under 50 random channels.
    for i in 0..50u64 {
        let omega = random_state(2, 2, 4, derive_seed(14_200, i)).unwrap();
        let tau = random_state(2, 2, 4, derive_seed(14_300, i)).unwrap();
        let channel = random_tp_cpmap((2, 2), 3, derive_seed(14_400, i)).unwrap();
        let n_omega = DensityMatrix::new(channel.apply(omega.as_op()).unwrap()).unwrap();
        let n_tau = channel.apply(tau.as_op()).unwrap();
        for div in all_divs() {
            let before = div.evaluate(&omega, tau.as_op()).unwrap();
            let after = div.evaluate(&n_omega, &n_tau).unwrap();
            assert!(
                before - after >= -1e-8,
                "data processing {} channel {i}: {before} < {after}",
                div.label()
            );
        }
    }

    // α-monotonicity of the sandwiched and Petz families.
    for i in 0..10u64 {
        let omega = random_state(2, 2, 4, derive_seed(14_500, i)).unwrap();
        let tau = random_state(2, 2, 4, derive_seed(14_600, i)).unwrap();
        for variant in [RenyiVariant::Sandwiched, RenyiVariant::Petz] {
            let orders = [0.6, 0.9, 1.5, 2.0];
            let values: Vec<f64> = orders
                .iter()
                .map(|&a| {
                    renyi_divergence(
                        RenyiOrder::new(a, variant).unwrap(),
                        &omega,
                        tau.as_op(),
                    )
                    .unwrap()
                })
                .collect();
            for w in values.windows(2) {
                assert!(
                    w[1] - w[0] >= -1e-8,
                    "α-monotonicity {} seed {i}: {values:?}",
                    variant.name()
                );
            }
        }
    }

    // Classical reduction on commuting diagonal pairs.
    for i in 0..10u64 {
        let mut rng_p = [0.0f64; 4];
        let mut rng_q = [0.0f64; 4];
        for (k, (p, q)) in rng_p.iter_mut().zip(rng_q.iter_mut()).enumerate() {
            *p = 1.0 + ((derive_seed(14_700 + i, k as u64) % 1000) as f64) / 250.0;
            *q = 1.0 + ((derive_seed(14_800 + i, k as u64) % 1000) as f64) / 250.0;
        }
        let sp: f64 = rng_p.iter().sum();
        let sq: f64 = rng_q.iter().sum();
        let p: Vec<f64> = rng_p.iter().map(|v| v / sp).collect();
        let q: Vec<f64> = rng_q.iter().map(|v| v / sq).collect();
        let diag = |w: &[f64]| {
            CMatrix::from_fn(4, 4, |r, c| {
                if r == c {
                    C64::new(w[r], 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        };
        let omega = DensityMatrix::from_matrix(2, 2, diag(&p)).unwrap();
        let tau = DensityMatrix::from_matrix(2, 2, diag(&q)).unwrap();
        let classical = classical_relative_entropy(&p, &q).unwrap();
        assert!(
            (relative_entropy(&omega, tau.as_op()).unwrap() - classical).abs() <= 1e-8,
            "classical reduction of D, seed {i}"
        );
        for div in all_divs().into_iter().skip(1) {
            let alpha = 2.0;
            let classical_renyi = (p
                .iter()
                .zip(&q)
                .map(|(&pi, &qi)| pi.powf(alpha) * qi.powf(1.0 - alpha))
                .sum::<f64>())
            .log2()
                / (alpha - 1.0);
            let got = div.evaluate(&omega, tau.as_op()).unwrap();
            assert!(
                (got - classical_renyi).abs() <= 1e-8,
                "classical reduction of {} seed {i}: {got} vs {classical_renyi}",
                div.label()
            );
        }
    }

    // Direct-sum evaluators reduce to their defining sums on a fixed pair.
    let kappa = CqOperator::new(
        vec![0.5, 0.5],
        vec![
            random_state(2, 2, 4, 14_900).unwrap().into_op(),
            random_state(2, 2, 4, 14_901).unwrap().into_op(),
        ],
    )
    .unwrap();
    let lambda = CqOperator::new(
        vec![0.25, 0.75],
        vec![
            random_state(2, 2, 4, 14_902).unwrap().into_op(),
            random_state(2, 2, 4, 14_903).unwrap().into_op(),
        ],
    )
    .unwrap();
    let (lhs, rhs) =
        rains_core::divergence::direct_sum_sides(&Divergence::Relative, &kappa, &lambda).unwrap();
    assert!((lhs - rhs).abs() <= 1e-10);

    pass(14, "scaling identity, data processing (50 channels), α-monotonicity, and classical reductions hold at 1e-8");
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_rains-lab")
}

fn run_to_file(args: &[String]) -> String {
    let out = Command::new(bin())
        .args(args)
        .env_remove("RAINS_LAB_THREADS")
        .output()
        .expect("binary runs");
    assert!(
        out.status.code() == Some(0),
        "command {args:?} exited {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn replay_report_bytes(dir: &Path, first_args: &[&str], out_a: &PathBuf, out_b: &PathBuf) {
    let args: Vec<String> = first_args.iter().map(|s| s.to_string()).collect();
    run_to_file(&args);
    let text_a = std::fs::read_to_string(out_a).unwrap();
    let manifest: serde_json::Value = serde_json::from_str(&text_a).unwrap();
    let mut replay: Vec<String> = manifest["manifest"]["command"]
        .as_array()
        .unwrap()
        .iter()
        .skip(1)
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    let pos = replay.iter().position(|a| a == "--out").unwrap();
    replay[pos + 1] = out_b.to_str().unwrap().to_string();
    run_to_file(&replay);
    let text_b = std::fs::read_to_string(out_b).unwrap();
    let tail = |t: &str| {
        t.split_once("\n  \"report\": ")
            .expect("envelope has a report field")
            .1
            .to_string()
    };
    assert_eq!(tail(&text_a), tail(&text_b), "report bytes differ in {dir:?}");
    let digest = |t: &str| {
        serde_json::from_str::<serde_json::Value>(t).unwrap()["manifest"]["output_digest"]
            .as_str()
            .unwrap()
            .to_string()
    };
    assert_eq!(digest(&text_a), digest(&text_b));
}

#[test]
fn criterion_15_cli_manifest_replay() {
    let dir = tempfile::tempdir().unwrap();
    let phi = max_entangled(2).unwrap();
    let state = dir.path().join("phi2.json");
    std::fs::write(&state, state_to_json(phi.state()).unwrap()).unwrap();

    let out_a = dir.path().join("rains-a.json");
    let out_b = dir.path().join("rains-b.json");
    replay_report_bytes(
        dir.path(),
        &[
            "rains",
            state.to_str().unwrap(),
            "--alpha",
            "2",
            "--seed",
            "5",
            "--out",
            out_a.to_str().unwrap(),
        ],
        &out_a,
        &out_b,
    );

    let out_c = dir.path().join("verify-a.json");
    let out_d = dir.path().join("verify-b.json");
    replay_report_bytes(
        dir.path(),
        &[
            "verify",
            "direct-sum",
            "--trials",
            "3",
            "--seed",
            "21",
            "--out",
            out_c.to_str().unwrap(),
        ],
        &out_c,
        &out_d,
    );

    pass(15, "replaying manifests reproduces report bytes and digests for rains and verify");
}
