//! Seeded random ensembles: Ginibre matrices, Wishart states, Haar unitaries,
//! trace-preserving CP maps, and PPT / PPT′ samplers.
//!
//! Every sampler is a pure function of its seed: fixed seed ⇒ bit-identical
//! output. Streams are ChaCha-based, so outputs are stable across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bipartite::{BipartiteOperator, CpMap, DensityMatrix};
use crate::error::{Error, Result};
use crate::rains::PptPrimeElement;
use crate::spectral::eigh;
use crate::{CMatrix, C64};

/// Deterministic RNG for a given seed.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a per-item seed from a base seed (used for independent trial
/// streams whose order must not matter).
pub fn derive_seed(base: u64, index: u64) -> u64 {
    // SplitMix64 finalizer over base ⊕ golden-ratio stride.
    let mut z = base ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x1234_5678_9ABC_DEF1);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Matrix of independent standard complex Gaussians.
pub fn ginibre(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im)
    })
}

/// Trace-normalized Wishart state `G G† / Tr[G G†]` of the given rank.
pub fn random_state(d_a: usize, d_b: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    let n = d_a * d_b;
    if rank == 0 || rank > n {
        return Err(Error::InvalidRank { rank, dim: n });
    }
    let mut rng = rng_from_seed(seed);
    let g = ginibre(n, rank, &mut rng);
    let w = &g * g.adjoint();
    let tr: f64 = w.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::from_matrix(d_a, d_b, w / C64::new(tr, 0.0))
}

/// Haar-distributed unitary via Gram–Schmidt on a Ginibre matrix.
///
/// Classical Gram–Schmidt with a re-orthogonalization pass equals the QR
/// factor with positive-diagonal `R`, which is Haar for Ginibre input.
pub fn random_unitary(n: usize, seed: u64) -> CMatrix {
    let mut rng = rng_from_seed(seed);
    loop {
        let g = ginibre(n, n, &mut rng);
        if let Some(q) = orthonormalize(&g) {
            return q;
        }
    }
}

/// Column-wise Gram–Schmidt; `None` when the input is numerically singular.
fn orthonormalize(m: &CMatrix) -> Option<CMatrix> {
    let (rows, cols) = m.shape();
    let mut q = m.clone();
    for j in 0..cols {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: C64 = (0..rows).map(|r| q[(r, k)].conj() * q[(r, j)]).sum();
                for r in 0..rows {
                    let sub = proj * q[(r, k)];
                    q[(r, j)] -= sub;
                }
            }
        }
        let norm: f64 = (0..rows).map(|r| q[(r, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return None;
        }
        for r in 0..rows {
            q[(r, j)] /= C64::new(norm, 0.0);
        }
    }
    Some(q)
}

/// Random isometry `V: C^cols → C^rows` (`V†V = I`), `rows ≥ cols`.
pub fn random_isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    assert!(rows >= cols, "isometry needs rows ≥ cols");
    loop {
        let g = ginibre(rows, cols, rng);
        if let Some(q) = orthonormalize(&g) {
            return q;
        }
    }
}

/// Random trace-preserving CP map with `kraus_count` Kraus operators,
/// obtained by partitioning a random Stinespring isometry.
pub fn random_tp_cpmap(dims: (usize, usize), kraus_count: usize, seed: u64) -> Result<CpMap> {
    let din = dims.0 * dims.1;
    let dout = din;
    if kraus_count == 0 {
        return Err(Error::range("kraus_count must be positive"));
    }
    let mut rng = rng_from_seed(seed);
    let v = random_isometry(dout * kraus_count, din, &mut rng);
    let kraus: Vec<CMatrix> = (0..kraus_count)
        .map(|m| v.view((m * dout, 0), (dout, din)).into_owned())
        .collect();
    CpMap::new(dims, dims, kraus)
}

/// Random full-rank PPT state by rejection sampling.
pub fn random_ppt_state(d_a: usize, d_b: usize, seed: u64) -> Result<DensityMatrix> {
    let n = d_a * d_b;
    let mut rng = rng_from_seed(seed);
    const ATTEMPTS: usize = 100_000;
    for _ in 0..ATTEMPTS {
        let g = ginibre(n, n, &mut rng);
        let w = &g * g.adjoint();
        let tr: f64 = w.diagonal().iter().map(|z| z.re).sum();
        let rho = DensityMatrix::from_matrix(d_a, d_b, w / C64::new(tr, 0.0))?;
        if eigh(rho.partial_transpose().mat()).min_val() >= 1e-6 {
            // Strictly PPT with a safe margin, so downstream eigenvalue
            // perturbations cannot flip the classification.
            return Ok(rho);
        }
    }
    Err(Error::SamplingFailed {
        attempts: ATTEMPTS,
        context: format!("no PPT state found at dims {d_a}x{d_b}"),
    })
}

/// Random element on the boundary of the PPT′ set: a Wishart operator scaled
/// so its partially transposed trace norm equals one.
pub fn random_ppt_prime_element(d_a: usize, d_b: usize, seed: u64) -> Result<PptPrimeElement> {
    let n = d_a * d_b;
    let mut rng = rng_from_seed(seed);
    let g = ginibre(n, n, &mut rng);
    let w = &g * g.adjoint();
    let op = BipartiteOperator::new(d_a, d_b, w)?;
    let pt_norm = crate::bipartite::trace_norm(&op.partial_transpose());
    let scaled = BipartiteOperator::new(d_a, d_b, op.mat() / C64::new(pt_norm, 0.0))?;
    PptPrimeElement::new(scaled)
}
