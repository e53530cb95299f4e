//! Bipartite operators, states, channels, and the basic entanglement
//! primitives: partial transpose, trace norm, fidelity, PPT test.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::spectral::{self, eigh, hermiticity_deviation, trace_norm as tn_general};
use crate::tensor::{self, max_abs};
use crate::{CMatrix, C64, MAX_TOTAL_DIM};

/// Hermiticity / trace validation tolerance for typed states.
pub const STATE_ATOL: f64 = 1e-12;

/// Minimum-eigenvalue slack accepted by [`DensityMatrix`] validation.
pub const STATE_EIG_ATOL: f64 = 1e-10;

/// A complex square matrix acting on `H_A ⊗ H_B`, tagged with the local
/// dimensions of the two factors.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteOperator {
    d_a: usize,
    d_b: usize,
    mat: CMatrix,
}

impl BipartiteOperator {
    /// Wraps a matrix after checking it is square of size `d_a · d_b ≤ 64`.
    pub fn new(d_a: usize, d_b: usize, mat: CMatrix) -> Result<Self> {
        if d_a == 0 || d_b == 0 {
            return Err(Error::dim("local dimensions must be positive"));
        }
        let n = d_a * d_b;
        if n > MAX_TOTAL_DIM {
            return Err(Error::DimensionCap {
                dim: n,
                cap: MAX_TOTAL_DIM,
            });
        }
        if mat.nrows() != mat.ncols() {
            return Err(Error::NotSquare {
                rows: mat.nrows(),
                cols: mat.ncols(),
            });
        }
        if mat.nrows() != n {
            return Err(Error::dim(format!(
                "matrix is {}x{} but d_a*d_b = {}",
                mat.nrows(),
                mat.ncols(),
                n
            )));
        }
        Ok(Self { d_a, d_b, mat })
    }

    /// Zero operator.
    pub fn zeros(d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(d_a, d_b, CMatrix::zeros(d_a * d_b, d_a * d_b))
    }

    /// Identity operator.
    pub fn identity(d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(d_a, d_b, CMatrix::identity(d_a * d_b, d_a * d_b))
    }

    /// Local dimensions `(d_A, d_B)`.
    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    /// Total dimension `d_A · d_B`.
    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    /// Underlying matrix.
    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    /// Consumes the wrapper, returning the matrix.
    pub fn into_mat(self) -> CMatrix {
        self.mat
    }

    /// Trace.
    pub fn trace(&self) -> C64 {
        self.mat.diagonal().iter().sum()
    }

    /// Max-entry deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.mat)
    }

    /// Errors unless the operator is Hermitian to within `tol` (max entry).
    pub fn require_hermitian(&self, tol: f64) -> Result<()> {
        let dev = self.hermiticity_deviation();
        if dev > tol {
            return Err(Error::NotHermitian { deviation: dev });
        }
        Ok(())
    }

    /// Partial transpose on the `B` factor (computational basis).
    pub fn partial_transpose(&self) -> BipartiteOperator {
        BipartiteOperator {
            d_a: self.d_a,
            d_b: self.d_b,
            mat: tensor::partial_transpose_b(&self.mat, self.d_a, self.d_b),
        }
    }

    /// Tensor product with another bipartite operator, re-sorted to the
    /// bipartite cut `A₀A₁ | B₀B₁`.
    pub fn tensor_bipartite(&self, other: &BipartiteOperator) -> Result<BipartiteOperator> {
        let raw = tensor::kron(&self.mat, &other.mat);
        // kron index order is (A0 B0 A1 B1); regroup to (A0 A1 B0 B1).
        let dims = [self.d_a, self.d_b, other.d_a, other.d_b];
        let (sorted, _) = tensor::permute_factors(&raw, &dims, &[0, 2, 1, 3]);
        BipartiteOperator::new(self.d_a * other.d_a, self.d_b * other.d_b, sorted)
    }

    /// Reduced operator on `A`.
    pub fn trace_out_b(&self) -> CMatrix {
        tensor::partial_trace(&self.mat, &[self.d_a, self.d_b], &[true, false]).0
    }

    /// Reduced operator on `B`.
    pub fn trace_out_a(&self) -> CMatrix {
        tensor::partial_trace(&self.mat, &[self.d_a, self.d_b], &[false, true]).0
    }
}

/// Partial transpose on the `B` factor; free-function form.
pub fn partial_transpose(x: &BipartiteOperator) -> BipartiteOperator {
    x.partial_transpose()
}

/// Trace norm (sum of singular values; sum of |eigenvalues| when Hermitian).
pub fn trace_norm(x: &BipartiteOperator) -> f64 {
    tn_general(&x.mat)
}

/// A validated quantum state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(BipartiteOperator);

impl DensityMatrix {
    /// Validates Hermiticity (1e-12), unit trace (1e-12), and positivity
    /// (min eigenvalue ≥ −1e-10).
    pub fn new(op: BipartiteOperator) -> Result<Self> {
        op.require_hermitian(STATE_ATOL)?;
        let tr = op.trace();
        if (tr.re - 1.0).abs() > STATE_ATOL || tr.im.abs() > STATE_ATOL {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let min_eig = eigh(&op.mat).min_val();
        if min_eig < -STATE_EIG_ATOL {
            return Err(Error::NotPsd { min_eig });
        }
        Ok(Self(op))
    }

    /// Builds a state from raw parts.
    pub fn from_matrix(d_a: usize, d_b: usize, mat: CMatrix) -> Result<Self> {
        Self::new(BipartiteOperator::new(d_a, d_b, mat)?)
    }

    /// Rank-one state from a normalized state vector.
    pub fn from_pure(d_a: usize, d_b: usize, psi: &[C64]) -> Result<Self> {
        let n = d_a * d_b;
        if psi.len() != n {
            return Err(Error::dim(format!(
                "state vector has length {}, expected {}",
                psi.len(),
                n
            )));
        }
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let mat = CMatrix::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / norm2);
        Self::from_matrix(d_a, d_b, mat)
    }

    /// Maximally mixed state `I / (d_A d_B)`.
    pub fn maximally_mixed(d_a: usize, d_b: usize) -> Result<Self> {
        let n = d_a * d_b;
        let mat = CMatrix::identity(n, n) / C64::new(n as f64, 0.0);
        Self::from_matrix(d_a, d_b, mat)
    }

    /// Convex mixture `λ·self + (1−λ)·other`.
    pub fn mix(&self, other: &DensityMatrix, lambda: f64) -> Result<DensityMatrix> {
        if self.dims() != other.dims() {
            return Err(Error::dim("mixing states of different dimensions"));
        }
        let mat = self.mat() * C64::new(lambda, 0.0) + other.mat() * C64::new(1.0 - lambda, 0.0);
        DensityMatrix::from_matrix(self.dims().0, self.dims().1, mat)
    }

    /// The underlying tagged operator.
    pub fn as_op(&self) -> &BipartiteOperator {
        &self.0
    }

    /// Consumes the wrapper.
    pub fn into_op(self) -> BipartiteOperator {
        self.0
    }

    /// Tensor product of two states with the cut regrouped to `A₀A₁|B₀B₁`.
    pub fn tensor_bipartite(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        DensityMatrix::new(self.0.tensor_bipartite(&other.0)?)
    }

    /// Purity `Tr[ρ²]`.
    pub fn purity(&self) -> f64 {
        tensor::hs_inner_re(self.mat(), self.mat())
    }
}

impl std::ops::Deref for DensityMatrix {
    type Target = BipartiteOperator;

    fn deref(&self) -> &BipartiteOperator {
        &self.0
    }
}

/// `true` iff the partial transpose of `ρ` has min eigenvalue ≥ −tol.
pub fn is_ppt(rho: &DensityMatrix, tol: f64) -> bool {
    eigh(rho.partial_transpose().mat()).min_val() >= -tol
}

/// Fidelity `‖√ω √τ‖₁²`, clamped into `[0, 1]`.
pub fn fidelity(omega: &DensityMatrix, tau: &DensityMatrix) -> Result<f64> {
    if omega.dims() != tau.dims() {
        return Err(Error::dim(format!(
            "fidelity of states with dims {:?} vs {:?}",
            omega.dims(),
            tau.dims()
        )));
    }
    // ‖√ω √τ‖₁ = Tr √(√ω τ √ω), via two Hermitian decompositions.
    let sqrt_omega = spectral::matrix_fn(omega.mat(), |v| v.max(0.0).sqrt());
    let inner = &sqrt_omega * tau.mat() * &sqrt_omega;
    let root_sum: f64 = eigh(&inner).vals.iter().map(|&v| v.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum).clamp(0.0, 1.0))
}

/// The maximally entangled state `Φ^d` on `d ⊗ d`.
#[derive(Debug, Clone)]
pub struct MaxEntangled {
    d: usize,
    state: DensityMatrix,
}

impl MaxEntangled {
    /// Schmidt rank / local dimension `d`.
    pub fn d(&self) -> usize {
        self.d
    }

    /// The projector as a state.
    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }
}

/// Builds `Φ^d`, the projector onto `d^{-1/2} Σ_i |ii⟩`.
pub fn max_entangled(d: usize) -> Result<MaxEntangled> {
    if d < 2 {
        return Err(Error::range(format!("max_entangled requires d ≥ 2, got {d}")));
    }
    let n = d * d;
    let mut psi = vec![C64::new(0.0, 0.0); n];
    let amp = 1.0 / (d as f64).sqrt();
    for i in 0..d {
        psi[i * d + i] = Complex::new(amp, 0.0);
    }
    let state = DensityMatrix::from_pure(d, d, &psi)?;
    Ok(MaxEntangled { d, state })
}

/// The swap (flip) operator `F^d = Σ_{ij} |ij⟩⟨ji|` on `d ⊗ d`.
pub fn swap_operator(d: usize) -> BipartiteOperator {
    let n = d * d;
    let mut mat = CMatrix::zeros(n, n);
    for i in 0..d {
        for j in 0..d {
            mat[(i * d + j, j * d + i)] = C64::new(1.0, 0.0);
        }
    }
    BipartiteOperator::new(d, d, mat).expect("swap dims are valid")
}

/// A completely positive map in Kraus form with input/output local dims.
#[derive(Debug, Clone)]
pub struct CpMap {
    in_dims: (usize, usize),
    out_dims: (usize, usize),
    kraus: Vec<CMatrix>,
}

impl CpMap {
    /// Wraps Kraus operators after shape validation.
    pub fn new(
        in_dims: (usize, usize),
        out_dims: (usize, usize),
        kraus: Vec<CMatrix>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidOperation {
                context: "a CP map needs at least one Kraus operator".into(),
            });
        }
        let din = in_dims.0 * in_dims.1;
        let dout = out_dims.0 * out_dims.1;
        if din == 0 || dout == 0 || din > MAX_TOTAL_DIM || dout > MAX_TOTAL_DIM {
            return Err(Error::dim(format!(
                "CP map dims {in_dims:?} -> {out_dims:?} unsupported"
            )));
        }
        for (k, op) in kraus.iter().enumerate() {
            if op.nrows() != dout || op.ncols() != din {
                return Err(Error::dim(format!(
                    "Kraus operator {k} is {}x{}, expected {dout}x{din}",
                    op.nrows(),
                    op.ncols()
                )));
            }
        }
        Ok(Self {
            in_dims,
            out_dims,
            kraus,
        })
    }

    /// Input local dimensions.
    pub fn in_dims(&self) -> (usize, usize) {
        self.in_dims
    }

    /// Output local dimensions.
    pub fn out_dims(&self) -> (usize, usize) {
        self.out_dims
    }

    /// Kraus operators.
    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    /// Identity channel on the given dims.
    pub fn identity(dims: (usize, usize)) -> Result<Self> {
        let n = dims.0 * dims.1;
        Self::new(dims, dims, vec![CMatrix::identity(n, n)])
    }

    /// `Σ_k K_k† K_k`, which equals `I` exactly for trace-preserving maps.
    pub fn kraus_gram(&self) -> CMatrix {
        let din = self.in_dims.0 * self.in_dims.1;
        let mut acc = CMatrix::zeros(din, din);
        for k in &self.kraus {
            acc += k.adjoint() * k;
        }
        acc
    }

    /// Max-entry residual of the trace-preservation condition.
    pub fn tp_residual(&self) -> f64 {
        let din = self.in_dims.0 * self.in_dims.1;
        max_abs(&(self.kraus_gram() - CMatrix::identity(din, din)))
    }

    /// Unnormalized Choi matrix `Σ_ij E_ij ⊗ P(E_ij)` on `in ⊗ out`.
    ///
    /// PSD by construction for Kraus-form maps; exposed for validation of
    /// derived (twisted) maps.
    pub fn choi(&self) -> CMatrix {
        let din = self.in_dims.0 * self.in_dims.1;
        let dout = self.out_dims.0 * self.out_dims.1;
        let n = din * dout;
        let mut choi = CMatrix::zeros(n, n);
        for k in &self.kraus {
            // |v⟩ with v[(i, m)] = K[m, i]; then the contribution is |v⟩⟨v|.
            let mut v = vec![C64::new(0.0, 0.0); n];
            for i in 0..din {
                for m in 0..dout {
                    v[i * dout + m] = k[(m, i)];
                }
            }
            for r in 0..n {
                for c in 0..n {
                    choi[(r, c)] += v[r] * v[c].conj();
                }
            }
        }
        choi
    }

    /// Applies the map: `Σ_k K_k X K_k†`.
    pub fn apply(&self, x: &BipartiteOperator) -> Result<BipartiteOperator> {
        if x.dims() != self.in_dims {
            return Err(Error::dim(format!(
                "map expects input dims {:?}, got {:?}",
                self.in_dims,
                x.dims()
            )));
        }
        let dout = self.out_dims.0 * self.out_dims.1;
        let mut acc = CMatrix::zeros(dout, dout);
        for k in &self.kraus {
            acc += k * x.mat() * k.adjoint();
        }
        BipartiteOperator::new(self.out_dims.0, self.out_dims.1, acc)
    }
}

/// Applies a CP map to a bipartite operator; free-function form.
pub fn apply_cp_map(map: &CpMap, x: &BipartiteOperator) -> Result<BipartiteOperator> {
    map.apply(x)
}
