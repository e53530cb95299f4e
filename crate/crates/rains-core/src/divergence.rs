//! Quantum and classical divergences with explicit support conventions.
//!
//! All values are in bits. A divergence whose support condition fails is
//! `+∞` ([`f64::INFINITY`]), which propagates through arithmetic and compares
//! greater than every finite value.
//!
//! Conventions on degenerate supports:
//!
//! * The support of a PSD operator is the span of eigenvectors with
//!   eigenvalue above [`SUPPORT_REL_TOL`]`·λ_max`; inclusion `supp(ω) ⊆
//!   supp(τ)` holds iff the compression of `ω` onto the complement carries
//!   trace norm at most [`SUPPORT_LEAK_TOL`].
//! * Matrix logarithms, inverses, and fractional powers are taken on the
//!   support (pseudo-inverse convention).
//! * The geometric family needs `τ^{-1/2}` for every order, so it is `+∞`
//!   whenever support inclusion fails, at any `α`.
//! * For sandwiched orders below one, orthogonal states give `Q̃ = 0` and the
//!   value is `+∞` by continuity of `log` at `0⁺`.

use crate::bipartite::{BipartiteOperator, DensityMatrix};
use crate::error::{Error, Result};
use crate::spectral::{eigh, Eigh, SUPPORT_LEAK_TOL, SUPPORT_REL_TOL};
use crate::tensor::hs_inner_re;
use crate::CMatrix;

/// The three Rényi families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RenyiVariant {
    /// `D̃_α`, data processing valid for `α ∈ [1/2, 1) ∪ (1, ∞)`.
    Sandwiched,
    /// `D_α` with `Q_α = Tr[ω^α τ^{1−α}]`, valid for `α ∈ (0,1) ∪ (1,2]`.
    Petz,
    /// `D̂_α` with `Q̂_α = Tr[τ (τ^{−1/2} ω τ^{−1/2})^α]`, valid for `α ∈ (0,1) ∪ (1,2]`.
    Geometric,
}

impl RenyiVariant {
    /// Lowercase label used in reports and CLI flags.
    pub fn name(self) -> &'static str {
        match self {
            RenyiVariant::Sandwiched => "sandwiched",
            RenyiVariant::Petz => "petz",
            RenyiVariant::Geometric => "geometric",
        }
    }

    /// Parses the CLI identifier.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "sandwiched" => Ok(RenyiVariant::Sandwiched),
            "petz" => Ok(RenyiVariant::Petz),
            "geometric" => Ok(RenyiVariant::Geometric),
            other => Err(Error::range(format!(
                "unknown Rényi variant {other:?} (expected sandwiched, petz, or geometric)"
            ))),
        }
    }

    fn window(self) -> &'static str {
        match self {
            RenyiVariant::Sandwiched => "[1/2,1) ∪ (1,∞)",
            RenyiVariant::Petz | RenyiVariant::Geometric => "(0,1) ∪ (1,2]",
        }
    }

    fn admits(self, alpha: f64) -> bool {
        if !(alpha.is_finite() && alpha > 0.0) || alpha == 1.0 {
            return false;
        }
        match self {
            RenyiVariant::Sandwiched => alpha >= 0.5,
            RenyiVariant::Petz | RenyiVariant::Geometric => alpha <= 2.0,
        }
    }
}

/// A Rényi order: the exponent `α ≠ 1` together with the family, restricted
/// to the family's data-processing validity window.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct RenyiOrder {
    alpha: f64,
    variant: RenyiVariant,
}

impl RenyiOrder {
    /// Validates the window on construction.
    pub fn new(alpha: f64, variant: RenyiVariant) -> Result<Self> {
        if !variant.admits(alpha) {
            return Err(Error::AlphaOutOfWindow {
                alpha,
                variant: variant.name(),
                window: variant.window(),
            });
        }
        Ok(Self { alpha, variant })
    }

    /// Sandwiched order.
    pub fn sandwiched(alpha: f64) -> Result<Self> {
        Self::new(alpha, RenyiVariant::Sandwiched)
    }

    /// Petz order.
    pub fn petz(alpha: f64) -> Result<Self> {
        Self::new(alpha, RenyiVariant::Petz)
    }

    /// Geometric order.
    pub fn geometric(alpha: f64) -> Result<Self> {
        Self::new(alpha, RenyiVariant::Geometric)
    }

    /// The exponent.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// The family.
    pub fn variant(&self) -> RenyiVariant {
        self.variant
    }
}

/// Measure selector shared by the solver and verification layers.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum Divergence {
    /// Quantum relative entropy `D`.
    Relative,
    /// A Rényi divergence of the given order.
    Renyi(RenyiOrder),
}

impl Divergence {
    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            Divergence::Relative => "relative-entropy".to_string(),
            Divergence::Renyi(o) => format!("{}-{}", o.variant().name(), o.alpha()),
        }
    }

    /// Evaluates the divergence `𝔻(ω‖τ)` in bits.
    pub fn evaluate(&self, omega: &DensityMatrix, tau: &BipartiteOperator) -> Result<f64> {
        match self {
            Divergence::Relative => relative_entropy(omega, tau),
            Divergence::Renyi(order) => renyi_divergence(*order, omega, tau),
        }
    }
}

/// Spectral data of the second argument, with support bookkeeping.
struct Supported {
    e: Eigh,
    cutoff: f64,
}

impl Supported {
    fn from(tau: &CMatrix) -> Result<Self> {
        let e = eigh(tau);
        if e.min_val() < -1e-8 {
            return Err(Error::NotPsd {
                min_eig: e.min_val(),
            });
        }
        let cutoff = SUPPORT_REL_TOL * e.max_val().max(0.0);
        Ok(Self { e, cutoff })
    }

    /// `f` applied on the support, zero off it.
    fn apply_on_support(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let cut = self.cutoff;
        self.e.apply(|v| if v > cut { f(v) } else { 0.0 })
    }

    /// `‖(I−Π_τ) ω (I−Π_τ)‖₁`; since the compression of a state is PSD this
    /// equals `Tr[ω (I−Π_τ)]`, clipped at zero against eigenvalue noise.
    fn support_leak(&self, omega: &CMatrix) -> f64 {
        let pi = self.apply_on_support(|_| 1.0);
        let kept = hs_inner_re(omega, &pi);
        let total: f64 = omega.diagonal().iter().map(|z| z.re).sum();
        (total - kept).max(0.0)
    }

    fn includes_support_of(&self, omega: &CMatrix) -> bool {
        self.support_leak(omega) <= SUPPORT_LEAK_TOL
    }
}

fn check_dims(omega: &DensityMatrix, tau: &BipartiteOperator) -> Result<()> {
    if omega.dims() != tau.dims() {
        return Err(Error::dim(format!(
            "divergence arguments have dims {:?} vs {:?}",
            omega.dims(),
            tau.dims()
        )));
    }
    Ok(())
}

/// Quantum relative entropy `D(ω‖τ) = Tr[ω(log₂ω − log₂τ)]`, or `+∞` when
/// `supp(ω) ⊄ supp(τ)`.
pub fn relative_entropy(omega: &DensityMatrix, tau: &BipartiteOperator) -> Result<f64> {
    check_dims(omega, tau)?;
    let sup = Supported::from(tau.mat())?;
    if !sup.includes_support_of(omega.mat()) {
        return Ok(f64::INFINITY);
    }
    let e_omega = eigh(omega.mat());
    let self_term: f64 = e_omega
        .clamped_vals()
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| v * v.log2())
        .sum();
    let log_tau = sup.apply_on_support(f64::log2);
    let cross_term = hs_inner_re(omega.mat(), &log_tau);
    Ok(self_term - cross_term)
}

/// Rényi divergence `(1/(α−1)) log₂ Q` of the selected family, in bits.
pub fn renyi_divergence(
    order: RenyiOrder,
    omega: &DensityMatrix,
    tau: &BipartiteOperator,
) -> Result<f64> {
    check_dims(omega, tau)?;
    let alpha = order.alpha();
    let sup = Supported::from(tau.mat())?;
    let q = match order.variant() {
        RenyiVariant::Sandwiched => {
            if alpha > 1.0 && !sup.includes_support_of(omega.mat()) {
                return Ok(f64::INFINITY);
            }
            let gamma = (1.0 - alpha) / (2.0 * alpha);
            let tau_g = sup.apply_on_support(|v| v.powf(gamma));
            let inner = &tau_g * omega.mat() * &tau_g;
            eigh(&inner)
                .clamped_vals()
                .iter()
                .filter(|&&v| v > 0.0)
                .map(|&v| v.powf(alpha))
                .sum::<f64>()
        }
        RenyiVariant::Petz => {
            if alpha > 1.0 && !sup.includes_support_of(omega.mat()) {
                return Ok(f64::INFINITY);
            }
            let omega_a = crate::spectral::matrix_fn(omega.mat(), |v| {
                if v > 0.0 {
                    v.powf(alpha)
                } else {
                    0.0
                }
            });
            let tau_b = sup.apply_on_support(|v| v.powf(1.0 - alpha));
            hs_inner_re(&omega_a, &tau_b)
        }
        RenyiVariant::Geometric => {
            // τ^{-1/2} appears for every order, so support inclusion is
            // required unconditionally; +∞ otherwise.
            if !sup.includes_support_of(omega.mat()) {
                return Ok(f64::INFINITY);
            }
            let tau_inv_sqrt = sup.apply_on_support(|v| 1.0 / v.sqrt());
            let g = &tau_inv_sqrt * omega.mat() * &tau_inv_sqrt;
            let g_a = crate::spectral::matrix_fn(&g, |v| if v > 0.0 { v.powf(alpha) } else { 0.0 });
            hs_inner_re(tau.mat(), &g_a)
        }
    };
    Ok(renyi_from_q(alpha, q))
}

/// `(1/(α−1)) log₂ q` with the `q → 0⁺` limits handled explicitly.
pub(crate) fn renyi_from_q(alpha: f64, q: f64) -> f64 {
    if q <= 0.0 {
        // Q vanishes only for orthogonal supports: +∞ at every admissible α
        // (for α < 1 the sign of both factors flips).
        return f64::INFINITY;
    }
    q.log2() / (alpha - 1.0)
}

/// Classical relative entropy `Σ p(x) log₂(p(x)/q(x))` over `supp(p)`.
pub fn classical_relative_entropy(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::dim(format!(
            "distributions of length {} vs {}",
            p.len(),
            q.len()
        )));
    }
    if p.iter().any(|&v| v < 0.0) || q.iter().any(|&v| v < 0.0) {
        return Err(Error::range("distribution entries must be nonnegative"));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::range(format!("p must sum to 1, found {total:.17}")));
    }
    let mut acc = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += pi * (pi / qi).log2();
        }
    }
    Ok(acc)
}

/// A classical–quantum operator `Σ_x w(x) |x⟩⟨x| ⊗ B_x`: nonnegative flag
/// weights with equal-dimension blocks.
#[derive(Debug, Clone)]
pub struct CqOperator {
    weights: Vec<f64>,
    blocks: Vec<BipartiteOperator>,
}

impl CqOperator {
    /// Validates weight/block counts, nonnegativity, and equal block dims.
    pub fn new(weights: Vec<f64>, blocks: Vec<BipartiteOperator>) -> Result<Self> {
        if weights.is_empty() || weights.len() != blocks.len() {
            return Err(Error::dim(format!(
                "{} weights vs {} blocks",
                weights.len(),
                blocks.len()
            )));
        }
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(Error::range("flag weights must be finite and nonnegative"));
        }
        let dims = blocks[0].dims();
        if blocks.iter().any(|b| b.dims() != dims) {
            return Err(Error::dim("blocks must share dimensions"));
        }
        Ok(Self { weights, blocks })
    }

    /// Flag dimension.
    pub fn flag_dim(&self) -> usize {
        self.weights.len()
    }

    /// Flag weights.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Blocks.
    pub fn blocks(&self) -> &[BipartiteOperator] {
        &self.blocks
    }

    /// Assembles the block-diagonal operator on the enlarged space, with the
    /// flag joined to the `A` factor (cut `XA|B`).
    pub fn assemble(&self) -> Result<BipartiteOperator> {
        let (d_a, d_b) = self.blocks[0].dims();
        let nf = self.flag_dim();
        let block_dim = d_a * d_b;
        let n = nf * block_dim;
        if n > crate::MAX_TOTAL_DIM {
            return Err(Error::DimensionCap {
                dim: n,
                cap: crate::MAX_TOTAL_DIM,
            });
        }
        let mut mat = CMatrix::zeros(n, n);
        for (x, (w, b)) in self.weights.iter().zip(&self.blocks).enumerate() {
            let off = x * block_dim;
            let scaled = b.mat() * crate::C64::new(*w, 0.0);
            mat.view_mut((off, off), (block_dim, block_dim)).copy_from(&scaled);
        }
        BipartiteOperator::new(nf * d_a, d_b, mat)
    }

    /// Assembled operator validated as a state (weights sum to one and every
    /// positively weighted block is a state).
    pub fn assemble_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.assemble()?)
    }
}

/// Both sides of the direct-sum identity for classical–quantum operators.
///
/// Left: the divergence of the assembled block-diagonal operators. Right:
/// `D(p‖q) + Σ_x p(x) · 𝔻(κ_x‖λ_x)`. For the exact divergence the two sides
/// agree; for Rényi orders `α > 1` the left side dominates.
pub fn direct_sum_sides(
    div: &Divergence,
    kappa: &CqOperator,
    lambda: &CqOperator,
) -> Result<(f64, f64)> {
    if kappa.flag_dim() != lambda.flag_dim() {
        return Err(Error::dim(format!(
            "flag dims {} vs {}",
            kappa.flag_dim(),
            lambda.flag_dim()
        )));
    }
    if kappa.blocks()[0].dims() != lambda.blocks()[0].dims() {
        return Err(Error::dim("block dims differ between the two operators"));
    }
    if let Divergence::Renyi(order) = div {
        if order.alpha() <= 1.0 {
            return Err(Error::range(format!(
                "the direct-sum inequality needs α > 1, got {}",
                order.alpha()
            )));
        }
    }

    let lhs = div.evaluate(&kappa.assemble_state()?, &lambda.assemble()?)?;

    let mut rhs = classical_relative_entropy(kappa.weights(), lambda.weights())?;
    for ((&px, kb), lb) in kappa
        .weights()
        .iter()
        .zip(kappa.blocks())
        .zip(lambda.blocks())
    {
        if px > 0.0 {
            let kx = DensityMatrix::new(kb.clone())?;
            rhs += px * div.evaluate(&kx, lb)?;
        }
    }
    Ok((lhs, rhs))
}
