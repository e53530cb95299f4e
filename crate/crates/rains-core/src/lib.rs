//! Numerical toolkit for Rains relative entropies of bipartite quantum states.
//!
//! The crate is organized in layers:
//!
//! * [`bipartite`] — dense complex operators tagged with local dimensions
//!   (`d_A`, `d_B`), partial transposition, trace norm, fidelity, maximally
//!   entangled states, channels in Kraus form, and seeded random ensembles.
//! * [`divergence`] — quantum relative entropy and the sandwiched / Petz /
//!   geometric Rényi families with their support conventions, the classical
//!   relative entropy, and direct-sum evaluators for classical–quantum
//!   operators.
//! * [`rains`] — projected-gradient minimization of each divergence over the
//!   PPT′ set (PSD operators whose partially transposed trace norm is at most
//!   one), the penalized equivalent formulation over states, and finite
//!   tensor-power regularization.
//! * [`monotone`] — selective PPT operations (instruments whose branches stay
//!   completely positive under the partial-transpose twist), their validation
//!   and sampling, and empirical monotonicity / flags / negativity checks.
//! * [`pade`] — upper bounds on probabilistic approximate distillable
//!   entanglement and the supporting inequality checks.
//! * [`suites`] — batch verification suites used by the CLI.
//! * [`io`] — JSON reading/writing of states and instruments.
//!
//! All divergence values are base-2 logarithms (bits). `+∞` is represented by
//! [`f64::INFINITY`] and propagates through arithmetic; it compares greater
//! than every finite value, matching the convention that a divergence with a
//! support violation is infinite.

#![forbid(unsafe_code)]

pub mod bipartite;
pub mod divergence;
pub mod error;
pub mod io;
pub mod monotone;
pub mod pade;
pub mod rains;
pub mod random;
pub mod spectral;
pub mod suites;
pub mod tensor;

pub use bipartite::{BipartiteOperator, CpMap, DensityMatrix, MaxEntangled};
pub use divergence::{CqOperator, Divergence, RenyiOrder, RenyiVariant};
pub use error::{Error, Result};
pub use monotone::{
    Ensemble, FlagCut, FlagsReport, MonotonicityReport, NegativityReport, SamplingKind,
    SelectivePptOperation, ValidationReport,
};
pub use pade::{
    AlphaBound, EbitCheckReport, PadeBoundReport, PadeQuery, PseudoContinuityReport,
    RenyiBoundReport, WeakConverseBound, WeakConvexityReport,
};
pub use rains::{PptPrimeElement, RainsResult, RegularizationQuery, SolverConfig};
pub use suites::{SuiteKind, SuiteReport, TrialRecord};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex<f64>;

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<C64>;

/// Largest supported total dimension `d_A · d_B`.
pub const MAX_TOTAL_DIM: usize = 64;
