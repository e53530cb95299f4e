//! JSON encoding of states, instruments, and reports.
//!
//! State files are JSON objects `{"d_a", "d_b", "matrix"}` with the matrix
//! stored row-major as `[[ [re, im], … ], …]`. Instrument files are
//! `{"in_dims", "out_dims", "branches": [{"kraus": [matrix, …]}, …]}` with
//! each Kraus matrix in the state-file encoding. Writers emit every float
//! with 17 significant digits, which round-trips any `f64` exactly; reading a
//! file back therefore reproduces the operator bit-for-bit.
//!
//! Serialization of a fixed value is deterministic: struct fields keep their
//! declaration order and floats have a single canonical rendering, so equal
//! reports serialize to equal bytes.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::bipartite::{CpMap, DensityMatrix};
use crate::error::{Error, Result};
use crate::monotone::SelectivePptOperation;
use crate::{C64, CMatrix};

/// Complex matrix in file encoding: rows of `[re, im]` pairs.
pub type MatrixRows = Vec<Vec<[f64; 2]>>;

/// On-disk form of a bipartite density matrix.
#[derive(Serialize, Deserialize)]
struct StateFile {
    d_a: usize,
    d_b: usize,
    matrix: MatrixRows,
}

/// On-disk form of a selective operation.
#[derive(Serialize, Deserialize)]
struct InstrumentFile {
    in_dims: [usize; 2],
    out_dims: [usize; 2],
    branches: Vec<BranchFile>,
}

/// One completely positive branch.
#[derive(Serialize, Deserialize)]
struct BranchFile {
    kraus: Vec<MatrixRows>,
}

fn matrix_to_rows(m: &CMatrix) -> MatrixRows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn rows_to_matrix(rows: &MatrixRows, what: &str) -> Result<CMatrix> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || ncols == 0 {
        return Err(Error::invalid_input(format!("{what}: empty matrix")));
    }
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(Error::invalid_input(format!(
            "{what}: row {bad} has {} entries, expected {ncols}",
            rows[bad].len()
        )));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Serializes a state in file encoding.
pub fn state_to_json(rho: &DensityMatrix) -> Result<String> {
    let (d_a, d_b) = rho.dims();
    to_json_string(&StateFile {
        d_a,
        d_b,
        matrix: matrix_to_rows(rho.mat()),
    })
}

/// Parses a state file, enforcing every density-matrix invariant.
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let file: StateFile = serde_json::from_str(text)?;
    let mat = rows_to_matrix(&file.matrix, "state matrix")?;
    let n = file.d_a * file.d_b;
    if mat.nrows() != n || mat.ncols() != n {
        return Err(Error::invalid_input(format!(
            "state matrix is {}×{} but d_a·d_b = {n}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    DensityMatrix::from_matrix(file.d_a, file.d_b, mat)
}

/// Serializes a selective operation in file encoding.
pub fn instrument_to_json(op: &SelectivePptOperation) -> Result<String> {
    let (ia, ib) = op.in_dims();
    let (oa, ob) = op.out_dims();
    to_json_string(&InstrumentFile {
        in_dims: [ia, ib],
        out_dims: [oa, ob],
        branches: op
            .branches()
            .iter()
            .map(|b| BranchFile {
                kraus: b.kraus().iter().map(matrix_to_rows).collect(),
            })
            .collect(),
    })
}

/// Parses an instrument file, enforcing every selective-operation invariant.
pub fn instrument_from_json(text: &str) -> Result<SelectivePptOperation> {
    let file: InstrumentFile = serde_json::from_str(text)?;
    let in_dims = (file.in_dims[0], file.in_dims[1]);
    let out_dims = (file.out_dims[0], file.out_dims[1]);
    let branches = file
        .branches
        .iter()
        .enumerate()
        .map(|(x, b)| {
            let kraus = b
                .kraus
                .iter()
                .map(|m| rows_to_matrix(m, &format!("branch {x} Kraus matrix")))
                .collect::<Result<Vec<_>>>()?;
            CpMap::new(in_dims, out_dims, kraus)
        })
        .collect::<Result<Vec<_>>>()?;
    let op = SelectivePptOperation::new(branches)?;
    let check = crate::monotone::validate_selective_ppt(&op, 1e-9)?;
    if !check.valid {
        let worst = check
            .twist_min_eigs
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        return Err(Error::InvalidOperation {
            context: format!(
                "instrument fails validation: trace-preservation residual {:.3e} \
                 (allowed 1e-10), minimum twisted-Choi eigenvalue {:.3e} (allowed −1e-9)",
                check.tp_residual, worst
            ),
        });
    }
    Ok(op)
}

/// Bipartite operator in file encoding. Output payload only: the operator
/// need not have unit trace, so it is not generally re-loadable as a state.
#[derive(Serialize)]
pub struct OperatorJson {
    /// First local dimension.
    pub d_a: usize,
    /// Second local dimension.
    pub d_b: usize,
    /// Row-major entries as `[re, im]` pairs.
    pub matrix: MatrixRows,
}

impl OperatorJson {
    /// Encodes an operator.
    pub fn encode(op: &crate::bipartite::BipartiteOperator) -> Self {
        let (d_a, d_b) = op.dims();
        OperatorJson {
            d_a,
            d_b,
            matrix: matrix_to_rows(op.mat()),
        }
    }
}

/// Serializable rendering of a solver result, with the optimizer in the
/// state-file matrix encoding.
#[derive(Serialize)]
pub struct RainsResultJson {
    /// Certified value in bits.
    pub value: f64,
    /// Residual of the feasibility invariants at the optimizer.
    pub feasibility_residual: f64,
    /// Norm of the unit-step projected gradient at the final iterate.
    pub stationarity: f64,
    /// Outer iterations consumed by the winning start.
    pub iterations: usize,
    /// Whether the stopping rule was met.
    pub converged: bool,
    /// Partially transposed trace norm of the optimizer.
    pub sigma_star_pt_trace_norm: f64,
    /// The feasible point achieving `value`.
    pub sigma_star: OperatorJson,
}

impl RainsResultJson {
    /// Encodes a solver result.
    pub fn encode(r: &crate::rains::RainsResult) -> Self {
        RainsResultJson {
            value: r.value,
            feasibility_residual: r.feasibility_residual,
            stationarity: r.stationarity,
            iterations: r.iterations,
            converged: r.converged,
            sigma_star_pt_trace_norm: r.sigma_star.pt_trace_norm(),
            sigma_star: OperatorJson::encode(r.sigma_star.sigma()),
        }
    }
}

/// Serializes any report with the canonical float rendering.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SciPretty::new());
    value.serialize(&mut ser)?;
    String::from_utf8(out).map_err(|e| Error::invalid_input(format!("non-UTF-8 JSON: {e}")))
}

/// Pretty JSON formatter whose floats carry 17 significant digits.
///
/// Layout matches the standard two-space pretty printer; only float
/// rendering differs. Non-finite floats never reach the formatter (the
/// serializer maps them to `null` first), so every emitted number parses
/// back to the identical `f64`.
struct SciPretty {
    depth: usize,
    has_value: bool,
}

impl SciPretty {
    fn new() -> Self {
        SciPretty {
            depth: 0,
            has_value: false,
        }
    }

    fn newline<W: ?Sized + Write>(&self, w: &mut W) -> std::io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.depth {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl serde_json::ser::Formatter for SciPretty {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.depth += 1;
        self.has_value = false;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.depth -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> std::io::Result<()> {
        self.has_value = true;
        Ok(())
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.depth += 1;
        self.has_value = false;
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.depth -= 1;
        if self.has_value {
            self.newline(w)?;
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + Write>(
        &mut self,
        w: &mut W,
        first: bool,
    ) -> std::io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        self.newline(w)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        w.write_all(b": ")
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, _w: &mut W) -> std::io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}
