//! Exact small-dimension quantum state, channel, and instrument algebra.

mod adder;
mod channel;
mod instrument;
mod space;
mod state;

pub use adder::{adder_channel, adder_instrument, binary_adder_channel, swap_matrix};
pub use channel::{apply_channel, identity_channel, KrausChannel};
pub use instrument::{
    apply_instrument, sample_outcome, identity_instrument, InstrumentBranch, MeasurementRecord,
    QuantumInstrument,
};
pub use space::{HilbertLabel, Space};
pub use state::DensityOperator;

use thiserror::Error;

pub type C64 = num_complex::Complex64;
pub type CMat = nalgebra::DMatrix<C64>;

/// Hermiticity tolerance for validated operators.
pub const TOL_HERM: f64 = 1e-9;
/// Trace tolerance (unit trace of states, trace preservation of channels).
pub const TOL_TRACE: f64 = 1e-9;
/// Eigenvalues in [-TOL_PSD, 0) are clipped to zero; anything below is rejected.
pub const TOL_PSD: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum QcoreError {
    #[error("matrix is not Hermitian: max |m - m†| entry deviation = {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite: minimum eigenvalue = {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },
    #[error("trace is not one: trace = {trace:.12}")]
    TraceNotOne { trace: f64 },
    #[error("duplicate Hilbert space label `{name}`")]
    DuplicateLabel { name: String },
    #[error("unknown Hilbert space label `{name}`")]
    UnknownLabel { name: String },
    #[error("dimension mismatch: {context} (expected {expected}, found {found})")]
    DimensionMismatch {
        context: String,
        expected: usize,
        found: usize,
    },
    #[error("label dimension must be at least 1 (label `{name}`)")]
    ZeroDimension { name: String },
    #[error("channel is not trace preserving: max |ΣK†K - I| entry deviation = {deviation:.3e}")]
    NotTracePreserving { deviation: f64 },
    #[error("instrument outcome {outcome:?} appears more than once")]
    DuplicateOutcome { outcome: (u32, u32) },
}

pub(crate) fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

pub(crate) fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

/// Max entrywise absolute deviation between two matrices of equal shape.
pub(crate) fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Parse a square matrix from nested rows of [re, im] pairs, the wire
/// format used by configuration files.
pub fn matrix_from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat, QcoreError> {
    let n = rows.len();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(QcoreError::DimensionMismatch {
                context: format!("matrix row {i}"),
                expected: n,
                found: r.len(),
            });
        }
    }
    Ok(CMat::from_fn(n, n, |i, j| {
        C64::new(rows[i][j][0], rows[i][j][1])
    }))
}

/// Render a matrix as nested rows of [re, im] pairs.
pub fn matrix_to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}
