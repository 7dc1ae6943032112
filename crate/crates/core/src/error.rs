//! Error type shared across the crate.

use thiserror::Error;

use crate::lattice::Lattice;

pub type Result<T> = std::result::Result<T, PlateError>;

#[derive(Debug, Error)]
pub enum PlateError {
    #[error("invalid lattice: {reason}")]
    InvalidLattice { reason: String },

    #[error(
        "lattice mismatch: left is (d={}, N={}, L={}), right is (d={}, N={}, L={})",
        left.dim(), left.points_per_axis(), left.side_length(),
        right.dim(), right.points_per_axis(), right.side_length()
    )]
    LatticeMismatch { left: Lattice, right: Lattice },

    #[error("field has {count} non-finite samples after {context}")]
    NonFiniteField { context: String, count: usize },

    #[error("symbol evaluates to a non-finite value at xi = {xi:?}")]
    NonFiniteSymbol { xi: Vec<f64> },

    #[error("custom symbol table has no entry for lattice frequency xi = {xi:?}")]
    SymbolTableMiss { xi: Vec<f64> },

    #[error("norm spec order mismatch: expected {expected}, got {actual}")]
    NormOrderMismatch { expected: String, actual: String },

    #[error("time index {index} out of range for a grid of {nodes} nodes")]
    TimeIndexOutOfRange { index: usize, nodes: usize },

    #[error("blow-up suspected: non-finite samples at Picard iteration {iteration}, time node {node}")]
    BlowUp { iteration: usize, node: usize },

    #[error("dilation factor {lambda} out of the representable window: {detail}")]
    DilationOutOfWindow { lambda: f64, detail: String },

    #[error(
        "inadmissible product exponents: N/q = N-1+1/r requires 1/r = N/q-(N-1) in [0,1]; \
         got N={n_factors}, q={q}, which gives 1/r = {inv_r}"
    )]
    InadmissibleProduct {
        n_factors: usize,
        q: String,
        inv_r: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}:{line}: {reason}")]
    FileFormat {
        path: String,
        line: usize,
        reason: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
