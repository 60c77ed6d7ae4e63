//! Finite-blocklength coding machinery: codebook networks, random codebook
//! generation, joint typicality, packing-condition audits, a pretty-good
//! measurement decoder, and Monte Carlo simulation of the feedback scheme.

pub mod codebook;
pub mod network;
pub mod packing;
pub mod pgm;
pub mod sim;
pub mod typicality;

use thiserror::Error;

use crate::ensemble::EnsembleError;
use crate::qcore::QcoreError;
use crate::qinfo::InfoError;

pub use codebook::{generate_codebook, Codebook, CodebookTable, MAX_CODEBOOK_SYMBOLS};
pub use network::{
    build_qcl_network, build_ratesplit_network, example_mac_network, message_set_size,
    validate_network, MessageIndex, MultiplexBayesNet, NetVertex, ValidationReport,
};
pub use packing::{packing_rate_check, ConditionCheck};
pub use pgm::pgm_decode;
pub use sim::{classical_complete_states, simulate_qcl_scheme, SimReport};
pub use typicality::{typicality_check, JointDist};

#[derive(Debug, Error)]
pub enum CodesimError {
    #[error("invalid configuration: {context}")]
    InvalidConfig { context: String },
    #[error("rates outside the representable range ({required_bits} message bits required)")]
    InvalidRates { required_bits: f64 },
    #[error("invalid network: {issues}")]
    InvalidNetwork { issues: String },
    #[error("codebook of {symbols} symbols exceeds the cap of {cap}")]
    CodebookTooLarge { symbols: u64, cap: u64 },
    #[error("sequence length mismatch: {context}")]
    LengthMismatch { context: String },
    #[error("instrument branch {branch} post-state depends on its input")]
    NotClassicalComplete { branch: usize },
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCapExceeded { dim: usize, cap: usize },
    #[error(transparent)]
    Core(#[from] QcoreError),
    #[error(transparent)]
    Info(#[from] InfoError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}
