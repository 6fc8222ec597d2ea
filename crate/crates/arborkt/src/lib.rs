//! Construction and verification of arborescent Koszul-Tate resolutions.
//!
//! The pipeline starts from a free resolution of `O/I` over a polynomial
//! ring (computed by syzygies, or given explicitly as a Koszul or Taylor
//! complex), builds the symmetric algebra on decorated rooted trees with
//! its degree `-1` differential, and checks every defining identity:
//! `d^2 = 0`, exactness, the square-zero condition for the tree
//! differential, the retract relations back onto the resolution, and the
//! A-infinity/C-infinity relations induced on it. The `reduced` module
//! computes the homological invariants `b_i` that bound generator counts
//! of any Koszul-Tate resolution from below.

pub mod ainfty;
pub mod fixtures;
pub mod freemod;
pub mod ktcore;
pub mod polyring;
pub mod reduced;
pub mod resolution;
pub mod treealg;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("ring mismatch: {0}")]
    RingMismatch(String),
    #[error("module mismatch: {0}")]
    ModuleMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("element not in module image")]
    NotInImage,
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("psi table incomplete: no entry for tree {0} (degree {1})")]
    TableIncomplete(String, usize),
    #[error("degree {0} exceeds truncation bound {1}")]
    DegreeOverflow(usize, usize),
    #[error("lift failed: resolution is not exact where required ({0})")]
    LiftFailed(String),
    #[error("internal sign fault: obstruction for {0} is not a cycle")]
    ObstructionNotClosed(String),
    #[error("product law violation: {0}")]
    ProductLaw(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
