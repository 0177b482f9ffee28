//! Exact-arithmetic library for volume polynomials of tropical Jacobians
//! and tropical Prym varieties of harmonic double covers of metric graphs.
//!
//! Everything is computed over exact rationals; there is no floating point
//! anywhere in the crate. The three Prym volume routes (combinatorial,
//! homology quotient, kernel lattice) are implemented independently and
//! cross-checked by the test suite.

// index-based loops mirror the textbook linear-algebra formulations
#![allow(clippy::needless_range_loop)]

pub mod cover;
pub mod gen;
pub mod graph;
pub mod homology;
pub mod json;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod volumes;

use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("graph not connected")]
    NotConnected,
    #[error("unknown edge id: {0}")]
    UnknownEdge(String),
    #[error("unknown vertex id: {0}")]
    UnknownVertex(String),
    #[error("duplicate id: {0}")]
    DuplicateId(String),
    #[error("edge length must be positive: {0}")]
    NonPositiveLength(String),
    #[error("dilation closure violated: {0}")]
    DilationClosure(String),
    #[error("invalid cover: {0}")]
    InvalidCover(String),
    #[error("total graph disconnected")]
    TotalDisconnected,
    #[error("kernel route defined for dilated covers only; use homology route")]
    KernelRouteFree,
    #[error("not divisible")]
    NotDivisible,
    #[error("missing variable in assignment: {0}")]
    MissingVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("generation infeasible: {0}")]
    Infeasible(String),
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("internal consistency error: {0}")]
    Internal(String),
}
