//! Exact coefficient-space toolkit for symmetric bipartite POVMs.

pub mod corpus;
pub mod discrimination;
pub mod error;
pub mod extremal;
pub mod feasible;
pub mod io;
pub mod linalg;
pub mod nogo;
pub mod operators;
pub mod protocols;
pub mod repro;
pub mod scalar;
pub mod symmetry;

pub use error::{Error, Result};
