//! Computational toolkit for quantum contextuality: hypergraph scenarios and
//! their models, exclusivity-graph bounds, empirical tables and the
//! contextuality hierarchy, ontological models, and pre/post-selected
//! experiments with weak values.

pub mod error;
pub mod graph_invariants;
pub mod lp;
pub mod models;
pub mod ontomodels;
pub mod pps_weak;
pub mod quantum_kernel;
pub mod scenario;
pub mod sheaf;

pub use error::{Error, ErrorKind, Result};
