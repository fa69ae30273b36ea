//! Zero-error computation of a function `f(X, Y)` over a three-node network:
//! sources A and B observe `X` and `Y`, a relay C forwards a message back to
//! both, and each must recover `f` exactly.
//!
//! Modules, bottom to top: [`model`] (instances and block indexing),
//! [`graphs`] (rook's and confusability graphs, OR products), [`coloring`]
//! (colorings, chromatic entropy, color covers), [`entropy`] (graph entropy
//! and related quantities), [`region`] (rate-region bounds and frontiers)
//! and [`protocol`] (concrete coded schemes).

pub mod coloring;
pub mod entropy;
pub mod error;
pub mod graphs;
pub mod model;
pub mod protocol;
pub mod region;
pub mod search;

pub use error::{Error, Result};
