//! Exact certification toolkit for coverage-like set functions.
//!
//! Set functions are materialized exhaustively over `2^[n]` with exact
//! rational values. From a table one can build the multiaffine generating
//! polynomial or its homogenization, certify (complete) log-concavity through
//! exact Hessian inertia and indecomposability sweeps, verify or synthesize
//! 2-coverage and strongly 2-coverage certificates, decompose joint entropy
//! into mutual-information weights, and run or diagnose the down-up walk.
//!
//! Elements are 1-based in all external formats and 0-based bit positions
//! internally.

pub mod cov2;
pub mod entropy;
pub mod error;
pub mod io;
pub mod lc;
pub mod lp;
pub mod matrix;
pub mod matroid;
pub mod par;
pub mod poly;
pub mod rational;
pub mod setfn;
pub mod subset;
pub mod walk;

pub use error::{Error, Result};
pub use matrix::SymMatrix;
pub use rational::Rational;
pub use setfn::SetFunctionTable;
pub use subset::Subset;
