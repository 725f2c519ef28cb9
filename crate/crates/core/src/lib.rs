//! Invariants of unitary modular tensor categories computed from modular data.
//!
//! The crate reads a pair of modular matrices `(S, T)`, checks them against
//! the modularity axioms, and evaluates the trace of self-braidings in every
//! fusion channel, the Frobenius-Schur indicators, and the eigenvalue
//! multiplicities of the self-braidings. Those multiplicities feed a
//! realizability filter and the synthesis of canonical R-matrices.
//!
//! Everything is cross-checked against [`oracle`], a set of explicit
//! multiplicity-free anyon models whose braiding eigenvalues are written
//! down literally.
//!
//! ```
//! use modtrace::{bantay, oracle, Tolerance};
//!
//! let pol = Tolerance::default();
//! let ising = oracle::lookup("ising").unwrap();
//! let report = bantay::realizability_report(&ising.md, &pol);
//! assert!(report.passed());
//! ```

pub mod axioms;
pub mod bantay;
pub mod cli;
pub mod error;
pub mod format;
pub mod modular_data;
pub mod numerics;
pub mod oracle;
pub mod rmatrix;
pub mod search;

pub use error::{Error, Result};
pub use modular_data::{DerivedData, FusionTensor, ModularData};
pub use numerics::{Complex, Tolerance};
