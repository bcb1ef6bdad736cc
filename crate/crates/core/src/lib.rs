//! Schmidt subspaces of block Hankel operators with symmetric matrix symbols.
//!
//! The anti-linear Hankel operator `H_U(F) = P_m(U conj(F))` on `H^2(C^m)` is
//! realized at a finite truncation `N` as the block Hankel matrix
//! `Gamma = [U(j + k)]` composed with coefficient conjugation. From it the
//! crate computes the Schmidt subspaces `E(s) = ker(H_U^2 - s^2 I)` and checks
//! their structure numerically: near invariance under the backward shift, the
//! wandering part, the `F_0 K_Theta` model representation and the action of
//! `H_U` on it. Every check produces a residual and a verdict, never a panic.
//!
//! ```
//! use hankel_schmidt::prelude::*;
//!
//! let u = scalar_poly(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap(); // z^2
//! let analysis = Analysis::new(&u, &AnalysisConfig::default()).unwrap();
//! let top = &analysis.clusters()[0];
//! assert!((top.s - 1.0).abs() < 1e-12);
//! assert_eq!(top.multiplicity, 3);
//! ```

// `!(x <= tol)` is used on purpose so that NaN residuals fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod corpus;
pub mod error;
pub mod exec;
pub mod fourier;
pub mod hankel;
pub mod linalg;
pub mod report;
pub mod reproduce;
pub mod spectral;
pub mod structure;
pub mod symbol_file;
pub mod symbols;
pub mod verify;

pub use error::{Error, Result};

/// Library version embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod prelude {
    pub use crate::error::{Error, Result};
    pub use crate::exec::Execution;
    pub use crate::fourier::{FourierVec, MatrixSeries};
    pub use crate::linalg::{c, CMat, CVec, C64};
    pub use crate::symbol_file::SymbolSpec;
    pub use crate::symbols::{poly_symbol, scalar_poly, MatrixSymbol};
    pub use crate::verify::{Analysis, AnalysisConfig, Tolerances};
}
