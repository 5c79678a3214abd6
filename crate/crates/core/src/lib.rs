//! Supervised PCA (exact) and supervised random projections (SVD-free)
//! for supervised dimensionality reduction, together with the kernels,
//! random Fourier feature maps, HSIC estimator, dataset tooling and
//! benchmark harness around them.
//!
//! Data matrices are `d × n`: one column per sample.

pub mod bench;
pub mod check;
pub mod datasets;
pub mod embeddings;
pub mod error;
pub mod eval;
pub mod hsic;
pub mod kernels;
pub mod linalg;
pub mod rff;

pub use embeddings::{Method, Model};
pub use error::{DataError, Error, ErrorKind, Result};
pub use linalg::Matrix;
