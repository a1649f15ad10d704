//! Dense matrix primitives shared by every other module.

mod matrix;
pub mod norms;
pub mod ops;
pub mod qr;
pub mod regression;
pub mod svd;

pub use matrix::{ColumnMatrix, PNorm};
pub use norms::{entrywise_lp_norm, l2, lp2_norm, vector_lp};
pub use ops::{leverage_scores, projection_cost_p2, pseudoinverse, residual_norms, svd_rank_k_error};
pub use qr::{numerical_rank, orthonormal_basis, PivotedQr};
pub use regression::{lp_fit_error, lp_regression, IrlsOptions, LpFit};
pub use svd::Svd;
