//! Multiplication of hyperbolic octonions.
//!
//! Two kernels compute the same bilinear product `x · b`:
//!
//! - [`mul_naive`]: the schoolbook formulas, 64 multiplications and 56
//!   additions.
//! - [`mul_fast`]: a factorized pipeline of sparse stages with 26 general
//!   multiplications and 90 additions (24 of them depend only on `b` and can
//!   be reused across left operands).
//!
//! The fast pipeline is data, not code. It is certified exactly, by
//! composing its stages into a matrix of linear forms and comparing with the
//! schoolbook matrix ([`verify`]), counted by running it in an instrumented
//! arithmetic context ([`opcount`]), and flattened into a straight-line
//! program ([`linearizer`]).
//!
//! ```
//! use octofast::{mul_fast, mul_naive, ExactOcto};
//!
//! let x = ExactOcto::from_ints([1, 2, 3, 4, 5, 6, 7, 8]);
//! let b = ExactOcto::from_ints([8, -7, 6, -5, 4, -3, 2, -1]);
//! assert_eq!(mul_fast(&x, &b), mul_naive(&x, &b));
//! ```

pub mod basis;
pub mod error;
pub mod kernel;
pub mod linearizer;
pub mod linform;
pub mod octo;
pub mod opcount;
pub mod scalar;
pub mod schoolbook;
pub mod verify;

pub use basis::{basis_mul, BasisProduct};
pub use error::{Error, Result};
pub use kernel::{
    build_pipeline, certified_pipeline, mul_fast, precompute_corrections, precompute_s, Pipeline, PrecomputeSet,
};
pub use linform::LinForm;
pub use octo::{ExactOcto, FloatOcto, Octo, DIM};
pub use opcount::{count_algorithm, count_pipeline, Algorithm, OpCount};
pub use scalar::{Rational, Scalar};
pub use schoolbook::{mul_naive, schoolbook_matrix};
pub use verify::{certify, certify_pipeline, CertifiedPipeline, ResidualReport};
