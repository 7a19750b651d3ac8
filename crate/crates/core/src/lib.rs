//! Exact unrestriction of tensor degenerations and related diagnostics.

pub mod algebra;
pub mod analysis;
pub mod field;
pub mod hompoly;
pub mod identity;
pub mod json;
pub mod matrix;
pub mod poly;
pub mod repro;
pub mod segre;
pub mod series;
pub mod sigma2;
pub mod tensor;
pub mod veronese;

pub use field::{Field, FieldKind, Scalar};
pub use matrix::{LinMap, Matrix};
pub use series::{Series, Valuation};
pub use tensor::Tensor;
