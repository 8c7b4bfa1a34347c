#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cantor;
pub mod error;
pub mod functionals;
pub mod hausdorff;
pub mod lipschitz;
pub mod measure;
pub mod metric;
pub mod realline;

pub use error::{Error, Result};
