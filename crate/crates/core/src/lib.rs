pub mod error;
pub mod field;
pub mod forms;
pub mod gf;
pub mod hypersurface;
pub mod linalg;
mod mgcd;
pub mod pbasis;
pub mod poly;
pub mod random;
pub mod symbols;

pub use error::{Error, Result};
pub use field::{rf_eq, FieldContext, FieldElement, MultiIndex};
pub use gf::{GaloisField, GfElement};
