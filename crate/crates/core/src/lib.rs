pub mod context;
pub mod deform;
pub mod error;
pub mod expr;
pub mod fields;
pub mod forms;
pub mod gauge;
pub mod geometry;
pub mod homology;
pub mod invariants;
pub mod quadrature;

pub use context::Context;
pub use error::{Error, Result};
