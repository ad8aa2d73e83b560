//! Decision procedure for existential sentences over `(Z_p, +, *, E_p)`.

pub mod error;
pub mod exppoly;
pub mod frontend;
pub mod engine;
pub mod hensel;
pub mod linalg;
pub mod padic;
pub mod par;

pub use error::{Error, Result};
