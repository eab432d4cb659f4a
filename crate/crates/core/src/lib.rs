//! Source and channel simulation from arbitrary randomness.

pub mod channel;
pub mod cli;
pub mod error;
pub mod io;
pub mod numeric;
pub mod oracle;
pub mod product;
pub mod source;
pub mod spectrum;

pub use error::{Error, Result};
