pub mod cli;
pub mod error;
pub mod family;
pub mod gap;
pub mod generate;
pub mod interval;
pub mod io;
pub mod linalg;
pub mod morse;
pub mod normed;
mod search;
pub mod reldim;
pub mod splitting;
pub mod tetrad;
pub mod verdict;

pub use error::{GapError, Result};
