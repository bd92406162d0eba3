pub mod counting;
pub mod error;
pub mod graph;
pub mod labelled;
pub mod oracle;
pub mod recursive;
pub mod rejection;
pub mod rng;
pub mod variations;

pub use error::{Error, Result};
