//! DOAGs, their labelled transition matrices and the single decomposition
//! step.

mod decompose;
mod doag;
pub mod format;
mod matrix;

pub use decompose::{decompose_step, recompose, DecompositionStep};
pub use doag::{Doag, DoagStats};
pub use matrix::{decode, encode, is_valid_transition_matrix, TransitionMatrix};
