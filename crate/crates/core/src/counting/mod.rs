//! Exact counting tables.

mod cache;
mod doag;
mod policy;
mod source;
pub(crate) mod wedge;

pub use cache::{CacheHeader, CacheKind};
pub use doag::{BuildOptions, DoagCountTable};
pub(crate) use doag::DoagCoefficients;
pub use policy::DegreePolicy;
pub use source::{normalized_constant_sequence, superfactorials, GammaTable, SourceCountTable};

pub(crate) use cache::{load_or_build, read_entries, read_header, write_table};

/// Arbitrary-precision non-negative count.
pub type BigCount = num_bigint::BigUint;
