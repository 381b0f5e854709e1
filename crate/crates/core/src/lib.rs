//! Grammar compression pipeline: LZ77-like parsing, balanced grammar
//! construction, and recompression into a run-length SLP.

pub mod convert;
pub mod format;
pub mod grammar;
pub mod lz;
pub mod pipeline;
pub mod recompression;
