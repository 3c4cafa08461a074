//! Cap covers at scale K^{-1}, V-aligned cap sets, the broad functional,
//! pointwise and L^q broad-narrow decompositions, fuzzy norms and
//! broad/narrow cube classification.

pub mod aligned;
pub mod broad;
pub mod classify;
pub mod cover;
pub mod fuzzy;

pub use aligned::{aligned_caps, SubspaceCandidate};
pub use broad::{broad_functional, pointwise_broad_narrow, BroadNarrowSplit, BroadResult};
pub use classify::{classify_cubes, decoupling_ratio, ClassifyParams, CubeClassRecord};
pub use cover::{cap_cover, CapCover, CoverRadius};
pub use fuzzy::{fuzzy_norm, FuzzyStencil};
