//! Grids, band-limited data, discrete Fourier synthesis, norms, envelopes and
//! adapted weights: the shared numerical substrate.

pub mod bumps;
pub mod datum;
pub mod envelope;
pub mod grid;
pub mod norms;
pub mod snapshot;
pub mod synth;

pub use datum::Datum;
pub use envelope::Envelope;
pub use grid::{Grid, IVec, FVec, ZPoint, BAND_LIMIT};
pub use norms::{lp_norm_spacetime, lp_norm_spatial, littlewood_paley_norm, sobolev_norm, Domain, Region};
pub use synth::{synthesize, SpaceTimeField, SpatialField};
pub use weight::{adapted_weight, Body, Weight};

pub mod weight;
