//! Numerical toolkit for band-limited Schrödinger evolution: wave-packet
//! decomposition, parabolic rescaling, broad–narrow analysis, fractal cube
//! densities and an experiment runner that measures dispersive inequalities
//! as ratios across dyadic scales.

pub mod broadnarrow;
pub mod error;
pub mod field;
pub mod fractal;
pub mod geometry;
pub mod propagator;
pub mod wavepacket;
pub mod xcheck;

pub use error::{Error, Result};
