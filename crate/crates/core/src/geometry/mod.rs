//! Paraboloid geometry: caps, the Gauss map, parabolic rescaling, tubes,
//! strips, parallelepipeds and transversality. Only the paraboloid
//! `Sigma(xi) = (xi, |xi|^2)` is supported.

pub mod caps;
pub mod gauss;
pub mod strips;
pub mod transversal;
pub mod tubes;

pub use caps::{cap_rescaling_maps, paraboloid_lift, rescale_datum, Cap, RescaleMaps};
pub use gauss::{gauss_map, wedge};
pub use strips::{parallelepiped_cover, strip_rescaling, strips_for_cap, Parallelepiped, Strip, StripMap};
pub use transversal::{enumerate_transverse_tuples, wedge_transversality};
pub use tubes::{tube_region, Tube, TubeClass};

/// Velocity-lattice constant `c_n = 1/(2 sqrt(n))`.
pub fn cn(n: usize) -> f64 {
    1.0 / (2.0 * (n as f64).sqrt())
}
