//! Wave-packet decomposition at parabolic scale `rho`: reconstruction,
//! dispersion/orthogonality/localization checks, strip grouping and
//! time-interval assignment.

pub mod decompose;
pub mod export;
pub mod intervals;
pub mod packets;
pub mod stripgroup;
pub mod windows;

pub use decompose::{decompose, localization_report, orthogonality_constant, PacketFamily, TubeKey};
pub use export::export_packet_family;
pub use intervals::assign_time_intervals;
pub use packets::build_packet_datum;
pub use stripgroup::{group_by_strip, StripGroup};
