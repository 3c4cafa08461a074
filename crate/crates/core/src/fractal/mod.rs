//! Lattice cube families, fractal densities, pigeonholing utilities and the
//! multiplicity / counting machinery.

pub mod cubes;
pub mod density;
pub mod multiplicity;
pub mod pigeonhole;

pub use cubes::CubeFamily;
pub use density::{fractal_density, DensityReport};
pub use multiplicity::{density_comparison_check, multiplicity_counts, MultiplicityTable};
pub use pigeonhole::{dyadic_pigeonhole, dyadic_pigeonhole_weighted, reverse_holder_partition};
