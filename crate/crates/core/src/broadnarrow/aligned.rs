use crate::broadnarrow::cover::CapCover;
use crate::error::{Error, Result};
use crate::geometry::caps::Cap;
use crate::geometry::gauss::{gauss_map, sin_angle_to_hyperplane};

/// An `n`-dimensional linear subspace of `R^{n+1}`, stored by its unit
/// normal, together with the cap indices that span it (for deterministic
/// tie-breaking).
#[derive(Clone, Debug)]
pub struct SubspaceCandidate {
    pub normal: [f64; 3],
    pub generators: Vec<usize>,
}

impl SubspaceCandidate {
    /// Span of the Gauss normals of `n` caps; `None` when degenerate.
    pub fn from_caps(cover_caps: &[Cap], gens: &[usize], n: usize) -> Option<SubspaceCandidate> {
        let g: Vec<[f64; 3]> = gens
            .iter()
            .map(|i| gauss_map(&cover_caps[*i].center, n))
            .collect();
        Self::from_vectors(&g, gens.to_vec(), n)
    }

    pub fn from_vectors(g: &[[f64; 3]], generators: Vec<usize>, n: usize) -> Option<SubspaceCandidate> {
        match n {
            1 => {
                // Line spanned by g0 in R^2: normal is its rotation.
                let v = g[0];
                let nrm = (v[0] * v[0] + v[1] * v[1]).sqrt();
                if nrm == 0.0 {
                    return None;
                }
                Some(SubspaceCandidate {
                    normal: [-v[1] / nrm, v[0] / nrm, 0.0],
                    generators,
                })
            }
            2 => {
                let (a, b) = (g[0], g[1]);
                let c = [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ];
                let nrm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
                if nrm < 1e-12 {
                    return None;
                }
                Some(SubspaceCandidate {
                    normal: [c[0] / nrm, c[1] / nrm, c[2] / nrm],
                    generators,
                })
            }
            _ => None,
        }
    }

    /// `|sin angle(G(tau), V)|` with the infimum over the cap's sample points.
    pub fn sin_angle_to_cap(&self, cap: &Cap, n: usize) -> f64 {
        cap.sample_points(n)
            .iter()
            .map(|p| sin_angle_to_hyperplane(&gauss_map(p, n), &self.normal, n + 1))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Exactly the caps whose sampled Gauss directions satisfy
/// `|sin angle(G(tau), V)| <= C_n K^{-1}`.
pub fn aligned_caps(
    v: &SubspaceCandidate,
    cover: &CapCover,
    k: f64,
    c_n: f64,
) -> Result<Vec<usize>> {
    if c_n < 1.0 {
        return Err(Error::precondition("C_n must be >= 1"));
    }
    let bound = c_n / k;
    Ok(cover
        .caps
        .iter()
        .enumerate()
        .filter(|(_, cap)| v.sin_angle_to_cap(cap, cover.n) <= bound)
        .map(|(i, _)| i)
        .collect())
}
