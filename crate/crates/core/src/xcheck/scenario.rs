use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::datum::Datum;
use crate::field::grid::Grid;
use crate::geometry::cn;
use crate::geometry::tubes::Tube;
use crate::wavepacket::packets::build_packet_datum;

/// Data generators for the experiment runner.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    SinglePacket,
    PacketSuperposition,
    SingleMode,
    RandomBand,
    FocusingBump,
}

impl ScenarioKind {
    pub fn parse(s: &str) -> Result<ScenarioKind> {
        match s {
            "single_packet" => Ok(ScenarioKind::SinglePacket),
            "packet_superposition" => Ok(ScenarioKind::PacketSuperposition),
            "single_mode" => Ok(ScenarioKind::SingleMode),
            "random_band" => Ok(ScenarioKind::RandomBand),
            "focusing_bump" => Ok(ScenarioKind::FocusingBump),
            other => Err(Error::config(format!("unknown scenario kind '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::SinglePacket => "single_packet",
            ScenarioKind::PacketSuperposition => "packet_superposition",
            ScenarioKind::SingleMode => "single_mode",
            ScenarioKind::RandomBand => "random_band",
            ScenarioKind::FocusingBump => "focusing_bump",
        }
    }
}

/// A reproducible experiment scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub n: usize,
    pub seed: u64,
    pub packet_count: usize,
}

impl Scenario {
    pub fn new(kind: ScenarioKind, n: usize, seed: u64) -> Scenario {
        Scenario { kind, n, seed, packet_count: 4 }
    }

    /// Builds the datum for scale `r` on the given grid; normalised to
    /// `‖f‖ = 1`.
    pub fn build(&self, grid: Arc<Grid>, r: f64) -> Result<Datum> {
        let n = self.n;
        let mut d = match self.kind {
            ScenarioKind::SinglePacket => {
                let mut v = [0.0; 2];
                v[0] = 0.5;
                build_packet_datum(grid.clone(), &Tube::new([0.0; 2], v, r))?
            }
            ScenarioKind::PacketSuperposition => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                let mut acc = Datum::new(grid.clone());
                let pos_spacing = r.sqrt();
                let vel_spacing = 2.0 * cn(n) / r.sqrt();
                let pos_max = ((grid.l / 4.0) / pos_spacing).floor() as i64 - 1;
                // Speeds in the admissible window [1/4, 2] but away from the
                // unit-ball cap margin.
                let vel_max = ((0.8 / vel_spacing).floor() as i64).max(1);
                let vel_min = ((0.25 / vel_spacing).ceil() as i64).max(1);
                for _ in 0..self.packet_count {
                    let mut x0 = [0.0; 2];
                    let mut v = [0.0; 2];
                    for ax in 0..n {
                        x0[ax] = rng.gen_range(-pos_max..=pos_max) as f64 * pos_spacing;
                        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                        v[ax] = sign * rng.gen_range(vel_min..=vel_max) as f64 * vel_spacing;
                    }
                    let packet = build_packet_datum(grid.clone(), &Tube::new(x0, v, r))?;
                    acc.add(&packet)?;
                }
                acc
            }
            ScenarioKind::SingleMode => {
                let mut d = Datum::new(grid.clone());
                let k = (0.5 / grid.dxi()).round() as i64;
                d.add_coeff([k, 0], Complex64::new(1.0, 0.0))?;
                d
            }
            ScenarioKind::RandomBand => Datum::random_band(grid.clone(), 1.0, self.seed)?,
            ScenarioKind::FocusingBump => {
                let mut d = Datum::new(grid.clone());
                let kmax = (0.5 / grid.dxi()).floor() as i64;
                for k in crate::field::datum::lattice_indices(n, kmax) {
                    let xi = grid.xi_of(k);
                    if crate::field::grid::norm_n(&xi, n) < 0.5 {
                        d.add_coeff(k, Complex64::new(1.0, 0.0))?;
                    }
                }
                d
            }
        };
        let nrm = d.l2_norm();
        if nrm > 0.0 {
            d.scale(Complex64::new(1.0 / nrm, 0.0));
        }
        Ok(d)
    }

    /// Frequency-band radius of the scenario's data (for time sampling).
    pub fn band(&self) -> f64 {
        1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenarios_build_normalised_data() {
        let g = Arc::new(Grid::for_ball(1, 32.0, 1.0).unwrap());
        for kind in [
            ScenarioKind::SinglePacket,
            ScenarioKind::PacketSuperposition,
            ScenarioKind::SingleMode,
            ScenarioKind::RandomBand,
            ScenarioKind::FocusingBump,
        ] {
            let s = Scenario::new(kind, 1, 3);
            let d = s.build(g.clone(), 32.0).unwrap();
            assert!((d.l2_norm() - 1.0).abs() < 1e-10, "{kind:?}");
            assert!(d.support_radius() < 2.0);
        }
    }

    #[test]
    fn scenario_build_is_deterministic() {
        let g = Arc::new(Grid::for_ball(1, 32.0, 1.0).unwrap());
        let s = Scenario::new(ScenarioKind::PacketSuperposition, 1, 9);
        let a = s.build(g.clone(), 32.0).unwrap();
        let b = s.build(g, 32.0).unwrap();
        assert_eq!(a.l2_distance(&b), 0.0);
    }
}
