use std::collections::BTreeMap;

use crate::field::grid::norm_sq_n;
use crate::geometry::tubes::Tube;
use crate::wavepacket::decompose::{PacketFamily, TubeKey};

/// Speed window for the time-interval assignment: tubes moving slower than
/// 1/4 or faster than 2 are assigned nowhere.
pub const SPEED_MIN: f64 = 0.25;
pub const SPEED_MAX: f64 = 2.0;

/// Whether the infinite slab around the tube's core line meets the dilated
/// block `B^n(0, R^{1+delta}) x [tc - R^{1+delta}/2, tc + R^{1+delta}/2]`.
fn tube_meets_block(tube: &Tube, n: usize, r: f64, delta: f64, tc: f64) -> bool {
    let half_t = r.powf(1.0 + delta) / 2.0;
    let (t0, t1) = (tc - half_t, tc + half_t);
    // Minimise |x(T) + t v(T)| over the time window.
    let vv = norm_sq_n(&tube.v, n);
    let xv: f64 = (0..n).map(|a| tube.x0[a] * tube.v[a]).sum();
    let t_star = if vv > 0.0 { (-xv / vv).clamp(t0, t1) } else { t0 };
    let mut p = [0.0; 2];
    for ax in 0..n {
        p[ax] = tube.x0[ax] + t_star * tube.v[ax];
    }
    let dist = crate::field::grid::norm_n(&p, n);
    dist <= r.powf(1.0 + delta) + r.sqrt()
}

/// Assigns tubes of a scale-`R` family to the lattice `R`-intervals
/// `I_j = [jR, (j+1)R]` covering `[0, R^2]`: a tube joins `I_j` when its slab
/// meets the dilated block over `I_j` and its speed lies in `[1/4, 2]`.
pub fn assign_time_intervals(
    family: &PacketFamily,
    r: f64,
    delta: f64,
) -> BTreeMap<i64, Vec<TubeKey>> {
    let n = family.grid.n;
    let jmax = r.ceil() as i64; // intervals covering [0, R^2]
    let mut out: BTreeMap<i64, Vec<TubeKey>> = BTreeMap::new();
    for (key, comp) in family.iter() {
        let speed = comp.tube.speed(n);
        if !(SPEED_MIN..=SPEED_MAX).contains(&speed) {
            continue;
        }
        for j in 0..=jmax {
            let tc = (j as f64 + 0.5) * r;
            if tube_meets_block(&comp.tube, n, r, delta, tc) {
                out.entry(j).or_default().push(*key);
            }
        }
    }
    out
}

/// Largest number of intervals any single tube belongs to.
pub fn max_membership(assignment: &BTreeMap<i64, Vec<TubeKey>>) -> usize {
    let mut counts: BTreeMap<TubeKey, usize> = BTreeMap::new();
    for keys in assignment.values() {
        for k in keys {
            *counts.entry(*k).or_insert(0) += 1;
        }
    }
    counts.values().cloned().max().unwrap_or(0)
}

/// Membership count of one tube.
pub fn membership_of(assignment: &BTreeMap<i64, Vec<TubeKey>>, key: &TubeKey) -> usize {
    assignment.values().filter(|ks| ks.contains(key)).count()
}
