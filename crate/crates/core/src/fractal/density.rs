use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::fractal::cubes::CubeFamily;

/// Result of the `Delta_alpha` supremum: the value and a witnessing ball.
#[derive(Clone, Debug)]
pub struct DensityReport {
    pub alpha: f64,
    pub value: f64,
    pub witness_center: [f64; 3],
    pub witness_radius: f64,
    pub witness_count: usize,
}

/// Exact `Delta_alpha(Q) = sup_B #{cubes ⊆ B} / rad(B)^alpha`.
///
/// Counts only change when a ball face crosses a cube corner, so the
/// supremum is attained on the finite candidate set of radii
/// `(d + 1) M / 2` with `d` a per-axis index difference, and for each radius
/// the best centre comes from an interval sweep. Only `rad >= M/2` balls are
/// admitted. The ambient ball `B(0, R)` is always a candidate, so
/// `#Q <= Delta_alpha * R^alpha` holds with constant 1.
pub fn fractal_density(family: &CubeFamily, alpha: f64) -> Result<DensityReport> {
    if family.is_empty() {
        return Err(Error::precondition("Delta_alpha of an empty family"));
    }
    let n1 = family.n + 1;
    if !(1.0..=(n1 as f64 + 1.0)).contains(&alpha) {
        return Err(Error::precondition(format!(
            "alpha = {alpha} outside the accepted range [1, n+2]"
        )));
    }
    if alpha > n1 as f64 {
        log::warn!("alpha = {alpha} beyond the paper range [1, n+1]; accepted and flagged");
    }
    let idxs: Vec<[i64; 3]> = family.iter().cloned().collect();
    // Candidate half-spans d = |idx_i - idx_j| along any axis (plus 0),
    // collected from the distinct per-axis coordinates.
    let mut spans: BTreeSet<i64> = BTreeSet::new();
    spans.insert(0);
    for ax in 0..n1 {
        let vals: BTreeSet<i64> = idxs.iter().map(|i| i[ax]).collect();
        let vals: Vec<i64> = vals.into_iter().collect();
        for (i, a) in vals.iter().enumerate() {
            for b in &vals[i + 1..] {
                spans.insert((a - b).abs());
            }
        }
    }
    let mut best: Option<DensityReport> = None;
    let mut consider = |count: usize, radius: f64, center: [f64; 3]| {
        let value = count as f64 / radius.powf(alpha);
        let better = match &best {
            None => true,
            Some(b) => value > b.value + 1e-12 * b.value.abs(),
        };
        if better && count > 0 {
            best = Some(DensityReport {
                alpha,
                value,
                witness_center: center,
                witness_radius: radius,
                witness_count: count,
            });
        }
    };
    for d in spans {
        let radius = (d + 1) as f64 * family.m / 2.0;
        if 2.0 * radius > 2.0 * family.r {
            continue;
        }
        let (count, center) = max_enclosed(family, &idxs, radius);
        consider(count, radius, center);
    }
    // The ambient ball always witnesses #Q <= Delta_alpha R^alpha.
    consider(family.len(), family.r, [0.0; 3]);
    Ok(best.expect("nonempty family yields a witness"))
}

/// Maximum number of cubes enclosed in a ball of the given radius and a
/// centre attaining it. Per axis, the admissible centre interval for cube `c`
/// is `[c + M/2 - r, c - M/2 + r]`; the task is a max point-stabbing over
/// boxes.
fn max_enclosed(family: &CubeFamily, idxs: &[[i64; 3]], radius: f64) -> (usize, [f64; 3]) {
    let n1 = family.n + 1;
    let half = family.m / 2.0;
    let slack = radius - half; // interval half-length around each centre
    if slack < 0.0 {
        return (0, [0.0; 3]);
    }
    // The supremum ranges over all balls in R^{n+1}, so centres are
    // unconstrained.
    let boxes: Vec<([f64; 3], [f64; 3])> = idxs
        .iter()
        .map(|idx| {
            let c = family.center_of(idx);
            let mut lo = [0.0; 3];
            let mut hi = [0.0; 3];
            for ax in 0..n1 {
                lo[ax] = c[ax] - slack;
                hi[ax] = c[ax] + slack;
            }
            (lo, hi)
        })
        .collect();
    if boxes.is_empty() {
        return (0, [0.0; 3]);
    }
    match n1 {
        2 => max_stab_2d(&boxes),
        3 => max_stab_3d(&boxes),
        _ => unreachable!(),
    }
}

/// Max point-stabbing over axis-aligned rectangles: sweep the time axis with
/// insertions before removals (closed boxes) and a lazy segment tree over
/// compressed x-intervals.
fn max_stab_2d(boxes: &[([f64; 3], [f64; 3])]) -> (usize, [f64; 3]) {
    let mut xs: Vec<f64> = Vec::with_capacity(2 * boxes.len());
    for (lo, hi) in boxes {
        xs.push(lo[0]);
        xs.push(hi[0]);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup();
    let pos = |x: f64| xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()).unwrap();
    // Events: (t, is_removal, xlo, xhi); insertions first at equal t.
    let mut events: Vec<(f64, bool, usize, usize)> = Vec::with_capacity(2 * boxes.len());
    for (lo, hi) in boxes {
        events.push((lo[1], false, pos(lo[0]), pos(hi[0])));
        events.push((hi[1], true, pos(lo[0]), pos(hi[0])));
    }
    events.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut tree = LazyMaxTree::new(xs.len());
    let mut best = (0usize, [0.0; 3]);
    let mut i = 0;
    while i < events.len() {
        let t = events[i].0;
        // Apply all insertions at this t, then measure, then removals.
        let mut j = i;
        while j < events.len() && events[j].0 == t && !events[j].1 {
            tree.add(events[j].2, events[j].3, 1);
            j += 1;
        }
        let (m, arg) = tree.max_with_arg();
        if m > best.0 {
            best = (m, [xs[arg], t, 0.0]);
        }
        while j < events.len() && events[j].0 == t {
            tree.add(events[j].2, events[j].3, -1);
            j += 1;
        }
        i = j;
    }
    best
}

/// 3-d variant: sweep the time axis, re-solving a 2-d max-stab (over the two
/// spatial axes) whenever the active set can beat the current best.
fn max_stab_3d(boxes: &[([f64; 3], [f64; 3])]) -> (usize, [f64; 3]) {
    let t_ax = 2;
    let mut t_events: Vec<f64> = boxes.iter().map(|(lo, _)| lo[t_ax]).collect();
    t_events.sort_by(|a, b| a.partial_cmp(b).unwrap());
    t_events.dedup();
    let mut best = (0usize, [0.0; 3]);
    for &t in &t_events {
        let active: Vec<([f64; 3], [f64; 3])> = boxes
            .iter()
            .filter(|(lo, hi)| lo[t_ax] <= t && t <= hi[t_ax])
            .cloned()
            .collect();
        if active.len() <= best.0 {
            continue;
        }
        let sub: Vec<([f64; 3], [f64; 3])> = active
            .iter()
            .map(|(lo, hi)| ([lo[0], lo[1], 0.0], [hi[0], hi[1], 0.0]))
            .collect();
        let (m, arg) = max_stab_2d(&sub);
        if m > best.0 {
            best = (m, [arg[0], arg[1], t]);
        }
    }
    best
}

/// Segment tree over positions with lazy range-add and max tracking.
struct LazyMaxTree {
    n: usize,
    max: Vec<i64>,
    lazy: Vec<i64>,
}

impl LazyMaxTree {
    fn new(n: usize) -> LazyMaxTree {
        let n = n.max(1);
        LazyMaxTree { n, max: vec![0; 4 * n], lazy: vec![0; 4 * n] }
    }

    fn add(&mut self, lo: usize, hi: usize, delta: i64) {
        self.add_rec(1, 0, self.n - 1, lo, hi, delta);
    }

    fn add_rec(&mut self, node: usize, nlo: usize, nhi: usize, lo: usize, hi: usize, d: i64) {
        if hi < nlo || nhi < lo {
            return;
        }
        if lo <= nlo && nhi <= hi {
            self.max[node] += d;
            self.lazy[node] += d;
            return;
        }
        let mid = (nlo + nhi) / 2;
        self.add_rec(2 * node, nlo, mid, lo, hi, d);
        self.add_rec(2 * node + 1, mid + 1, nhi, lo, hi, d);
        self.max[node] = self.max[2 * node].max(self.max[2 * node + 1]) + self.lazy[node];
    }

    fn max_with_arg(&self) -> (usize, usize) {
        // Descend to the leftmost maximising leaf.
        let mut node = 1;
        let (mut nlo, mut nhi) = (0, self.n - 1);
        let total = self.max[1];
        if total <= 0 {
            return (0, 0);
        }
        let mut acc = 0i64;
        while nlo < nhi {
            acc += self.lazy[node];
            let mid = (nlo + nhi) / 2;
            if self.max[2 * node] + acc == total {
                node *= 2;
                nhi = mid;
            } else {
                node = 2 * node + 1;
                nlo = mid + 1;
            }
        }
        (total as usize, nlo)
    }
}

/// Counts cubes contained in the closed ball (box) of the given centre and
/// radius: the brute-force oracle used to cross-check witnesses.
pub fn count_in_ball(family: &CubeFamily, center: &[f64; 3], radius: f64) -> usize {
    let n1 = family.n + 1;
    family
        .iter()
        .filter(|idx| {
            let c = family.center_of(idx);
            (0..n1).all(|ax| (c[ax] - center[ax]).abs() + family.m / 2.0 <= radius + 1e-9)
        })
        .count()
}
