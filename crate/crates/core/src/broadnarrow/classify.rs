use crate::broadnarrow::aligned::{aligned_caps, SubspaceCandidate};
use crate::broadnarrow::cover::CapCover;
use crate::broadnarrow::fuzzy::{fuzzy_norm, FuzzyStencil};
use crate::error::{Error, Result};
use crate::field::datum::Datum;
use crate::field::grid::ZPoint;
use crate::field::norms::{lp_norm_spacetime, Domain, Region};
use crate::field::synth::SpaceTimeField;
use crate::field::weight::Weight;
use crate::fractal::cubes::CubeFamily;
use crate::geometry::transversal::wedge_transversality;
use crate::propagator::solve_spacetime;
use crate::wavepacket::windows::phi_hat;

/// Thresholds of the broad/narrow cube dichotomy.
#[derive(Clone, Copy, Debug)]
pub struct ClassifyParams {
    /// `C_eps^bn` in the dichotomy inequality.
    pub c_bn: f64,
    /// The epsilon in the `K^eps` loss.
    pub eps: f64,
    /// The alignment constant `C_n`.
    pub c_n: f64,
}

impl Default for ClassifyParams {
    fn default() -> Self {
        ClassifyParams { c_bn: 4.0, eps: 0.1, c_n: 4.0 }
    }
}

/// Dimensional exponent `E = 4 n^2` of the broad bound.
pub fn broad_exponent(n: usize) -> f64 {
    4.0 * (n as f64) * (n as f64)
}

/// Per-cube classification record.
#[derive(Clone, Debug)]
pub struct CubeClassRecord {
    pub idx: [i64; 3],
    pub lhs: f64,
    pub narrow_rhs: f64,
    pub is_narrow: bool,
    /// For broad cubes: the best transverse tuple and the recorded
    /// multilinear bound `2 C K^E * fuzzy`.
    pub broad_bound: Option<(Vec<usize>, f64)>,
}

/// Splits the datum across the cover's caps with the tile partition of unity
/// at scale `K^{-1}` (the cover's lattice is the `c_n K^{-1}` lattice, so the
/// wave-packet tile at `rho = K^2` matches it exactly).
pub fn cap_partition(f: &Datum, cover: &CapCover) -> Vec<(usize, Datum)> {
    let grid = f.grid().clone();
    let n = grid.n;
    let rho = cover.k * cover.k;
    let mut out = Vec::new();
    for (i, cap) in cover.caps.iter().enumerate() {
        let mut piece = Datum::new(grid.clone());
        for (k, a) in f.iter() {
            let xi = grid.xi_of(*k);
            let w = phi_hat(&xi, &cap.center, rho, n);
            if w != 0.0 {
                piece.add_coeff(*k, a * w).expect("partition stays in band");
            }
        }
        if !piece.is_empty() {
            out.push((i, piece));
        }
    }
    out
}

/// Classifies the cubes of a side-`K^2` family as broad or narrow:
/// narrow when `||Uf||_q(Q) <= 2 C K^eps (sum_tau ||Uf_tau||^2_q(w_Q))^{1/2}`.
///
/// For broad cubes the multilinear bound is recorded with its witnessing
/// transverse tuple (maximising the fuzzy norm over tuples of active caps).
pub fn classify_cubes(
    cubes: &CubeFamily,
    f: &Datum,
    cover: &CapCover,
    q: f64,
    params: &ClassifyParams,
) -> Result<(Vec<[i64; 3]>, Vec<[i64; 3]>, Vec<CubeClassRecord>)> {
    let n = f.grid().n;
    let qmax = if n == 1 { f64::INFINITY } else { 2.0 * (n as f64 + 1.0) / (n as f64 - 1.0) };
    if q < 2.0 || q > qmax {
        return Err(Error::precondition(format!("q = {q} outside [2, 2(n+1)/(n-1)]")));
    }
    let k = cover.k;
    if (cubes.m - k * k).abs() > 1e-9 {
        return Err(Error::precondition("cube side must equal K^2"));
    }
    let r = cubes.r;
    let uf = solve_spacetime(f, r)?;
    let pieces = cap_partition(f, cover);
    let fields: Vec<(usize, SpaceTimeField)> = pieces
        .iter()
        .map(|(i, d)| solve_spacetime(d, r).map(|u| (*i, u)))
        .collect::<Result<_>>()?;

    // Transverse tuples among active caps only.
    let active_caps: Vec<usize> = pieces.iter().map(|(i, _)| *i).collect();
    let mut transverse: Vec<Vec<usize>> = Vec::new();
    if active_caps.len() > n {
        let mut idx = vec![0usize; n + 1];
        'outer: loop {
            let caps: Vec<_> = idx.iter().map(|i| cover.caps[active_caps[*i]]).collect();
            if wedge_transversality(&caps, n)? >= k.powi(-(n as i32)) {
                transverse.push(idx.iter().map(|i| active_caps[*i]).collect());
            }
            let mut ax = 0;
            loop {
                if ax == n + 1 {
                    break 'outer;
                }
                idx[ax] += 1;
                if idx[ax] < active_caps.len() {
                    break;
                }
                idx[ax] = 0;
                ax += 1;
            }
        }
    }

    let mut broad = Vec::new();
    let mut narrow = Vec::new();
    let mut records = Vec::new();
    let threshold_factor = 2.0 * params.c_bn * k.powf(params.eps);
    for idx in cubes.iter() {
        let c = cubes.center_of(idx);
        let center = ZPoint::new([c[0], if n == 2 { c[1] } else { 0.0 }], c[n]);
        let region = Region::ZBall { center, r: cubes.m / 2.0 };
        let lhs = lp_norm_spacetime(&uf, q, &Domain::Region(region))?;
        let w_q = Weight::plateau_for_cube(n, center, cubes.m);
        let mut sq = 0.0;
        for (_, u) in &fields {
            let nrm = lp_norm_spacetime(u, q, &Domain::Weight(&w_q))?;
            sq += nrm * nrm;
        }
        let narrow_rhs = threshold_factor * sq.sqrt();
        let is_narrow = lhs <= narrow_rhs;
        let mut broad_bound = None;
        if !is_narrow {
            // Record the multilinear bound with its witness tuple.
            let mut best: Option<(Vec<usize>, f64)> = None;
            for tuple in &transverse {
                let tuple_fields: Vec<&SpaceTimeField> = tuple
                    .iter()
                    .map(|ci| &fields.iter().find(|(i, _)| i == ci).unwrap().1)
                    .collect();
                let v = fuzzy_norm(
                    &tuple_fields,
                    q,
                    center,
                    cubes.m,
                    k,
                    FuzzyStencil::ThreePoint,
                )?;
                if best.as_ref().map(|(_, bv)| v > *bv).unwrap_or(true) {
                    best = Some((tuple.clone(), v));
                }
            }
            broad_bound = best.map(|(t, v)| {
                (t, 2.0 * params.c_bn * k.powf(broad_exponent(n)) * v)
            });
            broad.push(*idx);
        } else {
            narrow.push(*idx);
        }
        records.push(CubeClassRecord { idx: *idx, lhs, narrow_rhs, is_narrow, broad_bound });
    }
    Ok((broad, narrow, records))
}

/// Decoupling comparison over a `K^2`-cube: the norm of the `V`-aligned part
/// against the square function, with the trivial interpolation factor
/// `K^{(d-1)(1/2 - 1/q)}` as the baseline.
pub fn decoupling_ratio(
    f: &Datum,
    v: &SubspaceCandidate,
    cover: &CapCover,
    q: f64,
    cube_center: ZPoint,
    cube_side: f64,
    params: &ClassifyParams,
) -> Result<(f64, f64, f64)> {
    let n = f.grid().n;
    let d = n; // dim V
    let qmax = 2.0 * (d as f64 + 1.0) / ((d as f64 - 1.0).max(1e-9));
    if q < 2.0 || (d > 1 && q > qmax) {
        return Err(Error::precondition("q outside the decoupling range"));
    }
    let k = cover.k;
    let r = f.grid().l / 4.0;
    let aligned = aligned_caps(v, cover, k, params.c_n)?;
    let pieces = cap_partition(f, cover);
    let mut fv = Datum::new(f.grid().clone());
    let mut sq = 0.0;
    let region = Region::ZBall { center: cube_center, r: cube_side / 2.0 };
    let w_q = Weight::plateau_for_cube(n, cube_center, cube_side);
    for (i, piece) in &pieces {
        if aligned.contains(i) {
            fv.add(piece)?;
            let u = solve_spacetime(piece, r)?;
            let nrm = lp_norm_spacetime(&u, q, &Domain::Weight(&w_q))?;
            sq += nrm * nrm;
        }
    }
    if fv.is_empty() {
        return Err(Error::precondition("no aligned caps carry mass"));
    }
    let ufv = solve_spacetime(&fv, r)?;
    let lhs = lp_norm_spacetime(&ufv, q, &Domain::Region(region))?;
    let s = sq.sqrt();
    let trivial_rhs = k.powf((d as f64 - 1.0) * (0.5 - 1.0 / q)) * s;
    Ok((lhs, trivial_rhs, lhs / s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::broadnarrow::cover::{cap_cover, CoverRadius};
    use crate::field::grid::Grid;
    use std::sync::Arc;

    fn grid_small() -> Arc<Grid> {
        Arc::new(Grid::new(1, 128.0, 256, -32.0, 32.0, 129).unwrap())
    }

    #[test]
    fn partition_reconstructs_datum() {
        let g = grid_small();
        let f = Datum::random_band(g.clone(), 0.9, 1).unwrap();
        let cover = cap_cover(4.0, 1, CoverRadius::Full).unwrap();
        let pieces = cap_partition(&f, &cover);
        let mut acc = Datum::new(g);
        for (_, p) in &pieces {
            acc.add(p).unwrap();
        }
        assert!(acc.l2_distance(&f) < 1e-12 * f.l2_norm());
    }

    #[test]
    fn single_cap_datum_is_all_narrow() {
        let g = grid_small();
        let cover = cap_cover(4.0, 1, CoverRadius::Full).unwrap();
        // Datum inside one cap: the sum over tau has a single term.
        let f = Datum::gaussian_bump(g.clone(), [0.25, 0.0], 0.02, [0.0, 0.0], 0.4).unwrap();
        let mut cubes = CubeFamily::new(1, 16.0, 32.0).unwrap();
        for x in -1..=1 {
            cubes.insert([x, 0, 0]).unwrap();
        }
        let (broad, narrow, records) =
            classify_cubes(&cubes, &f, &cover, 4.0, &ClassifyParams::default()).unwrap();
        assert_eq!(broad.len() + narrow.len(), cubes.len());
        assert!(broad.is_empty(), "single-cap datum must be all narrow");
        assert!(records.iter().all(|r| r.is_narrow));
    }

    #[test]
    fn transverse_packets_make_their_meeting_cube_broad_for_small_thresholds() {
        // K = 4: cube side 16 with fuzzy margin 3K^2 = 48 fits the grid.
        let g = Arc::new(Grid::new(1, 512.0, 1024, -128.0, 128.0, 513).unwrap());
        let cover = cap_cover(4.0, 1, CoverRadius::Full).unwrap();
        let mut f = Datum::gaussian_bump(g.clone(), [-0.75, 0.0], 0.03, [0.0, 0.0], 0.9).unwrap();
        let f2 = Datum::gaussian_bump(g.clone(), [0.75, 0.0], 0.03, [0.0, 0.0], 0.9).unwrap();
        f.add(&f2).unwrap();
        let mut cubes = CubeFamily::new(1, 16.0, 128.0).unwrap();
        cubes.insert([0, 0, 0]).unwrap();
        // Tiny thresholds force the dichotomy to the broad side at the
        // meeting cube.
        let params = ClassifyParams { c_bn: 1e-6, eps: 0.1, c_n: 4.0 };
        let (broad, _, records) = classify_cubes(&cubes, &f, &cover, 4.0, &params).unwrap();
        assert!(broad.contains(&[0, 0, 0]));
        let rec = records.iter().find(|r| r.idx == [0, 0, 0]).unwrap();
        let (tuple, bound) = rec.broad_bound.as_ref().expect("broad bound recorded");
        assert_eq!(tuple.len(), 2);
        assert!(*bound > 0.0);
    }

    #[test]
    fn classification_is_rerun_stable() {
        let g = grid_small();
        let cover = cap_cover(4.0, 1, CoverRadius::Full).unwrap();
        let f = Datum::random_band(g, 0.9, 5).unwrap();
        let mut cubes = CubeFamily::new(1, 16.0, 32.0).unwrap();
        for x in -1..=1 {
            for t in -1..=1 {
                cubes.insert([x, t, 0]).unwrap();
            }
        }
        let p = ClassifyParams::default();
        let a = classify_cubes(&cubes, &f, &cover, 4.0, &p).unwrap();
        let b = classify_cubes(&cubes, &f, &cover, 4.0, &p).unwrap();
        assert_eq!(a.0, b.0);
        assert_eq!(a.1, b.1);
        for (ra, rb) in a.2.iter().zip(&b.2) {
            assert_eq!(ra.lhs.to_bits(), rb.lhs.to_bits());
            assert_eq!(ra.narrow_rhs.to_bits(), rb.narrow_rhs.to_bits());
        }
    }

    #[test]
    fn decoupling_single_aligned_cap_has_ratio_one() {
        let g = grid_small();
        let cover = cap_cover(4.0, 1, CoverRadius::Full).unwrap();
        // A single lattice mode: the smooth tile partition spreads it over at
        // most two adjacent caps with weights summing to 1, so the ratio sits
        // in [1, sqrt(2)] up to the plateau-weight slack.
        let mut f = Datum::new(g.clone());
        let kk = (0.25 / g.dxi()).round() as i64;
        f.add_coeff([kk, 0], num_complex::Complex64::new(1.0, 0.0)).unwrap();
        let idx = cover
            .caps
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                (a.center[0] - 0.25)
                    .abs()
                    .partial_cmp(&(b.center[0] - 0.25).abs())
                    .unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        let v = SubspaceCandidate::from_caps(&cover.caps, &[idx], 1).unwrap();
        let (lhs, _trivial, ratio) = decoupling_ratio(
            &f,
            &v,
            &cover,
            2.0,
            ZPoint::new([0.0, 0.0], 0.0),
            16.0,
            &ClassifyParams::default(),
        )
        .unwrap();
        assert!(lhs > 0.0);
        assert!((0.7..=1.45).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn decoupling_q2_near_orthogonality() {
        let g = grid_small();
        let cover = cap_cover(4.0, 1, CoverRadius::Full).unwrap();
        let f = Datum::random_band(g, 0.9, 9).unwrap();
        let v = SubspaceCandidate::from_caps(&cover.caps, &[cover.len() / 2], 1).unwrap();
        let (_, _, ratio) = decoupling_ratio(
            &f,
            &v,
            &cover,
            2.0,
            ZPoint::new([0.0, 0.0], 0.0),
            16.0,
            &ClassifyParams::default(),
        )
        .unwrap();
        assert!(ratio <= 2.0, "Plancherel-block ratio {ratio}");
    }
}
