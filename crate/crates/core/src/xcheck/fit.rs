use crate::error::{Error, Result};
use crate::xcheck::experiments::RatioTable;

/// Least-squares fit of `log2(ratio)` against `log2(R)`:
/// `ratio ~ 2^intercept * R^slope`.
#[derive(Clone, Copy, Debug)]
pub struct GrowthFit {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
}

pub fn fit_growth_exponent(table: &RatioTable) -> Result<GrowthFit> {
    if table.rows.len() < 3 {
        return Err(Error::precondition("growth fit needs at least 3 rows"));
    }
    let pts: Vec<(f64, f64)> = table
        .rows
        .iter()
        .map(|row| {
            if !(row.r > 0.0 && row.ratio > 0.0) {
                Err(Error::precondition("growth fit needs positive scales and ratios"))
            } else {
                Ok((row.r.log2(), row.ratio.log2()))
            }
        })
        .collect::<Result<_>>()?;
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return Err(Error::precondition("degenerate scale set for the growth fit"));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let residual = (pts
        .iter()
        .map(|(x, y)| {
            let e = y - (slope * x + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(GrowthFit { slope, intercept, residual })
}
