use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::wavepacket::decompose::PacketFamily;

#[derive(Serialize)]
struct TubeRecord<'a> {
    x: &'a [f64],
    v: &'a [f64],
    rho: f64,
    l2_mass: f64,
    coeff_blob: String,
    blob_offset: u64,
    blob_len: u64,
}

/// Writes a packet family as JSON-lines (one record per tube) plus a binary
/// coefficient blob. Each record carries `x(T)`, `v(T)`, `rho`, the tube's
/// `L^2` mass and a byte-range reference into the blob, which stores
/// `(k0, k1, re, im)` little-endian entries per coefficient.
pub fn export_packet_family(
    family: &PacketFamily,
    jsonl_path: &Path,
    blob_path: &Path,
) -> Result<()> {
    let mut jsonl = std::io::BufWriter::new(std::fs::File::create(jsonl_path)?);
    let mut blob = std::io::BufWriter::new(std::fs::File::create(blob_path)?);
    let blob_name = blob_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "coeffs.bin".to_string());
    let n = family.grid.n;
    let mut offset = 0u64;
    for (_, comp) in family.iter() {
        let start = offset;
        for (k, a) in comp.datum.iter() {
            blob.write_all(&k[0].to_le_bytes())?;
            blob.write_all(&k[1].to_le_bytes())?;
            blob.write_all(&a.re.to_le_bytes())?;
            blob.write_all(&a.im.to_le_bytes())?;
            offset += 32;
        }
        let rec = TubeRecord {
            x: &comp.tube.x0[..n],
            v: &comp.tube.v[..n],
            rho: family.rho,
            l2_mass: comp.datum.l2_norm().powi(2),
            coeff_blob: blob_name.clone(),
            blob_offset: start,
            blob_len: offset - start,
        };
        serde_json::to_writer(&mut jsonl, &rec)
            .map_err(|e| crate::error::Error::Parse(e.to_string()))?;
        jsonl.write_all(b"\n")?;
    }
    Ok(())
}
