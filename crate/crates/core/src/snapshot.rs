//! Binary field snapshots, bit-exact on round trip.
//!
//! Layout (all little-endian):
//!
//! ```text
//!   offset  size      field
//!   0       4         magic  "HWM1"
//!   4       4         format version, u32 (currently 1)
//!   8       8         M, u64  (number of grid points)
//!   16      8         L, f64  (box length)
//!   24      3·M·8     samples, f64, component-major (x[0..M], y[0..M], z[0..M])
//! ```
//!
//! Total size: 24 + 24·M bytes. Reads reject bad magic, unsupported
//! versions, and any size mismatch — a truncated file never yields a
//! partial field.

use std::path::Path;
use std::sync::Arc;

use crate::error::{HwmError, Result};
use crate::field::VectorField3;
use crate::grid::SpectralGrid;

pub const MAGIC: &[u8; 4] = b"HWM1";
pub const FORMAT_VERSION: u32 = 1;

/// Exact file size for a grid of M points.
pub fn snapshot_size(num_points: usize) -> usize {
    24 + 24 * num_points
}

pub fn snapshot_bytes(field: &VectorField3) -> Vec<u8> {
    let m = field.len();
    let mut out = Vec::with_capacity(snapshot_size(m));
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(m as u64).to_le_bytes());
    out.extend_from_slice(&field.grid().box_length().to_le_bytes());
    for i in 0..3 {
        for &v in field.component(i) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

pub fn write_snapshot(field: &VectorField3, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, snapshot_bytes(field))?;
    Ok(())
}

pub fn snapshot_from_bytes(bytes: &[u8]) -> Result<VectorField3> {
    if bytes.len() < 24 {
        return Err(HwmError::Snapshot(format!(
            "truncated header: {} bytes, need at least 24",
            bytes.len()
        )));
    }
    if &bytes[0..4] != MAGIC {
        return Err(HwmError::Snapshot("bad magic (not an HWM1 snapshot)".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FORMAT_VERSION {
        return Err(HwmError::Snapshot(format!(
            "unsupported format version {version} (supported: {FORMAT_VERSION})"
        )));
    }
    let m = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let l = f64::from_le_bytes(bytes[16..24].try_into().unwrap());
    let expected = snapshot_size(m);
    if bytes.len() != expected {
        return Err(HwmError::Snapshot(format!(
            "size mismatch: file has {} bytes, layout demands {expected} for M = {m}",
            bytes.len()
        )));
    }
    let grid = SpectralGrid::new(l, m)
        .map_err(|e| HwmError::Snapshot(format!("invalid grid in header: {e}")))?;
    let mut comps: [Vec<f64>; 3] = [
        Vec::with_capacity(m),
        Vec::with_capacity(m),
        Vec::with_capacity(m),
    ];
    let mut off = 24;
    for comp in &mut comps {
        for _ in 0..m {
            comp.push(f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()));
            off += 8;
        }
    }
    let [x, y, z] = comps;
    let field = VectorField3::from_components(grid, x, y, z)?;
    if !field.is_finite() {
        return Err(HwmError::Snapshot("snapshot contains non-finite samples".into()));
    }
    Ok(field)
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<VectorField3> {
    snapshot_from_bytes(&std::fs::read(path)?)
}

/// Read onto an existing grid, enforcing matching geometry so the caller
/// can mix the field with others on that grid.
pub fn read_snapshot_on(path: impl AsRef<Path>, grid: &Arc<SpectralGrid>) -> Result<VectorField3> {
    let field = read_snapshot(path)?;
    if field.grid().as_ref() != grid.as_ref() {
        return Err(HwmError::GridMismatch);
    }
    VectorField3::from_components(
        grid.clone(),
        field.component(0).to_vec(),
        field.component(1).to_vec(),
        field.component(2).to_vec(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::random_band_limited;

    #[test]
    fn round_trip_is_bit_exact() {
        let grid = SpectralGrid::new(12.5, 64).unwrap();
        let f = random_band_limited(&grid, 20, 99);
        let bytes = snapshot_bytes(&f);
        let g = snapshot_from_bytes(&bytes).unwrap();
        for i in 0..3 {
            for (a, b) in f.component(i).iter().zip(g.component(i).iter()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
        assert_eq!(g.grid().box_length(), 12.5);
    }

    #[test]
    fn size_matches_layout_arithmetic() {
        let grid = SpectralGrid::new(16.0, 1024).unwrap();
        let f = VectorField3::constant(grid, [0.0, 0.0, 1.0]);
        let bytes = snapshot_bytes(&f);
        // 4 magic + 4 version + 8 M + 8 L + 3·1024·8 data
        assert_eq!(bytes.len(), 24_600);
        assert_eq!(bytes.len(), snapshot_size(1024));
    }

    #[test]
    fn truncation_and_bad_magic_are_rejected() {
        let grid = SpectralGrid::new(8.0, 32).unwrap();
        let f = VectorField3::constant(grid, [1.0, 0.0, 0.0]);
        let bytes = snapshot_bytes(&f);

        let truncated = &bytes[..bytes.len() - 9];
        assert!(matches!(
            snapshot_from_bytes(truncated),
            Err(HwmError::Snapshot(_))
        ));

        let mut garbled = bytes.clone();
        garbled[0] = b'X';
        assert!(matches!(
            snapshot_from_bytes(&garbled),
            Err(HwmError::Snapshot(_))
        ));

        let mut versioned = bytes.clone();
        versioned[4] = 9;
        let err = snapshot_from_bytes(&versioned).unwrap_err().to_string();
        assert!(err.contains("version"), "{err}");

        let mut long = bytes;
        long.push(0);
        assert!(snapshot_from_bytes(&long).is_err());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("slice.hwm");
        let grid = SpectralGrid::new(16.0, 128).unwrap();
        let f = random_band_limited(&grid, 30, 5);
        write_snapshot(&f, &path).unwrap();
        let g = read_snapshot(&path).unwrap();
        assert_eq!(f.component(1), g.component(1));
        let on = read_snapshot_on(&path, &grid).unwrap();
        assert_eq!(f.component(2), on.component(2));
        let other = SpectralGrid::new(16.0, 256).unwrap();
        assert!(matches!(
            read_snapshot_on(&path, &other),
            Err(HwmError::GridMismatch)
        ));
    }
}
