//! Trajectory snapshots: a flat little-endian `f64` file plus JSON metadata.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::spectral_core::{PhaseField, Repr, SpectralGrid};
use crate::{Error, Result, C64, CONVENTION_VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub grid: SpectralGrid,
    pub times: Vec<f64>,
    pub repr: Repr,
    pub convention: String,
    /// Values per field (`re, im` pairs count once).
    pub len: usize,
}

/// Write `<stem>.bin` and `<stem>.json`; fields are stored in the `XV` representation.
pub fn write_snapshot(traj: &Trajectory, stem: &Path) -> Result<()> {
    let grid = match traj.fields.first() {
        Some(f) => *f.grid(),
        None => return Err(Error::Config("empty trajectory".into())),
    };
    let meta = SnapshotMeta {
        grid,
        times: traj.times.clone(),
        repr: Repr::XV,
        convention: CONVENTION_VERSION.to_string(),
        len: grid.len(),
    };
    let mut bin = fs::File::create(stem.with_extension("bin"))?;
    let mut buf = Vec::with_capacity(16 * grid.len());
    for f in &traj.fields {
        buf.clear();
        for z in f.to(Repr::XV).data() {
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
        bin.write_all(&buf)?;
    }
    let json = serde_json::to_string_pretty(&meta).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(stem.with_extension("json"), json)?;
    Ok(())
}

pub fn read_snapshot(stem: &Path) -> Result<Trajectory> {
    let text = fs::read_to_string(stem.with_extension("json"))?;
    let meta: SnapshotMeta = serde_json::from_str(&text).map_err(|e| Error::Io(e.to_string()))?;
    let mut bytes = Vec::new();
    fs::File::open(stem.with_extension("bin"))?.read_to_end(&mut bytes)?;
    if bytes.len() != meta.times.len() * meta.len * 16 {
        return Err(Error::Io("snapshot size does not match its metadata".into()));
    }
    let word = |i: usize| f64::from_le_bytes(bytes[8 * i..8 * i + 8].try_into().unwrap());
    let fields = (0..meta.times.len())
        .map(|n| {
            let data = (0..meta.len)
                .map(|i| {
                    let at = 2 * (n * meta.len + i);
                    C64::new(word(at), word(at + 1))
                })
                .collect();
            PhaseField::from_data(meta.grid, meta.repr, data)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times: meta.times,
        fields,
    })
}
